"""Dense Hamiltonians for the Bose-Hubbard chain and the transverse-field Ising chain.

All operators are plain complex ``numpy`` arrays.  Boson matrix elements use
b|n> = sqrt(n)|n-1> and b^dag|n> = sqrt(n+1)|n+1>; sites are 1-indexed in the
public API (``l_A`` names the last site of A) and 0-indexed internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .fock import BipartiteSplit, FockBasis

ISING_MAX_SITES = 12

HERMITIAN_ATOL = 1e-12

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


@dataclass(frozen=True)
class ModelSpec:
    """Lattice model parameters.

    ``kind`` is ``"bose_hubbard"`` or ``"ising"``.  ``N`` and ``U`` are ignored
    for the Ising chain, whose transverse field is fixed at 1.  ``l_A`` is the
    number of sites in subsystem A.
    """

    kind: str
    L: int
    l_A: int
    J: float = 1.0
    U: float = 1.0
    N: int = 0

    def __post_init__(self):
        if self.kind not in ("bose_hubbard", "ising"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.L < 1:
            raise ValueError("need at least one site")
        # a single site has no bipartition; only the drift builders accept it
        if self.L > 1 and not 1 <= self.l_A <= self.L - 1:
            raise ValueError(f"l_A must lie in 1..{self.L - 1}, got {self.l_A}")
        if not (math.isfinite(self.J) and math.isfinite(self.U)):
            raise ValueError("J and U must be finite")
        if self.kind == "bose_hubbard" and self.N < 0:
            raise ValueError("particle number must be non-negative")


def check_hermitian(H: np.ndarray, atol: float = HERMITIAN_ATOL) -> None:
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    if not np.allclose(H, H.conj().T, rtol=0.0, atol=atol):
        raise ValueError("matrix is not Hermitian")


def _check_basis(spec: ModelSpec, basis: FockBasis) -> None:
    if spec.kind != "bose_hubbard":
        raise ValueError(f"expected a bose_hubbard spec, got {spec.kind}")
    if basis.L != spec.L or basis.n_particles != spec.N:
        raise ValueError(
            f"basis (L={basis.L}, N={basis.n_particles}) does not match spec (L={spec.L}, N={spec.N})"
        )


def hopping(basis: FockBasis, i: int, j: int) -> np.ndarray:
    """Matrix of b_i^dag b_j + b_j^dag b_i on 0-indexed sites i, j."""
    H = np.zeros((basis.dim, basis.dim), dtype=complex)
    for col, s in enumerate(basis.states):
        for src, dst in ((j, i), (i, j)):
            if s[src] == 0:
                continue
            t = s.copy()
            amp = math.sqrt(t[src]) * math.sqrt(t[dst] + 1)
            t[src] -= 1
            t[dst] += 1
            H[basis.index(t), col] += amp
    return H


def onsite_interaction(basis: FockBasis) -> np.ndarray:
    """Diagonal of sum_i n_i (n_i - 1) / 2."""
    n = basis.states
    return np.diag((n * (n - 1)).sum(axis=1) / 2.0).astype(complex)


def build_bose_hubbard(spec: ModelSpec, basis: FockBasis) -> np.ndarray:
    """Open-chain drift Hamiltonian -J sum_i (b_i^dag b_{i+1} + h.c.) + U/2 sum_i n_i(n_i - 1)."""
    _check_basis(spec, basis)
    H = spec.U * onsite_interaction(basis)
    for i in range(spec.L - 1):
        H -= spec.J * hopping(basis, i, i + 1)
    return H


def _check_bond(spec: ModelSpec) -> None:
    if not 1 <= spec.l_A <= spec.L - 1:
        raise ValueError("the control acts on the A|B bond, which needs L >= 2 and 1 <= l_A < L")


def build_control(spec: ModelSpec, basis: FockBasis, gamma: float) -> np.ndarray:
    """Boundary-bond switch +gamma*J*(b_lA^dag b_lA+1 + h.c.); gamma = 1 cancels the drift bond."""
    _check_basis(spec, basis)
    _check_bond(spec)
    return gamma * spec.J * hopping(basis, spec.l_A - 1, spec.l_A)


def build_number_ops(basis: FockBasis, split: BipartiteSplit) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal n_A and n_B on the full basis."""
    if split.dim != basis.dim or split.L != basis.L:
        raise ValueError("split does not belong to this basis")
    return np.diag(split.n_A.astype(complex)), np.diag(split.n_B.astype(complex))


def _site_op(L: int, ops: dict[int, np.ndarray]) -> np.ndarray:
    eye = np.eye(2, dtype=complex)
    return reduce(np.kron, [ops.get(i, eye) for i in range(L)])


def _check_ising(spec: ModelSpec, max_sites: int) -> None:
    if spec.kind != "ising":
        raise ValueError(f"expected an ising spec, got {spec.kind}")
    if spec.L > max_sites:
        raise ValueError(f"refusing to build a dense {2 ** spec.L}-dimensional operator (L > {max_sites})")


def build_ising(spec: ModelSpec, max_sites: int = ISING_MAX_SITES) -> np.ndarray:
    """Open-chain -J sum_i sx_i sx_{i+1} - sum_i sz_i on 2**L states; site 1 is the leftmost factor."""
    _check_ising(spec, max_sites)
    L = spec.L
    H = np.zeros((2**L, 2**L), dtype=complex)
    for i in range(L - 1):
        H -= spec.J * _site_op(L, {i: PAULI_X, i + 1: PAULI_X})
    for i in range(L):
        H -= _site_op(L, {i: PAULI_Z})
    return H


def build_ising_control(spec: ModelSpec, gamma: float, max_sites: int = ISING_MAX_SITES) -> np.ndarray:
    _check_ising(spec, max_sites)
    _check_bond(spec)
    return gamma * spec.J * _site_op(spec.L, {spec.l_A - 1: PAULI_X, spec.l_A: PAULI_X})


def commutator(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return X @ Y - Y @ X
