"""A controlled lattice model: drift, unit control term, bipartition and cached spectra."""

from __future__ import annotations

import numpy as np

from . import bound as _bound
from .fock import enumerate_basis, split as fock_split
from .operators import (ModelSpec, build_bose_hubbard, build_control, build_ising,
                        build_ising_control)
from .quantum import (QubitSplit, entropy_from_probabilities, expected_nA, expected_nB, partial_trace,
                      propagator_from_spectrum, thermal_state)

BLOCK_ATOL = 1e-12


def parity_blocks(L: int) -> list[np.ndarray]:
    """Indices of even and odd total-sigma_z-parity states of L qubits."""
    idx = np.arange(2**L)
    ones = np.array([bin(i).count("1") for i in idx])
    return [idx[ones % 2 == 0], idx[ones % 2 == 1]]


class ControlledSystem:
    """H(gamma) = H0 + gamma * Hc on a fixed basis, with eigendecompositions cached per gamma.

    For the Ising chain both terms conserve sigma_z parity; states that are
    block-diagonal in parity (thermal states and everything evolved from
    them) are propagated block by block.
    """

    def __init__(self, spec: ModelSpec):
        self.spec = spec
        if spec.kind == "bose_hubbard":
            self.basis = enumerate_basis(spec.L, spec.N)
            self.split = fock_split(self.basis, spec.l_A)
            self.H0 = build_bose_hubbard(spec, self.basis)
            self.Hc = build_control(spec, self.basis, 1.0)
        else:
            self.basis = None
            self.split = QubitSplit(spec.L, spec.l_A)
            self.H0 = build_ising(spec)
            self.Hc = build_ising_control(spec, 1.0)
        self.blocks = parity_blocks(spec.L) if spec.kind == "ising" else None
        self._spectra: dict[float, tuple[np.ndarray, np.ndarray]] = {}
        self._propagators: dict[tuple[float, float], np.ndarray] = {}
        self._block_spectra: dict[float, list] = {}
        self._block_propagators: dict[tuple[float, float], list] = {}
        if self.blocks is not None:
            label = np.empty(self.dim, dtype=np.int64)
            for k, b in enumerate(self.blocks):
                label[b] = k
            self._off_block = label[:, None] != label[None, :]

    @property
    def dim(self) -> int:
        return self.H0.shape[0]

    @property
    def conserves_particles(self) -> bool:
        return self.spec.kind == "bose_hubbard"

    def hamiltonian(self, gamma: float) -> np.ndarray:
        return self.H0 + gamma * self.Hc

    def spectrum(self, gamma: float) -> tuple[np.ndarray, np.ndarray]:
        key = float(gamma)
        if key not in self._spectra:
            self._spectra[key] = np.linalg.eigh(self.hamiltonian(key))
        return self._spectra[key]

    def propagator(self, gamma: float, dt: float, cache: bool = True) -> np.ndarray:
        key = (float(gamma), float(dt))
        U = self._propagators.get(key)
        if U is None:
            U = propagator_from_spectrum(*self.spectrum(gamma), dt)
            if cache:
                self._propagators[key] = U
        return U

    def block_spectrum(self, gamma: float) -> list:
        key = float(gamma)
        if key not in self._block_spectra:
            H = self.hamiltonian(key)
            self._block_spectra[key] = [np.linalg.eigh(H[np.ix_(b, b)]) for b in self.blocks]
        return self._block_spectra[key]

    def is_block_diagonal(self, rho: np.ndarray) -> bool:
        return self.blocks is not None and not np.any(np.abs(rho[self._off_block]) > BLOCK_ATOL)

    def evolve(self, rho: np.ndarray, gamma: float, dt: float, cache: bool = True) -> np.ndarray:
        """One step of exp(-i H(gamma) dt) conjugation."""
        if not self.is_block_diagonal(rho):
            U = self.propagator(gamma, dt, cache)
            return U @ rho @ U.conj().T
        key = (float(gamma), float(dt))
        Us = self._block_propagators.get(key)
        if Us is None:
            Us = [propagator_from_spectrum(w, v, dt) for w, v in self.block_spectrum(gamma)]
            if cache:
                self._block_propagators[key] = Us
        out = np.zeros_like(rho, dtype=complex)
        for b, U in zip(self.blocks, Us):
            ix = np.ix_(b, b)
            out[ix] = U @ rho[ix] @ U.conj().T
        return out

    def entropy(self, rho: np.ndarray, base="nat") -> float:
        """S(rho) of the full state, blockwise when possible."""
        if self.is_block_diagonal(rho):
            p = np.concatenate([np.linalg.eigvalsh(rho[np.ix_(b, b)]) for b in self.blocks])
        else:
            p = np.linalg.eigvalsh(rho)
        return entropy_from_probabilities(p, base)

    def thermal(self, beta: float) -> np.ndarray:
        return thermal_state(self.H0, beta)

    def reduce(self, rho: np.ndarray, keep: str = "B") -> np.ndarray:
        return partial_trace(rho, self.split, keep)

    def bound(self, rho: np.ndarray, base="nat") -> _bound.BoundReport:
        if self.conserves_particles:
            return _bound.lower_bound(rho, self.split, base)
        return _bound.lower_bound_qubits(rho, self.split.dim_A, base)

    def n_B(self, rho: np.ndarray) -> float:
        if not self.conserves_particles:
            return float("nan")
        return expected_nB(rho, self.split)

    def n_A(self, rho: np.ndarray) -> float:
        if not self.conserves_particles:
            return float("nan")
        return expected_nA(rho, self.split)
