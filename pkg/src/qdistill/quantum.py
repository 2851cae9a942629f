"""Density-matrix algebra: thermal states, unitary evolution, partial traces and scalar observables."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import BipartiteSplit
from .operators import check_hermitian

CLIP_FLOOR = 1e-12

TIMEKEEPING_POINTS = 51


def log_base(base) -> float:
    """Map a log-base label (``"nat"``, ``"natural"``, ``"e"``, ``"2"``, ``"two"``, or a number) to its value."""
    if isinstance(base, str):
        key = base.strip().lower()
        if key in ("nat", "natural", "e", "ln"):
            return math.e
        if key in ("2", "two", "bit", "bits"):
            return 2.0
        raise ValueError(f"unknown log base {base!r}")
    value = float(base)
    if value <= 0 or value == 1:
        raise ValueError(f"invalid log base {base!r}")
    return value


def base_label(base) -> str:
    return "2" if log_base(base) == 2.0 else "nat"


@dataclass(frozen=True)
class QubitSplit:
    """Register of L qubits cut after qubit ``l_A``; qubit 1 is the most significant."""

    L: int
    l_A: int

    def __post_init__(self):
        if not 1 <= self.l_A <= self.L - 1:
            raise ValueError(f"l_A must lie in 1..{self.L - 1}, got {self.l_A}")

    @property
    def l_B(self) -> int:
        return self.L - self.l_A

    @property
    def dim(self) -> int:
        return 2**self.L

    @property
    def dim_A(self) -> int:
        return 2**self.l_A

    @property
    def dim_B(self) -> int:
        return 2**self.l_B

    def as_product_tensor(self, rho: np.ndarray) -> np.ndarray:
        if rho.shape != (self.dim, self.dim):
            raise ValueError(f"state of shape {rho.shape} does not live on {self.L} qubits")
        return rho.reshape(self.dim_A, self.dim_B, self.dim_A, self.dim_B)


def validate_density_matrix(rho: np.ndarray, herm_atol: float = 1e-12, trace_atol: float = 1e-10,
                            eig_floor: float = -1e-10) -> None:
    check_hermitian(rho, herm_atol)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_atol:
        raise ValueError(f"trace is {tr!r}, expected 1")
    lo = np.linalg.eigvalsh(rho).min()
    if lo < eig_floor:
        raise ValueError(f"smallest eigenvalue {lo!r} is negative")


def thermal_state(H: np.ndarray, beta: float) -> np.ndarray:
    """exp(-beta H) / Z via eigendecomposition, with the spectrum shifted by its minimum."""
    if not (beta >= 0 and math.isfinite(beta)):
        raise ValueError(f"beta must be finite and non-negative, got {beta}")
    check_hermitian(H)
    w, v = np.linalg.eigh(H)
    p = np.exp(-beta * (w - w.min()))
    p /= p.sum()
    return (v * p) @ v.conj().T


def propagator_from_spectrum(w: np.ndarray, v: np.ndarray, dt: float) -> np.ndarray:
    return (v * np.exp(-1j * w * dt)) @ v.conj().T


def propagator(H: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i H dt) = V exp(-i Lambda dt) V^dag."""
    check_hermitian(H)
    w, v = np.linalg.eigh(H)
    return propagator_from_spectrum(w, v, dt)


def evolve(rho: np.ndarray, U: np.ndarray) -> np.ndarray:
    if rho.shape != U.shape:
        raise ValueError(f"state {rho.shape} and propagator {U.shape} differ in dimension")
    return U @ rho @ U.conj().T


def partial_trace(rho: np.ndarray, split: BipartiteSplit | QubitSplit, keep: str = "B") -> np.ndarray:
    """Reduced state on the kept side.

    For a Fock split the reduced space is the split's ``states_A`` /
    ``states_B`` ordering, so the result is block-diagonal in the kept particle
    number.
    """
    t = split.as_product_tensor(rho)
    if keep == "B":
        return np.einsum("abac->bc", t)
    if keep == "A":
        return np.einsum("abcb->ac", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def entropy_from_probabilities(p: np.ndarray, base="nat") -> float:
    """-sum p log p, with entries at or below the clip floor contributing nothing."""
    p = np.asarray(p, dtype=float)
    p = p[p > CLIP_FLOOR]
    return float(-(p * np.log(p)).sum() / math.log(log_base(base)))


def von_neumann_entropy(rho: np.ndarray, base="nat") -> float:
    return entropy_from_probabilities(np.linalg.eigvalsh(rho), base)


def purity(rho: np.ndarray) -> float:
    # Tr(rho^2) for Hermitian rho without forming the product
    return float(np.vdot(rho, rho).real)


def mutual_information(rho: np.ndarray, split, base="nat") -> float:
    s_a = von_neumann_entropy(partial_trace(rho, split, "A"), base)
    s_b = von_neumann_entropy(partial_trace(rho, split, "B"), base)
    return s_a + s_b - von_neumann_entropy(rho, base)


def expected_nB(rho: np.ndarray, split: BipartiteSplit) -> float:
    """<n_B> from either the full state or its B marginal."""
    if not isinstance(split, BipartiteSplit):
        raise TypeError("particle number is only defined on a Fock split")
    if rho.shape == (split.dim, split.dim):
        return float(np.real(np.diagonal(rho)) @ split.n_B)
    if rho.shape == (split.dim_B, split.dim_B):
        return float(np.real(np.diagonal(rho)) @ split.number_B_diagonal())
    raise ValueError(f"state of shape {rho.shape} matches neither the full nor the B space")


def expected_nA(rho: np.ndarray, split: BipartiteSplit) -> float:
    return float(np.real(np.diagonal(rho)) @ split.n_A)


def timekeeping_weights(tau: float, sigma: float, points: int = TIMEKEEPING_POINTS) -> tuple[np.ndarray, np.ndarray]:
    """Uniform grid on tau +- 4 sigma with normalised Gaussian weights."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if points < 3 or points % 2 == 0:
        raise ValueError("need an odd number of quadrature points >= 3")
    if sigma == 0:
        return np.array([tau]), np.array([1.0])
    ts = np.linspace(tau - 4 * sigma, tau + 4 * sigma, points)
    w = np.exp(-((ts - tau) ** 2) / (2 * sigma**2))
    return ts, w / w.sum()


def imperfect_timekeeping_evolve(rho: np.ndarray, H: np.ndarray, tau: float, sigma: float,
                                 points: int = TIMEKEEPING_POINTS, spectrum=None) -> np.ndarray:
    """Gaussian mixture over durations of exp(-iHt) rho exp(iHt).

    Computed in the eigenbasis of H, where the mixture only rescales the
    coherences rho_mn by sum_t w_t exp(-i(E_m - E_n)t).
    """
    ts, ws = timekeeping_weights(tau, sigma, points)
    if spectrum is None:
        check_hermitian(H)
        spectrum = np.linalg.eigh(H)
    w, v = spectrum
    r = v.conj().T @ rho @ v
    gaps = w[:, None] - w[None, :]
    factor = np.zeros_like(gaps, dtype=complex)
    for t, wt in zip(ts, ws):
        factor += wt * np.exp(-1j * gaps * t)
    return v @ (r * factor) @ v.conj().T
