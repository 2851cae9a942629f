"""Minimum subsystem entropy reachable by particle-conserving unitaries.

The optimum sorts the eigenvalues of rho_AB in decreasing order, hands them
out to the (n_A, n_B) sectors in order of decreasing A-side dimension, and
inside each sector sums consecutive runs of d_A eigenvalues into one
eigenvalue of rho_B.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fock import BipartiteSplit, NBBlock
from .quantum import entropy_from_probabilities, validate_density_matrix


@dataclass(frozen=True)
class Sector:
    n_A: int
    n_B: int
    d_A: int
    d_B: int

    @property
    def dim(self) -> int:
        return self.d_A * self.d_B


@dataclass(frozen=True)
class SectorPlan:
    sectors: tuple[Sector, ...]

    @property
    def total_dim(self) -> int:
        return sum(s.dim for s in self.sectors)

    def __iter__(self):
        return iter(self.sectors)

    def __len__(self):
        return len(self.sectors)


@dataclass
class BoundReport:
    bound_entropy: float
    q_values: list[np.ndarray]
    optimal_nB: float
    eigenvalues_used: np.ndarray = field(repr=False)
    plan: SectorPlan | None = field(default=None, repr=False)
    base: str = "nat"

    @property
    def q_flat(self) -> np.ndarray:
        return np.concatenate(self.q_values) if self.q_values else np.zeros(0)


def plan_sectors(split: BipartiteSplit) -> SectorPlan:
    """Sectors of a fixed-N split sorted by decreasing d_A, ties by ascending n_B."""
    N = split.n_particles
    if N is None:
        raise ValueError("plan_sectors needs a fixed particle number; use sector_blocks_for_nonconserving")
    sectors = [Sector(n_A, N - n_A, split.d_A[n_A], split.d_B[N - n_A]) for n_A in range(N + 1)]
    sectors.sort(key=lambda s: (-s.d_A, s.n_B))
    return SectorPlan(tuple(sectors))


def sorted_eigenvalues(rho: np.ndarray) -> np.ndarray:
    p = np.linalg.eigvalsh(rho)[::-1]
    return np.clip(p, 0.0, None)


def fill_sectors(p: np.ndarray, shapes: Sequence[tuple[int, int]]) -> list[np.ndarray]:
    """Chunk descending ``p`` into consecutive sectors of d_A*d_B entries; sum runs of d_A in each."""
    if sum(a * b for a, b in shapes) != len(p):
        raise ValueError(f"sector dimensions sum to {sum(a * b for a, b in shapes)}, state has {len(p)}")
    q, pos = [], 0
    for d_A, d_B in shapes:
        chunk = p[pos:pos + d_A * d_B]
        pos += d_A * d_B
        q.append(chunk.reshape(d_B, d_A).sum(axis=1))
    return q


def lower_bound(rho: np.ndarray, split: BipartiteSplit, base="nat") -> BoundReport:
    validate_density_matrix(rho)
    plan = plan_sectors(split)
    if plan.total_dim != rho.shape[0]:
        raise ValueError("state dimension does not match the split")
    p = sorted_eigenvalues(rho)
    q = fill_sectors(p, [(s.d_A, s.d_B) for s in plan])
    nB = sum(s.n_B * float(qs.sum()) for s, qs in zip(plan, q))
    return BoundReport(entropy_from_probabilities(np.concatenate(q), base), q, nB, p, plan, str(base))


def lower_bound_qubits(rho: np.ndarray, d_A: int, base="nat") -> BoundReport:
    """Bound without sector structure: chunk the sorted spectrum into groups of d_A."""
    validate_density_matrix(rho)
    dim = rho.shape[0]
    if d_A < 1 or dim % d_A:
        raise ValueError(f"dimension {dim} is not divisible by d_A = {d_A}")
    p = sorted_eigenvalues(rho)
    q = fill_sectors(p, [(d_A, dim // d_A)])
    return BoundReport(entropy_from_probabilities(q[0], base), q, float("nan"), p, None, str(base))


def lower_bound_nonconserving(rho: np.ndarray, blocks: Sequence[NBBlock], base="nat") -> BoundReport:
    validate_density_matrix(rho)
    if sum(b.dim for b in blocks) != rho.shape[0]:
        raise ValueError("blocks do not cover the state's space")
    seen = np.sort(np.concatenate([b.indices.ravel() for b in blocks]))
    if not np.array_equal(seen, np.arange(rho.shape[0])):
        raise ValueError("blocks do not partition the basis")
    order = sorted(blocks, key=lambda b: (-b.d_A, b.n_B))
    p = sorted_eigenvalues(rho)
    q = fill_sectors(p, [(b.d_A, b.d_B) for b in order])
    nB = sum(b.n_B * float(qs.sum()) for b, qs in zip(order, q))
    return BoundReport(entropy_from_probabilities(np.concatenate(q), base), q, nB, p, None, str(base))


def majorizes(y, x, atol: float = 1e-10) -> bool:
    """True when x is majorized by y (x < y): sorted partial sums of y dominate those of x."""
    x = np.sort(np.asarray(x, dtype=float))[::-1]
    y = np.sort(np.asarray(y, dtype=float))[::-1]
    if x.shape != y.shape:
        raise ValueError("vectors must have equal length")
    if abs(x.sum() - y.sum()) > atol:
        return False
    return bool(np.all(np.cumsum(x) <= np.cumsum(y) + atol))


def is_doubly_stochastic(D: np.ndarray, atol: float = 1e-10) -> bool:
    D = np.asarray(D, dtype=float)
    return bool(
        D.ndim == 2 and D.shape[0] == D.shape[1]
        and np.all(D >= -atol)
        and np.allclose(D.sum(axis=0), 1.0, atol=atol)
        and np.allclose(D.sum(axis=1), 1.0, atol=atol)
    )
