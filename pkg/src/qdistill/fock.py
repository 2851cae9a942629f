"""Occupation-number bases for bosonic lattices and their bipartite sector maps."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np


def _compositions(L: int, N: int) -> list[tuple[int, ...]]:
    """All length-L tuples of non-negative ints summing to N, lexicographically descending."""
    if L == 1:
        return [(N,)]
    out = []
    for first in range(N, -1, -1):
        for rest in _compositions(L - 1, N - first):
            out.append((first,) + rest)
    return out


def basis_dimension(L: int, N: int) -> int:
    """Number of ways to put N bosons on L sites."""
    if L < 1:
        raise ValueError("need at least one site")
    return comb(N + L - 1, N)


@dataclass(frozen=True)
class FockBasis:
    L: int
    n_particles: int
    states: np.ndarray = field(repr=False)
    index_of: dict = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def __len__(self) -> int:
        return len(self.states)

    def index(self, occupations: Sequence[int]) -> int:
        return self.index_of[tuple(int(n) for n in occupations)]


def enumerate_basis(L: int, N: int) -> FockBasis:
    """Fixed-N basis of L sites ordered lexicographically descending, e.g. |2,0>, |1,1>, |0,2>."""
    if L < 1:
        raise ValueError(f"site count must be >= 1, got {L}")
    if N < 0:
        raise ValueError(f"particle number must be >= 0, got {N}")
    comps = _compositions(L, N)
    states = np.array(comps, dtype=np.int64).reshape(len(comps), L)
    states.setflags(write=False)
    return FockBasis(L, N, states, {s: i for i, s in enumerate(comps)})


@dataclass(frozen=True)
class BipartiteSplit:
    """Sector structure of a basis cut after site ``l_A``.

    Every basis state |a>|b> is labelled by its A-side and B-side occupations.
    The reduced spaces are ordered as the direct sum over particle number
    n = 0, 1, ... of the fixed-n bases of each side, so ``a_label`` and
    ``b_label`` index rows of ``states_A`` / ``states_B``.
    """

    L: int
    l_A: int
    n_max: int
    d_A: list[int]
    d_B: list[int]
    states_A: np.ndarray = field(repr=False)
    states_B: np.ndarray = field(repr=False)
    n_A: np.ndarray = field(repr=False)
    n_B: np.ndarray = field(repr=False)
    a_index: np.ndarray = field(repr=False)
    b_index: np.ndarray = field(repr=False)
    a_label: np.ndarray = field(repr=False)
    b_label: np.ndarray = field(repr=False)
    n_particles: int | None = None

    @property
    def l_B(self) -> int:
        return self.L - self.l_A

    @property
    def dim(self) -> int:
        return len(self.a_label)

    @property
    def dim_A(self) -> int:
        return len(self.states_A)

    @property
    def dim_B(self) -> int:
        return len(self.states_B)

    def sector_grid(self, n_A: int, n_B: int | None = None) -> np.ndarray:
        """Basis indices of the (n_A, n_B) cell as a (d_A, d_B) array, A-major."""
        if n_B is None:
            if self.n_particles is None:
                raise ValueError("n_B required for a basis without fixed particle number")
            n_B = self.n_particles - n_A
        grid = np.full((self.d_A[n_A], self.d_B[n_B]), -1, dtype=np.int64)
        mask = (self.n_A == n_A) & (self.n_B == n_B)
        idx = np.flatnonzero(mask)
        grid[self.a_index[idx], self.b_index[idx]] = idx
        return grid

    def sectors(self) -> list[tuple[int, int]]:
        """Occupied (n_A, n_B) cells in ascending n_A order."""
        cells = sorted({(int(a), int(b)) for a, b in zip(self.n_A, self.n_B)})
        return cells

    def as_product_tensor(self, rho: np.ndarray) -> np.ndarray:
        """Embed ``rho`` isometrically into the A (x) B product space, shape (dA, dB, dA, dB)."""
        if rho.shape != (self.dim, self.dim):
            raise ValueError(f"state of shape {rho.shape} does not live on this split (dim {self.dim})")
        flat = self.a_label * self.dim_B + self.b_label
        n = self.dim_A * self.dim_B
        full = np.zeros((n, n), dtype=rho.dtype)
        full[np.ix_(flat, flat)] = rho
        return full.reshape(self.dim_A, self.dim_B, self.dim_A, self.dim_B)

    def number_B_diagonal(self) -> np.ndarray:
        """Particle count of each reduced-B basis state."""
        return self.states_B.sum(axis=1)


def _side_space(sites: int, n_max: int) -> tuple[np.ndarray, list[int], dict]:
    blocks, dims, lookup = [], [], {}
    offset = 0
    for n in range(n_max + 1):
        b = enumerate_basis(sites, n)
        blocks.append(b.states)
        dims.append(b.dim)
        for i, s in enumerate(b.states):
            lookup[tuple(int(x) for x in s)] = (offset + i, i)
        offset += b.dim
    return np.vstack(blocks), dims, lookup


def _bipartition(states: np.ndarray, L: int, l_A: int, n_max: int, n_particles: int | None) -> BipartiteSplit:
    if not 1 <= l_A <= L - 1:
        raise ValueError(f"l_A must lie in 1..{L - 1}, got {l_A}")
    states_A, d_A, look_A = _side_space(l_A, n_max)
    states_B, d_B, look_B = _side_space(L - l_A, n_max)
    a_lab, a_idx, b_lab, b_idx = [], [], [], []
    for s in states:
        la, ia = look_A[tuple(int(x) for x in s[:l_A])]
        lb, ib = look_B[tuple(int(x) for x in s[l_A:])]
        a_lab.append(la)
        a_idx.append(ia)
        b_lab.append(lb)
        b_idx.append(ib)
    n_A = states[:, :l_A].sum(axis=1)
    arrays = [np.asarray(x, dtype=np.int64) for x in (n_A, states[:, l_A:].sum(axis=1), a_idx, b_idx, a_lab, b_lab)]
    for a in arrays + [states_A, states_B]:
        a.setflags(write=False)
    return BipartiteSplit(L, l_A, n_max, d_A, d_B, states_A, states_B, *arrays, n_particles=n_particles)


def split(basis: FockBasis, l_A: int) -> BipartiteSplit:
    """Cut ``basis`` into A = sites 1..l_A and B = the rest."""
    return _bipartition(basis.states, basis.L, l_A, basis.n_particles, basis.n_particles)


@dataclass(frozen=True)
class NBBlock:
    """One n_B block of a truncated (non-conserving) Fock space."""

    n_B: int
    d_A: int
    d_B: int
    indices: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.d_A * self.d_B


@dataclass(frozen=True)
class TruncatedFockSpace:
    """Direct sum of fixed-n bases for n = 0..n_max on the same lattice."""

    L: int
    n_max: int
    bases: tuple[FockBasis, ...]
    states: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def offsets(self) -> list[int]:
        out, o = [], 0
        for b in self.bases:
            out.append(o)
            o += b.dim
        return out


def direct_sum(bases: Sequence[FockBasis]) -> TruncatedFockSpace:
    bases = tuple(sorted(bases, key=lambda b: b.n_particles))
    if not bases:
        raise ValueError("need at least one basis")
    L = bases[0].L
    if any(b.L != L for b in bases):
        raise ValueError("all bases must share the site count")
    if [b.n_particles for b in bases] != list(range(len(bases))):
        raise ValueError("bases must cover particle numbers 0..n_max exactly once")
    states = np.vstack([b.states for b in bases])
    return TruncatedFockSpace(L, len(bases) - 1, bases, states)


def split_truncated(space: TruncatedFockSpace, l_A: int) -> BipartiteSplit:
    return _bipartition(space.states, space.L, l_A, space.n_max, None)


def sector_blocks_for_nonconserving(bases: Sequence[FockBasis], l_A: int) -> list[NBBlock]:
    """Regroup a truncated space into n_B blocks, ordered by decreasing A-side dimension.

    Block n_B collects every state with that many particles in B, whatever the
    total; its A side is the direct sum of A spaces with n_A <= n_max - n_B.
    Ties in A-side dimension keep ascending n_B.
    """
    space = direct_sum(bases)
    sp = split_truncated(space, l_A)
    blocks = []
    for n_B in range(space.n_max + 1):
        d_A = sum(sp.d_A[: space.n_max - n_B + 1])
        d_B = sp.d_B[n_B]
        grid = np.full((d_A, d_B), -1, dtype=np.int64)
        idx = np.flatnonzero(sp.n_B == n_B)
        # A-side label within the block: offset of its n_A sub-block plus its index
        a_off = np.concatenate([[0], np.cumsum(sp.d_A)])[sp.n_A[idx]]
        grid[a_off + sp.a_index[idx], sp.b_index[idx]] = idx
        blocks.append(NBBlock(n_B, d_A, d_B, grid))
    blocks.sort(key=lambda b: (-b.d_A, b.n_B))
    return blocks


def truncated_dimension(L: int, n_max: int) -> int:
    return sum(basis_dimension(L, n) for n in range(n_max + 1))

