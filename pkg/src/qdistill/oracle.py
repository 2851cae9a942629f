"""Brute-force verifiers that share no code path with the analytical bound.

None of these functions consult the sector plan or the sorted-fill rule: they
search over unitaries (or eigenvalue placements) and measure the B entropy
through an explicit partial trace or label bincount.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import combinations, permutations, product
from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

from .fock import BipartiteSplit, FockBasis
from .operators import ModelSpec, build_bose_hubbard
from .quantum import entropy_from_probabilities, log_base, partial_trace, von_neumann_entropy

MAX_ORACLE_DIM = 20


@dataclass
class OracleResult:
    best_entropy: float
    best_parameters: dict
    trials: int


def brute_force_states(L: int, N: int) -> list[tuple[int, ...]]:
    """Every occupation tuple with sum N, by filtering the full (N+1)^L grid."""
    return [s for s in product(range(N + 1), repeat=L) if sum(s) == N]


def second_quantized_hamiltonian(spec: ModelSpec, basis: FockBasis) -> np.ndarray:
    """Bose-Hubbard drift built from truncated ladder matrices by Kronecker products, projected on ``basis``."""
    L, N = spec.L, spec.N
    d = N + 1
    b = np.diag(np.sqrt(np.arange(1, d)), k=1)
    eye = np.eye(d)

    def on_site(op, i):
        return reduce(np.kron, [op if j == i else eye for j in range(L)])

    bs = [on_site(b, i) for i in range(L)]
    H = np.zeros((d**L, d**L))
    for i in range(L - 1):
        hop = bs[i].T @ bs[i + 1]
        H -= spec.J * (hop + hop.T)
    for i in range(L):
        n = bs[i].T @ bs[i]
        H += spec.U / 2 * n @ (n - np.eye(d**L))
    weights = d ** np.arange(L - 1, -1, -1)
    rows = basis.states @ weights
    return H[np.ix_(rows, rows)]


def second_quantized_matrix_check(spec: ModelSpec, basis: FockBasis, atol: float = 1e-12) -> bool:
    return bool(np.allclose(second_quantized_hamiltonian(spec, basis), build_bose_hubbard(spec, basis),
                            rtol=0.0, atol=atol))


def _sector_unitary(split: BipartiteSplit, rng, scale: float | None = None) -> np.ndarray:
    """Block-diagonal unitary acting inside each (n_A, n_B) cell.

    ``scale=None`` draws Haar blocks; otherwise each block is exp(i*scale*G) with G a random Hermitian.
    """
    W = np.zeros((split.dim, split.dim), dtype=complex)
    for n_A, n_B in split.sectors():
        idx = np.flatnonzero((split.n_A == n_A) & (split.n_B == n_B))
        k = len(idx)
        if scale is None:
            blk = unitary_group.rvs(k, random_state=rng) if k > 1 else np.exp(2j * np.pi * rng.random()) * np.eye(1)
        else:
            G = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
            G = (G + G.conj().T) / 2
            w, v = np.linalg.eigh(G)
            blk = (v * np.exp(1j * scale * w)) @ v.conj().T
        W[np.ix_(idx, idx)] = blk
    return W


def _grouped_entropies(perms: np.ndarray, p: np.ndarray, membership: np.ndarray) -> np.ndarray:
    """B entropies (nat) of diagonal states diag(p[perm]) for a batch of placements."""
    q = p[perms] @ membership
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(q > 1e-12, -q * np.log(np.where(q > 0, q, 1.0)), 0.0)
    return terms.sum(axis=1)


def _hill_climb(perm: np.ndarray, p: np.ndarray, membership: np.ndarray, pairs: np.ndarray):
    current = _grouped_entropies(perm[None, :], p, membership)[0]
    while len(pairs):
        cand = np.repeat(perm[None, :], len(pairs), axis=0)
        r = np.arange(len(pairs))
        cand[r, pairs[:, 0]], cand[r, pairs[:, 1]] = perm[pairs[:, 1]], perm[pairs[:, 0]]
        vals = _grouped_entropies(cand, p, membership)
        k = int(np.argmin(vals))
        if vals[k] >= current - 1e-15:
            break
        perm, current = cand[k], vals[k]
    return perm, current


def brute_force_min_entropy(rho: np.ndarray, split: BipartiteSplit, trials: int = 2000, seed: int = 0,
                            base="nat", rotation_trials: int | None = None) -> OracleResult:
    """Random search for min S(rho_B) over unitaries on the fixed-N space.

    Candidates map the eigenvectors of ``rho`` onto basis states through a
    random placement, improved by pairwise swaps; the best placement is then
    perturbed by small in-sector rotations, accepted only on improvement.
    """
    dim = rho.shape[0]
    if dim > MAX_ORACLE_DIM:
        raise ValueError(f"oracle refuses dimension {dim} > {MAX_ORACLE_DIM}")
    if dim != split.dim:
        raise ValueError("state does not live on this split")
    rng = np.random.default_rng(seed)
    p, vecs = np.linalg.eigh(rho)
    p = np.clip(p, 0.0, None)
    membership = np.zeros((dim, split.dim_B))
    membership[np.arange(dim), split.b_label] = 1.0
    pairs = np.array(list(combinations(range(dim), 2)), dtype=np.int64).reshape(-1, 2)

    best_perm, best = np.arange(dim), np.inf
    for _ in range(trials):
        perm, val = _hill_climb(rng.permutation(dim), p, membership, pairs)
        if val < best:
            best_perm, best = perm, val

    # basis state j receives eigenvector best_perm[j]
    U = np.zeros((dim, dim), dtype=complex)
    U[np.arange(dim), :] = vecs[:, best_perm].conj().T
    state = U @ rho @ U.conj().T
    best = von_neumann_entropy(partial_trace(state, split, "B"))
    n_rot = trials // 10 if rotation_trials is None else rotation_trials
    for _ in range(n_rot):
        W = _sector_unitary(split, rng, scale=0.05)
        cand = W @ state @ W.conj().T
        val = von_neumann_entropy(partial_trace(cand, split, "B"))
        if val < best:
            state, best = cand, val
    return OracleResult(max(best, 0.0) / np.log(log_base(base)), {"placement": best_perm, "state": state}, trials)


def random_conserving_unitary(split: BipartiteSplit, rng, haar_full: bool = True) -> np.ndarray:
    """Haar unitary on the whole fixed-N space, or a block-diagonal one per (n_A, n_B) cell."""
    if haar_full:
        return unitary_group.rvs(split.dim, random_state=rng) if split.dim > 1 else np.eye(1, dtype=complex)
    return _sector_unitary(split, rng)


def random_density_matrix(dim: int, rng, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    G = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def _partitions(items: tuple[int, ...], sizes: tuple[int, ...], prev_min: dict):
    """Unordered partitions of ``items`` into groups of the given sizes (equal sizes interchangeable)."""
    if not sizes:
        yield ()
        return
    size, rest = sizes[0], sizes[1:]
    lower = prev_min.get(size, -1)
    for group in combinations(items, size):
        if group[0] <= lower:
            continue
        remaining = tuple(i for i in items if i not in group)
        nxt = dict(prev_min)
        nxt[size] = group[0]
        for tail in _partitions(remaining, rest, nxt):
            yield (group,) + tail


def exhaustive_group_entropies(p: Sequence[float], group_sizes: Sequence[int], base="nat") -> np.ndarray:
    """Entropy of the group sums for every way of placing ``p`` into groups of the given sizes."""
    p = np.asarray(p, dtype=float)
    if sum(group_sizes) != len(p):
        raise ValueError("group sizes must add up to the number of eigenvalues")
    sizes = tuple(sorted(group_sizes, reverse=True))
    out = []
    for part in _partitions(tuple(range(len(p))), sizes, {}):
        out.append(entropy_from_probabilities(np.array([p[list(g)].sum() for g in part]), base))
    return np.array(out)


def brute_force_permutation_minimum(p: Sequence[float], b_labels: Sequence[int], base="nat") -> float:
    """Min over all placements of ``p`` on basis positions of the entropy of sums by B label."""
    p = np.asarray(p, dtype=float)
    labels = np.asarray(b_labels)
    best = np.inf
    for perm in permutations(range(len(p))):
        q = np.bincount(labels, weights=p[list(perm)])
        best = min(best, entropy_from_probabilities(q, base))
    return best
