from math import comb

import numpy as np
import pytest

from qdistill.fock import (basis_dimension, direct_sum, enumerate_basis, sector_blocks_for_nonconserving,
                           split, split_truncated, truncated_dimension)
from qdistill.oracle import brute_force_states


@pytest.mark.parametrize("L,N", [(1, 0), (1, 3), (3, 1), (3, 3), (4, 2), (5, 2), (6, 3)])
def test_dimension_matches_stars_and_bars(L, N):
    basis = enumerate_basis(L, N)
    assert basis.dim == comb(N + L - 1, N) == basis_dimension(L, N)


@pytest.mark.parametrize("L,N", [(2, 2), (3, 3), (4, 2), (4, 4)])
def test_basis_matches_filtered_grid(L, N):
    basis = enumerate_basis(L, N)
    assert {tuple(s) for s in basis.states} == set(brute_force_states(L, N))


def test_ordering_is_descending_lexicographic():
    basis = enumerate_basis(3, 2)
    assert [tuple(s) for s in basis.states] == [
        (2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]


def test_index_round_trip():
    basis = enumerate_basis(4, 3)
    for i, s in enumerate(basis.states):
        assert basis.index(s) == i
    with pytest.raises(KeyError):
        basis.index((1, 1, 1, 1))


def test_states_are_read_only():
    basis = enumerate_basis(3, 2)
    with pytest.raises(ValueError):
        basis.states[0, 0] = 5


def test_invalid_sizes():
    with pytest.raises(ValueError):
        enumerate_basis(0, 1)
    with pytest.raises(ValueError):
        enumerate_basis(3, -1)
    with pytest.raises(ValueError):
        split(enumerate_basis(3, 2), 3)
    with pytest.raises(ValueError):
        split(enumerate_basis(3, 2), 0)


@pytest.mark.parametrize("L,N,l_A", [(4, 2, 1), (5, 2, 2), (6, 3, 2), (4, 4, 3)])
def test_sector_dimensions(L, N, l_A):
    sp = split(enumerate_basis(L, N), l_A)
    for n in range(N + 1):
        assert sp.d_A[n] == comb(n + l_A - 1, n)
        assert sp.d_B[n] == comb(n + L - l_A - 1, n)
    assert sum(sp.d_A[a] * sp.d_B[N - a] for a in range(N + 1)) == sp.dim
    assert sp.sectors() == [(a, N - a) for a in range(N + 1)]


def test_sector_grid_covers_each_cell_once():
    sp = split(enumerate_basis(5, 3), 2)
    seen = np.concatenate([sp.sector_grid(a).ravel() for a in range(4)])
    assert np.array_equal(np.sort(seen), np.arange(sp.dim))


def test_single_site_A_is_one_dimensional_per_sector():
    sp = split(enumerate_basis(4, 2), 1)
    assert sp.d_A == [1, 1, 1]
    assert sp.dim_A == 3


def test_product_tensor_preserves_trace(rng):
    sp = split(enumerate_basis(4, 2), 1)
    rho = np.diag(rng.random(sp.dim))
    rho /= rho.trace()
    T = sp.as_product_tensor(rho)
    assert T.shape == (sp.dim_A, sp.dim_B, sp.dim_A, sp.dim_B)
    assert np.isclose(np.einsum("abab->", T), 1.0)


def test_truncated_space_and_blocks():
    bases = [enumerate_basis(3, n) for n in range(3)]
    space = direct_sum(bases)
    assert space.dim == truncated_dimension(3, 2) == 1 + 3 + 6
    assert space.offsets() == [0, 1, 4]
    sp = split_truncated(space, 1)
    assert sp.n_particles is None
    blocks = sector_blocks_for_nonconserving(bases, 1)
    assert [b.n_B for b in blocks] == [0, 1, 2]
    assert [b.d_A for b in blocks] == [3, 2, 1]
    cells = np.concatenate([b.indices.ravel() for b in blocks])
    assert np.array_equal(np.sort(cells), np.arange(space.dim))


def test_direct_sum_requires_every_particle_number():
    with pytest.raises(ValueError):
        direct_sum([enumerate_basis(3, 0), enumerate_basis(3, 2)])
    with pytest.raises(ValueError):
        direct_sum([enumerate_basis(3, 0), enumerate_basis(2, 1)])
