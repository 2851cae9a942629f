import math

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.stats import unitary_group

from qdistill.fock import enumerate_basis, split
from qdistill.operators import ModelSpec, build_bose_hubbard, build_ising
from qdistill.oracle import random_density_matrix
from qdistill.quantum import (QubitSplit, base_label, entropy_from_probabilities, evolve, expected_nA,
                              expected_nB, imperfect_timekeeping_evolve, log_base, mutual_information,
                              partial_trace, propagator, purity, thermal_state, timekeeping_weights,
                              validate_density_matrix, von_neumann_entropy)


def test_log_base_labels():
    assert log_base("nat") == math.e
    assert log_base("2") == 2.0
    assert log_base(10) == 10.0
    assert base_label("bits") == "2"
    assert base_label("natural") == "nat"
    for bad in ("dec", 1, -2):
        with pytest.raises(ValueError):
            log_base(bad)


def test_entropy_reference_values():
    assert entropy_from_probabilities([0.5, 0.5], "2") == pytest.approx(1.0)
    assert entropy_from_probabilities([1.0, 0.0]) == 0.0
    assert entropy_from_probabilities(np.full(4, 0.25)) == pytest.approx(math.log(4))
    # tiny negatives from eigensolver noise are ignored rather than producing nan
    assert entropy_from_probabilities([1.0, -1e-15]) == 0.0
    assert von_neumann_entropy(np.eye(8) / 8, "2") == pytest.approx(3.0)


def test_entropy_unitary_invariance(rng):
    rho = random_density_matrix(6, rng)
    s = von_neumann_entropy(rho)
    for _ in range(100):
        U = unitary_group.rvs(6, random_state=rng)
        assert abs(von_neumann_entropy(U @ rho @ U.conj().T) - s) <= 1e-9


def test_purity_bounds(rng):
    rho = random_density_matrix(5, rng)
    assert 1 / 5 - 1e-12 <= purity(rho) <= 1.0
    assert purity(np.eye(5) / 5) == pytest.approx(0.2)


def test_thermal_state_limits():
    H = build_bose_hubbard(ModelSpec("bose_hubbard", 4, 1, N=2), enumerate_basis(4, 2))
    assert np.allclose(thermal_state(H, 0.0), np.eye(10) / 10)
    cold = thermal_state(H, 200.0)
    w, v = np.linalg.eigh(H)
    assert np.isclose(np.vdot(v[:, 0], cold @ v[:, 0]).real, 1.0, atol=1e-8)
    validate_density_matrix(thermal_state(H, 1000.0))
    with pytest.raises(ValueError):
        thermal_state(H, -1.0)


def test_thermal_energy_decreases_with_beta():
    H = build_ising(ModelSpec("ising", 4, 1))
    energies = [np.trace(thermal_state(H, b) @ H).real for b in np.linspace(0, 5, 21)]
    assert np.all(np.diff(energies) < 0)


def test_propagator_against_expm(rng):
    H = build_bose_hubbard(ModelSpec("bose_hubbard", 4, 2, N=3), enumerate_basis(4, 3))
    U = propagator(H, 0.37)
    assert np.allclose(U, expm(-1j * 0.37 * H), atol=1e-12)
    assert np.allclose(U @ U.conj().T, np.eye(len(U)), atol=1e-12)
    with pytest.raises(ValueError):
        evolve(np.eye(3) / 3, U)


def test_qubit_partial_trace_of_product():
    rng = np.random.default_rng(3)
    a = random_density_matrix(2, rng)
    b = random_density_matrix(4, rng)
    sp = QubitSplit(3, 1)
    assert np.allclose(partial_trace(np.kron(a, b), sp, "B"), b)
    assert np.allclose(partial_trace(np.kron(a, b), sp, "A"), a)
    assert mutual_information(np.kron(a, b), sp) == pytest.approx(0.0, abs=1e-12)


def reduced_B_by_sum(rho, sp):
    """rho_B[b, b'] = sum_a rho[(a,b), (a,b')] by explicit loops over basis pairs."""
    out = np.zeros((sp.dim_B, sp.dim_B), dtype=complex)
    for i in range(sp.dim):
        for j in range(sp.dim):
            if sp.a_label[i] == sp.a_label[j]:
                out[sp.b_label[i], sp.b_label[j]] += rho[i, j]
    return out


@pytest.mark.parametrize("L,N,l_A", [(4, 2, 1), (5, 2, 2), (4, 3, 3)])
def test_fock_partial_trace_matches_explicit_sum(L, N, l_A, rng):
    sp = split(enumerate_basis(L, N), l_A)
    rho = random_density_matrix(sp.dim, rng)
    rho_B = partial_trace(rho, sp, "B")
    assert np.allclose(rho_B, reduced_B_by_sum(rho, sp))
    assert np.trace(rho_B).real == pytest.approx(1.0)
    # particle number fixes the block structure of the marginal
    nb = sp.number_B_diagonal()
    assert np.allclose(rho_B[nb[:, None] != nb[None, :]], 0)
    assert expected_nB(rho, sp) == pytest.approx(expected_nB(rho_B, sp))
    assert expected_nA(rho, sp) + expected_nB(rho, sp) == pytest.approx(N)


def test_partial_trace_is_linear(rng):
    sp = split(enumerate_basis(4, 2), 1)
    r1, r2 = random_density_matrix(10, rng), random_density_matrix(10, rng)
    mix = 0.3 * r1 + 0.7 * r2
    for keep in "AB":
        assert np.allclose(partial_trace(mix, sp, keep),
                           0.3 * partial_trace(r1, sp, keep) + 0.7 * partial_trace(r2, sp, keep))
    with pytest.raises(ValueError):
        partial_trace(r1, sp, "C")
    with pytest.raises(TypeError):
        expected_nB(np.eye(4) / 4, QubitSplit(2, 1))


def test_validate_density_matrix():
    with pytest.raises(ValueError, match="trace"):
        validate_density_matrix(np.eye(2))
    with pytest.raises(ValueError, match="negative"):
        validate_density_matrix(np.diag([1.5, -0.5]))


def test_timekeeping_weights():
    ts, ws = timekeeping_weights(1.0, 0.1)
    assert len(ts) == 51 and ws.sum() == pytest.approx(1.0)
    assert ts[0] == pytest.approx(0.6) and ts[-1] == pytest.approx(1.4)
    assert np.allclose(ws, ws[::-1])
    with pytest.raises(ValueError):
        timekeeping_weights(1.0, 0.1, points=50)


def test_timekeeping_limits(rng):
    H = build_bose_hubbard(ModelSpec("bose_hubbard", 4, 1, N=2), enumerate_basis(4, 2))
    rho = random_density_matrix(10, rng)
    assert np.allclose(imperfect_timekeeping_evolve(rho, H, 0.3, 0.0), evolve(rho, propagator(H, 0.3)))
    th = thermal_state(H, 1.0)
    assert np.allclose(imperfect_timekeeping_evolve(th, H, 0.3, 0.2), th)


def test_timekeeping_matches_direct_quadrature(rng):
    H = build_ising(ModelSpec("ising", 3, 1))
    rho = random_density_matrix(8, rng)
    ts, ws = timekeeping_weights(0.5, 0.05)
    direct = sum(w * evolve(rho, expm(-1j * t * H)) for t, w in zip(ts, ws))
    mixed = imperfect_timekeeping_evolve(rho, H, 0.5, 0.05)
    assert np.allclose(mixed, direct, atol=1e-12)
    validate_density_matrix(mixed)


def test_timekeeping_never_lowers_entropy():
    H = build_bose_hubbard(ModelSpec("bose_hubbard", 4, 1, N=2), enumerate_basis(4, 2))
    rng = np.random.default_rng(5)
    for beta in (0.5, 1.0, 3.0):
        U = unitary_group.rvs(10, random_state=rng)
        rho = U @ thermal_state(H, beta) @ U.conj().T
        exact = von_neumann_entropy(evolve(rho, propagator(H, 0.4)))
        assert von_neumann_entropy(imperfect_timekeeping_evolve(rho, H, 0.4, 0.1)) >= exact - 1e-12
