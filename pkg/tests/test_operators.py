from functools import reduce

import numpy as np
import pytest

from qdistill.fock import enumerate_basis, split
from qdistill.operators import (PAULI_X, PAULI_Z, ModelSpec, build_bose_hubbard, build_control,
                                build_ising, build_ising_control, build_number_ops, check_hermitian,
                                commutator, hopping, onsite_interaction)
from qdistill.oracle import second_quantized_hamiltonian, second_quantized_matrix_check


def bh(L, N, l_A=1, **kw):
    spec = ModelSpec("bose_hubbard", L, l_A, N=N, **kw)
    return spec, enumerate_basis(L, N)


def test_single_site_is_pure_interaction():
    spec, basis = bh(1, 2, l_A=0)
    assert np.allclose(build_bose_hubbard(spec, basis), [[1.0]])


def test_two_sites_one_particle_is_hopping():
    spec, basis = bh(2, 1)
    assert np.allclose(build_bose_hubbard(spec, basis), [[0, -1], [-1, 0]])


def test_two_sites_two_particles():
    spec, basis = bh(2, 2)
    s = np.sqrt(2)
    expected = np.array([[1, -s, 0], [-s, 0, -s], [0, -s, 1]])
    assert np.allclose(build_bose_hubbard(spec, basis), expected)


@pytest.mark.parametrize("L,N", [(3, 2), (4, 2), (3, 3), (4, 3)])
def test_matches_kronecker_construction(L, N):
    spec, basis = bh(L, N, J=0.7, U=1.3)
    assert second_quantized_matrix_check(spec, basis)
    H = second_quantized_hamiltonian(spec, basis)
    assert np.allclose(np.linalg.eigvalsh(H), np.linalg.eigvalsh(build_bose_hubbard(spec, basis)))


@pytest.mark.parametrize("L,N,l_A", [(4, 2, 1), (5, 2, 2), (4, 4, 3)])
def test_hermitian_and_number_conserving(L, N, l_A):
    spec, basis = bh(L, N, l_A)
    H0 = build_bose_hubbard(spec, basis)
    Hc = build_control(spec, basis, 0.4)
    check_hermitian(H0)
    check_hermitian(Hc)
    nA, nB = build_number_ops(basis, split(basis, l_A))
    assert np.allclose(nA + nB, N * np.eye(basis.dim))
    # the drift moves particles across the cut; full gamma switches that bond off
    assert not np.allclose(commutator(H0, nB), 0)
    H1 = H0 + build_control(spec, basis, 1.0)
    assert np.allclose(commutator(H1, nB), 0, atol=1e-12)


def test_control_cancels_only_boundary_bond():
    spec, basis = bh(4, 2, l_A=2)
    H1 = build_bose_hubbard(spec, basis) + build_control(spec, basis, 1.0)
    expected = spec.U * onsite_interaction(basis) - spec.J * (hopping(basis, 0, 1) + hopping(basis, 2, 3))
    assert np.allclose(H1, expected)
    assert np.allclose(H1[np.ix_([basis.index((1, 1, 0, 0))], [basis.index((1, 0, 1, 0))])], 0)


def test_control_needs_a_bond():
    spec, basis = bh(1, 2, l_A=0)
    with pytest.raises(ValueError):
        build_control(spec, basis, 1.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        ModelSpec("heisenberg", 4, 1)
    with pytest.raises(ValueError):
        ModelSpec("bose_hubbard", 4, 4, N=2)
    with pytest.raises(ValueError):
        ModelSpec("bose_hubbard", 4, 1, J=float("nan"), N=2)
    with pytest.raises(ValueError):
        build_bose_hubbard(ModelSpec("bose_hubbard", 4, 1, N=3), enumerate_basis(4, 2))


def test_check_hermitian_rejects():
    with pytest.raises(ValueError):
        check_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        check_hermitian(np.zeros((2, 3)))


def kron_all(ops):
    return reduce(np.kron, ops)


def test_ising_two_qubits_explicit():
    I = np.eye(2)
    H = build_ising(ModelSpec("ising", 2, 1, J=0.5))
    expected = -0.5 * np.kron(PAULI_X, PAULI_X) - np.kron(PAULI_Z, I) - np.kron(I, PAULI_Z)
    assert np.allclose(H, expected)


def test_ising_site_one_is_most_significant():
    H = build_ising(ModelSpec("ising", 3, 1, J=0.0))
    # |000> has energy -3, |100> (index 4) flips only the first qubit
    assert np.isclose(H[0, 0].real, -3)
    assert np.isclose(H[4, 4].real, -1)


def test_ising_control_cancels_cut_bond():
    spec = ModelSpec("ising", 4, 2)
    H1 = build_ising(spec) + build_ising_control(spec, 1.0)
    I = np.eye(2)
    xx_cut = kron_all([I, PAULI_X, PAULI_X, I])
    assert np.allclose(H1, build_ising(spec) + xx_cut)
    HA = -kron_all([PAULI_X, PAULI_X, I, I]) - kron_all([PAULI_Z, I, I, I]) - kron_all([I, PAULI_Z, I, I])
    HB = H1 - HA
    # with the cut bond removed the two halves evolve independently
    assert np.allclose(commutator(HA, HB), 0)


def test_ising_size_refusal():
    with pytest.raises(ValueError, match="refusing"):
        build_ising(ModelSpec("ising", 13, 1))
    with pytest.raises(ValueError):
        build_ising(ModelSpec("bose_hubbard", 3, 1, N=1))
