"""spin-core: 상태공간, 연산자, probe, Bloch 벡터"""

import numpy as np
import pytest
from scipy.linalg import eigvalsh

from src.common.errors import CapacityError, ConsistencyError, DomainError, UnsupportedBasisError
from src.spin.hilbert import HilbertSpace, StateVector
from src.spin.operators import (
    HermitianOperator,
    central_op,
    collective_op,
    dicke_matrix,
    expectation,
    ring_casimir,
    ring_op,
    single_site_op,
)
from src.spin.states import (
    BlochVector,
    ProbeKind,
    dicke_rotation,
    probe_state,
    reduce_to_central_bloch,
    x_polarized_dicke,
)


def test_dimensions_and_caps():
    assert HilbertSpace.full_product(3).dim == 16
    assert HilbertSpace.collective(5).dim == 12
    assert HilbertSpace.full_product(10).is_sparse
    assert not HilbertSpace.full_product(9).is_sparse
    with pytest.raises(CapacityError):
        HilbertSpace.full_product(19)
    with pytest.raises(CapacityError):
        HilbertSpace.collective(513)
    with pytest.raises(DomainError):
        HilbertSpace.collective(0)


def test_state_vector_requires_unit_norm():
    space = HilbertSpace.full_product(1)
    with pytest.raises(DomainError):
        StateVector(space, [1.0, 1.0, 0.0, 0.0])
    with pytest.raises(DomainError):
        StateVector(space, [1.0, 0.0])
    psi = StateVector.normalized(space, [1.0, 1.0, 0.0, 0.0])
    assert psi.norm() == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 0.0


def test_basis_order_central_spin_is_most_significant():
    space = HilbertSpace.full_product(2)
    diag = single_site_op(space, 0, "z").dense().diagonal().real
    np.testing.assert_allclose(diag, [0.5] * 4 + [-0.5] * 4)
    # 링 마지막 사이트는 최하위 비트
    diag_last = single_site_op(space, 2, "z").dense().diagonal().real
    np.testing.assert_allclose(diag_last, [0.5, -0.5] * 4)


@pytest.mark.parametrize("axis", ["x", "y", "z"])
def test_single_site_eigenvalues_are_half(axis):
    space = HilbertSpace.full_product(2)
    w = eigvalsh(single_site_op(space, 1, axis).dense())
    np.testing.assert_allclose(np.unique(np.round(w, 12)), [-0.5, 0.5])


def test_single_site_op_rejects_collective_space():
    with pytest.raises(UnsupportedBasisError):
        single_site_op(HilbertSpace.collective(3), 1, "x")


def test_casimir_in_dicke_sector():
    n = 4
    space = HilbertSpace.collective(n)
    I = n / 2
    np.testing.assert_allclose(ring_casimir(space).dense(), I * (I + 1) * np.eye(space.dim), atol=1e-12)


@pytest.mark.parametrize("space", [HilbertSpace.collective(5), HilbertSpace.full_product(3)])
def test_angular_momentum_algebra(space):
    ix, iy, iz = (ring_op(space, a) for a in "xyz")
    np.testing.assert_allclose(ix.commutator(iy).dense(), 1j * iz.dense(), atol=1e-12)
    plus = ring_op(space, "+")
    assert not plus.hermitian
    np.testing.assert_allclose(plus.dense(), ix.dense() + 1j * iy.dense(), atol=1e-12)


def test_hermitian_check_rejects_non_hermitian_matrix():
    space = HilbertSpace.full_product(1)
    m = np.zeros((4, 4), dtype=complex)
    m[0, 1] = 1.0
    with pytest.raises(ConsistencyError):
        HermitianOperator(space, m)


def test_expectation_rejects_ladder_and_space_mismatch():
    space = HilbertSpace.collective(3)
    psi = probe_state(space, ProbeKind.RING_Z_STRETCHED)
    with pytest.raises(DomainError):
        expectation(ring_op(space, "+"), psi)
    with pytest.raises(DomainError):
        expectation(ring_op(HilbertSpace.collective(4), "z"), psi)


@pytest.mark.parametrize("space", [HilbertSpace.full_product(3), HilbertSpace.collective(3)])
def test_probe_states(space):
    px = probe_state(space, ProbeKind.RING_X_POLARIZED)
    pz = probe_state(space, ProbeKind.RING_Z_STRETCHED)
    assert expectation(central_op(space, "x"), px) == pytest.approx(0.5, abs=1e-12)
    assert expectation(ring_op(space, "x"), px) == pytest.approx(1.5, abs=1e-12)
    assert expectation(ring_op(space, "z"), px) == pytest.approx(0.0, abs=1e-12)
    assert expectation(ring_op(space, "z"), pz) == pytest.approx(1.5, abs=1e-12)
    assert expectation(collective_op(space, "x", "central"), pz) == pytest.approx(0.5, abs=1e-12)


def test_custom_probe_is_normalized():
    space = HilbertSpace.collective(2)
    psi = probe_state(space, ProbeKind.CUSTOM, amplitudes=[1, 0, 0, 0, 0, 1j])
    assert psi.norm() == pytest.approx(1.0)
    with pytest.raises(DomainError):
        probe_state(space, ProbeKind.CUSTOM)


def test_x_polarized_dicke_is_normalized():
    amps = x_polarized_dicke(40)
    assert np.linalg.norm(amps) == pytest.approx(1.0, abs=1e-12)


def test_dicke_rotation_is_unitary_and_maps_z_to_x():
    n = 6
    rot = dicke_rotation(n, np.pi / 2, 0.0)
    np.testing.assert_allclose(rot @ rot.conj().T, np.eye(n + 1), atol=1e-12)
    np.testing.assert_allclose(rot[:, 0], x_polarized_dicke(n), atol=1e-12)


def test_central_bloch_vector_of_product_probe():
    psi = probe_state(HilbertSpace.full_product(4), ProbeKind.RING_X_POLARIZED)
    v = reduce_to_central_bloch(psi)
    np.testing.assert_allclose(v.as_array(), [1.0, 0.0, 0.0], atol=1e-12)


def test_central_bloch_vector_of_entangled_state_is_mixed():
    space = HilbertSpace.full_product(1)
    bell = StateVector.normalized(space, [1.0, 0.0, 0.0, 1.0])
    assert reduce_to_central_bloch(bell).length() == pytest.approx(0.0, abs=1e-12)


def test_bloch_vector_rejects_length_above_one():
    with pytest.raises(DomainError):
        BlochVector(1.0, 1e-3, 0.0)
    BlochVector(1.0 + 1e-11, 0.0, 0.0)


@pytest.mark.parametrize("site", [0, 2])
def test_single_site_commutator(site):
    space = HilbertSpace.full_product(3)
    sx, sy, sz = (single_site_op(space, site, a) for a in "xyz")
    np.testing.assert_allclose(sx.commutator(sy).dense(), 1j * sz.dense(), atol=1e-14)


@pytest.mark.parametrize("axis", ["x", "y", "z", "+", "-"])
def test_dicke_matrix_is_site_sum_on_symmetric_states(axis):
    n = 3
    space = HilbertSpace.full_product(n)
    ring = ring_op(space, axis).dense()
    if axis in "xyz":
        summed = sum(single_site_op(space, i, axis).dense() for i in range(1, n + 1))
        np.testing.assert_allclose(ring, summed, atol=1e-14)
    # 중심 ↑ 블록의 대칭 Dicke 상태: 링 비트 중 1(↓)의 개수 = I - M_z
    basis = np.zeros((space.dim, n + 1), dtype=complex)
    for idx in range(2 ** n):
        basis[idx, bin(idx).count("1")] = 1.0
    basis /= np.linalg.norm(basis, axis=0)
    projected = basis.conj().T @ ring @ basis
    np.testing.assert_allclose(projected, dicke_matrix(n, axis).toarray(), atol=1e-12)
