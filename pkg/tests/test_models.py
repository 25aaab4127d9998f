"""models: ModelSpec 검증, 해밀토니안 조립, ∂H/∂h, 결합 프로파일"""

import numpy as np
import pytest
from scipy.linalg import eigvalsh

from src.common.errors import DomainError, UnsupportedBasisError
from src.dynamics.propagation import Method, Propagation, evolve
from src.models.hamiltonians import build_hamiltonian, default_space, field_derivative
from src.models.spec import CouplingProfile, ModelSpec, ProfileKind, Variant, sample_couplings
from src.spin.hilbert import HilbertSpace
from src.spin.operators import central_op, ring_casimir, ring_op, single_site_op
from src.spin.states import ProbeKind, probe_state, reduce_to_central_bloch


def test_no_zeeman_single_ring_spin_spectrum():
    spec = ModelSpec.no_zeeman(1)
    H = build_hamiltonian(spec, HilbertSpace.collective(1))
    w = eigvalsh(H.dense())
    np.testing.assert_allclose(w, [-0.5590170, -0.5590170, 0.5590170, 0.5590170], atol=1e-7)


def test_collective_spectrum_is_contained_in_full_product_spectrum():
    spec = ModelSpec.zzxx(3, h=0.7, A=1.3)
    w_full = eigvalsh(build_hamiltonian(spec, HilbertSpace.full_product(3)).dense())
    w_coll = eigvalsh(build_hamiltonian(spec, HilbertSpace.collective(3)).dense())
    for e in w_coll:
        assert np.min(np.abs(w_full - e)) < 1e-10


@pytest.mark.parametrize("spec", [
    ModelSpec.ising_ring(4, 0.2),
    ModelSpec.no_zeeman(4),
    ModelSpec.zzxx(4),
    ModelSpec.xxz(4, 0.3),
    ModelSpec.inhomogeneous([0.8, 1.1, 0.9, 1.2]),
])
def test_hamiltonian_is_linear_in_field(spec):
    space = HilbertSpace.full_product(4)
    H1 = field_derivative(spec, space)
    diff = build_hamiltonian(spec.with_h(1.3), space).dense() - build_hamiltonian(spec.with_h(1.0), space).dense()
    np.testing.assert_allclose(diff / 0.3, H1.dense(), atol=1e-12)
    assert H1.hermitian


def test_equal_couplings_reduce_to_no_zeeman():
    space = HilbertSpace.full_product(3)
    inhom = build_hamiltonian(ModelSpec.inhomogeneous([1.0, 1.0, 1.0], h=0.6), space)
    hom = build_hamiltonian(ModelSpec.no_zeeman(3, h=0.6), space)
    np.testing.assert_allclose(inhom.dense(), hom.dense(), atol=1e-14)


def test_ising_two_site_ring_counts_bond_twice():
    space = HilbertSpace.full_product(2)
    H = build_hamiltonian(ModelSpec.ising_ring(2, 0.5, h=0.0, A=0.0), space)
    expected = -(single_site_op(space, 1, "x") @ single_site_op(space, 2, "x"))
    np.testing.assert_allclose(H.dense(), expected.dense(), atol=1e-14)


def test_xxz_flip_term():
    space = HilbertSpace.collective(3)
    delta = 0.4
    diff = build_hamiltonian(ModelSpec.xxz(3, delta), space) - build_hamiltonian(ModelSpec.xxz(3, 0.0), space)
    flip = central_op(space, "x") @ ring_op(space, "x") + central_op(space, "y") @ ring_op(space, "y")
    np.testing.assert_allclose(diff.dense(), delta * flip.dense(), atol=1e-12)


def test_xxz_z_field_conserves_total_z():
    space = HilbertSpace.collective(3)
    H = build_hamiltonian(ModelSpec.xxz(3, 0.4, field_axis="z"), space)
    total_z = central_op(space, "z") + ring_op(space, "z")
    assert np.max(np.abs(H.commutator(total_z).dense())) < 1e-12


def test_spec_validation():
    with pytest.raises(DomainError):
        ModelSpec(Variant.ZZXX, 3, J=0.1)
    with pytest.raises(DomainError):
        ModelSpec.ising_ring(1, 0.1)
    with pytest.raises(DomainError):
        ModelSpec(Variant.INHOMOGENEOUS_ZZ, 3)
    with pytest.raises(DomainError):
        ModelSpec(Variant.INHOMOGENEOUS_ZZ, 3, couplings=(1.0, 1.0))
    with pytest.raises(DomainError):
        ModelSpec.no_zeeman(0)
    with pytest.raises(DomainError):
        ModelSpec(Variant.ZZXX, 3, field_axis="z")
    ModelSpec.ising_ring(1, 0.0)


def test_non_collective_variants_reject_collective_basis():
    ising = ModelSpec.ising_ring(3, 0.1)
    with pytest.raises(UnsupportedBasisError):
        default_space(ising, "collective")
    with pytest.raises(UnsupportedBasisError):
        build_hamiltonian(ising, HilbertSpace.collective(3))
    assert default_space(ising).is_full_product
    assert not default_space(ModelSpec.zzxx(3)).is_full_product


def test_space_size_mismatch():
    with pytest.raises(DomainError):
        build_hamiltonian(ModelSpec.no_zeeman(3), HilbertSpace.collective(4))


def test_sample_couplings_mean_and_seed():
    profile = CouplingProfile(ProfileKind.UNIFORM_WINDOW, spread=0.3, seed=11)
    a = sample_couplings(profile, 12, 1.0)
    b = sample_couplings(profile, 12, 1.0)
    c = sample_couplings(CouplingProfile(ProfileKind.UNIFORM_WINDOW, spread=0.3, seed=12), 12, 1.0)
    assert a == b
    assert a != c
    assert len(a) == 12
    assert np.mean(a) == pytest.approx(1.0, abs=1e-12)
    assert min(a) > 0


def test_gaussian_envelope_peaks_at_ring_center():
    a = np.array(sample_couplings(CouplingProfile(ProfileKind.GAUSSIAN_ENVELOPE, width=0.5), 12, 2.0))
    assert a.mean() == pytest.approx(2.0, abs=1e-12)
    np.testing.assert_allclose(a, a[::-1], atol=1e-12)
    assert a[5] == a.max()
    assert sample_couplings(CouplingProfile(ProfileKind.CONSTANT), 3, 0.7) == (0.7, 0.7, 0.7)


def test_sample_couplings_rejects_bad_input():
    with pytest.raises(DomainError):
        sample_couplings(CouplingProfile(), 4, 0.0)
    with pytest.raises(DomainError):
        CouplingProfile(width=0.0)


def test_bases_agree_on_central_spin_dynamics():
    spec = ModelSpec.zzxx(4)
    blochs = []
    for space in (HilbertSpace.full_product(4), HilbertSpace.collective(4)):
        psi = evolve(build_hamiltonian(spec, space), probe_state(space, ProbeKind.RING_X_POLARIZED),
                     Propagation(Method.EIGEN, 2.3))
        blochs.append(reduce_to_central_bloch(psi).as_array())
    np.testing.assert_allclose(blochs[0], blochs[1], atol=1e-10)
    assert np.linalg.norm(blochs[0]) > 0.1


def test_zzxx_conserves_ring_casimir():
    space = HilbertSpace.full_product(3)
    H = build_hamiltonian(ModelSpec.zzxx(3, h=0.8), space)
    assert H.commutator(ring_casimir(space)).norm() < 1e-12


def test_sample_couplings_rejects_non_positive_coupling():
    with pytest.raises(DomainError):
        sample_couplings(CouplingProfile(ProfileKind.UNIFORM_WINDOW, spread=3.0, seed=1), 50, 1.0)
