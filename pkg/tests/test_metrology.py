"""
metrology: 닫힌 형태, 정확한 생성자, 유한차분 파이프라인

기준값은 A=1, h=1 에서 손으로 계산한 값 (Ω = √1.25).
"""

import numpy as np
import pytest

from src.common.errors import CapacityError, ConsistencyError, DomainError, StepError, UnsupportedBasisError
from src.metrology.analytic import (
    GeneratorCoeffs,
    SensingKind,
    central_coherence_analytic,
    error_propagation,
    fmax_and_optimal_probe,
    generator_coeffs_analytic,
    local_qfi_analytic,
    local_qubit_qfi,
    precession_frequency,
    qfi_analytic,
    qfi_analytic_t0,
    qfi_inhomogeneous_analytic,
    sensing_time,
    sql_reference,
    sx_expectation_analytic,
)
from src.metrology.generator import decompose_generator, generator_exact, qfi_from_generator
from src.metrology.numeric import (
    FieldStencil,
    error_propagation_fd,
    local_qfi_fd_series,
    qfi_generator,
    qfi_pure_fd,
    qfi_pure_fd_series,
    stencil_metric,
)
from src.metrology.points import ErrorPropagationPoint, QfiMethod, QfiPoint
from src.models.hamiltonians import build_hamiltonian, field_derivative
from src.models.spec import ModelSpec
from src.dynamics.trajectory import trajectory
from src.spin.hilbert import HilbertSpace
from src.spin.operators import central_op, ring_op
from src.spin.states import ProbeKind, probe_state

T_LOCAL = np.pi / np.sqrt(1.25)
T_GLOBAL = 2 * np.pi / np.sqrt(1.25)
ALPHA0 = -2 * np.pi / 1.25 ** 1.5


# ──────────────────────────────────────────────────────────────────────────────
# 닫힌 형태
# ──────────────────────────────────────────────────────────────────────────────
def test_sensing_times():
    assert sensing_time(1.0, 1.0, SensingKind.LOCAL_EPF) == pytest.approx(2.80993, abs=1e-5)
    assert sensing_time(1.0, 1.0, "global_qfi") == pytest.approx(5.61985, abs=1e-5)
    assert sensing_time(2.0, 0.0, SensingKind.GLOBAL_QFI) == pytest.approx(2 * np.pi, rel=1e-12)
    with pytest.raises(DomainError):
        precession_frequency(0.0, 0.0)


def test_generator_coefficients_at_global_time():
    c = generator_coeffs_analytic(1.0, 1.0, T_GLOBAL)
    assert c.alpha == pytest.approx(-4.49588, abs=1e-5)
    assert c.beta == pytest.approx(4.49588, abs=1e-5)
    assert c.gamma == pytest.approx(0.0, abs=1e-12)
    assert c.alpha == pytest.approx(ALPHA0, rel=1e-12)
    assert c.beta == pytest.approx(-ALPHA0, rel=1e-12)


def test_generator_coefficients_edge_cases():
    assert generator_coeffs_analytic(1.0, 1.0, 0.0).as_array().tolist() == [0.0, 0.0, 0.0]
    c = generator_coeffs_analytic(1.0, 0.0, 4 * np.pi)   # Ω = 1/2, t₀ = 4π
    assert c.alpha == pytest.approx(0.0, abs=1e-12)
    assert c.beta == 0.0
    with pytest.raises(DomainError):
        generator_coeffs_analytic(0.0, 0.0, 1.0)


def test_global_qfi_closed_form():
    assert qfi_analytic_t0(1.0, 1.0, 10) == pytest.approx(707.45, rel=1e-4)
    assert qfi_analytic_t0(1.0, 1.0, 40) == pytest.approx(8893.7, rel=1e-4)
    assert qfi_analytic_t0(1.0, 0.0, 10) == pytest.approx(0.0, abs=1e-20)
    assert qfi_analytic(1.0, 1.0, 10, 0.0) == 0.0
    assert sql_reference(2.0, 3) == 16.0


def test_inhomogeneous_closed_form_reduces_to_homogeneous():
    for t in (0.7, 3.1, T_GLOBAL):
        assert qfi_inhomogeneous_analytic([1.0] * 6, 1.0, t) == pytest.approx(qfi_analytic(1.0, 1.0, 6, t), rel=1e-12)
    with pytest.raises(DomainError):
        qfi_inhomogeneous_analytic([], 1.0, 1.0)


def test_local_qfi_closed_form():
    assert local_qfi_analytic(1.0, 1.0, 10) == pytest.approx(64.0, rel=1e-12)
    assert local_qfi_analytic(1.0, 1.0, 8) == pytest.approx(40.96, rel=1e-12)


def test_local_qubit_qfi():
    assert local_qubit_qfi([1.0, 0.0, 0.0], [0.0, 0.0, 0.0]) == 0.0
    assert local_qubit_qfi([0.5, 0.0, 0.0], [0.1, 0.0, 0.0]) == pytest.approx(0.0133333, abs=1e-7)
    with pytest.raises(DomainError):
        local_qubit_qfi([1.0, 0.1, 0.0], [0.0, 0.0, 0.0])


def test_local_qubit_qfi_on_unit_circle():
    # V = (cos φ, sin φ, 0), φ = 2N·arctan(2h/A) → F = (dφ/dh)² = 16A²N²/(A²+4h²)²
    A, h, n = 1.0, 1.0, 10
    phi = 2 * n * np.arctan(2 * h / A)
    dphi = 4 * n * A / (A ** 2 + 4 * h ** 2)
    v = [np.cos(phi), np.sin(phi), 0.0]
    dv = [-dphi * np.sin(phi), dphi * np.cos(phi), 0.0]
    assert local_qubit_qfi(v, dv) == pytest.approx(local_qfi_analytic(A, h, n), rel=1e-10)


def test_sx_expectation_closed_form():
    assert sx_expectation_analytic(1.0, 0.0, 5)[0] == pytest.approx(0.5)
    assert sx_expectation_analytic(1.0, 1.0, 1)[0] == pytest.approx(-0.3, abs=1e-12)
    assert sx_expectation_analytic(1.0, 1.0, 2)[0] == pytest.approx(-0.14, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_coherence_at_local_time_carries_ring_parity(n):
    c = central_coherence_analytic([1.0] * n, 1.0, T_LOCAL, "x")
    sx, sy = sx_expectation_analytic(1.0, 1.0, n)
    sign = (-1) ** n
    assert 0.5 * c.real == pytest.approx(sign * sx, abs=1e-12)
    assert abs(c) == pytest.approx(1.0, abs=1e-12)


def test_error_propagation():
    assert error_propagation(0.0, 0.25, 2.0) == pytest.approx(0.25)
    assert error_propagation(0.1, 0.25, 0.0) == float("inf")
    assert error_propagation(0.5, 0.25 - 1e-14, 1.0) == 0.0
    with pytest.raises(DomainError):
        error_propagation(0.5, 0.1, 1.0)
    assert ErrorPropagationPoint(0.0, 1.0, 0.0, 0.25, 0.0, float("inf")).inverse_square == 0.0


def test_fmax_at_global_time():
    c = generator_coeffs_analytic(1.0, 1.0, T_GLOBAL)
    f_max, recipe = fmax_and_optimal_probe(c, 10)
    assert f_max == pytest.approx(2526.6, rel=1e-4)
    assert recipe.n_ring == 10


def test_fmax_angles():
    f_max, recipe = fmax_and_optimal_probe(GeneratorCoeffs(0.0, 2.0, 0.0, 1.0, 1.0), 4)
    assert f_max == pytest.approx(16.0)
    assert recipe.theta == pytest.approx(0.0)
    _, recipe = fmax_and_optimal_probe(GeneratorCoeffs(-1.0, 1.0, 0.0, 1.0, 1.0), 4)
    assert recipe.phi == pytest.approx(-np.pi / 2)
    with pytest.raises(DomainError):
        fmax_and_optimal_probe(GeneratorCoeffs(0.0, 0.0, 0.0, 1.0, 0.0), 4)
    with pytest.raises(UnsupportedBasisError):
        recipe.build(HilbertSpace.full_product(4))


def test_qfi_point_clipping():
    spec = ModelSpec.no_zeeman(2)
    assert QfiPoint(spec, 1.0, 1.0, -1e-12, QfiMethod.ANALYTIC, "ring_z_stretched").value == 0.0
    with pytest.raises(ConsistencyError):
        QfiPoint(spec, 1.0, 1.0, -1.0, QfiMethod.ANALYTIC, "ring_z_stretched")


# ──────────────────────────────────────────────────────────────────────────────
# 정확한 생성자
# ──────────────────────────────────────────────────────────────────────────────
def _no_zeeman_pair(n, h=1.0):
    space = HilbertSpace.collective(n)
    spec = ModelSpec.no_zeeman(n, h=h)
    return space, build_hamiltonian(spec, space), field_derivative(spec, space)


def test_generator_short_time_limit():
    space, H, H1 = _no_zeeman_pair(4)
    t = 1e-6
    G = generator_exact(H, H1, t)
    assert (G - t * H1).norm() / (t * H1).norm() < 1e-5


def test_generator_commutes_with_central_z():
    space, H, H1 = _no_zeeman_pair(4)
    G = generator_exact(H, H1, 2.3)
    assert np.max(np.abs(G.commutator(central_op(space, "z")).dense())) < 1e-10


def test_generator_matches_closed_form_coefficients():
    space, H, H1 = _no_zeeman_pair(3, h=0.8)
    for t in (0.4, 2.0, 7.5):
        d = decompose_generator(generator_exact(H, H1, t))
        c = generator_coeffs_analytic(1.0, 0.8, t)
        np.testing.assert_allclose(d.as_array(), c.as_array(), atol=1e-10)
        assert d.residual_norm < 1e-10


def test_qfi_from_generator():
    space = HilbertSpace.collective(6)
    alpha = 0.7
    G = alpha * ring_op(space, "y")
    psi = probe_state(space, ProbeKind.RING_Z_STRETCHED)
    assert qfi_from_generator(G, psi) == pytest.approx(2 * alpha ** 2 * 3, rel=1e-12)
    assert qfi_from_generator(ring_op(space, "z"), psi) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DomainError):
        qfi_from_generator(G, probe_state(HilbertSpace.collective(4), ProbeKind.RING_Z_STRETCHED))


def test_z_field_generator_is_trivial():
    space = HilbertSpace.collective(3)
    spec = ModelSpec.xxz(3, 0.6, field_axis="z")
    t = 2.5
    G = generator_exact(build_hamiltonian(spec, space), field_derivative(spec, space), t)
    total_z = central_op(space, "z") + ring_op(space, "z")
    np.testing.assert_allclose(G.dense(), -t * total_z.dense(), atol=1e-10)
    psi = probe_state(space, ProbeKind.RING_Z_STRETCHED)
    assert qfi_from_generator(G, psi) == pytest.approx(t ** 2, rel=1e-9)


def test_isotropic_xxz_generator_is_linear_in_time():
    space = HilbertSpace.collective(3)
    spec = ModelSpec.xxz(3, 1.0, A=1.0)
    H = build_hamiltonian(spec, space)
    H1 = field_derivative(spec, space)
    assert H1.commutator(H).norm() < 1e-12
    for t in (0.7, 2.5, 6.0):
        G = generator_exact(H, H1, t)
        assert (G - t * H1).norm() < 1e-10


def test_generator_capacity():
    space, H, H1 = _no_zeeman_pair(4)
    with pytest.raises(CapacityError):
        generator_exact(H, H1, 1.0, dense_threshold=4)


# ──────────────────────────────────────────────────────────────────────────────
# 시뮬레이션 파이프라인
# ──────────────────────────────────────────────────────────────────────────────
@pytest.mark.parametrize("spec", [
    ModelSpec.no_zeeman(2),
    ModelSpec.no_zeeman(4),
    ModelSpec.zzxx(4),
    ModelSpec.xxz(4, 0.3),
    ModelSpec.ising_ring(3, 0.2),
])
def test_finite_difference_agrees_with_generator(spec):
    rng = np.random.default_rng(17)
    for _ in range(3):
        h = float(rng.uniform(0.5, 1.5))
        t = float(rng.uniform(0.5, 5.0))
        fd = qfi_pure_fd(spec, ProbeKind.RING_Z_STRETCHED, t, h=h).value
        gen = qfi_generator(spec, ProbeKind.RING_Z_STRETCHED, t, h=h).value
        assert abs(fd - gen) <= 1e-5 * max(gen, 1.0)


def test_closed_form_matches_generator_at_any_time():
    spec = ModelSpec.no_zeeman(5)
    for t in (0.3, 1.7, 4.4):
        gen = qfi_generator(spec, ProbeKind.RING_Z_STRETCHED, t).value
        assert gen == pytest.approx(qfi_analytic(1.0, 1.0, 5, t), rel=1e-8)


def test_inhomogeneous_closed_form_matches_simulation():
    couplings = [0.7, 1.0, 1.2, 1.1]
    spec = ModelSpec.inhomogeneous(couplings)
    fd = qfi_pure_fd(spec, ProbeKind.RING_Z_STRETCHED, 2.0).value
    assert fd == pytest.approx(qfi_inhomogeneous_analytic(couplings, 1.0, 2.0), rel=1e-6)


def test_series_starts_from_zero():
    points = qfi_pure_fd_series(ModelSpec.no_zeeman(4), ProbeKind.RING_Z_STRETCHED, [0.0, 1.0, 2.0])
    assert points[0].value == 0.0
    assert [p.t for p in points] == [0.0, 1.0, 2.0]
    assert points[1].method == QfiMethod.FD_STATE
    with pytest.raises(DomainError):
        qfi_pure_fd_series(ModelSpec.no_zeeman(4), ProbeKind.RING_Z_STRETCHED, [1.0, 0.5])


def test_oversized_step_is_rejected_with_suggestion():
    with pytest.raises(StepError) as info:
        qfi_pure_fd(ModelSpec.no_zeeman(10), ProbeKind.RING_Z_STRETCHED, T_GLOBAL, step=0.5)
    assert info.value.suggested_step == pytest.approx(0.125)


@pytest.mark.parametrize("spec, probe, ring", [
    (ModelSpec.no_zeeman(4, h=0.9), ProbeKind.RING_X_POLARIZED, "x"),
    (ModelSpec.inhomogeneous([0.8, 1.3, 1.0, 0.9], h=0.9), ProbeKind.RING_Z_STRETCHED, "z"),
])
def test_coherence_matches_simulation(spec, probe, ring):
    space = HilbertSpace.collective(4) if spec.supports_collective else HilbertSpace.full_product(4)
    H = build_hamiltonian(spec, space)
    times = [0.0, 0.8, 2.1, 5.0]
    df = trajectory(H, probe_state(space, probe),
                    {"sx": central_op(space, "x"), "sy": central_op(space, "y")}, times)
    for t, sx, sy in zip(df["t"], df["sx"], df["sy"]):
        c = central_coherence_analytic(spec.coupling_list(), spec.h, t, ring)
        assert sx == pytest.approx(0.5 * c.real, abs=1e-10)
        assert sy == pytest.approx(-0.5 * c.imag, abs=1e-10)


def test_local_series_at_local_time():
    spec = ModelSpec.ising_ring(6, 0.0)
    points = local_qfi_fd_series(spec, ProbeKind.RING_X_POLARIZED, [1.0, T_LOCAL])
    assert points[-1].value == pytest.approx(local_qfi_analytic(1.0, 1.0, 6), rel=1e-5)
    assert len(points[-1].bloch) == 3


def test_stencil_metrics_share_states():
    spec = ModelSpec.no_zeeman(4)
    stencil = FieldStencil(spec, ProbeKind.RING_X_POLARIZED)
    states = stencil.states_at(T_LOCAL)
    sx = stencil_metric(stencil, states, T_LOCAL, "sx")
    assert sx == pytest.approx(sx_expectation_analytic(1.0, 1.0, 4)[0], abs=1e-10)
    local = stencil_metric(stencil, states, T_LOCAL, "local_bloch")
    assert local == pytest.approx(local_qfi_analytic(1.0, 1.0, 4), rel=1e-5)
    epf = stencil_metric(stencil, states, T_LOCAL, "epf")
    assert 0.0 <= epf <= local * (1 + 1e-6)
    with pytest.raises(DomainError):
        stencil_metric(stencil, states, T_LOCAL, "analytic")


def test_error_propagation_at_local_time():
    point = error_propagation_fd(ModelSpec.no_zeeman(10), ProbeKind.RING_X_POLARIZED, T_LOCAL)
    assert point.delta_h ** 2 == pytest.approx(25 / 1600, abs=1e-6)
    assert point.inverse_square == pytest.approx(local_qfi_analytic(1.0, 1.0, 10), rel=1e-5)
