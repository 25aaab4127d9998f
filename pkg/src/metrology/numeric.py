# src/metrology/numeric.py
# 목적:
# - 시뮬레이션 기반 계측 파이프라인
#   * qfi_pure_fd        : 전역 QFI, 전개된 상태의 h 유한차분
#   * local_qfi_fd       : 중심 큐비트 Bloch 벡터 유한차분 → 단일 큐비트 QFI
#   * error_propagation_fd : <σ₀^x> 모멘트 + 유한차분 기울기
#   * qfi_generator      : generator_exact 의 분산
# - 각 파이프라인의 *_series 버전은 오름차순 시각 목록을 한 번의 전파로 훑는다
#
# 유한차분 스텐실: h, h±δ, h±δ/2   (δ = fd_rel_step·max(1,|h|))
#   D₁ = [f(h+δ) - f(h-δ)]/(2δ),  D₂ = [f(h+δ/2) - f(h-δ/2)]/δ
#   D_R = (4D₂ - D₁)/3           (5점 Richardson)
#   F(D₂) 와 F(D_R) 가 fd_agreement 상대오차 안에서 맞아야 채택, 보고값은 F(D_R)

from __future__ import annotations
from functools import reduce
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.common import constants as C
from src.common.config import Numerics
from src.common.errors import DomainError, StepError
from src.common.logging import get_logger
from src.dynamics.propagation import Method, Propagator, SpectralBounds, choose_method, spectral_bounds
from src.dynamics.trajectory import TimeStepper, check_sorted
from src.metrology.analytic import error_propagation, local_qubit_qfi
from src.metrology.generator import generator_exact, qfi_from_generator
from src.metrology.points import ErrorPropagationPoint, LocalQfiPoint, QfiMethod, QfiPoint
from src.models.hamiltonians import build_hamiltonian, default_space, field_derivative
from src.models.spec import ModelSpec
from src.spin.hilbert import HilbertSpace, StateVector
from src.spin.operators import central_op
from src.spin.states import ProbeKind, probe_state, reduce_to_central_bloch

logger = get_logger("metrology")

OFFSETS = (-1.0, -0.5, 0.0, 0.5, 1.0)

Probe = Union[ProbeKind, str, StateVector]


def fd_step(h: float, rel: float = C.FD_REL_STEP) -> float:
    return rel * max(1.0, abs(h))


def resolve_probe(spec: ModelSpec, probe: Probe, basis: str = "auto",
                  numerics: Optional[Numerics] = None) -> Tuple[StateVector, HilbertSpace, str]:
    """probe 종류(문자열/enum) 또는 완성된 StateVector → (상태, 공간, 라벨)."""
    if isinstance(probe, StateVector):
        return probe, probe.space, ProbeKind.CUSTOM.value
    kind = ProbeKind(probe)
    if kind == ProbeKind.CUSTOM:
        raise DomainError("custom probe 는 StateVector 로 넘겨주세요")
    space = default_space(spec, basis, numerics)
    return probe_state(space, kind), space, kind.value


class FieldStencil:
    """
    h 주변 다섯 점의 해밀토니안과 전파 커서 묶음.
    chebyshev 경로는 다섯 H 의 포함 구간 합집합을 공유한다 (같은 전개 다항식).
    """

    def __init__(self, spec: ModelSpec, probe: Probe, h: Optional[float] = None,
                 step: Optional[float] = None, *, basis: str = "auto",
                 method: Optional[Method] = None, numerics: Optional[Numerics] = None):
        self.numerics = numerics or Numerics()
        self.h = float(spec.h if h is None else h)
        self.spec = spec.with_h(self.h)
        self.step = fd_step(self.h, self.numerics.fd_rel_step) if step is None else float(step)
        if not (self.step > 0 and np.isfinite(self.step)):
            raise DomainError(f"step 은 양수: {step}")
        self.psi0, self.space, self.probe_label = resolve_probe(self.spec, probe, basis, self.numerics)

        hams = {o: build_hamiltonian(self.spec.with_h(self.h + o * self.step), self.space) for o in OFFSETS}
        num = self.numerics
        self.method = Method(method) if method is not None else choose_method(hams[0.0], num.dense_threshold)
        self.bounds: Optional[SpectralBounds] = None
        if self.method == Method.CHEBYSHEV:
            self.bounds = reduce(SpectralBounds.union,
                                 (spectral_bounds(H, num.bounds_margin) for H in hams.values()))
        self.propagators = {
            o: Propagator(H, self.method, tol=num.chebyshev_tol, bounds=self.bounds,
                          dense_threshold=num.dense_threshold, max_order=num.chebyshev_max_order)
            for o, H in hams.items()
        }
        self._steppers = {o: TimeStepper(p, self.psi0) for o, p in self.propagators.items()}

    def states_at(self, t: float) -> Dict[float, StateVector]:
        return {o: s.advance_to(float(t)) for o, s in self._steppers.items()}

    def chebyshev_orders(self) -> List[int]:
        return sorted({k for p in self.propagators.values() for k in p.orders})


# ──────────────────────────────────────────────────────────────────────────────
# 스텐실 공통
# ──────────────────────────────────────────────────────────────────────────────
def _derivatives(values: Dict[float, np.ndarray], step: float):
    coarse = (values[1.0] - values[-1.0]) / (2.0 * step)
    fine = (values[0.5] - values[-0.5]) / step
    return fine, (4.0 * fine - coarse) / 3.0


def _agree(fine: float, rich: float, step: float, what: str, numerics: Numerics) -> float:
    gap = abs(fine - rich)
    if gap > numerics.fd_agreement * max(abs(rich), 1.0):
        raise StepError(f"{what}: δ/2 와 Richardson 추정치 불일치 ({fine:.10g} vs {rich:.10g})",
                        suggested_step=step / 4.0)
    return gap


def _pure_qfi(psi: np.ndarray, d: np.ndarray) -> float:
    overlap = np.vdot(psi, d)
    return 4.0 * (float(np.vdot(d, d).real) - abs(overlap) ** 2)


def _global_from_states(states: Dict[float, StateVector], step: float, numerics: Numerics) -> Tuple[float, float]:
    amps = {o: s.amplitudes for o, s in states.items()}
    fine, rich = _derivatives(amps, step)
    psi = amps[0.0]
    f_fine, f_rich = _pure_qfi(psi, fine), _pure_qfi(psi, rich)
    return f_rich, _agree(f_fine, f_rich, step, "global QFI", numerics)


def _local_from_states(states: Dict[float, StateVector], step: float, numerics: Numerics):
    vs = {o: reduce_to_central_bloch(s).as_array() for o, s in states.items()}
    d_fine, d_rich = _derivatives(vs, step)
    v0 = vs[0.0]
    f_fine, f_rich = local_qubit_qfi(v0, d_fine), local_qubit_qfi(v0, d_rich)
    return f_rich, _agree(f_fine, f_rich, step, "local QFI", numerics), v0, d_rich


def _epf_from_states(states: Dict[float, StateVector], step: float, numerics: Numerics):
    sx = central_op(states[0.0].space, "x")
    means = {o: float(np.vdot(s.amplitudes, sx.apply(s.amplitudes)).real) for o, s in states.items()}
    x_psi = sx.apply(states[0.0].amplitudes)
    second = float(np.vdot(x_psi, x_psi).real)
    s_fine, s_rich = _derivatives(means, step)
    _agree(s_fine, s_rich, step, "<σ₀^x> slope", numerics)
    return means[0.0], second, float(s_rich)


# ──────────────────────────────────────────────────────────────────────────────
# 전역 QFI
# ──────────────────────────────────────────────────────────────────────────────
def qfi_pure_fd_series(spec: ModelSpec, probe: Probe, times: Sequence[float], h: Optional[float] = None,
                       step: Optional[float] = None, **kwargs) -> List[QfiPoint]:
    ts = check_sorted(times)
    stencil = FieldStencil(spec, probe, h, step, **kwargs)
    out = []
    for t in ts:
        value, gap = _global_from_states(stencil.states_at(t), stencil.step, stencil.numerics)
        out.append(QfiPoint(stencil.spec, float(t), stencil.h, value, QfiMethod.FD_STATE,
                            stencil.probe_label, error_estimate=gap))
    logger.debug(f"qfi_pure_fd {spec.variant.value} N={spec.n_ring} points={len(out)} "
                 f"method={stencil.method.value} orders={stencil.chebyshev_orders()[-1:]}")
    return out


def qfi_pure_fd(spec: ModelSpec, probe: Probe, t: float, h: Optional[float] = None,
                step: Optional[float] = None, **kwargs) -> QfiPoint:
    return qfi_pure_fd_series(spec, probe, [t], h, step, **kwargs)[0]


def qfi_generator(spec: ModelSpec, probe: Probe, t: float, h: Optional[float] = None, *,
                  basis: str = "auto", numerics: Optional[Numerics] = None) -> QfiPoint:
    num = numerics or Numerics()
    spec = spec.with_h(spec.h if h is None else h)
    psi0, space, label = resolve_probe(spec, probe, basis, num)
    G = generator_exact(build_hamiltonian(spec, space), field_derivative(spec, space), t,
                        dense_threshold=num.dense_threshold)
    return QfiPoint(spec, float(t), spec.h, qfi_from_generator(G, psi0), QfiMethod.GENERATOR_EXACT, label)


# ──────────────────────────────────────────────────────────────────────────────
# 국소 QFI / 오차전파
# ──────────────────────────────────────────────────────────────────────────────
def local_qfi_fd_series(spec: ModelSpec, probe: Probe, times: Sequence[float], h: Optional[float] = None,
                        step: Optional[float] = None, **kwargs) -> List[LocalQfiPoint]:
    ts = check_sorted(times)
    stencil = FieldStencil(spec, probe, h, step, **kwargs)
    out = []
    for t in ts:
        value, gap, v0, dv = _local_from_states(stencil.states_at(t), stencil.step, stencil.numerics)
        out.append(LocalQfiPoint(float(t), stencil.h, value, tuple(v0), tuple(dv), gap))
    return out


def local_qfi_fd(spec: ModelSpec, probe: Probe, t: float, h: Optional[float] = None,
                 step: Optional[float] = None, **kwargs) -> LocalQfiPoint:
    return local_qfi_fd_series(spec, probe, [t], h, step, **kwargs)[0]


def error_propagation_fd_series(spec: ModelSpec, probe: Probe, times: Sequence[float],
                                h: Optional[float] = None, step: Optional[float] = None,
                                **kwargs) -> List[ErrorPropagationPoint]:
    ts = check_sorted(times)
    stencil = FieldStencil(spec, probe, h, step, **kwargs)
    out = []
    for t in ts:
        mean, second, slope = _epf_from_states(stencil.states_at(t), stencil.step, stencil.numerics)
        out.append(ErrorPropagationPoint(float(t), stencil.h, mean, second, slope,
                                         error_propagation(mean, second, slope)))
    return out


def error_propagation_fd(spec: ModelSpec, probe: Probe, t: float, h: Optional[float] = None,
                         step: Optional[float] = None, **kwargs) -> ErrorPropagationPoint:
    return error_propagation_fd_series(spec, probe, [t], h, step, **kwargs)[0]


# ──────────────────────────────────────────────────────────────────────────────
# 한 번의 전파로 여러 지표
# ──────────────────────────────────────────────────────────────────────────────
STENCIL_METRICS = ("fd_state", "local_bloch", "epf", "sx")


def stencil_metric(stencil: FieldStencil, states: Dict[float, StateVector], t: float, name: str) -> float:
    """
    같은 스텐실 상태(states = stencil.states_at(t))에서 지표 하나.
    epf 는 E_h = 1/Δh² 로 돌려준다.
    """
    if name == "fd_state":
        value, gap = _global_from_states(states, stencil.step, stencil.numerics)
        return QfiPoint(stencil.spec, t, stencil.h, value, QfiMethod.FD_STATE, stencil.probe_label,
                        error_estimate=gap).value
    if name == "local_bloch":
        return _local_from_states(states, stencil.step, stencil.numerics)[0]
    if name == "epf":
        mean, second, slope = _epf_from_states(states, stencil.step, stencil.numerics)
        return ErrorPropagationPoint(t, stencil.h, mean, second, slope,
                                     error_propagation(mean, second, slope)).inverse_square
    if name == "sx":
        psi = states[0.0]
        return float(np.vdot(psi.amplitudes, central_op(psi.space, "x").apply(psi.amplitudes)).real)
    raise DomainError(f"스텐실 지표가 아님: {name}")
