# src/dynamics/trajectory.py
# 목적:
# - 정렬된 시간 격자 위에서 관측량 기대값 표(pandas DataFrame) 만들기
# - eigen 경로는 매 시각 ψ₀ 에서 바로, chebyshev 경로는 직전 시각에서 이어서 전파

from __future__ import annotations
from typing import Dict, Iterable, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.common import constants as C
from src.common.errors import DomainError
from src.dynamics.propagation import Method, Propagator, SpectralBounds, checked_state, choose_method
from src.spin.hilbert import StateVector
from src.spin.operators import HermitianOperator, expectation


class TimeStepper:
    """시간 오름차순으로만 진행하는 전파 커서."""

    def __init__(self, propagator: Propagator, psi0: StateVector):
        self.propagator = propagator
        self.psi0 = psi0
        self._t = 0.0
        self._vec = np.array(psi0.amplitudes, copy=True)

    def advance_to(self, t: float) -> StateVector:
        if t < self._t:
            raise DomainError(f"시간은 오름차순이어야 합니다: {t} < {self._t}")
        if self.propagator.method == Method.EIGEN:
            vec = self.propagator.evolve_array(self.psi0.amplitudes, t)
        else:
            vec = self.propagator.evolve_array(self._vec, t - self._t)
        state = checked_state(self.psi0, vec)
        self._t, self._vec = t, np.array(state.amplitudes, copy=True)
        return state


def check_sorted(times: Sequence[float]) -> np.ndarray:
    ts = np.asarray(times, dtype=float)
    if ts.ndim != 1 or ts.size == 0:
        raise DomainError("times 는 비어 있지 않은 1차원 목록")
    if not np.all(np.isfinite(ts)) or np.any(np.diff(ts) < 0):
        raise DomainError("times 는 유한하고 오름차순이어야 합니다")
    if ts[0] < 0:
        raise DomainError("times 는 0 이상")
    return ts


def _named(observables: Union[Mapping[str, HermitianOperator], Iterable[HermitianOperator]]) -> Dict[str, HermitianOperator]:
    if isinstance(observables, Mapping):
        return dict(observables)
    out: Dict[str, HermitianOperator] = {}
    for i, op in enumerate(observables):
        out[op.label or f"obs{i}"] = op
    return out


def trajectory(H: HermitianOperator, psi0: StateVector,
               observables: Union[Mapping[str, HermitianOperator], Iterable[HermitianOperator]],
               times: Sequence[float],
               method: Optional[Method] = None,
               tol: float = C.CHEBYSHEV_TOL,
               bounds: Optional[SpectralBounds] = None,
               dense_threshold: int = C.DENSE_THRESHOLD) -> pd.DataFrame:
    """행 = 시각, 열 = 't' + 관측량 이름."""
    ts = check_sorted(times)
    ops = _named(observables)
    method = Method(method) if method is not None else choose_method(H, dense_threshold)
    stepper = TimeStepper(Propagator(H, method, tol=tol, bounds=bounds, dense_threshold=dense_threshold), psi0)

    rows = []
    for t in ts:
        psi = stepper.advance_to(float(t))
        row = {"t": float(t)}
        for name, op in ops.items():
            row[name] = expectation(op, psi)
        rows.append(row)
    return pd.DataFrame(rows, columns=["t", *ops.keys()])
