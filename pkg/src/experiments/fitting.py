# src/experiments/fitting.py
# 목적:
# - QFI-vs-N 곡선의 스케일링 적합
#   * power_law             : log F = c + k·log N  (기울기 k, 잔차)
#   * linear_plus_quadratic : F = a·N + b·N²        (계수, 공분산)

from __future__ import annotations
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from src.common.errors import DomainError
from src.experiments.curves import QfiCurve

MIN_POINTS = 4


class FitForm(str, Enum):
    POWER_LAW = "power_law"
    LINEAR_PLUS_QUADRATIC = "linear_plus_quadratic"

    @classmethod
    def parse(cls, value: Union["FitForm", str]) -> "FitForm":
        if value == "quad":
            return cls.LINEAR_PLUS_QUADRATIC
        return cls(value)


@dataclass(frozen=True)
class FitReport:
    form: FitForm
    n_points: int
    params: Dict[str, float]
    stderr: Dict[str, float]
    covariance: List[List[float]]
    residual: float                      # 잔차 RMS (power_law 는 log 공간)
    method: Optional[str] = None
    ns: List[float] = field(default_factory=list)

    def as_dict(self) -> Dict:
        return {
            "form": self.form.value,
            "method": self.method,
            "n_points": self.n_points,
            "params": self.params,
            "stderr": self.stderr,
            "covariance": self.covariance,
            "residual": self.residual,
        }


def _lstsq(X: np.ndarray, y: np.ndarray):
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise DomainError("설계 행렬 rank 부족 (서로 다른 N 이 부족)")
    resid = y - X @ coef
    dof = max(1, len(y) - X.shape[1])
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(X.T @ X)
    return coef, cov, float(np.sqrt(np.mean(resid ** 2)))


def fit_arrays(ns: Sequence[float], values: Sequence[float], form: Union[FitForm, str],
               method: Optional[str] = None) -> FitReport:
    form = FitForm.parse(form)
    x = np.asarray(ns, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("N 과 값의 길이가 다릅니다")
    if len(x) < MIN_POINTS:
        raise DomainError(f"적합에는 최소 {MIN_POINTS}점 필요 (현재 {len(x)})")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError("비유한 값이 있습니다")

    if form == FitForm.POWER_LAW:
        if np.any(x <= 0) or np.any(y <= 0):
            raise DomainError("power_law 는 양수 N, 양수 값만 허용")
        X = np.column_stack([np.ones_like(x), np.log(x)])
        coef, cov, resid = _lstsq(X, np.log(y))
        names = ("log_prefactor", "slope")
    else:
        X = np.column_stack([x, x ** 2])
        coef, cov, resid = _lstsq(X, y)
        names = ("a", "b")

    return FitReport(
        form=form,
        n_points=len(x),
        params={k: float(v) for k, v in zip(names, coef)},
        stderr={k: float(np.sqrt(max(cov[i, i], 0.0))) for i, k in enumerate(names)},
        covariance=cov.tolist(),
        residual=resid,
        method=method,
        ns=x.tolist(),
    )


def fit_scaling(curve: QfiCurve, form: Union[FitForm, str], method: Optional[str] = None) -> FitReport:
    """method 생략 시 곡선의 첫 method. 에러 행은 건너뛴다."""
    if any(r.sweep_axis != "N" for r in curve.rows):
        raise DomainError("스케일링 적합은 sweep 축 N 인 곡선만")
    methods = curve.methods()
    if not methods:
        raise DomainError("빈 곡선")
    method = method or methods[0]
    if method not in methods:
        raise DomainError(f"곡선에 없는 method: {method} (있음: {', '.join(methods)})")
    table = curve.values(method)
    return fit_arrays(table["sweep_value"].to_numpy(), table["value"].to_numpy(dtype=float), form, method)
