# src/metrology/points.py
# 목적: 계측 결과 한 점을 담는 값 객체들

from __future__ import annotations
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from src.metrology.analytic import clip_qfi
from src.models.spec import ModelSpec


class QfiMethod(str, Enum):
    FD_STATE = "fd_state"
    GENERATOR_EXACT = "generator_exact"
    ANALYTIC = "analytic"


@dataclass(frozen=True)
class QfiPoint:
    model: ModelSpec
    t: float
    h: float
    value: float
    method: QfiMethod
    probe: str
    error_estimate: Optional[float] = None   # fd: |F(δ/2) - F(Richardson)|

    def __post_init__(self):
        object.__setattr__(self, "method", QfiMethod(self.method))
        object.__setattr__(self, "value", clip_qfi(float(self.value)))


@dataclass(frozen=True)
class LocalQfiPoint:
    t: float
    h: float
    value: float
    bloch: tuple
    dbloch: tuple
    error_estimate: float = 0.0


@dataclass(frozen=True)
class ErrorPropagationPoint:
    t: float
    h: float
    mean: float
    second_moment: float
    slope: float
    delta_h: float

    @property
    def inverse_square(self) -> float:
        """E_h = 1/Δh² (Δh 발산 시 0)."""
        if self.delta_h == float("inf"):
            return 0.0
        if self.delta_h == 0.0:
            return float("inf")
        return 1.0 / self.delta_h ** 2
