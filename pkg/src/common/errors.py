"""
예외 계층
- 각 클래스의 kind 문자열은 곡선 파일의 in-row 에러 마커(ERR:<kind>)로 그대로 쓰인다
"""

from __future__ import annotations
from typing import Optional


class CentralSpinError(Exception):
    kind = "error"


class DomainError(CentralSpinError, ValueError):
    kind = "domain"


class UnsupportedBasisError(DomainError):
    kind = "unsupported_basis"


class CapacityError(CentralSpinError):
    kind = "capacity"


class ConvergenceError(CentralSpinError):
    kind = "convergence"


class StepError(ConvergenceError):
    """유한차분 두 추정치가 합의하지 않을 때. 다음에 시도할 step 을 함께 돌려준다."""
    kind = "step"

    def __init__(self, message: str, suggested_step: float):
        super().__init__(f"{message} (suggested step={suggested_step:g})")
        self.suggested_step = suggested_step


class ConsistencyError(CentralSpinError):
    kind = "consistency"


class ConfigError(CentralSpinError, ValueError):
    kind = "config"

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


# CLI 종료 코드
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_CONVERGENCE = 4


def exit_code_for(kind: Optional[str]) -> int:
    if kind is None:
        return EXIT_OK
    if kind == ConfigError.kind:
        return EXIT_CONFIG
    if kind == CapacityError.kind:
        return EXIT_CAPACITY
    if kind in (ConvergenceError.kind, StepError.kind):
        return EXIT_CONVERGENCE
    # domain/consistency 실패는 데이터 문제로 보고 설정 오류와 같은 코드로
    return EXIT_CONFIG
