"""
설정 로더
- .env (선택) + YAML(params) 로딩
- params.yaml 의 numerics 블록은 Numerics 데이터클래스로 검증해서 넘긴다
"""

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

try:
    from dotenv import load_dotenv  # 선택 설치: python-dotenv
    _HAS_DOTENV = True
except Exception:
    _HAS_DOTENV = False

try:
    import yaml  # 설치 필요: PyYAML
except Exception as e:
    raise ImportError("PyYAML 미설치: `pip install PyYAML` 후 재시도하세요") from e

from . import constants as C
from .errors import ConfigError


@dataclass(frozen=True)
class Numerics:
    dense_threshold: int = C.DENSE_THRESHOLD
    sparse_min_n: int = C.SPARSE_MIN_N
    max_n_full: int = C.MAX_N_FULL
    max_n_collective: int = C.MAX_N_COLLECTIVE
    chebyshev_tol: float = C.CHEBYSHEV_TOL
    chebyshev_max_order: int = C.CHEBYSHEV_MAX_ORDER
    bounds_margin: float = C.BOUNDS_MARGIN
    fd_rel_step: float = C.FD_REL_STEP
    fd_agreement: float = C.FD_AGREEMENT
    threads: int = 1


@dataclass(frozen=True)
class AppConfig:
    env: str
    params: Dict[str, Any]
    numerics: Numerics = field(default_factory=Numerics)
    log_level: str = "INFO"


def _load_env() -> None:
    # .env 는 있으면 읽고, 없으면 건너뜀
    if _HAS_DOTENV and C.ENV_FILE.exists():
        load_dotenv(C.ENV_FILE)


def _load_yaml(path: Path) -> Dict[str, Any]:
    if not path.exists():
        return {}
    with open(path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def build_numerics(block: Optional[Dict[str, Any]]) -> Numerics:
    """numerics 블록 → Numerics. 모르는 키는 오타로 보고 거부."""
    base = Numerics()
    if not block:
        return base
    known = {f.name: f.type for f in fields(Numerics)}
    updates: Dict[str, Any] = {}
    for key, value in block.items():
        if key not in known:
            raise ConfigError(f"알 수 없는 numerics 키: {key}", path=f"numerics.{key}")
        default = getattr(base, key)
        try:
            updates[key] = type(default)(value)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"숫자 변환 실패: {value!r}", path=f"numerics.{key}") from e
    numerics = replace(base, **updates)
    if not (0.0 < numerics.chebyshev_tol <= 1e-6):
        raise ConfigError("chebyshev_tol 은 (0, 1e-6] 범위여야 합니다", path="numerics.chebyshev_tol")
    if numerics.threads < 1:
        raise ConfigError("threads 는 1 이상", path="numerics.threads")
    return numerics


def load_config(params_path: Optional[Path] = None) -> AppConfig:
    _load_env()
    app_env = os.getenv("APP_ENV", "LOCAL")

    params = _load_yaml(params_path or C.PARAMS_YAML)
    numerics = build_numerics(params.get("numerics"))
    log_level = os.getenv("LOG_LEVEL") or (params.get("logging") or {}).get("level", "INFO")

    return AppConfig(
        env=app_env,
        params=params,
        numerics=numerics,
        log_level=str(log_level).upper(),
    )
