# src/experiments/config.py
# 목적:
# - 실행 설정(JSON 한 문서) → RunConfig
# - 엄격 스키마: 모르는 키/잘못된 타입은 JSON 경로(model.Jx 등)를 담은 ConfigError
#
# 예)
# {
#   "model": {"variant": "CollectiveNoZeeman", "n_ring": 10, "h": 1.0, "A": 1.0},
#   "probe": "ring_z_stretched",
#   "time": {"kind": "global_qfi"},
#   "sweep": {"axis": "N", "values": [2, 4, 8]},
#   "methods": ["fd_state", "analytic"],
#   "seed": 0, "threads": 1
# }

from __future__ import annotations
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from src.common import constants as C
from src.common.errors import ConfigError
from src.metrology.analytic import SensingKind, sensing_time
from src.models.spec import CouplingProfile, ModelSpec, ProfileKind, Variant, sample_couplings
from src.spin.states import ProbeKind

SWEEP_AXES = ("N", "J", "h", "delta", "t")
METHODS = ("fd_state", "generator_exact", "analytic", "local_bloch", "epf", "sql", "sx", "sx_analytic")
BASES = ("auto", "full_product", "collective")
PROPAGATION_METHODS = ("auto", "eigen", "chebyshev")


# ──────────────────────────────────────────────────────────────────────────────
# 스키마 검사 보조
# ──────────────────────────────────────────────────────────────────────────────
def _obj(value: Any, path: str) -> Dict[str, Any]:
    if not isinstance(value, dict):
        raise ConfigError("객체(JSON object)여야 합니다", path=path)
    return value


def _only(block: Dict[str, Any], allowed: Sequence[str], path: str) -> None:
    for key in block:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise ConfigError(f"알 수 없는 키 (허용: {', '.join(allowed)})", path=where)


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"숫자가 아님: {value!r}", path=path)
    if not math.isfinite(value):
        raise ConfigError(f"유한하지 않은 값: {value!r}", path=path)
    return float(value)


def _integer(value: Any, path: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        else:
            raise ConfigError(f"정수가 아님: {value!r}", path=path)
    if minimum is not None and value < minimum:
        raise ConfigError(f"{minimum} 이상이어야 합니다: {value}", path=path)
    return int(value)


def _choice(value: Any, allowed: Sequence[str], path: str) -> str:
    if value not in allowed:
        raise ConfigError(f"{value!r} 는 허용되지 않음 (허용: {', '.join(allowed)})", path=path)
    return value


# ──────────────────────────────────────────────────────────────────────────────
# 블록
# ──────────────────────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class ModelBlock:
    variant: Variant
    n_ring: int = 1
    h: float = 1.0
    A: float = 1.0
    J: float = 0.0
    delta: float = 0.0
    field_axis: str = "y"
    couplings: Optional[Tuple[float, ...]] = None
    profile: Optional[CouplingProfile] = None
    profile_seeded: bool = False     # False 면 실행 seed 를 쓴다

    def build(self, axis: Optional[str] = None, value: Optional[float] = None, seed: int = 0) -> ModelSpec:
        """스윕 축 값을 덮어쓴 ModelSpec. 비균일 결합은 profile 로 N 마다 새로 뽑는다."""
        params = {"n_ring": self.n_ring, "h": self.h, "A": self.A, "J": self.J, "delta": self.delta}
        if axis in ("N", "h", "J", "delta"):
            params["n_ring" if axis == "N" else axis] = int(value) if axis == "N" else float(value)

        couplings = None
        if self.variant == Variant.INHOMOGENEOUS_ZZ:
            if self.couplings is not None:
                couplings = self.couplings
            else:
                profile = self.profile or CouplingProfile(seed=seed)
                if not self.profile_seeded:
                    profile = replace(profile, seed=seed)
                couplings = sample_couplings(profile, params["n_ring"], mean=params["A"])
            params["A"] = sum(couplings) / len(couplings)
        return ModelSpec(self.variant, params["n_ring"], h=params["h"], A=params["A"], J=params["J"],
                         delta=params["delta"], couplings=couplings, field_axis=self.field_axis)

    def as_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"variant": self.variant.value, "n_ring": self.n_ring, "h": self.h, "A": self.A,
                               "J": self.J, "delta": self.delta, "field_axis": self.field_axis}
        if self.couplings is not None:
            out["couplings"] = list(self.couplings)
        if self.profile is not None:
            out["profile"] = {"kind": self.profile.kind.value, "spread": self.profile.spread,
                              "width": self.profile.width}
            if self.profile_seeded:
                out["profile"]["seed"] = self.profile.seed
        return out


@dataclass(frozen=True)
class TimeRule:
    """고정 시각(t) 또는 측정 시각 규칙(kind, A?, h?). A/h 생략 시 각 점의 모델 값."""
    t: Optional[float] = None
    kind: Optional[SensingKind] = None
    A: Optional[float] = None
    h: Optional[float] = None

    def resolve(self, spec: ModelSpec) -> float:
        if self.t is not None:
            return self.t
        A = self.A if self.A is not None else spec.mean_coupling
        h = self.h if self.h is not None else spec.h
        return float(sensing_time(A, h, self.kind))

    def as_dict(self) -> Union[float, Dict[str, Any], None]:
        if self.t is not None:
            return self.t
        if self.kind is None:
            return None
        out: Dict[str, Any] = {"kind": self.kind.value}
        if self.A is not None:
            out["A"] = self.A
        if self.h is not None:
            out["h"] = self.h
        return out


@dataclass(frozen=True)
class RunConfig:
    model: ModelBlock
    sweep_axis: str
    sweep_values: Tuple[Union[int, float], ...]
    methods: Tuple[str, ...]
    probe: ProbeKind = ProbeKind.RING_Z_STRETCHED
    basis: str = "auto"
    time: TimeRule = field(default_factory=TimeRule)
    output_dir: Optional[str] = None
    seed: int = 0
    threads: int = 1
    propagation: str = "auto"
    tol: float = C.CHEBYSHEV_TOL
    name: str = "curve"
    timing: bool = False

    def __post_init__(self):
        if self.sweep_axis != "t" and self.time.t is None and self.time.kind is None:
            raise ConfigError("sweep 축이 t 가 아니면 time 이 필요합니다", path="time")
        if self.sweep_axis == "t" and (self.time.t is not None or self.time.kind is not None):
            raise ConfigError("sweep 축이 t 이면 time 을 따로 줄 수 없습니다", path="time")

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "model": self.model.as_dict(),
            "probe": self.probe.value,
            "basis": self.basis,
            "time": self.time.as_dict(),
            "sweep": {"axis": self.sweep_axis, "values": list(self.sweep_values)},
            "methods": list(self.methods),
            "output_dir": self.output_dir,
            "seed": self.seed,
            "threads": self.threads,
            "propagation": {"method": self.propagation, "tol": self.tol},
            "timing": self.timing,
        }

    def with_overrides(self, **changes) -> "RunConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


# ──────────────────────────────────────────────────────────────────────────────
# 파서
# ──────────────────────────────────────────────────────────────────────────────
_TOP_KEYS = ("name", "model", "probe", "basis", "time", "times", "sweep", "methods", "output_dir", "seed",
             "threads", "propagation", "timing")
_MODEL_KEYS = ("variant", "n_ring", "h", "A", "J", "delta", "field_axis", "couplings", "profile")
_PROFILE_KEYS = ("kind", "spread", "width", "seed")
_TIME_KEYS = ("kind", "A", "h")


def _parse_profile(raw: Any, path: str) -> CouplingProfile:
    block = _obj(raw, path)
    _only(block, _PROFILE_KEYS, path)
    kind = _choice(block.get("kind", ProfileKind.GAUSSIAN_ENVELOPE.value), [k.value for k in ProfileKind],
                   f"{path}.kind")
    kwargs: Dict[str, Any] = {"kind": kind}
    for key in ("spread", "width"):
        if key in block:
            kwargs[key] = _number(block[key], f"{path}.{key}")
    if "seed" in block:
        kwargs["seed"] = _integer(block["seed"], f"{path}.seed", minimum=0)
    try:
        return CouplingProfile(**kwargs)
    except ValueError as e:
        raise ConfigError(str(e), path=path) from e


def _parse_model(raw: Any) -> ModelBlock:
    block = _obj(raw, "model")
    _only(block, _MODEL_KEYS, "model")
    if "variant" not in block:
        raise ConfigError("variant 가 필요합니다", path="model.variant")
    variant = Variant(_choice(block["variant"], [v.value for v in Variant], "model.variant"))
    kwargs: Dict[str, Any] = {"variant": variant}
    if "n_ring" in block:
        kwargs["n_ring"] = _integer(block["n_ring"], "model.n_ring", minimum=1)
    for key in ("h", "A", "J", "delta"):
        if key in block:
            kwargs[key] = _number(block[key], f"model.{key}")
    if "field_axis" in block:
        kwargs["field_axis"] = _choice(block["field_axis"], ("y", "z"), "model.field_axis")
    if "couplings" in block:
        raw_c = block["couplings"]
        if not isinstance(raw_c, list) or not raw_c:
            raise ConfigError("비어 있지 않은 숫자 목록이어야 합니다", path="model.couplings")
        kwargs["couplings"] = tuple(_number(c, f"model.couplings[{i}]") for i, c in enumerate(raw_c))
    if "profile" in block:
        kwargs["profile"] = _parse_profile(block["profile"], "model.profile")
        kwargs["profile_seeded"] = "seed" in block["profile"]
    if ("couplings" in kwargs or "profile" in kwargs) and variant != Variant.INHOMOGENEOUS_ZZ:
        raise ConfigError("couplings/profile 은 InhomogeneousZZ 전용", path="model")
    if "couplings" in kwargs and "profile" in kwargs:
        raise ConfigError("couplings 와 profile 중 하나만", path="model")
    return ModelBlock(**kwargs)


def _parse_time(raw: Any, path: str) -> TimeRule:
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        t = _number(raw, path)
        if t < 0:
            raise ConfigError("t 는 0 이상", path=path)
        return TimeRule(t=t)
    if isinstance(raw, list):
        # 명시 목록은 원소 하나만 (여러 시각은 sweep 축 t 로)
        if len(raw) != 1:
            raise ConfigError("시각 목록은 원소 1개만 허용; 여러 시각은 sweep.axis='t' 사용", path=path)
        return _parse_time(raw[0], f"{path}[0]")
    block = _obj(raw, path)
    _only(block, _TIME_KEYS, path)
    if "kind" not in block:
        raise ConfigError("kind 가 필요합니다 (local_epf | global_qfi)", path=f"{path}.kind")
    kind = SensingKind(_choice(block["kind"], [k.value for k in SensingKind], f"{path}.kind"))
    A = _number(block["A"], f"{path}.A") if "A" in block else None
    h = _number(block["h"], f"{path}.h") if "h" in block else None
    return TimeRule(kind=kind, A=A, h=h)


def _parse_sweep(raw: Any) -> Tuple[str, Tuple[Union[int, float], ...]]:
    block = _obj(raw, "sweep")
    _only(block, ("axis", "values"), "sweep")
    axis = _choice(block.get("axis"), SWEEP_AXES, "sweep.axis")
    values = block.get("values")
    if not isinstance(values, list) or not values:
        raise ConfigError("비어 있지 않은 목록이어야 합니다", path="sweep.values")
    if axis == "N":
        parsed = tuple(_integer(v, f"sweep.values[{i}]", minimum=1) for i, v in enumerate(values))
    else:
        parsed = tuple(_number(v, f"sweep.values[{i}]") for i, v in enumerate(values))
    if axis == "t" and any(v < 0 for v in parsed):
        raise ConfigError("시각은 0 이상", path="sweep.values")
    return axis, parsed


def _parse_methods(raw: Any) -> Tuple[str, ...]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("비어 있지 않은 목록이어야 합니다", path="methods")
    out: List[str] = []
    for i, m in enumerate(raw):
        _choice(m, METHODS, f"methods[{i}]")
        if m in out:
            raise ConfigError(f"중복 method: {m}", path=f"methods[{i}]")
        out.append(m)
    return tuple(out)


def _parse_propagation(raw: Any) -> Tuple[str, float]:
    block = _obj(raw, "propagation")
    _only(block, ("method", "tol"), "propagation")
    method = _choice(block.get("method", "auto"), PROPAGATION_METHODS, "propagation.method")
    tol = _number(block.get("tol", C.CHEBYSHEV_TOL), "propagation.tol")
    if not (0.0 < tol <= 1e-6):
        raise ConfigError("tol 은 (0, 1e-6] 범위", path="propagation.tol")
    return method, tol


def parse_run_config(doc: Dict[str, Any]) -> RunConfig:
    doc = _obj(doc, "")
    _only(doc, _TOP_KEYS, "")
    for key in ("model", "sweep", "methods"):
        if key not in doc:
            raise ConfigError("필수 키 누락", path=key)
    if "time" in doc and "times" in doc:
        raise ConfigError("time 과 times 중 하나만", path="times")

    seed = _integer(doc.get("seed", 0), "seed", minimum=0)
    threads = _integer(doc.get("threads", 1), "threads", minimum=1)
    axis, values = _parse_sweep(doc["sweep"])
    time_key = "time" if "time" in doc else "times"
    time = _parse_time(doc[time_key], time_key) if time_key in doc else TimeRule()
    method, tol = _parse_propagation(doc["propagation"]) if "propagation" in doc else ("auto", C.CHEBYSHEV_TOL)

    name = doc.get("name", "curve")
    if not isinstance(name, str) or not name or "/" in name:
        raise ConfigError("파일명으로 쓸 수 있는 문자열이어야 합니다", path="name")
    output_dir = doc.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigError("문자열 경로여야 합니다", path="output_dir")
    timing = doc.get("timing", False)
    if not isinstance(timing, bool):
        raise ConfigError("true/false", path="timing")

    return RunConfig(
        model=_parse_model(doc["model"]),
        sweep_axis=axis,
        sweep_values=values,
        methods=_parse_methods(doc["methods"]),
        probe=ProbeKind(_choice(doc.get("probe", ProbeKind.RING_Z_STRETCHED.value),
                                (ProbeKind.RING_X_POLARIZED.value, ProbeKind.RING_Z_STRETCHED.value), "probe")),
        basis=_choice(doc.get("basis", "auto"), BASES, "basis"),
        time=time,
        output_dir=output_dir,
        seed=seed,
        threads=threads,
        propagation=method,
        tol=tol,
        name=name,
        timing=timing,
    )


def load_run_config(path: Path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"설정 파일 없음: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"JSON 파싱 실패: {e.msg} (line {e.lineno})") from e
    return parse_run_config(doc)
