# src/experiments/curves.py
# 목적:
# - 곡선(QfiCurve) 행 모델과 CSV 직렬화
#   header: sweep_axis,sweep_value,method,value,wall_ms
# - 실수는 최단 왕복 표현(repr), 실패한 점은 value 칸에 ERR:<kind>
# - meta.json 기록

from __future__ import annotations
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Union

import pandas as pd

from src.common import constants as C
from src.common.errors import DomainError

Value = Union[float, str]
ERROR_PREFIX = "ERR:"


def error_marker(kind: str) -> str:
    return f"{ERROR_PREFIX}{kind}"


def is_error(value: Value) -> bool:
    return isinstance(value, str) and value.startswith(ERROR_PREFIX)


@dataclass(frozen=True)
class QfiRow:
    sweep_axis: str
    sweep_value: Union[int, float]
    method: str
    value: Value
    wall_ms: float = 0.0

    @property
    def error_kind(self) -> Union[str, None]:
        return self.value[len(ERROR_PREFIX):] if is_error(self.value) else None


@dataclass
class QfiCurve:
    name: str
    rows: List[QfiRow] = field(default_factory=list)
    meta: Dict[str, Any] = field(default_factory=dict)

    def values(self, method: str) -> pd.DataFrame:
        """method 하나의 (sweep_value, value) 표. 에러 행은 제외."""
        picked = [(r.sweep_value, r.value) for r in self.rows if r.method == method and not is_error(r.value)]
        return pd.DataFrame(picked, columns=["sweep_value", "value"])

    def errors(self) -> List[QfiRow]:
        return [r for r in self.rows if is_error(r.value)]

    def methods(self) -> List[str]:
        seen: List[str] = []
        for r in self.rows:
            if r.method not in seen:
                seen.append(r.method)
        return seen


# ──────────────────────────────────────────────────────────────────────────────
# 직렬화
# ──────────────────────────────────────────────────────────────────────────────
def _fmt_number(x: Union[int, float]) -> str:
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    return repr(float(x))


def _fmt_value(v: Value) -> str:
    return v if isinstance(v, str) else repr(float(v))


def curve_frame(curve: QfiCurve) -> pd.DataFrame:
    records = [
        [r.sweep_axis, _fmt_number(r.sweep_value), r.method, _fmt_value(r.value), repr(float(r.wall_ms))]
        for r in curve.rows
    ]
    return pd.DataFrame(records, columns=C.CURVE_HEADER, dtype=str)


def write_curve(curve: QfiCurve, out_dir: Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{curve.name}.csv"
    curve_frame(curve).to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    return path


def _parse_number(axis: str, text: str) -> Union[int, float]:
    if axis == "N":
        return int(text)
    return float(text)


def _parse_value(text: str) -> Value:
    return text if text.startswith(ERROR_PREFIX) else float(text)


def read_curve(path: Path) -> QfiCurve:
    path = Path(path)
    # 문자열로 읽은 뒤 직접 변환 (float 왕복 보장, ERR 마커 보존)
    df = pd.read_csv(path, dtype=str, keep_default_na=False)
    if list(df.columns) != C.CURVE_HEADER:
        raise DomainError(f"곡선 파일 header 불일치: {list(df.columns)}")
    rows = [
        QfiRow(rec.sweep_axis, _parse_number(rec.sweep_axis, rec.sweep_value), rec.method,
               _parse_value(rec.value), float(rec.wall_ms))
        for rec in df.itertuples(index=False)
    ]
    return QfiCurve(path.stem, rows)


def write_meta(meta: Dict[str, Any], out_dir: Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / C.META_FILE
    with open(path, "w", encoding="utf-8") as f:
        json.dump(meta, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
    return path
