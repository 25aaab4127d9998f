# src/experiments/runner.py
# 목적:
# - RunConfig 하나 → 곡선 CSV 한 개 + meta.json
# - 스윕 점은 작업(Task) 단위로 프로세스 풀에서 계산, 결과는 스윕 인덱스 순으로 정렬해 기록
#   * 축이 t 인 스윕: 시각 오름차순으로 CHUNK_SIZE 개씩 묶어 한 작업에서 이어서 전파
#     (묶음 크기는 스레드 수와 무관 → 스레드 수가 달라도 같은 바이트)
#   * 그 외 축: 점 하나가 작업 하나
# - 점 단위 실패는 행 안에 ERR:<kind> 로 남기고 스윕은 계속

from __future__ import annotations
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from src.common import constants as C
from src.common.config import Numerics
from src.common.errors import CentralSpinError, DomainError, exit_code_for
from src.common.logging import get_logger
from src.dynamics.propagation import Method
from src.experiments.config import RunConfig
from src.experiments.curves import QfiCurve, QfiRow, Value, error_marker, write_curve, write_meta
from src.metrology.analytic import (
    SensingKind,
    central_coherence_analytic,
    local_qfi_analytic,
    qfi_analytic,
    qfi_inhomogeneous_analytic,
    sensing_time,
    sql_reference,
)
from src.metrology.numeric import STENCIL_METRICS, FieldStencil, qfi_generator, stencil_metric
from src.models.spec import ModelSpec, Variant
from src.spin.states import ProbeKind

logger = get_logger("experiments")

CHUNK_SIZE = 16


@dataclass(frozen=True)
class SweepPoint:
    index: int
    value: Union[int, float]
    spec: Optional[ModelSpec]
    t: Optional[float]
    error: Optional[str] = None     # 모델/시각 해석 단계 실패 kind


@dataclass(frozen=True)
class Task:
    points: Tuple[SweepPoint, ...]
    cfg: RunConfig
    numerics: Numerics


@dataclass
class TaskResult:
    cells: List[Tuple[int, str, Value, float]] = field(default_factory=list)   # (index, method, value, wall_ms)
    meta: Dict[str, Any] = field(default_factory=dict)


@dataclass
class RunResult:
    curves: List[QfiCurve]
    out_dir: Optional[Path]
    meta: Dict[str, Any]
    worst_kind: Optional[str] = None

    @property
    def exit_code(self) -> int:
        return exit_code_for(self.worst_kind)


# ──────────────────────────────────────────────────────────────────────────────
# 점 해석 / 작업 분할
# ──────────────────────────────────────────────────────────────────────────────
def resolve_points(cfg: RunConfig) -> List[SweepPoint]:
    points: List[SweepPoint] = []
    for i, v in enumerate(cfg.sweep_values):
        value = int(v) if cfg.sweep_axis == "N" else float(v)
        try:
            if cfg.sweep_axis == "t":
                spec = cfg.model.build(seed=cfg.seed)
                t = value
            else:
                spec = cfg.model.build(cfg.sweep_axis, value, seed=cfg.seed)
                t = cfg.time.resolve(spec)
            points.append(SweepPoint(i, value, spec, t))
        except CentralSpinError as e:
            logger.warning(f"sweep point {cfg.sweep_axis}={value} 해석 실패: {e}")
            points.append(SweepPoint(i, value, None, None, e.kind))
    return points


def plan_tasks(cfg: RunConfig, points: Sequence[SweepPoint], numerics: Numerics) -> List[Task]:
    if cfg.sweep_axis != "t":
        return [Task((p,), cfg, numerics) for p in points]
    ordered = sorted(points, key=lambda p: (p.t if p.t is not None else -1.0, p.index))
    return [Task(tuple(ordered[i:i + CHUNK_SIZE]), cfg, numerics) for i in range(0, len(ordered), CHUNK_SIZE)]


# ──────────────────────────────────────────────────────────────────────────────
# 지표 계산
# ──────────────────────────────────────────────────────────────────────────────
# 닫힌 형태 열: J=0, 전자 Zeeman 항 없는 모델에서만 정확. 나머지 변형에서는 비교용 overlay
CLOSED_FORM_METHODS = ("analytic", "sx_analytic")


def closed_form_is_exact(spec: ModelSpec) -> bool:
    if spec.variant == Variant.ISING_RING_CENTRAL:
        return spec.J == 0.0
    return spec.variant in (Variant.COLLECTIVE_NO_ZEEMAN, Variant.INHOMOGENEOUS_ZZ)


def closed_form_meta(cfg: RunConfig, points: Sequence[SweepPoint]) -> Optional[Dict[str, Any]]:
    """닫힌 형태 열이 시뮬레이션 모델을 정확히 기술하는지, overlay 인지 기록."""
    methods = [m for m in cfg.methods if m in CLOSED_FORM_METHODS]
    if not methods:
        return None
    overlay = [p.value for p in points if p.spec is not None and not closed_form_is_exact(p.spec)]
    out: Dict[str, Any] = {
        "methods": methods,
        "formula": "J=0, no electron Zeeman term",
        "exact": not overlay,
    }
    if overlay and cfg.sweep_axis != "t":
        out["overlay_for"] = overlay
    return out


def time_meta(cfg: RunConfig, points: Sequence[SweepPoint]) -> Optional[Dict[str, Any]]:
    """시각 규칙으로 점마다 정해진 t (t 스윕이면 없음)."""
    if cfg.sweep_axis == "t":
        return None
    return {"rule": cfg.time.as_dict(), "resolved": [p.t for p in points]}


def analytic_value(spec: ModelSpec, probe: ProbeKind, t: float) -> float:
    """
    ring_z_stretched : 임의 t 닫힌 형태 (비균일이면 스핀별 합)
    ring_x_polarized : t = π/Ω 에서의 국소 QFI 닫힌 형태
    """
    if probe == ProbeKind.RING_Z_STRETCHED:
        if spec.variant == Variant.INHOMOGENEOUS_ZZ:
            return qfi_inhomogeneous_analytic(spec.couplings, spec.h, t)
        return qfi_analytic(spec.A, spec.h, spec.n_ring, t)
    if probe == ProbeKind.RING_X_POLARIZED:
        t_local = sensing_time(spec.mean_coupling, spec.h, SensingKind.LOCAL_EPF)
        if not math.isclose(t, t_local, rel_tol=1e-9):
            raise DomainError(f"ring_x 닫힌 형태는 t=π/Ω={t_local:.6g} 에서만 정의 (t={t:.6g})")
        return local_qfi_analytic(spec.mean_coupling, spec.h, spec.n_ring)
    raise DomainError(f"닫힌 형태가 없는 probe: {probe}")


def _direct_metric(method: str, cfg: RunConfig, spec: ModelSpec, t: float, numerics: Numerics) -> float:
    if method == "generator_exact":
        return qfi_generator(spec, cfg.probe, t, basis=cfg.basis, numerics=numerics).value
    if method == "analytic":
        return analytic_value(spec, cfg.probe, t)
    if method == "sql":
        return sql_reference(t, spec.n_ring)
    if method == "sx_analytic":
        ring = "x" if cfg.probe == ProbeKind.RING_X_POLARIZED else "z"
        return 0.5 * central_coherence_analytic(spec.coupling_list(), spec.h, t, ring).real
    raise DomainError(f"알 수 없는 method: {method}")


def _build_stencil(task: Task, spec: ModelSpec) -> FieldStencil:
    method = None if task.cfg.propagation == "auto" else Method(task.cfg.propagation)
    return FieldStencil(spec, task.cfg.probe, basis=task.cfg.basis, method=method, numerics=task.numerics)


def evaluate_task(task: Task) -> TaskResult:
    """작업 하나 (워커 프로세스에서 실행). 예외는 kind 문자열로 바꿔서 돌려준다."""
    cfg = task.cfg
    result = TaskResult(meta={"indices": [p.index for p in task.points]})
    started = time.perf_counter()

    for p in task.points:
        if p.error is not None:
            result.cells.extend((p.index, m, error_marker(p.error), 0.0) for m in cfg.methods)
    good = [p for p in task.points if p.error is None]
    if not good:
        return result

    spec = good[0].spec
    if spec.couplings is not None:
        result.meta["couplings"] = list(spec.couplings)

    stencil: Optional[FieldStencil] = None
    stencil_error: Optional[str] = None
    if any(m in STENCIL_METRICS for m in cfg.methods):
        try:
            stencil = _build_stencil(task, spec)
        except CentralSpinError as e:
            stencil_error = e.kind
            logger.warning(f"{cfg.name} N={spec.n_ring}: 스텐실 구성 실패 ({e})")

    for p in good:
        states = None
        for m in cfg.methods:
            t0 = time.perf_counter()
            try:
                if m in STENCIL_METRICS:
                    if stencil is None:
                        value: Value = error_marker(stencil_error or "error")
                    else:
                        if states is None:
                            states = stencil.states_at(p.t)
                        value = stencil_metric(stencil, states, p.t, m)
                else:
                    value = _direct_metric(m, cfg, p.spec, p.t, task.numerics)
            except CentralSpinError as e:
                logger.warning(f"{cfg.name} {cfg.sweep_axis}={p.value} {m}: {e}")
                value = error_marker(e.kind)
            result.cells.append((p.index, m, value, (time.perf_counter() - t0) * 1e3))

    if stencil is not None:
        result.meta["propagation"] = stencil.method.value
        if stencil.bounds is not None:
            result.meta["spectral_bounds"] = [stencil.bounds.e_min, stencil.bounds.e_max]
        orders = stencil.chebyshev_orders()
        if orders:
            result.meta["chebyshev_orders"] = [orders[0], orders[-1]]
    result.meta["wall_ms"] = round((time.perf_counter() - started) * 1e3, 3)
    return result


def _execute(tasks: List[Task], threads: int) -> List[TaskResult]:
    if threads <= 1 or len(tasks) <= 1:
        return [evaluate_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(threads, len(tasks))) as pool:
        return list(pool.map(evaluate_task, tasks))


def _worst(kinds: Sequence[str]) -> Optional[str]:
    worst = None
    for k in kinds:
        if worst is None or exit_code_for(k) > exit_code_for(worst):
            worst = k
    return worst


# ──────────────────────────────────────────────────────────────────────────────
# 공개 API
# ──────────────────────────────────────────────────────────────────────────────
def execute(cfg: RunConfig, numerics: Optional[Numerics] = None) -> QfiCurve:
    """파일은 쓰지 않고 곡선만 계산. curve.meta 에 작업별 메타 정보."""
    num = replace(numerics or Numerics(), chebyshev_tol=cfg.tol, threads=cfg.threads)
    points = resolve_points(cfg)
    tasks = plan_tasks(cfg, points, num)
    logger.info(f"sweep 시작: {cfg.name} axis={cfg.sweep_axis} points={len(points)} "
                f"methods={','.join(cfg.methods)} tasks={len(tasks)} threads={cfg.threads}")

    results = _execute(tasks, cfg.threads)
    cells = {(idx, m): (v, ms) for r in results for (idx, m, v, ms) in r.cells}

    rows: List[QfiRow] = []
    for p in sorted(points, key=lambda q: q.index):
        for m in cfg.methods:
            value, ms = cells[(p.index, m)]
            rows.append(QfiRow(cfg.sweep_axis, p.value, m, value, round(ms, 3) if cfg.timing else 0.0))

    curve = QfiCurve(cfg.name, rows, meta={
        "config": cfg.as_dict(),
        "numerics": asdict(num),
        "tasks": [r.meta for r in results],
    })
    closed = closed_form_meta(cfg, points)
    if closed is not None:
        curve.meta["closed_form"] = closed
        if not closed["exact"]:
            logger.info(f"{cfg.name}: {','.join(closed['methods'])} 열은 J=0 무-Zeeman 닫힌 형태 overlay")
    times = time_meta(cfg, points)
    if times is not None:
        curve.meta["time"] = times
    n_err = len(curve.errors())
    logger.info(f"sweep 종료: {cfg.name} rows={len(rows)} errors={n_err}")
    return curve


def base_meta(seed: int, threads: int) -> Dict[str, Any]:
    return {
        "tool": C.TOOL_NAME,
        "version": C.TOOL_VERSION,
        "schema_version": C.SCHEMA_VERSION,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "seed": seed,
        "threads": threads,
    }


def finish_run(curves: List[QfiCurve], out_dir: Path, meta: Dict[str, Any]) -> RunResult:
    out_dir = Path(out_dir)
    meta["curves"] = {}
    for curve in curves:
        path = write_curve(curve, out_dir)
        meta["curves"][curve.name] = {"file": path.name, "rows": len(curve.rows),
                                      "errors": len(curve.errors()), **curve.meta}
        logger.info(f"saved: {path}")
    write_meta(meta, out_dir)
    worst = _worst([r.error_kind for c in curves for r in c.errors()])
    if worst is not None:
        logger.warning(f"in-row 실패 존재: worst={worst}")
    return RunResult(curves, out_dir, meta, worst)


def run_config(cfg: RunConfig, out_dir: Optional[Path] = None, numerics: Optional[Numerics] = None) -> RunResult:
    target = Path(out_dir or cfg.output_dir or C.RUNS_DIR / cfg.name)
    curve = execute(cfg, numerics)
    return finish_run([curve], target, base_meta(cfg.seed, cfg.threads))
