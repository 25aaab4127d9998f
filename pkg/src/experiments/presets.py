# src/experiments/presets.py
# 목적:
# - 그림 재현용 프리셋 (fig1a, fig1b, fig2, fig3, fig4) → RunConfig 묶음
# - 한 프리셋 = 출력 디렉터리 하나, 곡선 CSV 여러 개 + meta.json 하나
#
# 공통: A=1, h=1 (fig2 의 h 스윕 제외)
# N 범위는 노트북 규모 실행 시간에 맞춘 값 (meta.json notes 에 기록)

from __future__ import annotations
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from src.common.config import Numerics
from src.common.errors import ConfigError
from src.common.logging import get_logger
from src.experiments.config import ModelBlock, RunConfig, TimeRule
from src.experiments.runner import RunResult, base_meta, execute, finish_run
from src.metrology.analytic import SensingKind, sensing_time
from src.models.spec import CouplingProfile, ProfileKind, Variant
from src.spin.states import ProbeKind

logger = get_logger("experiments")

TRAJECTORY_POINTS = 400
TRAJECTORY_SPAN = 1.2       # [0, 1.2·t₀]

LOCAL = TimeRule(kind=SensingKind.LOCAL_EPF)
GLOBAL = TimeRule(kind=SensingKind.GLOBAL_QFI)


def _trajectory_times(A: float = 1.0, h: float = 1.0) -> tuple:
    t0 = sensing_time(A, h, SensingKind.GLOBAL_QFI)
    return tuple(float(t) for t in np.linspace(0.0, TRAJECTORY_SPAN * t0, TRAJECTORY_POINTS))


# ──────────────────────────────────────────────────────────────────────────────
# 프리셋 정의
# ──────────────────────────────────────────────────────────────────────────────
def _fig1(local: bool, seed: int, threads: int) -> List[RunConfig]:
    ns = tuple(range(2, 13))
    out = []
    for J in (0.0, 0.1, 0.2):
        model = ModelBlock(Variant.ISING_RING_CENTRAL, J=J)
        if local:
            out.append(RunConfig(model, "N", ns, ("local_bloch", "epf", "analytic"),
                                 probe=ProbeKind.RING_X_POLARIZED, basis="full_product", time=LOCAL,
                                 seed=seed, threads=threads, name=f"fig1a_J{J:g}"))
        else:
            out.append(RunConfig(model, "N", ns, ("fd_state", "analytic"),
                                 probe=ProbeKind.RING_Z_STRETCHED, basis="full_product", time=GLOBAL,
                                 seed=seed, threads=threads, name=f"fig1b_J{J:g}"))
    return out


def _fig2(seed: int, threads: int) -> List[RunConfig]:
    out = []
    times = _trajectory_times()
    hs = tuple(round(0.2 * k, 10) for k in range(1, 16))
    for n in (8, 40):
        model = ModelBlock(Variant.ZZXX, n_ring=n)
        out.append(RunConfig(model, "t", times, ("sx", "sx_analytic", "fd_state", "analytic"),
                             probe=ProbeKind.RING_Z_STRETCHED, basis="collective",
                             seed=seed, threads=threads, name=f"fig2_trajectory_N{n}"))
        # 국소 QFI vs h: 점마다 t = π/Ω(h)
        out.append(RunConfig(model, "h", hs, ("local_bloch", "analytic"),
                             probe=ProbeKind.RING_X_POLARIZED, basis="collective", time=LOCAL,
                             seed=seed, threads=threads, name=f"fig2_local_vs_h_N{n}"))
    return out


def _fig3(seed: int, threads: int) -> List[RunConfig]:
    ns = (2, 4, 8, 12, 16, 20, 24, 32, 40)
    out = []
    for delta in (0.0, 0.1, 0.2):
        model = ModelBlock(Variant.XXZ_COLLECTIVE, delta=delta)
        out.append(RunConfig(model, "N", ns, ("fd_state", "analytic", "sql"),
                             probe=ProbeKind.RING_Z_STRETCHED, basis="collective", time=GLOBAL,
                             seed=seed, threads=threads, name=f"fig3_global_delta{delta:g}"))
        out.append(RunConfig(model, "N", ns, ("local_bloch", "analytic"),
                             probe=ProbeKind.RING_X_POLARIZED, basis="collective", time=LOCAL,
                             seed=seed, threads=threads, name=f"fig3_local_delta{delta:g}"))
    return out


def _fig4(seed: int, threads: int) -> List[RunConfig]:
    profile = CouplingProfile(ProfileKind.GAUSSIAN_ENVELOPE, width=0.5, seed=seed)
    inhomogeneous = ModelBlock(Variant.INHOMOGENEOUS_ZZ, n_ring=16, profile=profile, profile_seeded=True)
    homogeneous = ModelBlock(Variant.COLLECTIVE_NO_ZEEMAN, n_ring=16)
    times = _trajectory_times()
    ns = tuple(range(4, 17, 2))
    return [
        RunConfig(inhomogeneous, "t", times, ("fd_state", "analytic"),
                  probe=ProbeKind.RING_Z_STRETCHED, basis="full_product", propagation="chebyshev",
                  seed=seed, threads=threads, name="fig4_trajectory"),
        RunConfig(homogeneous, "t", times, ("analytic",),
                  probe=ProbeKind.RING_Z_STRETCHED, basis="collective",
                  seed=seed, threads=threads, name="fig4_trajectory_homogeneous"),
        RunConfig(inhomogeneous, "N", ns, ("fd_state", "analytic"),
                  probe=ProbeKind.RING_Z_STRETCHED, basis="full_product", time=GLOBAL,
                  seed=seed, threads=threads, name="fig4_scaling"),
        RunConfig(homogeneous, "N", ns, ("analytic",),
                  probe=ProbeKind.RING_Z_STRETCHED, basis="collective", time=GLOBAL,
                  seed=seed, threads=threads, name="fig4_scaling_homogeneous"),
    ]


PRESET_NOTES: Dict[str, List[str]] = {
    "fig1a": ["N ∈ [2, 12] FullProduct (노트북 규모), t = π/Ω, probe ring_x_polarized",
              "epf 열은 E_h = 1/Δh²"],
    "fig1b": ["N ∈ [2, 12] FullProduct (노트북 규모), t = 2π/Ω, probe ring_z_stretched",
              "analytic 열은 J=0 닫힌 형태 (J≠0 에도 같은 값)"],
    "fig2": ["trajectory: 400 uniform points on [0, 1.2·t₀], t₀ = 2π/Ω",
             "sx_analytic 은 Zeeman 항 없는 J=0 닫힌 형태",
             "local_vs_h: h ∈ {0.2, ..., 3.0}, 점마다 t = π/Ω(h) (고정 t₀ 아님, 점별 시각은 curves.<name>.time.resolved)",
             "analytic / sx_analytic 은 ZZXX 에 대한 overlay (curves.<name>.closed_form)"],
    "fig3": ["N ∈ {2, 4, 8, 12, 16, 20, 24, 32, 40} CollectiveSector", "sql 열은 t₀²(N+1)",
             "analytic 열은 J=0 무-Zeeman 닫힌 형태 overlay (curves.<name>.closed_form)"],
    "fig4": ["gaussian_envelope width 0.5·N, 평균 결합 1", "N=16 trajectory 는 Chebyshev FullProduct",
             "scaling: N ∈ {4, 6, ..., 16}"],
}

PRESETS = {
    "fig1a": lambda seed, threads: _fig1(True, seed, threads),
    "fig1b": lambda seed, threads: _fig1(False, seed, threads),
    "fig2": _fig2,
    "fig3": _fig3,
    "fig4": _fig4,
}


def preset_configs(name: str, seed: int = 0, threads: int = 1) -> List[RunConfig]:
    if name not in PRESETS:
        raise ConfigError(f"알 수 없는 프리셋: {name} (허용: {', '.join(PRESETS)})", path="preset")
    return PRESETS[name](seed, threads)


def run_preset(name: str, out: Path, threads: int = 1, seed: int = 0,
               numerics: Optional[Numerics] = None) -> RunResult:
    configs = preset_configs(name, seed, threads)
    logger.info(f"=== preset {name} start: curves={len(configs)} ===")
    curves = [execute(cfg, numerics) for cfg in configs]
    meta = base_meta(seed, threads)
    meta["preset"] = name
    meta["notes"] = PRESET_NOTES[name]
    result = finish_run(curves, Path(out), meta)
    logger.info(f"=== preset {name} end: out={out} ===")
    return result
