# src/experiments/cli.py
# 목적: 명령행 진입점
#
# 실행:
#   python -m scripts.central_spin preset fig1b --out data/runs/fig1b [--threads 4]
#   python -m scripts.central_spin run --config my_run.json --out data/runs/my_run [--seed 7] [--threads 4]
#   python -m scripts.central_spin fit --input data/runs/fig1b/fig1b_J0.csv --form quad
#   python -m scripts.central_spin --version
#
# 종료 코드: 0 성공, 2 설정 오류, 3 용량 초과, 4 수치 수렴 실패
#           (스윕 중 점 단위 실패는 파일을 다 쓴 뒤 가장 심각한 것으로)

from __future__ import annotations
import argparse
import json
from pathlib import Path
from typing import List, Optional

from src.common import constants as C
from src.common.config import load_config
from src.common.errors import EXIT_OK, CentralSpinError, exit_code_for
from src.common.logging import setup_logger
from src.experiments.config import load_run_config
from src.experiments.curves import read_curve
from src.experiments.fitting import fit_scaling
from src.experiments.presets import PRESETS, run_preset
from src.experiments.runner import run_config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="central_spin",
                                     description="central-spin dynamic sensing: QFI sweeps, presets, fits")
    parser.add_argument("--version", action="version",
                        version=f"{C.TOOL_NAME} {C.TOOL_VERSION} (schema {C.SCHEMA_VERSION})")
    parser.add_argument("--log-level", default=None, help="DEBUG | INFO | WARNING (기본: .env/params.yaml)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preset", help="그림 재현 프리셋 실행")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)

    r = sub.add_parser("run", help="JSON 설정 하나 실행")
    r.add_argument("--config", required=True, type=Path)
    r.add_argument("--out", type=Path, default=None)
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--threads", type=int, default=None)

    f = sub.add_parser("fit", help="곡선 CSV 스케일링 적합")
    f.add_argument("--input", required=True, type=Path)
    f.add_argument("--form", required=True, choices=["power_law", "quad", "linear_plus_quadratic"])
    f.add_argument("--method", default=None, help="적합할 method 열 (기본: 첫 method)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        app = load_config()
    except CentralSpinError as e:
        setup_logger("central_spin").error(f"설정 로드 실패: {e}")
        return exit_code_for(e.kind)
    logger = setup_logger("central_spin", args.log_level or app.log_level)
    logger.debug(f"ENV={app.env} numerics={app.numerics}")

    try:
        if args.command == "preset":
            threads = args.threads or app.numerics.threads
            result = run_preset(args.name, args.out, threads=threads, seed=args.seed, numerics=app.numerics)
            return result.exit_code

        if args.command == "run":
            cfg = load_run_config(args.config).with_overrides(seed=args.seed, threads=args.threads)
            result = run_config(cfg, out_dir=args.out, numerics=app.numerics)
            return result.exit_code

        if args.command == "fit":
            report = fit_scaling(read_curve(args.input), args.form, method=args.method)
            print(json.dumps(report.as_dict(), indent=2, ensure_ascii=False))
            return EXIT_OK
    except CentralSpinError as e:
        logger.error(f"{args.command} 실패 [{e.kind}]: {e}")
        return exit_code_for(e.kind)
    return EXIT_OK
