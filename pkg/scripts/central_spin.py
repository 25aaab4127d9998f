# scripts/central_spin.py
# 최소 엔트리포인트: src.experiments.cli 로 위임
#
# 실행:
#   python -m scripts.central_spin preset fig1b --out data/runs/fig1b

import sys

from src.experiments.cli import main

if __name__ == "__main__":
    sys.exit(main())
