"""
공통 상수 정의
- 경로/파일명 + 수치 계산 기본값 모아두는 곳
- 수치 기본값은 configs/params.yaml 의 numerics 블록으로 덮어쓸 수 있음
"""

from pathlib import Path

# 레포 루트 기준
REPO_ROOT = Path(__file__).resolve().parents[2]

# 산출물/로그 디렉터리 (gitignore 대상)
DATA_DIR = REPO_ROOT / "data"
RUNS_DIR = DATA_DIR / "runs"

LOGS_DIR = REPO_ROOT / "logs"

# 설정 파일 경로
CONFIGS_DIR = REPO_ROOT / "configs"
PARAMS_YAML = CONFIGS_DIR / "params.yaml"
ENV_FILE = REPO_ROOT / ".env"

# 산출물 파일명
META_FILE = "meta.json"
CURVE_HEADER = ["sweep_axis", "sweep_value", "method", "value", "wall_ms"]

TOOL_NAME = "central-spin-sensing"
TOOL_VERSION = "0.3.0"
SCHEMA_VERSION = 1

# ──────────────────────────────────────────────────────────────────────────────
# 수치 허용오차 / 기본값
# ──────────────────────────────────────────────────────────────────────────────
NORM_TOL = 1e-12            # StateVector 정규화
HERMITIAN_TOL = 1e-14       # 빌드 시점 에르미트 검사 (엔트리 스케일 기준)
IMAG_DISCARD_TOL = 1e-9     # 기대값 허수부 잔차 상한
BLOCH_TOL = 1e-10           # |V| <= 1 + BLOCH_TOL
PURE_BRANCH_TOL = 1e-12     # 1-|V|^2 < 이 값이면 순수 상태 분기
QFI_CLIP_TOL = 1e-9         # 음수 QFI 잡음 클립 한계
DRIFT_TOL = 1e-10           # 전파 후 norm 드리프트 상한

# 저장 방식 / 용량 한계
SPARSE_MIN_N = 10           # FullProduct N >= 10 이면 sparse
DENSE_THRESHOLD = 4096      # eigen 경로 최대 차원 (N <= 11 FullProduct)
MAX_N_FULL = 18
MAX_N_COLLECTIVE = 512

# Chebyshev 전파
CHEBYSHEV_TOL = 1e-12
CHEBYSHEV_EXTRA_ORDERS = 10
CHEBYSHEV_MAX_ORDER = 20000
BOUNDS_MARGIN = 0.01

# 유한차분
FD_REL_STEP = 1e-4
FD_AGREEMENT = 1e-4

# 퇴화 고유값 판정 (||H|| 대비)
DEGENERACY_REL_TOL = 1e-12
