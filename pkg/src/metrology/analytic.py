# src/metrology/analytic.py
# 목적:
# - 닫힌 형태(closed form) 결과 모음
#   * 생성자 계수 (α, β, γ), 임의 시각 t
#   * 전역 QFI (곱 probe: 중심 +x ⊗ 링 |I, M_z=I>), 균일/비균일 결합
#   * 국소(중심 큐비트) QFI, 단일 큐비트 QFI, <σ₀^x(t₀)>
#   * 오차전파 공식, F_max 와 최적 probe 회전각
#   * 측정 시각 t₀, SQL 기준선
#
# 부호 규약: H = -h·H_field + (결합항), H₁ = ∂H/∂h
#   G = α I_y + β S_z I_z + γ S_z I_x,  Ω = √(A²/4 + h²)

from __future__ import annotations
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Tuple, Union

import numpy as np

from src.common import constants as C
from src.common.errors import ConsistencyError, DomainError, UnsupportedBasisError
from src.spin.hilbert import HilbertSpace, StateVector
from src.spin.states import BlochVector, collective_product_state, dicke_rotation


def precession_frequency(A: float, h: float) -> float:
    """Ω = √(A²/4 + h²)"""
    omega = float(np.hypot(0.5 * A, h))
    if omega == 0.0:
        raise DomainError("A 와 h 가 모두 0 이면 Ω=0 (정의되지 않음)")
    return omega


class SensingKind(str, Enum):
    LOCAL_EPF = "local_epf"      # t₀ = π/Ω
    GLOBAL_QFI = "global_qfi"    # t₀ = 2π/Ω


def sensing_time(A: float, h: float, kind: Union[SensingKind, str]) -> float:
    kind = SensingKind(kind)
    omega = precession_frequency(A, h)
    return (np.pi if kind == SensingKind.LOCAL_EPF else 2.0 * np.pi) / omega


def sql_reference(t: float, n_ring: int) -> float:
    """표준양자한계 기준선 t²(N+1)."""
    return float(t) ** 2 * (n_ring + 1)


# ──────────────────────────────────────────────────────────────────────────────
# 생성자 계수
# ──────────────────────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class GeneratorCoeffs:
    alpha: float    # I_y
    beta: float     # S_z I_z
    gamma: float    # S_z I_x
    omega: float
    t: float

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta, self.gamma], dtype=float)

    def spread(self) -> float:
        """√(4α² + β² + γ²): 중심 ↑/↓ 섹터 안에서 G 의 회전축 길이의 2배."""
        return float(np.sqrt(4.0 * self.alpha ** 2 + self.beta ** 2 + self.gamma ** 2))


def generator_coeffs_analytic(A: float, h: float, t: float) -> GeneratorCoeffs:
    omega = precession_frequency(A, h)
    wt = omega * t
    s = np.sin(wt) - wt
    alpha = -t - (A ** 2 / 4.0) * s / omega ** 3
    beta = -A * h * s / omega ** 3
    gamma = A * (np.cos(wt) - 1.0) / omega ** 2
    return GeneratorCoeffs(float(alpha), float(beta), float(gamma), omega, float(t))


def _per_spin_coeffs(couplings: Sequence[float], h: float, t: float) -> np.ndarray:
    return np.array([generator_coeffs_analytic(a_k, h, t).as_array() for a_k in couplings])


# ──────────────────────────────────────────────────────────────────────────────
# 전역 QFI
# ──────────────────────────────────────────────────────────────────────────────
def qfi_analytic(A: float, h: float, n_ring: int, t: float) -> float:
    """곱 probe(중심 +x, 링 |I, I>) 의 QFI = 2α²I + β²I² + γ²I/2."""
    if n_ring < 1:
        raise DomainError(f"N >= 1 이어야 합니다: {n_ring}")
    c = generator_coeffs_analytic(A, h, t)
    I = n_ring / 2.0
    return 2.0 * c.alpha ** 2 * I + c.beta ** 2 * I ** 2 + 0.5 * c.gamma ** 2 * I


def qfi_analytic_t0(A: float, h: float, n_ring: int) -> float:
    """t₀ = 2π/Ω 에서 γ=0: F = 2α₀²I + β₀²I² = α₀²N + (β₀²/4)N²."""
    return qfi_analytic(A, h, n_ring, sensing_time(A, h, SensingKind.GLOBAL_QFI))


def qfi_inhomogeneous_analytic(couplings: Sequence[float], h: float, t: float) -> float:
    """
    J=0, 결합 {A_k}: 링 스핀마다 독립 블록이므로
    F = Σα_k² + ¼Σγ_k² + ¼(Σβ_k)²  (probe: 중심 +x, 링 전부 ↑)
    """
    if len(couplings) == 0:
        raise DomainError("couplings 가 비어 있습니다")
    k = _per_spin_coeffs(couplings, h, t)
    return float(np.sum(k[:, 0] ** 2) + 0.25 * np.sum(k[:, 2] ** 2) + 0.25 * np.sum(k[:, 1]) ** 2)


# ──────────────────────────────────────────────────────────────────────────────
# 국소(중심 큐비트) QFI
# ──────────────────────────────────────────────────────────────────────────────
def local_qfi_analytic(A: float, h: float, n_ring: int) -> float:
    """t₀ = π/Ω, 링 x-편극 probe: F⁰ = 16A²N²/(A²+4h²)²."""
    denom = A ** 2 + 4.0 * h ** 2
    if denom == 0.0:
        raise DomainError("A 와 h 가 모두 0")
    return 16.0 * A ** 2 * n_ring ** 2 / denom ** 2


def local_qubit_qfi(v: Union[BlochVector, Sequence[float]], dv: Sequence[float]) -> float:
    """
    단일 큐비트 QFI:
      |V| < 1 : |∂V|² + (V·∂V)²/(1-|V|²)
      |V| = 1 : |∂V|²      (1-|V|² < 1e-12 이면 순수 상태로 본다)
    """
    vec = v.as_array() if isinstance(v, BlochVector) else BlochVector.of(v).as_array()
    d = np.asarray(dv, dtype=float).reshape(-1)
    if d.shape != (3,) or not np.all(np.isfinite(d)):
        raise DomainError(f"dv 는 유한한 3성분 벡터여야 합니다: {dv!r}")
    purity_gap = 1.0 - float(vec @ vec)
    value = float(d @ d)
    if purity_gap >= C.PURE_BRANCH_TOL:
        value += float(vec @ d) ** 2 / purity_gap
    return value


def sx_expectation_analytic(A: float, h: float, n_ring: int) -> Tuple[float, float]:
    """
    t₀ = π/Ω 에서 (<σ₀^x>, <σ₀^y>) = (½cos 2Nθ, ½sin 2Nθ),  θ = arctan(2h/A).
    링 스핀 수가 홀수이면 시뮬레이션 값은 전체 부호가 반대 (DESIGN.md 참고).
    """
    if A == 0.0:
        raise DomainError("A=0 이면 θ 가 정의되지 않습니다")
    theta = np.arctan(2.0 * h / A)
    return 0.5 * float(np.cos(2 * n_ring * theta)), 0.5 * float(np.sin(2 * n_ring * theta))


_RING_SPINORS = {
    "x": np.array([1.0, 1.0], dtype=np.complex128) / np.sqrt(2.0),
    "z": np.array([1.0, 0.0], dtype=np.complex128),
}
_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


def _branch_unitary(a_k: float, h: float, t: float, sign: float) -> np.ndarray:
    # 중심 ↑(sign=+1)/↓(sign=-1) 일 때 링 스핀 하나가 보는 해밀토니안 (Ω/2) n·P
    omega = precession_frequency(a_k, h)
    n = np.array([0.0, -h, sign * a_k / 2.0]) / omega
    npauli = sum(n[i] * _PAULI[i] for i in range(3))
    half = 0.5 * omega * t
    return np.cos(half) * np.eye(2) - 1j * np.sin(half) * npauli


def central_coherence_analytic(couplings: Sequence[float], h: float, t: float, ring: str = "x") -> complex:
    """
    J=0, 전자 Zeeman 없음: c(t) = Π_k <φ|U_k⁻(t)† U_k⁺(t)|φ>.
    <σ₀^x> = ½Re c,  <σ₀^y> = -½Im c  (중심 초기상태 +x).
    ring: 'x' (링 스핀 |+x>) | 'z' (링 스핀 |↑>)
    """
    if ring not in _RING_SPINORS:
        raise DomainError(f"ring 은 'x' 또는 'z': {ring!r}")
    phi = _RING_SPINORS[ring]
    c = 1.0 + 0.0j
    for a_k in couplings:
        up = _branch_unitary(a_k, h, t, +1.0)
        down = _branch_unitary(a_k, h, t, -1.0)
        c *= complex(np.vdot(down @ phi, up @ phi))
    return c


def sx_trajectory_analytic(couplings: Sequence[float], h: float, times: Sequence[float],
                           ring: str = "x") -> np.ndarray:
    return np.array([0.5 * central_coherence_analytic(couplings, h, t, ring).real for t in times])


# ──────────────────────────────────────────────────────────────────────────────
# 오차전파
# ──────────────────────────────────────────────────────────────────────────────
def error_propagation(mean: float, second_moment: float, slope: float) -> float:
    """Δh = √(<O²> - <O>²) / |∂_h<O>|.  slope=0 이면 +inf (발산 신호)."""
    var = second_moment - mean ** 2
    if var < 0.0:
        if var < -C.QFI_CLIP_TOL * max(1.0, abs(second_moment)):
            raise DomainError(f"second_moment < mean² ({second_moment} < {mean ** 2})")
        var = 0.0
    if slope == 0.0:
        return float("inf")
    return float(np.sqrt(var) / abs(slope))


# ──────────────────────────────────────────────────────────────────────────────
# F_max 와 최적 probe
# ──────────────────────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class OptimalProbeRecipe:
    """
    중심 ↑ 섹터에서 (|E_max> + |E_min>)/√2,
    |E_max/min> = e^{-iφI_z} e^{-iθI_y} |I, ±I>.
    """
    n_ring: int
    theta: float
    phi: float
    f_max: float

    def build(self, space: HilbertSpace) -> StateVector:
        if space.is_full_product:
            raise UnsupportedBasisError("최적 probe 는 CollectiveSector 에서만 구성합니다")
        if space.n_ring != self.n_ring:
            raise DomainError(f"N 불일치: recipe N={self.n_ring}, space N={space.n_ring}")
        rot = dicke_rotation(self.n_ring, self.theta, self.phi)
        ring = (rot[:, 0] + rot[:, -1]) / np.sqrt(2.0)
        return collective_product_state(space, (1.0, 0.0), ring)


def fmax_and_optimal_probe(coeffs: GeneratorCoeffs, n_ring: int) -> Tuple[float, OptimalProbeRecipe]:
    a, b, g = coeffs.alpha, coeffs.beta, coeffs.gamma
    if a == 0.0 and b == 0.0 and g == 0.0:
        raise DomainError("생성자 계수가 모두 0: F_max 정의 불가")
    if n_ring < 1:
        raise DomainError(f"N >= 1 이어야 합니다: {n_ring}")
    I = n_ring / 2.0
    f_max = coeffs.spread() ** 2 * I ** 2
    # 2인수 arctan: γ=0 → φ = π/2·sign(α)
    theta = float(np.arctan2(np.sqrt(4.0 * a ** 2 + g ** 2), b))
    phi = float(np.arctan2(2.0 * a, g))
    return f_max, OptimalProbeRecipe(n_ring, theta, phi, f_max)


def clip_qfi(value: float, scale: float = 1.0) -> float:
    """수치 잡음 수준의 음수 QFI 는 0 으로, 그보다 크면 내부 오류."""
    if value >= 0.0:
        return float(value)
    if value >= -C.QFI_CLIP_TOL * max(1.0, scale):
        return 0.0
    raise ConsistencyError(f"음수 QFI {value:.3e}")
