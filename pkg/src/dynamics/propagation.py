# src/dynamics/propagation.py
# 목적:
# - |ψ(t)> = e^{-iHt}|ψ₀> 계산
#   * eigen     : dense 고유분해 (오라클 경로, dim <= dense_threshold)
#   * chebyshev : sparse 행렬-벡터 곱만 쓰는 다항식 전개 (규모 경로)
# - Chebyshev 스케일링에 쓰는 스펙트럼 포함 구간(SpectralBounds)
#
# Chebyshev 규약:
#   H = c + a·Ĥ,  Ĥ 의 스펙트럼 ⊂ [-1, 1],  τ = a·t
#   e^{-iHt} = e^{-ict} Σ_k c_k T_k(Ĥ),  c_k = (2 - δ_k0)(-i)^k J_k(τ)
#   |J_k(τ)| < tol/10 이 되는 첫 k (k > |τ|) 에서 +10 차수까지 전개

from __future__ import annotations
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np
from scipy.linalg import eigh, eigvalsh
from scipy.special import jv

from src.common import constants as C
from src.common.errors import CapacityError, ConsistencyError, ConvergenceError, DomainError
from src.common.logging import get_logger
from src.spin.hilbert import StateVector
from src.spin.operators import HermitianOperator

logger = get_logger("dynamics")


class Method(str, Enum):
    EIGEN = "eigen"
    CHEBYSHEV = "chebyshev"


@dataclass(frozen=True)
class Propagation:
    method: Method
    t: float
    tol: float = C.CHEBYSHEV_TOL

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not np.isfinite(self.t):
            raise DomainError(f"t 가 유한하지 않습니다: {self.t}")
        if not (0.0 < self.tol <= 1e-6):
            raise DomainError(f"tol 은 (0, 1e-6] 범위: {self.tol}")


@dataclass(frozen=True)
class SpectralBounds:
    e_min: float
    e_max: float

    def __post_init__(self):
        if not self.e_min <= self.e_max:
            raise DomainError(f"e_min({self.e_min}) > e_max({self.e_max})")

    @property
    def center(self) -> float:
        return 0.5 * (self.e_max + self.e_min)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.e_max - self.e_min)

    def union(self, other: "SpectralBounds") -> "SpectralBounds":
        return SpectralBounds(min(self.e_min, other.e_min), max(self.e_max, other.e_max))

    def widened(self, margin: float) -> "SpectralBounds":
        half = self.half_width
        if half > 0:
            half *= 1.0 + margin
        else:
            half = margin * max(1.0, abs(self.center))
        return SpectralBounds(self.center - half, self.center + half)


def gershgorin_bounds(H: HermitianOperator) -> SpectralBounds:
    """Gershgorin 원판으로 얻는 엄밀한 포함 구간 (여유폭 적용 전)."""
    m = H.csr()
    diag = m.diagonal()
    radius = np.asarray(abs(m).sum(axis=1)).ravel() - np.abs(diag)
    centers = diag.real
    return SpectralBounds(float(np.min(centers - radius)), float(np.max(centers + radius)))


def spectral_bounds(H: HermitianOperator, margin: float = C.BOUNDS_MARGIN) -> SpectralBounds:
    """sparse → Gershgorin, dense → 정확한 극값 고유치. 둘 다 margin 만큼 넓힌다."""
    if H.is_sparse:
        raw = gershgorin_bounds(H)
    else:
        w = eigvalsh(H.dense())
        raw = SpectralBounds(float(w[0]), float(w[-1]))
    return raw.widened(margin)


def chebyshev_coefficients(tau: float, tol: float = C.CHEBYSHEV_TOL,
                           max_order: int = C.CHEBYSHEV_MAX_ORDER) -> np.ndarray:
    # J_k(-τ) = (-1)^k J_k(τ)
    sign = -1.0 if tau < 0 else 1.0
    limit = min(max_order, int(abs(tau)) + 64)
    while True:
        ks = np.arange(limit + 1)
        bessel = jv(ks, abs(tau)) * sign ** ks
        below = np.nonzero((np.abs(bessel) < tol / 10.0) & (ks > abs(tau)))[0]
        if below.size:
            order = int(below[0]) + C.CHEBYSHEV_EXTRA_ORDERS
            if order <= limit:
                break
            if order <= max_order:
                limit = order
                continue
        if limit >= max_order:
            raise ConvergenceError(f"Chebyshev 전개가 max_order={max_order} 안에서 수렴하지 않습니다 (τ={tau:.3g})")
        limit = min(max_order, 2 * limit)

    ks = np.arange(order + 1)
    coeffs = 2.0 * (-1j) ** ks * bessel[: order + 1]
    coeffs[0] *= 0.5
    if abs(coeffs[-1]) >= tol:
        raise ConvergenceError(f"Chebyshev 꼬리 계수 |c_{order}|={abs(coeffs[-1]):.2e} >= tol")
    return coeffs


def choose_method(H: HermitianOperator, dense_threshold: int = C.DENSE_THRESHOLD) -> Method:
    """dense 저장이면 eigen, sparse 저장이면 chebyshev."""
    if not H.is_sparse and H.space.dim <= dense_threshold:
        return Method.EIGEN
    return Method.CHEBYSHEV


@dataclass
class Propagator:
    """
    H 하나에 대한 재사용 가능한 전파기.
    eigen 은 고유분해를, chebyshev 는 스케일된 연산자와 포함 구간을 캐시한다.
    """
    H: HermitianOperator
    method: Method = Method.EIGEN
    tol: float = C.CHEBYSHEV_TOL
    bounds: Optional[SpectralBounds] = None
    dense_threshold: int = C.DENSE_THRESHOLD
    max_order: int = C.CHEBYSHEV_MAX_ORDER
    orders: List[int] = field(default_factory=list)

    def __post_init__(self):
        self.method = Method(self.method)
        self._eig = None
        if self.method == Method.EIGEN:
            if self.H.space.dim > self.dense_threshold:
                raise CapacityError(f"eigen 경로 dim={self.H.space.dim} > dense_threshold={self.dense_threshold} "
                                    f"(N={self.H.space.n_ring})")
            self._eig = eigh(self.H.dense())
        else:
            if self.bounds is None:
                self.bounds = spectral_bounds(self.H)
            self._csr = self.H.csr()

    # ── 내부 ────────────────────────────────────────────────────────────────
    def _eigen_block(self, block: np.ndarray, t: float) -> np.ndarray:
        energies, vecs = self._eig
        phases = np.exp(-1j * energies * t)
        coeff = vecs.conj().T @ block
        return vecs @ (phases.reshape((-1,) + (1,) * (block.ndim - 1)) * coeff)

    def _chebyshev_block(self, block: np.ndarray, t: float) -> np.ndarray:
        c, a = self.bounds.center, self.bounds.half_width
        if a <= 0:
            return np.exp(-1j * c * t) * block
        coeffs = chebyshev_coefficients(a * t, self.tol, self.max_order)
        self.orders.append(len(coeffs) - 1)

        def scaled(x):
            return (self._csr @ x - c * x) / a

        phi0 = block
        out = coeffs[0] * phi0
        if len(coeffs) > 1:
            phi1 = scaled(phi0)
            out = out + coeffs[1] * phi1
            for ck in coeffs[2:]:
                phi2 = 2.0 * scaled(phi1) - phi0
                out = out + ck * phi2
                phi0, phi1 = phi1, phi2
        return np.exp(-1j * c * t) * out

    # ── 공개 ────────────────────────────────────────────────────────────────
    def evolve_array(self, block: np.ndarray, t: float) -> np.ndarray:
        if t == 0.0:
            return np.array(block, dtype=np.complex128, copy=True)
        if self.method == Method.EIGEN:
            return self._eigen_block(block, t)
        return self._chebyshev_block(block, t)

    def evolve(self, psi: StateVector, t: float) -> StateVector:
        if psi.space != self.H.space:
            raise DomainError("상태와 해밀토니안의 공간이 다릅니다")
        out = self.evolve_array(psi.amplitudes, t)
        return checked_state(psi, out)


def checked_state(psi: StateVector, out: np.ndarray) -> StateVector:
    norm = float(np.linalg.norm(out))
    if abs(norm - 1.0) > C.DRIFT_TOL:
        raise ConsistencyError(f"전파 후 norm 드리프트 |ψ|-1 = {norm - 1.0:.2e}")
    return StateVector(psi.space, out / norm)


def evolve(H: HermitianOperator, psi0: StateVector, prop: Propagation,
           bounds: Optional[SpectralBounds] = None,
           dense_threshold: int = C.DENSE_THRESHOLD) -> StateVector:
    if abs(psi0.norm() - 1.0) > C.NORM_TOL:
        raise DomainError("psi0 가 정규화되어 있지 않습니다")
    propagator = Propagator(H, prop.method, tol=prop.tol, bounds=bounds, dense_threshold=dense_threshold)
    out = propagator.evolve(psi0, prop.t)
    if propagator.orders:
        logger.debug(f"chebyshev t={prop.t} order={propagator.orders[-1]} bounds={propagator.bounds}")
    return out
