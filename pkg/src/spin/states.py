# src/spin/states.py
# 목적:
# - probe 상태 생성 (중심 +x ⊗ 링 x-편극 / 링 z-최대 / 임의 amplitude)
# - 중심 큐비트 부분대각합 → Bloch 벡터
# - Dicke 섹터 회전 e^{-iφI_z} e^{-iθI_y}

from __future__ import annotations
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from src.common import constants as C
from src.common.errors import DomainError
from src.spin.hilbert import HilbertSpace, StateVector
from src.spin.operators import dicke_matrix


class ProbeKind(str, Enum):
    RING_X_POLARIZED = "ring_x_polarized"    # 중심 (↑+↓)/√2, 링 전부 |+x>
    RING_Z_STRETCHED = "ring_z_stretched"    # 중심 (↑+↓)/√2, 링 |I, M_z=I>
    CUSTOM = "custom"


@dataclass(frozen=True)
class BlochVector:
    """V = (2<σ₀^x>, 2<σ₀^y>, 2<σ₀^z>)"""
    x: float
    y: float
    z: float

    def __post_init__(self):
        if self.length() > 1.0 + C.BLOCH_TOL:
            raise DomainError(f"|V|={self.length()!r} > 1")

    @classmethod
    def of(cls, v: Sequence[float]) -> "BlochVector":
        return cls(float(v[0]), float(v[1]), float(v[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def length(self) -> float:
        return float(np.sqrt(self.x ** 2 + self.y ** 2 + self.z ** 2))


def reduce_to_central_bloch(psi: StateVector) -> BlochVector:
    # 두 기저 모두 중심 스핀이 최상위 → (2, ring_dim) reshape 후 링 자유도 합
    blocks = psi.central_blocks()
    rho = blocks @ blocks.conj().T
    r01 = rho[0, 1]
    return BlochVector(
        x=float(2.0 * r01.real),
        y=float(-2.0 * r01.imag),
        z=float((rho[0, 0] - rho[1, 1]).real),
    )


def x_polarized_dicke(n_ring: int) -> np.ndarray:
    """e^{-iπ/2·I_y}|I, M_z=I> = |I, M_x=I>. 성분 √C(N,k)/2^{N/2}, k = I - M_z."""
    k = np.arange(n_ring + 1)
    ln_amp = 0.5 * (gammaln(n_ring + 1) - gammaln(k + 1) - gammaln(n_ring - k + 1)) \
        - 0.5 * n_ring * np.log(2.0)
    return np.exp(ln_amp).astype(np.complex128)


def dicke_rotation(n_ring: int, theta: float, phi: float) -> np.ndarray:
    """e^{-iφ I_z} e^{-iθ I_y} 의 (N+1)x(N+1) 행렬."""
    jy = dicke_matrix(n_ring, "y").toarray()
    jz = dicke_matrix(n_ring, "z").diagonal()
    return np.exp(-1j * phi * jz)[:, None] * expm(-1j * theta * jy)


def _central_plus() -> np.ndarray:
    return np.array([1.0, 1.0], dtype=np.complex128) / np.sqrt(2.0)


def probe_state(space: HilbertSpace, kind, amplitudes: Optional[Sequence[complex]] = None) -> StateVector:
    kind = ProbeKind(kind)

    if kind == ProbeKind.CUSTOM:
        if amplitudes is None:
            raise DomainError("custom probe 에는 amplitudes 가 필요합니다")
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != space.dim:
            raise DomainError(f"amplitudes 길이 {amps.shape[0]} != dim {space.dim}")
        return StateVector.normalized(space, amps)

    if space.is_full_product:
        ring = np.zeros(space.ring_dim, dtype=np.complex128)
        if kind == ProbeKind.RING_X_POLARIZED:
            ring[:] = 1.0 / np.sqrt(space.ring_dim)
        else:
            ring[0] = 1.0   # |↑↑...↑>
    else:
        if kind == ProbeKind.RING_X_POLARIZED:
            ring = x_polarized_dicke(space.n_ring)
        else:
            ring = np.zeros(space.ring_dim, dtype=np.complex128)
            ring[0] = 1.0   # M_z = I
    return StateVector.normalized(space, np.kron(_central_plus(), ring))


def collective_product_state(space: HilbertSpace, central: Tuple[complex, complex],
                             ring: np.ndarray) -> StateVector:
    """중심 2성분 ⊗ Dicke 섹터 (N+1)성분 → CollectiveSector 상태."""
    if space.is_full_product:
        raise DomainError("CollectiveSector 공간이 필요합니다")
    return StateVector.normalized(space, np.kron(np.asarray(central, dtype=np.complex128), ring))
