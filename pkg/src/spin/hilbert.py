# src/spin/hilbert.py
# 목적:
# - 상태공간 기술자(HilbertSpace)와 정규화된 상태벡터(StateVector)
#
# 기저 순서(고정):
#   FullProduct      : 중심 스핀이 최상위 비트, 링 사이트 1 다음, 사이트 N 이 최하위 비트.
#                      비트 0 = ↑, 1 = ↓
#   CollectiveSector : index = c*(N+1) + (I - M_z),  c=0(↑)/1(↓),  M_z = I, I-1, ..., -I

from __future__ import annotations
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

import numpy as np

from src.common import constants as C
from src.common.errors import CapacityError, DomainError


class BasisKind(str, Enum):
    FULL_PRODUCT = "full_product"
    COLLECTIVE = "collective"


@dataclass(frozen=True)
class HilbertSpace:
    kind: BasisKind
    n_ring: int
    sparse_min_n: int = C.SPARSE_MIN_N

    def __post_init__(self):
        if int(self.n_ring) != self.n_ring or self.n_ring < 1:
            raise DomainError(f"n_ring 은 양의 정수여야 합니다: {self.n_ring}")

    @classmethod
    def full_product(cls, n_ring: int, max_n: int = C.MAX_N_FULL,
                     sparse_min_n: int = C.SPARSE_MIN_N) -> "HilbertSpace":
        if n_ring > max_n:
            raise CapacityError(f"FullProduct N={n_ring} 은 한계 N<={max_n} 를 넘습니다")
        return cls(BasisKind.FULL_PRODUCT, n_ring, sparse_min_n)

    @classmethod
    def collective(cls, n_ring: int, max_n: int = C.MAX_N_COLLECTIVE) -> "HilbertSpace":
        if n_ring > max_n:
            raise CapacityError(f"CollectiveSector N={n_ring} 은 한계 N<={max_n} 를 넘습니다")
        return cls(BasisKind.COLLECTIVE, n_ring)

    @property
    def is_full_product(self) -> bool:
        return self.kind == BasisKind.FULL_PRODUCT

    @property
    def ring_dim(self) -> int:
        return 2 ** self.n_ring if self.is_full_product else self.n_ring + 1

    @property
    def dim(self) -> int:
        return 2 * self.ring_dim

    @property
    def total_spin(self) -> float:
        """I = N/2"""
        return self.n_ring / 2.0

    @property
    def is_sparse(self) -> bool:
        return self.is_full_product and self.n_ring >= self.sparse_min_n

    def collective_labels(self) -> List[Tuple[str, float]]:
        """CollectiveSector 기저 라벨 (central, M_z) 를 인덱스 순서대로."""
        if self.is_full_product:
            raise DomainError("collective_labels 는 CollectiveSector 전용")
        I = self.total_spin
        return [(c, I - k) for c in ("up", "down") for k in range(self.n_ring + 1)]


@dataclass(frozen=True, eq=False)
class StateVector:
    space: HilbertSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != self.space.dim:
            raise DomainError(f"amplitude 길이 {amps.shape[0]} != dim {self.space.dim}")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > C.NORM_TOL:
            raise DomainError(f"정규화되지 않은 상태: |psi|={norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, space: HilbertSpace, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0.0 or not np.isfinite(norm):
            raise DomainError("영벡터/비유한 amplitude 는 정규화할 수 없습니다")
        return cls(space, amps / norm)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>"""
        if other.space != self.space:
            raise DomainError("서로 다른 공간의 상태")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def central_blocks(self) -> np.ndarray:
        """(2, ring_dim) 형태. 행 0 = 중심 ↑ 성분, 행 1 = 중심 ↓ 성분."""
        return self.amplitudes.reshape(2, self.space.ring_dim)
