# src/models/spec.py
# 목적:
# - 다섯 가지 중심-스핀 해밀토니안의 태그드 유니온(ModelSpec)
# - 비균일 결합 프로파일(CouplingProfile)과 결합 상수 샘플링

from __future__ import annotations
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from src.common.errors import DomainError


class Variant(str, Enum):
    ISING_RING_CENTRAL = "IsingRingCentral"
    COLLECTIVE_NO_ZEEMAN = "CollectiveNoZeeman"
    ZZXX = "ZZXX"
    XXZ_COLLECTIVE = "XXZCollective"
    INHOMOGENEOUS_ZZ = "InhomogeneousZZ"


# 집단 연산자만으로 쓰이는 변형 (CollectiveSector 허용)
COLLECTIVE_VARIANTS = frozenset({Variant.COLLECTIVE_NO_ZEEMAN, Variant.ZZXX, Variant.XXZ_COLLECTIVE})
# 전자 Zeeman 항 포함 (∂H/∂h = -(S_a + I_a))
ZEEMAN_VARIANTS = frozenset({Variant.ZZXX, Variant.XXZ_COLLECTIVE})


@dataclass(frozen=True)
class ModelSpec:
    variant: Variant
    n_ring: int
    h: float = 1.0
    A: float = 1.0
    J: float = 0.0
    delta: float = 0.0
    couplings: Optional[Tuple[float, ...]] = None
    field_axis: str = "y"

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if int(self.n_ring) != self.n_ring or self.n_ring < 1:
            raise DomainError(f"n_ring 은 양의 정수: {self.n_ring}")
        for name in ("h", "A", "J", "delta"):
            if not np.isfinite(getattr(self, name)):
                raise DomainError(f"{name} 가 유한하지 않습니다")

        v = self.variant
        if self.J != 0.0 and v != Variant.ISING_RING_CENTRAL:
            raise DomainError(f"J 는 IsingRingCentral 전용 ({v.value})")
        if v == Variant.ISING_RING_CENTRAL and self.J != 0.0 and self.n_ring < 2:
            raise DomainError("J != 0 인 Ising 링은 N >= 2 가 필요합니다 (N=1 자기결합 거부)")
        if self.delta != 0.0 and v != Variant.XXZ_COLLECTIVE:
            raise DomainError(f"Δ 는 XXZCollective 전용 ({v.value})")
        if self.field_axis not in ("y", "z"):
            raise DomainError(f"field_axis 는 y/z: {self.field_axis!r}")
        if self.field_axis == "z" and v != Variant.XXZ_COLLECTIVE:
            raise DomainError("z 축 자기장은 XXZCollective 에서만 허용")

        if v == Variant.INHOMOGENEOUS_ZZ:
            if self.couplings is None:
                raise DomainError("InhomogeneousZZ 는 couplings 가 필요합니다")
            cs = tuple(float(c) for c in self.couplings)
            if len(cs) != self.n_ring:
                raise DomainError(f"couplings 길이 {len(cs)} != N={self.n_ring}")
            if not all(np.isfinite(cs)):
                raise DomainError("couplings 에 비유한 값")
            object.__setattr__(self, "couplings", cs)
        elif self.couplings is not None:
            raise DomainError(f"couplings 는 InhomogeneousZZ 전용 ({v.value})")

    # ── 편의 생성자 ──────────────────────────────────────────────────────────
    @classmethod
    def ising_ring(cls, n_ring: int, J: float, h: float = 1.0, A: float = 1.0) -> "ModelSpec":
        return cls(Variant.ISING_RING_CENTRAL, n_ring, h=h, A=A, J=J)

    @classmethod
    def no_zeeman(cls, n_ring: int, h: float = 1.0, A: float = 1.0) -> "ModelSpec":
        return cls(Variant.COLLECTIVE_NO_ZEEMAN, n_ring, h=h, A=A)

    @classmethod
    def zzxx(cls, n_ring: int, h: float = 1.0, A: float = 1.0) -> "ModelSpec":
        return cls(Variant.ZZXX, n_ring, h=h, A=A)

    @classmethod
    def xxz(cls, n_ring: int, delta: float, h: float = 1.0, A: float = 1.0,
            field_axis: str = "y") -> "ModelSpec":
        return cls(Variant.XXZ_COLLECTIVE, n_ring, h=h, A=A, delta=delta, field_axis=field_axis)

    @classmethod
    def inhomogeneous(cls, couplings: Sequence[float], h: float = 1.0) -> "ModelSpec":
        cs = tuple(float(c) for c in couplings)
        return cls(Variant.INHOMOGENEOUS_ZZ, len(cs), h=h, A=float(np.mean(cs)), couplings=cs)

    # ── 파생 값 ──────────────────────────────────────────────────────────────
    def with_h(self, h: float) -> "ModelSpec":
        return replace(self, h=float(h))

    @property
    def supports_collective(self) -> bool:
        return self.variant in COLLECTIVE_VARIANTS

    @property
    def mean_coupling(self) -> float:
        if self.couplings is not None:
            return float(np.mean(self.couplings))
        return float(self.A)

    def coupling_list(self) -> Tuple[float, ...]:
        return self.couplings if self.couplings is not None else (float(self.A),) * self.n_ring


# ──────────────────────────────────────────────────────────────────────────────
# 결합 프로파일
# ──────────────────────────────────────────────────────────────────────────────
class ProfileKind(str, Enum):
    CONSTANT = "constant"
    UNIFORM_WINDOW = "uniform_window"
    GAUSSIAN_ENVELOPE = "gaussian_envelope"


@dataclass(frozen=True)
class CouplingProfile:
    kind: ProfileKind = ProfileKind.GAUSSIAN_ENVELOPE
    spread: float = 0.5     # uniform_window: A_k ∝ 1 + spread·U(-1, 1)
    width: float = 0.5      # gaussian_envelope: σ = width·N (사이트 간격 1)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", ProfileKind(self.kind))
        if self.width <= 0:
            raise DomainError(f"width 는 양수: {self.width}")
        if self.spread < 0:
            raise DomainError(f"spread 는 0 이상: {self.spread}")


def sample_couplings(profile: CouplingProfile, N: int, mean: float) -> Tuple[float, ...]:
    """길이 N, 시드 재현 가능, 산술평균 = mean (사후 정규화)."""
    if not (mean > 0) or not np.isfinite(mean):
        raise DomainError(f"mean 은 양수: {mean}")
    if N < 1:
        raise DomainError(f"N 은 1 이상: {N}")

    if profile.kind == ProfileKind.CONSTANT:
        return (float(mean),) * N

    if profile.kind == ProfileKind.UNIFORM_WINDOW:
        rng = np.random.default_rng(profile.seed)
        raw = 1.0 + profile.spread * rng.uniform(-1.0, 1.0, size=N)
    else:
        # 전자 밀도 |φ(x_k)|² 모양의 부드러운 포락선, 링 중앙이 최대
        x = np.arange(N) - (N - 1) / 2.0
        sigma = profile.width * N
        raw = np.exp(-x ** 2 / (2.0 * sigma ** 2))

    if np.any(raw <= 0):
        raise DomainError(f"spread={profile.spread} 가 양수가 아닌 결합을 만듭니다")
    out = raw * (mean / raw.mean())
    return tuple(float(a) for a in out)
