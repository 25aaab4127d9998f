# src/models/hamiltonians.py
# 목적:
# - ModelSpec → 해밀토니안 H, 그리고 H₁ = ∂H/∂h
#
#   IsingRingCentral   : -J Σ σ_i^x σ_{i+1}^x - h I_y + A S_z I_z      (σ_{N+1} ≡ σ_1)
#   CollectiveNoZeeman : -h I_y + A S_z I_z
#   ZZXX               : -h (S_y + I_y) + A S_z I_z
#   XXZCollective      : -h (S_a + I_a) + (Δ/2)(S⁺I⁻ + S⁻I⁺) + A S_z I_z,  a ∈ {y, z}
#   InhomogeneousZZ    : -h I_y + S_z Σ_k A_k σ_k^z

from __future__ import annotations
from typing import Optional

from src.common.config import Numerics
from src.common.errors import DomainError, UnsupportedBasisError
from src.common.logging import get_logger
from src.models.spec import ModelSpec, Variant, ZEEMAN_VARIANTS
from src.spin.hilbert import HilbertSpace
from src.spin.operators import HermitianOperator, central_op, ring_op, single_site_op

logger = get_logger("models")


def _check_space(spec: ModelSpec, space: HilbertSpace) -> None:
    if spec.n_ring != space.n_ring:
        raise DomainError(f"N 불일치: spec N={spec.n_ring}, space N={space.n_ring}")
    if not space.is_full_product and not spec.supports_collective:
        raise UnsupportedBasisError(f"{spec.variant.value} 는 FullProduct 공간이 필요합니다")


def default_space(spec: ModelSpec, basis: str = "auto", numerics: Optional[Numerics] = None) -> HilbertSpace:
    """basis: auto | full_product | collective. auto 는 집단 변형이면 CollectiveSector."""
    num = numerics or Numerics()
    if basis == "collective" or (basis == "auto" and spec.supports_collective):
        if not spec.supports_collective:
            raise UnsupportedBasisError(f"{spec.variant.value} 는 CollectiveSector 를 지원하지 않습니다")
        return HilbertSpace.collective(spec.n_ring, max_n=num.max_n_collective)
    if basis in ("auto", "full_product"):
        return HilbertSpace.full_product(spec.n_ring, max_n=num.max_n_full, sparse_min_n=num.sparse_min_n)
    raise DomainError(f"알 수 없는 basis: {basis!r}")


def _hyperfine_zz(spec: ModelSpec, space: HilbertSpace) -> HermitianOperator:
    s_z = central_op(space, "z")
    if spec.variant == Variant.INHOMOGENEOUS_ZZ:
        total = None
        for k, a_k in enumerate(spec.couplings, start=1):
            term = a_k * (s_z @ single_site_op(space, k, "z"))
            total = term if total is None else total + term
        return total
    return spec.A * (s_z @ ring_op(space, "z"))


def _ising_bonds(space: HilbertSpace) -> HermitianOperator:
    # 주기 경계: i = 1..N, 짝은 i % N + 1
    n = space.n_ring
    total = None
    for i in range(1, n + 1):
        bond = single_site_op(space, i, "x") @ single_site_op(space, i % n + 1, "x")
        total = bond if total is None else total + bond
    return total


def field_derivative(spec: ModelSpec, space: HilbertSpace) -> HermitianOperator:
    """H₁ = ∂H/∂h (h 에 무관)."""
    _check_space(spec, space)
    axis = spec.field_axis
    if spec.variant in ZEEMAN_VARIANTS:
        h1 = -(central_op(space, axis) + ring_op(space, axis))
    else:
        h1 = -ring_op(space, "y")
    return HermitianOperator(space, h1.matrix, label=f"dH/dh[{spec.variant.value}]")


def build_hamiltonian(spec: ModelSpec, space: HilbertSpace) -> HermitianOperator:
    _check_space(spec, space)
    v = spec.variant

    H = spec.h * field_derivative(spec, space) + _hyperfine_zz(spec, space)

    if v == Variant.ISING_RING_CENTRAL and spec.J != 0.0:
        H = H - spec.J * _ising_bonds(space)

    if v == Variant.XXZ_COLLECTIVE and spec.delta != 0.0:
        flip = central_op(space, "+") @ ring_op(space, "-") + central_op(space, "-") @ ring_op(space, "+")
        H = H + (spec.delta / 2.0) * flip

    logger.debug(f"H built: {v.value} N={spec.n_ring} h={spec.h} basis={space.kind.value} "
                 f"dim={space.dim} sparse={space.is_sparse}")
    return HermitianOperator(space, H.matrix, label=f"H[{v.value}]")
