# src/spin/operators.py
# 목적:
# - HermitianOperator (dense ndarray / scipy csr) 와 스핀-½ 연산자 조립
# - 모든 연산자는 σ_z = ½·diag(1,-1) 규약 (파울리 정규화 연산자는 노출하지 않음)
# - 사다리 연산자(I±, S±)는 같은 타입에 hermitian=False 로 표시

from __future__ import annotations
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
import scipy.sparse as sp

from src.common import constants as C
from src.common.errors import ConsistencyError, DomainError, UnsupportedBasisError
from src.spin.hilbert import BasisKind, HilbertSpace, StateVector

Matrix = Union[np.ndarray, sp.spmatrix]

# 스핀-½ 한 자리 행렬
_SPIN_HALF = {
    "x": np.array([[0.0, 0.5], [0.5, 0.0]], dtype=np.complex128),
    "y": np.array([[0.0, -0.5j], [0.5j, 0.0]], dtype=np.complex128),
    "z": np.array([[0.5, 0.0], [0.0, -0.5]], dtype=np.complex128),
    "+": np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128),
    "-": np.array([[0.0, 0.0], [1.0, 0.0]], dtype=np.complex128),
}
AXES = ("x", "y", "z")
LADDER = ("+", "-")


def _hermitian_defect(m: Matrix) -> float:
    if sp.issparse(m):
        diff = (m - m.conj().T).tocoo()
        return float(np.max(np.abs(diff.data))) if diff.nnz else 0.0
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def _entry_scale(m: Matrix) -> float:
    if sp.issparse(m):
        data = m.tocoo().data
        return max(1.0, float(np.max(np.abs(data)))) if data.size else 1.0
    return max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0


def _store(space: HilbertSpace, m: Matrix) -> Matrix:
    """공간 설정에 맞게 dense/sparse 저장 방식 결정."""
    if space.is_sparse:
        return sp.csr_matrix(m, dtype=np.complex128)
    if sp.issparse(m):
        return np.asarray(m.toarray(), dtype=np.complex128)
    return np.asarray(m, dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    space: HilbertSpace
    matrix: Matrix
    hermitian: bool = True
    label: str = ""

    def __post_init__(self):
        m = _store(self.space, self.matrix)
        if m.shape != (self.space.dim, self.space.dim):
            raise DomainError(f"행렬 shape {m.shape} != ({self.space.dim}, {self.space.dim})")
        if self.hermitian:
            defect = _hermitian_defect(m)
            if defect >= C.HERMITIAN_TOL * _entry_scale(m):
                raise ConsistencyError(f"에르미트 아님: max|O-O†|={defect:.3e} ({self.label})")
        if not sp.issparse(m):
            m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def wrap(cls, space: HilbertSpace, m: Matrix, label: str = "") -> "HermitianOperator":
        """산술 결과용: 에르미트 여부를 수치로 판정해서 플래그를 붙인다."""
        m = _store(space, m)
        hermitian = _hermitian_defect(m) < C.HERMITIAN_TOL * _entry_scale(m)
        return cls(space, m, hermitian=hermitian, label=label)

    # ── 표현 ──────────────────────────────────────────────────────────────────
    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else np.asarray(self.matrix)

    def csr(self) -> sp.csr_matrix:
        return self.matrix if self.is_sparse else sp.csr_matrix(self.matrix)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec

    def dagger(self) -> "HermitianOperator":
        return HermitianOperator(self.space, self.matrix.conj().T, hermitian=self.hermitian,
                                 label=f"({self.label})†")

    def trace(self) -> complex:
        return complex(self.matrix.diagonal().sum())

    def frobenius_inner(self, other: "HermitianOperator") -> complex:
        """Tr(self† other)"""
        self._check_space(other)
        if self.is_sparse or other.is_sparse:
            return complex(self.csr().conj().multiply(other.csr()).sum())
        return complex(np.vdot(self.dense(), other.dense()))

    def norm(self) -> float:
        """Frobenius norm"""
        return float(np.sqrt(abs(self.frobenius_inner(self))))

    # ── 산술 ──────────────────────────────────────────────────────────────────
    def _check_space(self, other: "HermitianOperator") -> None:
        if other.space != self.space:
            raise DomainError("서로 다른 공간의 연산자")

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._check_space(other)
        return HermitianOperator.wrap(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._check_space(other)
        return HermitianOperator.wrap(self.space, self.matrix - other.matrix)

    def __neg__(self) -> "HermitianOperator":
        return HermitianOperator(self.space, -self.matrix, hermitian=self.hermitian, label=f"-{self.label}")

    def __mul__(self, scalar: complex) -> "HermitianOperator":
        if isinstance(scalar, HermitianOperator):
            raise TypeError("연산자 곱은 @ 를 사용하세요")
        keep = self.hermitian and np.isreal(scalar)
        if keep:
            return HermitianOperator(self.space, self.matrix * float(np.real(scalar)), hermitian=True)
        return HermitianOperator.wrap(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "HermitianOperator":
        return self * (1.0 / scalar)

    def __matmul__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._check_space(other)
        return HermitianOperator.wrap(self.space, self.matrix @ other.matrix)

    def commutator(self, other: "HermitianOperator") -> "HermitianOperator":
        self._check_space(other)
        return HermitianOperator.wrap(self.space, self.matrix @ other.matrix - other.matrix @ self.matrix)


def identity(space: HilbertSpace) -> HermitianOperator:
    return HermitianOperator(space, sp.identity(space.dim, dtype=np.complex128, format="csr"), label="1")


# ──────────────────────────────────────────────────────────────────────────────
# 단일 사이트 / 집단 연산자
# ──────────────────────────────────────────────────────────────────────────────
def _check_axis(axis: str, allowed) -> None:
    if axis not in allowed:
        raise DomainError(f"지원하지 않는 축: {axis!r} (허용: {allowed})")


def _site_matrix(n_ring: int, site: int, axis: str) -> sp.csr_matrix:
    # 사이트 0 이 최상위 비트
    left = sp.identity(2 ** site, dtype=np.complex128, format="csr")
    right = sp.identity(2 ** (n_ring - site), dtype=np.complex128, format="csr")
    return sp.kron(sp.kron(left, sp.csr_matrix(_SPIN_HALF[axis])), right, format="csr")


def single_site_op(space: HilbertSpace, site: int, axis: str) -> HermitianOperator:
    """사이트 0 = 중심 스핀 σ₀, 사이트 1..N = 링 스핀 σ_i. 고유값 ±1/2."""
    if not space.is_full_product:
        raise UnsupportedBasisError("single_site_op 는 FullProduct 공간 전용입니다")
    if not (0 <= site <= space.n_ring):
        raise DomainError(f"site={site} 범위 밖 [0, {space.n_ring}]")
    _check_axis(axis, AXES)
    return HermitianOperator(space, _site_matrix(space.n_ring, site, axis), label=f"s{site}{axis}")


@lru_cache(maxsize=None)
def dicke_matrix(n_ring: int, axis: str) -> sp.csr_matrix:
    """최대 Dicke 섹터(I=N/2)의 링 연산자. 행/열 순서 M_z = I, I-1, ..., -I."""
    I = n_ring / 2.0
    m = I - np.arange(n_ring + 1)
    if axis == "z":
        return sp.diags(m.astype(np.complex128), format="csr")
    # I+|M> = sqrt(I(I+1) - M(M+1)) |M+1>, |M+1> 은 인덱스 하나 앞
    coeff = np.sqrt(I * (I + 1) - m[1:] * (m[1:] + 1)).astype(np.complex128)
    plus = sp.diags(coeff, 1, shape=(n_ring + 1, n_ring + 1), format="csr")
    minus = plus.T.tocsr()
    if axis == "+":
        return plus
    if axis == "-":
        return minus
    if axis == "x":
        return ((plus + minus) * 0.5).tocsr()
    if axis == "y":
        return ((plus - minus) * (-0.5j)).tocsr()
    raise DomainError(f"지원하지 않는 축: {axis!r}")


def _collective_matrix(space: HilbertSpace, axis: str, who: str) -> sp.csr_matrix:
    if space.kind == BasisKind.COLLECTIVE:
        if who == "ring":
            return sp.kron(sp.identity(2, dtype=np.complex128), dicke_matrix(space.n_ring, axis), format="csr")
        return sp.kron(sp.csr_matrix(_SPIN_HALF[axis]),
                       sp.identity(space.n_ring + 1, dtype=np.complex128), format="csr")
    if who == "central":
        return _site_matrix(space.n_ring, 0, axis)
    total = _site_matrix(space.n_ring, 1, axis)
    for site in range(2, space.n_ring + 1):
        total = total + _site_matrix(space.n_ring, site, axis)
    return total.tocsr()


def collective_op(space: HilbertSpace, axis: str, who: str = "ring") -> HermitianOperator:
    """
    who="ring"    → I_α = Σ_i σ_i^α
    who="central" → S_α = σ₀^α
    axis ∈ {x, y, z, +, -}; 사다리 축은 hermitian=False 로 표시된다.
    """
    _check_axis(axis, AXES + LADDER)
    if who not in ("ring", "central"):
        raise DomainError(f"who 는 ring/central 중 하나: {who!r}")
    name = ("I" if who == "ring" else "S") + axis
    return HermitianOperator(space, _collective_matrix(space, axis, who),
                             hermitian=axis in AXES, label=name)


def ring_op(space: HilbertSpace, axis: str) -> HermitianOperator:
    return collective_op(space, axis, "ring")


def central_op(space: HilbertSpace, axis: str) -> HermitianOperator:
    return collective_op(space, axis, "central")


def ring_casimir(space: HilbertSpace) -> HermitianOperator:
    """I² = I_x² + I_y² + I_z²"""
    ops = [ring_op(space, a) for a in AXES]
    total = ops[0] @ ops[0]
    for o in ops[1:]:
        total = total + o @ o
    return total


# ──────────────────────────────────────────────────────────────────────────────
# 기대값
# ──────────────────────────────────────────────────────────────────────────────
def expectation(op: HermitianOperator, psi: StateVector) -> float:
    if op.space != psi.space:
        raise DomainError("연산자와 상태의 공간이 다릅니다")
    if not op.hermitian:
        raise DomainError(f"사다리(비에르미트) 연산자의 기대값은 실수가 아닙니다: {op.label}")
    val = complex(np.vdot(psi.amplitudes, op.apply(psi.amplitudes)))
    if abs(val.imag) > C.IMAG_DISCARD_TOL:
        raise ConsistencyError(f"기대값 허수부 잔차 {val.imag:.3e} ({op.label})")
    return float(val.real)
