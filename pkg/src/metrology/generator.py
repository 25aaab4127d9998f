# src/metrology/generator.py
# 목적:
# - 변환된 국소 생성자 G = ∫₀ᵗ e^{iHs} H₁ e^{-iHs} ds  (H 고유기저에서 정확히)
# - G 를 {I_y, S_zI_z, S_zI_x} 에 Frobenius 사영 → (α, β, γ) + 직교 잔차
# - QFI = 4·Var(G)
#
# 고유기저 행렬원소:
#   G_mn = (H₁)_mn · (e^{iω t} - 1)/(iω),  ω = E_m - E_n
#   |ω| < 1e-12·‖H‖ 이면 퇴화 극한 t·(H₁)_mn

from __future__ import annotations
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from src.common import constants as C
from src.common.errors import CapacityError, DomainError
from src.common.logging import get_logger
from src.metrology.analytic import clip_qfi
from src.spin.hilbert import StateVector
from src.spin.operators import HermitianOperator, central_op, ring_op

logger = get_logger("metrology")


def _phase_kernel(omega: np.ndarray, t: float, scale: float) -> np.ndarray:
    # (e^{iωt}-1)/(iω) = t·e^{iωt/2}·sin(ωt/2)/(ωt/2)  (ω→0 에서도 안정)
    kernel = t * np.exp(0.5j * omega * t) * np.sinc(omega * t / (2.0 * np.pi))
    degenerate = np.abs(omega) < C.DEGENERACY_REL_TOL * scale
    return np.where(degenerate, t, kernel)


def generator_exact(H: HermitianOperator, H1: HermitianOperator, t: float,
                    dense_threshold: int = C.DENSE_THRESHOLD) -> HermitianOperator:
    if H.space != H1.space:
        raise DomainError("H 와 H₁ 의 공간이 다릅니다")
    if H.space.dim > dense_threshold:
        raise CapacityError(f"generator_exact 는 dense 경로 전용: dim={H.space.dim} > {dense_threshold} "
                            f"(N={H.space.n_ring})")
    energies, vecs = eigh(H.dense())
    scale = float(np.max(np.abs(energies))) if energies.size else 0.0
    h1_eig = vecs.conj().T @ H1.dense() @ vecs
    omega = energies[:, None] - energies[None, :]
    g = vecs @ (h1_eig * _phase_kernel(omega, float(t), scale)) @ vecs.conj().T
    g = 0.5 * (g + g.conj().T)
    logger.debug(f"generator_exact dim={H.space.dim} t={t} ‖H‖={scale:.4g}")
    return HermitianOperator(H.space, g, label=f"G(t={t:g})")


@dataclass(frozen=True)
class GeneratorDecomposition:
    alpha: float
    beta: float
    gamma: float
    residual_norm: float

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta, self.gamma], dtype=float)


def decompose_generator(G: HermitianOperator) -> GeneratorDecomposition:
    """세 기저는 서로 Frobenius 직교 → 계수 = Tr(B G)/Tr(B B)."""
    space = G.space
    s_z = central_op(space, "z")
    basis = (ring_op(space, "y"), s_z @ ring_op(space, "z"), s_z @ ring_op(space, "x"))
    coeffs = []
    residual = G
    for b in basis:
        c = (b.frobenius_inner(G) / b.frobenius_inner(b)).real
        coeffs.append(float(c))
        residual = residual - c * b
    return GeneratorDecomposition(coeffs[0], coeffs[1], coeffs[2], residual.norm())


def qfi_from_generator(G: HermitianOperator, probe: StateVector) -> float:
    if G.space != probe.space:
        raise DomainError("생성자와 probe 의 공간이 다릅니다")
    psi = probe.amplitudes
    g_psi = G.apply(psi)
    mean = complex(np.vdot(psi, g_psi))
    second = float(np.vdot(g_psi, g_psi).real)
    return clip_qfi(4.0 * (second - abs(mean) ** 2), scale=4.0 * second)
