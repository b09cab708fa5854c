"""SU(3) factorisation g = diag(1, A₁) · M(λ, α) · diag(1, A₂).

M(λ, α) = [[λ²cos α, −sin α, 0], [sin α, λ̄²cos α, 0], [0, 0, 1]] with
α ∈ [0, π/2] and Arg λ ∈ (−π/2, π/2].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike
from scipy.stats import unitary_group

from .errors import LieAlgebraError
from .linalg import CMatrix, is_special_unitary

SU3_TOLERANCE = 1e-10

# below this sin α the first row and column carry no information about A₁, A₂
_AXIS_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Su3Factors:
    A1: CMatrix
    A2: CMatrix
    mu: complex
    theta: float

    def to_dict(self) -> dict[str, Any]:
        return {"A1": self.A1, "A2": self.A2, "mu": self.mu, "theta": self.theta}


def middle_factor(mu: complex, theta: float) -> CMatrix:
    lam2 = complex(mu) ** 2
    c, s = np.cos(theta), np.sin(theta)
    return np.array(
        [[lam2 * c, -s, 0], [s, np.conj(lam2) * c, 0], [0, 0, 1]], dtype=np.complex128
    )


def _embed(block: CMatrix) -> CMatrix:
    out = np.eye(3, dtype=np.complex128)
    out[1:, 1:] = block
    return out


def recompose_su3(factors: Su3Factors) -> CMatrix:
    """diag(1, A₁) · M(λ, α) · diag(1, A₂)."""
    return _embed(factors.A1) @ middle_factor(factors.mu, factors.theta) @ _embed(factors.A2)


def decompose_su3(g: ArrayLike, tol: float = SU3_TOLERANCE) -> Su3Factors:
    """Factor a special-unitary 3×3 matrix.

    cos α = |g₀₀| and λ² = g₀₀/|g₀₀|; A₁ is fixed by the first column and A₂
    by the first row. At α = 0 the factor A₂ is the identity, and at
    cos α = 0 the phase λ is 1.

    Raises:
        LieAlgebraError: If g is not special unitary within tol
    """
    mat = np.asarray(g, dtype=np.complex128)
    if mat.shape != (3, 3) or not is_special_unitary(mat, tol):
        raise LieAlgebraError("Input is not in SU(3)", shape=mat.shape, tolerance=tol)

    c = min(abs(mat[0, 0]), 1.0)
    s = float(np.hypot(abs(mat[1, 0]), abs(mat[2, 0])))
    theta = float(np.arctan2(s, c))
    lam2 = mat[0, 0] / c if c > 0 else 1.0 + 0j
    mu = complex(np.sqrt(lam2))
    if mu.real < 0 or (mu.real == 0 and mu.imag < 0):
        mu = -mu

    if s < _AXIS_TOLERANCE:
        A2 = np.eye(2, dtype=np.complex128)
        A1 = mat[1:, 1:] @ np.diag([lam2, 1.0])
        return Su3Factors(A1=A1, A2=A2, mu=mu, theta=0.0)

    u, v = mat[1, 0] / s, mat[2, 0] / s
    p, q = -mat[0, 1] / s, -mat[0, 2] / s
    A1 = np.array([[u, -np.conj(v)], [v, np.conj(u)]], dtype=np.complex128)
    A2 = np.array([[p, q], [-np.conj(q), np.conj(p)]], dtype=np.complex128)
    return Su3Factors(A1=A1, A2=A2, mu=mu, theta=theta)


def recomposition_error(g: ArrayLike) -> float:
    """Max-norm of recompose(decompose(g)) − g."""
    mat = np.asarray(g, dtype=np.complex128)
    return float(np.max(np.abs(recompose_su3(decompose_su3(mat)) - mat)))


def random_su3(rng: np.random.Generator | int | None = None) -> CMatrix:
    """Haar-random SU(3) element (unitary sample divided by a cube root of its determinant)."""
    U = unitary_group.rvs(3, random_state=rng)
    return U / np.linalg.det(U) ** (1.0 / 3.0)


__all__ = [
    "SU3_TOLERANCE",
    "Su3Factors",
    "decompose_su3",
    "middle_factor",
    "random_su3",
    "recompose_su3",
    "recomposition_error",
]
