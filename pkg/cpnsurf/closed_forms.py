"""Closed-form immersions and the gauges that relate them to integrated ones."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import orthogonal_procrustes

from .errors import ConfigError, DimensionError
from .numerics import RationalFn

# closed_form_cp1 = CP1_COORD_SCALE * coords + offset in the −iσ basis
CP1_COORD_SCALE = np.array([2.0, 2.0, -2.0])


def closed_form_cp1(W: RationalFn, pt: complex | ArrayLike) -> NDArray[np.float64]:
    """((W+W̄)/A, i(W̄−W)/A, 2|W|²/A) with A = 1 + |W|².

    Works on a single point or an array of points (coordinates on the last axis).
    """
    w = np.asarray(W(np.asarray(pt, dtype=np.complex128)), dtype=np.complex128)
    A = 1.0 + np.abs(w) ** 2
    x1 = 2.0 * w.real / A
    x2 = 2.0 * w.imag / A
    x3 = 2.0 * np.abs(w) ** 2 / A
    return np.stack([x1, x2, x3], axis=-1)


def closed_form_cp2_holo(
    W1: RationalFn, W2: RationalFn, pt: complex | ArrayLike
) -> NDArray[np.float64]:
    """The eight integrated coordinates of a holomorphic ℂP² solution."""
    z = np.asarray(pt, dtype=np.complex128)
    w1 = np.asarray(W1(z), dtype=np.complex128)
    w2 = np.asarray(W2(z), dtype=np.complex128)
    c1, c2 = np.conj(w1), np.conj(w2)
    A = 1.0 + np.abs(w1) ** 2 + np.abs(w2) ** 2
    coords = [
        (w1 + c1) / A,
        -1j * (w1 - c1) / A,
        2.0 * np.abs(w1) ** 2 / A,
        2.0 * np.abs(w2) ** 2 / A,
        -1j * (w2 - c2) / A,
        -1j * (c1 * w2 - c2 * w1) / A,
        (c1 * w2 + c2 * w1) / A,
        (w2 + c2) / A,
    ]
    return np.stack([np.real(c) for c in coords], axis=-1)


def closed_form_example2(r: ArrayLike, phi: ArrayLike) -> NDArray[np.float64]:
    """Printed polar closed form for the Wronskian solution g = (1, ξ, ξ²).

    Raises:
        ConfigError: If r ≤ 0
    """
    r = np.asarray(r, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    if np.any(r <= 0):
        raise ConfigError("Polar radius must be positive")
    r2 = r**2
    den = (1 + r2 + r2**2) * (1 + 4 * r2 + r2**2)
    odd = 2 * (r2**4 + 7 * r2**3 - r2 - 1) / (r * den)
    even = 4 * (r2**4 - 2 * r2**3 - 4 * r2 - 1) / (r * den)
    x = [
        -12 * r2**2 * np.cos(2 * phi) / den,
        -12 * r2**2 * np.sin(2 * phi) / den,
        -4 * (4 * r2**3 + 6 * r2**2 + 9 * r2 + 2) / den,
        12 * r2 * (1 + r2**2) / den,
        -odd * np.sin(phi),
        even * np.sin(phi),
        -even * np.cos(phi),
        -odd * np.cos(phi),
    ]
    return np.stack(np.broadcast_arrays(*x), axis=-1)


def closed_form_example3(r: ArrayLike, phi: ArrayLike) -> NDArray[np.float64]:
    """Surface of revolution in (X₂, X₇, X₈), with r = e^ϑ.

    X₂ = e^{−ϑ}tanhϑ sinφ, X₈ = e^{−ϑ}tanhϑ cosφ, X₇ = e^{−ϑ}sechϑ.

    Raises:
        ConfigError: If r ≤ 0
    """
    r = np.asarray(r, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    if np.any(r <= 0):
        raise ConfigError("Polar radius must be positive")
    theta = np.log(r)
    radial = np.exp(-theta) * np.tanh(theta)
    height = np.exp(-theta) / np.cosh(theta)
    r_b, phi_b = np.broadcast_arrays(radial, phi)
    out = np.zeros(r_b.shape + (8,))
    out[..., 1] = r_b * np.sin(phi_b)
    out[..., 6] = np.broadcast_to(height, r_b.shape)
    out[..., 7] = r_b * np.cos(phi_b)
    return out


def sphere_value(x: ArrayLike) -> NDArray[np.float64]:
    """X₁² + X₂² + (X₃ − 1)², equal to 1 on the ℂP¹ sphere."""
    x = np.asarray(x, dtype=np.float64)
    return x[..., 0] ** 2 + x[..., 1] ** 2 + (x[..., 2] - 1.0) ** 2


def hyperellipsoid_value(x: ArrayLike) -> NDArray[np.float64]:
    """X₁²+X₂²+(X₃−1)²+(X₄−1)²+X₅²+2X₆²+2X₇²+X₈², equal to 2 for holomorphic ℂP²."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != 8:
        raise DimensionError("Hyperellipsoid needs 8 coordinates", length=x.shape[-1])
    shifted = x.copy()
    shifted[..., 2] -= 1.0
    shifted[..., 3] -= 1.0
    weights = np.array([1, 1, 1, 1, 1, 2, 2, 1], dtype=np.float64)
    return np.sum(weights * shifted**2, axis=-1)


@dataclass(frozen=True)
class Alignment:
    """target ≈ scale · source @ matrix + offset, with its max residual."""

    matrix: NDArray[np.float64]
    offset: NDArray[np.float64]
    scale: float
    residual: float

    def apply(self, source: ArrayLike) -> NDArray[np.float64]:
        return self.scale * np.asarray(source) @ self.matrix + self.offset

    def to_dict(self) -> dict[str, Any]:
        return {
            "matrix": self.matrix,
            "offset": self.offset,
            "scale": self.scale,
            "residual": self.residual,
        }


def _check_pair(source: ArrayLike, target: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    src = np.atleast_2d(np.asarray(source, dtype=np.float64))
    tgt = np.atleast_2d(np.asarray(target, dtype=np.float64))
    if src.shape[0] != tgt.shape[0] or src.shape[0] == 0:
        raise DimensionError(
            "Alignment needs matching non-empty point sets",
            source=src.shape[0],
            target=tgt.shape[0],
        )
    return src, tgt


def align_affine(source: ArrayLike, target: ArrayLike) -> Alignment:
    """Least-squares affine map from source points to target points."""
    src, tgt = _check_pair(source, target)
    design = np.hstack([src, np.ones((src.shape[0], 1))])
    solution, *_ = np.linalg.lstsq(design, tgt, rcond=None)
    matrix, offset = solution[:-1], solution[-1]
    fitted = src @ matrix + offset
    return Alignment(
        matrix=matrix,
        offset=offset,
        scale=1.0,
        residual=float(np.max(np.abs(fitted - tgt))),
    )


def align_similarity(source: ArrayLike, target: ArrayLike) -> Alignment:
    """Best rotation, uniform scale and offset (orthogonal Procrustes).

    Both point sets must have the same dimension.
    """
    src, tgt = _check_pair(source, target)
    if src.shape[1] != tgt.shape[1]:
        raise DimensionError(
            "Similarity alignment needs equal dimensions", source=src.shape[1], target=tgt.shape[1]
        )
    mu_s, mu_t = src.mean(axis=0), tgt.mean(axis=0)
    a, b = src - mu_s, tgt - mu_t
    R, sigma = orthogonal_procrustes(a, b)
    norm = float(np.sum(a**2))
    scale = float(sigma / norm) if norm > 0 else 1.0
    offset = mu_t - scale * mu_s @ R
    fitted = scale * src @ R + offset
    return Alignment(
        matrix=R, offset=offset, scale=scale, residual=float(np.max(np.abs(fitted - tgt)))
    )
