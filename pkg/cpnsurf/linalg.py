"""Complex matrix kernel: su(N+1) elements, bases and inner products."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionError, LieAlgebraError

CMatrix = NDArray[np.complex128]

LIE_TOLERANCE = 1e-12


def as_cmatrix(entries: ArrayLike) -> CMatrix:
    """Coerce entries to a square complex128 matrix.

    Raises:
        DimensionError: If the input is not square
    """
    mat = np.array(entries, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
        raise DimensionError("Matrix must be square and non-empty", shape=mat.shape)
    return mat


def dagger(mat: CMatrix) -> CMatrix:
    """Conjugate transpose."""
    return np.conj(mat).T


def commutator(a: CMatrix, b: CMatrix) -> CMatrix:
    """[a, b] = ab - ba."""
    return a @ b - b @ a


@dataclass(frozen=True)
class SuElement:
    """A skew-Hermitian traceless matrix, a point of su(N+1) ≅ ℝ^{N(N+2)}."""

    mat: CMatrix

    def __post_init__(self) -> None:
        mat = as_cmatrix(self.mat)
        scale = max(1.0, float(np.max(np.abs(mat))))
        skew = float(np.max(np.abs(mat + dagger(mat))))
        trace = abs(complex(np.trace(mat)))
        if skew > LIE_TOLERANCE * scale or trace > LIE_TOLERANCE * scale:
            raise LieAlgebraError(
                "Matrix is not in su(n)", skew=skew, trace=trace, scale=scale
            )
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return int(self.mat.shape[0])

    @classmethod
    def zero(cls, dim: int) -> SuElement:
        return cls(np.zeros((dim, dim), dtype=np.complex128))

    def __add__(self, other: SuElement) -> SuElement:
        _check_dims(self, other)
        return SuElement(self.mat + other.mat)

    def __sub__(self, other: SuElement) -> SuElement:
        _check_dims(self, other)
        return SuElement(self.mat - other.mat)

    def scaled(self, factor: float) -> SuElement:
        return SuElement(float(factor) * self.mat)


@dataclass(frozen=True)
class SuBasis:
    """Ordered orthogonal basis of su(dim) with its Gram matrix."""

    dim: int
    elements: tuple[SuElement, ...]

    def __post_init__(self) -> None:
        expected = self.dim * self.dim - 1
        if len(self.elements) != expected:
            raise DimensionError(
                "Basis has the wrong number of elements",
                dim=self.dim,
                count=len(self.elements),
                expected=expected,
            )

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, index: int) -> SuElement:
        return self.elements[index]

    @property
    def stack(self) -> NDArray[np.complex128]:
        """Basis matrices stacked along axis 0."""
        return np.stack([e.mat for e in self.elements])

    @property
    def gram(self) -> NDArray[np.float64]:
        return gram(self)


def _check_dims(x: SuElement, y: SuElement) -> None:
    if x.dim != y.dim:
        raise DimensionError("Dimension mismatch", left=x.dim, right=y.dim)


def inner(x: SuElement, y: SuElement) -> float:
    """Inner product (x, y) = -½ Re tr(xy); positive definite on su(n)."""
    _check_dims(x, y)
    return float(-0.5 * np.real(np.trace(x.mat @ y.mat)))


def killing(x: SuElement, y: SuElement) -> float:
    """Killing form 2(N+1) Re tr(xy); negative definite on su(N+1)."""
    _check_dims(x, y)
    return float(2 * x.dim * np.real(np.trace(x.mat @ y.mat)))


def bilinear(a: CMatrix, b: CMatrix) -> complex:
    """Complex-bilinear extension of :func:`inner` to arbitrary matrices."""
    return complex(-0.5 * np.trace(a @ b))


def gram(basis: SuBasis) -> NDArray[np.float64]:
    """Gram matrix of a basis under :func:`inner`."""
    n = len(basis)
    out = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            out[i, j] = out[j, i] = inner(basis[i], basis[j])
    return out


def complex_coords(mat: CMatrix, basis: SuBasis) -> NDArray[np.complex128]:
    """Coordinates of a traceless complex matrix in the complexified basis.

    Solves Σ cᵢ bᵢ = mat with complex cᵢ through the Gram system of the
    bilinear form.
    """
    mat = as_cmatrix(mat)
    if mat.shape[0] != basis.dim:
        raise DimensionError("Dimension mismatch", left=mat.shape[0], right=basis.dim)
    rhs = -0.5 * np.einsum("kij,ji->k", basis.stack, mat)
    return np.linalg.solve(basis.gram, rhs)


def coords(x: SuElement, basis: SuBasis) -> NDArray[np.float64]:
    """Real coordinate vector of x in the basis (Gram system, not orthonormal)."""
    if x.dim != basis.dim:
        raise DimensionError("Dimension mismatch", left=x.dim, right=basis.dim)
    return np.real(complex_coords(x.mat, basis))


def from_coords(c: ArrayLike, basis: SuBasis) -> SuElement:
    """Inverse of :func:`coords`."""
    vec = np.asarray(c, dtype=np.float64)
    if vec.shape != (len(basis),):
        raise DimensionError(
            "Coordinate vector has the wrong length", length=vec.size, expected=len(basis)
        )
    return SuElement(np.einsum("k,kij->ij", vec, basis.stack))


def z_of(x: ArrayLike) -> SuElement:
    """Z(x) = x⊗e₀† − e₀⊗x†: first column (0, x), first row (0, −x̄)."""
    vec = np.asarray(x, dtype=np.complex128).ravel()
    n = vec.size + 1
    mat = np.zeros((n, n), dtype=np.complex128)
    mat[1:, 0] = vec
    mat[0, 1:] = -np.conj(vec)
    return SuElement(mat)


def pauli() -> tuple[CMatrix, CMatrix, CMatrix]:
    """σ₁, σ₂, σ₃."""
    s1 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    s2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
    s3 = np.array([[1, 0], [0, -1]], dtype=np.complex128)
    return s1, s2, s3


def _su3_elements() -> list[SuElement]:
    blocks = []
    for sigma in pauli():
        m = np.zeros((3, 3), dtype=np.complex128)
        m[1:, 1:] = -1j * sigma
        blocks.append(SuElement(m))
    s4 = SuElement(np.diag([-2j, 1j, 1j]))
    e1 = np.array([1, 0])
    e2 = np.array([0, 1])
    return [*blocks, s4, z_of(e1), z_of(e2), z_of(1j * e1), z_of(1j * e2)]


def _generalized_elements(dim: int) -> list[SuElement]:
    elements = []
    for j in range(dim):
        for k in range(j + 1, dim):
            unit = np.zeros((dim, dim), dtype=np.complex128)
            unit[k, j] = 1.0
            elements.append(SuElement(unit - unit.T))
            elements.append(SuElement(1j * (unit + unit.T)))
    for ell in range(1, dim):
        diag = np.zeros(dim)
        diag[:ell] = 1.0
        diag[ell] = -ell
        elements.append(SuElement(np.diag(-1j * diag).astype(np.complex128)))
    return elements


@lru_cache(maxsize=8)
def su_basis(dim: int) -> SuBasis:
    """Standard orthogonal basis of su(dim).

    dim = 2 gives -iσ₁, -iσ₂, -iσ₃; dim = 3 gives S₁..S₈ with S₄ = diag(-2i, i, i)
    and S₅..S₈ = Z(e₁), Z(e₂), Z(ie₁), Z(ie₂); larger dims use the generalised
    Gell-Mann pattern.
    """
    if dim < 2:
        raise DimensionError("su(n) needs n >= 2", dim=dim)
    if dim == 2:
        elements = [SuElement(-1j * s) for s in pauli()]
    elif dim == 3:
        elements = _su3_elements()
    else:
        elements = _generalized_elements(dim)
    return SuBasis(dim=dim, elements=tuple(elements))


def is_special_unitary(g: ArrayLike, tol: float = 1e-10) -> bool:
    """Check g†g = 𝟙 and det g = 1 within tol."""
    mat = np.asarray(g, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return False
    unitary = np.max(np.abs(dagger(mat) @ mat - np.eye(mat.shape[0]))) <= tol
    return bool(unitary and abs(np.linalg.det(mat) - 1.0) <= tol)
