"""Tests for the su(N+1) matrix kernel."""

import numpy as np
import pytest

from cpnsurf.errors import DimensionError, LieAlgebraError
from cpnsurf.linalg import (
    SuElement,
    as_cmatrix,
    commutator,
    coords,
    from_coords,
    inner,
    is_special_unitary,
    killing,
    su_basis,
    z_of,
)


class TestSuElement:
    """Test membership checks and arithmetic of su(n) elements."""

    def test_accepts_skew_hermitian_traceless(self):
        """Test that -i sigma_3 is accepted."""
        x = SuElement(np.diag([-1j, 1j]))
        assert x.dim == 2

    def test_rejects_hermitian(self):
        """Test that a Hermitian matrix is rejected."""
        with pytest.raises(LieAlgebraError):
            SuElement(np.array([[0, 1], [1, 0]]))

    def test_rejects_trace(self):
        """Test that a nonzero trace is rejected."""
        with pytest.raises(LieAlgebraError):
            SuElement(np.diag([1j, 1j]))

    def test_rejects_non_square(self):
        """Test that non-square input raises DimensionError."""
        with pytest.raises(DimensionError):
            as_cmatrix(np.zeros((2, 3)))

    def test_matrix_is_read_only(self):
        """Test that the stored matrix cannot be mutated."""
        x = SuElement.zero(3)
        with pytest.raises(ValueError):
            x.mat[0, 0] = 1.0

    def test_addition_and_dimension_mismatch(self):
        """Test sums stay in su(n) and mismatched sizes raise."""
        basis = su_basis(3)
        total = basis[0] + basis[3] - basis[5]
        assert total.dim == 3
        with pytest.raises(DimensionError):
            _ = basis[0] + su_basis(2)[0]

    def test_commutator_stays_in_algebra(self):
        """Test that [x, y] of two su(3) elements is again in su(3)."""
        basis = su_basis(3)
        SuElement(commutator(basis[4].mat, basis[6].mat))


class TestBasis:
    """Test the standard bases."""

    @pytest.mark.parametrize("dim", [2, 3, 4, 5])
    def test_basis_size_and_orthogonality(self, dim):
        """Test n^2 - 1 elements with a diagonal Gram matrix."""
        basis = su_basis(dim)
        assert len(basis) == dim * dim - 1
        gram = basis.gram
        assert np.allclose(gram, np.diag(np.diag(gram)))
        assert np.all(np.diag(gram) > 0)

    def test_su2_basis_is_orthonormal(self):
        """Test -i sigma_k have unit length under -1/2 tr."""
        assert np.allclose(su_basis(2).gram, np.eye(3))

    def test_su3_s4_normalisation(self):
        """Test S4 = diag(-2i, i, i) has squared length 3."""
        basis = su_basis(3)
        assert np.allclose(basis[3].mat, np.diag([-2j, 1j, 1j]))
        assert inner(basis[3], basis[3]) == pytest.approx(3.0)

    def test_su3_z_elements(self):
        """Test S5..S8 are Z(e1), Z(e2), Z(ie1), Z(ie2)."""
        basis = su_basis(3)
        assert np.allclose(basis[4].mat, z_of([1, 0]).mat)
        assert np.allclose(basis[7].mat, z_of([0, 1j]).mat)

    def test_dimension_one_rejected(self):
        """Test su(1) is refused."""
        with pytest.raises(DimensionError):
            su_basis(1)


class TestInnerProduct:
    """Test the inner product and coordinates."""

    def test_inner_positive_definite(self):
        """Test (x, x) > 0 for random nonzero x."""
        rng = np.random.default_rng(3)
        basis = su_basis(3)
        for _ in range(10):
            x = from_coords(rng.normal(size=8), basis)
            assert inner(x, x) > 0

    def test_killing_is_negative_multiple(self):
        """Test Killing form = -4(N+1) times the inner product."""
        basis = su_basis(3)
        x = basis[2] + basis[5]
        assert killing(x, x) == pytest.approx(-12.0 * inner(x, x))

    def test_coords_round_trip(self):
        """Test coords inverts from_coords in the Gram-weighted basis."""
        rng = np.random.default_rng(7)
        basis = su_basis(3)
        c = rng.normal(size=8)
        assert np.allclose(coords(from_coords(c, basis), basis), c)

    def test_from_coords_wrong_length(self):
        """Test a short coordinate vector raises."""
        with pytest.raises(DimensionError):
            from_coords([1.0, 2.0], su_basis(3))


class TestSpecialUnitary:
    """Test the SU(n) membership check."""

    def test_identity(self):
        """Test the identity is special unitary."""
        assert is_special_unitary(np.eye(3))

    def test_phase_fails_determinant(self):
        """Test i times the identity in 2x2 has det -1."""
        assert not is_special_unitary(1j * np.eye(2))

    def test_non_square(self):
        """Test non-square input is rejected."""
        assert not is_special_unitary(np.ones((2, 3)))
