"""Tests for closed-form immersions and alignments."""

import numpy as np
import pytest

from cpnsurf.closed_forms import (
    align_affine,
    align_similarity,
    closed_form_cp1,
    closed_form_cp2_holo,
    closed_form_example2,
    closed_form_example3,
    hyperellipsoid_value,
    sphere_value,
)
from cpnsurf.errors import ConfigError, DimensionError
from cpnsurf.numerics import RationalFn, polynomial

GRID = np.array([0.1 + 0.2j, -0.8 + 0.3j, 1.7 - 0.4j, -2.5 - 1.5j, 0.0])


class TestSurfaces:
    """Test the identities satisfied by the closed forms."""

    def test_cp1_sphere_identity(self):
        """Test every image of W = xi^2 lies on the unit sphere about (0, 0, 1)."""
        x = closed_form_cp1(RationalFn.monomial(2), GRID)
        assert x.shape == (len(GRID), 3)
        assert np.allclose(sphere_value(x), 1.0, atol=1e-12)

    def test_cp1_single_point(self):
        """Test W = xi at the origin maps to the origin."""
        assert np.allclose(closed_form_cp1(RationalFn.monomial(1), 0j), 0.0)

    @pytest.mark.parametrize("a", [0.5, 1.0, 2.5])
    def test_cp2_hyperellipsoid(self, a):
        """Test holomorphic CP2 closed forms lie on the hyperellipsoid."""
        x = closed_form_cp2_holo(polynomial([0, a]), RationalFn.monomial(2), GRID)
        assert x.shape == (len(GRID), 8)
        assert np.allclose(hyperellipsoid_value(x), 2.0, atol=1e-12)

    def test_hyperellipsoid_needs_eight(self):
        """Test the hyperellipsoid needs eight coordinates."""
        with pytest.raises(DimensionError):
            hyperellipsoid_value(np.zeros((2, 3)))

    def test_example3_surface_of_revolution(self):
        """Test the revolution surface uses X2, X7, X8 only."""
        x = closed_form_example3(np.array([1.5, 2.0]), np.array([0.3, 1.1]))
        assert x.shape == (2, 8)
        assert np.allclose(x[:, [0, 2, 3, 4, 5]], 0.0)
        radius = np.hypot(x[:, 1], x[:, 7])
        theta = np.log([1.5, 2.0])
        assert np.allclose(radius, np.exp(-theta) * np.tanh(theta))

    def test_example2_shape(self):
        """Test the polar closed form broadcasts."""
        x = closed_form_example2(np.array([[0.5], [1.5]]), np.array([0.0, 1.0, 2.0]))
        assert x.shape == (2, 3, 8)

    def test_polar_radius_positive(self):
        """Test non-positive radii are refused."""
        with pytest.raises(ConfigError):
            closed_form_example2(0.0, 0.0)
        with pytest.raises(ConfigError):
            closed_form_example3(-1.0, 0.0)


class TestAlignment:
    """Test affine and similarity alignment."""

    def test_affine_recovers_map(self):
        """Test an exact affine image is fitted with zero residual."""
        rng = np.random.default_rng(11)
        src = rng.normal(size=(30, 4))
        M = rng.normal(size=(4, 4))
        offset = rng.normal(size=4)
        fit = align_affine(src, src @ M + offset)
        assert fit.residual < 1e-10
        assert np.allclose(fit.apply(src), src @ M + offset)

    def test_similarity_recovers_rotation_and_scale(self):
        """Test Procrustes alignment finds rotation, scale and offset."""
        rng = np.random.default_rng(12)
        src = rng.normal(size=(20, 3))
        angle = 0.7
        R = np.array(
            [[np.cos(angle), -np.sin(angle), 0], [np.sin(angle), np.cos(angle), 0], [0, 0, 1]]
        )
        target = 2.5 * src @ R + np.array([1.0, -2.0, 0.5])
        fit = align_similarity(src, target)
        assert fit.scale == pytest.approx(2.5)
        assert fit.residual < 1e-10
        assert "matrix" in fit.to_dict()

    def test_mismatched_sets(self):
        """Test point sets must match."""
        with pytest.raises(DimensionError):
            align_affine(np.zeros((3, 2)), np.zeros((4, 2)))
        with pytest.raises(DimensionError):
            align_similarity(np.zeros((3, 2)), np.zeros((3, 3)))
