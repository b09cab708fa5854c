"""Shared solutions for the cpnsurf tests."""

import pytest

from cpnsurf.model import from_fields, make_holomorphic, make_mixed_cp2
from cpnsurf.numerics import RationalFn, polynomial
from cpnsurf.settings import Tolerances

EX3_FIELDS = ["1", "(xi + xib)/(1 - xi*xib)", "(xib - xi)/(1 - xi*xib)"]


def holomorphic_family(a):
    """f = (1, a xi, xi^2)."""
    return make_holomorphic(
        2, [RationalFn.constant(1), polynomial([0, a]), RationalFn.monomial(2)], name=f"ex1-{a}"
    )


@pytest.fixture(scope="session")
def sphere():
    """CP1 solution W = xi."""
    return make_holomorphic(1, [RationalFn.constant(1), RationalFn.monomial(1)], name="sphere")


@pytest.fixture(scope="session")
def sphere_k2():
    return make_holomorphic(1, [RationalFn.constant(1), RationalFn.monomial(2)], name="k2")


@pytest.fixture(scope="session")
def ex1():
    return holomorphic_family(1)


@pytest.fixture(scope="session")
def veronese():
    return holomorphic_family("sqrt(2)")


@pytest.fixture(scope="session")
def mixed():
    """Wronskian solution from g = (1, xi, xi^2)."""
    return make_mixed_cp2(
        [RationalFn.constant(1), RationalFn.monomial(1), RationalFn.monomial(2)], name="mixed"
    )


@pytest.fixture(scope="session")
def revolution():
    """Real CP2 solution singular on the unit circle."""
    return from_fields(2, EX3_FIELDS, name="revolution")


@pytest.fixture(scope="session")
def perturbed():
    """W = xi + 0.2 xib, not a solution."""
    return from_fields(1, ["1", "xi + 0.2*xib"], name="perturbed")


@pytest.fixture
def loose():
    """Tolerances that keep sphere quadratures quick."""
    return Tolerances(sphere_quadrature=1e-5)


TORUS_FIELDS = [
    "cos(xi**2 + xib**2) + I*sin(xi**2 + xib**2)",
    "cos(I*(xi**2 - xib**2)) + I*sin(I*(xi**2 - xib**2))",
    "2**(1/4)*(cos(((1 + I)*xi**2 + (1 - I)*xib**2)/sqrt(2))"
    " - I*sin(((1 + I)*xi**2 + (1 - I)*xib**2)/sqrt(2)))",
]


@pytest.fixture(scope="session")
def torus():
    """Flat non-conformal solution: a torus orbit in CP2 composed with xi -> xi^2.

    J = 4i(sqrt(2) - 1) xi^2, q = q~ = 4|xi|^2 and K = 0.
    """
    return from_fields(2, TORUS_FIELDS, name="torus")
