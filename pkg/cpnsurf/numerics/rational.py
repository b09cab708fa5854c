"""Rational functions of one complex variable with exact coefficients."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np
import sympy as sp

from ..errors import ConfigError

XI, XIB = sp.symbols("xi xib", real=True)

PARSE_LOCALS: dict[str, Any] = {
    "xi": XI,
    "xib": XIB,
    "xibar": XIB,
    "I": sp.I,
    "i": sp.I,
    "sqrt": sp.sqrt,
    "pi": sp.pi,
}


def parse_coefficient(value: Any) -> sp.Expr:
    """Turn a JSON-style coefficient into an exact sympy number.

    Accepts ints, floats, complex numbers, ``[re, im]`` pairs and strings
    such as ``"sqrt(2)"`` or ``"1/2 + I"``.

    Raises:
        ConfigError: If the value cannot be read as a constant
    """
    if isinstance(value, bool):
        raise ConfigError("Boolean is not a coefficient", value=value)
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError("Complex pair must be [re, im]", value=list(value))
        return parse_coefficient(value[0]) + sp.I * parse_coefficient(value[1])
    if isinstance(value, complex):
        return sp.Float(value.real) + sp.I * sp.Float(value.imag)
    if isinstance(value, (int, np.integer)):
        return sp.Integer(int(value))
    if isinstance(value, (float, np.floating)):
        return sp.Float(float(value))
    if isinstance(value, str):
        try:
            expr = sp.sympify(value, locals=PARSE_LOCALS)
        except (sp.SympifyError, SyntaxError, TypeError) as e:
            raise ConfigError("Unparseable coefficient", value=value) from e
        if expr.free_symbols:
            raise ConfigError("Coefficient must be constant", value=value)
        return sp.sympify(expr)
    raise ConfigError("Unsupported coefficient type", value=repr(value))


def _poly_coeffs(expr: sp.Expr) -> tuple[sp.Expr, ...]:
    poly = sp.Poly(sp.expand(expr), XI)
    return tuple(reversed(poly.all_coeffs()))


@dataclass(frozen=True)
class RationalFn:
    """p(ξ)/q(ξ) with coefficients in ascending powers of ξ.

    Construction cancels common factors and scales the denominator so its
    leading coefficient is 1.
    """

    num: tuple[sp.Expr, ...]
    den: tuple[sp.Expr, ...] = (sp.Integer(1),)

    def __post_init__(self) -> None:
        num = [sp.sympify(c) for c in self.num] or [sp.Integer(0)]
        den = [sp.sympify(c) for c in self.den]
        if not den or all(c == 0 for c in den):
            raise ConfigError("Denominator is identically zero")

        p = sum((c * XI**k for k, c in enumerate(num)), sp.Integer(0))
        q = sum((c * XI**k for k, c in enumerate(den)), sp.Integer(0))
        if p == 0:
            num_c: tuple[sp.Expr, ...] = (sp.Integer(0),)
            den_c: tuple[sp.Expr, ...] = (sp.Integer(1),)
        else:
            p, q = sp.fraction(sp.cancel(p / q))
            lead = sp.Poly(q, XI).LC()
            num_c = _poly_coeffs(sp.expand(p / lead))
            den_c = _poly_coeffs(sp.expand(q / lead))
        object.__setattr__(self, "num", num_c)
        object.__setattr__(self, "den", den_c)

    @classmethod
    def constant(cls, value: Any) -> RationalFn:
        return cls((parse_coefficient(value),))

    @classmethod
    def monomial(cls, power: int, coefficient: Any = 1) -> RationalFn:
        """c·ξᵏ (k may be negative)."""
        c = parse_coefficient(coefficient)
        if power >= 0:
            return cls((sp.Integer(0),) * power + (c,))
        return cls((c,), (sp.Integer(0),) * (-power) + (sp.Integer(1),))

    @classmethod
    def from_spec(cls, spec: Any) -> RationalFn:
        """Build from the solution-schema component notation.

        Accepted forms: ``{"num": [...], "den": [...]}``, ``[[num...], [den...]]``,
        a flat coefficient list (polynomial), a scalar, or an expression string
        in ``xi``.

        Raises:
            ConfigError: On malformed input
        """
        if isinstance(spec, dict):
            if "num" not in spec:
                raise ConfigError("Component is missing 'num'", component=spec)
            num = [parse_coefficient(c) for c in spec["num"]]
            den = [parse_coefficient(c) for c in spec.get("den", [1])]
            return cls(tuple(num), tuple(den))
        if isinstance(spec, str):
            return cls.from_expr(spec)
        if isinstance(spec, (list, tuple)):
            # a pair of lists is always [num, den]; use the dict form for a
            # polynomial whose two coefficients are [re, im] pairs
            if len(spec) == 2 and all(isinstance(s, (list, tuple)) for s in spec):
                num = [parse_coefficient(c) for c in spec[0]]
                den = [parse_coefficient(c) for c in spec[1]]
                return cls(tuple(num), tuple(den))
            return cls(tuple(parse_coefficient(c) for c in spec))
        return cls.constant(spec)

    @classmethod
    def from_expr(cls, text: str | sp.Expr) -> RationalFn:
        """Parse a rational expression in ``xi``.

        Raises:
            ConfigError: If the expression depends on ξ̄ or is not rational
        """
        try:
            expr = sp.sympify(text, locals=PARSE_LOCALS) if isinstance(text, str) else text
        except (sp.SympifyError, SyntaxError, TypeError) as e:
            raise ConfigError("Unparseable expression", expression=str(text)) from e
        if expr.free_symbols - {XI}:
            raise ConfigError(
                "Holomorphic component may only depend on xi", expression=str(text)
            )
        p, q = sp.fraction(sp.cancel(sp.together(expr)))
        try:
            return cls(_poly_coeffs(p), _poly_coeffs(q))
        except sp.PolynomialError as e:
            raise ConfigError("Expression is not rational in xi", expression=str(text)) from e

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.num)

    @property
    def degree(self) -> int:
        """Degree of the map ℂP¹ → ℂP¹, max(deg p, deg q)."""
        if self.is_zero:
            return 0
        return max(len(self.num), len(self.den)) - 1

    def expr(self, var: sp.Symbol = XI) -> sp.Expr:
        """Sympy expression p(var)/q(var)."""
        p = sum((c * var**k for k, c in enumerate(self.num)), sp.Integer(0))
        q = sum((c * var**k for k, c in enumerate(self.den)), sp.Integer(0))
        return p / q

    def conj_expr(self) -> sp.Expr:
        """Expression of the conjugate function in ξ̄."""
        p = sum((sp.conjugate(c) * XIB**k for k, c in enumerate(self.num)), sp.Integer(0))
        q = sum((sp.conjugate(c) * XIB**k for k, c in enumerate(self.den)), sp.Integer(0))
        return p / q

    @cached_property
    def _numeric(self) -> tuple[np.ndarray, np.ndarray]:
        num = np.array([complex(sp.N(c)) for c in self.num])
        den = np.array([complex(sp.N(c)) for c in self.den])
        return num, den

    def __call__(self, z: complex | np.ndarray) -> Any:
        num, den = self._numeric
        return np.polynomial.polynomial.polyval(z, num) / np.polynomial.polynomial.polyval(
            z, den
        )

    def derivative(self) -> RationalFn:
        """d/dξ as a new RationalFn."""
        return RationalFn.from_expr(sp.diff(self.expr(), XI))

    def poles(self) -> list[complex]:
        """Finite poles (roots of the reduced denominator)."""
        _, den = self._numeric
        if len(den) < 2:
            return []
        return [complex(r) for r in np.polynomial.polynomial.polyroots(den)]

    def scaled_argument(self, factor: Any) -> RationalFn:
        """ξ ↦ r(c·ξ), used for reparametrisation checks."""
        c = parse_coefficient(factor)
        return RationalFn.from_expr(self.expr().xreplace({XI: c * XI}))

    def to_dict(self) -> dict[str, list[str]]:
        return {"num": [str(c) for c in self.num], "den": [str(c) for c in self.den]}

    def __str__(self) -> str:
        return str(sp.simplify(self.expr()))


def polynomial(coefficients: Sequence[Any]) -> RationalFn:
    """Polynomial in ξ from ascending coefficients."""
    return RationalFn(tuple(parse_coefficient(c) for c in coefficients))
