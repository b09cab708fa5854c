"""Symbolic fields in ξ, ξ̄ with exact Wirtinger calculus.

ξ and ξ̄ are independent sympy symbols declared real, so ``sp.conjugate`` acts
only on numeric constants and conjugation is completed by swapping the two
symbols.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np
import structlog
import sympy as sp
from scipy.optimize import brentq, minimize_scalar

from ..errors import ConfigError, SingularPointError
from .rational import PARSE_LOCALS, XI, XIB, RationalFn

logger = structlog.get_logger()

EXCLUSION_RADIUS = 1e-3
SEGMENT_SAMPLES = 64


def swap(expr: sp.Expr) -> sp.Expr:
    """Exchange ξ and ξ̄."""
    return expr.xreplace({XI: XIB, XIB: XI})


def lambdify_xi(expr: Any) -> Callable[..., Any]:
    """Numeric callable ``fn(xi, xib)`` for a scalar or matrix expression."""
    return sp.lambdify((XI, XIB), expr, modules="numpy", cse=True)


def evaluate(fn: Callable[..., Any], pt: complex | np.ndarray) -> Any:
    """Evaluate a lambdified function at ξ = pt, ξ̄ = conj(pt)."""
    z = np.asarray(pt, dtype=np.complex128)
    return fn(z, np.conj(z))


@dataclass(frozen=True)
class Singularity:
    """A zero set of a denominator.

    Holomorphic (or antiholomorphic) denominators are stored as finite point
    sets; anything else as a real curve whose distance is estimated to first
    order, |D| / (|∂D| + |∂̄D|).
    """

    expr: sp.Expr
    points: tuple[complex, ...] = ()

    @cached_property
    def _distance_fns(
        self,
    ) -> tuple[Callable[..., Any], Callable[..., Any], Callable[..., Any]]:
        # magnitudes are taken numerically; sympy folds Abs over real symbols
        return (
            lambdify_xi(self.expr),
            lambdify_xi(sp.diff(self.expr, XI)),
            lambdify_xi(sp.diff(self.expr, XIB)),
        )

    @property
    def is_curve(self) -> bool:
        return not self.points and bool(self.expr.free_symbols)

    def distance(self, pt: complex) -> float:
        """Estimated distance from pt to the zero set."""
        if self.points:
            return min(abs(pt - p) for p in self.points)
        if not self.expr.free_symbols:
            return float("inf")
        value_fn, d_fn, dbar_fn = self._distance_fns
        value = abs(complex(evaluate(value_fn, pt)))
        grad = abs(complex(evaluate(d_fn, pt))) + abs(complex(evaluate(dbar_fn, pt)))
        if value == 0.0:
            return 0.0
        if grad == 0.0:
            return float("inf")
        return value / grad

    def segment_distance(
        self, a: complex, b: complex, samples: int = SEGMENT_SAMPLES
    ) -> float:
        """Distance from the segment a → b to the zero set.

        Exact for point sets. For curves a sign change of a real-valued
        denominator along the segment is a crossing (0.0); otherwise the
        smallest estimated distance, refined around the best sample.
        """
        a, b = complex(a), complex(b)
        delta = b - a
        if self.points:
            return min(_point_segment_distance(p, a, delta) for p in self.points)
        if not self.expr.free_symbols:
            return float("inf")
        if delta == 0:
            return self.distance(a)

        s = np.linspace(0.0, 1.0, samples + 1)
        z = a + s * delta
        value_fn, d_fn, dbar_fn = self._distance_fns
        values = _on_grid(value_fn, z)
        if np.any(values == 0):
            return 0.0
        if np.max(np.abs(values.imag)) <= 1e-12 * np.max(np.abs(values)):
            real = values.real
            changes = np.nonzero(np.sign(real[:-1]) != np.sign(real[1:]))[0]
            if changes.size:
                k = int(changes[0])
                root = brentq(
                    lambda t: float(np.real(evaluate(value_fn, a + t * delta))),
                    s[k],
                    s[k + 1],
                )
                logger.debug(
                    "Segment crosses singular curve",
                    curve=str(self.expr),
                    at=a + root * delta,
                )
                return 0.0

        grads = np.abs(_on_grid(d_fn, z)) + np.abs(_on_grid(dbar_fn, z))
        with np.errstate(divide="ignore"):
            distances = np.where(grads > 0, np.abs(values) / grads, np.inf)
        k = int(np.argmin(distances))
        lo, hi = s[max(k - 1, 0)], s[min(k + 1, samples)]
        refined = minimize_scalar(
            lambda t: self.distance(a + t * delta), bounds=(lo, hi), method="bounded"
        )
        return float(min(distances[k], refined.fun))


def _on_grid(fn: Callable[..., Any], z: np.ndarray) -> np.ndarray:
    return np.broadcast_to(evaluate(fn, z), z.shape).astype(np.complex128)


def _point_segment_distance(p: complex, a: complex, delta: complex) -> float:
    if delta == 0:
        return abs(p - a)
    t = ((p - a) * delta.conjugate()).real / abs(delta) ** 2
    return abs(a + min(max(t, 0.0), 1.0) * delta - p)


def _singularity_for(den: sp.Expr) -> Singularity | None:
    den = sp.expand(den)
    if not den.free_symbols:
        return None
    symbols = den.free_symbols
    if symbols <= {XI} or symbols <= {XIB}:
        var = XI if symbols <= {XI} else XIB
        coeffs = [complex(sp.N(c)) for c in sp.Poly(den, var).all_coeffs()]
        roots = np.roots(coeffs) if len(coeffs) > 1 else np.array([])
        if var == XIB:
            roots = np.conj(roots)
        return Singularity(expr=den, points=tuple(complex(r) for r in roots))
    return Singularity(expr=den)


@dataclass(frozen=True)
class FieldExpr:
    """A scalar field f(ξ, ξ̄) held as an exact sympy expression."""

    expr: sp.Expr

    def __post_init__(self) -> None:
        expr = sp.sympify(self.expr)
        stray = expr.free_symbols - {XI, XIB}
        if stray:
            raise ConfigError(
                "Field may only depend on xi and xib",
                symbols=sorted(str(s) for s in stray),
            )
        object.__setattr__(self, "expr", expr)

    @classmethod
    def parse(cls, text: str) -> FieldExpr:
        """Parse ``xi``/``xib`` notation, e.g. ``"(xi + xib)/(1 - xi*xib)"``."""
        try:
            return cls(sp.sympify(text, locals=PARSE_LOCALS))
        except (sp.SympifyError, SyntaxError, TypeError) as e:
            raise ConfigError("Unparseable field expression", expression=text) from e

    @classmethod
    def holomorphic(cls, fn: RationalFn) -> FieldExpr:
        return cls(fn.expr(XI))

    @classmethod
    def antiholomorphic(cls, fn: RationalFn) -> FieldExpr:
        """conj(fn(ξ)) as a function of ξ̄."""
        return cls(fn.conj_expr())

    def d(self) -> FieldExpr:
        return FieldExpr(sp.diff(self.expr, XI))

    def dbar(self) -> FieldExpr:
        return FieldExpr(sp.diff(self.expr, XIB))

    def conj(self) -> FieldExpr:
        return FieldExpr(swap(sp.conjugate(self.expr)))

    def __add__(self, other: FieldExpr | complex) -> FieldExpr:
        return FieldExpr(self.expr + _as_expr(other))

    __radd__ = __add__

    def __sub__(self, other: FieldExpr | complex) -> FieldExpr:
        return FieldExpr(self.expr - _as_expr(other))

    def __rsub__(self, other: FieldExpr | complex) -> FieldExpr:
        return FieldExpr(_as_expr(other) - self.expr)

    def __mul__(self, other: FieldExpr | complex) -> FieldExpr:
        return FieldExpr(self.expr * _as_expr(other))

    __rmul__ = __mul__

    def __truediv__(self, other: FieldExpr | complex) -> FieldExpr:
        return FieldExpr(self.expr / _as_expr(other))

    def __neg__(self) -> FieldExpr:
        return FieldExpr(-self.expr)

    @property
    def is_holomorphic(self) -> bool:
        return XIB not in self.expr.free_symbols

    @property
    def is_antiholomorphic(self) -> bool:
        return XI not in self.expr.free_symbols

    @cached_property
    def _fn(self) -> Callable[..., Any]:
        return lambdify_xi(self.expr)

    def __call__(self, pt: complex | np.ndarray) -> Any:
        value = evaluate(self._fn, pt)
        if np.ndim(value) == 0:
            return complex(value)
        return np.broadcast_to(value, np.shape(pt)).astype(np.complex128)

    def denominators(self) -> list[sp.Expr]:
        """Denominator factors of the expression."""
        _, den = sp.fraction(sp.together(self.expr))
        factors = sp.factor_list(den)[1] if den.free_symbols else []
        return [f for f, _ in factors]

    def singularities(self) -> SingularityRegistry:
        return SingularityRegistry.from_exprs([self.expr])

    def __str__(self) -> str:
        return str(self.expr)


def _as_expr(value: FieldExpr | complex | sp.Expr) -> sp.Expr:
    if isinstance(value, FieldExpr):
        return value.expr
    return sp.sympify(value)


@dataclass(frozen=True)
class SingularityRegistry:
    """Zero sets of every denominator met while building a field."""

    entries: tuple[Singularity, ...] = ()
    radius: float = EXCLUSION_RADIUS

    @classmethod
    def from_exprs(
        cls, exprs: Iterable[sp.Expr], radius: float = EXCLUSION_RADIUS
    ) -> SingularityRegistry:
        seen: dict[sp.Expr, Singularity] = {}
        for expr in exprs:
            _, den = sp.fraction(sp.together(sp.sympify(expr)))
            if not den.free_symbols:
                continue
            for factor, _ in sp.factor_list(den)[1]:
                key = sp.expand(factor)
                if key in seen:
                    continue
                sing = _singularity_for(key)
                if sing is not None:
                    seen[key] = sing
        return cls(entries=tuple(seen.values()), radius=radius)

    def with_radius(self, radius: float) -> SingularityRegistry:
        return SingularityRegistry(entries=self.entries, radius=radius)

    def merged(self, other: SingularityRegistry) -> SingularityRegistry:
        known = {e.expr for e in self.entries}
        extra = tuple(e for e in other.entries if e.expr not in known)
        return SingularityRegistry(entries=self.entries + extra, radius=self.radius)

    @property
    def points(self) -> list[complex]:
        return [p for e in self.entries for p in e.points]

    @property
    def curves(self) -> list[sp.Expr]:
        return [e.expr for e in self.entries if e.is_curve]

    def distance(self, pt: complex) -> float:
        """Distance to the nearest registered singularity (inf if none)."""
        return min((e.distance(pt) for e in self.entries), default=float("inf"))

    def is_safe(self, pt: complex) -> bool:
        return self.distance(pt) > self.radius

    def require_safe(self, pt: complex, what: str = "evaluation") -> None:
        """Raise if pt lies within the exclusion radius.

        Raises:
            SingularPointError: When pt is too close to a singularity
        """
        dist = self.distance(pt)
        if dist <= self.radius:
            raise SingularPointError(
                "Point is within the exclusion radius of a singularity",
                pt=complex(pt),
                distance=dist,
                radius=self.radius,
                during=what,
            )

    def segment_distance(self, a: complex, b: complex) -> float:
        """Distance from the segment a → b to the nearest singularity."""
        return min(
            (e.segment_distance(a, b) for e in self.entries), default=float("inf")
        )

    def require_safe_segment(
        self, a: complex, b: complex, what: str = "integration"
    ) -> None:
        """Raise if the segment a → b passes within the exclusion radius.

        Raises:
            SingularPointError: When the segment meets or grazes a singularity
        """
        dist = self.segment_distance(a, b)
        if dist <= self.radius:
            raise SingularPointError(
                "Segment passes within the exclusion radius of a singularity",
                start=complex(a),
                end=complex(b),
                distance=dist,
                radius=self.radius,
                during=what,
            )


@dataclass(frozen=True)
class FieldVector:
    """A ℂ^{n}-valued field built from FieldExpr components."""

    components: tuple[FieldExpr, ...]
    registry: SingularityRegistry = field(default_factory=SingularityRegistry)

    def __post_init__(self) -> None:
        if not self.components:
            raise ConfigError("Field vector needs at least one component")

    @classmethod
    def of(cls, exprs: Sequence[FieldExpr | sp.Expr | str]) -> FieldVector:
        comps = tuple(
            e if isinstance(e, FieldExpr)
            else FieldExpr.parse(e) if isinstance(e, str)
            else FieldExpr(e)
            for e in exprs
        )
        registry = SingularityRegistry.from_exprs(c.expr for c in comps)
        return cls(components=comps, registry=registry)

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, index: int) -> FieldExpr:
        return self.components[index]

    @property
    def matrix(self) -> sp.Matrix:
        """Column vector of component expressions."""
        return sp.Matrix([c.expr for c in self.components])

    def d(self) -> FieldVector:
        return FieldVector(tuple(c.d() for c in self.components), self.registry)

    def dbar(self) -> FieldVector:
        return FieldVector(tuple(c.dbar() for c in self.components), self.registry)

    def conj(self) -> FieldVector:
        return FieldVector(tuple(c.conj() for c in self.components), self.registry)

    @cached_property
    def _fn(self) -> Callable[..., Any]:
        return lambdify_xi(self.matrix)

    def __call__(self, pt: complex) -> np.ndarray:
        return np.asarray(evaluate(self._fn, pt), dtype=np.complex128).ravel()

    @property
    def is_holomorphic(self) -> bool:
        return all(c.is_holomorphic for c in self.components)

    @property
    def is_antiholomorphic(self) -> bool:
        return all(c.is_antiholomorphic for c in self.components)


def d(expr: FieldExpr) -> FieldExpr:
    """Exact ∂ = ½(∂₁ − i∂₂)."""
    return expr.d()


def dbar(expr: FieldExpr) -> FieldExpr:
    """Exact ∂̄ = ½(∂₁ + i∂₂)."""
    return expr.dbar()


def parse_field(text: str) -> FieldExpr:
    return FieldExpr.parse(text)


def fd_step(pt: complex, base: float = 1e-5) -> float:
    """Central-difference step scaled to the point magnitude."""
    return base * max(1.0, abs(pt))


def fd_check(
    expr: FieldExpr,
    pt: complex,
    h: float | None = None,
    radius: float = EXCLUSION_RADIUS,
) -> float:
    """Max relative gap between exact and finite-difference Wirtinger derivatives.

    The whole stencil must lie outside the exclusion radius.

    Raises:
        SingularPointError: If pt (or a stencil point) is near a singularity
    """
    from .quadrature import wirtinger_fd

    step = fd_step(pt) if h is None else h
    registry = expr.singularities().with_radius(radius)
    for offset in (0, step, -step, 1j * step, -1j * step):
        registry.require_safe(pt + offset, what="fd_check")

    exact_d = complex(expr.d()(pt))
    exact_dbar = complex(expr.dbar()(pt))
    approx_d, approx_dbar = wirtinger_fd(expr, pt, step)
    scale = max(1.0, abs(exact_d), abs(exact_dbar))
    deviation = max(abs(exact_d - approx_d), abs(exact_dbar - approx_dbar)) / scale
    logger.debug("Wirtinger finite-difference check", pt=pt, deviation=deviation)
    return float(deviation)
