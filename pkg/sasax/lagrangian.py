"""Exact check of the Lagrangian cylinders and tori in the punctured T⁴.

The symplectic form on T⁴ = R⁴/Z⁴ is

    ω = dx1∧dx2 + dx3∧dx4 + dx2∧dx3 + δ dx1∧dx4 + dx2∧dx4 - δ dx1∧dx3,

and Y is T⁴ minus ε-neighbourhoods of the tori T12, T13, T14. The boundary
components of Y are

    ∂12:  x3² + x4² = ε²
    ∂13:  x2² + (x4 - 1/2)² = ε²
    ∂14:  (x2 - 1/2)² + (x3 - 1/2)² = ε²

Everything is computed with δ and ε as formal positive symbols. Sign
questions are settled under 0 < ε ≪ δ ≪ 1: the sign of a polynomial is the
sign of its term of lowest ε-degree, ties broken by lowest δ-degree. Circle
parameters are c = cos θ and s = sin θ, reduced modulo c² + s² - 1.
"""

import logging
from itertools import combinations, product
from typing import Dict, List, Optional, Tuple

import sympy as sp
from flax.struct import dataclass, field

from sasax.errors import LagrangianError

logger = logging.getLogger(__name__)

EPS, DELTA = sp.symbols("epsilon delta", positive=True)

# Sample point used only when a sign cannot be read off a polynomial
SAMPLE = {EPS: sp.Rational(1, 10**6), DELTA: sp.Rational(1, 10**3)}

FORM = {
    (0, 1): sp.Integer(1),
    (2, 3): sp.Integer(1),
    (1, 2): sp.Integer(1),
    (0, 3): DELTA,
    (1, 3): sp.Integer(1),
    (0, 2): -DELTA,
}

HALF = sp.Rational(1, 2)
SLOPE = HALF - 2 * EPS

BOUNDARIES = {
    "d12": lambda x: x[2] ** 2 + x[3] ** 2,
    "d13": lambda x: x[1] ** 2 + (x[3] - HALF) ** 2,
    "d14": lambda x: (x[1] - HALF) ** 2 + (x[2] - HALF) ** 2,
}

# Pairs meeting in exactly one point; every other pair is disjoint
EXPECTED_POINTS = {("C1", "T1"): 1, ("C2", "T2"): 1}


def omega(u: Tuple[sp.Expr, ...], v: Tuple[sp.Expr, ...]) -> sp.Expr:
    """Evaluate ω on two tangent vectors."""
    return sum(
        w * (u[i] * v[j] - u[j] * v[i]) for (i, j), w in FORM.items()
    )


def _leading_sign(poly_expr: sp.Expr) -> int:
    poly_expr = sp.expand(poly_expr)
    if poly_expr == 0:
        return 0
    try:
        poly = sp.Poly(poly_expr, EPS, DELTA)
    except sp.PolynomialError:
        logger.warning(
            "no polynomial sign for %s, evaluating at %s", poly_expr, SAMPLE
        )
        return int(sp.sign(poly_expr.subs(SAMPLE)))
    _, coeff = min(poly.terms(), key=lambda term: term[0])
    return 1 if coeff > 0 else -1


def asymptotic_sign(expr: sp.Expr) -> int:
    """Sign of an expression in ε, δ for 0 < ε ≪ δ ≪ 1.

    Args:
        expr: A rational function of ε and δ.

    Returns:
        -1, 0 or 1.
    """
    num, den = sp.fraction(sp.together(sp.sympify(expr)))
    return _leading_sign(num) * _leading_sign(den)


def reduce_on_circle(expr: sp.Expr, c: sp.Symbol, s: sp.Symbol) -> sp.Expr:
    """Remainder of the numerator of expr modulo c² + s² - 1."""
    num, _ = sp.fraction(sp.together(sp.expand(expr)))
    _, remainder = sp.reduced(sp.expand(num), [c**2 + s**2 - 1], c, s)
    return sp.expand(remainder)


@dataclass
class Chart:
    """A parametrized Lagrangian piece in T⁴.

    Attributes:
        name: C1, C2, T1 or T2.
        point: The four coordinates as expressions in the parameters.
        free: Index of the coordinate that runs over a full circle.
        interval: The cylinder parameter t ∈ [0, 1], for cylinders.
        angle: The pair (c, s), for tori.
    """

    name: str = field(pytree_node=False)
    point: Tuple[sp.Expr, ...] = field(pytree_node=False)
    free: int = field(pytree_node=False)
    interval: Optional[sp.Symbol] = field(pytree_node=False, default=None)
    angle: Optional[Tuple[sp.Symbol, sp.Symbol]] = field(
        pytree_node=False, default=None
    )

    @property
    def unknowns(self) -> Tuple[sp.Symbol, ...]:
        """The non-circle parameters."""
        return (self.interval,) if self.interval is not None else self.angle

    def tangents(self) -> Tuple[Tuple[sp.Expr, ...], Tuple[sp.Expr, ...]]:
        """Tangent frame: ∂/∂x_free and the derivative in t or θ."""
        axis = tuple(
            sp.Integer(1 if i == self.free else 0) for i in range(4)
        )
        if self.interval is not None:
            other = tuple(sp.diff(x, self.interval) for x in self.point)
        else:
            c, s = self.angle
            other = tuple(
                sp.expand(-s * sp.diff(x, c) + c * sp.diff(x, s))
                for x in self.point
            )
        return axis, other

    def constrained(self) -> Tuple[int, ...]:
        """Indices of coordinates that are not free circle coordinates."""
        return tuple(i for i in range(4) if i != self.free)


def chart(name: str, tag: str = "") -> Chart:
    """Build the chart of one piece, with parameter symbols suffixed by tag."""
    x1, x3, x4 = sp.symbols(f"x1{tag} x3{tag} x4{tag}", real=True)
    t = sp.Symbol(f"t{tag}", real=True)
    c, s = sp.symbols(f"c{tag} s{tag}", real=True)
    ratio = EPS / DELTA
    if name == "C1":
        point = (x1, -DELTA * SLOPE * (t - 1), sp.Integer(0), EPS + SLOPE * t)
        return Chart(name=name, point=point, free=0, interval=t)
    if name == "C2":
        point = (
            x1,
            HALF + DELTA * SLOPE * (t - 1),
            EPS + SLOPE * t,
            sp.Integer(0),
        )
        return Chart(name=name, point=point, free=0, interval=t)
    if name == "T1":
        point = (HALF - ratio * (s - c), EPS * c, x3, HALF + EPS * s)
        return Chart(name=name, point=point, free=2, angle=(c, s))
    if name == "T2":
        point = (HALF - ratio * (s + c), HALF + EPS * c, HALF + EPS * s, x4)
        return Chart(name=name, point=point, free=3, angle=(c, s))
    raise LagrangianError(f"unknown Lagrangian piece {name!r}")


PIECES = ("C1", "C2", "T1", "T2")


def is_isotropic(piece: Chart) -> bool:
    """Whether ω vanishes on the tangent frame of a chart."""
    u, v = piece.tangents()
    value = sp.expand(omega(u, v))
    if piece.angle is not None:
        value = reduce_on_circle(value, *piece.angle)
    return sp.simplify(value) == 0


def _interval(expr: sp.Expr, piece: Chart) -> Tuple[sp.Expr, sp.Expr]:
    """Conservative bounds for a coordinate that is linear in t, c and s."""
    lo = hi = expr
    for var in piece.unknowns:
        coeff = sp.expand(expr).coeff(var)
        lo, hi = lo - coeff * var, hi - coeff * var
        sign = asymptotic_sign(coeff)
        if piece.interval is not None and sign < 0:
            lo += coeff
        elif piece.interval is not None:
            hi += coeff
        else:
            lo -= sign * coeff
            hi += sign * coeff
    return sp.expand(lo), sp.expand(hi)


def _lifts(a: Chart, b: Chart, i: int) -> List[int]:
    """Integers k with a[i] - b[i] = k possible, from coordinate ranges."""
    lo_a, hi_a = _interval(a.point[i], a)
    lo_b, hi_b = _interval(b.point[i], b)
    lo, hi = lo_a - hi_b, hi_a - lo_b
    return [
        k
        for k in (-1, 0, 1)
        if asymptotic_sign(k - lo) >= 0 and asymptotic_sign(hi - k) >= 0
    ]


def _is_real(value: sp.Expr) -> bool:
    if value.has(sp.I):
        return False
    for power in value.atoms(sp.Pow):
        if power.exp.is_Rational and power.exp.q == 2:
            if asymptotic_sign(power.base) < 0:
                return False
    return True


def _in_unit_interval(value: sp.Expr) -> bool:
    return asymptotic_sign(value) >= 0 and asymptotic_sign(1 - value) >= 0


@dataclass
class IntersectionResult:
    """Intersection of two Lagrangian pieces.

    Attributes:
        pair: The two piece names.
        points: Parameter values at each intersection point.
        transverse: Whether the tangent frames span R⁴ at every point.
        separated_by: Coordinate index whose ranges never overlap, if any.
        expected: Number of points the configuration should have.
    """

    pair: Tuple[str, str]
    points: Tuple[Dict[str, str], ...]
    transverse: bool
    separated_by: Optional[int]
    expected: int

    @property
    def ok(self) -> bool:
        """Whether the count matches and all points are transverse."""
        return len(self.points) == self.expected and self.transverse


def intersect(name_a: str, name_b: str) -> IntersectionResult:
    """Solve for the intersection points of two pieces.

    Only coordinates constrained on both sides give equations. Each such
    equation holds up to an integer lift k, and the candidate lifts are the
    integers inside the range of the coordinate difference. If some
    coordinate admits no lift the pieces are disjoint.
    """
    a, b = chart(name_a, "_a"), chart(name_b, "_b")
    shared = [i for i in a.constrained() if i in b.constrained()]
    expected = EXPECTED_POINTS.get((name_a, name_b), 0)

    lifts = {i: _lifts(a, b, i) for i in shared}
    for i, ks in lifts.items():
        if not ks:
            logger.debug("%s and %s separated in x%d", name_a, name_b, i + 1)
            return IntersectionResult(
                pair=(name_a, name_b),
                points=(),
                transverse=True,
                separated_by=i,
                expected=expected,
            )

    unknowns = list(a.unknowns) + list(b.unknowns)
    circles = [
        p.angle[0] ** 2 + p.angle[1] ** 2 - 1
        for p in (a, b)
        if p.angle is not None
    ]
    points = []
    transverse = True
    for ks in product(*(lifts[i] for i in shared)):
        equations = [
            a.point[i] - b.point[i] - k for i, k in zip(shared, ks)
        ] + circles
        for solution in sp.solve(equations, unknowns, dict=True):
            if set(unknowns) - set(solution):
                raise LagrangianError(
                    f"{name_a} and {name_b} meet in a positive-dimensional set"
                )
            values = {u: sp.simplify(solution[u]) for u in unknowns}
            if not all(_is_real(v) for v in values.values()):
                continue
            if not all(
                _in_unit_interval(values[p.interval])
                for p in (a, b)
                if p.interval is not None
            ):
                continue
            frame = [
                [sp.simplify(x.subs(values)) for x in vector]
                for p in (a, b)
                for vector in p.tangents()
            ]
            det = sp.simplify(sp.Matrix(frame).det())
            transverse = transverse and asymptotic_sign(det) != 0
            points.append({str(u): str(v) for u, v in values.items()})

    logger.debug("%s ∩ %s: %d point(s)", name_a, name_b, len(points))
    return IntersectionResult(
        pair=(name_a, name_b),
        points=tuple(points),
        transverse=transverse,
        separated_by=None,
        expected=expected,
    )


def _nonnegative_in(expr: sp.Expr, var: sp.Symbol) -> bool:
    poly = sp.Poly(sp.expand(expr), var)
    return all(asymptotic_sign(coeff) >= 0 for coeff in poly.all_coeffs())


def stays_outside(piece: Chart, boundary: str) -> bool:
    """Whether a cylinder stays in the closed region outside a tube.

    The squared distance minus ε² is shown nonnegative on [0, 1] either by a
    coefficient sign check in t or in u = 1 - t, or because one of its two
    squared terms is a constant exceeding ε².
    """
    t = piece.interval
    x = piece.point
    gap = sp.expand(BOUNDARIES[boundary](x) - EPS**2)
    if _nonnegative_in(gap, t):
        return True
    u = sp.Symbol("u", real=True)
    if _nonnegative_in(sp.expand(gap.subs(t, 1 - u)), u):
        return True
    terms = {
        "d12": (x[2], x[3]),
        "d13": (x[1], x[3] - HALF),
        "d14": (x[1] - HALF, x[2] - HALF),
    }[boundary]
    return any(
        not term.has(t) and asymptotic_sign(term**2 - EPS**2) > 0
        for term in terms
    )


def on_boundary(piece: Chart, boundary: str, at: Dict = None) -> bool:
    """Whether a piece, or a slice of it, lies on a boundary component."""
    x = [e.subs(at or {}) for e in piece.point]
    value = sp.expand(BOUNDARIES[boundary](x) - EPS**2)
    if piece.angle is not None:
        value = reduce_on_circle(value, *piece.angle)
    return sp.simplify(value) == 0


@dataclass
class LagrangianReport:
    """Outcome of verify_lagrangian_config.

    Attributes:
        isotropic: Per piece, whether ω vanishes on its tangent frame.
        intersections: Per pair of pieces, the intersection data.
        boundary: Named boundary and containment checks.
    """

    isotropic: Tuple[Tuple[str, bool], ...]
    intersections: Tuple[IntersectionResult, ...]
    boundary: Tuple[Tuple[str, bool], ...]

    @property
    def ok(self) -> bool:
        """Whether every check passed."""
        return (
            all(v for _, v in self.isotropic)
            and all(r.ok for r in self.intersections)
            and all(v for _, v in self.boundary)
        )


def verify_lagrangian_config() -> LagrangianReport:
    """Check that C1, C2, T1, T2 form the required Lagrangian configuration.

    Returns:
        A LagrangianReport. The configuration is correct iff report.ok.
    """
    isotropic = tuple((name, is_isotropic(chart(name))) for name in PIECES)
    intersections = tuple(intersect(a, b) for a, b in combinations(PIECES, 2))

    c1, c2 = chart("C1"), chart("C2")
    boundary = [
        ("T1 in d13", on_boundary(chart("T1"), "d13")),
        ("T2 in d14", on_boundary(chart("T2"), "d14")),
        ("C1(t=0) in d12", on_boundary(c1, "d12", {c1.interval: 0})),
        ("C1(t=1) in d13", on_boundary(c1, "d13", {c1.interval: 1})),
        ("C2(t=0) in d12", on_boundary(c2, "d12", {c2.interval: 0})),
        ("C2(t=1) in d14", on_boundary(c2, "d14", {c2.interval: 1})),
    ]
    for piece in (c1, c2):
        for name in BOUNDARIES:
            boundary.append(
                (f"{piece.name} outside {name}", stays_outside(piece, name))
            )

    report = LagrangianReport(
        isotropic=isotropic,
        intersections=intersections,
        boundary=tuple(boundary),
    )
    logger.info("Lagrangian configuration verified: %s", report.ok)
    return report
