"""Arithmetic obstruction to Kähler surfaces spanned by disjoint curves.

Suppose a simply connected Kähler surface S with b₁ = 0, p_g = 0 has b = b₂(S)
disjoint smooth curves D₁, ..., D_b of genera gᵢ ≥ 1 spanning H₂(S, Q), with
D₁² = m₁ > 0 and Dᵢ² = -mᵢ < 0 otherwise. Noether's formula, adjunction and
the slope inequality for the Lefschetz fibration of the pencil |D₁| force
b ≤ 2g + 3 where g = max gᵢ, provided at least two gᵢ exceed 1 and g ≤ 3.
"""

import logging
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from flax.struct import dataclass
from sympy import factorint

from sasax.errors import ObstructionError

logger = logging.getLogger(__name__)

OBSTRUCTED = "obstructed"
INCONCLUSIVE = "inconclusive"

Hypotheses = Tuple[Tuple[str, bool], ...]


@dataclass
class CurveConfig:
    """A candidate configuration of disjoint curves spanning H₂.

    Attributes:
        genera: Genus of each curve, all at least 1.
        self_intersections: Dᵢ², exactly one of which is positive.
    """

    genera: Tuple[int, ...]
    self_intersections: Tuple[int, ...]

    def __post_init__(self):
        """Check the shape of the configuration."""
        if len(self.genera) != len(self.self_intersections):
            raise ObstructionError("one self-intersection per curve")
        if any(g < 1 for g in self.genera):
            raise ObstructionError("all genera must be at least 1")
        if any(d == 0 for d in self.self_intersections):
            raise ObstructionError("self-intersections must be nonzero")
        if sum(d > 0 for d in self.self_intersections) != 1:
            raise ObstructionError(
                "exactly one curve must have positive self-intersection"
            )

    @property
    def b(self) -> int:
        """Number of curves, which equals b₂(S)."""
        return len(self.genera)


def canonical_coeffs(c: CurveConfig) -> Tuple[Fraction, ...]:
    """Coefficients (2gᵢ - 2 - Dᵢ²)/Dᵢ² of K_S in the basis of the curves."""
    return tuple(
        Fraction(2 * g - 2 - d, d)
        for g, d in zip(c.genera, c.self_intersections)
    )


def k_squared(c: CurveConfig) -> Fraction:
    """K_S² = Σ (2gᵢ - 2 - Dᵢ²)²/Dᵢ² from adjunction."""
    return sum(
        (
            Fraction((2 * g - 2 - d) ** 2, d)
            for g, d in zip(c.genera, c.self_intersections)
        ),
        Fraction(0),
    )


def noether_k_squared(b: int) -> int:
    """K_S² = 12χ(O_S) - c₂(S) = 12 - (2 + b)."""
    if b < 1:
        raise ObstructionError(f"b must be at least 1, got {b}")
    return 10 - b


@dataclass
class QuadraticTest:
    """Where m₁ sits relative to the roots of m² - (4g₁+6)m + 4(g₁-1)².

    The roots are 2g₁ + 3 ± √(20g₁ + 5); comparisons are done by squaring.

    Attributes:
        g1: Genus of the positive curve.
        m1: Its self-intersection.
        value: The quadratic evaluated at m₁.
        upper: m₁ ≥ 2g₁ + 3 + √(20g₁ + 5).
        lower: m₁ ≤ 2g₁ + 3 - √(20g₁ + 5).
    """

    g1: int
    m1: int
    value: int
    upper: bool
    lower: bool

    @property
    def feasible(self) -> bool:
        """Whether the quadratic is nonnegative at m₁."""
        return self.value >= 0


def quadratic_branches(g1: int, m1: int) -> QuadraticTest:
    """Evaluate both branches of the quadratic bound exactly."""
    radicand = 20 * g1 + 5
    center = 2 * g1 + 3
    above, below = m1 - center, center - m1
    test = QuadraticTest(
        g1=g1,
        m1=m1,
        value=m1 * m1 - (4 * g1 + 6) * m1 + 4 * (g1 - 1) ** 2,
        upper=above >= 0 and above * above >= radicand,
        lower=below >= 0 and below * below >= radicand,
    )
    assert test.feasible == (test.upper or test.lower)
    return test


def m1_lower_bound(g1: int) -> int:
    """The bound m₁ ≥ 2g₁ + 3 forced by the quadratic.

    Valid exactly when the lower branch admits no m₁ ≥ 1, which holds for
    1 ≤ g₁ ≤ 3.
    """
    if g1 < 1:
        raise ObstructionError(f"genus must be at least 1, got {g1}")
    if quadratic_branches(g1, 1).lower:
        raise ObstructionError(
            f"second branch not excluded for g₁ = {g1}: "
            f"m₁ = 1 ≤ {2 * g1 + 3} - √{20 * g1 + 5}"
        )
    return 2 * g1 + 3


@dataclass
class RelativeInvariants:
    """Invariants of the Lefschetz fibration S̃ → P¹ of the pencil |D₁|.

    Attributes:
        k2: K²_{S̃/P¹} = 10 - b - m₁ + 8g - 8.
        chi: χ_π = g.
        slope: λ_π = K²_{S̃/P¹} / χ_π.
    """

    k2: int
    chi: int
    slope: Fraction


def relative_invariants(b: int, g: int, m1: int) -> RelativeInvariants:
    """Relative invariants after blowing up the m₁ base points."""
    if g < 1:
        raise ObstructionError(f"fiber genus must be at least 1, got {g}")
    k2 = 10 - b - m1 + 8 * g - 8
    return RelativeInvariants(k2=k2, chi=g, slope=Fraction(k2, g))


def slope_check(
    b: int, g: int, m1: int, *, allow_elliptic: bool = False
) -> bool:
    """Whether 4 - 4/g ≤ λ_π, i.e. 4g - 4 ≤ 2 - b - m₁ + 8g.

    Args:
        b: Number of curves.
        g: Fiber genus, at least 2 unless allow_elliptic.
        m1: Self-intersection of the positive curve.
        allow_elliptic: Accept g = 1, where the bound reads λ_π ≥ 0.

    Returns:
        True iff the lower slope inequality holds.
    """
    if g < 2 and not (allow_elliptic and g == 1):
        raise ObstructionError(
            f"slope inequality needs fiber genus g ≥ 2, got {g}"
        )
    return 4 * g - 4 <= relative_invariants(b, g, m1).k2


@dataclass
class DerivationStep:
    """One exact step of the obstruction chain.

    Attributes:
        name: Short identifier.
        values: Exact values as (key, decimal string) pairs.
        anchor: The formula the step applies.
    """

    name: str
    values: Tuple[Tuple[str, str], ...]
    anchor: str


def _step(name: str, anchor: str, **values) -> DerivationStep:
    return DerivationStep(
        name=name,
        values=tuple((k, str(v)) for k, v in values.items()),
        anchor=anchor,
    )


@dataclass
class ObstructionVerdict:
    """Outcome of the obstruction chain.

    Attributes:
        verdict: "obstructed" or "inconclusive".
        chain: The derivation steps.
        hypothesis_report: Each hypothesis with whether it holds.
        reasons: Why the verdict is inconclusive, if it is.
    """

    verdict: str
    chain: Tuple[DerivationStep, ...]
    hypothesis_report: Hypotheses
    reasons: Tuple[str, ...] = ()

    @property
    def obstructed(self) -> bool:
        """Whether no Kähler surface can carry the configuration."""
        return self.verdict == OBSTRUCTED


class GenusGate(ABC):
    """An abstract gate deciding which genus vectors the chain covers.

    The gate also fixes how strong the adjunction step is: with some curve
    other than D₁ of genus > 1, one adjunction term is at most -3.
    """

    @abstractmethod
    def hypotheses(self, genera: Sequence[int]) -> Hypotheses:
        """Evaluate the hypotheses on a genus vector.

        Args:
            genera: Genus of each curve.

        Returns:
            Each named hypothesis with whether it holds.
        """
        pass

    @abstractmethod
    def adjunction_floor(self, b: int) -> int:
        """Lower bound on (2g₁ - 2 - m₁)²/m₁ from Noether and adjunction."""
        pass

    @abstractmethod
    def m1_bound(self, g: int) -> Tuple[int, DerivationStep]:
        """Lower bound on m₁ with the step that justifies it."""
        pass


class TheoremGate(GenusGate):
    """At least two genera exceed 1 and the maximal genus is at most 3."""

    def hypotheses(self, genera: Sequence[int]) -> Hypotheses:
        """Two genera > 1, max genus ≤ 3."""
        return (
            ("at least two genera > 1", sum(g > 1 for g in genera) >= 2),
            ("max genus ≤ 3", max(genera) <= 3),
        )

    def adjunction_floor(self, b: int) -> int:
        """Terms i ≥ 2 are ≤ -1, and one of them is ≤ -3."""
        return noether_k_squared(b) + (b - 2) + 3

    def m1_bound(self, g: int) -> Tuple[int, DerivationStep]:
        """m₁ ≥ 2g + 3 from the quadratic, with g₁ = g."""
        bound = m1_lower_bound(g)
        below = quadratic_branches(g, bound - 1)
        return bound, _step(
            "quadratic",
            "m₁² - (4g₁+6)m₁ + 4(g₁-1)² ≥ 0, g₁ = g",
            g1=g,
            radicand=20 * g + 5,
            m1_min=bound,
            value_below=below.value,
        )


class EllipticRemarkGate(TheoremGate):
    """Also admit configurations in which every curve is a torus.

    All adjunction terms i ≥ 2 are then exactly -mᵢ ≤ -1, so m₁ ≥ 9 follows
    directly, which is enough to build the fibration.
    """

    def hypotheses(self, genera: Sequence[int]) -> Hypotheses:
        """Theorem hypotheses, or all genera equal to 1."""
        if all(g == 1 for g in genera):
            return (("all genera = 1", True),)
        return super().hypotheses(genera)

    def adjunction_floor(self, b: int) -> int:
        """Every term i ≥ 2 is ≤ -1."""
        return noether_k_squared(b) + (b - 1)

    def m1_bound(self, g: int) -> Tuple[int, DerivationStep]:
        """For g = 1 the floor reads m₁ ≥ 9 ≥ 2g + 3."""
        if g > 1:
            return super().m1_bound(g)
        floor = self.adjunction_floor(1)
        return 2 * g + 3, _step(
            "elliptic bound",
            "(2g₁-2-m₁)²/m₁ = m₁ when g₁ = 1",
            m1_min=floor,
            used=2 * g + 3,
        )


def obstruction_verdict(
    b: int, genera: Sequence[int], gate: Optional[GenusGate] = None
) -> ObstructionVerdict:
    """Decide whether b disjoint curves of the given genera can span H₂(S).

    Args:
        b: Number of curves, b₂(S).
        genera: Genus of each curve.
        gate: Which genus vectors are covered (default TheoremGate).

    Returns:
        "obstructed" with the full chain when no Kähler surface can carry the
        configuration, otherwise "inconclusive" with reasons.
    """
    gate = gate or TheoremGate()
    genera = tuple(int(g) for g in genera)
    if len(genera) != b:
        raise ObstructionError(f"{len(genera)} genera given for b = {b}")
    if any(g < 1 for g in genera):
        raise ObstructionError(
            "genus 0 curve is outside the scope of the obstruction"
        )

    report = gate.hypotheses(genera)
    g = max(genera)
    gate_step = _step(
        "gate",
        "hypotheses on the genera",
        g=g,
        above_one=sum(x > 1 for x in genera),
    )
    failed = [name for name, holds in report if not holds]
    if failed:
        return ObstructionVerdict(
            verdict=INCONCLUSIVE,
            chain=(gate_step,),
            hypothesis_report=report,
            reasons=tuple(f"hypothesis fails: {name}" for name in failed),
        )

    k2 = noether_k_squared(b)
    chain = [
        gate_step,
        _step("noether", "K² + c₂ = 12, c₂ = 2 + b", b=b, c2=2 + b, k2=k2),
        _step(
            "adjunction",
            "K² ≤ (2g₁-2-m₁)²/m₁ + Σ_{i≥2} -(2gᵢ-2+mᵢ)",
            k2=k2,
            floor=gate.adjunction_floor(b),
        ),
    ]
    m1, bound_step = gate.m1_bound(g)
    chain.append(bound_step)

    rel = relative_invariants(b, g, m1)
    holds = slope_check(b, g, m1, allow_elliptic=True)
    chain.append(
        _step(
            "slope",
            "4g - 4 ≤ 2 - b - m₁ + 8g",
            lhs=4 * g - 4,
            rhs=rel.k2,
            slope=rel.slope,
            holds=holds,
        )
    )
    if holds:
        return ObstructionVerdict(
            verdict=INCONCLUSIVE,
            chain=tuple(chain),
            hypothesis_report=report,
            reasons=(f"b = {b} ≤ {2 * g + 3} = 2g+3: no contradiction",),
        )

    chain.append(_step("conclusion", "b ≤ 2g + 3", b=b, bound=2 * g + 3))
    logger.info("b = %d > %d = 2g+3: obstructed", b, 2 * g + 3)
    return ObstructionVerdict(
        verdict=OBSTRUCTED,
        chain=tuple(chain),
        hypothesis_report=report,
    )


def _prime_power(n: int) -> Tuple[int, int]:
    factors = factorint(n)
    if len(factors) != 1:
        raise ObstructionError(
            f"corollary hypotheses unmet: {n} is not a prime power"
        )
    ((p, e),) = factors.items()
    return int(p), int(e)


def sasakian_excludability(
    h1_zero: bool,
    rank: int,
    torsion: Sequence[Tuple[int, int]],
    gate: Optional[GenusGate] = None,
) -> ObstructionVerdict:
    """Rule out semi-regular Sasakian structures from the homology of M.

    If H₁(M) = 0 and H₂(M) = Z^k ⊕ ⊕_{i=1}^{k+1} (Z/pⁱ)^(2gᵢ), any semi-regular
    Sasakian structure fibres over a Kähler orbifold whose ramification locus
    is k + 1 disjoint curves of genera gᵢ spanning H₂ of the base.

    Args:
        h1_zero: Whether H₁(M, Z) = 0.
        rank: The free rank k of H₂(M, Z).
        torsion: (modulus, exponent) summands (Z/modulus)^exponent.
        gate: Passed on to obstruction_verdict.

    Returns:
        The verdict for the forced configuration.
    """
    if not h1_zero:
        raise ObstructionError("corollary hypotheses unmet: H₁(M) ≠ 0")
    if rank < 0:
        raise ObstructionError("corollary hypotheses unmet: negative rank")
    b = rank + 1
    if len(torsion) != b:
        raise ObstructionError(
            f"corollary hypotheses unmet: {len(torsion)} torsion summands "
            f"for rank {rank}, expected {b}"
        )

    by_power = {}
    prime = None
    for modulus, exponent in torsion:
        p, e = _prime_power(int(modulus))
        if prime is not None and p != prime:
            raise ObstructionError(
                f"corollary hypotheses unmet: primes {prime} and {p} differ"
            )
        prime = p
        if e in by_power:
            raise ObstructionError(
                f"corollary hypotheses unmet: repeated exponent {e}"
            )
        if exponent < 2 or exponent % 2:
            raise ObstructionError(
                f"corollary hypotheses unmet: (Z/{modulus})^{exponent} does "
                "not come from a curve of positive genus"
            )
        by_power[e] = int(exponent) // 2
    if sorted(by_power) != list(range(1, b + 1)):
        raise ObstructionError(
            f"corollary hypotheses unmet: exponents {sorted(by_power)} are "
            f"not 1..{b}"
        )

    genera = [by_power[i] for i in range(1, b + 1)]
    verdict = obstruction_verdict(b, genera, gate)
    forced = _step(
        "forced base",
        "ramification locus of k+1 disjoint curves of genus gᵢ",
        b=b,
        prime=prime,
        genera=",".join(str(g) for g in genera),
    )
    return verdict.replace(chain=(forced,) + verdict.chain)
