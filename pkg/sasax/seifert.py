import logging
from enum import Enum
from fractions import Fraction
from math import floor, gcd, lcm
from typing import Dict, Optional, Sequence, Tuple

from flax.struct import dataclass, field

from sasax.errors import LatticeError, OrbifoldError, TwistSearchError
from sasax.lattice import (
    is_primitive,
    mod_inverse,
    surjects_onto_cyclic_sum,
)
from sasax.manifold import Flag, ManifoldModel, Pi1Status

logger = logging.getLogger(__name__)

DEFAULT_TWIST_BOUND = 8
DEFAULT_TWIST_K = 1


class LocalCase(str, Enum):
    """Types of a point in a 4-orbifold with isotropy C²/Z_m."""

    REGULAR = "regular"
    A = "a"  # isolated singular point
    B = "b"  # smooth point where two isotropy surfaces cross
    C = "c"  # singular point where two isotropy surfaces cross
    D = "d"  # smooth point on one isotropy surface
    E = "e"  # singular point on one isotropy surface


@dataclass
class LocalModel:
    """Local model C²/Z_m with ξ·(z₁, z₂) = (ξ^j₁ z₁, ξ^j₂ z₂).

    Attributes:
        m: Order of the isotropy group.
        j1: First action exponent.
        j2: Second action exponent.
        m1: Multiplicity of the surface {z₂ = 0}, gcd(j₁, m).
        m2: Multiplicity of the surface {z₁ = 0}, gcd(j₂, m).
        d: Order of π₁ of the link, m / (m₁m₂).
        case: Which of the five point types occurs.
    """

    m: int
    j1: int
    j2: int
    m1: int
    m2: int
    d: int
    case: LocalCase

    @property
    def smooth(self) -> bool:
        """The underlying space is smooth iff the link is simply connected."""
        return self.d == 1


def classify_local_model(m: int, j1: int, j2: int) -> LocalModel:
    """Classify the point 0 ∈ C²/Z_m for an effective diagonal action.

    Args:
        m: The group order, at least 1.
        j1: Exponent on the first coordinate.
        j2: Exponent on the second coordinate.

    Returns:
        The LocalModel, with case "regular" when m = 1.
    """
    if m < 1:
        raise OrbifoldError(f"isotropy order must be positive, got {m}")
    if gcd(j1, j2, m) != 1:
        raise OrbifoldError(
            f"non-effective action: gcd({j1}, {j2}, {m}) = {gcd(j1, j2, m)}"
        )
    m1, m2 = gcd(j1, m), gcd(j2, m)
    d = m // (m1 * m2)
    if m == 1:
        case = LocalCase.REGULAR
    elif m1 > 1 and m2 > 1:
        case = LocalCase.B if d == 1 else LocalCase.C
    elif m1 > 1 or m2 > 1:
        case = LocalCase.D if d == 1 else LocalCase.E
    else:
        case = LocalCase.A
    return LocalModel(m=m, j1=j1, j2=j2, m1=m1, m2=m2, d=d, case=case)


@dataclass
class OrbifoldStructure:
    """A smooth orbifold structure on a ManifoldModel.

    Attributes:
        base: The underlying 4-manifold.
        isotropy: (surface name, multiplicity) for each isotropy surface.
        local_models: Local model at generic points of each surface, and at
            each crossing of two isotropy surfaces.
        semi_regular: Every point is of case (b) or (d), or regular.
    """

    base: ManifoldModel
    isotropy: Tuple[Tuple[str, int], ...] = field(pytree_node=False)
    local_models: Tuple[Tuple[str, LocalModel], ...] = field(
        pytree_node=False
    )
    semi_regular: bool = field(pytree_node=False)

    def multiplicity(self, name: str) -> int:
        """Isotropy order along a named surface."""
        return dict(self.isotropy)[name]


def validate_orbifold(
    model: ManifoldModel, iso: Sequence[Tuple[str, int]]
) -> OrbifoldStructure:
    """Check that a configuration of surfaces defines a smooth orbifold.

    Isotropy surfaces must be symplectic and meet positively, and the
    multiplicities of every intersecting pair must be coprime.

    Args:
        model: The base 4-manifold.
        iso: (surface name, multiplicity ≥ 2) pairs.

    Returns:
        The validated OrbifoldStructure.
    """
    iso = tuple((name, int(m)) for name, m in iso)
    names = [name for name, _ in iso]
    if len(set(names)) != len(names):
        raise OrbifoldError(f"repeated isotropy surface in {names}")
    for name, m in iso:
        if not model.surface(name).has(Flag.SYMPLECTIC):
            raise OrbifoldError(f"isotropy surface {name} is not symplectic")
        if m < 2:
            raise OrbifoldError(f"multiplicity of {name} must be ≥ 2, got {m}")

    local = [(name, classify_local_model(m, 0, 1)) for name, m in iso]
    for i, (a, ma) in enumerate(iso):
        for b, mb in iso[i + 1 :]:
            meets = model.pairing(a, b)
            if meets < 0:
                raise OrbifoldError(
                    f"{a} and {b} intersect negatively ({meets})"
                )
            if meets == 0:
                continue
            if gcd(ma, mb) != 1:
                raise OrbifoldError(
                    f"multiplicities of intersecting {a} ({ma}) and "
                    f"{b} ({mb}) are not coprime"
                )
            local.append((f"{a}∩{b}", classify_local_model(ma * mb, ma, mb)))

    semi_regular = all(
        lm.case in (LocalCase.B, LocalCase.D) for _, lm in local
    )
    return OrbifoldStructure(
        base=model,
        isotropy=iso,
        local_models=tuple(local),
        semi_regular=semi_regular,
    )


def prime_power_multiplicities(n: int, p: int) -> Tuple[int, ...]:
    """Multiplicities p, p², ..., pⁿ."""
    return tuple(p**i for i in range(1, n + 1))


@dataclass
class OrbitInvariant:
    """Seifert invariant (D, m, j) of an isotropy surface.

    Attributes:
        surface: Name of the surface D.
        m: Multiplicity m ≥ 2.
        j: Exponent 0 < j < m, coprime to m.
        b: The inverse of j modulo m.
    """

    surface: str
    m: int
    j: int
    b: int


@dataclass
class SeifertBundle:
    """A quasi-regular Seifert bundle over a smooth orbifold.

    Attributes:
        orbifold: The validated base orbifold.
        invariants: One OrbitInvariant per isotropy surface.
        background: c₁(B) of the background line bundle in the tracked basis.
        m_x: The lcm of all multiplicities.
    """

    orbifold: OrbifoldStructure
    invariants: Tuple[OrbitInvariant, ...] = field(pytree_node=False)
    background: Tuple[int, ...] = field(pytree_node=False)
    m_x: int = field(pytree_node=False)

    @property
    def base(self) -> ManifoldModel:
        """The underlying 4-manifold."""
        return self.orbifold.base


def make_bundle(
    orbifold: OrbifoldStructure,
    exponents: Optional[Sequence[int]] = None,
    background: Optional[Sequence[int]] = None,
) -> SeifertBundle:
    """Attach orbit invariants and a background class to an orbifold.

    Args:
        orbifold: A validated orbifold.
        exponents: jᵢ per isotropy surface, in isotropy order (default all 1).
        background: c₁(B) in the tracked basis (default 0).

    Returns:
        The SeifertBundle with bᵢ = jᵢ⁻¹ mod mᵢ.
    """
    n = len(orbifold.base.surfaces)
    exponents = exponents or [1] * len(orbifold.isotropy)
    background = tuple(background) if background is not None else (0,) * n
    if len(exponents) != len(orbifold.isotropy):
        raise OrbifoldError("one exponent per isotropy surface is required")
    if len(background) != n:
        raise OrbifoldError(
            f"background has {len(background)} entries, expected {n}"
        )

    invariants = []
    for (name, m), j in zip(orbifold.isotropy, exponents):
        j = j % m
        try:
            b = mod_inverse(j, m)
        except LatticeError as err:
            raise OrbifoldError(f"{name}: {err}") from err
        invariants.append(OrbitInvariant(surface=name, m=m, j=j, b=b))

    return SeifertBundle(
        orbifold=orbifold,
        invariants=tuple(invariants),
        background=background,
        m_x=lcm(*(m for _, m in orbifold.isotropy)) if invariants else 1,
    )


def twisted(bundle: SeifertBundle, a: Sequence[int]) -> SeifertBundle:
    """Tensor with the line bundle of class a."""
    if len(a) != len(bundle.background):
        raise OrbifoldError("twist has the wrong length")
    return bundle.replace(
        background=tuple(x + y for x, y in zip(bundle.background, a))
    )


def chern_class(bundle: SeifertBundle) -> Tuple[Fraction, ...]:
    """Orbifold first Chern class c₁(M/X) = c₁(B) + Σ (bᵢ/mᵢ)[Dᵢ]."""
    c = [Fraction(x) for x in bundle.background]
    for inv in bundle.invariants:
        c[bundle.base.index(inv.surface)] += Fraction(inv.b, inv.m)
    return tuple(c)


def orbifold_chern_class(bundle: SeifertBundle) -> Tuple[int, ...]:
    """The integral class c₁(M/μ) = m_X · c₁(M/X)."""
    c = [bundle.m_x * x for x in chern_class(bundle)]
    assert all(x.denominator == 1 for x in c)
    return tuple(int(x) for x in c)


def perturbed_form_class(
    bundle: SeifertBundle, k: int = DEFAULT_TWIST_K
) -> Tuple[Fraction, ...]:
    """The class c₁(M/X) / (m_X k + 1) approximating a symplectic class."""
    scale = bundle.m_x * k + 1
    return tuple(x / scale for x in chern_class(bundle))


@dataclass
class HomologyReport:
    """Homology of the total space of a Seifert bundle.

    Attributes:
        h1_zero: Whether H₁(M, Z) = 0.
        conditions: Each criterion with whether it holds.
        reasons: Explanations for failed criteria.
        rank: Free rank k of H₂(M, Z), when h1_zero.
        torsion: (modulus mᵢ, exponent 2gᵢ) per isotropy surface.
        assumptions: Identifications used in the computation.
    """

    h1_zero: bool
    conditions: Tuple[Tuple[str, bool], ...]
    reasons: Tuple[str, ...] = ()
    rank: Optional[int] = None
    torsion: Tuple[Tuple[int, int], ...] = ()
    assumptions: Tuple[str, ...] = ()

    @property
    def torsion_order(self) -> int:
        """|Tor H₂(M, Z)| = ∏ mᵢ^(2gᵢ)."""
        order = 1
        for modulus, exponent in self.torsion:
            order *= modulus**exponent
        return order


ASSUMPTIONS = (
    "H²(X, Z) is identified with the span of the tracked classes",
    "H₁(M) = 0 iff π₁ criterion, surjectivity and primitivity all hold",
)


def kollar_h1_check(bundle: SeifertBundle) -> HomologyReport:
    """Decide whether H₁(M, Z) = 0 for a semi-regular Seifert bundle.

    The three criteria are: the base has H₁ = 0; the restriction
    H²(X, Z) → ⊕ H²(Dᵢ, Z/mᵢ) is onto; and c₁(M/μ) is primitive.
    """
    orbifold = bundle.orbifold
    if not orbifold.semi_regular:
        raise OrbifoldError("theorem hypothesis (semi-regular) unmet")
    base = bundle.base
    reasons = []

    base_ok = base.pi1.status == Pi1Status.YES
    if not base_ok:
        reasons.append(
            f"H₁ of the base is not known to vanish: {base.pi1.status.value}"
        )

    columns = [base.index(inv.surface) for inv in bundle.invariants]
    pairings = base.gram.submatrix(range(len(base.surfaces)), columns)
    moduli = [inv.m for inv in bundle.invariants]
    onto = surjects_onto_cyclic_sum(pairings, moduli)
    if not onto:
        reasons.append("H²(X, Z) does not surject onto ⊕ H²(Dᵢ, Z/mᵢ)")

    c1 = orbifold_chern_class(bundle)
    try:
        primitive = is_primitive(c1)
    except LatticeError:
        primitive = False
    if not primitive:
        reasons.append(f"c₁(M/μ) is not primitive (gcd {gcd(*c1)})")

    conditions = (
        ("base H1 vanishes", base_ok),
        ("restriction is onto", onto),
        ("c1(M/mu) primitive", primitive),
    )
    logger.info("H₁ criteria: %s", dict(conditions))
    return HomologyReport(
        h1_zero=base_ok and onto and primitive,
        conditions=conditions,
        reasons=tuple(reasons),
        assumptions=ASSUMPTIONS,
    )


def homology_of_total(bundle: SeifertBundle) -> HomologyReport:
    """H₂(M, Z) = Z^k ⊕ ⊕ (Z/mᵢ)^(2gᵢ) with k + 1 = b₂(X)."""
    report = kollar_h1_check(bundle)
    if not report.h1_zero:
        raise OrbifoldError(f"H₁(M) ≠ 0: {'; '.join(report.reasons)}")
    base = bundle.base
    torsion = tuple(
        (inv.m, 2 * base.surface(inv.surface).genus)
        for inv in bundle.invariants
    )
    return report.replace(rank=base.b2 - 1, torsion=torsion)


def _round(x: Fraction) -> int:
    return floor(x + Fraction(1, 2))


def _linf_shell(center: Sequence[int], radius: int):
    """Integer vectors at L∞ distance exactly radius, lexicographically.

    Interior points are never generated: when no earlier coordinate sits at
    ±radius the last one is forced there. The shell still has
    (2r+1)ⁿ - (2r-1)ⁿ points, so exhausting it is only feasible for small
    n. Over a base with 36 generators a search that succeeds does so within
    the first few candidates of radius 1, and a search bound above 1 is
    never exhausted in practice.
    """
    n = len(center)
    offset = [0] * n

    def fill(i: int, reached: bool):
        if i == n:
            if reached or radius == 0:
                yield tuple(c + o for c, o in zip(center, offset))
            return
        values = range(-radius, radius + 1)
        if i == n - 1 and not reached and radius > 0:
            values = (-radius, radius)
        for v in values:
            offset[i] = v
            yield from fill(i + 1, reached or abs(v) == radius)

    yield from fill(0, False)


def choose_primitive_twist(
    bundle: SeifertBundle,
    omega: Optional[Sequence[Fraction]] = None,
    *,
    bound: int = DEFAULT_TWIST_BOUND,
    k: int = DEFAULT_TWIST_K,
) -> SeifertBundle:
    """Twist by a line bundle so that c₁(M/μ) becomes primitive.

    Candidates a are searched in shells of increasing L∞ distance around a
    center, ties broken lexicographically. Without omega the center is 0.
    With omega the center is the integer vector closest to
    (m_X k + 1)·ω - c₁(M/X), so that the perturbed class of the result
    approximates ω.

    Args:
        bundle: The bundle to twist.
        omega: Optional target rational class.
        bound: Maximal L∞ distance from the center.
        k: The positive integer k of the perturbation.

    Returns:
        The twisted bundle with primitive c₁(M/μ).
    """
    base = bundle.base
    n = len(base.surfaces)
    sigma = [0] * n
    for inv in bundle.invariants:
        sigma[base.index(inv.surface)] += inv.b * (bundle.m_x // inv.m)
    if not any(sigma) or not is_primitive(sigma):
        raise OrbifoldError(
            "twist hypothesis unmet: Σ bᵢ(m_X/mᵢ)[Dᵢ] is not primitive"
        )
    if base.b2 is None or base.b2 < 3:
        raise OrbifoldError(
            f"twist hypothesis unmet: b₂(base) = {base.b2} is below 3"
        )

    if omega is None:
        center = (0,) * n
    else:
        if len(omega) != n:
            raise OrbifoldError("omega has the wrong length")
        c0 = chern_class(bundle)
        scale = bundle.m_x * k + 1
        center = tuple(
            _round(scale * Fraction(w) - c) for w, c in zip(omega, c0)
        )

    c1 = orbifold_chern_class(bundle)
    for radius in range(bound + 1):
        for a in _linf_shell(center, radius):
            candidate = [x + bundle.m_x * y for x, y in zip(c1, a)]
            if any(candidate) and is_primitive(candidate):
                logger.info("primitive twist at L∞ radius %d", radius)
                return twisted(bundle, a)
    raise TwistSearchError(bound)


@dataclass
class KContactCertificate:
    """Record that the hypotheses of the K-contact existence theorem hold.

    Attributes:
        hypotheses: Each verified hypothesis with a short justification.
        conclusion: The statement that follows.
    """

    hypotheses: Tuple[Tuple[str, str], ...]
    conclusion: str


def certify_kcontact(
    bundle: SeifertBundle, omega_class: Sequence[Fraction]
) -> KContactCertificate:
    """Certify that the total space carries a K-contact structure.

    The base orbifold is re-validated, and c₁(M/X) must equal the given
    rational symplectic class exactly.
    """
    orbifold = bundle.orbifold
    validate_orbifold(orbifold.base, orbifold.isotropy)
    c1 = chern_class(bundle)
    omega_class = tuple(Fraction(x) for x in omega_class)
    if c1 != omega_class:
        raise OrbifoldError(
            f"c₁(M/X) = {_fmt(c1)} does not match [ω] = {_fmt(omega_class)}"
        )
    hypotheses = (
        (
            "smooth orbifold",
            f"{len(orbifold.isotropy)} isotropy surfaces, "
            "intersecting multiplicities coprime",
        ),
        ("symplectic isotropy", "every isotropy surface is symplectic"),
        ("rational class", "[ω] has rational coefficients"),
        ("chern class", "c₁(M/X) = [ω] in the tracked basis"),
    )
    return KContactCertificate(
        hypotheses=hypotheses,
        conclusion="M admits a K-contact structure with c₁(M/X) = [ω]",
    )


def _fmt(v: Sequence[Fraction]) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


def chern_summary(bundle: SeifertBundle) -> Dict[str, Tuple[str, ...]]:
    """Both Chern classes as decimal strings."""
    return {
        "c1_orbifold": tuple(str(x) for x in chern_class(bundle)),
        "c1_mu": tuple(str(x) for x in orbifold_chern_class(bundle)),
    }
