from fractions import Fraction
from itertools import product
from math import gcd

import pytest

from sasax.builders import build_x, new_t4
from sasax.errors import OrbifoldError, TwistSearchError
from sasax.lattice import IntegerMatrix, is_primitive
from sasax.manifold import (
    Flag,
    ManifoldModel,
    Pi1State,
    Pi1Status,
    SurfaceClass,
)
from sasax.seifert import (
    LocalCase,
    _linf_shell,
    certify_kcontact,
    chern_class,
    choose_primitive_twist,
    classify_local_model,
    homology_of_total,
    kollar_h1_check,
    make_bundle,
    orbifold_chern_class,
    perturbed_form_class,
    prime_power_multiplicities,
    twisted,
    validate_orbifold,
)

SPHERE = frozenset({Flag.SYMPLECTIC, Flag.SPHERE})


def spheres(*squares: int) -> ManifoldModel:
    """A simply connected base with disjoint spheres of the given squares."""
    return ManifoldModel(
        euler_characteristic=2 + len(squares),
        pi1=Pi1State(status=Pi1Status.YES, generators=frozenset()),
        surfaces=tuple(
            SurfaceClass(f"D{i}", 0, q, SPHERE)
            for i, q in enumerate(squares, start=1)
        ),
        gram=IntegerMatrix.diagonal(list(squares)),
    )


def test_local_models() -> None:
    """Exhaustive scan of C²/Z_m for m ≤ 60."""
    counts = {case: 0 for case in LocalCase}
    for m in range(1, 61):
        for j1 in range(m):
            for j2 in range(m):
                if gcd(j1, j2, m) != 1:
                    with pytest.raises(OrbifoldError):
                        classify_local_model(m, j1, j2)
                    continue
                lm = classify_local_model(m, j1, j2)
                assert lm.m1 * lm.m2 * lm.d == m
                assert lm.smooth == (lm.d == 1)
                if lm.case == LocalCase.REGULAR:
                    assert m == 1
                elif lm.case in (LocalCase.B, LocalCase.C):
                    assert lm.m1 > 1 and lm.m2 > 1
                    assert (lm.case == LocalCase.B) == lm.smooth
                elif lm.case in (LocalCase.D, LocalCase.E):
                    assert (lm.m1 > 1) != (lm.m2 > 1)
                    assert (lm.case == LocalCase.D) == lm.smooth
                else:
                    assert lm.m1 == lm.m2 == 1 and lm.d == m
                counts[lm.case] += 1
    assert all(counts[case] > 0 for case in LocalCase)

    assert classify_local_model(6, 2, 3).case == LocalCase.B
    assert classify_local_model(5, 1, 2).case == LocalCase.A
    assert classify_local_model(4, 0, 1).case == LocalCase.D
    assert classify_local_model(8, 2, 1).case == LocalCase.E
    assert classify_local_model(12, 2, 3).d == 2


def test_validate_orbifold() -> None:
    """Intersecting isotropy surfaces need coprime multiplicities."""
    t4 = new_t4()
    orbifold = validate_orbifold(t4, [("T12", 2), ("T34", 3)])
    assert orbifold.semi_regular
    crossing = dict(orbifold.local_models)["T12∩T34"]
    assert crossing.case == LocalCase.B
    assert (crossing.m1, crossing.m2) == (2, 3)

    with pytest.raises(OrbifoldError, match="T12 \\(2\\) and T34 \\(4\\)"):
        validate_orbifold(t4, [("T12", 2), ("T34", 4)])
    with pytest.raises(OrbifoldError):
        validate_orbifold(t4, [("T12", 1)])
    with pytest.raises(OrbifoldError):
        validate_orbifold(t4, [("T12", 2), ("T12", 3)])


def test_chern_classes() -> None:
    """c₁(M/X) = c₁(B) + Σ (bᵢ/mᵢ)[Dᵢ] and c₁(M/μ) = m_X c₁(M/X)."""
    base = spheres(1, -1, -1)
    orbifold = validate_orbifold(base, [("D1", 2), ("D2", 3)])
    bundle = make_bundle(orbifold, exponents=[1, 2], background=[0, 0, 1])
    assert [inv.b for inv in bundle.invariants] == [1, 2]
    assert bundle.m_x == 6
    assert chern_class(bundle) == (Fraction(1, 2), Fraction(2, 3), 1)
    assert orbifold_chern_class(bundle) == (3, 4, 6)
    assert perturbed_form_class(bundle, 1) == (
        Fraction(1, 14),
        Fraction(2, 21),
        Fraction(1, 7),
    )

    shifted = twisted(bundle, [1, -1, 0])
    assert chern_class(shifted) == (Fraction(3, 2), Fraction(-1, 3), 1)

    with pytest.raises(OrbifoldError, match="orbit invariant not coprime"):
        make_bundle(
            validate_orbifold(base, [("D1", 4)]), exponents=[2]
        )


def test_kollar_criteria() -> None:
    """Each of the three H₁ criteria can fail on its own."""
    t4_orbifold = validate_orbifold(new_t4(), [("T12", 2)])
    report = kollar_h1_check(make_bundle(t4_orbifold))
    assert not report.h1_zero
    assert not dict(report.conditions)["base H1 vanishes"]

    even = spheres(2)
    report = kollar_h1_check(make_bundle(validate_orbifold(even, [("D1", 2)])))
    assert not report.h1_zero
    assert not dict(report.conditions)["restriction is onto"]
    with pytest.raises(OrbifoldError, match="H₁"):
        homology_of_total(
            make_bundle(validate_orbifold(even, [("D1", 2)]))
        )

    base = spheres(1, -1, -1)
    orbifold = validate_orbifold(base, [("D1", 3)])
    report = kollar_h1_check(make_bundle(orbifold, background=[1, 0, 0]))
    assert not dict(report.conditions)["c1(M/mu) primitive"]

    orbifold = orbifold.replace(semi_regular=False)
    with pytest.raises(OrbifoldError, match="semi-regular"):
        kollar_h1_check(make_bundle(orbifold))


def test_twist_search() -> None:
    """The twist search finds the nearest primitive class."""
    base = spheres(1, -1, -1)
    orbifold = validate_orbifold(base, [("D1", 2), ("D2", 3)])
    bundle = make_bundle(orbifold, background=[2, 3, 0])
    assert orbifold_chern_class(bundle) == (15, 20, 0)

    with pytest.raises(TwistSearchError, match="search bound exceeded") as err:
        choose_primitive_twist(bundle, bound=0)
    assert err.value.bound == 0

    found = choose_primitive_twist(bundle)
    assert is_primitive(orbifold_chern_class(found))
    shift = [a - b for a, b in zip(found.background, bundle.background)]
    assert max(abs(x) for x in shift) == 1

    # Σ bᵢ (m_X/mᵢ)[Dᵢ] = 2[D1] is not primitive
    bad = make_bundle(validate_orbifold(base, [("D1", 3)]), exponents=[2])
    with pytest.raises(OrbifoldError, match="twist hypothesis unmet"):
        choose_primitive_twist(bad)

    small = make_bundle(validate_orbifold(spheres(1, -1), [("D1", 2)]))
    with pytest.raises(OrbifoldError, match="twist hypothesis unmet"):
        choose_primitive_twist(small)

    # With a target class the search starts near (m_X k + 1)ω - c₁
    omega = [Fraction(1), Fraction(0), Fraction(0)]
    near = choose_primitive_twist(bundle, omega)
    assert is_primitive(orbifold_chern_class(near))


def test_linf_shell() -> None:
    """Shells hold exactly the points at L∞ distance r, in order."""
    for n in range(1, 4):
        center = tuple(range(n))
        for r in range(4):
            points = list(_linf_shell(center, r))
            expected = [
                tuple(c + o for c, o in zip(center, offset))
                for offset in product(range(-r, r + 1), repeat=n)
                if max(abs(o) for o in offset) == r
            ]
            assert points == expected
            if r > 0:
                assert len(points) == (2 * r + 1) ** n - (2 * r - 1) ** n

    # The first point of a shell is found without scanning the interior
    first = next(_linf_shell((0,) * 36, 1))
    assert first == (-1,) * 36


def test_x_homology() -> None:
    """H₂(M) = Z³⁵ ⊕ ⊕ (Z/pⁱ)^(2gᵢ) over X for p = 2, 3, 5, 7."""
    x = build_x()
    genera = [s.genus for s in x.surfaces]
    for p in (2, 3, 5, 7):
        iso = list(zip(x.names, prime_power_multiplicities(36, p)))
        orbifold = validate_orbifold(x, iso)
        assert orbifold.semi_regular
        assert all(lm.case == LocalCase.D for _, lm in orbifold.local_models)

        bundle = choose_primitive_twist(make_bundle(orbifold))
        assert bundle.background == (0,) * 36
        assert bundle.m_x == p**36

        report = homology_of_total(bundle)
        assert report.h1_zero
        assert report.rank == 35
        assert report.torsion == tuple(
            (p**i, 2 * g) for i, g in enumerate(genera, start=1)
        )
        assert report.torsion_order == p ** sum(
            2 * i * g for i, g in enumerate(genera, start=1)
        )


def test_certify_kcontact() -> None:
    """The certificate requires c₁(M/X) to equal the given class."""
    base = spheres(1, -1, -1)
    bundle = make_bundle(validate_orbifold(base, [("D1", 2), ("D2", 3)]))
    certificate = certify_kcontact(bundle, chern_class(bundle))
    assert "K-contact" in certificate.conclusion
    assert len(certificate.hypotheses) == 4

    with pytest.raises(OrbifoldError, match="does not match"):
        certify_kcontact(bundle, [Fraction(1), Fraction(0), Fraction(0)])


if __name__ == "__main__":
    test_local_models()
    test_validate_orbifold()
    test_chern_classes()
    test_kollar_criteria()
    test_twist_search()
    test_linf_shell()
    test_x_homology()
    test_certify_kcontact()
