import pytest
import sympy as sp

from sasax.errors import LagrangianError
from sasax.lagrangian import (
    DELTA,
    EPS,
    PIECES,
    asymptotic_sign,
    chart,
    intersect,
    is_isotropic,
    on_boundary,
    reduce_on_circle,
    stays_outside,
    verify_lagrangian_config,
)


def test_asymptotic_sign() -> None:
    """Signs under 0 < ε ≪ δ ≪ 1."""
    assert asymptotic_sign(EPS) == 1
    assert asymptotic_sign(EPS - DELTA) == -1
    assert asymptotic_sign(DELTA**2 - EPS) == 1
    assert asymptotic_sign(sp.Rational(1, 2) - DELTA) == 1
    assert asymptotic_sign(-EPS / DELTA) == -1
    assert asymptotic_sign(sp.Integer(0)) == 0
    assert asymptotic_sign(EPS**2 - EPS**2) == 0


def test_sign_fallback(caplog) -> None:
    """Non-polynomial expressions are signed at a sample point, with a log."""
    with caplog.at_level("WARNING", logger="sasax.lagrangian"):
        assert asymptotic_sign(sp.sqrt(EPS)) == 1
        assert asymptotic_sign(-sp.sqrt(DELTA)) == -1
    assert "no polynomial sign" in caplog.text


def test_reduce_on_circle() -> None:
    """Polynomials in cos θ, sin θ reduce modulo c² + s² - 1."""
    c, s = sp.symbols("c s", real=True)
    assert reduce_on_circle(c**2 + s**2 - 1, c, s) == 0
    assert reduce_on_circle(c**2 + s**2, c, s) == 1


def test_isotropic() -> None:
    """ω vanishes on every piece."""
    for name in PIECES:
        assert is_isotropic(chart(name)), name

    with pytest.raises(LagrangianError, match="unknown Lagrangian piece"):
        chart("T3")


def test_intersections() -> None:
    """Each cylinder meets its torus once, transversally."""
    result = intersect("C1", "T1")
    assert result.ok
    assert len(result.points) == 1
    point = result.points[0]
    assert point["t_a"] == "1"
    assert point["c_b"] == "0"
    assert point["s_b"] == "-1"

    result = intersect("C2", "T2")
    assert result.ok
    assert len(result.points) == 1
    assert result.points[0]["t_a"] == "1"

    for a, b in (("C1", "C2"), ("C1", "T2"), ("C2", "T1"), ("T1", "T2")):
        result = intersect(a, b)
        assert result.points == ()
        assert result.ok


def test_boundaries() -> None:
    """Cylinders run between boundary tubes and stay outside them."""
    c1 = chart("C1")
    assert on_boundary(c1, "d12", {c1.interval: 0})
    assert on_boundary(c1, "d13", {c1.interval: 1})
    assert not on_boundary(c1, "d14", {c1.interval: 1})
    assert on_boundary(chart("T1"), "d13")
    for name in ("C1", "C2"):
        for boundary in ("d12", "d13", "d14"):
            assert stays_outside(chart(name), boundary)


def test_report() -> None:
    """The full configuration check passes."""
    report = verify_lagrangian_config()
    assert report.ok
    assert dict(report.isotropic) == {name: True for name in PIECES}
    assert len(report.intersections) == 6


if __name__ == "__main__":
    test_asymptotic_sign()
    test_reduce_on_circle()
    test_isotropic()
    test_intersections()
    test_boundaries()
    test_report()
