import json

import pytest

from sasax.builders import XManifoldBuilder, build_x
from sasax.errors import ManifestError
from sasax.kahler import obstruction_verdict
from sasax.lattice import IntegerMatrix
from sasax.seifert import HomologyReport
from sasax.serialization import (
    RunReport,
    decode_homology,
    decode_manifest,
    decode_matrix,
    dumps,
    encode_homology,
    encode_manifest,
    encode_report,
    encode_verdict,
    loads,
    unwrap,
)


def test_manifest_x() -> None:
    """The manifest of X rebuilds the same model."""
    x = build_x()
    payload = encode_manifest(x)
    assert payload["schema"] == 1
    assert payload["kind"] == "manifold"
    assert payload["euler_characteristic"] == "38"
    assert payload["b2"] == "36"
    assert payload["pi1"]["generators"] == []
    assert payload["gram"][0][0] == "-1"
    assert [s["genus"] for s in payload["surfaces"]][9] == "3"

    assert decode_manifest(loads(dumps(payload))) == x


def test_manifest_unknown_b2() -> None:
    """Before simple connectivity is known b₂ is null."""
    t4 = XManifoldBuilder().run(stop_after="t4")
    payload = encode_manifest(t4)
    assert payload["b2"] is None
    assert payload["pi1"]["generators"] == ["x1", "x2", "x3", "x4"]
    assert decode_manifest(payload).pi1.generators == t4.pi1.generators


def test_malformed_manifest() -> None:
    """Malformed manifests raise ManifestError."""
    payload = encode_manifest(build_x())

    with pytest.raises(ManifestError, match="unsupported schema"):
        decode_manifest({**payload, "schema": 2})
    with pytest.raises(ManifestError, match="missing field"):
        decode_manifest({k: v for k, v in payload.items() if k != "gram"})
    with pytest.raises(ManifestError, match="decimal string"):
        decode_manifest({**payload, "euler_characteristic": 38})
    with pytest.raises(ManifestError):
        decode_manifest({**payload, "gram": payload["gram"][:-1]})
    with pytest.raises(ManifestError):
        decode_manifest([])

    surfaces = [dict(s) for s in payload["surfaces"]]
    surfaces[0]["flags"] = ["glowing"]
    with pytest.raises(ManifestError):
        decode_manifest({**payload, "surfaces": surfaces})

    with pytest.raises(ManifestError, match="malformed JSON"):
        loads("{not json")


def test_decode_matrix() -> None:
    """Matrices are rows of decimal strings."""
    big = str(2**200)
    assert decode_matrix([["1", big]]) == IntegerMatrix.from_rows(
        [[1, 2**200]]
    )
    assert decode_matrix([]).shape == (0, 0)
    with pytest.raises(ManifestError, match="ragged"):
        decode_matrix([["1"], ["1", "2"]])
    with pytest.raises(ManifestError, match="not an integer"):
        decode_matrix([["x"]])


def test_homology() -> None:
    """Homology payloads keep huge moduli exact."""
    report = HomologyReport(
        h1_zero=True,
        conditions=(("base H1 vanishes", True),),
        rank=1,
        torsion=((2**36, 2), (3, 4)),
    )
    payload = encode_homology(report)
    assert payload["torsion"][0] == {
        "modulus": "68719476736",
        "exponent": "2",
    }
    assert decode_homology(json.loads(dumps(payload))) == report

    with pytest.raises(ManifestError, match="expected a homology payload"):
        decode_homology({**payload, "kind": "verdict"})
    with pytest.raises(ManifestError):
        decode_homology({**payload, "torsion": [{"modulus": "2"}]})


def test_verdict() -> None:
    """Verdicts carry their derivation as decimal strings."""
    genera = [3, 3] + [1] * 10
    payload = encode_verdict(obstruction_verdict(12, genera))
    assert payload["kind"] == "verdict"
    assert payload["verdict"] == "obstructed"
    assert payload["reasons"] == []
    slope = payload["chain"][-2]
    assert slope["name"] == "slope"
    assert slope["values"]["rhs"] == str(10 - 12 - 9 + 24 - 8)
    assert all(
        isinstance(v, str)
        for step in payload["chain"]
        for v in step["values"].values()
    )


def test_report() -> None:
    """Run reports wrap results and checks."""
    report = RunReport(
        command="demo",
        inputs={"p": "2"},
        results={"manifest": {"kind": "manifold"}},
        checks=(("first", True, "a"), ("second", False, "b")),
    )
    assert not report.passed
    assert report.failed() == ["second"]

    payload = encode_report(report)
    assert payload["checks"][1] == {
        "name": "second",
        "passed": False,
        "anchor": "b",
    }
    assert unwrap(payload, "manifest") == {"kind": "manifold"}
    assert unwrap({"kind": "manifold"}, "manifest") == {"kind": "manifold"}
    with pytest.raises(ManifestError):
        unwrap(payload, "homology")

    # Deterministic text
    assert dumps(payload) == dumps(json.loads(dumps(payload)))


if __name__ == "__main__":
    test_manifest_x()
    test_manifest_unknown_b2()
    test_malformed_manifest()
    test_decode_matrix()
    test_homology()
    test_verdict()
    test_report()
