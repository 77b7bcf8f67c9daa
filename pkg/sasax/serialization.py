"""JSON encoding of the ledger objects.

Every integer is written as a decimal string so that payloads survive any
JSON reader without loss.
"""

import json
from typing import Any, Dict, List, Sequence, Tuple

from flax.struct import dataclass, field

from sasax.errors import ManifestError, SasaxError
from sasax.kahler import ObstructionVerdict
from sasax.lagrangian import LagrangianReport
from sasax.lattice import IntegerMatrix
from sasax.manifold import (
    AuxiliaryObject,
    Flag,
    ManifoldModel,
    Pi1State,
    Pi1Status,
    SurfaceClass,
)
from sasax.seifert import HomologyReport, SeifertBundle, chern_summary

SCHEMA_VERSION = 1


def _int(value: Any, what: str) -> int:
    if not isinstance(value, str):
        raise ManifestError(f"{what}: expected a decimal string, got {value!r}")
    try:
        return int(value)
    except ValueError as err:
        raise ManifestError(f"{what}: not an integer: {value!r}") from err


def _require(payload: Dict, key: str, what: str) -> Any:
    if not isinstance(payload, dict) or key not in payload:
        raise ManifestError(f"{what}: missing field {key!r}")
    return payload[key]


def encode_matrix(A: IntegerMatrix) -> List[List[str]]:
    """A matrix as nested lists of decimal strings."""
    return [[str(x) for x in row] for row in A.to_rows()]


def decode_matrix(rows: Any, what: str = "matrix") -> IntegerMatrix:
    """Inverse of encode_matrix."""
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ManifestError(f"{what}: expected a list of rows")
    width = len(rows[0]) if rows else 0
    if any(len(r) != width for r in rows):
        raise ManifestError(f"{what}: ragged rows")
    return IntegerMatrix.from_rows(
        [[_int(x, what) for x in r] for r in rows], cols=width
    )


def encode_surface(s: SurfaceClass) -> Dict[str, Any]:
    """One tracked surface."""
    return {
        "name": s.name,
        "genus": str(s.genus),
        "self_intersection": str(s.self_intersection),
        "flags": sorted(f.value for f in s.flags),
        "provenance": list(s.provenance),
        "pi1_image": sorted(s.pi1_image),
        "orientation": str(s.orientation),
        "complement_simply_connected": s.complement_simply_connected,
    }


def encode_manifest(model: ManifoldModel) -> Dict[str, Any]:
    """The manifest of a manifold model."""
    generators = model.pi1.generators
    return {
        "schema": SCHEMA_VERSION,
        "kind": "manifold",
        "euler_characteristic": str(model.euler_characteristic),
        "b2": None if model.b2 is None else str(model.b2),
        "pi1": {
            "status": model.pi1.status.value,
            "generators": None if generators is None else sorted(generators),
            "provenance": list(model.pi1.provenance),
        },
        "surfaces": [encode_surface(s) for s in model.surfaces],
        "gram": encode_matrix(model.gram),
        "symplectic_form_tag": model.symplectic_form_tag,
        "auxiliary": [
            {"name": obj.name, "kind": obj.kind, "attrs": dict(obj.attrs)}
            for obj in model.auxiliary
        ],
        "notes": list(model.notes),
    }


def _decode_surface(payload: Dict) -> SurfaceClass:
    name = _require(payload, "name", "surface")
    try:
        flags = frozenset(Flag(f) for f in payload.get("flags", []))
    except ValueError as err:
        raise ManifestError(f"surface {name}: {err}") from err
    return SurfaceClass(
        name=name,
        genus=_int(_require(payload, "genus", name), f"{name}.genus"),
        self_intersection=_int(
            _require(payload, "self_intersection", name),
            f"{name}.self_intersection",
        ),
        flags=flags,
        provenance=tuple(payload.get("provenance", ())),
        pi1_image=frozenset(payload.get("pi1_image", ())),
        orientation=_int(
            payload.get("orientation", "1"), f"{name}.orientation"
        ),
        complement_simply_connected=bool(
            payload.get("complement_simply_connected", False)
        ),
    )


def decode_manifest(payload: Any) -> ManifoldModel:
    """Rebuild a manifold model from its manifest.

    Raises:
        ManifestError: If the payload is malformed or inconsistent.
    """
    if _require(payload, "schema", "manifest") != SCHEMA_VERSION:
        raise ManifestError(
            f"unsupported schema {payload['schema']!r}, "
            f"expected {SCHEMA_VERSION}"
        )
    pi1 = _require(payload, "pi1", "manifest")
    generators = _require(pi1, "generators", "pi1")
    try:
        model = ManifoldModel(
            euler_characteristic=_int(
                _require(payload, "euler_characteristic", "manifest"),
                "euler_characteristic",
            ),
            pi1=Pi1State(
                status=Pi1Status(_require(pi1, "status", "pi1")),
                generators=(
                    None if generators is None else frozenset(generators)
                ),
                provenance=tuple(pi1.get("provenance", ())),
            ),
            surfaces=tuple(
                _decode_surface(s)
                for s in _require(payload, "surfaces", "manifest")
            ),
            gram=decode_matrix(_require(payload, "gram", "manifest"), "gram"),
            symplectic_form_tag=payload.get("symplectic_form_tag"),
            auxiliary=tuple(
                AuxiliaryObject(
                    name=obj["name"],
                    kind=obj["kind"],
                    attrs=tuple(sorted(obj.get("attrs", {}).items())),
                )
                for obj in payload.get("auxiliary", ())
            ),
            notes=tuple(payload.get("notes", ())),
        )
    except ManifestError:
        raise
    except (SasaxError, KeyError, TypeError, ValueError) as err:
        raise ManifestError(f"invalid manifest: {err}") from err
    return model


def encode_bundle(bundle: SeifertBundle) -> Dict[str, Any]:
    """Orbit invariants, background class and both Chern classes."""
    return {
        "invariants": [
            {
                "surface": inv.surface,
                "m": str(inv.m),
                "j": str(inv.j),
                "b": str(inv.b),
            }
            for inv in bundle.invariants
        ],
        "background": [str(x) for x in bundle.background],
        "m_x": str(bundle.m_x),
        **{k: list(v) for k, v in chern_summary(bundle).items()},
    }


def encode_homology(report: HomologyReport) -> Dict[str, Any]:
    """H₁ criteria and the groups H₂(M, Z)."""
    return {
        "schema": SCHEMA_VERSION,
        "kind": "homology",
        "h1_zero": report.h1_zero,
        "conditions": [
            {"name": name, "holds": holds} for name, holds in report.conditions
        ],
        "reasons": list(report.reasons),
        "rank": None if report.rank is None else str(report.rank),
        "torsion": [
            {"modulus": str(m), "exponent": str(e)} for m, e in report.torsion
        ],
        "assumptions": list(report.assumptions),
    }


def decode_homology(payload: Any) -> HomologyReport:
    """Rebuild a homology report from encode_homology output.

    Raises:
        ManifestError: If the payload is malformed.
    """
    if _require(payload, "kind", "homology") != "homology":
        raise ManifestError(
            f"expected a homology payload, got {payload['kind']}"
        )
    rank = _require(payload, "rank", "homology")
    torsion = _require(payload, "torsion", "homology")
    if not isinstance(torsion, list):
        raise ManifestError("homology: torsion must be a list")
    return HomologyReport(
        h1_zero=bool(_require(payload, "h1_zero", "homology")),
        conditions=tuple(
            (
                _require(c, "name", "condition"),
                bool(_require(c, "holds", "condition")),
            )
            for c in payload.get("conditions", [])
        ),
        reasons=tuple(payload.get("reasons", ())),
        rank=None if rank is None else _int(rank, "rank"),
        torsion=tuple(
            (
                _int(_require(t, "modulus", "torsion"), "modulus"),
                _int(_require(t, "exponent", "torsion"), "exponent"),
            )
            for t in torsion
        ),
        assumptions=tuple(payload.get("assumptions", ())),
    )


def encode_verdict(verdict: ObstructionVerdict) -> Dict[str, Any]:
    """The verdict with its derivation chain."""
    return {
        "schema": SCHEMA_VERSION,
        "kind": "verdict",
        "verdict": verdict.verdict,
        "chain": [
            {"name": s.name, "values": dict(s.values), "anchor": s.anchor}
            for s in verdict.chain
        ],
        "hypotheses": [
            {"name": name, "holds": holds}
            for name, holds in verdict.hypothesis_report
        ],
        "reasons": list(verdict.reasons),
    }


def encode_lagrangian(report: LagrangianReport) -> Dict[str, Any]:
    """Isotropy, intersection and boundary checks of the T⁴ configuration."""
    return {
        "ok": report.ok,
        "isotropic": dict(report.isotropic),
        "intersections": [
            {
                "pair": list(r.pair),
                "points": [dict(p) for p in r.points],
                "expected": str(r.expected),
                "transverse": r.transverse,
                "separated_by": (
                    None if r.separated_by is None else str(r.separated_by)
                ),
                "ok": r.ok,
            }
            for r in report.intersections
        ],
        "boundary": dict(report.boundary),
    }


@dataclass
class RunReport:
    """What a command did and found.

    Attributes:
        command: The subcommand name.
        inputs: The parameters it ran with.
        results: The structured payload.
        checks: (name, passed, anchor) for each verification.
    """

    command: str = field(pytree_node=False)
    inputs: Dict[str, Any] = field(pytree_node=False, default_factory=dict)
    results: Dict[str, Any] = field(pytree_node=False, default_factory=dict)
    checks: Tuple[Tuple[str, bool, str], ...] = field(
        pytree_node=False, default=()
    )

    @property
    def passed(self) -> bool:
        """Whether every check passed."""
        return all(ok for _, ok, _ in self.checks)

    def failed(self) -> Sequence[str]:
        """Names of the failing checks."""
        return [name for name, ok, _ in self.checks if not ok]


def encode_report(report: RunReport) -> Dict[str, Any]:
    """The report as a JSON-ready dictionary."""
    return {
        "schema": SCHEMA_VERSION,
        "command": report.command,
        "inputs": report.inputs,
        "results": report.results,
        "checks": [
            {"name": name, "passed": ok, "anchor": anchor}
            for name, ok, anchor in report.checks
        ],
    }


def dumps(payload: Dict[str, Any]) -> str:
    """Deterministic JSON text."""
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)


def loads(text: str) -> Any:
    """Parse JSON text, reporting syntax errors as ManifestError."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ManifestError(f"malformed JSON: {err}") from err


def unwrap(payload: Any, key: str) -> Any:
    """Accept either a bare payload or a RunReport carrying it in results."""
    if isinstance(payload, dict) and "results" in payload:
        return _require(payload["results"], key, "results")
    return payload
