"""Command-line driver for the surgery, Seifert and obstruction steps.

Build X, compute the Seifert bundle homology over it and decide the Kähler
obstruction. Commands compose through JSON on files or standard streams. Exit
status is 0 on success, 1 when a check fails and 2 on invalid input or unmet
hypotheses.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy import isprime

from sasax.builders.x_manifold import XManifoldBuilder
from sasax.errors import ManifestError, OrbifoldError, SasaxError
from sasax.kahler import (
    EllipticRemarkGate,
    GenusGate,
    ObstructionVerdict,
    TheoremGate,
    obstruction_verdict,
    sasakian_excludability,
)
from sasax.lagrangian import verify_lagrangian_config
from sasax.lattice import is_unimodular, signature
from sasax.manifold import Flag, ManifoldModel
from sasax.seifert import (
    DEFAULT_TWIST_BOUND,
    DEFAULT_TWIST_K,
    HomologyReport,
    SeifertBundle,
    certify_kcontact,
    chern_class,
    choose_primitive_twist,
    classify_local_model,
    homology_of_total,
    kollar_h1_check,
    make_bundle,
    prime_power_multiplicities,
    validate_orbifold,
)
from sasax.serialization import (
    RunReport,
    decode_homology,
    decode_manifest,
    dumps,
    encode_bundle,
    encode_homology,
    encode_lagrangian,
    encode_manifest,
    encode_report,
    encode_verdict,
    loads,
    unwrap,
)

logger = logging.getLogger(__name__)

Check = Tuple[str, bool, str]


def _read(path: str) -> Any:
    if path == "-":
        return loads(sys.stdin.read())
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ManifestError(f"cannot read {path}: {err}") from err
    return loads(text)


def _write(text: str, output: Optional[str]) -> None:
    if output is None or output == "-":
        sys.stdout.write(text + "\n")
    else:
        Path(output).write_text(text + "\n", encoding="utf-8")


def _finish(report: RunReport, output: Optional[str]) -> int:
    _write(dumps(encode_report(report)), output)
    if not report.passed:
        print(f"Failed checks: {', '.join(report.failed())}", file=sys.stderr)
        return 1
    return 0


def _genera(text: str) -> List[int]:
    try:
        return [int(g) for g in text.split(",") if g.strip()]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"bad genus list {text!r}") from err


def _gate(args: argparse.Namespace) -> GenusGate:
    return EllipticRemarkGate() if args.allow_elliptic else TheoremGate()


def manifold_checks(model: ManifoldModel) -> List[Check]:
    """Verify that the tracked surfaces are disjoint generators of H₂."""
    n = len(model.surfaces)
    gram = model.gram
    disjoint = all(
        gram[i, j] == 0 for i in range(n) for j in range(n) if i != j
    )
    return [
        ("simply connected", model.b2 is not None, "π₁ ledger"),
        ("surfaces span H2", model.b2 == n, "b₂ = χ - 2"),
        ("pairwise disjoint", disjoint, "Sᵢ·Sⱼ = 0 for i ≠ j"),
        ("unimodular", is_unimodular(gram), "det Q = ±1"),
        (
            "symplectic",
            all(s.has(Flag.SYMPLECTIC) for s in model.surfaces),
            "ω|_{Sᵢ} > 0",
        ),
    ]


def cmd_build_x(args: argparse.Namespace) -> int:
    """Build X, or an intermediate manifold, and write its manifest."""
    builder = XManifoldBuilder()
    model = builder.run(stop_after=args.stop_after)
    stage = args.stop_after or "x"
    results: Dict[str, Any] = {"manifest": encode_manifest(model)}
    checks: List[Check] = [
        ("gram symmetric", model.gram.is_symmetric(), "plumbing")
    ]
    if stage == "x":
        checks += manifold_checks(model)

    if args.verify_lagrangian:
        lagrangian = verify_lagrangian_config()
        results["lagrangian"] = encode_lagrangian(lagrangian)
        checks.append(
            (
                "lagrangian configuration",
                lagrangian.ok,
                "ω|_L = 0, one transverse point in C1∩T1 and C2∩T2",
            )
        )

    b2 = "unknown" if model.b2 is None else model.b2
    print(
        f"Built {stage}: χ = {model.euler_characteristic}, b₂ = {b2}, "
        f"{len(model.surfaces)} tracked surfaces",
        file=sys.stderr,
    )
    for note in model.notes:
        print(f"Note: {note}", file=sys.stderr)

    report = RunReport(
        command="build-x",
        inputs={
            "stop_after": stage,
            "verify_lagrangian": args.verify_lagrangian,
        },
        results=results,
        checks=tuple(checks),
    )
    return _finish(report, args.output)


def seifert_pipeline(
    model: ManifoldModel,
    p: int,
    bound: int = DEFAULT_TWIST_BOUND,
    k: int = DEFAULT_TWIST_K,
) -> Tuple[SeifertBundle, HomologyReport, List[Check]]:
    """Seifert bundle over the model with isotropy pⁱ along the i-th surface.

    Args:
        model: A simply connected base with disjoint tracked surfaces.
        p: The prime.
        bound: L∞ bound of the primitive twist search.
        k: Density parameter of the twist.

    Returns:
        The twisted bundle, its homology and the checks performed.
    """
    if not isprime(p):
        raise OrbifoldError(f"p must be prime, got {p}")
    multiplicities = prime_power_multiplicities(len(model.surfaces), p)
    orbifold = validate_orbifold(model, list(zip(model.names, multiplicities)))
    bundle = choose_primitive_twist(make_bundle(orbifold), bound=bound, k=k)
    h1 = kollar_h1_check(bundle)
    checks: List[Check] = [
        (
            "smooth orbifold",
            all(lm.smooth for _, lm in orbifold.local_models),
            "intersecting multiplicities coprime",
        ),
        ("semi-regular", orbifold.semi_regular, "local models (b), (d)"),
        ("H1 vanishes", h1.h1_zero, "base H₁ = 0, onto, c₁(M/μ) primitive"),
    ]
    if not h1.h1_zero:
        return bundle, h1, checks

    certificate = certify_kcontact(bundle, chern_class(bundle))
    checks.append(("k-contact", True, certificate.conclusion))
    return bundle, homology_of_total(bundle), checks


def h2_text(report: HomologyReport) -> str:
    """H₂(M, Z) written out as Z^k + (Z/m)^e + ..."""
    parts = [f"Z^{report.rank}"] + [
        f"(Z/{m})^{e}" for m, e in report.torsion
    ]
    return " + ".join(parts)


def cmd_seifert(args: argparse.Namespace) -> int:
    """Homology of the Seifert bundle over a manifest."""
    model = decode_manifest(unwrap(_read(args.manifest), "manifest"))
    bundle, homology, checks = seifert_pipeline(
        model, args.prime, args.bound, args.k
    )
    if homology.h1_zero:
        print(f"H₁(M) = 0, H₂(M) = {h2_text(homology)}", file=sys.stderr)
    else:
        print(f"H₁(M) ≠ 0: {'; '.join(homology.reasons)}", file=sys.stderr)

    report = RunReport(
        command="seifert",
        inputs={
            "manifest": args.manifest,
            "prime": str(args.prime),
            "bound": str(args.bound),
            "k": str(args.k),
        },
        results={
            "homology": encode_homology(homology),
            "bundle": encode_bundle(bundle),
        },
        checks=tuple(checks),
    )
    return _finish(report, args.output)


def _describe(verdict: ObstructionVerdict) -> str:
    if verdict.obstructed:
        values = dict(verdict.chain[-1].values)
        return (
            f"obstructed (b = {values['b']} > {values['bound']} = 2g+3)"
        )
    return f"inconclusive ({'; '.join(verdict.reasons)})"


def cmd_check_sasakian(args: argparse.Namespace) -> int:
    """Decide whether M can carry a semi-regular Sasakian structure."""
    if args.input is not None:
        payload = _read(args.input)
        if not isinstance(payload, dict):
            raise ManifestError("expected a JSON object")
        results = payload.get("results", {})
        if "homology" in results or payload.get("kind") == "homology":
            homology = decode_homology(unwrap(payload, "homology"))
        else:
            model = decode_manifest(unwrap(payload, "manifest"))
            _, homology, _ = seifert_pipeline(model, args.prime)
        torsion = homology.torsion
        rank = homology.rank
        h1_zero = homology.h1_zero
    else:
        if args.genera is None:
            raise ManifestError("give an input file or --genera")
        torsion = [
            (args.prime**i, 2 * g) for i, g in enumerate(args.genera, start=1)
        ]
        rank = len(args.genera) - 1 if args.rank is None else args.rank
        h1_zero = True

    if rank is None:
        raise ManifestError("homology report carries no rank")
    verdict = sasakian_excludability(h1_zero, rank, torsion, _gate(args))
    print(f"Verdict: {_describe(verdict)}", file=sys.stderr)

    report = RunReport(
        command="check-sasakian",
        inputs={
            "input": args.input,
            "rank": str(rank),
            "allow_elliptic": args.allow_elliptic,
        },
        results={"verdict": encode_verdict(verdict)},
        checks=(("verdict computed", True, "plumbing"),),
    )
    return _finish(report, args.output)


def cmd_classify_local_model(args: argparse.Namespace) -> int:
    """Classify the point 0 ∈ C²/Z_m."""
    lm = classify_local_model(args.m, args.j1, args.j2)
    print(f"Case {lm.case.value}, smooth = {lm.smooth}", file=sys.stderr)
    report = RunReport(
        command="classify-local-model",
        inputs={"m": str(args.m), "j1": str(args.j1), "j2": str(args.j2)},
        results={
            "local_model": {
                "m": str(lm.m),
                "j1": str(lm.j1),
                "j2": str(lm.j2),
                "m1": str(lm.m1),
                "m2": str(lm.m2),
                "d": str(lm.d),
                "case": lm.case.value,
                "smooth": lm.smooth,
            }
        },
        checks=(("m1 m2 d = m", lm.m1 * lm.m2 * lm.d == lm.m, "plumbing"),),
    )
    return _finish(report, args.output)


def cmd_obstruct(args: argparse.Namespace) -> int:
    """Run the obstruction chain on an explicit genus vector."""
    b = len(args.genera) if args.b is None else args.b
    verdict = obstruction_verdict(b, args.genera, _gate(args))
    print(f"Verdict: {_describe(verdict)}", file=sys.stderr)
    report = RunReport(
        command="obstruct",
        inputs={
            "b": str(b),
            "genera": ",".join(str(g) for g in args.genera),
            "allow_elliptic": args.allow_elliptic,
        },
        results={"verdict": encode_verdict(verdict)},
        checks=(("verdict computed", True, "plumbing"),),
    )
    return _finish(report, args.output)


def summary_lines(p: int) -> List[str]:
    """The deterministic end-to-end summary for the prime p."""
    model = XManifoldBuilder().run()
    pos, zero, neg = signature(model.gram)
    _, homology, _ = seifert_pipeline(model, p)
    verdict = sasakian_excludability(
        homology.h1_zero, homology.rank, homology.torsion
    )
    genera = ",".join(str(s.genus) for s in model.surfaces)
    return [
        f"b2(X) = {model.b2}",
        f"chi(X) = {model.euler_characteristic}",
        f"signature(X) = ({pos}, {zero}, {neg})",
        f"genera = {genera}",
        "H1(M) = 0" if homology.h1_zero else "H1(M) != 0",
        f"H2(M) = {h2_text(homology)}",
        f"verdict: {_describe(verdict)}",
    ]


def cmd_report(args: argparse.Namespace) -> int:
    """Print the end-to-end summary."""
    _write("\n".join(summary_lines(args.prime)), args.output)
    return 0


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "-o", "--output", default=None, help="output path (default stdout)"
    )


def _add_gate(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--allow-elliptic",
        action="store_true",
        help="also admit configurations where every curve has genus 1",
    )


def build_parser() -> argparse.ArgumentParser:
    """The argument parser for every subcommand."""
    parser = argparse.ArgumentParser(
        prog="sasax",
        description="Surgery, Seifert bundle and Kähler obstruction calculator",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log INFO with -v and DEBUG with -vv",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build-x", help="build X and write its manifest")
    build.add_argument(
        "--stop-after",
        choices=XManifoldBuilder().stage_names(),
        default=None,
        help="stop after the named stage",
    )
    build.add_argument(
        "--verify-lagrangian",
        action="store_true",
        help="append the Lagrangian configuration check",
    )
    _add_output(build)
    build.set_defaults(func=cmd_build_x)

    seif = sub.add_parser("seifert", help="homology of the Seifert bundle")
    seif.add_argument("manifest", nargs="?", default="-")
    seif.add_argument("-p", "--prime", type=int, default=2)
    seif.add_argument("--bound", type=int, default=DEFAULT_TWIST_BOUND)
    seif.add_argument("-k", type=int, default=DEFAULT_TWIST_K)
    _add_output(seif)
    seif.set_defaults(func=cmd_seifert)

    check = sub.add_parser(
        "check-sasakian", help="decide the semi-regular Sasakian obstruction"
    )
    check.add_argument("input", nargs="?", default=None)
    check.add_argument("--rank", type=int, default=None)
    check.add_argument("-p", "--prime", type=int, default=2)
    check.add_argument("--genera", type=_genera, default=None)
    _add_gate(check)
    _add_output(check)
    check.set_defaults(func=cmd_check_sasakian)

    local = sub.add_parser(
        "classify-local-model", help="classify the point 0 of C²/Z_m"
    )
    local.add_argument("m", type=int)
    local.add_argument("j1", type=int)
    local.add_argument("j2", type=int)
    _add_output(local)
    local.set_defaults(func=cmd_classify_local_model)

    obstruct = sub.add_parser("obstruct", help="run the obstruction chain")
    obstruct.add_argument("--b", type=int, default=None)
    obstruct.add_argument("--genera", type=_genera, required=True)
    _add_gate(obstruct)
    _add_output(obstruct)
    obstruct.set_defaults(func=cmd_obstruct)

    summary = sub.add_parser("report", help="end-to-end summary")
    summary.add_argument("-p", "--prime", type=int, default=2)
    _add_output(summary)
    summary.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the sasax command."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=(logging.WARNING, logging.INFO, logging.DEBUG)[
            min(args.verbose, 2)
        ],
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except SasaxError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
