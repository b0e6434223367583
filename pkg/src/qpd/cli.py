"""Command-line surface: analyze, simulate, scan, conjugacy.

Reports echo every tolerance and seed they used, so each number in the
output is reproducible from the report alone.  Output is byte-identical
for identical (input file, flags, seed).

Exit codes: 0 success, 1 usage or parse error, 2 internal invariant
violation (an analytic/numeric disagreement under --verify --strict, or
a conjugacy trial exceeding its budget).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .dynamics import (
    conjugacy_deviation,
    empirical_attractivity,
    empirical_permanence,
    largest_lyapunov,
    qp_fixed_point,
    simulate,
    write_trajectory_csv,
)
from .errors import (
    GuardTermination,
    NoDetection,
    NoInteriorFixedPoint,
    NonPositiveState,
    ParseError,
    SchemaError,
    SingularMatrix,
)
from .scalar_map import (
    KIND_PERIOD3,
    KIND_SNAPBACK,
    SCAN_REFERENCES,
    threshold_scan,
    write_scan_csv,
)
from .systems import DEFAULT_SIGN_TOL, load_system
from .theorems import check_all_theorems
from .transform import (
    SINGULARITY_RTOL,
    QMTMatrix,
    apply_qmt,
    canonical_lv,
    class_invariants,
)

#: Per-step relative budget for conjugacy verification; roundoff passes
#: through exp/log round trips once per step.
CONJUGACY_STEP_BUDGET = 1e-7

#: Condition-estimate cap for randomly drawn transformation matrices.
CONJUGACY_MAX_CONDITION = 100.0

_VERIFY_ATTRACTIVITY_TOL = 1e-4
_VERIFY_ATTRACTIVITY_HORIZON = 2000


class _Parser(argparse.ArgumentParser):
    """argparse parser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------

def _matrix(M):
    return np.asarray(M, dtype=float).tolist()


def build_analysis_report(system, tol=DEFAULT_SIGN_TOL, seed=0,
                          verify=False) -> dict:
    """Full classification report for one system, as a JSON-ready dict."""
    inv = class_invariants(system)
    report = {
        "tool": {"name": "qpd", "version": __version__},
        "system": system.to_dict(),
        "tolerances": {
            "sign_tol": tol,
            "singularity_rtol": SINGULARITY_RTOL,
        },
        "seeds": {"seed": seed},
        "class_invariants": {
            "interaction": _matrix(inv.interaction),
            "growth": _matrix(inv.growth),
        },
    }
    try:
        lv, qmt = canonical_lv(system)
        report["canonical_lv"] = {
            "A_lv": _matrix(lv.A),
            "lambda_lv": _matrix(lv.lam),
            "C": _matrix(qmt.C),
            "condition_estimate": qmt.condition(),
        }
    except SingularMatrix as exc:
        report["canonical_lv"] = {"error": str(exc)}
    verdicts = check_all_theorems(system, tol)
    report["theorems"] = [v.to_dict() for v in verdicts]
    if verify:
        report["verify"] = _verification_block(system, verdicts, seed)
    return report


def _verification_block(system, verdicts, seed) -> dict:
    """Numerical cross-checks plus analytic/numeric disagreement flags."""
    by_id = {v.theorem_id: v for v in verdicts}
    block: dict = {}

    fixed_point = None
    try:
        fixed_point = qp_fixed_point(system)
        block["fixed_point"] = (
            None if fixed_point is None else fixed_point.tolist())
    except (SingularMatrix, NoInteriorFixedPoint) as exc:
        block["fixed_point"] = {"error": str(exc)}

    permanence = empirical_permanence(system, seed=seed)
    block["permanence"] = permanence.to_dict()

    attractivity = None
    if fixed_point is not None:
        attractivity = empirical_attractivity(
            system, fixed_point, tol=_VERIFY_ATTRACTIVITY_TOL,
            horizon=_VERIFY_ATTRACTIVITY_HORIZON, seed=seed)
        block["attractivity"] = attractivity.to_dict()
    else:
        block["attractivity"] = {
            "skipped": "no interior fixed point available as target"}

    lyapunov = None
    lyapunov_params = {"x0": [1.0] * system.n, "transient": 1000,
                       "samples": 10000, "seed": seed}
    try:
        lyapunov = largest_lyapunov(system, np.ones(system.n),
                                    transient=lyapunov_params["transient"],
                                    samples=lyapunov_params["samples"],
                                    seed=seed)
        block["largest_lyapunov"] = lyapunov
    except GuardTermination as exc:
        block["largest_lyapunov"] = {"error": str(exc)}
    block["lyapunov_params"] = lyapunov_params

    disagreements = []
    warnings = []
    if by_id["T2"].applicable and not permanence.passed:
        disagreements.append(
            "T2 concludes permanence but the ensemble left the proxy box "
            f"(statistics: {permanence.statistics})")
    if by_id["T1"].applicable and permanence.passed:
        disagreements.append(
            "T1 concludes non-permanence but the ensemble stayed inside "
            "the proxy box")
    attractive = by_id["T3"].applicable or by_id["T4"].applicable
    if attractive and attractivity is not None and not attractivity.passed:
        disagreements.append(
            "an attractivity theorem applies but the ensemble did not "
            f"converge (statistics: {attractivity.statistics})")
    if attractive and isinstance(lyapunov, float) and lyapunov > 0.0:
        disagreements.append(
            "an attractivity theorem applies but the largest Lyapunov "
            f"estimate is positive ({lyapunov:.6g})")
    if by_id["T7"].applicable and isinstance(lyapunov, float) and lyapunov <= 0.0:
        warnings.append(
            "T7 certifies chaos but the Lyapunov estimate along this orbit "
            f"is nonpositive ({lyapunov:.6g}); the chaotic set need not be "
            "attracting")
    block["disagreements"] = disagreements
    block["warnings"] = warnings
    return block


def _fmt(v) -> str:
    return f"{v:.12g}"


def _fmt_matrix(M, indent="    ") -> str:
    rows = np.atleast_2d(np.asarray(M, dtype=float))
    return "\n".join(
        indent + "[" + "  ".join(_fmt(v) for v in row) + "]" for row in rows
    )


def render_report(report: dict) -> str:
    """Human-readable rendering of an analysis report."""
    lines = []
    sysd = report["system"]
    lines.append(f"qpd {report['tool']['version']} analysis")
    lines.append(f"system: {sysd['name'] or '(unnamed)'}  (n = {sysd['n']})")
    lines.append(f"sign tolerance: {report['tolerances']['sign_tol']:g}   "
                 f"seed: {report['seeds']['seed']}")
    lines.append("")
    lines.append("class invariants:")
    lines.append("  interaction (B A):")
    lines.append(_fmt_matrix(report["class_invariants"]["interaction"]))
    lines.append("  growth (B lam):")
    lines.append(_fmt_matrix([report["class_invariants"]["growth"]]))
    canon = report["canonical_lv"]
    if "error" in canon:
        lines.append(f"canonical LV form: unavailable ({canon['error']})")
    else:
        lines.append("canonical LV form: A_lv, lambda_lv equal the invariants; "
                     f"condition estimate of C: {_fmt(canon['condition_estimate'])}")
    lines.append("")
    lines.append("theorem battery:")
    for verdict in report["theorems"]:
        status = "applicable    " if verdict["applicable"] else "not applicable"
        lines.append(f"  {verdict['theorem']:>3}  {status}  {verdict['conclusion']}")
        if not verdict["applicable"]:
            failed = [h["hypothesis"] for h in verdict["hypotheses"]
                      if not h["pass"]]
            for label in failed:
                lines.append(f"        failed: {label}")
        for warning in verdict["boundary_warnings"]:
            lines.append(f"        boundary: {warning}")
        for note in verdict["notes"]:
            lines.append(f"        note: {note}")
    if "verify" in report:
        block = report["verify"]
        lines.append("")
        lines.append("numerical cross-checks:")
        fp = block["fixed_point"]
        if isinstance(fp, list):
            lines.append("  fixed point: (" + ", ".join(_fmt(v) for v in fp) + ")")
        elif fp is None:
            lines.append("  fixed point: none in the interior")
        else:
            lines.append(f"  fixed point: {fp['error']}")
        perm = block["permanence"]
        lines.append(f"  permanence probe: {'pass' if perm['pass'] else 'FAIL'} "
                     f"(tail range [{_fmt(perm['statistics']['tail_min'])}, "
                     f"{_fmt(perm['statistics']['tail_max'])}], "
                     f"{perm['statistics']['guard_terminations']} guard terminations)")
        att = block["attractivity"]
        if "skipped" in att:
            lines.append(f"  attractivity probe: skipped ({att['skipped']})")
        else:
            dist = att["statistics"]["max_final_distance"]
            dist_text = _fmt(dist) if dist is not None else "undefined (orbit lost)"
            lines.append(
                f"  attractivity probe: {'pass' if att['pass'] else 'FAIL'} "
                f"(max final distance {dist_text}, "
                f"tol {att['params']['tol']:g})")
        lyap = block["largest_lyapunov"]
        if isinstance(lyap, float):
            lines.append(f"  largest Lyapunov estimate: {_fmt(lyap)}")
        else:
            lines.append(f"  largest Lyapunov estimate: {lyap['error']}")
        for warning in block["warnings"]:
            lines.append(f"  warning: {warning}")
        if block["disagreements"]:
            lines.append("")
            for msg in block["disagreements"]:
                lines.append(f"  *** DISAGREEMENT: {msg}")
        else:
            lines.append("  analytic and numerical verdicts agree")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_analyze(args) -> int:
    system = load_system(args.path)
    report = build_analysis_report(system, tol=args.tol, seed=args.seed,
                                   verify=args.verify)
    print(render_report(report))
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    if args.strict and args.verify and report["verify"]["disagreements"]:
        print("exiting with status 2: analytic/numeric disagreement",
              file=sys.stderr)
        return 2
    return 0


def cmd_simulate(args) -> int:
    system = load_system(args.path)
    try:
        x0 = [float(v) for v in args.x0.split(",")]
    except ValueError:
        print(f"error: could not parse --x0 {args.x0!r} as comma-separated "
              "numbers", file=sys.stderr)
        return 1
    if args.steps < 1:
        print("error: --steps must be at least 1", file=sys.stderr)
        return 1
    traj = simulate(system, x0, args.steps)
    write_trajectory_csv(traj, args.out)
    final = ", ".join(_fmt(v) for v in traj.final)
    print(f"simulated {traj.steps_completed} of {args.steps} steps")
    print(f"final state: ({final})")
    if traj.terminated_early is None:
        print("guard events: none")
    else:
        t, reason = traj.terminated_early
        print(f"guard events: {reason} guard at step {t}")
    print(f"trajectory written to {args.out}")
    return 0


def cmd_scan(args) -> int:
    if not args.rho_min < args.rho_max:
        print("error: need --rho-min < --rho-max", file=sys.stderr)
        return 1
    if args.step <= 0:
        print("error: --step must be positive", file=sys.stderr)
        return 1
    try:
        result = threshold_scan(args.kind, args.rho_min, args.rho_max,
                                args.step)
    except NoDetection as exc:
        if args.out:
            from .scalar_map import ScanResult
            stub = ScanResult(kind=args.kind, threshold=float("nan"),
                              resolution=args.step / 10.0,
                              reference=SCAN_REFERENCES[args.kind],
                              grid=exc.grid)
            write_scan_csv(stub, args.out)
        summary = {
            "kind": args.kind,
            "threshold": None,
            "resolution": args.step / 10.0,
            "reference": SCAN_REFERENCES[args.kind],
            "detected": False,
        }
        print(json.dumps(summary))
        return 0
    if args.out:
        write_scan_csv(result, args.out)
    print(json.dumps(result.summary()))
    return 0


def cmd_conjugacy(args) -> int:
    system = load_system(args.path)
    if args.trials == 0:
        print("warning: --trials 0 requested; vacuous pass")
        return 0
    rng = np.random.default_rng(args.seed)
    budget = CONJUGACY_STEP_BUDGET * args.steps
    base = class_invariants(system)
    rejected = 0
    worst_deviation = 0.0
    worst_drift = 0.0
    failures = []
    for trial in range(args.trials):
        qmt = None
        while qmt is None:
            candidate = rng.uniform(-1.0, 1.0, size=(system.n, system.n))
            try:
                attempt = QMTMatrix.from_matrix(candidate)
            except SingularMatrix:
                rejected += 1
                print(f"trial {trial}: regenerated a singular candidate C")
                continue
            if attempt.condition() > CONJUGACY_MAX_CONDITION:
                rejected += 1
                print(f"trial {trial}: regenerated a near-singular candidate C "
                      f"(condition {attempt.condition():.3g})")
                continue
            qmt = attempt
        x0 = np.exp(rng.uniform(np.log(0.5), np.log(2.0), size=system.n))
        transformed = apply_qmt(system, qmt)
        other = class_invariants(transformed)
        drift = max(
            float(np.max(np.abs(other.interaction - base.interaction))),
            float(np.max(np.abs(other.growth - base.growth))),
        )
        worst_drift = max(worst_drift, drift)
        if drift > 1e-9:
            failures.append(f"trial {trial}: invariant drift {drift:.3e}")
        try:
            deviation = conjugacy_deviation(system, qmt, x0, args.steps)
        except GuardTermination as exc:
            failures.append(f"trial {trial}: {exc}")
            continue
        worst_deviation = max(worst_deviation, deviation)
        if deviation > budget:
            failures.append(
                f"trial {trial}: deviation {deviation:.3e} exceeds budget "
                f"{budget:.3e}")
    print(f"conjugacy check: {args.trials} trials, {args.steps} steps, "
          f"seed {args.seed}")
    print(f"rejected candidates: {rejected}")
    print(f"max orbit deviation: {worst_deviation:.3e} (budget {budget:.3e})")
    print(f"max invariant drift: {worst_drift:.3e} (budget 1e-09)")
    for failure in failures:
        print(f"*** {failure}")
    if failures:
        return 2
    print("all trials within budget")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qpd",
                     description="quasipolynomial discrete-system analysis")
    parser.add_argument("--version", action="version",
                        version=f"qpd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("analyze", help="classify a system and cross-check it")
    p.add_argument("path", help="system-definition JSON file")
    p.add_argument("--verify", action="store_true",
                   help="also run the numerical cross-checks")
    p.add_argument("--strict", action="store_true",
                   help="exit 2 on analytic/numeric disagreement")
    p.add_argument("--json", metavar="OUT",
                   help="also write the full report as JSON")
    p.add_argument("--tol", type=float, default=DEFAULT_SIGN_TOL,
                   help="sign-classification tolerance")
    p.add_argument("--seed", type=int, default=0, help="ensemble seed")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="iterate the map and write a CSV")
    p.add_argument("path")
    p.add_argument("--x0", required=True,
                   help="comma-separated initial state, e.g. 1,1")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", required=True, help="trajectory CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scan", help="scan the scalar map for a chaos threshold")
    p.add_argument("--kind", required=True,
                   choices=[KIND_PERIOD3, KIND_SNAPBACK])
    p.add_argument("--rho-min", type=float, required=True)
    p.add_argument("--rho-max", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--out", help="per-grid-point CSV path")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("conjugacy",
                       help="property-test conjugacy under random transformations")
    p.add_argument("path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--steps", type=int, default=50)
    p.set_defaults(func=cmd_conjugacy)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SchemaError as exc:
        print(f"error: invalid system definition: {exc}", file=sys.stderr)
        return 1
    except NonPositiveState as exc:
        print(f"error: bad initial condition: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
