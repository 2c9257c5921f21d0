#!/usr/bin/env python
"""
Command-line front end for the semifinite verification toolkit.

Subcommands:
    verify   run a campaign (--config, or defaults) or the check battery on stored operators (--x --y --p)
    falsify  search for counterexamples to the |xy| form of Young in singular values
    demo     run the worked examples
    serve    start the MCP server

Exit codes: 0 when every theorem check passed, 1 when one failed, 2 on errors.
"""
import argparse
import dataclasses
import sys
import time
from pathlib import Path

from utils.logging_utils import get_logger
from semifinite.algebra import TracialAlgebra, load_operator, operator_from_dict, save_operator
from semifinite.campaign import KNOWN_CHECKS, CampaignConfig, run_campaign, verify_file
from semifinite.config import default_tolerance, seed_from_env
from semifinite.export import write_json, write_reports
from semifinite.functions import ConjugatePair
from semifinite.inequalities import check_young_sv, check_young_sv_xy, find_xy_counterexample
from semifinite.suite import NOT_THEOREMS, VerificationSuite, is_theorem

logger = get_logger("semifinite_cli")

EXIT_OK, EXIT_FAILED, EXIT_ERROR = 0, 1, 2


def _tolerance(args, base=None):
    base = base or default_tolerance()
    return base.with_overrides(abs_tol=args.tol_abs, rel_tol=args.tol_rel)


def _print_report(report):
    print(report.summary())


def cmd_verify(args):
    if args.x or args.y:
        if not (args.x and args.y and args.p):
            print("verify needs --x, --y and --p together", file=sys.stderr)
            return EXIT_ERROR
        report = verify_file(args.x, args.y, args.p, _tolerance(args))
        for sub in report.details["reports"]:
            marker = "  (not a theorem)" if sub["name"] in NOT_THEOREMS else ""
            status = "PASS" if sub["passed"] else "FAIL"
            print(f"{status}  {sub['name']:<34} worst_margin={float(sub['worst_margin']): .6e}{marker}")
        _print_report(report)
        if args.out:
            write_reports(report.details["reports"], args.out, args.format)
        return EXIT_OK if report.passed else EXIT_FAILED

    config = CampaignConfig.load(
        args.config,
        seed=args.seed,
        trials=args.trials,
        output_path=args.out,
        output_format=args.format if args.out else None,
        checks=args.checks,
    )
    config = dataclasses.replace(config, tolerance=_tolerance(args, config.tolerance))
    result = run_campaign(config)
    for name, aggregate in result.aggregates.items():
        status = "PASS" if aggregate.failures == 0 else ("FAIL" if aggregate.theorem else "INFO")
        print(
            f"{status}  {name:<34} runs={aggregate.runs:<6} failures={aggregate.failures:<4} "
            f"worst_margin={aggregate.worst_margin: .6e}"
        )
    if result.search is not None:
        _print_report(result.search)
    print(f"{'PASS' if result.passed else 'FAIL'}  campaign finished in {result.wall_time:.2f}s")
    return result.exit_code


def _save_witness(report, out):
    """Write the search report and, when found, the witness operators next to it."""
    out = Path(out)
    write_json(report.to_dict(), out)
    if report.witness is None:
        return []
    stem = out.with_suffix("")
    paths = []
    for role in ("x", "y"):
        path = stem.parent / f"{stem.name}_{role}.json"
        save_operator(operator_from_dict(report.witness[role]), path)
        paths.append(path)
    return paths


def _recheck_witness(paths, p, tol):
    """Reload a saved witness pair and repeat the |xy| check on it."""
    x, y = (load_operator(path) for path in paths)
    return check_young_sv_xy(x, y, ConjugatePair.from_p(p), tol)


def cmd_falsify(args):
    seed = args.seed if args.seed is not None else seed_from_env(0)
    tol = _tolerance(args)
    report = find_xy_counterexample(args.dim, args.seeds, seed, tol)
    _print_report(report)
    if report.passed:
        witness = report.witness
        print(f"Witness at trial {witness['trial']}: p={witness['p']:.6f}, t={witness['t']:g}")
        print(f"The |xy*| form {'passes' if witness['xy_star_passes'] else 'FAILS'} on the same pair")
    else:
        print(f"No witness in {args.seeds} trials")
    if args.out:
        paths = _save_witness(report, args.out)
        for path in paths:
            print(f"Saved {path}")
        if paths:
            recheck = _recheck_witness(paths, report.witness["p"], tol)
            verdict = "passes" if recheck.passed else "fails again"
            print(f"Reloaded pair: the |xy| form {verdict} (worst_margin={recheck.worst_margin: .6e})")
    return EXIT_OK


def cmd_demo(args):
    """Worked examples with known answers."""
    tol = _tolerance(args)
    suite = VerificationSuite(tol)
    m2 = TracialAlgebra.factor(2)
    pq = ConjugatePair.from_p(2.0)
    a, b = m2.diagonal([4, 1]), m2.diagonal([2, 1])
    e11 = m2.operator([[[1, 0], [0, 0]]])
    e12 = m2.operator([[[0, 1], [0, 0]]])

    print("\n=== DIAGONAL PAIR a = diag(4, 1), b = diag(2, 1), p = 2 ===")
    reports = [
        suite.young_sv(a, b, pq),
        suite.young_trace(a, b, pq),
        suite.equality_trace(a, m2.diagonal([16, 1]), ConjugatePair.from_p(3.0)),
        suite.agm(m2.diagonal([4, 0]), m2.diagonal([0, 4])),
    ]
    for report in reports:
        _print_report(report)

    print("\n=== |xy| VERSUS |xy*| FOR x = e11, y = e12, p = 2 ===")
    xy = check_young_sv_xy(e11, e12, pq, tol)
    xy_star = check_young_sv(e11, e12, pq, tol)
    _print_report(xy)
    _print_report(xy_star)
    reports.append(xy_star)

    print("\n=== TWO-BLOCK ALGEBRA M_2 (weight 0.5) + M_3 (weight 1.5) ===")
    algebra = TracialAlgebra.from_specs([(2, 0.5), (3, 1.5)])
    x = algebra.diagonal([3, 1, 2, 0.5, 0.25])
    y = algebra.diagonal([1, 2, 1, 1, 4])
    for report in (suite.young_sv(x, y, ConjugatePair.from_p(1.5)), suite.trace_identity(x)):
        _print_report(report)
        reports.append(report)

    failed = [r.name for r in reports if is_theorem(r) and not r.passed]
    return EXIT_FAILED if failed else EXIT_OK


def cmd_serve(args):
    from semifinite_mcp_server import serve

    return serve(args.transport)


def build_parser():
    parser = argparse.ArgumentParser(description="Verify Young-type inequalities for generalized singular values")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="Campaign seed (defaults to SNL_SEED, then the config file)")
    common.add_argument("--trials", type=int, help="Number of random trials")
    common.add_argument("--tol-abs", type=float, dest="tol_abs", help="Absolute tolerance")
    common.add_argument("--tol-rel", type=float, dest="tol_rel", help="Relative tolerance")
    common.add_argument("--out", help="Write the report to this path")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="Report format (default json)")

    subparsers = parser.add_subparsers(dest="command", required=True)

    verify = subparsers.add_parser("verify", parents=[common], help="Run a campaign or verify stored operators")
    verify.add_argument("--config", help="Campaign configuration JSON")
    verify.add_argument("--x", help="Operator file for x")
    verify.add_argument("--y", help="Operator file for y")
    verify.add_argument("--p", type=float, help="Exponent p > 1")
    verify.add_argument("--checks", nargs="+", choices=KNOWN_CHECKS, help="Restrict the campaign to these checks")
    verify.set_defaults(handler=cmd_verify)

    falsify = subparsers.add_parser("falsify", parents=[common], help="Search for |xy| counterexamples")
    falsify.add_argument("--dim", type=int, default=2, help="Matrix size (default 2)")
    falsify.add_argument("--seeds", type=int, default=10000, help="Number of trials (default 10000)")
    falsify.set_defaults(handler=cmd_falsify)

    demo = subparsers.add_parser("demo", parents=[common], help="Run the worked examples")
    demo.set_defaults(handler=cmd_demo)

    serve = subparsers.add_parser("serve", help="Start the MCP server")
    serve.add_argument("--transport", default="stdio", help="Transport (default stdio)")
    serve.set_defaults(handler=cmd_serve)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    start_time = time.time()
    try:
        return args.handler(args)
    except Exception as e:
        elapsed = time.time() - start_time
        error_msg = f"Error running {args.command}: {str(e)}"
        logger.error(f"{error_msg} after {elapsed:.2f}s")
        print(error_msg, file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
