"""Command-line entry point: ``ncosc run|figure|sweep|ep-solve|check``."""

import argparse
import logging
import sys
from pathlib import Path

from ..errors import ConfigError
from . import figures
from .config import load_config
from .runner import EXIT_NUMERIC, EXIT_OK, EXIT_VALIDATION, ep_solve, run

log = logging.getLogger("ncoscillator")


def build_parser():
    parser = argparse.ArgumentParser(prog="ncosc", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run every analysis item of a config")
    p.add_argument("config")
    p.add_argument("--output", help="override the config's output directory")

    p = sub.add_parser("figure", help="write the data (and PNG) for one figure target")
    p.add_argument("id", choices=figures.FIGURE_IDS + ("all",))
    p.add_argument("--output", default="figures")
    p.add_argument("--points", type=int, default=400)
    p.add_argument("--no-plot", action="store_true", help="skip PNG rendering")

    p = sub.add_parser("sweep", help="rerun a config across values of one field")
    p.add_argument("config")
    p.add_argument("--param", required=True, help="dotted field path, list indices allowed")
    p.add_argument("--values", required=True, help="JSON list or comma-separated values")
    p.add_argument("--output", default="sweep.csv")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("ep-solve", help="solve the EP layer only")
    p.add_argument("config")
    p.add_argument("--output")

    sub.add_parser("check", help="run the full invariant suite")
    return parser


def _run(args):
    report = run(load_config(args.config), args.output)
    for chk in report.checks:
        if not chk.passed:
            log.warning("check failed: %s %s", chk.name, chk.detail)
    print(f"{report.manifest['status']}: wrote {len(report.manifest['files'])} files to {report.output}")
    return report.exit_code


def _figure(args):
    ids = figures.FIGURE_IDS if args.id == "all" else (args.id,)
    code = EXIT_OK
    for fig_id in ids:
        res = figures.reproduce_figure(fig_id, args.output, points=args.points, plot=not args.no_plot)
        status = "ok" if res.ok else "check_failed"
        print(f"{fig_id}: {status}, {len(res.files)} files in {args.output}")
        if not res.ok:
            code = EXIT_NUMERIC
    return code


def _sweep(args):
    import yaml

    from .sweep import parse_values, sweep

    path = Path(args.config)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError("<file>", str(exc)) from exc
    values = parse_values(args.values)
    rows, failures = sweep(raw, args.param, values, args.output, workers=args.workers)
    print(f"{len(values)} values, {len(rows)} rows, {failures} failed -> {args.output}")
    return EXIT_OK if failures == 0 else EXIT_NUMERIC


def _ep_solve(args):
    report = ep_solve(load_config(args.config), args.output)
    ep = report.manifest.get("ep")
    if ep:
        print(f"{ep['method']}: max residual {ep['residual_max']:.3e} (tolerance {ep['tolerance']:.1e})")
    else:
        print(f"failed: {report.manifest['error']['message']}")
    return report.exit_code


def _check(args):
    from .checks import run_all

    results = run_all()
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_NUMERIC


HANDLERS = {"run": _run, "figure": _figure, "sweep": _sweep, "ep-solve": _ep_solve, "check": _check}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return HANDLERS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
