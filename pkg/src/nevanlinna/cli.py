"""Command-line entry point: ``nevanlinna run|list|oracle``."""
from __future__ import annotations

import argparse
import sys

from . import scenario as sc_mod
from .config import DEFAULT
from .errors import ParseError, ValidationError
from .verify import VERIFIERS

ORACLE_MIN_COVERAGE = 0.99


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nevanlinna",
                                description="Numerical checks of Nevanlinna-type inequalities.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("scenario", help="YAML scenario file")
        sp.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        sp.add_argument("--tol", type=float, default=None,
                        help="quadrature and supremum tolerance")
        sp.add_argument("--depth", type=int, default=None, help="dyadic depth of the planar lattice")
        sp.add_argument("--out", default="-", help="output path (default stdout)")
        sp.add_argument("--workers", type=int, default=None,
                        help=f"worker processes (default ${sc_mod.WORKERS_ENV} or CPU count)")

    run = sub.add_parser("run", help="run every check of a scenario")
    common(run)
    run.add_argument("--format", choices=("csv", "json-lines"), default="csv")
    sub.add_parser("list", help="list the available verifiers")
    orc = sub.add_parser("oracle", help="cross-check quadrature values by Monte Carlo")
    common(orc)
    orc.add_argument("--samples", type=int, default=None, help="Monte-Carlo samples per term")
    return p


def _write(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list":
        width = max(len(k) for k in VERIFIERS)
        for name, desc in VERIFIERS.items():
            print(f"{name:<{width}}  {desc}")
        return 0

    settings = DEFAULT.with_overrides(quad_tol=args.tol, sup_tol=args.tol, depth=args.depth,
                                      mc_samples=getattr(args, "samples", None))
    try:
        scen = sc_mod.load_scenario(args.scenario, settings, args.seed)
    except (ParseError, ValidationError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    # scenario tolerances apply first; explicit flags win
    scen.settings = scen.settings.with_overrides(quad_tol=args.tol, sup_tol=args.tol,
                                                 depth=args.depth,
                                                 mc_samples=getattr(args, "samples", None))

    if args.command == "run":
        results = sc_mod.run_suite(scen, args.workers)
        _write(sc_mod.format_report(results, args.format), args.out)
        for r in results:
            if r.verdict == "ERROR":
                print(f"error in {r.name}: {r.error}: {r.message}", file=sys.stderr)
        return sc_mod.exit_status(results)

    outcomes = sc_mod.run_outcomes(scen, oracle=True, workers=args.workers)
    _write(sc_mod.format_oracle(outcomes), args.out)
    hit, total = sc_mod.coverage(outcomes)
    rate = hit / total if total else 1.0
    print(f"oracle coverage {hit}/{total} = {rate:.4f}", file=sys.stderr)
    errors = any(r.verdict == "ERROR" for o in outcomes for r in o.reports)
    if rate < ORACLE_MIN_COVERAGE:
        return 2
    return 1 if errors else 0


if __name__ == "__main__":
    sys.exit(main())
