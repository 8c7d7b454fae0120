"""Command-line front end.

Subcommands:

* ``run --config <path> [--out <dir>] [--seed <u64>] [--workers <n>]
  [--algo <name> ...]`` runs a Monte Carlo experiment and writes its
  reports. Flags override the config file.
* ``list-algos`` prints the algorithm registry with parameter defaults.
* ``gen --kind {stationary,randomwalk} --out <csv> ...`` materializes a
  synthetic scenario as a CSV stream for later ``kind = csv`` runs.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys

from .experiment import (
    DataError,
    UsageError,
    build_config,
    list_algorithms,
    parse_config_file,
    run_experiment,
)
from .synth import gen_random_walk, gen_stationary, write_tracking_csv

__all__ = ["main", "entry"]


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; our contract reserves 2 for
    # data problems and uses 1 for usage.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="problms", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a configured experiment")
    run_p.add_argument("--config", required=True, help="flat key = value config file")
    run_p.add_argument("--out", help="output directory (overrides config)")
    run_p.add_argument("--seed", type=int, help="master seed (overrides config)")
    run_p.add_argument("--workers", type=int, help="worker processes (overrides config)")
    run_p.add_argument(
        "--algo",
        action="append",
        metavar="NAME",
        help="run only this algorithm (repeatable); a config label or a registry name",
    )

    sub.add_parser("list-algos", help="print the algorithm registry")

    gen_p = sub.add_parser("gen", help="write a synthetic scenario CSV")
    gen_p.add_argument("--kind", required=True, choices=["stationary", "randomwalk"])
    gen_p.add_argument("--out", required=True, help="destination CSV path")
    gen_p.add_argument("--m", type=int, default=50)
    gen_p.add_argument("--snr-db", type=float, default=20.0)
    gen_p.add_argument("--drift-var", type=float, default=1e-4)
    gen_p.add_argument("--n-steps", type=int, default=10_000)
    gen_p.add_argument("--seed", type=int, default=0)
    gen_p.add_argument("--regressor-kind", choices=["iid", "shift"], default="iid")
    return parser


def _cmd_run(args) -> None:
    items = parse_config_file(args.config)
    config = build_config(
        items,
        out=args.out,
        seed=args.seed,
        workers=args.workers,
        algo_names=args.algo,
    )
    written = run_experiment(config)
    for name in sorted(written):
        print(f"{name}: {written[name]}")


def _cmd_list_algos() -> None:
    for name, schema in list_algorithms().items():
        params = ", ".join(
            f"{k}={v}" for k, v in schema.items() if v is not None
        )
        print(f"{name}: {params}" if params else name)


def _cmd_gen(args) -> None:
    if args.kind == "stationary":
        scenario = gen_stationary(args.m, args.snr_db, args.n_steps, args.seed)
    else:
        scenario = gen_random_walk(
            args.m,
            args.snr_db,
            args.drift_var,
            args.n_steps,
            args.seed,
            regressor_kind=args.regressor_kind,
        )
    try:
        write_tracking_csv(scenario, args.out)
    except OSError as exc:
        raise DataError(f"cannot write {args.out}: {exc}") from None
    print(f"wrote {len(scenario)} steps to {args.out}")


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            _cmd_run(args)
        elif args.command == "list-algos":
            _cmd_list_algos()
        else:
            _cmd_gen(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
