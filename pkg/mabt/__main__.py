"""CLI entrypoint for mabt."""

import argparse
import logging
import sys
from typing import Optional

from mabt._version import __version__
from mabt.cli.dispatch import SUBCOMMANDS, RunConfig, run


def _csv_list(text: str) -> tuple[str, ...]:
    return tuple(tok.strip() for tok in text.split(",") if tok.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mabt",
        description="Bootstrap model averaging for linear regression",
    )
    parser.add_argument("--version", action="version", version=f"mabt {__version__}")
    parser.add_argument("command", help=f"One of: {', '.join(SUBCOMMANDS)}")

    data = parser.add_argument_group("data")
    data.add_argument("--input", help="CSV file with a header row")
    data.add_argument("--response", help="Name of the response column")
    data.add_argument("--coef", type=_csv_list, default=(), help="Coefficients for ci (names or indices)")

    method = parser.add_argument_group("methods")
    method.add_argument("--methods", type=_csv_list, default=None, help="Comma-separated method names")
    method.add_argument("--m", default=None, help="Resample size: N, half_n, gcv or gcv:a,b,c")
    method.add_argument("--B", type=int, default=500, help="Bootstrap replicates")
    method.add_argument("--U", type=int, default=500, help="Limit-law draws for intervals")
    method.add_argument("--seed", type=int, default=0, help="Master seed")
    method.add_argument("--level", type=float, default=0.95, help="Nominal interval coverage")

    study = parser.add_argument_group("prediction study")
    study.add_argument("--train-n", dest="train_n", type=int, default=None, help="Training rows per split")
    study.add_argument("--splits", type=int, default=1000, help="Number of random splits")

    sim = parser.add_argument_group("simulations")
    sim.add_argument("--case", type=int, default=1, help="Coverage design case (1 or 2)")
    sim.add_argument("--eta", type=float, default=0.5, help="Error scale of the coverage design")
    sim.add_argument("--n", type=int, default=None, help="Sample size")
    sim.add_argument("--alpha", type=float, default=1.0, help="Coefficient decay of the risk design")
    sim.add_argument("--r2", type=float, default=0.5, help="Population R^2 of the risk design")
    sim.add_argument("--reps", type=int, default=100, help="Monte Carlo replications")

    output = parser.add_argument_group("output")
    output.add_argument("--out", default=None, help="Output file (stdout when omitted)")
    output.add_argument("--format", choices=["json", "csv"], default="json", help="Output format")
    output.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default="WARNING",
        help="Logging threshold (messages go to stderr)",
    )
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """Main CLI entrypoint."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    config = RunConfig(
        subcommand=args.command,
        input=args.input,
        response=args.response,
        methods=args.methods,
        m=args.m,
        B=args.B,
        U=args.U,
        seed=args.seed,
        level=args.level,
        train_n=args.train_n,
        splits=args.splits,
        out=args.out,
        format=args.format,
        coef=args.coef,
        case=args.case,
        eta=args.eta,
        n=args.n,
        alpha=args.alpha,
        r2=args.r2,
        reps=args.reps,
    )
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
