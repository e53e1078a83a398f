"""Command-line surface: `pareto-cat <command> <instance> [flags]`."""
from __future__ import annotations
import argparse
from collections.abc import Sequence
from pareto_cat.core.config import settings
from pareto_cat.core.enums import Command, OutputFormat
from pareto_cat.core.logger import logger, setup_logger
from pareto_cat.core.state import RunContext
from pareto_cat.services.command_handler import CommandHandler


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("instance", help="instance JSON file, or a bundled fixture name (chain3, cycle2, staircase)")
    common.add_argument("--seed", type=int, default=None, help="RNG seed; generated and logged when omitted")
    common.add_argument("--threads", type=_positive, default=settings.threads)
    common.add_argument("--cap", type=_positive, default=settings.enumeration_cap, help="enumeration cap on K^n")
    common.add_argument("--exact", action="store_true", help="rational arithmetic where supported")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.JSON.value)
    common.add_argument("--out", default=None, help="output path; a CSV table is written next to it")
    common.add_argument("--close-hom", action="store_true", help="close hom tables reflexively and transitively")
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="pareto-cat",
                                     description="Categorical Pareto optimization on finite instances")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser(Command.VALIDATE.value, parents=[common], help="validate an instance")
    sub.add_parser(Command.FRONTIER.value, parents=[common], help="exact Pareto frontier")

    lam = sub.add_parser(Command.LAMBDA.value, parents=[common], help="minorization probability of a functor")
    lam.add_argument("--functor", required=True, help="comma-separated singleton values, e.g. 0,1")

    particle = sub.add_parser(Command.PARTICLE.value, parents=[common], help="single-particle trace")
    particle.add_argument("--draws", type=_non_negative, default=settings.swarm_draws)
    particle.add_argument("--trials", type=_positive, default=None, help="also run the Markov oracle")

    swarm = sub.add_parser(Command.SWARM.value, parents=[common], help="N-particle swarm")
    swarm.add_argument("--particles", type=_positive, default=settings.swarm_particles)
    swarm.add_argument("--draws", type=_positive, default=settings.swarm_draws)
    swarm.add_argument("--epsilon", type=_non_negative, default=settings.swarm_epsilon)

    inter = sub.add_parser(Command.INTERLEAVE.value, parents=[common], help="interleaving distance of two functors")
    inter.add_argument("--a", required=True)
    inter.add_argument("--b", required=True)
    inter.add_argument("--objective", type=_non_negative, default=0)

    rate = sub.add_parser(Command.RATE.value, parents=[common], help="maximal conversion rate between objects")
    rate.add_argument("--a", required=True)
    rate.add_argument("--b", required=True)
    rate.add_argument("--n-max", type=_positive, default=settings.conversion_n_max)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        setup_logger(level="DEBUG")
    context = RunContext(
        command=Command(args.command),
        seed=args.seed,
        threads=args.threads,
        cap=args.cap,
        exact=args.exact,
        output_format=OutputFormat(args.format),
    )
    logger.debug("Running %s on %s", context.command.value, args.instance)
    return int(CommandHandler(context, args).dispatch())
