"""
Command-line front end: one subcommand per module in ``commands``.

Exit codes: 0 success (including informative outcomes), 1 other errors,
2 parse errors, 3 budget exceeded, 4 hypothesis violated.
"""

import argparse
import sys
from typing import Callable, Dict, Optional, Sequence

import structlog

from . import __version__, configure_logging
from .commands import (
    ExperimentConfig,
    bounds,
    bridge,
    complement_scan,
    counting_check,
    decompose,
    find_equation,
    hchain,
    nullcone,
    rank,
    render_json,
    subtensor_scan,
    verify_report,
)
from .config import DEFAULT_NODE_BUDGET, DEFAULT_SEED, DEFAULT_SIZE_CAP, DEFAULT_WORKERS, LOG_LEVEL
from .errors import ParseError
from .exact_algebra import parse_field

logger = structlog.get_logger(__name__)

COMMANDS: Dict[str, Callable[[ExperimentConfig], dict]] = {
    "rank": rank,
    "subtensor-scan": subtensor_scan,
    "complement-scan": complement_scan,
    "find-equation": find_equation,
    "hchain": hchain,
    "decompose": decompose,
    "bridge": bridge,
    "bounds": bounds,
    "counting-check": counting_check,
    "verify-report": verify_report,
    "nullcone": nullcone,
}

HELP = {
    "rank": "certified partition rank and slice rank of a tensor file",
    "subtensor-scan": "partition ranks of all (or sampled) s x ... x s subtensors",
    "complement-scan": "pinned r-blocks and the partition rank of their complement",
    "find-equation": "a polynomial vanishing on tensors of partition rank <= r",
    "hchain": "multilinearize a polynomial and extract its h-chain",
    "decompose": "decompose a tensor using a vanishing polynomial (poly file, tensor file)",
    "bridge": "strength versus partition rank for a homogeneous polynomial",
    "bounds": "closed-form subtensor size and rank bounds",
    "counting-check": "dimension count forcing a vanishing polynomial",
    "verify-report": "re-check the certificates in a report file",
    "nullcone": "nullcone certificate from a slice-rank witness (order 3)",
}


def _dims(text: str):
    try:
        dims = tuple(int(x) for x in text.replace("x", ",").split(",") if x.strip())
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid dims '{text}'") from e
    if not dims or min(dims) < 1:
        raise argparse.ArgumentTypeError(f"invalid dims '{text}'")
    return dims


def _field(text: str):
    try:
        return parse_field(text)
    except ParseError as e:
        raise argparse.ArgumentTypeError(e.message) from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subtensor-rank", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=LOG_LEVEL)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("inputs", nargs="*", help="input JSON files")
        p.add_argument("--field", type=_field, help="QQ or a prime such as GF(5)")
        p.add_argument("--dims", type=_dims, help="e.g. 3x3x3")
        p.add_argument("--d", type=int)
        p.add_argument("--n", type=int)
        p.add_argument("--r", type=int)
        p.add_argument("--m", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--size", type=int, help="subtensor size s (restriction cap for bridge)")
        p.add_argument("--mode", default="tight", choices=("tight", "full"))
        p.add_argument("--strategy", default="subspace", choices=("subspace", "terms"))
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--seeds", type=int, default=1, help="number of generated tensors")
        p.add_argument("--generator", default="uniform")
        p.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET, dest="node_budget")
        p.add_argument("--size-cap", type=int, default=DEFAULT_SIZE_CAP)
        p.add_argument("--workers", type=int, default=DEFAULT_WORKERS)
        p.add_argument("--out")
        p.add_argument("--plot", help="write an SVG histogram (subtensor-scan)")
        p.add_argument("--no-determinism", dest="determinism", action="store_false")
        scope = p.add_mutually_exclusive_group()
        scope.add_argument("--exhaustive", action="store_true")
        scope.add_argument("--sample", type=int, metavar="N")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    return ExperimentConfig(
        command=args.command,
        inputs=list(args.inputs),
        field=args.field,
        dims=args.dims,
        d=args.d,
        n=args.n,
        r=args.r,
        m=args.m,
        k=args.k,
        size=args.size,
        mode=args.mode,
        strategy=args.strategy,
        seed=args.seed,
        seeds=args.seeds,
        generator=args.generator,
        determinism=args.determinism,
        exhaustive=args.exhaustive,
        sample=args.sample,
        node_budget=args.node_budget,
        size_cap=args.size_cap,
        workers=args.workers,
        out=args.out,
        plot=args.plot,
    )


def run(config: ExperimentConfig) -> dict:
    return COMMANDS[config.command](config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    configure_logging(args.log_level)
    try:
        config = config_from_args(args)
    except ParseError as e:
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code
    response = run(config)
    if response.get("report") is not None and response.get("output_path") is None:
        sys.stdout.write(render_json(response["report"]))
    print(f"{response['status']}: {response['message']}", file=sys.stderr)
    if "suggestion" in response:
        print(f"suggestion: {response['suggestion']}", file=sys.stderr)
    return int(response.get("exit_code", 0))

