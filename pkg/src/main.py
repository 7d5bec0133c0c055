import argparse
import sys
from pathlib import Path
from typing import List, Optional

from cli.commands import cmd_check, cmd_decompose, cmd_gen, parse_params
from cli.generators import KINDS
from cli.report import render
from cli.surface_file import dumps
from config import settings
from core.errors import PLConvexError
from utils.logger import setup_logger

logger = setup_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.APP_NAME,
        description="Certify global convexity of locally convex PL hypersurfaces in R^n and S^n.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("path", type=Path, help="surface file (.plx)")
        p.add_argument("--format", choices=("json", "text"), default=None,
                       help=f"report format (default: {settings.REPORT_FORMAT})")
        p.add_argument("--mode-override", choices=("euclidean", "spherical"), default=None,
                       help="read the surface in the other model")
        p.add_argument("--jobs", type=int, default=None,
                       help=f"worker processes for vertex checks (default: {settings.JOBS})")
        p.add_argument("--witness-out", type=Path, default=None,
                       help="also write the witness block as JSON to this path")
        p.add_argument("--seed", type=int, default=None,
                       help=f"offset of the generic-probe sequence (default: {settings.PROBE_SEED})")

    add_common(sub.add_parser("check", help="decide global convexity of a closed surface"))
    add_common(sub.add_parser("decompose", help="directrix/generatrix split of a spherical surface"))

    gen = sub.add_parser("gen", help="generate a seeded test surface")
    gen.add_argument("kind", choices=KINDS)
    gen.add_argument("params", nargs="*", help="generator parameters as key=value")
    gen.add_argument("--seed", type=int, default=None,
                     help=f"generator seed (default: {settings.DEFAULT_SEED})")
    gen.add_argument("-o", "--output", type=Path, default=None, help="write here instead of stdout")
    return parser


def _apply_overrides(args: argparse.Namespace) -> None:
    if getattr(args, "jobs", None) is not None:
        if args.jobs < 1:
            raise PLConvexError(f"--jobs must be at least 1, got {args.jobs}")
        settings.JOBS = args.jobs
    if getattr(args, "format", None) is not None:
        settings.REPORT_FORMAT = args.format
    if args.command != "gen" and args.seed is not None:
        if args.seed < 0:
            raise PLConvexError(f"--seed must be nonnegative, got {args.seed}")
        settings.PROBE_SEED = args.seed


def run(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    try:
        _apply_overrides(args)
        if args.command == "gen":
            _, generated = cmd_gen(args.kind, parse_params(args.params), args.seed, args.output)
            if args.output is None:
                sys.stdout.write(dumps(generated.surface, generated.comments))
            return 0

        command = cmd_check if args.command == "check" else cmd_decompose
        code, doc = command(args.path, args.mode_override, args.witness_out)
        sys.stdout.write(render(doc, settings.REPORT_FORMAT))
        return code
    except PLConvexError as e:
        logger.error(f"❌ {e}")
        return e.exit_code


def main():
    try:
        sys.exit(run())
    except Exception as e:
        logger.critical(f"Fatal error: {e}", exc_info=True)
        sys.exit(4)


if __name__ == "__main__":
    main()
