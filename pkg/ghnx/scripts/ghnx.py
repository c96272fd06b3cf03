"""Command line interface: ghnx <command> [--config FILE] [--section-key VALUE ...]

Exit codes: 0 on success, 2 on configuration or usage errors, 3 on any other
ghnx or I/O error.
"""
import argparse
import logging
import sys

from ghnx import processes
from ghnx.errors import ConfigError, GhnxError
from ghnx.loaders.config import add_flags, load_config


logger = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

COMMANDS = {
    "gen-data": "write the desk-scale dataset",
    "train": "train the GHN (checkpointed, resumable)",
    "search": "random search ranked by GHN-predicted accuracy",
    "correlate": "correlate predicted with trained accuracy",
    "ablate": "train one GHN per ablation setting",
    "flops": "print per-block and total FLOPs of a network",
    "plotdata": "write (series, x, y) CSV figure data",
}


def main(argv=None):
    """run a ghnx command and return its exit code"""
    argv = sys.argv[1:] if argv is None else list(argv)
    p = argparser()
    try:
        args = p.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG

    try:
        config = load_config(args.config, args)
        processes.run(args.command, config, verbose=args.verbose)
    except ConfigError as e:
        print(f"ghnx: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (GhnxError, OSError) as e:
        logger.error("%s failed: %s", args.command, e)
        print(f"ghnx: {args.command} failed: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def argparser(*args):

    p = argparse.ArgumentParser(
        prog="ghnx",
        description="graph hypernetworks for neural architecture search"
    )
    sub = p.add_subparsers(dest="command", metavar="command", required=True)
    for name, text in COMMANDS.items():
        sp = sub.add_parser(name, help=text, description=text)
        sp.add_argument(
            "--config", type=str, default=None,
            help="YAML configuration file (flags override its values)"
        )
        sp.add_argument(
            "-v", "--verbose", action="store_true",
            help="log debug messages"
        )
        add_flags(sp)

    return p


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
