"""
Command-line entry point: ``lodo run|validate|sweep|reduce``.

Exit codes: 0 success, 2 configuration error, 3 standing-assumption failure,
4 certification failure, 5 numerical failure, 6 post-condition check failed.
"""

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from .. import __version__
from ..exceptions import LodoError
from .config import load_config
from .runner import ExitCode, exit_code_for, reduce_only, run_config_file, sweep, validate_only

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else (logging.WARNING if quiet else logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='lodo',
        description='Low-dimensional observers from moment-matching reduced models.',
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='warnings and errors only')
    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', help='run one experiment')
    run.add_argument('config', help='experiment TOML file')
    run.add_argument('--seed', type=int, default=None, help='override the PRNG seed')
    run.add_argument('--h', type=float, default=None, help='override the integration step')
    run.add_argument('--out-dir', default=None, help='override the output directory')
    run.add_argument('--full-state', action='store_true', default=None, help='dump full state columns')
    run.add_argument('--bound', action='store_true', default=None, help='evaluate and check the error bound')

    validate = sub.add_parser('validate', help='check the standing assumptions only')
    validate.add_argument('config')

    sweep_cmd = sub.add_parser('sweep', help='run every *.toml in a directory in parallel')
    sweep_cmd.add_argument('directory')
    sweep_cmd.add_argument('--workers', type=int, default=None, help='worker threads')
    sweep_cmd.add_argument('--out-dir', default=None, help='root for per-experiment output directories')

    reduce_cmd = sub.add_parser('reduce', help='build the reduced model and its Bode data only')
    reduce_cmd.add_argument('config')
    reduce_cmd.add_argument('--out-dir', default=None)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)

    if args.command == 'run':
        result = run_config_file(args.config, seed=args.seed, h=args.h, out_dir=args.out_dir,
                                 full_state=args.full_state, bound=args.bound)
        if result.report:
            print(json.dumps({'exit_code': int(result.exit_code), 'artifacts': result.artifacts}, indent=2))
        if result.message:
            print(result.message, file=sys.stderr)
        return int(result.exit_code)

    if args.command == 'sweep':
        try:
            summary = sweep(args.directory, args.workers, args.out_dir)
        except LodoError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return int(exit_code_for(exc))
        print(json.dumps(summary, indent=2))
        return int(ExitCode.OK if all(code == 0 for code in summary.values()) else ExitCode.CHECK_FAILED)

    try:
        config = load_config(args.config)
        if args.command == 'reduce':
            config = config.with_overrides(out_dir=args.out_dir)
    except LodoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return int(exit_code_for(exc))

    result = validate_only(config) if args.command == 'validate' else reduce_only(config)
    if result.message:
        print(result.message)
    if result.artifacts:
        print(json.dumps(result.artifacts, indent=2))
    return int(result.exit_code)


if __name__ == '__main__':
    sys.exit(main())
