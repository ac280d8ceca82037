"""Command line interface for maxbpd."""

import argparse
import json
import logging
import sys
from typing import List, Optional

from maxbpd import __version__
from maxbpd.codec import DecodeError, decode, encode, encode_trace, mbpd_document
from maxbpd.config import Config, ConfigError
from maxbpd.grid import GridError
from maxbpd.maximal import AlgorithmError, InvariantViolation, run_maximal
from maxbpd.oracle import OracleError, cm_polys, enumerate_mbpds, grothendieck_polys, verify_symmetric_group
from maxbpd.perm import PermutationError, check_size, parse_permutation
from maxbpd.render import RenderError, render, render_png
from maxbpd.snow import rajcode_pair
from maxbpd.utils import format_vector, format_verification_summary, read_sample_file, write_output

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID_INPUT = 2
EXIT_INVARIANT = 3
EXIT_VERIFY_FAILED = 4


class UsageError(Exception):
    """Exception raised for malformed command lines."""
    pass


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser that raises instead of exiting on bad usage."""

    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage().rstrip()}")


def setup_logging(verbose: bool = False):
    """Configure logging based on verbosity level."""
    log_level = logging.DEBUG if verbose else logging.INFO
    log_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s' if verbose else '%(message)s'

    # Results go to stdout; keep diagnostics on stderr
    logging.basicConfig(
        level=log_level,
        format=log_format,
        stream=sys.stderr,
        force=True,
    )

    # Set third-party loggers to a higher level to reduce noise
    if not verbose:
        logging.getLogger("PIL").setLevel(logging.WARNING)
        logging.getLogger("sympy").setLevel(logging.WARNING)


def parse_args(args: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = ArgumentParser(
        prog="maxbpd",
        description="Maximal marked bumpless pipedreams, Rajchgot codes and Grothendieck polynomials.",
    )

    parser.add_argument(
        "-V", "--version",
        action="version",
        version=f"maxbpd version {__version__}",
        help="Show version information",
    )

    parser.add_argument(
        "--verbose", "-v",
        action="store_true",
        help="Enable verbose output for debugging"
    )

    parser.add_argument(
        "--config",
        help="Path to a YAML config file (default: ./maxbpd.yaml or ~/.config/maxbpd/config.yaml)"
    )

    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    rajcode = commands.add_parser("rajcode", help="Print rajcode(w) and rajcode(w⁻¹)")
    rajcode.add_argument("perm", help="Permutation, e.g. 251634 or 2,5,1,6,3,4")

    maximal = commands.add_parser("maximal", help="Build the maximal marked bumpless pipedream of w")
    maximal.add_argument("perm", help="Permutation in one-line notation")
    maximal.add_argument("--format", choices=["ascii", "svg", "json", "png"], default="ascii",
                         help="Output format (default: ascii)")
    maximal.add_argument("--trace", nargs="?", const="-", metavar="FILE",
                         help="Write the replayable event log to FILE (stdout when omitted)")
    maximal.add_argument("--out", help="Write the diagram to this file instead of stdout")

    enumerate_cmd = commands.add_parser("enumerate", help="Enumerate every marked bumpless pipedream of w")
    enumerate_cmd.add_argument("perm", help="Permutation in one-line notation")
    enumerate_cmd.add_argument("--maximal-only", action="store_true",
                               help="Only list diagrams with the most blank and marked tiles")
    enumerate_cmd.add_argument("--count", action="store_true", help="Only print how many diagrams exist")
    enumerate_cmd.add_argument("--format", choices=["ascii", "json"], default="ascii",
                               help="Output format (default: ascii)")

    groth = commands.add_parser("groth", help="Print the Grothendieck polynomial of w")
    groth.add_argument("perm", help="Permutation in one-line notation")
    groth.add_argument("--double", action="store_true", help="Use the double version in x and y")
    groth.add_argument("--cm", action="store_true", help="Print the Castelnuovo-Mumford polynomial instead")

    verify = commands.add_parser("verify", help="Check the construction against the enumeration oracle")
    verify.add_argument("--n", type=int, required=True, help="Permutation size")
    verify.add_argument("--jobs", type=int, help="Worker processes (default from config)")
    verify.add_argument("--sample", help="File with one permutation per line to check instead of all of S_n")
    verify.add_argument("--out", help="Write the TSV report to this file instead of stdout")

    render_cmd = commands.add_parser("render", help="Re-render a JSON diagram document")
    render_cmd.add_argument("file", help="JSON document written by 'maximal --format json'")
    render_cmd.add_argument("--format", choices=["ascii", "svg", "png"], default="ascii",
                            help="Output format (default: ascii)")
    render_cmd.add_argument("--out", help="Write to this file instead of stdout")

    parsed_args = parser.parse_args(args)
    return parsed_args


def _emit_diagram(value, fmt: str, out: Optional[str], config: Config) -> None:
    if fmt == "png":
        if not out:
            raise UsageError("--format png needs --out FILE")
        render_png(value, out, config["png_cell_size"])
    elif fmt == "json":
        write_output(encode(value), out)
    else:
        write_output(render(value, fmt, config["svg_cell_size"]), out)


def cmd_rajcode(args: argparse.Namespace, config: Config) -> int:
    w = check_size(parse_permutation(args.perm), config["max_grid_size"])
    row_code, col_code = rajcode_pair(w)
    print(f"rajcode: {format_vector(row_code)} / inverse: {format_vector(col_code)}")
    return EXIT_OK


def cmd_maximal(args: argparse.Namespace, config: Config) -> int:
    w = parse_permutation(args.perm)
    result = run_maximal(w, max_size=config["max_grid_size"])
    _emit_diagram(result.mbpd, args.format, args.out, config)
    if args.trace:
        write_output(encode_trace(result.trace), args.trace)
    return EXIT_OK


def cmd_enumerate(args: argparse.Namespace, config: Config) -> int:
    w = check_size(parse_permutation(args.perm), config["max_grid_size"])
    report = enumerate_mbpds(w, config["enumeration_bound"])
    diagrams = report.maximal if args.maximal_only else report.diagrams
    if args.count:
        print(len(diagrams))
    elif args.format == "json":
        write_output(json.dumps([mbpd_document(m) for m in diagrams], indent=2) + "\n")
    else:
        write_output("\n".join(render(m, "ascii") for m in diagrams))
    return EXIT_OK


def cmd_groth(args: argparse.Namespace, config: Config) -> int:
    w = check_size(parse_permutation(args.perm), config["max_grid_size"])
    bound = config["enumeration_bound"]
    single, double = cm_polys(w, bound) if args.cm else grothendieck_polys(w, bound)
    print(double if args.double else single)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: Config) -> int:
    if args.n < 1:
        raise UsageError("--n must be positive")
    jobs = args.jobs if args.jobs is not None else config["jobs"]
    if jobs < 1:
        raise UsageError("--jobs must be positive")
    sample = read_sample_file(args.sample) if args.sample else None

    report = verify_symmetric_group(
        args.n,
        jobs=jobs,
        sample=sample,
        bound=config["enumeration_bound"],
        max_size=config["max_grid_size"],
    )
    write_output(report.to_tsv(), args.out)

    smallest = report.smallest_counterexample
    print(format_verification_summary(
        len(report.records), len(report.failures), str(smallest.w) if smallest else None
    ), file=sys.stderr)
    if smallest is not None and smallest.error:
        print(f"  {smallest.error}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def cmd_render(args: argparse.Namespace, config: Config) -> int:
    with open(args.file, "rb") as f:
        value = decode(f.read())
    _emit_diagram(value, args.format, args.out, config)
    return EXIT_OK


COMMANDS = {
    "rajcode": cmd_rajcode,
    "maximal": cmd_maximal,
    "enumerate": cmd_enumerate,
    "groth": cmd_groth,
    "verify": cmd_verify,
    "render": cmd_render,
}


def run_cli(argv: Optional[List[str]] = None) -> int:
    """
    Run one command and map failures to exit codes.

    Returns:
        0 on success, 1 for usage, configuration, bound or I/O errors, 2 for
        an invalid permutation or diagram document, 3 when a construction
        invariant fails, 4 when verification finds failures.
    """
    try:
        args = parse_args(argv)
    except UsageError as e:
        print(f"Usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help and --version
        return e.code if isinstance(e.code, int) else EXIT_OK

    setup_logging(args.verbose)
    logger.debug(f"Starting maxbpd with arguments: {args}")

    try:
        config = Config(args.config)
        config.load()
        return COMMANDS[args.command](args, config)

    except UsageError as e:
        print(f"Usage error: {e}", file=sys.stderr)
        return EXIT_USAGE

    except ConfigError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE

    except OracleError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE

    except PermutationError as e:
        print(f"Invalid permutation: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT

    except DecodeError as e:
        print(f"Invalid diagram document: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT

    except InvariantViolation as e:
        print(f"Internal error: invariant '{e.name}' violated after {len(e.trace)} events", file=sys.stderr)
        print(f"  {e}", file=sys.stderr)
        return EXIT_INVARIANT

    except AlgorithmError as e:
        print(f"Internal error after {len(e.trace)} events: {e}", file=sys.stderr)
        return EXIT_INVARIANT

    except GridError as e:
        print(f"Internal error: {e}", file=sys.stderr)
        return EXIT_INVARIANT

    except (RenderError, OSError) as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_USAGE

    except KeyboardInterrupt:
        print("\nOperation cancelled by user.", file=sys.stderr)
        return EXIT_USAGE

    except Exception as e:
        print(f"Unexpected error: {e}", file=sys.stderr)
        if args.verbose:
            import traceback
            traceback.print_exc()
        return EXIT_USAGE
