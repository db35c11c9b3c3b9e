"""Command line interface for the Grassmannian toolkit."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Iterable, Optional

from .config import FlowConfig, load_config
from .exceptions import (
    ConfigurationError,
    GrassmannError,
    InvalidArgumentsError,
    MatrixParseError,
    ModeMismatchError,
    ReportIOError,
)
from .linalg import Mode
from .models import Subspace
from .samplers import SamplerKind, SamplerSpec
from .services import GrassmannService
from .storage import FORMATS, format_matrix
from .utils import parse_float_list, parse_index_list

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

FLOW_COMMANDS = {"flow", "verify", "closure"}
CONFIG_KEYS = {"output_dir", "tolerance", "jobs"}
FLOW_KEYS = {"r_step", "epsilon", "n_max"}


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=[m.value for m in Mode], help="Scalar mode (default: inferred from input).")
    common.add_argument("--tolerance", type=float, help="Relative zero tolerance in floating mode.")
    common.add_argument("--format", dest="fmt", choices=FORMATS, help="Report format (default json).")
    common.add_argument("--output", help="Output path, '-' for stdout (default: $TPGRASS_OUTPUT_DIR or stdout).")
    common.add_argument("--verbose", action="store_true", help="Log debug output to stderr.")
    return common


def _flow_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--r-step", type=float, help="Path sampling step (default 0.1).")
    parser.add_argument("--epsilon", type=float, help="Convergence threshold on the distance (default 1e-9).")
    parser.add_argument("--n-max", type=int, help="Iteration cap (default 200).")


def _start_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", dest="N", type=int, help="Dimension of V.")
    parser.add_argument("--k", type=int, help="Subspace dimension.")
    parser.add_argument("--start-file", help="Matrix file with the starting generator rows.")
    parser.add_argument("--sampler", choices=[kind.value for kind in SamplerKind], help="Generate the start instead.")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--nodes", help="Vandermonde nodes, e.g. '1,2' or '1/2,3'.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tpgrass",
        description="Totally positive Grassmannian toolkit",
        epilog="Exit status: 0 pass, 1 verification failure, 2 usage, parse, mode, config or report i/o error.",
    )
    parser.add_argument(
        "--config",
        dest="config_file",
        help="Optional configuration file with overrides (JSON format).",
    )
    common = _common_options()
    subparsers = parser.add_subparsers(dest="command", required=True)

    plucker_parser = subparsers.add_parser("plucker", parents=[common], help="Print Plücker coordinates.")
    plucker_parser.add_argument("file")

    classify_parser = subparsers.add_parser("classify", parents=[common], help="Classify a subspace.")
    classify_parser.add_argument("file")

    flow_parser = subparsers.add_parser("flow", parents=[common], help="Iterate g_1 toward the fixed subspace.")
    _start_options(flow_parser)
    _flow_options(flow_parser)

    verify_parser = subparsers.add_parser("verify", parents=[common], help="Certify a positive subspace.")
    _start_options(verify_parser)
    _flow_options(verify_parser)

    suite_parser = subparsers.add_parser("suite", parents=[common], help="Run the inclusion suite.")
    suite_parser.add_argument("--n", dest="N", type=int, required=True)
    suite_parser.add_argument("--k", type=int, required=True)
    suite_parser.add_argument("--samples", type=int, default=200)
    suite_parser.add_argument("--seed", type=int, default=0)
    suite_parser.add_argument("--jobs", type=int, help="Worker processes (default: $TPGRASS_JOBS or 1).")

    sample_parser = subparsers.add_parser("sample", parents=[common], help="Generate a subspace.")
    sample_parser.add_argument("--n", dest="N", type=int, required=True)
    sample_parser.add_argument("--k", type=int)
    sample_parser.add_argument("--sampler", choices=[kind.value for kind in SamplerKind], required=True)
    sample_parser.add_argument("--seed", type=int, default=0)
    sample_parser.add_argument("--index", type=int, default=0)
    sample_parser.add_argument("--nodes")
    sample_parser.add_argument("--index-set")
    sample_parser.add_argument("--entry-bound", type=int, default=3)
    sample_parser.add_argument("--r", type=float, default=0.1)

    closure_parser = subparsers.add_parser("closure", parents=[common], help="Flow a coordinate subspace inward.")
    closure_parser.add_argument("--n", dest="N", type=int, required=True)
    closure_parser.add_argument("--index-set", required=True)
    closure_parser.add_argument("--r-list", default="1,0.1,0.01")

    perron_parser = subparsers.add_parser("perron", parents=[common], help="Show the Perron data of g_1.")
    perron_parser.add_argument("--n", dest="N", type=int, required=True)
    perron_parser.add_argument("--k", type=int, required=True)

    return parser


def load_overrides(config_file: str | None) -> dict:
    if not config_file:
        return {}
    path = Path(config_file)
    if not path.exists():
        raise FileNotFoundError(f"Configuration file {config_file} does not exist.")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"Configuration file {config_file} is not valid JSON: {exc}") from exc
    unknown = set(payload) - CONFIG_KEYS - FLOW_KEYS
    if unknown:
        raise ConfigurationError(f"Unknown configuration keys: {', '.join(sorted(unknown))}")
    return payload


def create_service(args: argparse.Namespace, overrides: dict) -> GrassmannService:
    base_config = load_config()
    if "output_dir" in overrides:
        base_config = replace(base_config, output_dir=Path(overrides["output_dir"]))
    if "tolerance" in overrides:
        base_config = replace(base_config, tolerance=float(overrides["tolerance"]))
    if "jobs" in overrides:
        base_config = replace(base_config, jobs=int(overrides["jobs"]))
    if args.tolerance is not None:
        base_config = replace(base_config, tolerance=args.tolerance)
    return GrassmannService(config=base_config)


def _flow_config(args: argparse.Namespace, service: GrassmannService, overrides: dict) -> FlowConfig:
    defaults = {key: overrides[key] for key in FLOW_KEYS if key in overrides}
    return service.flow_config(
        r_step=args.r_step if args.r_step is not None else defaults.get("r_step"),
        epsilon=args.epsilon if args.epsilon is not None else defaults.get("epsilon"),
        n_max=args.n_max if args.n_max is not None else defaults.get("n_max"),
    )


def _start_subspace(args: argparse.Namespace, service: GrassmannService, mode: Optional[str]) -> Subspace:
    if args.start_file:
        return service.load_subspace(args.start_file, mode)
    if not args.sampler or args.N is None:
        raise InvalidArgumentsError("give either --start-file or --sampler with --n and --k")
    spec = SamplerSpec(
        kind=SamplerKind(args.sampler),
        N=args.N,
        k=args.k,
        seed=args.seed,
        nodes=args.nodes.split(",") if args.nodes else None,
    )
    return service.sample(spec)


def _write_text(text: str, destination: Optional[Path]) -> None:
    if destination is None:
        sys.stdout.write(text)
        return
    try:
        destination.parent.mkdir(parents=True, exist_ok=True)
        destination.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ReportIOError(f"cannot write to {destination}: {exc}") from exc


def run_command(args: argparse.Namespace, service: GrassmannService, overrides: dict) -> int:
    fmt = args.fmt or "json"

    def destination(extension: str = fmt) -> Optional[Path]:
        return service.output_path(args.command, extension, args.output)

    if args.command == "plucker":
        p = service.plucker(service.load_subspace(args.file, args.mode))
        if args.fmt is None:
            _write_text(p.render() + "\n", destination("txt"))
        else:
            service.emit(p, fmt, destination())
    elif args.command == "classify":
        classification = service.classify(service.load_subspace(args.file, args.mode))
        service.emit(classification, fmt, destination())
    elif args.command == "flow":
        start = _start_subspace(args, service, Mode.FLOAT.value).to_float(service.config.tolerance)
        trace = service.flow(start, _flow_config(args, service, overrides))
        service.emit(trace, fmt, destination())
        return EXIT_PASS if trace.converged_at is not None else EXIT_FAIL
    elif args.command == "verify":
        certificate = service.verify(_start_subspace(args, service, args.mode), _flow_config(args, service, overrides))
        service.emit(certificate, fmt, destination())
        return EXIT_PASS if certificate.passed else EXIT_FAIL
    elif args.command == "suite":
        report = service.suite(args.N, args.k, args.samples, args.seed, args.jobs)
        service.emit(report, fmt, destination())
        return EXIT_PASS if report.passed else EXIT_FAIL
    elif args.command == "sample":
        spec = SamplerSpec(
            kind=SamplerKind(args.sampler),
            N=args.N,
            k=args.k,
            seed=args.seed,
            index=args.index,
            nodes=args.nodes.split(",") if args.nodes else None,
            index_set=parse_index_list(args.index_set) if args.index_set else None,
            entry_bound=args.entry_bound,
            r=args.r,
        )
        _write_text(format_matrix(service.sample(spec).rows), destination("txt"))
    elif args.command == "closure":
        report = service.closure(parse_index_list(args.index_set), args.N, parse_float_list(args.r_list))
        service.emit(report, fmt, destination())
        return EXIT_PASS if report.passed else EXIT_FAIL
    elif args.command == "perron":
        service.emit(service.perron(args.N, args.k), fmt, destination())
    return EXIT_PASS


def main(argv: Iterable[str] | None = None) -> int:
    """Run the CLI and return its exit status.

    0 when the pipeline passes. 1 when a verdict fails or any other library error is
    raised, a start outside the positive locus included. 2 for usage, matrix parse,
    scalar mode, configuration and report i/o errors, all reported through
    ``parser.error``.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.command in FLOW_COMMANDS and args.mode == Mode.EXACT.value:
        parser.error("flow requires floating mode")

    try:
        overrides = load_overrides(args.config_file)
        service = create_service(args, overrides)
        return run_command(args, service, overrides)
    except FileNotFoundError as exc:
        parser.error(str(exc))
    except MatrixParseError as exc:
        parser.error(f"cannot parse matrix: {exc}")
    except (InvalidArgumentsError, ModeMismatchError, ConfigurationError, ReportIOError) as exc:
        parser.error(str(exc))
    except ValueError as exc:
        # pydantic validation errors of sampler specifications
        parser.error(str(exc))
    except GrassmannError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
