import os
import logging
import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ValidationError

from instances.exceptions import InstanceError
from instances.generators import MODELS, generate
from instances.text_format import write_instance
from processor import (
    ExitCode,
    SolveOptions,
    check_subset,
    parameter_report,
    process_input_path,
    render,
)
from solvers.neighborhood import FAILURE_RATE, LABELING_BUDGET

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


def _comma_list(text: str) -> List[str]:
    return [token.strip() for token in text.split(",") if token.strip()]


def parse_args(input_args=None):
    parser = argparse.ArgumentParser(description="Minimum consistent subsets of vertex-colored graphs.")
    parser.add_argument(
        "--log-level",
        type=str,
        default=None,
        choices=LOG_LEVELS,
        help="Log verbosity on stderr. If not provided, MCS_LOG is used (default: WARNING)"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="Compute a minimum consistent subset")
    solve.add_argument(
        "--input",
        type=str,
        required=True,
        help="Instance file, or a directory whose *.mcs / *.txt files are solved in name order"
    )
    solve.add_argument(
        "--method",
        type=str,
        default="auto",
        choices=["auto", "brute", "vc", "nd"],
        help="Solver: exhaustive oracle, vertex cover, neighborhood diversity, or picked from the parameters"
    )
    solve.add_argument("--threads", type=int, default=1, help="Worker threads (default: 1)")
    solve.add_argument("--timeout-ms", type=int, default=None, help="Stop after this many milliseconds")
    solve.add_argument(
        "--compare-oracle",
        action="store_true",
        default=False,
        help="Also run the exhaustive oracle and report whether the sizes match"
    )
    solve.add_argument("--pretty", action="store_true", default=False, help="Human-readable output")
    solve.add_argument("--progress", action="store_true", default=False, help="Show progress bars on stderr")
    solve.add_argument(
        "--omit-timing",
        action="store_true",
        default=False,
        help="Leave elapsed_ms out of the report so output is byte-identical across runs"
    )
    solve.add_argument("--oracle-limit", type=int, default=None, help="Largest n the oracle accepts (default: 20)")
    solve.add_argument("--vc-limit", type=int, default=None, help="Largest vertex cover the vc solver accepts (default: 6)")
    solve.add_argument("--nd-limit", type=int, default=None, help="Largest neighborhood diversity the nd solver accepts (default: 4)")
    solve.add_argument(
        "--labeling-budget",
        type=int,
        default=LABELING_BUDGET,
        help=f"Labelings per label count before switching to random trials (default: {LABELING_BUDGET})"
    )
    solve.add_argument(
        "--failure-rate",
        type=float,
        default=FAILURE_RATE,
        help=f"Allowed failure probability of random labeling mode (default: {FAILURE_RATE})"
    )
    solve.add_argument("--seed", type=int, default=0, help="Seed of random labeling mode (default: 0)")

    check = commands.add_parser("check", help="Test whether a vertex subset is consistent")
    check.add_argument("--input", type=str, required=True, help="Instance file")
    check.add_argument("--subset", type=str, required=True, help="Comma-separated 1-based vertex ids")
    check.add_argument("--explain", action="store_true", default=False, help="Add the per-vertex nearest-neighbor table")
    check.add_argument("--pretty", action="store_true", default=False, help="Human-readable output")

    params = commands.add_parser("params", help="Report vertex cover number and neighborhood diversity")
    params.add_argument("--input", type=str, required=True, help="Instance file")
    params.add_argument("--pretty", action="store_true", default=False, help="Human-readable output")

    gen = commands.add_parser("generate", help="Write seeded random instances")
    gen.add_argument("--model", type=str, required=True, choices=sorted(MODELS), help="Random graph model")
    gen.add_argument("--seed", type=int, required=True, help="Seed of the first instance")
    gen.add_argument("--out", type=str, required=True, help="Output file, or directory when --count > 1")
    gen.add_argument("--count", type=int, default=1, help="Number of instances, seeds seed..seed+count-1 (default: 1)")
    gen.add_argument("--n", type=int, default=None, help="Vertices (gnp_connected, planted_vc)")
    gen.add_argument("--p", type=float, default=None, help="Edge probability (gnp_connected)")
    gen.add_argument("--c", type=int, default=None, help="Colors")
    gen.add_argument("--k", type=int, default=None, help="Planted cover size (planted_vc)")
    gen.add_argument("--r", type=int, default=None, help="Planted class count (planted_nd)")
    gen.add_argument("--sizes", type=_comma_list, default=None, help="Comma-separated class sizes (planted_nd)")
    gen.add_argument("--kinds", type=_comma_list, default=None, help="Comma-separated clique/independent per class (planted_nd)")
    gen.add_argument("--density", type=float, default=None, help="Edge density (planted_vc, planted_nd)")

    args = parser.parse_args(input_args) if input_args else parser.parse_args()
    return args


def _emit(report: BaseModel, pretty: bool) -> None:
    sys.stdout.write(render(report, pretty) + "\n")
    sys.stdout.flush()


def _model_params(args) -> Dict[str, Any]:
    fields = MODELS[args.model].model_fields
    values = {name: getattr(args, name, None) for name in fields}
    return {name: value for name, value in values.items() if value is not None}


def _run_generate(args, logger: logging.Logger) -> ExitCode:
    params = _model_params(args)
    out = Path(args.out)
    if args.count < 1:
        logger.error(f"--count must be positive, got {args.count}")
        return ExitCode.INVALID_INPUT
    try:
        for seed in range(args.seed, args.seed + args.count):
            g = generate(args.model, params, seed)
            target = out if args.count == 1 else out / f"{args.model}_{seed}.mcs"
            write_instance(g, target)
    except InstanceError as e:
        logger.error(f"Generation failed: {e}")
        return ExitCode.INVALID_INPUT
    except OSError as e:
        logger.error(f"Could not write instance: {e}")
        return ExitCode.INVALID_INPUT
    logger.info(f"Wrote {args.count} {args.model} instance(s) to {out}")
    return ExitCode.OK


def main(input_args: Optional[List[str]] = None) -> int:
    # ---- 1) Parse arguments ----
    args = parse_args(input_args)

    # ---- 2) Configure logging ----
    level = args.log_level or os.environ.get("MCS_LOG", "WARNING").upper()
    logging.basicConfig(
        level=level if level in LOG_LEVELS else logging.WARNING,
        format="%(asctime)s [%(levelname)s] %(name)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)]
    )
    logger = logging.getLogger(__name__)

    # ---- 3) Dispatch ----
    if args.command == "solve":
        try:
            options = SolveOptions(
                method=args.method,
                threads=args.threads,
                timeout_ms=args.timeout_ms,
                compare_oracle=args.compare_oracle,
                omit_timing=args.omit_timing,
                progress=args.progress,
                pretty=args.pretty,
                oracle_limit=args.oracle_limit,
                vc_limit=args.vc_limit,
                nd_limit=args.nd_limit,
                labeling_budget=args.labeling_budget,
                failure_rate=args.failure_rate,
                seed=args.seed,
            )
        except ValidationError as e:
            logger.error(f"Invalid solve options: {e}")
            return int(ExitCode.INVALID_INPUT)
        return int(process_input_path(Path(args.input), options, _emit))

    if args.command == "check":
        report, status = check_subset(Path(args.input), args.subset, with_explanation=args.explain)
        _emit(report, args.pretty)
        return int(status)

    if args.command == "params":
        report, status = parameter_report(Path(args.input))
        _emit(report, args.pretty)
        return int(status)

    return int(_run_generate(args, logger))


if __name__ == "__main__":
    sys.exit(main())
