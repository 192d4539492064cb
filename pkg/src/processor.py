import time
import logging
from enum import IntEnum
from pathlib import Path
from typing import Callable, List, Optional, Tuple

from pydantic import BaseModel, Field

from graphs.core import all_pairs_distances, explain, is_consistent
from graphs.exceptions import BudgetExceededError, GraphValidationError
from graphs.structural import minimum_vertex_cover, neighborhood_decomposition
from instances.exceptions import InstanceError
from instances.text_format import read_instance
from schemas.instance import ColoredGraph, VertexExplanation
from schemas.solution import CheckReport, ErrorReport, Solution, SolveReport
from schemas.structure import ParameterReport, TypeSummary
from solvers.base import MCSSolver
from solvers.exceptions import (
    NoFeasibleGuessError,
    ParameterTooLargeError,
    SolverTimeout,
    TooLargeError,
)
from solvers.neighborhood import NeighborhoodMCSSolver
from solvers.oracle import OracleSolver, brute_force_mcs
from solvers.vertex_cover import VertexCoverMCSSolver

logger = logging.getLogger(__name__)

AUTO_BRUTE_MAX_N = 14
INSTANCE_SUFFIXES = (".mcs", ".txt")


class ExitCode(IntEnum):
    OK = 0
    INCONSISTENT = 1
    INVALID_INPUT = 2
    PARAMETER_TOO_LARGE = 3
    VERIFICATION_FAILED = 4
    TIMEOUT = 5


class SolveOptions(BaseModel):
    method: str = "auto"
    threads: int = Field(default=1, ge=1)
    timeout_ms: Optional[int] = Field(default=None, ge=1)
    compare_oracle: bool = False
    omit_timing: bool = False
    progress: bool = False
    pretty: bool = False
    oracle_limit: Optional[int] = Field(default=None, ge=1)
    vc_limit: Optional[int] = Field(default=None, ge=0)
    nd_limit: Optional[int] = Field(default=None, ge=1)
    labeling_budget: int = Field(default=10 ** 6, ge=1)
    failure_rate: float = Field(default=0.01, gt=0.0, lt=1.0)
    seed: int = Field(default=0, ge=0)


Emit = Callable[[BaseModel, bool], None]


def render(report: BaseModel, pretty: bool = False) -> str:
    """One JSON line, or indented ``key: value`` text with ``pretty``."""
    if not pretty:
        return report.model_dump_json(exclude_none=True)
    lines = []
    for key, value in report.model_dump(mode="json", exclude_none=True).items():
        lines.append(f"{key}: {value}")
    return "\n".join(lines)


def _one_based(rows: List[VertexExplanation]) -> List[VertexExplanation]:
    return [
        row.model_copy(update={"vertex": row.vertex + 1, "nearest": tuple(v + 1 for v in row.nearest)})
        for row in rows
    ]


def _instance_files(input_path: Path) -> List[Path]:
    if input_path.is_file():
        return [input_path]
    return sorted(path for path in input_path.iterdir() if path.suffix.lower() in INSTANCE_SUFFIXES)


def _build_solver(method: str, options: SolveOptions, g: ColoredGraph) -> Tuple[str, MCSSolver, dict, dict]:
    """Resolve ``auto``, build the solver and precompute the structural parameter it relies on."""
    parameters = {"n": g.n, "m": g.m, "c": g.c}
    solver: MCSSolver

    if method == "auto":
        method = _auto_method(options, g, parameters)

    if method == "brute":
        solver = OracleSolver(limit=options.oracle_limit)
        return method, solver, {}, parameters
    if method == "vc":
        solver = VertexCoverMCSSolver(limit=options.vc_limit, threads=options.threads, progress=options.progress)
        try:
            cover = minimum_vertex_cover(g, budget=solver.limit)
        except BudgetExceededError as e:
            raise ParameterTooLargeError(str(e), {**parameters, "k": solver.limit + 1}) from e
        parameters["k"] = cover.k
        return method, solver, {"cover": cover}, parameters
    if method == "nd":
        solver = NeighborhoodMCSSolver(
            limit=options.nd_limit,
            labeling_budget=options.labeling_budget,
            failure_rate=options.failure_rate,
            seed=options.seed,
            threads=options.threads,
            progress=options.progress,
        )
        decomp = neighborhood_decomposition(g)
        parameters["r"] = decomp.r
        if decomp.r > solver.limit:
            raise ParameterTooLargeError(f"neighborhood diversity {decomp.r} exceeds the limit of {solver.limit}",
                                         parameters)
        return method, solver, {"decomp": decomp}, parameters
    raise ValueError(f"unknown method '{method}'")


def _auto_method(options: SolveOptions, g: ColoredGraph, parameters: dict) -> str:
    """brute for small n, else vc when k fits its limit, else nd when r fits its limit."""
    if g.n <= AUTO_BRUTE_MAX_N:
        return "brute"
    vc_limit = VertexCoverMCSSolver(limit=options.vc_limit).limit
    try:
        minimum_vertex_cover(g, budget=vc_limit)
        return "vc"
    except BudgetExceededError:
        parameters["k"] = vc_limit + 1
    nd_limit = NeighborhoodMCSSolver(limit=options.nd_limit).limit
    r = neighborhood_decomposition(g).r
    if r <= nd_limit:
        return "nd"
    parameters["r"] = r
    raise ParameterTooLargeError(f"no solver accepts k > {vc_limit} and r = {r} > {nd_limit}", parameters)


def _solve_report(path: Path, solution: Solution, elapsed_ms: Optional[int],
                  parameters: dict, method: str) -> SolveReport:
    return SolveReport(
        input=str(path),
        method=method,
        size=solution.size,
        vertices=[v + 1 for v in solution.vertices],
        elapsed_ms=elapsed_ms,
        explored=solution.explored,
        verified=solution.verified,
        optimal=solution.optimal,
        parameters=parameters,
    )


def process_single_file(path: Path, options: SolveOptions, emit: Emit) -> ExitCode:
    """
    Solve one instance file and emit its report:
      1) Parse and validate the instance
      2) Choose the solver and compute its parameter
      3) Solve and re-certify the solution
      4) Optionally compare against the oracle
    """
    # 1) Parse
    try:
        g = read_instance(path)
    except (InstanceError, GraphValidationError, OSError, UnicodeDecodeError) as e:
        logger.error(f"Could not read {path}: {e}")
        emit(ErrorReport(input=str(path), error=str(e)), options.pretty)
        return ExitCode.INVALID_INPUT
    logger.info(f"Loaded {path.name}: n={g.n}, m={g.m}, c={g.c}")
    dm = all_pairs_distances(g)

    # 2) Solver choice
    try:
        method, solver, hints, parameters = _build_solver(options.method, options, g)
    except ParameterTooLargeError as e:
        logger.error(f"{path.name}: {e}")
        emit(ErrorReport(input=str(path), error=str(e), parameters=e.parameters), options.pretty)
        return ExitCode.PARAMETER_TOO_LARGE

    # 3) Solve
    deadline = time.monotonic() + options.timeout_ms / 1000 if options.timeout_ms else None
    start = time.perf_counter()
    status = ExitCode.OK
    try:
        solution = solver.solve(g, dm, deadline, **hints)
    except (ParameterTooLargeError, TooLargeError) as e:
        logger.error(f"{path.name}: {e}")
        emit(ErrorReport(input=str(path), error=str(e), parameters=getattr(e, "parameters", None) or parameters),
             options.pretty)
        return ExitCode.PARAMETER_TOO_LARGE
    except NoFeasibleGuessError as e:
        logger.error(f"{path.name}: {e}")
        emit(ErrorReport(input=str(path), error=str(e), parameters=parameters), options.pretty)
        return ExitCode.VERIFICATION_FAILED
    except SolverTimeout as e:
        logger.error(f"{path.name}: {e}")
        solution = e.best or Solution(
            vertices=tuple(range(g.n)), size=g.n, method=solver.method_name, verified=True, optimal=False
        )
        status = ExitCode.TIMEOUT
    elapsed_ms = None if options.omit_timing else int((time.perf_counter() - start) * 1000)

    if not is_consistent(g, dm, solution.vertices).consistent:
        logger.error(f"{path.name}: solver returned an inconsistent subset {solution.vertices}")
        emit(ErrorReport(input=str(path), error="solution failed verification", parameters=parameters),
             options.pretty)
        return ExitCode.VERIFICATION_FAILED

    report = _solve_report(path, solution, elapsed_ms, parameters, method)

    # 4) Oracle comparison
    if options.compare_oracle and status is ExitCode.OK:
        try:
            oracle = brute_force_mcs(g, dm, limit=OracleSolver(limit=options.oracle_limit).limit)
            report.oracle_size = oracle.size
            report.oracle_match = oracle.size == solution.size
        except TooLargeError as e:
            logger.warning(f"Skipping oracle comparison for {path.name}: {e}")

    logger.info(f"Solved {path.name} with {report.method}: size {report.size}")
    emit(report, options.pretty)
    return status


def process_input_path(input_path: Path, options: SolveOptions, emit: Emit) -> ExitCode:
    """
    Solve one instance file, or every ``*.mcs`` / ``*.txt`` file of a directory in name order.
    The exit code is the largest one among the files.
    """
    if not input_path.exists():
        logger.error(f"Input path not found: {input_path}")
        emit(ErrorReport(input=str(input_path), error="input path not found"), options.pretty)
        return ExitCode.INVALID_INPUT

    status = ExitCode.OK
    files = _instance_files(input_path)
    if not files:
        logger.warning(f"No instance files found in {input_path}")
    for path in files:
        status = max(status, process_single_file(path, options, emit))

    logger.info(f"Processed {len(files)} instance file(s), worst exit code {int(status)}.")
    return ExitCode(status)


def check_subset(path: Path, subset: str, with_explanation: bool = False) -> Tuple[BaseModel, ExitCode]:
    """Certify a comma-separated list of 1-based vertex ids against an instance."""
    try:
        g = read_instance(path)
    except (InstanceError, GraphValidationError, OSError, UnicodeDecodeError) as e:
        logger.error(f"Could not read {path}: {e}")
        return ErrorReport(input=str(path), error=str(e)), ExitCode.INVALID_INPUT

    try:
        ids = [int(token) for token in subset.split(",") if token.strip()]
    except ValueError:
        logger.error(f"Subset '{subset}' is not a comma-separated list of integers")
        return ErrorReport(input=str(path), error=f"invalid subset '{subset}'"), ExitCode.INVALID_INPUT
    stray = [v for v in ids if not 1 <= v <= g.n]
    if stray:
        logger.error(f"Vertex ids {stray} outside 1..{g.n}")
        return ErrorReport(input=str(path), error=f"vertex ids {stray} outside 1..{g.n}"), ExitCode.INVALID_INPUT

    dm = all_pairs_distances(g)
    members = [v - 1 for v in ids]
    verdict = is_consistent(g, dm, members)
    report = CheckReport(
        input=str(path),
        consistent=verdict.consistent,
        witness=None if verdict.witness is None else verdict.witness + 1,
        nearest_colors=list(verdict.nearest_colors),
        explanation=_one_based(explain(g, dm, members)) if with_explanation else None,
    )
    return report, ExitCode.OK if verdict.consistent else ExitCode.INCONSISTENT


def parameter_report(path: Path) -> Tuple[BaseModel, ExitCode]:
    """Vertex cover number, neighborhood diversity and the twin-class table of an instance."""
    try:
        g = read_instance(path)
    except (InstanceError, GraphValidationError, OSError, UnicodeDecodeError) as e:
        logger.error(f"Could not read {path}: {e}")
        return ErrorReport(input=str(path), error=str(e)), ExitCode.INVALID_INPUT

    cover = minimum_vertex_cover(g)
    decomp = neighborhood_decomposition(g)
    report = ParameterReport(
        input=str(path),
        n=g.n,
        m=g.m,
        c=g.c,
        k=cover.k,
        cover=[v + 1 for v in cover.cover],
        r=decomp.r,
        types=[
            TypeSummary(
                index=t + 1,
                kind=decomp.class_kind[t],
                size=len(members),
                vertices=[v + 1 for v in members],
                colors=list(decomp.type_colors[t]),
            )
            for t, members in enumerate(decomp.types)
        ],
    )
    return report, ExitCode.OK
