"""Command-line front end.

Subcommands: map (emit a QUBO), run (solve end to end), woa (tune the
mapping weight), eval (score an existing solution file).  Exit codes:
0 success, 2 usage, 3 unreadable or inconsistent input, 4 solver
failure, 5 valid input whose solution violates a constraint.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import (
    CapacityError,
    ConfigError,
    ConnectivityError,
    CycleError,
    DimensionError,
    InvalidAssignmentError,
    ParseError,
    PipelineOrderError,
    ProblemTooLargeError,
    RangeError,
    SolveQualityError,
    UnknownReferenceError,
)
from .graphs import (
    CLASSICAL,
    QUANTUM,
    compute_levels,
    fmt_num,
    parse_arch,
    parse_circuit,
    parse_tcg,
)
from .interpret import decode, mtom_classical, mtom_quantum
from .partition import run_pipeline
from .qubo import (
    WeightConfig,
    build_classical_qubo,
    build_quantum_qubo,
    energy,
    export_qmasm,
    export_qubo,
)
from .solvers import SolverParams, import_solution, kernel_backend
from .woa import METRICS, WoaConfig, optimize_pref

SEED_ENV = "TIGER_SEED"

_INPUT_ERRORS = (ParseError, UnknownReferenceError, CycleError,
                 ConnectivityError, RangeError, CapacityError, ConfigError,
                 DimensionError, OSError)
_SOLVER_ERRORS = (ProblemTooLargeError, SolveQualityError,
                  PipelineOrderError)


def _add_common(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--tcg", metavar="FILE",
                     help="classical task graph input")
    src.add_argument("--circuit", metavar="FILE",
                     help="quantum circuit input")
    p.add_argument("--arc", metavar="FILE", required=True,
                   help="architecture description (.arc or .arcq)")
    p.add_argument("--mode", choices=[CLASSICAL, QUANTUM],
                   help="cross-check: expected problem kind")
    p.add_argument("--granularity", type=int, default=0,
                   help="schedule levels per solve window (0 = all at once)")
    p.add_argument("--pref", type=float, default=0.05,
                   help="mapping-vs-movement weight (quantum objective)")
    p.add_argument("--comp-scale", type=float, default=1.0,
                   help="computation cost weight (classical objective)")
    p.add_argument("--comm-scale", type=float, default=1.0,
                   help="communication cost weight (classical objective)")
    p.add_argument("--solver", choices=["exact", "tabu", "anneal"],
                   default="tabu", help="engine for run/woa")
    p.add_argument("--seed", type=int, default=None,
                   help=f"RNG seed (default: ${SEED_ENV} or 0)")
    p.add_argument("--time-budget-ms", type=float, default=None,
                   help="soft solver time budget per window")
    p.add_argument("--out", metavar="FILE", help="write here, not stdout")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--deterministic", action="store_true",
                   help="omit timing fields from JSON output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isingmap",
        description="Topology-aware task and gate placement via QUBO "
                    "annealing")
    sub = parser.add_subparsers(dest="command", required=True)

    p_map = sub.add_parser("map", help="assemble and emit the QUBO")
    _add_common(p_map)
    p_map.add_argument("--emit", choices=["qubo", "qmasm", "both"],
                       default="qubo")

    p_run = sub.add_parser("run", help="solve and report the placement")
    _add_common(p_run)

    p_woa = sub.add_parser("woa", help="search the mapping weight")
    _add_common(p_woa)
    p_woa.add_argument("--metric", choices=sorted(METRICS),
                       default="fidelity_total")
    p_woa.add_argument("--refine", action="store_true",
                       help="extra fine-bracket pass around the winner")

    p_eval = sub.add_parser("eval", help="score an existing solution file")
    _add_common(p_eval)
    p_eval.add_argument("--solution", metavar="FILE", required=True)
    return parser


def _resolve_seed(args, parser):
    if args.seed is not None:
        return args.seed
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        parser.error(f"{SEED_ENV} must be an integer, got {raw!r}")


def _load_inputs(args, parser):
    if args.tcg is not None:
        if args.mode == QUANTUM:
            parser.error("--mode quantum conflicts with --tcg input")
        graph = parse_tcg(Path(args.tcg).read_text())
    else:
        if args.mode == CLASSICAL:
            parser.error("--mode classical conflicts with --circuit input")
        graph = parse_circuit(Path(args.circuit).read_text())
    arch = parse_arch(Path(args.arc).read_text())
    if graph.flavor != arch.flavor:
        raise ConfigError(
            f"{graph.flavor} problem given a {arch.flavor} architecture")
    return graph, arch


def _weights(args) -> WeightConfig:
    return WeightConfig(comp_scale=args.comp_scale,
                        comm_scale=args.comm_scale, pref=args.pref)


def _params(args, seed) -> SolverParams:
    budget = None
    if args.time_budget_ms is not None:
        budget = args.time_budget_ms / 1000.0
    return SolverParams(time_budget=budget, seed=seed)


def _scrub_timing(obj):
    if isinstance(obj, dict):
        return {k: _scrub_timing(v) for k, v in obj.items()
                if k not in ("elapsed_s", "elapsed_ms")}
    if isinstance(obj, list):
        return [_scrub_timing(v) for v in obj]
    return obj


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, obj):
    if args.deterministic:
        obj = _scrub_timing(obj)
    _emit(args, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _cmd_map(args, parser) -> int:
    graph, arch = _load_inputs(args, parser)
    schedule = compute_levels(graph, arch)
    cfg = _weights(args)
    if graph.flavor == CLASSICAL:
        problem = build_classical_qubo(graph, arch, schedule, cfg)
    else:
        problem = build_quantum_qubo(graph, arch, schedule, cfg)
    if args.format == "json":
        out = {
            "n_vars": problem.n_vars,
            "n_couplers": len(problem.couplers),
            "penalty": problem.penalty,
            "offset": problem.offset,
            "var_map": [[t, u] for t, u in problem.var_map],
        }
        if args.emit in ("qubo", "both"):
            out["qubo"] = export_qubo(problem)
        if args.emit in ("qmasm", "both"):
            out["qmasm"] = export_qmasm(problem)
        _emit_json(args, out)
    else:
        parts = []
        if args.emit in ("qubo", "both"):
            parts.append(export_qubo(problem))
        if args.emit in ("qmasm", "both"):
            parts.append(export_qmasm(problem))
        _emit(args, "".join(parts))
    return 0


def _placement_lines(assignment):
    return [f"task {t} unit {u}"
            for t, u in sorted(assignment.placement.items())]


def _report_lines(report):
    return [f"{key} {fmt_num(value)}"
            for key, value in report.to_json().items()
            if not isinstance(value, dict)]


def _cmd_run(args, parser, seed) -> int:
    graph, arch = _load_inputs(args, parser)
    result = run_pipeline(graph, arch, _weights(args), args.solver,
                          args.granularity, _params(args, seed))
    if args.format == "json":
        out = result.to_json()
        out["backend"] = kernel_backend()
        out["seed"] = seed
        _emit_json(args, out)
    else:
        lines = [f"engine {result.engine}",
                 f"windows {len(result.subs)}",
                 f"objective {fmt_num(result.objective_value)}"]
        lines += _placement_lines(result.assignment)
        lines += _report_lines(result.report)
        _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_woa(args, parser, seed) -> int:
    graph, arch = _load_inputs(args, parser)
    config = WoaConfig(pref_initial=args.pref, metric=args.metric,
                       refine_pass=args.refine, engine=args.solver,
                       granularity=args.granularity,
                       params=_params(args, seed), weights=_weights(args))
    result = optimize_pref(graph, arch, config)
    if args.format == "json":
        _emit_json(args, result.to_json())
    else:
        lines = [f"metric {args.metric}",
                 f"pref_best {fmt_num(result.pref_best)}",
                 f"metric_best {fmt_num(result.metric_best)}",
                 f"evaluations {result.evaluations}"]
        for row in result.trace:
            lines.append(
                f"iter {row['iteration']} stage {row['stage']} "
                f"scale {fmt_num(row['scale'])} "
                f"left {fmt_num(row['pref_left'])} "
                f"m {fmt_num(row['metric_left'])} "
                f"right {fmt_num(row['pref_right'])} "
                f"m {fmt_num(row['metric_right'])} "
                f"best {fmt_num(row['pref_best'])} "
                f"m {fmt_num(row['metric_best'])}")
        if result.best_report is not None:
            lines += _report_lines(result.best_report)
        _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_eval(args, parser) -> int:
    graph, arch = _load_inputs(args, parser)
    schedule = compute_levels(graph, arch)
    cfg = _weights(args)
    if graph.flavor == CLASSICAL:
        problem = build_classical_qubo(graph, arch, schedule, cfg)
    else:
        problem = build_quantum_qubo(graph, arch, schedule, cfg)
    solution = import_solution(problem, Path(args.solution).read_text())
    assignment = decode(problem, solution.bits)
    if not assignment.valid:
        for v in assignment.violations:
            print(f"violation {v.kind}: tasks "
                  + " ".join(str(t) for t in v.tasks), file=sys.stderr)
        raise InvalidAssignmentError(
            f"solution violates {len(assignment.violations)} constraint(s)",
            violations=assignment.violations)
    if graph.flavor == CLASSICAL:
        report = mtom_classical(graph, arch, assignment)
    else:
        report = mtom_quantum(graph, arch, assignment)
    e = energy(problem, solution.bits)
    if args.format == "json":
        out = {
            "valid": True,
            "energy": e,
            "objective": e + problem.offset,
            "assignment": assignment.to_json(),
            "report": report.to_json(),
        }
        _emit_json(args, out)
    else:
        lines = ["valid true",
                 f"energy {fmt_num(e)}",
                 f"objective {fmt_num(e + problem.offset)}"]
        lines += _placement_lines(assignment)
        lines += _report_lines(report)
        _emit(args, "\n".join(lines) + "\n")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        seed = _resolve_seed(args, parser)
        if args.command == "map":
            return _cmd_map(args, parser)
        if args.command == "run":
            return _cmd_run(args, parser, seed)
        if args.command == "woa":
            return _cmd_woa(args, parser, seed)
        return _cmd_eval(args, parser)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    except InvalidAssignmentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except _SOLVER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


def console_main():
    raise SystemExit(main())
