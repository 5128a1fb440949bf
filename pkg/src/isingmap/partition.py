"""Level-windowed decomposition and the end-to-end solve pipeline.

Large instances are cut into windows of consecutive schedule levels.
Windows solve in level order; edges whose source lies in an earlier
window fold into the destination window's linear weights using the
already-fixed source unit, so each window sees the true marginal cost of
its choices.  Summing (energy + offset) over the windows reproduces the
whole-problem objective.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError, PipelineOrderError, SolveQualityError
from .graphs import CLASSICAL, compute_levels
from .interpret import (
    Assignment,
    _check_placement,
    decode,
    mtom_classical,
    mtom_quantum,
)
from .qubo import WeightConfig, _build_subset
from .solvers import SolverParams, solve


@dataclass(frozen=True)
class SubProblem:
    """One window of consecutive levels plus its edge classification."""

    index: int
    level_range: tuple[int, int]
    tasks: frozenset[int]
    internal_edges: tuple
    incoming_cut_edges: tuple
    outgoing_cut_edges: tuple

    @property
    def n_levels(self) -> int:
        return self.level_range[1] - self.level_range[0]


def partition_levels(graph, schedule, granularity=0):
    """Cut a schedule into windows of `granularity` consecutive levels.

    granularity 0 (or anything >= the level count) keeps everything in a
    single window.  Gate pairs share a level, so they never split.
    """
    if granularity < 0:
        raise ConfigError("granularity must be >= 0")
    n_levels = schedule.n_levels
    if n_levels == 0:
        return ()
    if granularity == 0 or granularity > n_levels:
        granularity = n_levels
    bounds = [(s, min(s + granularity, n_levels))
              for s in range(0, n_levels, granularity)]
    window_of = {}
    for w, (s, e) in enumerate(bounds):
        for lv in range(s, e):
            for t in schedule.levels[lv]:
                window_of[t] = w
    internal = [[] for _ in bounds]
    incoming = [[] for _ in bounds]
    outgoing = [[] for _ in bounds]
    for edge in graph.edges:
        ws, wd = window_of[edge.src], window_of[edge.dst]
        if ws == wd:
            internal[ws].append(edge)
        else:
            if ws > wd:
                raise ConfigError(
                    f"edge {edge.id} runs against the level order; the "
                    f"schedule does not match this graph")
            outgoing[ws].append(edge)
            incoming[wd].append(edge)
    subs = []
    for w, (s, e) in enumerate(bounds):
        tasks = frozenset(t for lv in range(s, e)
                          for t in schedule.levels[lv])
        subs.append(SubProblem(
            index=w, level_range=(s, e), tasks=tasks,
            internal_edges=tuple(internal[w]),
            incoming_cut_edges=tuple(incoming[w]),
            outgoing_cut_edges=tuple(outgoing[w])))
    return tuple(subs)


def build_subqubo(sub: SubProblem, placements, graph, arch, schedule,
                  cfg=None):
    """Assemble one window's QUBO given the placements fixed so far."""
    folds = []
    for e in sub.incoming_cut_edges:
        if e.src not in placements:
            raise PipelineOrderError(
                f"window {sub.index} needs task {e.src} placed first "
                f"(edge {e.id}); solve earlier windows before this one")
        folds.append((e, placements[e.src]))
    return _build_subset(graph, arch, schedule, cfg, sub.tasks,
                         sub.internal_edges, incoming=folds)


@dataclass
class PipelineResult:
    """Everything the pipeline produced, window by window."""

    assignment: Assignment
    report: object
    schedule: object
    subs: tuple
    problems: tuple
    solutions: tuple
    engine: str

    @property
    def objective_value(self) -> float:
        """Sum of per-window (energy + offset): the scaled total objective."""
        return sum(s.energy + p.offset
                   for s, p in zip(self.solutions, self.problems))

    def to_json(self):
        return {
            "engine": self.engine,
            "n_windows": len(self.subs),
            "objective_value": self.objective_value,
            "assignment": self.assignment.to_json(),
            "report": self.report.to_json(),
            "windows": [
                {
                    "index": sub.index,
                    "levels": list(range(*sub.level_range)),
                    "n_tasks": len(sub.tasks),
                    "n_vars": prob.n_vars,
                    "solution": sol.to_json(),
                }
                for sub, prob, sol in zip(self.subs, self.problems,
                                          self.solutions)
            ],
        }


def run_pipeline(graph, arch, cfg=None, engine="tabu", granularity=0,
                 params=None, schedule=None) -> PipelineResult:
    """Level, window, solve, fold forward; then score the full placement.

    Raises SolveQualityError naming the window when a solver result
    violates a constraint (possible for the heuristic engines on hard
    instances; rerun with more restarts or the exact engine).
    """
    cfg = cfg or WeightConfig()
    params = params or SolverParams()
    if schedule is None:
        schedule = compute_levels(graph, arch)
    subs = partition_levels(graph, schedule, granularity)
    placements: dict[int, int] = {}
    problems = []
    solutions = []
    for sub in subs:
        problem = build_subqubo(sub, placements, graph, arch, schedule, cfg)
        solution = solve(problem, engine, params)
        assignment = decode(problem, solution.bits)
        if not assignment.valid:
            raise SolveQualityError(
                f"window {sub.index} produced an invalid placement with "
                f"{len(assignment.violations)} violation(s); raise "
                f"restarts/iterations or switch engines",
                sub_index=sub.index, violations=assignment.violations)
        placements.update(assignment.placement)
        problems.append(problem)
        solutions.append(solution)
    violations = _check_placement(graph, arch, schedule, placements)
    final = Assignment(placement=placements, schedule=schedule,
                       violations=violations)
    if violations:
        raise SolveQualityError(
            "stitched placement violates a constraint; this indicates "
            "inconsistent windows", violations=violations)
    if graph.flavor == CLASSICAL:
        report = mtom_classical(graph, arch, final)
    else:
        report = mtom_quantum(graph, arch, final)
    return PipelineResult(assignment=final, report=report,
                          schedule=schedule, subs=subs,
                          problems=tuple(problems),
                          solutions=tuple(solutions), engine=engine)
