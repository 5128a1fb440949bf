"""Derivative-free search over the mapping-vs-movement weight.

The quantum objective balances gate quality against swap count through a
single positive weight.  This module tunes that weight by evaluating the
full pipeline at a shrinking geometric bracket around the current best:
each iteration tries best/s then best*s, adopts strict improvements, and
multiplies s by a reduction factor until the bracket collapses (s <= 1).
A weight whose pipeline yields an invalid placement scores -inf and the
search simply moves on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError, InvalidAssignmentError, SolveQualityError
from .graphs import QUANTUM
from .partition import run_pipeline
from .qubo import WeightConfig
from .solvers import SolverParams

METRICS = {
    "fidelity_total": lambda rep: rep.fidelity_total,
    "fidelity_mapping": lambda rep: rep.fidelity_mapping,
    "neg_n_swaps": lambda rep: -float(rep.n_swaps),
}


@dataclass
class WoaConfig:
    """Search controls.

    s_spread is the initial bracket ratio, s_reduction the per-iteration
    shrink factor; refine_pass reruns the loop once more from a sqrt(2)
    bracket around the coarse winner.
    """

    s_spread: float = 2.0
    s_reduction: float = 0.9
    pref_initial: float = 0.05
    metric: str = "fidelity_total"
    refine_pass: bool = False
    engine: str = "exact"
    granularity: int = 0
    params: SolverParams = field(default_factory=SolverParams)
    weights: WeightConfig = field(default_factory=WeightConfig)

    def __post_init__(self):
        if self.s_spread <= 1:
            raise ConfigError("s_spread must be > 1")
        if not 0 < self.s_reduction < 1:
            raise ConfigError("s_reduction must be in (0, 1)")
        if self.pref_initial <= 0:
            raise ConfigError("pref_initial must be > 0")
        if self.metric not in METRICS:
            raise ConfigError(
                f"unknown metric {self.metric!r}; pick one of "
                f"{sorted(METRICS)}")


@dataclass
class WoaResult:
    pref_best: float
    metric_best: float
    best_report: object
    trace: tuple
    evaluations: int

    def to_json(self):
        return {
            "pref_best": self.pref_best,
            "metric_best": self.metric_best,
            "evaluations": self.evaluations,
            "report": self.best_report.to_json() if self.best_report
            else None,
            "trace": [dict(row) for row in self.trace],
        }


def optimize_pref(graph, arch, config: WoaConfig | None = None) -> WoaResult:
    """Run the bracket search and return the best weight found."""
    config = config or WoaConfig()
    if graph.flavor != QUANTUM:
        raise ConfigError("the weight search applies to circuit graphs")
    metric_fn = METRICS[config.metric]
    evals = 0

    def evaluate(pref):
        nonlocal evals
        evals += 1
        cfg = WeightConfig(
            comp_scale=config.weights.comp_scale,
            comm_scale=config.weights.comm_scale,
            pref=pref,
            big_offset_slack=config.weights.big_offset_slack)
        try:
            result = run_pipeline(graph, arch, cfg, config.engine,
                                  config.granularity, config.params)
        except (SolveQualityError, InvalidAssignmentError):
            return float("-inf"), None
        return metric_fn(result.report), result.report

    trace = []
    pref = config.pref_initial
    best_metric, best_report = evaluate(pref)
    trace.append({
        "iteration": 0, "stage": "initial", "scale": 1.0,
        "pref_left": pref, "metric_left": best_metric,
        "pref_right": pref, "metric_right": best_metric,
        "pref_best": pref, "metric_best": best_metric,
    })
    iteration = 0

    def sweep(stage, s):
        nonlocal pref, best_metric, best_report, iteration
        while s > 1.0:
            iteration += 1
            p0 = pref
            p_left, p_right = p0 / s, p0 * s
            m_left, rep_left = evaluate(p_left)
            if m_left > best_metric:
                best_metric, best_report, pref = m_left, rep_left, p_left
            m_right, rep_right = evaluate(p_right)
            if m_right > best_metric:
                best_metric, best_report, pref = m_right, rep_right, p_right
            trace.append({
                "iteration": iteration, "stage": stage, "scale": s,
                "pref_left": p_left, "metric_left": m_left,
                "pref_right": p_right, "metric_right": m_right,
                "pref_best": pref, "metric_best": best_metric,
            })
            s *= config.s_reduction

    sweep("search", config.s_spread)
    if config.refine_pass:
        sweep("refine", math.sqrt(2.0))
    return WoaResult(pref_best=pref, metric_best=best_metric,
                     best_report=best_report, trace=tuple(trace),
                     evaluations=evals)
