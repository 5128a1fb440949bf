"""Turning solver bitvectors back into placements and scoring them.

decode() needs only the problem (the meta dict carries the schedule and
legality data), so solutions can be interpreted without re-parsing the
inputs.  The scoring functions recheck constraint validity themselves and
refuse invalid placements rather than reporting misleading numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InvalidAssignmentError, RangeError
from .graphs import CLASSICAL, QUANTUM
from .qubo import QuboProblem

MULTI_UNIT = "multi-unit"
UNASSIGNED = "unassigned"
LEVEL_COLLISION = "level-collision"
ILLEGAL_GATE_PAIR = "illegal-gate-pair"


@dataclass(frozen=True)
class Violation:
    kind: str
    tasks: tuple[int, ...]

    def to_json(self):
        return {"kind": self.kind, "tasks": list(self.tasks)}


@dataclass
class Assignment:
    """A (possibly partial) task-to-unit placement plus its defects."""

    placement: dict[int, int]
    schedule: object
    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_json(self):
        return {
            "placement": {str(t): u for t, u in
                          sorted(self.placement.items())},
            "valid": self.valid,
            "violations": [v.to_json() for v in self.violations],
        }


def _collision_violations(placement, level_of):
    seen: dict[tuple[int, int], list[int]] = {}
    for t, u in placement.items():
        seen.setdefault((level_of[t], u), []).append(t)
    out = []
    for group in seen.values():
        if len(group) > 1:
            out.append(Violation(LEVEL_COLLISION, tuple(sorted(group))))
    return out


def _illegal_pair_violations(placement, gate_pairs, legal_pairs):
    out = []
    for ctl, tgt in gate_pairs:
        if ctl not in placement or tgt not in placement:
            continue
        p1, p2 = placement[ctl], placement[tgt]
        if p1 == p2:
            continue  # same unit is already a level collision
        if (p1, p2) not in legal_pairs:
            out.append(Violation(ILLEGAL_GATE_PAIR, (ctl, tgt)))
    return out


def decode(problem: QuboProblem, bits) -> Assignment:
    """Read a bitvector as a placement, recording every defect found."""
    b = np.asarray(bits)
    if b.shape != (problem.n_vars,):
        raise ConfigError(
            f"expected {problem.n_vars} bits, got shape {b.shape}")
    chosen: dict[int, list[int]] = {t: [] for t in problem.task_ids}
    for i, (t, u) in enumerate(problem.var_map):
        if b[i]:
            chosen[t].append(u)
    placement = {}
    violations = []
    for t in problem.task_ids:
        units = chosen[t]
        if not units:
            violations.append(Violation(UNASSIGNED, (t,)))
        elif len(units) > 1:
            violations.append(Violation(MULTI_UNIT, (t,)))
        else:
            placement[t] = units[0]
    level_of = problem.meta["schedule"].level_of
    violations.extend(_collision_violations(placement, level_of))
    if problem.meta["flavor"] == QUANTUM:
        violations.extend(_illegal_pair_violations(
            placement, problem.meta["gate_pairs"],
            problem.meta["legal_pairs"]))
    violations.sort(key=lambda v: (v.kind, v.tasks))
    return Assignment(placement=placement,
                      schedule=problem.meta["schedule"],
                      violations=tuple(violations))


def validate(problem: QuboProblem, bits) -> tuple[Violation, ...]:
    return decode(problem, bits).violations


def encode(problem: QuboProblem, placement: dict[int, int]) -> np.ndarray:
    """Invert decode(): a complete placement back to its bitvector."""
    n_units = problem.meta["n_units"]
    extra = set(placement) - set(problem.task_ids)
    if extra:
        raise ConfigError(
            f"placement names unknown task(s) {sorted(extra)}")
    bits = np.zeros(problem.n_vars, dtype=np.uint8)
    index = problem.var_index
    for t in problem.task_ids:
        if t not in placement:
            raise ConfigError(f"task {t} is missing from the placement")
        u = placement[t]
        if not 0 <= u < n_units:
            raise RangeError(f"unit {u} out of range for task {t}")
        bits[index[(t, u)]] = 1
    return bits


def _check_placement(graph, arch, schedule, placement):
    violations = []
    for t in graph.task_ids():
        if t not in placement:
            violations.append(Violation(UNASSIGNED, (t,)))
        elif not 0 <= placement[t] < arch.n_units:
            raise RangeError(
                f"task {t} placed on unit {placement[t]}, but the "
                f"architecture has units 0..{arch.n_units - 1}")
    violations.extend(_collision_violations(
        {t: u for t, u in placement.items() if t in schedule.level_of},
        schedule.level_of))
    if graph.flavor == QUANTUM:
        violations.extend(_illegal_pair_violations(
            placement,
            tuple((e.src, e.dst) for e in graph.gate_pair_edges()),
            arch.legal_pairs))
    violations.sort(key=lambda v: (v.kind, v.tasks))
    return tuple(violations)


@dataclass
class CostReport:
    """Classical makespan-free cost split: computation plus communication.

    Values are in raw cost units (no objective scaling applied).
    Communication for an edge is its weight times the hop cost between the
    endpoint units, attributed to the consumer's level.
    """

    computation: float
    communication: float
    total: float
    per_level: dict[int, dict[str, float]] = field(default_factory=dict)
    local_edges: int = 0

    def to_json(self):
        return {
            "computation": self.computation,
            "communication": self.communication,
            "total": self.total,
            "per_level": {str(k): v for k, v in
                          sorted(self.per_level.items())},
            "local_edges": self.local_edges,
        }


@dataclass
class FidelityReport:
    """Quantum placement quality: gate fidelity times movement fidelity."""

    fidelity_mapping: float
    n_swaps: int
    fidelity_movement: float
    fidelity_total: float

    @classmethod
    def build(cls, mapping: float, n_swaps: int,
              f_swap: float | None) -> "FidelityReport":
        if n_swaps == 0:
            movement = 1.0
        else:
            if f_swap is None:
                raise ConfigError(
                    "swap fidelity is undefined but the placement "
                    "requires qubit movement")
            movement = f_swap ** n_swaps
        return cls(fidelity_mapping=mapping, n_swaps=n_swaps,
                   fidelity_movement=movement,
                   fidelity_total=mapping * movement)

    def to_json(self):
        return {
            "fidelity_mapping": self.fidelity_mapping,
            "n_swaps": self.n_swaps,
            "fidelity_movement": self.fidelity_movement,
            "fidelity_total": self.fidelity_total,
        }


def mtom_classical(graph, arch, assignment: Assignment) -> CostReport:
    """Score a complete classical placement.

    Raises InvalidAssignmentError when the placement breaks a constraint,
    so a report always describes a realizable assignment.
    """
    if graph.flavor != CLASSICAL:
        raise ConfigError("mtom_classical needs a classical graph")
    schedule = assignment.schedule
    placement = assignment.placement
    violations = _check_placement(graph, arch, schedule, placement)
    if violations:
        raise InvalidAssignmentError(
            f"placement has {len(violations)} constraint violation(s)",
            violations=violations)
    level_of = schedule.level_of
    per_level: dict[int, dict[str, float]] = {
        lv: {"computation": 0.0, "communication": 0.0}
        for lv in range(schedule.n_levels)}
    comp = 0.0
    for t in graph.task_ids():
        c = arch.comp_cost(graph.task(t), placement[t])
        comp += c
        per_level[level_of[t]]["computation"] += c
    comm = 0.0
    local = 0
    for e in graph.edges:
        hops = arch.hop_count(placement[e.src], placement[e.dst])
        if hops == 0:
            local += 1
        c = e.weight * arch.hop_cost(placement[e.src], placement[e.dst])
        comm += c
        per_level[level_of[e.dst]]["communication"] += c
    return CostReport(computation=comp, communication=comm,
                      total=comp + comm, per_level=per_level,
                      local_edges=local)


def mtom_quantum(graph, arch, assignment: Assignment) -> FidelityReport:
    """Score a complete circuit placement.

    Mapping fidelity multiplies the one-qubit gate fidelities and the
    fidelities of the links each two-qubit gate runs over; movement
    fidelity decays by one swap fidelity factor per hop a logical qubit
    travels between consecutive gates.
    """
    if graph.flavor != QUANTUM:
        raise ConfigError("mtom_quantum needs a quantum graph")
    schedule = assignment.schedule
    placement = assignment.placement
    violations = _check_placement(graph, arch, schedule, placement)
    if violations:
        raise InvalidAssignmentError(
            f"placement has {len(violations)} constraint violation(s)",
            violations=violations)
    mapping = 1.0
    for t in graph.one_qubit_task_ids():
        mapping *= arch.f1(placement[t])
    for e in graph.gate_pair_edges():
        f2 = arch.f2(placement[e.src], placement[e.dst])
        mapping *= f2
    n_swaps = 0
    for e in graph.continuity_edges():
        n_swaps += arch.hop_count(placement[e.src], placement[e.dst])
    return FidelityReport.build(mapping, int(n_swaps), arch.f_swap)
