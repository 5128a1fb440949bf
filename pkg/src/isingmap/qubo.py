"""QUBO assembly: placement variables, constraint penalties, cost couplers.

One binary variable per (task, unit) pair, ordered task-major with tasks
sorted by (level, id).  Linear weights carry computation cost (classical)
or gate infidelity (quantum) made strictly negative by subtracting a
constant K per variable; the per-task constant is refunded through the
recorded offset, so for any constraint-valid bitvector

    energy + offset = scaled computation + scaled communication   (classical)
    energy + offset = pref * (-ln fidelity_mapping)
                      + n_swaps * (-ln f_swap)                    (quantum)

K is chosen large enough that dropping any assignment always raises the
energy by at least the configured slack, and the pairwise penalty weight A
exceeds the sum of all non-penalty magnitudes, so every violating
bitvector sits strictly above every valid one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix

from .errors import CapacityError, ConfigError, DimensionError
from .graphs import (
    CLASSICAL,
    CONTINUITY,
    DATA,
    GATE_PAIR,
    QUANTUM,
    fmt_num,
)


@dataclass
class WeightConfig:
    """Scaling knobs for the objective terms.

    comp_scale and comm_scale weight the classical cost terms; pref weights
    the quantum mapping term against the (unscaled) movement term;
    big_offset_slack is the margin by which every linear weight stays below
    zero after the offset shift.
    """

    comp_scale: float = 1.0
    comm_scale: float = 1.0
    pref: float = 0.05
    big_offset_slack: float = 1.0

    def __post_init__(self):
        for name in ("comp_scale", "comm_scale", "pref", "big_offset_slack"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0")


class QuboProblem:
    """An assembled placement QUBO.

    linear maps variable index -> weight h; couplers maps (i, j) with
    i < j -> weight J.  var_map[i] is the (task, unit) pair behind
    variable i.  penalty is the pairwise constraint weight A; offset is
    the constant refunded when translating energies back into costs.
    """

    def __init__(self, n_vars, linear, couplers, var_map, penalty, offset,
                 meta=None):
        self.n_vars = int(n_vars)
        self.linear = dict(linear)
        self.couplers = dict(couplers)
        self.var_map = tuple(var_map)
        self.penalty = float(penalty)
        self.offset = float(offset)
        self.meta = dict(meta or {})
        if len(self.var_map) != self.n_vars:
            raise ConfigError("var_map length does not match n_vars")

    @cached_property
    def var_index(self) -> dict[tuple[int, int], int]:
        return {tu: i for i, tu in enumerate(self.var_map)}

    @cached_property
    def task_ids(self) -> tuple[int, ...]:
        seen: dict[int, None] = {}
        for t, _ in self.var_map:
            seen.setdefault(t)
        return tuple(seen)

    @cached_property
    def _upper_arrays(self):
        """(h, iu, ju, jv): dense linear weights plus sorted coupler triplets."""
        h = np.zeros(self.n_vars)
        for i, v in self.linear.items():
            h[i] = v
        if self.couplers:
            keys = sorted(self.couplers)
            iu = np.array([k[0] for k in keys], dtype=np.int32)
            ju = np.array([k[1] for k in keys], dtype=np.int32)
            jv = np.array([self.couplers[k] for k in keys])
        else:
            iu = np.zeros(0, dtype=np.int32)
            ju = np.zeros(0, dtype=np.int32)
            jv = np.zeros(0)
        return h, iu, ju, jv

    @cached_property
    def _sym_csr(self):
        """Symmetric CSR adjacency (indptr, indices, values) for the kernels.

        Both solver kernel implementations consume these exact arrays, so
        the neighbor iteration order (and with it every floating-point
        accumulation) is identical across them.
        """
        _, iu, ju, jv = self._upper_arrays
        rows = np.concatenate([iu, ju])
        cols = np.concatenate([ju, iu])
        vals = np.concatenate([jv, jv])
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        counts = np.bincount(rows, minlength=self.n_vars)
        indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int32)
        return indptr, np.ascontiguousarray(cols, dtype=np.int32), \
            np.ascontiguousarray(vals, dtype=np.float64)

    @cached_property
    def _scipy_csr(self):
        indptr, indices, values = self._sym_csr
        return csr_matrix((values, indices, indptr),
                          shape=(self.n_vars, self.n_vars))

    def __repr__(self):
        return (f"QuboProblem({self.n_vars} vars, {len(self.couplers)} "
                f"couplers, penalty={self.penalty:g})")


def energy(problem: QuboProblem, bits) -> float:
    """E(b) = sum_i h_i b_i + sum_{i<j} J_ij b_i b_j."""
    b = np.asarray(bits)
    if b.shape != (problem.n_vars,):
        raise DimensionError(
            f"expected {problem.n_vars} bits, got shape {b.shape}")
    b = b.astype(np.float64)
    h, iu, ju, jv = problem._upper_arrays
    e = float(h @ b)
    if iu.size:
        e += float(jv @ (b[iu] * b[ju]))
    return e


def _ordered_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def _build_subset(graph, arch, schedule, cfg, task_ids, edges, incoming=()):
    """Assemble a QUBO over a subset of a graph's tasks.

    edges must have both endpoints inside task_ids.  incoming is a list of
    (edge, source_unit) pairs for cut edges whose source is already placed;
    their communication cost folds into the destination's linear weights.
    """
    cfg = cfg or WeightConfig()
    if graph.flavor != arch.flavor:
        raise ConfigError(
            f"graph flavor {graph.flavor} does not match architecture "
            f"flavor {arch.flavor}")
    n_units = arch.n_units
    level_of = schedule.level_of
    task_ids = set(task_ids)
    for t in task_ids:
        if t not in level_of:
            raise ConfigError(f"task {t} is missing from the schedule")

    per_level: dict[int, list[int]] = {}
    for t in task_ids:
        per_level.setdefault(level_of[t], []).append(t)
    for lv, members in per_level.items():
        if len(members) > n_units:
            raise CapacityError(
                f"level {lv} holds {len(members)} tasks but only "
                f"{n_units} unit(s) exist")

    tasks_ordered = sorted(task_ids, key=lambda t: (level_of[t], t))
    n_tasks = len(tasks_ordered)
    n_vars = n_tasks * n_units
    quantum = graph.flavor == QUANTUM

    meta = {
        "flavor": graph.flavor,
        "comp_scale": cfg.comp_scale,
        "comm_scale": cfg.comm_scale,
        "pref": cfg.pref if quantum else None,
        "slack": cfg.big_offset_slack,
        "scale": 1.0,
        "schedule": schedule,
        "n_units": n_units,
        "f_swap": arch.f_swap if quantum else None,
        "legal_pairs": arch.legal_pairs if quantum else None,
        "gate_pairs": tuple((e.src, e.dst) for e in edges
                            if e.kind == GATE_PAIR),
    }
    if n_tasks == 0:
        return QuboProblem(0, {}, {}, (), penalty=1.0, offset=0.0, meta=meta)

    vindex = {}
    var_map = []
    for k, t in enumerate(tasks_ordered):
        for p in range(n_units):
            vindex[(t, p)] = k * n_units + p
            var_map.append((t, p))

    raw = np.zeros(n_vars)
    if quantum:
        pair_halves = set()
        for e in edges:
            if e.kind == GATE_PAIR:
                pair_halves.add(e.src)
                pair_halves.add(e.dst)
        for t in task_ids:
            partner = graph.pair_partner(t)
            if partner is not None and partner not in task_ids:
                raise ConfigError(
                    f"gate pair ({t}, {partner}) is split across the subset")
        for t in tasks_ordered:
            if t in pair_halves:
                continue  # pair fidelity lives on the gate-pair coupler
            base = vindex[(t, 0)]
            for p in range(n_units):
                raw[base + p] = cfg.pref * -math.log(arch.f1(p))
    else:
        for t in tasks_ordered:
            task = graph.task(t)
            base = vindex[(t, 0)]
            for p in range(n_units):
                raw[base + p] = cfg.comp_scale * arch.comp_cost(task, p)

    move_weight = None
    if quantum:
        needs_swap = any(e.kind == CONTINUITY for e in edges) or \
            any(e.kind == CONTINUITY for e, _ in incoming)
        if needs_swap and n_units > 1:
            if arch.f_swap is None:
                raise ConfigError(
                    "swap fidelity is undefined: set fswap or list "
                    "two-qubit edges to default it from")
            move_weight = -math.log(arch.f_swap)
        else:
            move_weight = 0.0

    # fold already-placed cut sources into the destination's linear weights
    for e, src_unit in incoming:
        if e.dst not in task_ids:
            raise ConfigError(f"cut edge {e.id} does not enter the subset")
        base = vindex[(e.dst, 0)]
        for p in range(n_units):
            if quantum:
                raw[base + p] += move_weight * arch.hop_count(src_unit, p)
            else:
                raw[base + p] += (cfg.comm_scale * e.weight
                                  * arch.hop_cost(src_unit, p))

    nonpen: dict[tuple[int, int], float] = {}
    illegal: list[tuple[int, int]] = []
    cover = 0.0
    if quantum:
        max_gate = 0.0
        for (p1, p2) in arch.legal_pairs:
            max_gate = max(max_gate, cfg.pref * -math.log(arch.f2(p1, p2)))
        for e in edges:
            if e.kind == CONTINUITY:
                cover += move_weight * arch.max_hop_count
                for p1 in range(n_units):
                    vs = vindex[(e.src, p1)]
                    for p2 in range(n_units):
                        if p1 == p2:
                            continue
                        c = move_weight * arch.hop_count(p1, p2)
                        if c != 0.0:
                            key = _ordered_key(vs, vindex[(e.dst, p2)])
                            nonpen[key] = nonpen.get(key, 0.0) + c
            elif e.kind == GATE_PAIR:
                cover += max_gate
                for p1 in range(n_units):
                    vs = vindex[(e.src, p1)]
                    for p2 in range(n_units):
                        if p1 == p2:
                            continue  # same-unit pairs hit the level penalty
                        f2 = arch.f2(p1, p2)
                        key = _ordered_key(vs, vindex[(e.dst, p2)])
                        if f2 is None:
                            illegal.append(key)
                        else:
                            c = cfg.pref * -math.log(f2)
                            if c != 0.0:
                                nonpen[key] = nonpen.get(key, 0.0) + c
    else:
        max_hop = arch.max_hop_cost
        for e in edges:
            cover += cfg.comm_scale * e.weight * max_hop
            for p1 in range(n_units):
                vs = vindex[(e.src, p1)]
                for p2 in range(n_units):
                    if p1 == p2:
                        continue  # co-located endpoints communicate for free
                    c = cfg.comm_scale * e.weight * arch.hop_cost(p1, p2)
                    if c != 0.0:
                        key = _ordered_key(vs, vindex[(e.dst, p2)])
                        nonpen[key] = nonpen.get(key, 0.0) + c

    # Offset constant: raw costs shifted below zero by at least the slack.
    # K also covers the spread between best and worst raw weights plus the
    # largest possible communication total, so leaving any task unassigned
    # always costs more than the worst complete assignment.
    max_raw = float(raw.max())
    spread = 0.0
    for k in range(n_tasks):
        block = raw[k * n_units:(k + 1) * n_units]
        spread += float(block.max() - block.min())
    k_const = cfg.big_offset_slack + max_raw + spread + cover
    h = raw - k_const
    offset = n_tasks * k_const

    penalty = 1.0 + float(np.abs(h).sum()) \
        + float(sum(abs(v) for v in nonpen.values()))
    couplers = dict(nonpen)
    for k in range(n_tasks):
        base = k * n_units
        for p1 in range(n_units):
            for p2 in range(p1 + 1, n_units):
                key = (base + p1, base + p2)
                couplers[key] = couplers.get(key, 0.0) + penalty
    level_blocks: dict[int, list[int]] = {}
    for k, t in enumerate(tasks_ordered):
        level_blocks.setdefault(level_of[t], []).append(k)
    for lv in sorted(level_blocks):
        members = level_blocks[lv]
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                for p in range(n_units):
                    key = (members[a] * n_units + p,
                           members[b] * n_units + p)
                    couplers[key] = couplers.get(key, 0.0) + penalty
    for key in illegal:
        couplers[key] = couplers.get(key, 0.0) + penalty

    linear = {i: float(h[i]) for i in range(n_vars)}
    return QuboProblem(n_vars, linear, couplers, tuple(var_map),
                       penalty=penalty, offset=float(offset), meta=meta)


def build_classical_qubo(graph, arch, schedule, cfg=None) -> QuboProblem:
    """Encode a whole classical assignment problem as a QUBO."""
    if graph.flavor != CLASSICAL:
        raise ConfigError("build_classical_qubo needs a classical graph")
    task_ids = set(graph.task_ids())
    if set(schedule.level_of) != task_ids:
        raise ConfigError("schedule does not cover exactly the graph's tasks")
    return _build_subset(graph, arch, schedule, cfg, task_ids, graph.edges)


def build_quantum_qubo(graph, arch, schedule, cfg=None) -> QuboProblem:
    """Encode a whole circuit-placement problem as a QUBO."""
    if graph.flavor != QUANTUM:
        raise ConfigError("build_quantum_qubo needs a quantum graph")
    task_ids = set(graph.task_ids())
    if set(schedule.level_of) != task_ids:
        raise ConfigError("schedule does not cover exactly the graph's tasks")
    return _build_subset(graph, arch, schedule, cfg, task_ids, graph.edges)


def normalize_for_hardware(problem: QuboProblem) -> QuboProblem:
    """Uniformly scale weights into the common annealer ranges.

    Linear weights end up within [-2, 2] and couplers within [-1, 1] via a
    single positive factor s = min(2/max|h|, 1/max|J|, 1), which preserves
    the energy ordering.  The applied factor accumulates in meta["scale"];
    the offset and penalty scale along with the weights.
    """
    if problem.n_vars == 0:
        return problem
    max_h = max((abs(v) for v in problem.linear.values()), default=0.0)
    max_j = max((abs(v) for v in problem.couplers.values()), default=0.0)
    s = 1.0
    if max_h > 0:
        s = min(s, 2.0 / max_h)
    if max_j > 0:
        s = min(s, 1.0 / max_j)
    if s == 1.0:
        return problem
    meta = dict(problem.meta)
    meta["scale"] = meta.get("scale", 1.0) * s
    return QuboProblem(
        problem.n_vars,
        {i: v * s for i, v in problem.linear.items()},
        {k: v * s for k, v in problem.couplers.items()},
        problem.var_map,
        penalty=problem.penalty * s,
        offset=problem.offset * s,
        meta=meta,
    )


def export_qubo(problem: QuboProblem) -> str:
    """Text form consumed by qbsolv-style tabu solvers.

    Comment lines carry the variable map, then one
    ``p qubo 0 <maxVars> <nLinear> <nCouplers>`` header, the diagonal
    entries as ``<i> <i> <h>``, and the couplers as ``<i> <j> <J>`` with
    i < j.  Ordering is deterministic.
    """
    lines = []
    for i, (t, u) in enumerate(problem.var_map):
        lines.append(f"c var {i} task {t} unit {u}")
    lines.append(f"p qubo 0 {problem.n_vars} {len(problem.linear)} "
                 f"{len(problem.couplers)}")
    for i in sorted(problem.linear):
        lines.append(f"{i} {i} {fmt_num(problem.linear[i])}")
    for i, j in sorted(problem.couplers):
        lines.append(f"{i} {j} {fmt_num(problem.couplers[(i, j)])}")
    return "\n".join(lines) + "\n"


def export_qmasm(problem: QuboProblem) -> str:
    """Text form for qmasm-style tools: named weights and couplings."""
    lines = []
    for i, (t, u) in enumerate(problem.var_map):
        if i in problem.linear:
            lines.append(f"x_{t}_{u} {fmt_num(problem.linear[i])}")
    for i, j in sorted(problem.couplers):
        t1, u1 = problem.var_map[i]
        t2, u2 = problem.var_map[j]
        lines.append(f"x_{t1}_{u1} x_{t2}_{u2} "
                     f"{fmt_num(problem.couplers[(i, j)])}")
    return "\n".join(lines) + "\n"
