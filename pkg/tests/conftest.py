"""Shared fixtures: file loading, random instance generators, oracles.

The brute-force helpers here enumerate raw placements directly from the
graph and architecture; they deliberately share no code with the QUBO
assembly so the two sides can disagree when one is wrong.
"""

from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np
import pytest

from isingmap import (
    CLASSICAL,
    QUANTUM,
    TaskGraph,
    compute_levels,
    mesh_architecture,
    parse_arch,
    parse_circuit,
    parse_tcg,
)
from isingmap.graphs import Edge, Task

DATA = Path(__file__).parent / "data"
GOLDEN = DATA / "golden"

_MESH_SHAPES = [(1, 2), (1, 3), (2, 2), (1, 4)]


def load_text(name: str) -> str:
    return (DATA / name).read_text()


@pytest.fixture(scope="session")
def demo_graph():
    return parse_tcg(load_text("demo.tcg"))


@pytest.fixture(scope="session")
def demo_arch():
    return parse_arch(load_text("demo.arc"))


def random_classical_instance(rng):
    """A layered DAG on a small mesh: <=3 levels, <=4 tasks per level,
    <=4 units, n_vars <= 16.  All costs are integers so float sums are
    exact regardless of accumulation order."""
    while True:
        rows, cols = _MESH_SHAPES[rng.integers(len(_MESH_SHAPES))]
        n_units = rows * cols
        cap = min(4, n_units)
        n_levels = int(1 + rng.integers(3))
        sizes = [int(1 + rng.integers(cap)) for _ in range(n_levels)]
        if sum(sizes) * n_units > 16:
            continue
        levels = []
        tid = 0
        tasks = []
        for sz in sizes:
            members = list(range(tid, tid + sz))
            levels.append(members)
            for t in members:
                tasks.append(Task(t, (int(rng.integers(1, 9)),)))
            tid += sz
        edges = []
        used = set()
        for li in range(1, n_levels):
            for t in levels[li]:
                src = int(rng.choice(levels[li - 1]))
                used.add((src, t))
                edges.append((src, t))
        for li in range(1, n_levels):
            for t in levels[li]:
                for lj in range(li):
                    for s in levels[lj]:
                        if (s, t) not in used and rng.random() < 0.25:
                            used.add((s, t))
                            edges.append((s, t))
        graph = TaskGraph(
            tasks,
            [Edge(i, s, d, float(rng.integers(1, 6)))
             for i, (s, d) in enumerate(edges)],
            CLASSICAL)
        unit_costs = [(float(rng.integers(1, 4)),) for _ in range(n_units)]
        arch = mesh_architecture(rows, cols,
                                 link_cost=float(rng.integers(1, 4)),
                                 unit_costs=unit_costs)
        return graph, arch


def iter_level_placements(schedule, n_units):
    """Every placement giving each level's tasks distinct units."""
    per_level = [
        list(itertools.permutations(range(n_units), len(members)))
        for members in schedule.levels
    ]
    for combo in itertools.product(*per_level):
        placement = {}
        for members, units in zip(schedule.levels, combo):
            for t, u in zip(members, units):
                placement[t] = u
        yield placement


def raw_cost_total(graph, arch, placement, comp_scale=1.0, comm_scale=1.0):
    comp = sum(arch.comp_cost(graph.task(t), placement[t])
               for t in graph.task_ids())
    comm = sum(e.weight * arch.hop_cost(placement[e.src], placement[e.dst])
               for e in graph.edges)
    return comp_scale * comp + comm_scale * comm


def oracle_min_total(graph, arch, schedule):
    return min(raw_cost_total(graph, arch, p)
               for p in iter_level_placements(schedule, arch.n_units))


def quantum_placement_legal(graph, arch, placement):
    for e in graph.gate_pair_edges():
        p1, p2 = placement[e.src], placement[e.dst]
        if p1 == p2 or (p1, p2) not in arch.legal_pairs:
            return False
    return True


def raw_quantum_objective(graph, arch, placement, pref):
    """pref * (-log mapping fidelity) + swaps * (-log swap fidelity)."""
    import math
    obj = 0.0
    for t in graph.one_qubit_task_ids():
        obj += pref * -math.log(arch.f1(placement[t]))
    for e in graph.gate_pair_edges():
        obj += pref * -math.log(arch.f2(placement[e.src], placement[e.dst]))
    swaps = sum(arch.hop_count(placement[e.src], placement[e.dst])
                for e in graph.continuity_edges())
    if swaps:
        obj += swaps * -math.log(arch.f_swap)
    return obj


_GATE_POOL_1Q = ["h", "x", "t", "s", "z"]


def random_quantum_instance(rng):
    """A short random circuit on a small line-shaped device, sized so
    n_vars <= 16 and at least one legal complete placement exists."""
    while True:
        n_units = int(3 + rng.integers(2))  # 3 or 4, line topology
        n_log = int(2 + rng.integers(2))    # 2 or 3 logical qubits
        n_gates = int(2 + rng.integers(3))
        lines = [f"q {n_log}"]
        for gid in range(n_gates):
            if rng.random() < 0.5 or n_log < 2:
                q = int(rng.integers(n_log))
                kind = _GATE_POOL_1Q[rng.integers(len(_GATE_POOL_1Q))]
                lines.append(f"g {gid} {kind} {q}")
            else:
                a, b = rng.choice(n_log, size=2, replace=False)
                lines.append(f"g {gid} cx {int(a)} {int(b)}")
        graph = parse_circuit("\n".join(lines) + "\n")
        if len(graph.tasks) * n_units > 16:
            continue
        arc_lines = [f"qubits {n_units}"]
        for q in range(n_units):
            arc_lines.append(f"q {q} {0.97 + 0.029 * rng.random():.6f}")
        for a in range(n_units - 1):
            f2 = 0.9 + 0.09 * rng.random()
            arc_lines.append(f"edge {a} {a + 1} {f2:.6f}")
            arc_lines.append(f"edge {a + 1} {a} {f2:.6f}")
        arch = parse_arch("\n".join(arc_lines) + "\n")
        schedule = compute_levels(graph, arch)
        if any(len(m) > n_units for m in schedule.levels):
            continue
        has_legal = any(
            quantum_placement_legal(graph, arch, p)
            for p in iter_level_placements(schedule, n_units))
        if not has_legal:
            continue
        return graph, arch


@pytest.fixture(scope="session")
def oracle_suite():
    """200 random classical instances with schedules and problems built."""
    from isingmap import build_classical_qubo
    rng = np.random.default_rng(20240817)
    suite = []
    while len(suite) < 200:
        graph, arch = random_classical_instance(rng)
        schedule = compute_levels(graph, arch)
        problem = build_classical_qubo(graph, arch, schedule)
        suite.append({
            "graph": graph, "arch": arch,
            "schedule": schedule, "problem": problem,
        })
    return suite


def all_state_energies(problem):
    """Energies of every bitvector, plus a constraint-validity mask
    computed from placement semantics (not from the penalty terms)."""
    n = problem.n_vars
    states = ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1)
    states = states.astype(np.float64)
    h, iu, ju, jv = problem._upper_arrays
    energies = states @ h
    for i, j, v in zip(iu, ju, jv):
        energies += v * states[:, i] * states[:, j]
    level_of = problem.meta["schedule"].level_of
    n_units = problem.meta["n_units"]
    valid = np.ones(1 << n, dtype=bool)
    blocks = {}
    for idx, (t, u) in enumerate(problem.var_map):
        blocks.setdefault(t, []).append(idx)
    for t, cols in blocks.items():
        valid &= states[:, cols].sum(axis=1) == 1
    by_level = {}
    for t in problem.task_ids:
        by_level.setdefault(level_of[t], []).append(t)
    for members in by_level.values():
        for a, b in itertools.combinations(members, 2):
            for u in range(n_units):
                ia = problem.var_index[(a, u)]
                ib = problem.var_index[(b, u)]
                valid &= ~((states[:, ia] == 1) & (states[:, ib] == 1))
    if problem.meta["flavor"] == QUANTUM:
        for ctl, tgt in problem.meta["gate_pairs"]:
            for p1 in range(n_units):
                for p2 in range(n_units):
                    if p1 == p2:
                        continue
                    if (p1, p2) in problem.meta["legal_pairs"]:
                        continue
                    ia = problem.var_index[(ctl, p1)]
                    ib = problem.var_index[(tgt, p2)]
                    valid &= ~((states[:, ia] == 1) & (states[:, ib] == 1))
    return energies, valid
