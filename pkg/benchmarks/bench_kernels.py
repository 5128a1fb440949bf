"""Compare the compiled solver kernels against the pure-Python twins.

Builds one random placement problem, runs each engine once per backend
with identical seeds, and reports wall time plus a result-equality check
(the twins are written to be bit-identical, not merely close).

Usage: python3 benchmarks/bench_kernels.py [--tasks N] [--units N] ...
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from isingmap import (
    SolverParams,
    compute_levels,
    build_classical_qubo,
    mesh_architecture,
    solve_anneal,
    solve_exact,
    solve_tabu,
)
from isingmap.graphs import CLASSICAL, Edge, Task, TaskGraph
from isingmap import _pykernels

try:
    from isingmap import _kernels
except ImportError:
    _kernels = None


def random_instance(n_tasks, rows, cols, seed):
    rng = np.random.default_rng(seed)
    # layered DAG, one predecessor each after the first layer
    n_units = rows * cols
    layer_size = max(1, n_units // 2)
    tasks, edges = [], []
    layers, current = [], []
    for t in range(n_tasks):
        tasks.append(Task(t, (int(rng.integers(1, 9)),)))
        current.append(t)
        if len(current) == layer_size:
            layers.append(current)
            current = []
    if current:
        layers.append(current)
    eid = 0
    for li in range(1, len(layers)):
        for t in layers[li]:
            src = int(rng.choice(layers[li - 1]))
            edges.append(Edge(eid, src, t, float(rng.integers(1, 6))))
            eid += 1
    graph = TaskGraph(tasks, edges, CLASSICAL)
    arch = mesh_architecture(rows, cols, link_cost=2.0, unit_costs=(1.0,))
    return graph, arch


def bench(label, fn, problem, params, impl):
    start = time.perf_counter()
    sol = fn(problem, params, impl=impl)
    elapsed = time.perf_counter() - start
    return sol, elapsed


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tasks", type=int, default=96)
    ap.add_argument("--rows", type=int, default=4)
    ap.add_argument("--cols", type=int, default=4)
    ap.add_argument("--exact-vars", type=int, default=18,
                    help="instance size for the exhaustive-search round")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if _kernels is None:
        print("compiled kernels unavailable; nothing to compare against",
              file=sys.stderr)
        return 1

    graph, arch = random_instance(args.tasks, args.rows, args.cols,
                                  args.seed)
    schedule = compute_levels(graph, arch)
    problem = build_classical_qubo(graph, arch, schedule)
    params = SolverParams(seed=args.seed)
    print(f"instance: {args.tasks} tasks on {args.rows}x{args.cols} mesh "
          f"-> {problem.n_vars} variables, {len(problem.couplers)} couplers")

    rows = []
    for name, fn in (("tabu", solve_tabu), ("anneal", solve_anneal)):
        sol_c, t_c = bench(name, fn, problem, params, _kernels)
        sol_p, t_p = bench(name, fn, problem, params, _pykernels)
        same = sol_c.energy == sol_p.energy and \
            bool((sol_c.bits == sol_p.bits).all())
        rows.append((name, t_c, t_p, sol_c.energy, same))

    # smaller instance (2x2 mesh) so exhaustive search stays feasible
    n_small = max(2, args.exact_vars // 4)
    g2, a2 = random_instance(n_small, 2, 2, args.seed)
    p2 = build_classical_qubo(g2, a2, compute_levels(g2, a2))
    sol_c, t_c = bench("exact", solve_exact, p2, params, _kernels)
    sol_p, t_p = bench("exact", solve_exact, p2, params, _pykernels)
    same = sol_c.energy == sol_p.energy and \
        bool((sol_c.bits == sol_p.bits).all())
    rows.append((f"exact ({p2.n_vars} vars)", t_c, t_p, sol_c.energy, same))

    print(f"{'engine':<18} {'compiled':>10} {'pure':>10} {'speedup':>8} "
          f"{'identical':>9}")
    for name, t_c, t_p, e, same in rows:
        print(f"{name:<18} {t_c * 1e3:>8.1f}ms {t_p * 1e3:>8.1f}ms "
              f"{t_p / t_c:>7.1f}x {'yes' if same else 'NO':>9}")
    if not all(r[4] for r in rows):
        print("MISMATCH between backends", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
