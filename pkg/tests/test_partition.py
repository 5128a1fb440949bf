"""Level windows, cut-edge folding, and the end-to-end pipeline."""

import numpy as np
import pytest

from isingmap import (
    ConfigError,
    PipelineOrderError,
    SolverParams,
    build_classical_qubo,
    build_subqubo,
    compute_levels,
    energy,
    mesh_architecture,
    parse_arch,
    parse_circuit,
    parse_tcg,
    partition_levels,
    run_pipeline,
    solve_exact,
)

from conftest import load_text


@pytest.fixture(scope="module")
def pipeline_instance():
    graph = parse_tcg(load_text("pipeline15.tcg"))
    arch = parse_arch(load_text("mesh2x2.arc"))
    return graph, arch, compute_levels(graph, arch)


def test_single_window_covers_everything(pipeline_instance):
    graph, arch, schedule = pipeline_instance
    subs = partition_levels(graph, schedule, 0)
    assert len(subs) == 1
    assert subs[0].level_range == (0, 4)
    assert subs[0].tasks == frozenset(range(15))
    assert len(subs[0].internal_edges) == 15
    assert subs[0].incoming_cut_edges == ()


def test_per_level_windows(pipeline_instance):
    graph, arch, schedule = pipeline_instance
    subs = partition_levels(graph, schedule, 1)
    assert len(subs) == 4
    assert all(sub.internal_edges == () for sub in subs)
    # every edge crosses a boundary exactly once
    total_in = sum(len(s.incoming_cut_edges) for s in subs)
    assert total_in == 15
    # edge 14 spans levels 1 -> 2
    span = [e.id for e in subs[2].incoming_cut_edges]
    assert 14 in span


def test_two_level_windows(pipeline_instance):
    graph, arch, schedule = pipeline_instance
    subs = partition_levels(graph, schedule, 2)
    assert [s.level_range for s in subs] == [(0, 2), (2, 4)]
    inner = {e.id for s in subs for e in s.internal_edges}
    crossing = {e.id for e in subs[1].incoming_cut_edges}
    assert inner | crossing == set(range(15))
    assert inner & crossing == set()
    assert subs[0].outgoing_cut_edges == subs[1].incoming_cut_edges


def test_granularity_validation(pipeline_instance):
    graph, arch, schedule = pipeline_instance
    with pytest.raises(ConfigError):
        partition_levels(graph, schedule, -1)
    assert partition_levels(graph, schedule, 99) == \
        partition_levels(graph, schedule, 0)


def test_empty_graph_partitions_to_nothing():
    g = parse_tcg("")
    a = mesh_architecture(1, 2)
    assert partition_levels(g, compute_levels(g, a), 1) == ()


def test_subqubo_requires_sources_placed(pipeline_instance):
    graph, arch, schedule = pipeline_instance
    subs = partition_levels(graph, schedule, 1)
    with pytest.raises(PipelineOrderError, match="window 1"):
        build_subqubo(subs[1], {}, graph, arch, schedule)


def test_fold_shifts_linear_weights(demo_graph, demo_arch):
    schedule = compute_levels(demo_graph, demo_arch)
    subs = partition_levels(demo_graph, schedule, 1)
    # with task 0 on unit 0, tasks 1/2 prefer unit 0 by the edge costs
    p = build_subqubo(subs[1], {0: 0}, demo_graph, demo_arch, schedule)
    iv = p.var_index
    # task 1 edge weight 2, one hop at link cost 2 -> bias difference 4
    assert p.linear[iv[(1, 1)]] - p.linear[iv[(1, 0)]] == 4.0
    assert p.linear[iv[(2, 1)]] - p.linear[iv[(2, 0)]] == 2.0


def test_windowed_objective_sums_to_total(pipeline_instance):
    graph, arch, schedule = pipeline_instance
    for granularity in (1, 2, 0):
        res = run_pipeline(graph, arch, engine="tabu",
                           granularity=granularity,
                           params=SolverParams(seed=4))
        assert res.objective_value == pytest.approx(res.report.total,
                                                    rel=1e-12)
        assert res.assignment.valid


def test_pipeline_matches_direct_solve(pipeline_instance):
    graph, arch, schedule = pipeline_instance
    params = SolverParams(seed=9)
    res = run_pipeline(graph, arch, engine="tabu", granularity=0,
                       params=params)
    from isingmap import solve_tabu
    direct = solve_tabu(build_classical_qubo(graph, arch, schedule), params)
    assert len(res.solutions) == 1
    assert res.solutions[0].energy == direct.energy
    assert (res.solutions[0].bits == direct.bits).all()


def test_pipeline_quantum():
    graph = parse_circuit(load_text("ladder8.circuit"))
    arch = parse_arch(load_text("tee5.arcq"))
    res = run_pipeline(graph, arch, engine="tabu", granularity=1,
                       params=SolverParams(seed=2))
    assert res.assignment.valid
    assert 0.0 < res.report.fidelity_total <= 1.0
    assert res.objective_value >= 0.0


def test_pipeline_greedy_is_bounded_below_by_optimum(demo_graph, demo_arch):
    whole = run_pipeline(demo_graph, demo_arch, engine="exact",
                         granularity=0)
    # per-level greedy cannot beat the joint optimum
    greedy = run_pipeline(demo_graph, demo_arch, engine="exact",
                          granularity=1)
    assert greedy.report.total >= whole.report.total
    assert whole.report.total == 11.0


def test_pipeline_result_json(pipeline_instance):
    graph, arch, schedule = pipeline_instance
    res = run_pipeline(graph, arch, engine="tabu", granularity=2,
                       params=SolverParams(seed=4))
    j = res.to_json()
    assert j["n_windows"] == 2
    assert j["assignment"]["valid"] is True
    assert len(j["windows"]) == 2
    assert j["windows"][0]["solution"]["engine"] == "tabu"
