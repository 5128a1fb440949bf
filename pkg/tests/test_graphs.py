"""Graph types, parsers, architectures, and level scheduling."""

import numpy as np
import pytest

from isingmap import (
    CLASSICAL,
    QUANTUM,
    Architecture,
    CapacityError,
    ConfigError,
    ConnectivityError,
    CycleError,
    ParseError,
    RangeError,
    TaskGraph,
    UnknownReferenceError,
    compute_levels,
    mesh_architecture,
    parse_arch,
    parse_circuit,
    parse_tcg,
    serialize_tcg,
)
from isingmap.graphs import CONTINUITY, GATE_PAIR, Edge, Link, Task, Unit

from conftest import load_text


# -- task graph construction ----------------------------------------------

def test_tcg_parse_and_roundtrip():
    g = parse_tcg(load_text("pipeline15.tcg"))
    assert g.n_tasks == 15
    assert len(g.edges) == 15
    assert g.flavor == CLASSICAL
    assert g.task(0).costs == (2.0, 1.0)
    assert parse_tcg(serialize_tcg(g)) == g


def test_tcg_parse_errors():
    with pytest.raises(ParseError, match="line 1"):
        parse_tcg("t 0\n")
    with pytest.raises(ParseError, match="duplicate task id"):
        parse_tcg("t 0 1\nt 0 2\n")
    with pytest.raises(ParseError, match="negative"):
        parse_tcg("t 0 -1\n")
    with pytest.raises(ParseError, match="duplicate edge id"):
        parse_tcg("t 0 1\nt 1 1\ne 0 0 1 1\ne 0 1 0 1\n")
    with pytest.raises(ParseError, match="expected an integer"):
        parse_tcg("t x 1\n")
    with pytest.raises(ParseError, match="unknown line type"):
        parse_tcg("task 0 1\n")


def test_graph_validation():
    with pytest.raises(UnknownReferenceError, match="unknown task"):
        TaskGraph([Task(0, (1,))], [Edge(0, 0, 5)], CLASSICAL)
    with pytest.raises(CycleError):
        TaskGraph([Task(0, (1,)), Task(1, (1,))],
                  [Edge(0, 0, 1), Edge(1, 1, 0)], CLASSICAL)
    with pytest.raises(ConfigError, match="data edges"):
        TaskGraph([Task(0), Task(1)], [Edge(0, 0, 1, 1.0, GATE_PAIR)],
                  CLASSICAL)


def test_self_dependency_rejected():
    with pytest.raises(CycleError):
        TaskGraph([Task(0, (1,))], [Edge(0, 0, 0)], CLASSICAL)


def test_condensed_cycle_through_gate_pairs():
    # pair A {0,1}, pair B {2,3}: continuity edges 1->2 and 3->0 close a
    # cycle once each pair is contracted to one node
    tasks = [Task(i, (), qubit=i % 2, gate=i // 2) for i in range(4)]
    edges = [
        Edge(0, 0, 1, 1.0, GATE_PAIR),
        Edge(1, 2, 3, 1.0, GATE_PAIR),
        Edge(2, 1, 2, 1.0, CONTINUITY),
        Edge(3, 3, 0, 1.0, CONTINUITY),
    ]
    with pytest.raises(CycleError):
        TaskGraph(tasks, edges, QUANTUM)


def test_gate_pair_membership_unique():
    tasks = [Task(i, ()) for i in range(3)]
    edges = [Edge(0, 0, 1, 1.0, GATE_PAIR), Edge(1, 1, 2, 1.0, GATE_PAIR)]
    with pytest.raises(ConfigError, match="more than one gate pair"):
        TaskGraph(tasks, edges, QUANTUM)


# -- circuit parsing -------------------------------------------------------

def test_circuit_structure():
    g = parse_circuit(load_text("mixed4.circuit"))
    assert g.flavor == QUANTUM
    assert [t.id for t in g.tasks] == [0, 1, 2, 3]
    assert g.task(0).qubit == 0 and g.task(3).qubit == 1
    pair_edges = g.gate_pair_edges()
    assert len(pair_edges) == 1
    assert (pair_edges[0].src, pair_edges[0].dst) == (1, 2)
    cont = {(e.src, e.dst) for e in g.continuity_edges()}
    assert cont == {(0, 1), (2, 3)}
    assert sorted(g.one_qubit_task_ids()) == [0, 3]
    assert g.pair_partner(1) == 2


def test_circuit_control_before_target():
    g = parse_circuit("q 2\ng 0 cx 1 0\n")
    e = g.gate_pair_edges()[0]
    assert g.task(e.src).qubit == 1  # control keeps the lower task id
    assert g.task(e.dst).qubit == 0


def test_circuit_parse_errors():
    with pytest.raises(ParseError, match="header"):
        parse_circuit("g 0 h 0\n")
    with pytest.raises(ParseError, match="unknown gate kind"):
        parse_circuit("q 2\ng 0 foo 0\n")
    with pytest.raises(ParseError, match="one qubit"):
        parse_circuit("q 2\ng 0 h 0 1\n")
    with pytest.raises(ParseError, match="two qubits"):
        parse_circuit("q 2\ng 0 cx 0\n")
    with pytest.raises(ParseError, match="must differ"):
        parse_circuit("q 2\ng 0 cx 1 1\n")
    with pytest.raises(UnknownReferenceError):
        parse_circuit("q 2\ng 0 h 5\n")


# -- architectures ---------------------------------------------------------

def test_mesh_layout_and_hops():
    a = mesh_architecture(2, 2, link_cost=2.0)
    assert a.n_units == 4
    assert a.hop_count(0, 3) == 2
    assert a.hop_cost(0, 3) == 4.0
    assert a.hop_cost(1, 2) == 4.0
    assert a.hop_cost(0, 0) == 0.0
    assert a.max_hop_cost == 4.0


@pytest.mark.parametrize("side,expected", [(2, 20.0), (4, 60.0), (8, 140.0)])
def test_worst_case_edge_cost_on_square_meshes(side, expected):
    # heaviest edge (weight 5) stretched across the mesh diagonal,
    # with per-hop link cost 2
    a = mesh_architecture(side, side, link_cost=2.0)
    assert 5.0 * a.max_hop_cost == expected


def test_arc_parsing():
    a = parse_arch(load_text("mesh2x2.arc"))
    assert a.flavor == CLASSICAL
    assert a.n_units == 4
    assert a.link_cost == 2.0
    assert a.unit(3).costs == (3.0, 1.0)
    assert a.topology == ("mesh", 2, 2)


def test_arc_errors():
    with pytest.raises(ParseError, match="missing 'mesh"):
        parse_arch("pu 0 1\n")
    with pytest.raises(ParseError, match="expected 2 pu lines"):
        parse_arch("mesh 1 2\npu 0 1\n")
    with pytest.raises(UnknownReferenceError):
        parse_arch("mesh 1 2\npu 0 1\npu 5 1\n")
    with pytest.raises(RangeError):
        parse_arch("mesh 1 2\nlinkcost -1\npu 0 1\npu 1 1\n")


def test_arcq_parsing():
    a = parse_arch(load_text("tee5.arcq"))
    assert a.flavor == QUANTUM
    assert a.n_units == 5
    assert a.f1(0) == 0.9994
    assert a.f2(0, 1) == 0.991
    assert a.f2(0, 2) is None
    assert (0, 1) in a.legal_pairs and (2, 4) not in a.legal_pairs
    assert a.hop_count(0, 4) == 3
    # default swap fidelity: cube of the mean listed pair fidelity
    mean_f2 = (0.991 + 0.991 + 0.983 + 0.983 + 0.987 + 0.987
               + 0.979 + 0.979) / 8
    assert a.f_swap == pytest.approx(mean_f2 ** 3, rel=1e-12)


def test_arcq_explicit_fswap_wins():
    text = ("qubits 2\nq 0 0.99\nq 1 0.98\n"
            "edge 0 1 0.9\nfswap 0.5\n")
    assert parse_arch(text).f_swap == 0.5


def test_arcq_errors():
    with pytest.raises(ParseError, match="missing fidelity"):
        parse_arch("qubits 2\nq 0 0.9\nedge 0 1 0.9\n")
    with pytest.raises(RangeError):
        parse_arch("qubits 2\nq 0 0.9\nq 1 1.5\nedge 0 1 0.9\n")
    with pytest.raises(ParseError, match="duplicate edge"):
        parse_arch("qubits 2\nq 0 0.9\nq 1 0.9\n"
                   "edge 0 1 0.9\nedge 0 1 0.8\n")
    with pytest.raises(ConnectivityError):
        parse_arch("qubits 3\nq 0 0.9\nq 1 0.9\nq 2 0.9\nedge 0 1 0.9\n")


def test_arch_direct_validation():
    with pytest.raises(ConfigError, match="consecutive"):
        Architecture([Unit(1, (1.0,))], [], CLASSICAL)
    with pytest.raises(ConnectivityError):
        Architecture([Unit(0, (1.0,)), Unit(1, (1.0,))], [], CLASSICAL)
    one = Architecture([Unit(0, (1.0,))], [], CLASSICAL)
    assert one.max_hop_cost == 0.0


def test_comp_cost_dot_product():
    a = parse_arch(load_text("mesh2x2.arc"))
    t = Task(0, (2.0, 3.0))
    assert a.comp_cost(t, 0) == 2.0 * 1 + 3.0 * 2
    assert a.comp_cost(t, 3) == 2.0 * 3 + 3.0 * 1
    with pytest.raises(ConfigError, match="cost types"):
        a.comp_cost(Task(1, (1.0,)), 0)


# -- level scheduling ------------------------------------------------------

def test_levels_longest_path():
    g = parse_tcg(load_text("pipeline15.tcg"))
    a = parse_arch(load_text("mesh2x2.arc"))
    s = compute_levels(g, a)
    assert s.levels == ((0, 1, 2, 3), (4, 5, 6, 7), (8, 9, 10, 11),
                        (12, 13, 14))
    assert s.level_of[6] == 1
    assert s.capacity == 4


def test_levels_capacity_deferral():
    # five independent tasks on four units: the largest id defers
    tasks = [Task(i, (1,)) for i in range(5)]
    g = TaskGraph(tasks, [], CLASSICAL)
    s = compute_levels(g, mesh_architecture(2, 2))
    assert s.levels == ((0, 1, 2, 3), (4,))


def test_levels_deferral_cascade():
    # nine independent tasks on four units fill three levels
    tasks = [Task(i, (1,)) for i in range(9)]
    g = TaskGraph(tasks, [], CLASSICAL)
    s = compute_levels(g, mesh_architecture(2, 2))
    assert [len(lv) for lv in s.levels] == [4, 4, 1]
    assert s.levels[0] == (0, 1, 2, 3)


def test_levels_deferral_pushes_successors():
    # 0..4 independent, 5 depends on 4; deferring 4 drags 5 along
    tasks = [Task(i, (1,)) for i in range(6)]
    g = TaskGraph(tasks, [Edge(0, 4, 5, 1.0)], CLASSICAL)
    s = compute_levels(g, mesh_architecture(2, 2))
    assert s.level_of[4] == 1
    assert s.level_of[5] == 2


def test_levels_gate_pairs_share_level():
    g = parse_circuit(load_text("chain2.circuit"))
    a = parse_arch(load_text("tee5.arcq"))
    s = compute_levels(g, a)
    assert s.level_of[0] == s.level_of[1] == 0
    assert s.level_of[2] == s.level_of[3] == 1


def test_levels_pair_too_wide():
    g = parse_circuit("q 2\ng 0 cx 0 1\n")
    a = parse_arch("qubits 1\nq 0 0.9\n")
    with pytest.raises(CapacityError):
        compute_levels(g, a)


def test_levels_empty_graph():
    g = TaskGraph([], [], CLASSICAL)
    s = compute_levels(g, mesh_architecture(1, 2))
    assert s.n_levels == 0
