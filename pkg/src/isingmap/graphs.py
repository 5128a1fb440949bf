"""Task graphs, architectures, input parsing, and dependency-level scheduling.

Classical workloads arrive as weighted task DAGs (``.tcg`` files), quantum
workloads as flat gate-list circuits.  Target hardware arrives as a PU mesh
(``.arc``) or an explicit qubit topology with fidelities (``.arcq``).  This
module turns all four into in-memory structures, derives dependency levels
bounded by the unit count, and precomputes hop distances used as
communication / movement costs downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import (
    CapacityError,
    ConfigError,
    ConnectivityError,
    CycleError,
    ParseError,
    RangeError,
    UnknownReferenceError,
)

CLASSICAL = "classical"
QUANTUM = "quantum"

DATA = "data"
GATE_PAIR = "gate-pair"
CONTINUITY = "continuity"

ONE_QUBIT_GATES = frozenset("id h x y z s sdg t tdg sx rx ry rz".split())
TWO_QUBIT_GATES = frozenset("cx cnot cz cy ch swap".split())


def fmt_num(x: float) -> str:
    """Render a float the short way: integral values without the trailing .0"""
    x = float(x)
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


@dataclass(frozen=True)
class Task:
    id: int
    costs: tuple[float, ...] = ()
    qubit: int | None = None  # logical qubit, quantum flavor only
    gate: int | None = None   # originating gate id, quantum flavor only


@dataclass(frozen=True)
class Edge:
    id: int
    src: int
    dst: int
    weight: float = 1.0
    kind: str = DATA


class TaskGraph:
    """Weighted DAG of computation tasks or per-gate placement tasks.

    Classical graphs carry only ``data`` edges.  Quantum graphs carry
    ``gate-pair`` edges joining the two halves of a two-qubit gate
    (control -> target) and ``continuity`` edges joining consecutive gates
    on the same logical qubit.  Gate pairs are treated as one unit for
    ordering purposes: acyclicity and levels are computed on the condensed
    graph where the two halves of a pair are merged.
    """

    def __init__(self, tasks, edges, flavor):
        if flavor not in (CLASSICAL, QUANTUM):
            raise ConfigError(f"unknown graph flavor {flavor!r}")
        self.flavor = flavor
        self.tasks = list(tasks)
        self.edges = list(edges)

        self._by_id: dict[int, Task] = {}
        for t in self.tasks:
            if t.id in self._by_id:
                raise UnknownReferenceError(f"duplicate task id {t.id}")
            self._by_id[t.id] = t

        seen_edges = set()
        self._pair_of: dict[int, int] = {}
        for e in self.edges:
            if e.id in seen_edges:
                raise UnknownReferenceError(f"duplicate edge id {e.id}")
            seen_edges.add(e.id)
            for endpoint in (e.src, e.dst):
                if endpoint not in self._by_id:
                    raise UnknownReferenceError(
                        f"edge {e.id} references unknown task {endpoint}")
            if e.weight < 0:
                raise RangeError(f"edge {e.id} has negative weight {e.weight}")
            if flavor == CLASSICAL and e.kind != DATA:
                raise ConfigError(
                    f"classical graphs carry only data edges, got {e.kind!r}")
            if flavor == QUANTUM and e.kind == DATA:
                raise ConfigError("quantum graphs carry no data edges")
            if e.kind == GATE_PAIR:
                if e.src == e.dst:
                    raise ConfigError(f"gate-pair edge {e.id} is a self loop")
                if e.src in self._pair_of or e.dst in self._pair_of:
                    raise ConfigError(
                        f"task participates in more than one gate pair "
                        f"(edge {e.id})")
                self._pair_of[e.src] = e.dst
                self._pair_of[e.dst] = e.src
        self._check_acyclic()

    # -- structure helpers -------------------------------------------------

    @property
    def n_tasks(self) -> int:
        return len(self.tasks)

    def task(self, task_id: int) -> Task:
        return self._by_id[task_id]

    def task_ids(self):
        return [t.id for t in self.tasks]

    def pair_partner(self, task_id: int) -> int | None:
        return self._pair_of.get(task_id)

    def one_qubit_task_ids(self):
        """Tasks that are not half of any gate pair."""
        return [t.id for t in self.tasks if t.id not in self._pair_of]

    def data_edges(self):
        return [e for e in self.edges if e.kind == DATA]

    def gate_pair_edges(self):
        return [e for e in self.edges if e.kind == GATE_PAIR]

    def continuity_edges(self):
        return [e for e in self.edges if e.kind == CONTINUITY]

    def ordering_edges(self):
        """Edges that impose a level order (everything but gate pairs)."""
        return [e for e in self.edges if e.kind != GATE_PAIR]

    def group_of(self, task_id: int) -> int:
        """Condensed-node representative: min id over the gate pair, or self."""
        partner = self._pair_of.get(task_id)
        if partner is None:
            return task_id
        return min(task_id, partner)

    def groups(self) -> dict[int, tuple[int, ...]]:
        """Condensed nodes as {representative: member task ids, sorted}."""
        out: dict[int, list[int]] = {}
        for t in self.tasks:
            out.setdefault(self.group_of(t.id), []).append(t.id)
        return {rep: tuple(sorted(members)) for rep, members in out.items()}

    def _condensed_edges(self):
        """Ordering edges projected onto condensed nodes (dedup'd)."""
        seen = set()
        out = []
        for e in self.ordering_edges():
            gs, gd = self.group_of(e.src), self.group_of(e.dst)
            if (gs, gd) not in seen:
                seen.add((gs, gd))
                out.append((gs, gd, e))
        return out

    def _check_acyclic(self):
        cond = self._condensed_edges()
        for gs, gd, e in cond:
            if gs == gd:
                raise CycleError(
                    f"cycle detected: edge {e.id} ({e.src} -> {e.dst}) "
                    f"orders a gate pair against itself")
        nodes = set(self.groups())
        indeg = {g: 0 for g in nodes}
        succs: dict[int, list[int]] = {g: [] for g in nodes}
        for gs, gd, _ in cond:
            indeg[gd] += 1
            succs[gs].append(gd)
        queue = [g for g in nodes if indeg[g] == 0]
        done = 0
        while queue:
            g = queue.pop()
            done += 1
            for s in succs[g]:
                indeg[s] -= 1
                if indeg[s] == 0:
                    queue.append(s)
        if done != len(nodes):
            stuck = {g for g in nodes if indeg[g] > 0}
            for gs, gd, e in cond:
                if gs in stuck and gd in stuck:
                    raise CycleError(
                        f"cycle detected involving edge {e.id} "
                        f"({e.src} -> {e.dst})")
            raise CycleError("cycle detected")

    def __eq__(self, other):
        if not isinstance(other, TaskGraph):
            return NotImplemented
        return (self.flavor == other.flavor
                and sorted(self.tasks, key=lambda t: t.id)
                == sorted(other.tasks, key=lambda t: t.id)
                and sorted(self.edges, key=lambda e: e.id)
                == sorted(other.edges, key=lambda e: e.id))

    def __repr__(self):
        return (f"TaskGraph({self.flavor}, {len(self.tasks)} tasks, "
                f"{len(self.edges)} edges)")


@dataclass(frozen=True)
class Unit:
    id: int
    costs: tuple[float, ...] = ()


@dataclass(frozen=True)
class Link:
    src: int
    dst: int
    directed: bool = False
    attr: float = 1.0  # link cost (classical) or two-qubit fidelity (quantum)


class Architecture:
    """Processing units (or physical qubits) plus their interconnect.

    Hop distances are shortest paths over the links viewed as undirected;
    link direction only matters for two-qubit gate legality on quantum
    hardware.
    """

    def __init__(self, units, links, flavor, topology=("explicit",),
                 link_cost=1.0, f_swap=None):
        if flavor not in (CLASSICAL, QUANTUM):
            raise ConfigError(f"unknown architecture flavor {flavor!r}")
        self.flavor = flavor
        self.units = sorted(units, key=lambda u: u.id)
        self.links = list(links)
        self.topology = tuple(topology)
        self.link_cost = float(link_cost)
        self.f_swap = None if f_swap is None else float(f_swap)

        n = len(self.units)
        if [u.id for u in self.units] != list(range(n)):
            raise ConfigError("unit ids must be consecutive starting at 0")
        if self.link_cost < 0:
            raise RangeError(f"link cost must be >= 0, got {self.link_cost}")
        if flavor == QUANTUM:
            for u in self.units:
                if not u.costs:
                    raise ConfigError(f"qubit {u.id} is missing a fidelity")
                if not 0.0 < u.costs[0] <= 1.0:
                    raise RangeError(
                        f"qubit {u.id} fidelity {u.costs[0]} outside (0, 1]")
            if self.f_swap is not None and not 0.0 < self.f_swap <= 1.0:
                raise RangeError(f"swap fidelity {self.f_swap} outside (0, 1]")

        self._f2: dict[tuple[int, int], float] = {}
        for l in self.links:
            for endpoint in (l.src, l.dst):
                if not 0 <= endpoint < n:
                    raise UnknownReferenceError(
                        f"link references unknown unit {endpoint}")
            if l.src == l.dst:
                raise ConfigError("self-loop links are not allowed")
            if flavor == QUANTUM:
                if not 0.0 < l.attr <= 1.0:
                    raise RangeError(
                        f"link fidelity {l.attr} outside (0, 1] "
                        f"({l.src} -> {l.dst})")
                self._f2[(l.src, l.dst)] = l.attr
                if not l.directed:
                    self._f2[(l.dst, l.src)] = l.attr

        if n > 0:
            adj = np.zeros((n, n))
            for l in self.links:
                adj[l.src, l.dst] = 1
                adj[l.dst, l.src] = 1
            if n == 1:
                hops = np.zeros((1, 1))
            else:
                hops = shortest_path(csr_matrix(adj), method="D",
                                     directed=False, unweighted=True)
            if np.isinf(hops).any():
                raise ConnectivityError(
                    "architecture links do not connect all units")
            self._hops = hops.astype(np.int64)
        else:
            self._hops = np.zeros((0, 0), dtype=np.int64)

    @property
    def n_units(self) -> int:
        return len(self.units)

    def unit(self, unit_id: int) -> Unit:
        if not 0 <= unit_id < self.n_units:
            raise UnknownReferenceError(f"unknown unit {unit_id}")
        return self.units[unit_id]

    def hop_count(self, p1: int, p2: int) -> int:
        """Number of link hops on a shortest undirected path."""
        if not (0 <= p1 < self.n_units and 0 <= p2 < self.n_units):
            raise UnknownReferenceError(f"unknown unit in pair ({p1}, {p2})")
        return int(self._hops[p1, p2])

    def hop_cost(self, p1: int, p2: int) -> float:
        """Per-hop link cost (classical) or plain hop count (quantum)."""
        hops = self.hop_count(p1, p2)
        if self.flavor == CLASSICAL:
            return hops * self.link_cost
        return float(hops)

    @property
    def max_hop_count(self) -> int:
        return int(self._hops.max()) if self.n_units else 0

    @property
    def max_hop_cost(self) -> float:
        if self.flavor == CLASSICAL:
            return self.max_hop_count * self.link_cost
        return float(self.max_hop_count)

    def f1(self, unit_id: int) -> float:
        return self.unit(unit_id).costs[0]

    def f2(self, p1: int, p2: int) -> float | None:
        """Directed two-qubit fidelity, None when (p1 -> p2) is not listed."""
        return self._f2.get((p1, p2))

    @property
    def legal_pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset(self._f2)

    def comp_cost(self, task: Task, unit_id: int) -> float:
        """Computation cost: task cost vector dotted with unit multipliers."""
        u = self.unit(unit_id)
        if len(task.costs) != len(u.costs):
            raise ConfigError(
                f"task {task.id} has {len(task.costs)} cost types but unit "
                f"{unit_id} has {len(u.costs)}")
        return float(sum(a * b for a, b in zip(task.costs, u.costs)))

    def __repr__(self):
        return (f"Architecture({self.flavor}, {self.n_units} units, "
                f"{len(self.links)} links)")


def mesh_architecture(rows, cols, link_cost=1.0, unit_costs=None):
    """Build a rows x cols 4-neighbor mesh of classical units.

    unit_costs may be a single cost tuple applied to every unit or a list
    with one tuple per unit (row-major order).
    """
    if rows < 1 or cols < 1:
        raise ConfigError("mesh dimensions must be >= 1")
    n = rows * cols
    if unit_costs is None:
        unit_costs = [(1.0,)] * n
    elif isinstance(unit_costs, tuple):
        unit_costs = [unit_costs] * n
    if len(unit_costs) != n:
        raise ConfigError(f"expected {n} unit cost vectors")
    units = [Unit(i, tuple(float(c) for c in unit_costs[i])) for i in range(n)]
    links = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                links.append(Link(i, i + 1, False, link_cost))
            if r + 1 < rows:
                links.append(Link(i, i + cols, False, link_cost))
    return Architecture(units, links, CLASSICAL, ("mesh", rows, cols),
                        link_cost=link_cost)


# -- parsing ---------------------------------------------------------------

def _content_lines(text):
    out = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            out.append((ln, stripped.split()))
    return out


def _int(token, ln):
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", ln) from None


def _float(token, ln):
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"expected a number, got {token!r}", ln) from None


def parse_tcg(text: str) -> TaskGraph:
    """Parse the ``.tcg`` task-graph format.

    Lines: ``t <id> <cost0> [<cost1> ...]`` and ``e <id> <src> <dst>
    <weight>``; ``#`` starts a comment.
    """
    tasks, edges = [], []
    task_ids, edge_ids = set(), set()
    for ln, tok in _content_lines(text):
        if tok[0] == "t":
            if len(tok) < 3:
                raise ParseError(
                    "task line is 't <id> <cost0> [<cost1> ...]'", ln)
            tid = _int(tok[1], ln)
            costs = tuple(_float(x, ln) for x in tok[2:])
            if any(c < 0 for c in costs):
                raise ParseError(f"task {tid} has a negative cost", ln)
            if tid in task_ids:
                raise ParseError(f"duplicate task id {tid}", ln)
            task_ids.add(tid)
            tasks.append(Task(tid, costs))
        elif tok[0] == "e":
            if len(tok) != 5:
                raise ParseError("edge line is 'e <id> <src> <dst> <weight>'",
                                 ln)
            eid = _int(tok[1], ln)
            src, dst = _int(tok[2], ln), _int(tok[3], ln)
            weight = _float(tok[4], ln)
            if weight < 0:
                raise ParseError(f"edge {eid} has a negative weight", ln)
            if eid in edge_ids:
                raise ParseError(f"duplicate edge id {eid}", ln)
            edge_ids.add(eid)
            edges.append(Edge(eid, src, dst, weight, DATA))
        else:
            raise ParseError(f"unknown line type {tok[0]!r}", ln)
    return TaskGraph(tasks, edges, CLASSICAL)


def serialize_tcg(graph: TaskGraph) -> str:
    """Canonical text form of a classical task graph; parse_tcg inverts it."""
    if graph.flavor != CLASSICAL:
        raise ConfigError("only classical graphs serialize to .tcg")
    lines = []
    for t in sorted(graph.tasks, key=lambda t: t.id):
        lines.append("t " + str(t.id) + " "
                     + " ".join(fmt_num(c) for c in t.costs))
    for e in sorted(graph.edges, key=lambda e: e.id):
        lines.append(f"e {e.id} {e.src} {e.dst} {fmt_num(e.weight)}")
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> TaskGraph:
    """Parse a flat gate-list circuit into a quantum task graph.

    Format: a ``q <n>`` header then ``g <id> <kind> <q0> [<q1>]`` lines in
    program order; for two-qubit kinds q0 is the control.  Each one-qubit
    gate becomes one task; each two-qubit gate becomes two tasks joined by
    a directed gate-pair edge (control -> target).  Consecutive gates on
    the same logical qubit are joined by continuity edges.
    """
    n_qubits = None
    tasks, edges = [], []
    gate_ids = set()
    last_on: dict[int, int] = {}
    next_task = 0
    next_edge = 0

    def continuity(qubit, new_task):
        nonlocal next_edge
        prev = last_on.get(qubit)
        if prev is not None:
            edges.append(Edge(next_edge, prev, new_task, 1.0, CONTINUITY))
            next_edge += 1
        last_on[qubit] = new_task

    for ln, tok in _content_lines(text):
        if tok[0] == "q":
            if len(tok) != 2:
                raise ParseError("qubit header is 'q <n>'", ln)
            if n_qubits is not None:
                raise ParseError("duplicate qubit-count header", ln)
            n_qubits = _int(tok[1], ln)
            if n_qubits < 1:
                raise ParseError("qubit count must be >= 1", ln)
        elif tok[0] == "g":
            if n_qubits is None:
                raise ParseError("gate line before the 'q <n>' header", ln)
            if len(tok) not in (4, 5):
                raise ParseError("gate line is 'g <id> <kind> <q0> [<q1>]'",
                                 ln)
            gid = _int(tok[1], ln)
            kind = tok[2]
            qs = [_int(x, ln) for x in tok[3:]]
            if gid in gate_ids:
                raise ParseError(f"duplicate gate id {gid}", ln)
            gate_ids.add(gid)
            if kind in ONE_QUBIT_GATES:
                if len(qs) != 1:
                    raise ParseError(f"gate kind {kind!r} takes one qubit", ln)
            elif kind in TWO_QUBIT_GATES:
                if len(qs) != 2:
                    raise ParseError(f"gate kind {kind!r} takes two qubits",
                                     ln)
                if qs[0] == qs[1]:
                    raise ParseError("control and target must differ", ln)
            else:
                raise ParseError(f"unknown gate kind {kind!r}", ln)
            for qb in qs:
                if not 0 <= qb < n_qubits:
                    raise UnknownReferenceError(
                        f"qubit {qb} out of range on line {ln}")
            if len(qs) == 1:
                tid = next_task
                next_task += 1
                tasks.append(Task(tid, (), qubit=qs[0], gate=gid))
                continuity(qs[0], tid)
            else:
                ctl, tgt = next_task, next_task + 1
                next_task += 2
                tasks.append(Task(ctl, (), qubit=qs[0], gate=gid))
                tasks.append(Task(tgt, (), qubit=qs[1], gate=gid))
                edges.append(Edge(next_edge, ctl, tgt, 1.0, GATE_PAIR))
                next_edge += 1
                continuity(qs[0], ctl)
                continuity(qs[1], tgt)
        else:
            raise ParseError(f"unknown line type {tok[0]!r}", ln)
    if n_qubits is None:
        raise ParseError("missing 'q <n>' header", 1)
    return TaskGraph(tasks, edges, QUANTUM)


def parse_arch(text: str) -> Architecture:
    """Parse an architecture file, dispatching on its keywords.

    ``.arc`` (classical): ``mesh <rows> <cols>``, ``linkcost <c>``, and one
    ``pu <id> <cost0> [...]`` line per unit.  ``.arcq`` (quantum):
    ``qubits <n>``, ``q <id> <f1>``, directed ``edge <src> <dst> <f2>``
    lines, optional ``fswap <f>``.
    """
    lines = _content_lines(text)
    if not lines:
        raise ParseError("empty architecture description", 1)
    keywords = {tok[0] for _, tok in lines}
    if keywords & {"mesh", "linkcost", "pu"}:
        return _parse_arc(lines)
    if keywords & {"qubits", "edge", "fswap", "q"}:
        return _parse_arcq(lines)
    raise ParseError(f"unrecognized architecture line {lines[0][1][0]!r}",
                     lines[0][0])


def _parse_arc(lines) -> Architecture:
    rows = cols = None
    link_cost = 1.0
    pus: dict[int, tuple[float, ...]] = {}
    for ln, tok in lines:
        if tok[0] == "mesh":
            if len(tok) != 3:
                raise ParseError("mesh line is 'mesh <rows> <cols>'", ln)
            if rows is not None:
                raise ParseError("duplicate mesh line", ln)
            rows, cols = _int(tok[1], ln), _int(tok[2], ln)
            if rows < 1 or cols < 1:
                raise ParseError("mesh dimensions must be >= 1", ln)
        elif tok[0] == "linkcost":
            if len(tok) != 2:
                raise ParseError("linkcost line is 'linkcost <c>'", ln)
            link_cost = _float(tok[1], ln)
            if link_cost < 0:
                raise RangeError(f"link cost must be >= 0, got {link_cost}")
        elif tok[0] == "pu":
            if len(tok) < 3:
                raise ParseError("pu line is 'pu <id> <cost0> [...]'", ln)
            pid = _int(tok[1], ln)
            if pid in pus:
                raise ParseError(f"duplicate pu id {pid}", ln)
            pus[pid] = tuple(_float(x, ln) for x in tok[2:])
        else:
            raise ParseError(f"unknown line type {tok[0]!r}", ln)
    if rows is None:
        raise ParseError("missing 'mesh <rows> <cols>' line")
    n = rows * cols
    for pid in pus:
        if not 0 <= pid < n:
            raise UnknownReferenceError(
                f"pu id {pid} out of range for mesh {rows}x{cols}")
    if len(pus) != n:
        raise ParseError(f"expected {n} pu lines, got {len(pus)}")
    return mesh_architecture(rows, cols, link_cost,
                             [pus[i] for i in range(n)])


def _parse_arcq(lines) -> Architecture:
    n = None
    f1: dict[int, float] = {}
    links: list[Link] = []
    seen_dir: set[tuple[int, int]] = set()
    f_swap = None
    f2_values: list[float] = []
    for ln, tok in lines:
        if tok[0] == "qubits":
            if len(tok) != 2:
                raise ParseError("qubit header is 'qubits <n>'", ln)
            if n is not None:
                raise ParseError("duplicate qubits line", ln)
            n = _int(tok[1], ln)
            if n < 1:
                raise ParseError("qubit count must be >= 1", ln)
        elif tok[0] == "q":
            if len(tok) != 3:
                raise ParseError("qubit line is 'q <id> <f1>'", ln)
            qid = _int(tok[1], ln)
            f = _float(tok[2], ln)
            if qid in f1:
                raise ParseError(f"duplicate qubit line for {qid}", ln)
            if not 0.0 < f <= 1.0:
                raise RangeError(f"qubit {qid} fidelity {f} outside (0, 1]")
            f1[qid] = f
        elif tok[0] == "edge":
            if len(tok) != 4:
                raise ParseError("edge line is 'edge <src> <dst> <f2>'", ln)
            src, dst = _int(tok[1], ln), _int(tok[2], ln)
            f = _float(tok[3], ln)
            if src == dst:
                raise ParseError("self-loop edges are not allowed", ln)
            if (src, dst) in seen_dir:
                raise ParseError(f"duplicate edge {src} -> {dst}", ln)
            seen_dir.add((src, dst))
            if not 0.0 < f <= 1.0:
                raise RangeError(
                    f"edge fidelity {f} outside (0, 1] ({src} -> {dst})")
            links.append(Link(src, dst, True, f))
            f2_values.append(f)
        elif tok[0] == "fswap":
            if len(tok) != 2:
                raise ParseError("fswap line is 'fswap <f>'", ln)
            if f_swap is not None:
                raise ParseError("duplicate fswap line", ln)
            f_swap = _float(tok[1], ln)
            if not 0.0 < f_swap <= 1.0:
                raise RangeError(f"swap fidelity {f_swap} outside (0, 1]")
        else:
            raise ParseError(f"unknown line type {tok[0]!r}", ln)
    if n is None:
        raise ParseError("missing 'qubits <n>' line")
    for qid in f1:
        if not 0 <= qid < n:
            raise UnknownReferenceError(f"qubit id {qid} out of range")
    for qid in range(n):
        if qid not in f1:
            raise ParseError(f"missing fidelity line for qubit {qid}")
    for l in links:
        for endpoint in (l.src, l.dst):
            if not 0 <= endpoint < n:
                raise UnknownReferenceError(
                    f"edge references unknown qubit {endpoint}")
    if f_swap is None and f2_values:
        # a swap decomposes into three two-qubit gates
        f_swap = (sum(f2_values) / len(f2_values)) ** 3
    units = [Unit(i, (f1[i],)) for i in range(n)]
    return Architecture(units, links, QUANTUM, ("explicit",), f_swap=f_swap)


# -- level scheduling ------------------------------------------------------

@dataclass(frozen=True)
class LevelSchedule:
    """Tasks grouped into dependency levels, each level at most capacity wide."""

    levels: tuple[tuple[int, ...], ...]
    level_of: dict[int, int]
    capacity: int

    @property
    def n_levels(self) -> int:
        return len(self.levels)


def compute_levels(graph: TaskGraph, arch: Architecture) -> LevelSchedule:
    """Assign every task an as-soon-as-possible dependency level, then
    defer tasks off levels that exceed the unit count.

    ASAP level = longest ordering-edge path from any source, with the two
    halves of a gate pair merged (they always share a level and count two
    toward capacity).  When a level overflows, the groups with the largest
    task ids move to the next level, one at a time; any successor that
    would no longer run strictly after its predecessor is pushed further
    down, cascading.
    """
    capacity = arch.n_units
    groups = graph.groups()
    if not groups:
        return LevelSchedule((), {}, capacity)
    sizes = {rep: len(members) for rep, members in groups.items()}
    if capacity < 1 or max(sizes.values()) > capacity:
        raise CapacityError(
            f"architecture with {capacity} unit(s) cannot hold a "
            f"{max(sizes.values()) if sizes else 0}-task group")

    succs: dict[int, set[int]] = {rep: set() for rep in groups}
    indeg = {rep: 0 for rep in groups}
    for gs, gd, _ in graph._condensed_edges():
        if gd not in succs[gs]:
            succs[gs].add(gd)
            indeg[gd] += 1

    level: dict[int, int] = {}
    ready = sorted(rep for rep in groups if indeg[rep] == 0)
    pending = dict(indeg)
    order = []
    while ready:
        g = ready.pop()
        order.append(g)
        level[g] = 0
        for s in succs[g]:
            pending[s] -= 1
            if pending[s] == 0:
                ready.append(s)
    preds: dict[int, list[int]] = {rep: [] for rep in groups}
    for gs in succs:
        for gd in succs[gs]:
            preds[gd].append(gs)
    for g in order:
        if preds[g]:
            level[g] = max(level[p] for p in preds[g]) + 1

    key = {rep: max(members) for rep, members in groups.items()}

    def push_down(start, new_level):
        stack = [(start, new_level)]
        while stack:
            g, lv = stack.pop()
            if level[g] >= lv:
                continue
            level[g] = lv
            for s in succs[g]:
                if level[s] <= lv:
                    stack.append((s, lv + 1))

    lvl = 0
    while lvl <= max(level.values()):
        members = [g for g, l in level.items() if l == lvl]
        total = sum(sizes[g] for g in members)
        while total > capacity:
            victim = max(members, key=lambda g: key[g])
            members.remove(victim)
            total -= sizes[victim]
            level[victim] = lvl + 1
            for s in succs[victim]:
                if level[s] <= lvl + 1:
                    push_down(s, lvl + 2)
        lvl += 1

    max_lvl = max(level.values())
    buckets: list[list[int]] = [[] for _ in range(max_lvl + 1)]
    for rep, lv in level.items():
        buckets[lv].extend(groups[rep])
    levels = tuple(tuple(sorted(b)) for b in buckets if b)
    level_of = {t: i for i, lv in enumerate(levels) for t in lv}
    return LevelSchedule(levels, level_of, capacity)
