"""Preference graph of a zero-sum game and its condensation.

Nodes are pure profiles.  For every comparable pair {p, q} there is an arc
p -> q exactly when weight(p, q) <= 0, i.e. the arc points at the profile the
deviating player weakly prefers; a tie yields the antiparallel pair of
zero-weight arcs.  Arc weights are |weight(p, q)| as exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple

from .game import Game, Profile, weight


class Arc(NamedTuple):
    src: Profile
    dst: Profile
    weight: Fraction


class SinkUniquenessError(RuntimeError):
    """The condensation has no unique sink component."""

    def __init__(self, message: str, components: list[frozenset]) -> None:
        super().__init__(message)
        self.components = components


@dataclass(frozen=True)
class PreferenceGraph:
    nodes: tuple[Profile, ...]
    arcs: tuple[Arc, ...]
    symmetric: bool
    node_names: tuple[str, ...]

    def name_of(self, p: Profile) -> str:
        return self.node_names[self.nodes.index(p)]


@dataclass(frozen=True)
class SccPartition:
    """Condensation of a preference graph.

    Components are numbered by the smallest row-major position of any
    contained node, so the numbering is deterministic.
    """

    components: tuple[frozenset, ...]
    component_of: dict
    edges: frozenset  # (src component, dst component), src != dst
    sinks: tuple[int, ...] = field(default=())


def _comparable_pairs(g: Game) -> Iterable[tuple[Profile, Profile]]:
    # Row-major in the first element; same-row partners before same-column.
    if g.symmetric:
        for s in range(g.n):
            for t in range(s + 1, g.n):
                yield s, t
        return
    for i in range(g.n):
        for j in range(g.m):
            for j2 in range(j + 1, g.m):
                yield (i, j), (i, j2)
            for i2 in range(i + 1, g.n):
                yield (i, j), (i2, j)


def build_graph(g: Game) -> PreferenceGraph:
    """Construct the preference graph of g."""
    nodes = tuple(g.profiles())
    arcs: list[Arc] = []
    for p, q in _comparable_pairs(g):
        w = weight(g, p, q)
        if w < 0:
            arcs.append(Arc(p, q, -w))
        elif w > 0:
            arcs.append(Arc(q, p, w))
        else:
            # Tied payoffs: a pair of zero-weight arcs in both directions.
            arcs.append(Arc(p, q, Fraction(0)))
            arcs.append(Arc(q, p, Fraction(0)))
    names = tuple(g.profile_name(p) for p in nodes)
    return PreferenceGraph(nodes, tuple(arcs), g.symmetric, names)


def _adjacency(pg: PreferenceGraph) -> dict:
    adj = {v: [] for v in pg.nodes}
    for a in pg.arcs:
        adj[a.src].append(a.dst)
    return adj


def scc(pg: PreferenceGraph) -> SccPartition:
    """Strongly connected components via Tarjan, with deterministic numbering."""
    adj = _adjacency(pg)
    index: dict = {}
    low: dict = {}
    onstack: set = set()
    stack: list = []
    raw: list[frozenset] = []
    counter = 0

    for root in pg.nodes:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        onstack.add(root)
        work = [(root, iter(adj[root]))]
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    onstack.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                if w in onstack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    onstack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                raw.append(frozenset(comp))

    position = {v: k for k, v in enumerate(pg.nodes)}
    ordered = tuple(sorted(raw, key=lambda c: min(position[v] for v in c)))
    component_of = {v: k for k, comp in enumerate(ordered) for v in comp}
    edges = frozenset(
        (component_of[a.src], component_of[a.dst])
        for a in pg.arcs
        if component_of[a.src] != component_of[a.dst]
    )
    has_out = {src for src, _ in edges}
    sinks = tuple(k for k in range(len(ordered)) if k not in has_out)
    return SccPartition(ordered, component_of, edges, sinks)


def sink_component(pg: PreferenceGraph) -> frozenset:
    """The unique sink component's node set; raises if the sink is not unique."""
    part = scc(pg)
    if len(part.sinks) != 1:
        offenders = [part.components[k] for k in part.sinks]
        raise SinkUniquenessError(
            f"expected exactly one sink component, found {len(part.sinks)}",
            offenders,
        )
    return part.components[part.sinks[0]]


def is_strongly_connected(pg: PreferenceGraph, subset: Iterable[Profile]) -> bool:
    """Whether the subgraph induced by subset is strongly connected."""
    nodes = frozenset(subset)
    if not nodes:
        raise ValueError("strong connectivity is undefined for the empty set")
    for v in nodes:
        if v not in pg.nodes:
            raise ValueError(f"{v!r} is not a node of the graph")
    fwd = {v: [] for v in nodes}
    rev = {v: [] for v in nodes}
    for a in pg.arcs:
        if a.src in nodes and a.dst in nodes:
            fwd[a.src].append(a.dst)
            rev[a.dst].append(a.src)
    start = next(iter(nodes))

    def reaches_all(adj) -> bool:
        seen = {start}
        frontier = [start]
        while frontier:
            v = frontier.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    frontier.append(w)
        return len(seen) == len(nodes)

    return reaches_all(fwd) and reaches_all(rev)


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(pg: PreferenceGraph, highlight: Iterable[Profile] = ()) -> str:
    """Deterministic DOT rendering; highlighted nodes are shaded."""
    marked = frozenset(highlight)
    names = dict(zip(pg.nodes, pg.node_names))
    lines = ["digraph preference_graph {"]
    for v in pg.nodes:
        attr = " [style=filled, fillcolor=lightgrey]" if v in marked else ""
        lines.append(f"  {_quote(names[v])}{attr};")
    for a in pg.arcs:
        lines.append(
            f"  {_quote(names[a.src])} -> {_quote(names[a.dst])} [label={_quote(str(a.weight))}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
