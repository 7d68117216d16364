"""Dependence graphs and selections over their endpoints.

A dependence graph is a DAG over integer addresses.  An edge (a, b) means
the value at b was computed using the value at a.  Sources (no in-edges)
are where data enters a computation, sinks (no out-edges) are where it
comes to rest; an isolated vertex counts as both.  Both edge directions
are stored so forward and backward walks cost the same.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .core import Address, LinealError


class GraphError(LinealError):
    """A graph operation was applied outside its domain."""


Edge = tuple[Address, Address]

_EMPTY: frozenset[Address] = frozenset()


class DepGraph:
    """Immutable directed acyclic graph over addresses.

    ``fwd`` and ``bwd`` are exact transposes of one another; every vertex
    appears as a key in both, so membership tests never need a default.
    """

    __slots__ = ("fwd", "bwd", "_sources", "_sinks", "_n_edges")

    def __init__(
        self,
        fwd: dict[Address, frozenset[Address]],
        bwd: dict[Address, frozenset[Address]],
    ):
        self.fwd = fwd
        self.bwd = bwd
        self._sources: Optional[frozenset[Address]] = None
        self._sinks: Optional[frozenset[Address]] = None
        self._n_edges: Optional[int] = None

    # -- construction ------------------------------------------------------

    @staticmethod
    def from_edges(
        edges: Iterable[Edge], vertices: Iterable[Address] = ()
    ) -> "DepGraph":
        fwd: dict[Address, set[Address]] = {v: set() for v in vertices}
        bwd: dict[Address, set[Address]] = {v: set() for v in fwd}
        for a, b in edges:
            fwd.setdefault(a, set()).add(b)
            fwd.setdefault(b, set())
            bwd.setdefault(b, set()).add(a)
            bwd.setdefault(a, set())
        g = DepGraph(
            {v: frozenset(s) for v, s in fwd.items()},
            {v: frozenset(s) for v, s in bwd.items()},
        )
        g._check_acyclic()
        return g

    @staticmethod
    def empty() -> "DepGraph":
        return DepGraph({}, {})

    def _check_acyclic(self) -> None:
        order = topological_order(self)
        if order is None:
            raise GraphError("graph contains a cycle")

    # -- basic views -------------------------------------------------------

    @property
    def vertices(self) -> frozenset[Address]:
        return frozenset(self.fwd)

    def __contains__(self, v: Address) -> bool:
        return v in self.fwd

    def vertex_count(self) -> int:
        return len(self.fwd)

    def edge_count(self) -> int:
        if self._n_edges is None:
            self._n_edges = sum(len(s) for s in self.fwd.values())
        return self._n_edges

    def edges(self) -> Iterator[Edge]:
        for a in self.fwd:
            for b in self.fwd[a]:
                yield (a, b)

    def out_edges(self, v: Address) -> frozenset[Edge]:
        if v not in self.fwd:
            raise GraphError(f"vertex {v} not in graph")
        return frozenset((v, b) for b in self.fwd[v])

    def in_edges(self, v: Address) -> frozenset[Edge]:
        if v not in self.bwd:
            raise GraphError(f"vertex {v} not in graph")
        return frozenset((a, v) for a in self.bwd[v])

    def sources(self) -> frozenset[Address]:
        if self._sources is None:
            self._sources = frozenset(v for v, ins in self.bwd.items() if not ins)
        return self._sources

    def sinks(self) -> frozenset[Address]:
        if self._sinks is None:
            self._sinks = frozenset(v for v, outs in self.fwd.items() if not outs)
        return self._sinks

    def isolated(self) -> frozenset[Address]:
        return frozenset(
            v for v in self.fwd if not self.fwd[v] and not self.bwd[v]
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DepGraph):
            return NotImplemented
        return self.fwd == other.fwd

    def __hash__(self) -> int:  # pragma: no cover - graphs rarely keyed
        return hash(frozenset((v, s) for v, s in self.fwd.items()))

    def __repr__(self) -> str:
        return f"DepGraph({self.vertex_count()} vertices, {self.edge_count()} edges)"


def opposite(g: DepGraph) -> DepGraph:
    """The same graph with every edge reversed.  Constant time."""
    return DepGraph(g.bwd, g.fwd)


def in_star(demand: frozenset[Address] | set[Address], target: Address) -> DepGraph:
    """A star of edges from each demanded address into one fresh vertex."""
    if target in demand:
        raise GraphError(f"degenerate star: {target} is among its own dependencies")
    fwd: dict[Address, frozenset[Address]] = {v: frozenset({target}) for v in demand}
    fwd[target] = _EMPTY
    bwd: dict[Address, frozenset[Address]] = {v: _EMPTY for v in demand}
    bwd[target] = frozenset(demand)
    return DepGraph(fwd, bwd)


def union(g: DepGraph, h: DepGraph, disjoint_edges: bool = False) -> DepGraph:
    """Union of vertices and edges; optionally insist the edge sets are disjoint."""
    fwd: dict[Address, set[Address]] = {v: set(s) for v, s in g.fwd.items()}
    overlap: list[Edge] = []
    for v, s in h.fwd.items():
        if v in fwd:
            if disjoint_edges and fwd[v] & s:
                overlap.extend((v, b) for b in sorted(fwd[v] & s))
            fwd[v] |= s
        else:
            fwd[v] = set(s)
    if overlap:
        raise GraphError(f"edge sets overlap: {overlap[:5]}")
    bwd: dict[Address, set[Address]] = {v: set() for v in fwd}
    for a, succ in fwd.items():
        for b in succ:
            bwd[b].add(a)
    out = DepGraph(
        {v: frozenset(s) for v, s in fwd.items()},
        {v: frozenset(s) for v, s in bwd.items()},
    )
    out._check_acyclic()
    return out


def remove_edges(g: DepGraph, edges: Iterable[Edge]) -> DepGraph:
    """Drop the given edges, keeping all vertices in place."""
    fwd = {v: set(s) for v, s in g.fwd.items()}
    bwd = {v: set(s) for v, s in g.bwd.items()}
    for a, b in edges:
        if a not in fwd or b not in fwd[a]:
            raise GraphError(f"edge ({a}, {b}) not in graph")
        fwd[a].discard(b)
        bwd[b].discard(a)
    return DepGraph(
        {v: frozenset(s) for v, s in fwd.items()},
        {v: frozenset(s) for v, s in bwd.items()},
    )


def topological_order(g: DepGraph) -> Optional[list[Address]]:
    """Kahn's algorithm; None if the graph has a cycle."""
    indeg = {v: len(ins) for v, ins in g.bwd.items()}
    ready = deque(sorted(v for v, d in indeg.items() if d == 0))
    order: list[Address] = []
    while ready:
        v = ready.popleft()
        order.append(v)
        for b in g.fwd[v]:
            indeg[b] -= 1
            if indeg[b] == 0:
                ready.append(b)
    return order if len(order) == len(indeg) else None


def descendants(g: DepGraph, start: Iterable[Address]) -> frozenset[Address]:
    """Vertices reachable from ``start`` by zero or more edges."""
    seen: set[Address] = set()
    stack = [v for v in start]
    for v in stack:
        if v not in g.fwd:
            raise GraphError(f"vertex {v} not in graph")
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        stack.extend(b for b in g.fwd[v] if b not in seen)
    return frozenset(seen)


def reachability(g: DepGraph) -> frozenset[Edge]:
    """Reflexive transitive closure of the edge relation.

    Materializes every pair, so this is a test oracle and a slow path,
    not something to call on evaluator-sized graphs.
    """
    order = topological_order(g)
    if order is None:
        raise GraphError("reachability undefined on cyclic graph")
    reach: dict[Address, frozenset[Address]] = {}
    for v in reversed(order):
        acc: set[Address] = {v}
        for b in g.fwd[v]:
            acc |= reach[b]
        reach[v] = frozenset(acc)
    return frozenset((a, b) for a, s in reach.items() for b in s)


# ---------------------------------------------------------------------------
# selections and relations


@dataclass(frozen=True)
class Selection:
    """A subset of a declared universe of addresses.

    ``kind`` names which universe the members live in so that mismatched
    compositions fail loudly instead of silently answering over the
    wrong endpoint set.
    """

    members: frozenset[Address]
    universe: frozenset[Address]
    kind: str  # "sources" | "sinks" | "all"

    def __post_init__(self) -> None:
        if not self.members <= self.universe:
            stray = sorted(self.members - self.universe)[:5]
            raise GraphError(f"selection members {stray} outside its universe")

    def complement(self) -> "Selection":
        return Selection(self.universe - self.members, self.universe, self.kind)

    @staticmethod
    def of_sources(g: DepGraph, members: Iterable[Address]) -> "Selection":
        return Selection(frozenset(members), g.sources(), "sources")

    @staticmethod
    def of_sinks(g: DepGraph, members: Iterable[Address]) -> "Selection":
        return Selection(frozenset(members), g.sinks(), "sinks")


@dataclass(frozen=True)
class Relation:
    """A relation between two finite universes, stored as explicit pairs."""

    pairs: frozenset[Edge]
    left: frozenset[Address]
    right: frozenset[Address]

    def __post_init__(self) -> None:
        for a, b in self.pairs:
            if a not in self.left or b not in self.right:
                raise GraphError(f"pair ({a}, {b}) outside the declared universes")

    def converse(self) -> "Relation":
        return Relation(frozenset((b, a) for a, b in self.pairs), self.right, self.left)


def io_relation(g: DepGraph) -> Relation:
    """Which sources feed which sinks, via at least one edge.

    An isolated vertex sits in both universes but is related to nothing,
    not even itself: it feeds no computation and nothing feeds it.
    """
    srcs = g.sources()
    snks = g.sinks()
    pairs: set[Edge] = set()
    for s in srcs:
        if not g.fwd[s]:
            continue
        for t in descendants(g, [s]):
            if t in snks:
                pairs.add((s, t))
    return Relation(frozenset(pairs), srcs, snks)


# ---------------------------------------------------------------------------
# text formats


def to_edge_list(g: DepGraph) -> str:
    """Line-oriented format: a vertex header, then one `src dst` per line."""
    lines = ["vertices " + " ".join(str(v) for v in sorted(g.fwd))]
    for a in sorted(g.fwd):
        for b in sorted(g.fwd[a]):
            lines.append(f"{a} {b}")
    return "\n".join(lines) + "\n"


def from_edge_list(text: str) -> DepGraph:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("vertices"):
        raise GraphError("edge list must begin with a 'vertices' header")
    vertices = [int(tok) for tok in lines[0].split()[1:]]
    edges: list[Edge] = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphError(f"malformed edge line: {ln!r}")
        edges.append((int(parts[0]), int(parts[1])))
    g = DepGraph.from_edges(edges, vertices)
    extra = {a for a, _ in edges} | {b for _, b in edges}
    if not extra <= set(vertices):
        raise GraphError("edge endpoints missing from the vertex header")
    return g


def to_dot(g: DepGraph, labels: Optional[dict[Address, str]] = None) -> str:
    """Graphviz rendering; labels default to the raw addresses."""
    out = ["digraph dependence {"]
    for v in sorted(g.fwd):
        label = labels.get(v, str(v)) if labels else str(v)
        safe = label.replace("\\", "\\\\").replace('"', '\\"')
        out.append(f'  n{v} [label="{safe}"];')
    for a in sorted(g.fwd):
        for b in sorted(g.fwd[a]):
            out.append(f"  n{a} -> n{b};")
    out.append("}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# mutable builder used by the evaluator


class GraphBuilder:
    """Accumulates vertices and in-star edge bundles, then freezes.

    The evaluator only ever adds a fresh vertex with edges from already
    existing vertices, which keeps the result acyclic by construction,
    so freezing skips the cycle check.  Labels are a side table of short
    human-readable vertex descriptions; they never affect the graph.
    """

    __slots__ = ("fwd", "bwd", "labels")

    def __init__(self) -> None:
        self.fwd: dict[Address, set[Address]] = {}
        self.bwd: dict[Address, set[Address]] = {}
        self.labels: dict[Address, str] = {}

    def add_vertex(self, v: Address) -> None:
        if v in self.fwd:
            raise GraphError(f"vertex {v} allocated twice")
        self.fwd[v] = set()
        self.bwd[v] = set()

    def note_label(self, v: Address, label: str) -> None:
        self.labels[v] = label

    def add_in_star(self, demand: Iterable[Address], target: Address) -> None:
        self.add_vertex(target)
        tgt_in = self.bwd[target]
        for a in demand:
            if a == target:
                raise GraphError(f"degenerate star: {target} depends on itself")
            if a not in self.fwd:
                raise GraphError(f"edge from unallocated vertex {a}")
            self.fwd[a].add(target)
            tgt_in.add(a)

    def freeze(self) -> DepGraph:
        return DepGraph(
            {v: frozenset(s) for v, s in self.fwd.items()},
            {v: frozenset(s) for v, s in self.bwd.items()},
        )
