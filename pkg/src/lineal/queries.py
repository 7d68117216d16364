"""Linked-selection operators over dependence graphs.

Four primitive operators answer questions between the two ends of a
graph.  For a selection X of sources and Y of sinks:

* ``demanded_by(X)``: sinks whose values used something in X.
* ``demands(Y)``: sources that were used in computing something in Y.
* ``suffices(X)``: sinks computable from X alone.
* ``only_needed_for(Y)``: sources that contribute to nothing outside Y.

``demanded_by``/``demands`` are the image/preimage of the source-sink
relation, and ``suffices``/``only_needed_for`` are their De Morgan duals
(complement, apply, complement).  Each operator has a direct frontier
algorithm and an alternative route through the dual of its partner;
tests hold all routes to the relation-level oracles in this module.

The frontier algorithms move whole edge bundles between three zones:
the slice H already known to be induced by X, a pending zone P, and the
rest of the graph G.  In debug mode the zones are materialized and a
partition invariant is checked after every move: H, P, G partition the
original edges, and no remaining edge points into a vertex of H.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .core import Address, LinealError
from .graph import DepGraph, Relation, io_relation, opposite


class QueryError(LinealError):
    """A query was malformed independent of any particular graph."""


class UniverseError(QueryError):
    """A selection lay outside the universe an operator draws from."""


class BudgetError(QueryError):
    """An exhaustive check would exceed its enumeration budget."""


Sel = frozenset[Address]


def _as_sel(xs: Iterable[Address]) -> Sel:
    return xs if isinstance(xs, frozenset) else frozenset(xs)


def _require_subset(xs: Sel, universe: frozenset[Address], side: str) -> None:
    if not xs <= universe:
        stray = sorted(xs - universe)[:5]
        raise UniverseError(f"selection {stray} is not within the {side} universe")


# ---------------------------------------------------------------------------
# relation-level operators (the oracle layer)


def image(r: Relation, xs: Iterable[Address]) -> Sel:
    xs = _as_sel(xs)
    _require_subset(xs, r.left, "left")
    return frozenset(b for a, b in r.pairs if a in xs)


def preimage(r: Relation, ys: Iterable[Address]) -> Sel:
    ys = _as_sel(ys)
    _require_subset(ys, r.right, "right")
    return frozenset(a for a, b in r.pairs if b in ys)


def dual_image(r: Relation, xs: Iterable[Address]) -> Sel:
    """Right elements reached only from inside xs (or not at all)."""
    xs = _as_sel(xs)
    _require_subset(xs, r.left, "left")
    blocked = frozenset(b for a, b in r.pairs if a not in xs)
    return r.right - blocked

def dual_preimage(r: Relation, ys: Iterable[Address]) -> Sel:
    """Left elements that reach only into ys (or nothing at all)."""
    ys = _as_sel(ys)
    _require_subset(ys, r.right, "right")
    blocked = frozenset(a for a, b in r.pairs if b not in ys)
    return r.left - blocked


# ---------------------------------------------------------------------------
# selection functions and their De Morgan duals


@dataclass(frozen=True)
class SelectionFn:
    """A monotone map between powersets with explicit universes."""

    fn: Callable[[Sel], Sel]
    domain: frozenset[Address]
    codomain: frozenset[Address]
    name: str = ""

    def __call__(self, xs: Iterable[Address]) -> Sel:
        xs = _as_sel(xs)
        _require_subset(xs, self.domain, "domain")
        out = self.fn(xs)
        _require_subset(out, self.codomain, "codomain")
        return out


def de_morgan_dual(f: SelectionFn) -> SelectionFn:
    """Complement, apply, complement: the involutive dual of f."""

    def dual(xs: Sel) -> Sel:
        return f.codomain - f(f.domain - xs)

    return SelectionFn(dual, f.domain, f.codomain, name=f"dual({f.name or 'f'})")


# ---------------------------------------------------------------------------
# frontier algorithms


class _Zones:
    """Materialized H/P/G edge zones, for debug-mode invariant checks."""

    def __init__(self, g: DepGraph, xs: Sel):
        self.all_edges = frozenset(g.edges())
        self.h_edges: set[tuple[Address, Address]] = set()
        self.p_edges: set[tuple[Address, Address]] = set()
        self.g_edges: set[tuple[Address, Address]] = set(self.all_edges)
        self.h_vertices: set[Address] = set(xs)

    def move_to_pending(self, edges: Iterable[tuple[Address, Address]]) -> None:
        for e in edges:
            assert e in self.g_edges, f"edge {e} moved twice"
            self.g_edges.discard(e)
            self.p_edges.add(e)
        self.check()

    def move_to_slice(self, vertex: Address, edges: Iterable[tuple[Address, Address]]) -> None:
        for e in edges:
            assert e in self.p_edges, f"edge {e} extended before pending"
            self.p_edges.discard(e)
            self.h_edges.add(e)
        self.h_vertices.add(vertex)
        self.check()

    def check(self) -> None:
        assert self.h_edges | self.p_edges | self.g_edges == self.all_edges
        assert not (self.h_edges & self.p_edges)
        assert not (self.h_edges & self.g_edges)
        assert not (self.p_edges & self.g_edges)
        for _, b in self.p_edges | self.g_edges:
            assert b not in self.h_vertices, f"edge into settled vertex {b}"


def demanded_by(
    g: DepGraph, xs: Iterable[Address], *, debug: bool = False
) -> Sel:
    """Sinks whose computation consumed anything selected in ``xs``."""
    sel, _ = _demanded_by_run(g, xs, collect=False, debug=debug)
    return sel


def demanded_by_slice(
    g: DepGraph, xs: Iterable[Address]
) -> tuple[Sel, DepGraph]:
    """As :func:`demanded_by`, also materializing the slice it explored."""
    sel, edges = _demanded_by_run(g, xs, collect=True, debug=False)
    assert edges is not None
    return sel, DepGraph.from_edges(edges, _as_sel(xs) | {v for e in edges for v in e})


def _demanded_by_run(
    g: DepGraph, xs: Iterable[Address], collect: bool, debug: bool
) -> tuple[Sel, Optional[list[tuple[Address, Address]]]]:
    xs = _as_sel(xs)
    _require_subset(xs, g.sources(), "source")
    slice_edges: Optional[list[tuple[Address, Address]]] = [] if collect else None
    moved: Optional[set[tuple[Address, Address]]] = set() if debug else None
    visited: set[Address] = set(xs)
    queue: deque[Address] = deque(xs)
    while queue:
        a = queue.popleft()
        outs = g.fwd[a]
        if debug:
            assert moved is not None
            bundle = {(a, b) for b in outs}
            assert not bundle & moved, "an edge bundle was traversed twice"
            moved |= bundle
        if collect and slice_edges is not None:
            slice_edges.extend((a, b) for b in outs)
        for b in outs:
            if b not in visited:
                visited.add(b)
                queue.append(b)
    if debug:
        assert moved is not None
        untouched = frozenset(g.edges()) - moved
        assert all(a not in visited for a, _ in untouched), (
            "slice and remainder do not partition the graph"
        )
    answer = frozenset(
        v for v in visited if not g.fwd[v] and not (v in xs and not g.bwd[v])
    )
    return answer, slice_edges


def suffices(g: DepGraph, xs: Iterable[Address], *, debug: bool = False) -> Sel:
    """Sinks computable from the selected sources alone."""
    sel, _ = _suffices_run(g, xs, collect=False, debug=debug)
    return sel


def suffices_slice(g: DepGraph, xs: Iterable[Address]) -> tuple[Sel, DepGraph]:
    sel, edges = _suffices_run(g, xs, collect=True, debug=False)
    assert edges is not None
    return sel, DepGraph.from_edges(edges, _as_sel(xs) | {v for e in edges for v in e})


def _suffices_run(
    g: DepGraph, xs: Iterable[Address], collect: bool, debug: bool
) -> tuple[Sel, Optional[list[tuple[Address, Address]]]]:
    xs = _as_sel(xs)
    _require_subset(xs, g.sources(), "source")
    zones = _Zones(g, xs) if debug else None
    remaining_in = {v: len(ins) for v, ins in g.bwd.items()}
    pending_in: dict[Address, int] = {}
    settled: set[Address] = set(xs)
    slice_edges: Optional[list[tuple[Address, Address]]] = [] if collect else None
    queue: deque[Address] = deque(xs)
    while queue:
        a = queue.popleft()
        outs = g.fwd[a]
        if zones is not None:
            zones.move_to_pending((a, b) for b in outs)
        for b in outs:
            remaining_in[b] -= 1
            pending_in[b] = pending_in.get(b, 0) + 1
            if remaining_in[b] == 0 and pending_in[b] > 0:
                if zones is not None:
                    zones.move_to_slice(b, ((c, b) for c in g.bwd[b]))
                if collect and slice_edges is not None:
                    slice_edges.extend((c, b) for c in g.bwd[b])
                settled.add(b)
                queue.append(b)
    sinks = g.sinks()
    answer = frozenset(v for v in settled if v in sinks) | g.isolated()
    return answer, slice_edges


def demands(g: DepGraph, ys: Iterable[Address], *, debug: bool = False) -> Sel:
    """Sources consumed, directly or not, by the selected sinks."""
    return demanded_by(opposite(g), ys, debug=debug)


def only_needed_for(g: DepGraph, ys: Iterable[Address], *, debug: bool = False) -> Sel:
    """Sources whose every contribution lands inside the selected sinks."""
    return suffices(opposite(g), ys, debug=debug)


# -- alternative routes through the dual operator ---------------------------


def demanded_by_via_dual(g: DepGraph, xs: Iterable[Address]) -> Sel:
    xs = _as_sel(xs)
    _require_subset(xs, g.sources(), "source")
    return g.sinks() - suffices(g, g.sources() - xs)


def suffices_via_dual(g: DepGraph, xs: Iterable[Address]) -> Sel:
    xs = _as_sel(xs)
    _require_subset(xs, g.sources(), "source")
    return g.sinks() - demanded_by(g, g.sources() - xs)


def demands_via_dual(g: DepGraph, ys: Iterable[Address]) -> Sel:
    return demanded_by_via_dual(opposite(g), ys)


def only_needed_for_via_dual(g: DepGraph, ys: Iterable[Address]) -> Sel:
    return suffices_via_dual(opposite(g), ys)


# -- composite round trips ---------------------------------------------------


def linked_inputs(g: DepGraph, xs: Iterable[Address]) -> Sel:
    """Sources cognate to xs: they feed some output that xs also feeds."""
    return demands(g, demanded_by(g, xs))


def linked_outputs(g: DepGraph, ys: Iterable[Address]) -> Sel:
    """Sinks cognate to ys: they consume some input that ys also consumes."""
    return demanded_by(g, demands(g, ys))


# -- selection-function views -------------------------------------------------


def demanded_by_fn(g: DepGraph) -> SelectionFn:
    return SelectionFn(lambda xs: demanded_by(g, xs), g.sources(), g.sinks(), "demandedBy")


def demands_fn(g: DepGraph) -> SelectionFn:
    return SelectionFn(lambda ys: demands(g, ys), g.sinks(), g.sources(), "demands")


def suffices_fn(g: DepGraph) -> SelectionFn:
    return SelectionFn(lambda xs: suffices(g, xs), g.sources(), g.sinks(), "suffices")


def only_needed_for_fn(g: DepGraph) -> SelectionFn:
    return SelectionFn(
        lambda ys: only_needed_for(g, ys), g.sinks(), g.sources(), "onlyNeededFor"
    )


# ---------------------------------------------------------------------------
# brute-force oracle

QUERY_OPS = (
    "demands",
    "demandedBy",
    "suffices",
    "dualPreimage",
    "linkedInputs",
    "linkedOutputs",
)


def oracle_query(g: DepGraph, op: str, sel: Iterable[Address]) -> Sel:
    """Answer a query by materializing the full source-sink relation.

    Exponentially dumber than the frontier algorithms but independent of
    them; the test suite holds every fast path to this answer, and it
    doubles as a fallback for small graphs.
    """
    r = io_relation(g)
    sel = _as_sel(sel)
    if op == "demandedBy":
        return image(r, sel)
    if op == "demands":
        return preimage(r, sel)
    if op == "suffices":
        return dual_image(r, sel)
    if op == "dualPreimage":
        return dual_preimage(r, sel)
    if op == "linkedInputs":
        return preimage(r, image(r, sel))
    if op == "linkedOutputs":
        return image(r, preimage(r, sel))
    raise QueryError(f"unknown query operator {op!r}")


def run_query(g: DepGraph, op: str, sel: Iterable[Address]) -> Sel:
    """Dispatch one of the named operators to its frontier algorithm."""
    if op == "demandedBy":
        return demanded_by(g, sel)
    if op == "demands":
        return demands(g, sel)
    if op == "suffices":
        return suffices(g, sel)
    if op == "dualPreimage":
        return only_needed_for(g, sel)
    if op == "linkedInputs":
        return linked_inputs(g, sel)
    if op == "linkedOutputs":
        return linked_outputs(g, sel)
    raise QueryError(f"unknown query operator {op!r}")


# ---------------------------------------------------------------------------
# exhaustive algebra checks


def _subsets(universe: frozenset[Address]) -> Iterable[Sel]:
    items = sorted(universe)
    for mask in range(1 << len(items)):
        yield frozenset(items[i] for i in range(len(items)) if mask >> i & 1)


def _check_budget(left: frozenset[Address], right: frozenset[Address], budget: int) -> None:
    pairs = (1 << len(left)) * (1 << len(right))
    if pairs > budget:
        raise BudgetError(
            f"{pairs} subset pairs exceed the enumeration budget of {budget}"
        )


def check_conjugate(
    f: Callable[[Sel], Sel],
    g: Callable[[Sel], Sel],
    universe_left: frozenset[Address],
    universe_right: frozenset[Address],
    budget: int = 1 << 12,
) -> bool:
    """Exhaustively test: f(X) meets Y exactly when X meets g(Y)."""
    _check_budget(universe_left, universe_right, budget)
    f_of = {xs: f(xs) for xs in _subsets(universe_left)}
    g_of = {ys: g(ys) for ys in _subsets(universe_right)}
    for xs, fx in f_of.items():
        for ys, gy in g_of.items():
            if bool(fx & ys) != bool(xs & gy):
                return False
    return True


def check_galois(
    f: Callable[[Sel], Sel],
    g: Callable[[Sel], Sel],
    universe_left: frozenset[Address],
    universe_right: frozenset[Address],
    ordering: str = "monotone",
    budget: int = 1 << 12,
) -> bool:
    """Exhaustively test a (monotone or antitone) adjunction between f and g."""
    if ordering not in ("monotone", "antitone"):
        raise QueryError(f"unknown ordering {ordering!r}")
    _check_budget(universe_left, universe_right, budget)
    f_of = {xs: f(xs) for xs in _subsets(universe_left)}
    g_of = {ys: g(ys) for ys in _subsets(universe_right)}
    for xs, fx in f_of.items():
        for ys, gy in g_of.items():
            lhs = fx <= ys
            rhs = xs <= gy if ordering == "monotone" else gy <= xs
            if lhs != rhs:
                return False
    return True
