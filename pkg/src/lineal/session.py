"""Sessions: one evaluated program, its graph, and the path↔address maps.

A session is what the CLI and the HTTP service both hand out: the result
value, the dependence graph, a map from textual paths (``data[0].co2e``,
``out[1]``) to addresses so selections can be made from outside, and a
view description (tables and charts) derived from the result by naming
conventions.
"""

from __future__ import annotations

import json
import os
import sys
import threading
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from . import desugar, surface
from .core import (
    Address,
    Env,
    LinealError,
    Value,
    VCtor,
    VFloat,
    VInt,
    VRecord,
    VStr,
    base_constructors,
    erase,
    plain_text,
    validate,
)
from .datasets import Datum, build_value
from .graph import DepGraph, GraphBuilder, from_edge_list, to_edge_list
from .interp import (
    Allocator,
    EvalContext,
    base_foreigns,
    eval_expr,
    foreign_sig,
    prelude_bindings,
)

META_VERSION = 1

# evaluation recurses with the program, so deep lists need room
STACK_BYTES = 256 * 1024 * 1024
RECURSION_LIMIT = 200_000


class SessionError(LinealError):
    """Program/dataset mismatch or a malformed session directory."""


@dataclass(frozen=True)
class PathEntry:
    """One addressable part of a dataset or of the result."""

    path: str
    addr: Address
    kind: str  # "cell" for scalar leaves, "node" for structure

    def line(self) -> str:
        return f"{self.addr}\t{self.kind}\t{self.path}"


def enumerate_paths(v: Value, base: str) -> list[PathEntry]:
    """Walk a value, assigning one textual path per part.

    Records use ``.field``, list elements ``[i]``, the list cell starting
    at element i ``[i:]``; other constructor arguments use ``@j``.
    Closure internals are not walked — a closure is one opaque part.
    """
    out: list[PathEntry] = []

    def walk(v: Value, path: str) -> None:
        raw = v.raw
        if isinstance(raw, (VInt, VFloat, VStr)):
            out.append(PathEntry(path, v.addr, "cell"))
        elif isinstance(raw, VRecord):
            out.append(PathEntry(path, v.addr, "node"))
            for name, fv in raw.fields:
                walk(fv, f"{path}.{name}")
        elif isinstance(raw, VCtor) and raw.name in ("Cons", "Nil"):
            i, cur = 0, v
            while isinstance(cur.raw, VCtor) and cur.raw.name == "Cons":
                out.append(PathEntry(f"{path}[{i}:]", cur.addr, "node"))
                walk(cur.raw.args[0], f"{path}[{i}]")
                cur = cur.raw.args[1]
                i += 1
            if isinstance(cur.raw, VCtor) and cur.raw.name == "Nil":
                out.append(PathEntry(f"{path}[{i}:]", cur.addr, "node"))
            else:
                walk(cur, f"{path}[{i}:]")
        elif isinstance(raw, VCtor):
            out.append(PathEntry(path, v.addr, "node"))
            for j, arg in enumerate(raw.args):
                walk(arg, f"{path}@{j}")
        else:
            out.append(PathEntry(path, v.addr, "node"))

    walk(v, base)
    return out


# ---------------------------------------------------------------------------
# views


def _scalar(v: Value) -> Union[int, float, str, None]:
    if isinstance(v.raw, (VInt, VFloat, VStr)):
        return v.raw.value
    return None


def _list_items(v: Value) -> Optional[list[Value]]:
    items: list[Value] = []
    cur = v
    while isinstance(cur.raw, VCtor) and cur.raw.name == "Cons":
        items.append(cur.raw.args[0])
        cur = cur.raw.args[1]
    if isinstance(cur.raw, VCtor) and cur.raw.name == "Nil":
        return items
    return None


def _record_fields(v: Value) -> Optional[dict[str, Value]]:
    if isinstance(v.raw, VRecord):
        return dict(v.raw.fields)
    return None


def _table(name: str, value: Value) -> Optional[dict]:
    rows = _list_items(value)
    if rows is None:
        return None
    columns: list[str] = []
    body: list[list[dict]] = []
    row_addrs: list[Address] = []
    for row in rows:
        rec = _record_fields(row)
        if rec is None:
            rec = {"value": row}
        if not columns:
            columns = sorted(rec)
        if sorted(rec) != columns:
            return None
        cells = []
        for col in columns:
            cv = rec[col]
            s = _scalar(cv)
            cells.append(
                {"addr": cv.addr, "value": s if s is not None else plain_text(erase(cv))}
            )
        body.append(cells)
        row_addrs.append(row.addr)
    return {
        "kind": "table",
        "name": name,
        "columns": columns,
        "rows": body,
        "row_addrs": row_addrs,
    }


def _points(items: list[Value]) -> Optional[list[dict]]:
    """Chart data: either numbers (x = index) or records with x and y."""
    pts = []
    for i, item in enumerate(items):
        s = _scalar(item)
        if isinstance(s, (int, float)):
            pts.append({"x": i, "y": s, "addr": item.addr})
            continue
        rec = _record_fields(item)
        if rec is None or "y" not in rec:
            return None
        y = _scalar(rec["y"])
        if not isinstance(y, (int, float)):
            return None
        x = _scalar(rec["x"]) if "x" in rec else i
        if x is None:
            return None
        pts.append({"x": x, "y": y, "addr": rec["y"].addr})
    return pts


def _bars(items: list[Value]) -> Optional[list[dict]]:
    bars = []
    for i, item in enumerate(items):
        s = _scalar(item)
        if isinstance(s, (int, float)):
            bars.append({"label": str(i), "y": s, "addr": item.addr})
            continue
        rec = _record_fields(item)
        if rec is None or "value" not in rec:
            return None
        y = _scalar(rec["value"])
        if not isinstance(y, (int, float)):
            return None
        label = _scalar(rec["label"]) if "label" in rec else i
        if label is None:
            return None
        bars.append({"label": str(label), "y": y, "addr": rec["value"].addr})
    return bars


_CHART_FIELDS = (("points", "line", _points), ("bars", "bar", _bars), ("scatter", "scatter", _points))


def _charts(result: Value) -> list[dict]:
    """Result rendering conventions, in order of preference:

    - record with a ``points`` field → line chart (``bars`` → bar chart,
      ``scatter`` → scatter chart), optional string ``caption``;
    - bare list of numbers → line chart over the index;
    - anything else → a plain value view.
    """
    rec = _record_fields(result)
    if rec is not None:
        charts = []
        caption = _scalar(rec["caption"]) if "caption" in rec else None
        for fname, kind, build in _CHART_FIELDS:
            if fname not in rec:
                continue
            items = _list_items(rec[fname])
            data = build(items) if items is not None else None
            if data is None:
                return [_value_view(result)]
            chart = {"kind": kind, "name": "out", "points": data}
            if isinstance(caption, str):
                chart["caption"] = caption
            charts.append(chart)
        if charts:
            return charts
        return [_value_view(result)]
    items = _list_items(result)
    if items is not None:
        data = _points(items)
        if data is not None and all(isinstance(p["x"], int) for p in data):
            return [{"kind": "line", "name": "out", "points": data}]
    return [_value_view(result)]


def _value_view(result: Value) -> dict:
    return {"kind": "value", "name": "out", "text": plain_text(erase(result))}


def build_view(result: Value, dataset_values: Mapping[str, Value]) -> dict:
    tables = []
    for name, value in dataset_values.items():
        t = _table(name, value)
        if t is not None:
            tables.append(t)
    return {"tables": tables, "charts": _charts(result)}


# ---------------------------------------------------------------------------
# running programs


@dataclass
class Session:
    source: Optional[str]
    result: Optional[Value]
    result_text: str
    graph: DepGraph
    labels: dict[Address, str]
    dataset_names: tuple[str, ...]
    input_entries: tuple[PathEntry, ...]
    output_entries: tuple[PathEntry, ...]
    view: dict
    # derived lookups, built in __post_init__
    input_paths: dict[str, Address] = field(init=False)
    output_paths: dict[str, Address] = field(init=False)
    input_path_of: dict[Address, str] = field(init=False)
    output_path_of: dict[Address, str] = field(init=False)
    input_cells: frozenset[Address] = field(init=False)
    output_universe: frozenset[Address] = field(init=False)

    def __post_init__(self) -> None:
        self.input_paths = {e.path: e.addr for e in self.input_entries}
        self.output_paths = {e.path: e.addr for e in self.output_entries}
        self.input_path_of = {}
        for e in self.input_entries:
            self.input_path_of.setdefault(e.addr, e.path)
        self.output_path_of = {}
        for e in self.output_entries:
            self.output_path_of.setdefault(e.addr, e.path)
        self.input_cells = frozenset(
            e.addr for e in self.input_entries if e.kind == "cell"
        )
        self.output_universe = frozenset(e.addr for e in self.output_entries)

    def resolve(self, spec: str) -> Address:
        """A selection spec is a path into a dataset or the output, or a
        raw vertex id."""
        if spec in self.input_paths:
            return self.input_paths[spec]
        if spec in self.output_paths:
            return self.output_paths[spec]
        try:
            addr = int(spec)
        except ValueError:
            raise SessionError(f"unknown selection path {spec!r}") from None
        if addr not in self.graph:
            raise SessionError(f"vertex {addr} is not in the graph")
        return addr

    def restrict(self, addrs: frozenset[Address], mode: str) -> frozenset[Address]:
        if mode == "inputs":
            return addrs & self.input_cells
        if mode == "outputs":
            return addrs & self.output_universe
        if mode == "none":
            return addrs
        raise SessionError(f"unknown restriction {mode!r}")

    def describe(self, addr: Address) -> str:
        path = self.input_path_of.get(addr) or self.output_path_of.get(addr) or "-"
        return f"{addr}\t{path}\t{self.labels.get(addr, '')}"


def _eval_in_big_stack(fn):
    """Evaluation recursion tracks program recursion, so run it on a
    thread with a large stack and a raised recursion limit."""
    result: list = []
    failure: list[BaseException] = []

    def target() -> None:
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(RECURSION_LIMIT)
        try:
            result.append(fn())
        except BaseException as err:  # re-raised on the calling thread
            failure.append(err)
        finally:
            sys.setrecursionlimit(limit)

    old = threading.stack_size(STACK_BYTES)
    try:
        worker = threading.Thread(target=target, name="lineal-eval")
        worker.start()
        worker.join()
    finally:
        threading.stack_size(old)
    if failure:
        raise failure[0]
    return result[0]


def run(source: str, datasets: Optional[Mapping[str, Datum]] = None) -> Session:
    """Parse, desugar, validate, load datasets, and evaluate.

    Dataset parts are allocated first (in declaration order, row-major
    within each dataset), then the prelude closures, then everything the
    program constructs — so address order replays exactly.
    """
    datasets = dict(datasets or {})
    prog = surface.parse(source)
    declared = list(prog.dataset_names())
    missing = [n for n in declared if n not in datasets]
    if missing:
        raise SessionError(f"dataset {missing[0]!r} declared but not provided")
    extra = [n for n in datasets if n not in declared]
    if extra:
        raise SessionError(f"dataset {extra[0]!r} provided but not declared")

    csig = base_constructors()
    fsig = foreign_sig()
    expr = desugar.desugar_program(prog, csig)
    problems = validate(expr, csig, fsig)
    if problems:
        raise SessionError("; ".join(problems))

    builder = GraphBuilder()
    alloc = Allocator()
    dataset_values: dict[str, Value] = {}
    input_entries: list[PathEntry] = []
    for name in declared:
        value = build_value(datasets[name], builder, alloc)
        dataset_values[name] = value
        input_entries.extend(enumerate_paths(value, name))

    impls = base_foreigns()
    env = Env().extend(prelude_bindings(builder, alloc, impls))
    if dataset_values:
        env = env.extend(dataset_values)
    ctx = EvalContext(env, frozenset(), builder, alloc, impls)
    result = _eval_in_big_stack(lambda: eval_expr(ctx, expr))

    graph = builder.freeze()
    output_entries = enumerate_paths(result, "out")
    view = build_view(result, dataset_values)
    return Session(
        source=source,
        result=result,
        result_text=plain_text(erase(result)),
        graph=graph,
        labels=dict(builder.labels),
        dataset_names=tuple(declared),
        input_entries=tuple(input_entries),
        output_entries=tuple(output_entries),
        view=view,
    )


# ---------------------------------------------------------------------------
# session directories


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def write_dir(session: Session, dirpath: str) -> None:
    os.makedirs(dirpath, exist_ok=True)
    _write(os.path.join(dirpath, "result.txt"), session.result_text + "\n")
    _write(os.path.join(dirpath, "graph.edges"), to_edge_list(session.graph))
    _write(
        os.path.join(dirpath, "inputs.map"),
        "".join(e.line() + "\n" for e in session.input_entries),
    )
    _write(
        os.path.join(dirpath, "outputs.map"),
        "".join(e.line() + "\n" for e in session.output_entries),
    )
    _write(
        os.path.join(dirpath, "labels.txt"),
        "".join(f"{a}\t{session.labels[a]}\n" for a in sorted(session.labels)),
    )
    _write(os.path.join(dirpath, "view.json"), json.dumps(session.view, indent=2) + "\n")
    meta = [
        f"version={META_VERSION}",
        f"vertices={session.graph.vertex_count()}",
        f"edges={session.graph.edge_count()}",
        f"datasets={','.join(session.dataset_names)}",
    ]
    _write(os.path.join(dirpath, "meta"), "\n".join(meta) + "\n")


def _read(dirpath: str, name: str) -> str:
    path = os.path.join(dirpath, name)
    if not os.path.exists(path):
        raise SessionError(f"session directory is missing {name}")
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _parse_map(text: str) -> list[PathEntry]:
    out = []
    for line in text.splitlines():
        if not line:
            continue
        addr, kind, path = line.split("\t", 2)
        out.append(PathEntry(path, int(addr), kind))
    return out


def load_dir(dirpath: str) -> Session:
    """Reload the queryable parts of a stored session (not the value)."""
    meta = dict(
        line.split("=", 1) for line in _read(dirpath, "meta").splitlines() if line
    )
    if int(meta.get("version", -1)) != META_VERSION:
        raise SessionError(f"unsupported session version {meta.get('version')!r}")
    labels: dict[Address, str] = {}
    for line in _read(dirpath, "labels.txt").splitlines():
        if line:
            addr, label = line.split("\t", 1)
            labels[int(addr)] = label
    names = tuple(n for n in meta.get("datasets", "").split(",") if n)
    return Session(
        source=None,
        result=None,
        result_text=_read(dirpath, "result.txt").rstrip("\n"),
        graph=from_edge_list(_read(dirpath, "graph.edges")),
        labels=labels,
        dataset_names=names,
        input_entries=tuple(_parse_map(_read(dirpath, "inputs.map"))),
        output_entries=tuple(_parse_map(_read(dirpath, "outputs.map"))),
        view=json.loads(_read(dirpath, "view.json")),
    )
