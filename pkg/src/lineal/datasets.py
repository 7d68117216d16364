"""Dataset ingestion: CSV and JSON text into addressed runtime values.

A dataset binds one top-level variable to a value built before evaluation
starts, with every part (scalar cell, record, list cell) allocated its
own graph vertex.  Dataset vertices start with no in-edges — input data
has no provenance of its own — so they are exactly the extra sources the
program's graph grows from.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Union

from .core import LinealError, Value, VCtor, VFloat, VInt, VRecord, VStr
from .graph import GraphBuilder
from .interp import Allocator, shallow_label

Datum = Union[int, float, str, list, dict]


class DatasetError(LinealError):
    """Dataset text could not be parsed or contains unsupported values."""


def parse_cell(text: str) -> Union[int, float, str]:
    """CSV cells carry no type markers: try int, then float, else string."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def parse_csv(text: str) -> list[dict[str, Union[int, float, str]]]:
    """Header row names the record fields; every row becomes one record."""
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if not rows:
        raise DatasetError("csv dataset has no header row")
    header = [name.strip() for name in rows[0]]
    if len(set(header)) != len(header):
        raise DatasetError("csv header repeats a field name")
    out = []
    for i, row in enumerate(rows[1:]):
        if len(row) != len(header):
            raise DatasetError(
                f"csv row {i + 1} has {len(row)} cells, header has {len(header)}"
            )
        out.append({name: parse_cell(cell.strip()) for name, cell in zip(header, row)})
    return out


def check_data(data: Datum, where: str = "dataset") -> None:
    """Only the shapes the language has values for: numbers, strings,
    lists, and string-keyed records.  Booleans and null are rejected
    rather than silently coerced."""
    if isinstance(data, bool):
        raise DatasetError(f"{where}: booleans are not dataset values")
    if isinstance(data, (int, float, str)):
        return
    if isinstance(data, list):
        for i, item in enumerate(data):
            check_data(item, f"{where}[{i}]")
        return
    if isinstance(data, dict):
        for key, item in data.items():
            if not isinstance(key, str):
                raise DatasetError(f"{where}: record field names must be strings")
            check_data(item, f"{where}.{key}")
        return
    raise DatasetError(f"{where}: unsupported value {data!r}")


def parse_json_data(text: str) -> Datum:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise DatasetError(f"json dataset: {err}") from None
    check_data(data)
    return data


def build_value(data: Datum, graph: GraphBuilder, alloc: Allocator) -> Value:
    """Allocate a vertex per part, children before parents, so scalar
    cells come out in row-major path order and the address counter ends
    just past the dataset."""
    check_data(data)

    def make(raw) -> Value:
        addr = alloc.fresh()
        graph.add_vertex(addr)
        graph.note_label(addr, shallow_label(raw))
        return Value(raw, addr)

    def walk(d: Datum) -> Value:
        if isinstance(d, int):
            return make(VInt(d))
        if isinstance(d, float):
            return make(VFloat(d))
        if isinstance(d, str):
            return make(VStr(d))
        if isinstance(d, dict):
            fields = tuple((name, walk(d[name])) for name in sorted(d))
            return make(VRecord(fields))
        items = [walk(item) for item in d]
        out = make(VCtor("Nil", ()))
        for item in reversed(items):
            out = make(VCtor("Cons", (item, out)))
        return out

    return walk(data)


def load_dataset_text(text: str, fmt: str) -> Datum:
    """fmt is "csv" or "json"; the caller picks it from a file extension
    or request field."""
    if fmt == "csv":
        return parse_csv(text)
    if fmt == "json":
        return parse_json_data(text)
    raise DatasetError(f"unknown dataset format {fmt!r}")
