"""Benchmark harness: evaluation and query timings over a small suite.

Each suite entry is a program plus one generated (or CSV) dataset and a
pinned pair of selections.  Four phases are timed per entry:

- ``eval``: evaluation with graph recording (parsing excluded),
- ``demands``: the backward query from one output,
- ``demandedBy-direct``: the forward query from one input,
- ``demandedBy-dual``: the same query routed through the dual of the
  sufficiency analysis (complement, analyse, complement).

Every phase runs ``runs`` times; the report carries mean/stddev and a
latency category per row, plus the direct-vs-dual speedup per entry.
"""

from __future__ import annotations

import configparser
import os
import random
import statistics
import time
from dataclasses import dataclass

from . import desugar, queries, surface
from .core import Env, LinealError, base_constructors, validate
from .datasets import Datum, build_value, parse_csv
from .graph import GraphBuilder
from .interp import Allocator, EvalContext, base_foreigns, eval_expr, foreign_sig, prelude_bindings
from .session import Session, _eval_in_big_stack, run


class BenchError(LinealError):
    """Suite configuration or entry setup problem."""


# response-time feel, strict upper bounds in milliseconds
NIELSEN = ((100.0, "instantaneous"), (1000.0, "uninterrupted"), (10000.0, "attention"))


def nielsen_category(mean_ms: float) -> str:
    for limit, name in NIELSEN:
        if mean_ms < limit:
            return name
    return "over"


@dataclass(frozen=True)
class BenchEntry:
    name: str
    program: str  # path, resolved against the config file's directory
    dataset_name: str
    dataset_kind: str  # "matrix" | "table" | "csv:<path>"
    input_path: str  # selection for demandedBy phases
    output_path: str  # selection for the demands phase


@dataclass(frozen=True)
class BenchRow:
    name: str
    phase: str
    runs: int
    mean_ms: float
    stddev_ms: float
    category: str


@dataclass
class BenchReport:
    rows: list[BenchRow]
    speedups: dict[str, float]  # entry -> dual mean / direct mean
    failures: list[tuple[str, str]]

    def direct_wins(self) -> tuple[int, int]:
        wins = sum(1 for ratio in self.speedups.values() if ratio > 1.0)
        return wins, len(self.speedups)


def load_suite(path: str) -> tuple[dict, list[BenchEntry]]:
    cp = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        cp.read_file(fh)
    if "suite" not in cp:
        raise BenchError("suite config needs a [suite] section")
    suite = cp["suite"]
    settings = {
        "runs": suite.getint("runs", 10),
        "matrix": suite.getint("matrix", 16),
        "rows": suite.getint("rows", 240),
        "seed": suite.getint("seed", 2024),
    }
    entries = []
    for name in cp.sections():
        if name == "suite":
            continue
        sec = cp[name]
        for key in ("program", "dataset", "input", "output"):
            if key not in sec:
                raise BenchError(f"[{name}] is missing {key!r}")
        ds_name, _, ds_kind = sec["dataset"].partition(":")
        if not ds_kind:
            raise BenchError(f"[{name}] dataset must look like name:kind")
        entries.append(
            BenchEntry(
                name=name,
                program=sec["program"],
                dataset_name=ds_name.strip(),
                dataset_kind=ds_kind.strip(),
                input_path=sec["input"],
                output_path=sec["output"],
            )
        )
    if not entries:
        raise BenchError("suite config lists no benchmark entries")
    return settings, entries


SECTORS = ("power", "transport", "industry")


def build_dataset(kind: str, settings: dict, base_dir: str) -> Datum:
    rng = random.Random(settings["seed"])
    if kind == "matrix":
        n = settings["matrix"]
        return [[round(rng.uniform(0.0, 255.0), 1) for _ in range(n)] for _ in range(n)]
    if kind == "table":
        return [
            {
                "day": i + 1,
                "co2e": round(rng.uniform(5.0, 120.0), 2),
                "sector": rng.choice(SECTORS),
            }
            for i in range(settings["rows"])
        ]
    if kind.startswith("csv"):
        _, _, rel = kind.partition(":")
        with open(os.path.join(base_dir, rel.strip()), encoding="utf-8") as fh:
            return parse_csv(fh.read())
    raise BenchError(f"unknown dataset kind {kind!r}")


def _time_ms(fn) -> float:
    t0 = time.perf_counter()
    fn()
    return (time.perf_counter() - t0) * 1000.0


def _row(name: str, phase: str, times: list[float]) -> BenchRow:
    mean = statistics.mean(times)
    stddev = statistics.stdev(times) if len(times) > 1 else 0.0
    return BenchRow(name, phase, len(times), mean, stddev, nielsen_category(mean))


def run_entry(entry: BenchEntry, settings: dict, base_dir: str) -> tuple[list[BenchRow], float]:
    with open(os.path.join(base_dir, entry.program), encoding="utf-8") as fh:
        source = fh.read()
    data = build_dataset(entry.dataset_kind, settings, base_dir)
    sess: Session = run(source, {entry.dataset_name: data})
    g = sess.graph
    if entry.input_path not in sess.input_paths:
        raise BenchError(f"{entry.name}: input selection {entry.input_path!r} not found")
    if entry.output_path not in sess.output_paths:
        raise BenchError(f"{entry.name}: output selection {entry.output_path!r} not found")
    in_sel = frozenset({sess.input_paths[entry.input_path]})
    out_sel = frozenset({sess.output_paths[entry.output_path]})
    if queries.demanded_by(g, in_sel) != queries.demanded_by_via_dual(g, in_sel):
        raise BenchError(f"{entry.name}: direct and dual routes disagree")

    # parse/desugar once; the eval phase times graph-recording evaluation only
    csig = base_constructors()
    expr = desugar.desugar_program(surface.parse(source), csig)
    problems = validate(expr, csig, foreign_sig())
    if problems:
        raise BenchError(f"{entry.name}: {problems[0]}")
    impls = base_foreigns()

    def eval_once() -> None:
        builder = GraphBuilder()
        alloc = Allocator()
        value = build_value(data, builder, alloc)
        env = Env().extend(prelude_bindings(builder, alloc, impls))
        env = env.extend({entry.dataset_name: value})
        eval_expr(EvalContext(env, frozenset(), builder, alloc, impls), expr)

    runs = settings["runs"]
    eval_times = _eval_in_big_stack(lambda: [_time_ms(eval_once) for _ in range(runs)])
    demands_times = [_time_ms(lambda: queries.demands(g, out_sel)) for _ in range(runs)]
    direct_times = [_time_ms(lambda: queries.demanded_by(g, in_sel)) for _ in range(runs)]
    dual_times = [_time_ms(lambda: queries.demanded_by_via_dual(g, in_sel)) for _ in range(runs)]
    rows = [
        _row(entry.name, "eval", eval_times),
        _row(entry.name, "demands", demands_times),
        _row(entry.name, "demandedBy-direct", direct_times),
        _row(entry.name, "demandedBy-dual", dual_times),
    ]
    speedup = statistics.mean(dual_times) / statistics.mean(direct_times)
    return rows, speedup


def run_suite(config_path: str) -> BenchReport:
    settings, entries = load_suite(config_path)
    base_dir = os.path.dirname(os.path.abspath(config_path))
    report = BenchReport(rows=[], speedups={}, failures=[])
    for entry in entries:
        try:
            rows, speedup = run_entry(entry, settings, base_dir)
        except (LinealError, OSError) as err:
            report.failures.append((entry.name, str(err)))
            continue
        report.rows.extend(rows)
        report.speedups[entry.name] = speedup
    return report


def format_report(report: BenchReport) -> str:
    header = f"{'benchmark':<18} {'phase':<18} {'runs':>4} {'mean ms':>10} {'stddev':>8}  category"
    lines = [header, "-" * len(header)]
    for row in report.rows:
        lines.append(
            f"{row.name:<18} {row.phase:<18} {row.runs:>4} "
            f"{row.mean_ms:>10.3f} {row.stddev_ms:>8.3f}  {row.category}"
        )
    lines.append("")
    lines.append("speedup of direct demandedBy over dual-of-suffices (ratio > 1 = direct wins):")
    for name, ratio in report.speedups.items():
        lines.append(f"  {name:<18} {ratio:>7.2f}x")
    wins, total = report.direct_wins()
    lines.append(f"direct wins: {wins}/{total}")
    for name, message in report.failures:
        lines.append(f"FAILED {name}: {message}")
    return "\n".join(lines) + "\n"
