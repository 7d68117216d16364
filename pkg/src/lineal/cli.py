"""Command line: evaluate programs, query sessions, benchmark, export, serve."""

from __future__ import annotations

import argparse
import os
import sys

from . import bench as bench_mod
from . import desugar, queries, surface
from .core import LinealError, base_constructors, expr_text
from .datasets import DatasetError, load_dataset_text
from .graph import to_dot
from .session import load_dir, run, write_dir


def _parse_data_flag(flag: str) -> tuple[str, str]:
    name, sep, path = flag.partition("=")
    if not sep or not name or not path:
        raise LinealError(f"--data expects name=path, got {flag!r}")
    return name, path


def _load_datasets(flags: list[str]) -> dict:
    out = {}
    for flag in flags:
        name, path = _parse_data_flag(flag)
        ext = os.path.splitext(path)[1].lstrip(".").lower()
        if ext not in ("csv", "json"):
            raise DatasetError(f"{path}: dataset files must be .csv or .json")
        with open(path, encoding="utf-8") as fh:
            out[name] = load_dataset_text(fh.read(), ext)
    return out


def cmd_eval(args: argparse.Namespace) -> int:
    with open(args.program, encoding="utf-8") as fh:
        source = fh.read()
    if args.dump_core:
        prog = surface.parse(source)
        core = desugar.desugar_program(prog, base_constructors())
        print(expr_text(core))
        return 0
    datasets = _load_datasets(args.data)
    sess = run(source, datasets)
    out_dir = args.out or os.path.splitext(args.program)[0] + ".session"
    write_dir(sess, out_dir)
    print(f"result: {sess.result_text}")
    print(f"vertices: {sess.graph.vertex_count()}")
    print(f"edges: {sess.graph.edge_count()}")
    print(f"session: {out_dir}")
    return 0


def cmd_query(args: argparse.Namespace) -> int:
    sess = load_dir(args.session)
    selection = frozenset(sess.resolve(spec) for spec in args.select)
    answer = queries.run_query(sess.graph, args.op, selection)
    shown = sorted(sess.restrict(answer, args.restrict))
    for addr in shown:
        print(sess.describe(addr))
    print(f"({len(shown)} of {len(answer)} answer vertices shown)", file=sys.stderr)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    report = bench_mod.run_suite(args.config)
    text = bench_mod.format_report(report)
    print(text, end="")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 1 if report.failures else 0


def cmd_export_dot(args: argparse.Namespace) -> int:
    sess = load_dir(args.session)
    text = to_dot(sess.graph, sess.labels)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve

    serve(host=args.host, port=args.port, session_cap=args.session_cap)
    return 0


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lineal",
        description="evaluate programs with dependence graphs and query them",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a program into a session directory")
    p.add_argument("program", help="program file")
    p.add_argument(
        "--data",
        action="append",
        default=[],
        metavar="NAME=FILE",
        help="bind a dataset (csv or json file); repeatable",
    )
    p.add_argument("--out", help="session directory (default: <program>.session)")
    p.add_argument(
        "--dump-core",
        action="store_true",
        help="print the desugared core form and exit without evaluating",
    )
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("query", help="run a selection query against a stored session")
    p.add_argument("session", help="session directory written by eval")
    p.add_argument("op", choices=sorted(queries.QUERY_OPS))
    p.add_argument(
        "--select",
        action="append",
        required=True,
        metavar="SPEC",
        help="path like data[0].co2e or out[1], or a raw vertex id; repeatable",
    )
    p.add_argument("--restrict", choices=["inputs", "outputs", "none"], default="none")
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("bench", help="run the benchmark suite from a config file")
    p.add_argument("config")
    p.add_argument("--out", help="also write the report to a file")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("export-dot", help="emit a session graph in DOT form")
    p.add_argument("session")
    p.add_argument("-o", "--output", help="output file (default: stdout)")
    p.set_defaults(fn=cmd_export_dot)

    p = sub.add_parser("serve", help="start the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--session-cap", type=int, default=32)
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.fn(args)
    except FileNotFoundError as err:
        print(f"error: no such file: {err.filename}", file=sys.stderr)
        return 2
    except LinealError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
