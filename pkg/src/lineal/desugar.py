"""Lowering surface programs to the core calculus.

The delicate part is merging piecewise clauses into a single eliminator
trie.  Clauses are merged argument by argument, left to right, each
argument walking a stack of subpatterns:

* aligned variable patterns must all use the same name;
* aligned constructor patterns partition the clauses by head;
* aligned record patterns must agree on their field set;
* aligned literal patterns (of one type, in tail position) become a
  chain of equality tests;
* a variable may meet another kind of pattern only once the clauses
  have already been told apart by an earlier constructor split.

Anything else is rejected with a diagnostic naming the argument column
and the clauses involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .core import (
    App,
    ConstructorSig,
    Continuation,
    Ctor,
    CtorElim,
    Expr,
    FloatLit,
    ForeignApp,
    Fun,
    IntLit,
    Let,
    LetRec,
    LinealError,
    Project,
    Record,
    RecordElim,
    StrLit,
    Var,
    VarElim,
)
from .surface import (
    Block,
    Clause,
    DatasetDecl,
    Definition,
    Pattern,
    PCtorPat,
    PLitPat,
    PRecordPat,
    PVar,
    SApp,
    SBin,
    SCtorName,
    SExpr,
    SFloat,
    SFun,
    SIf,
    SInt,
    SLet,
    SList,
    SProj,
    SRecord,
    SSection,
    SStr,
    SurfaceProgram,
    SVar,
)


@dataclass(frozen=True)
class Diagnostic:
    message: str
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.message}"


class DesugarError(LinealError):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


class _Abort(Exception):
    """Internal: a diagnostic was recorded that merging cannot recover from."""


@dataclass
class _Ctx:
    csig: ConstructorSig
    diagnostics: list[Diagnostic] = field(default_factory=list)
    fresh: int = 0

    def diag(self, message: str, line: int, col: int) -> None:
        self.diagnostics.append(Diagnostic(message, line, col))

    def abort(self, message: str, line: int, col: int) -> "_Abort":
        self.diag(message, line, col)
        return _Abort()

    def fresh_name(self) -> str:
        name = f"$m{self.fresh}"
        self.fresh += 1
        return name


@dataclass
class _Item:
    """One clause mid-merge: unconsumed subpatterns of the current column."""

    stack: list[Pattern]
    clause: Clause
    ordinal: int  # 1-based clause number, for diagnostics


def _kind(p: Pattern) -> str:
    if isinstance(p, PVar):
        return "variable"
    if isinstance(p, PCtorPat):
        return "constructor"
    if isinstance(p, PRecordPat):
        return "record"
    return "literal"


def _clause_lines(items: list[_Item]) -> str:
    return ", ".join(f"clause {it.ordinal} (line {it.clause.line})" for it in items)


def _if_core(cond: Expr, then: Expr, other: Expr) -> Expr:
    """Boolean elimination: control dependence flows through the condition."""
    return App(Fun(CtorElim((("True", then), ("False", other)))), cond)


def _match_fail(scrutinee: str) -> Expr:
    """An application that can never match: the empty eliminator."""
    return App(Fun(CtorElim(())), Var(scrutinee))


class _Merger:
    def __init__(self, ctx: _Ctx, clauses: tuple[Clause, ...]):
        self.ctx = ctx
        self.clauses = clauses
        self.arity = len(clauses[0].patterns)

    def build(self) -> Expr:
        """The full curried function covering every argument column."""
        return self.column([(c, i + 1) for i, c in enumerate(self.clauses)], 0)

    def column(self, live: list[tuple[Clause, int]], col: int) -> Expr:
        items = [_Item([c.patterns[col]], c, i) for c, i in live]
        return Fun(self.merge(items, col))

    def merge(self, items: list[_Item], col: int) -> Continuation:
        if not items[0].stack:
            live = [(it.clause, it.ordinal) for it in items]
            if col + 1 < self.arity:
                return self.column(live, col + 1)
            if len(items) > 1:
                raise self.ctx.abort(
                    f"overlapping clauses cannot be told apart: {_clause_lines(items)}",
                    items[1].clause.line,
                    items[1].clause.col,
                )
            return _expr(self.ctx, items[0].clause.body)
        heads = [it.stack[0] for it in items]
        kinds = {_kind(h) for h in heads}
        if len(kinds) > 1:
            first = heads[0]
            raise self.ctx.abort(
                f"argument {col + 1} aligns {' and '.join(sorted(kinds))} patterns "
                f"before the clauses are distinguished: {_clause_lines(items)}",
                first.line,
                first.col,
            )
        kind = kinds.pop()
        if kind == "variable":
            return self.merge_vars(items, col)
        if kind == "constructor":
            return self.merge_ctors(items, col)
        if kind == "record":
            return self.merge_records(items, col)
        return self.merge_literals(items, col)

    def merge_vars(self, items: list[_Item], col: int) -> Continuation:
        names = {it.stack[0].name for it in items}  # type: ignore[union-attr]
        if len(names) > 1:
            first = items[0].stack[0]
            raise self.ctx.abort(
                f"argument {col + 1} aligns variable patterns with different names "
                f"({', '.join(sorted(names))}): {_clause_lines(items)}",
                first.line,
                first.col,
            )
        rest = [_Item(it.stack[1:], it.clause, it.ordinal) for it in items]
        return VarElim(names.pop(), self.merge(rest, col))

    def merge_ctors(self, items: list[_Item], col: int) -> Continuation:
        order: list[str] = []
        groups: dict[str, list[_Item]] = {}
        for it in items:
            head = it.stack[0]
            assert isinstance(head, PCtorPat)
            try:
                want = self.ctx.csig.arity(head.name)
            except LinealError:
                raise self.ctx.abort(
                    f"unknown constructor {head.name}", head.line, head.col
                )
            if len(head.args) != want:
                raise self.ctx.abort(
                    f"constructor {head.name} pattern carries {len(head.args)} "
                    f"subpatterns, expects {want}",
                    head.line,
                    head.col,
                )
            if head.name not in groups:
                order.append(head.name)
                groups[head.name] = []
            groups[head.name].append(
                _Item(list(head.args) + it.stack[1:], it.clause, it.ordinal)
            )
        branches = tuple((c, self.merge(groups[c], col)) for c in order)
        return CtorElim(branches)

    def merge_records(self, items: list[_Item], col: int) -> Continuation:
        field_sets = {tuple(sorted(n for n, _ in it.stack[0].fields)) for it in items}  # type: ignore[union-attr]
        if len(field_sets) > 1:
            first = items[0].stack[0]
            raise self.ctx.abort(
                f"argument {col + 1} aligns record patterns with different fields: "
                f"{_clause_lines(items)}",
                first.line,
                first.col,
            )
        fields = field_sets.pop()
        rest: list[_Item] = []
        for it in items:
            head = it.stack[0]
            assert isinstance(head, PRecordPat)
            by_name = dict(head.fields)
            rest.append(
                _Item([by_name[n] for n in fields] + it.stack[1:], it.clause, it.ordinal)
            )
        return RecordElim(tuple(fields), self.merge(rest, col))

    def merge_literals(self, items: list[_Item], col: int) -> Continuation:
        heads = [it.stack[0] for it in items]
        types = {type(h.value) for h in heads}  # type: ignore[union-attr]
        first = heads[0]
        if len(types) > 1:
            raise self.ctx.abort(
                f"argument {col + 1} aligns literals of different types: "
                f"{_clause_lines(items)}",
                first.line,
                first.col,
            )
        if any(len(it.stack) > 1 for it in items):
            raise self.ctx.abort(
                f"literal patterns must be the last match of argument {col + 1}",
                first.line,
                first.col,
            )
        seen: set[object] = set()
        for it in items:
            lit = it.stack[0].value  # type: ignore[union-attr]
            if lit in seen:
                raise self.ctx.abort(
                    f"duplicate literal pattern {lit!r}: {_clause_lines(items)}",
                    it.stack[0].line,
                    it.stack[0].col,
                )
            seen.add(lit)
        scrutinee = self.ctx.fresh_name()
        chain: Expr = _match_fail(scrutinee)
        for it in reversed(items):
            lit = it.stack[0].value  # type: ignore[union-attr]
            cont = self.merge([_Item([], it.clause, it.ordinal)], col)
            assert not isinstance(cont, (VarElim, RecordElim, CtorElim))
            test = ForeignApp("eq", (Var(scrutinee), _lit_expr(lit)))
            chain = _if_core(test, cont, chain)
        return VarElim(scrutinee, chain)


def _lit_expr(value: Union[int, float, str]) -> Expr:
    if isinstance(value, bool):  # guard: bool is an int subclass
        raise TypeError("boolean literals do not exist in the surface language")
    if isinstance(value, int):
        return IntLit(value)
    if isinstance(value, float):
        return FloatLit(value)
    return StrLit(value)


# ---------------------------------------------------------------------------
# expressions


def _spine(e: SExpr) -> tuple[SExpr, list[SApp]]:
    apps: list[SApp] = []
    while isinstance(e, SApp):
        apps.append(e)
        e = e.fn
    apps.reverse()
    return e, apps


def _expr(ctx: _Ctx, s: SExpr) -> Expr:
    if isinstance(s, SVar):
        return Var(s.name, span=(s.line, s.col))
    if isinstance(s, SInt):
        return IntLit(s.value)
    if isinstance(s, SFloat):
        return FloatLit(s.value)
    if isinstance(s, SStr):
        return StrLit(s.value)
    if isinstance(s, (SCtorName, SApp)):
        head, apps = _spine(s)
        if isinstance(head, SCtorName):
            try:
                want = ctx.csig.arity(head.name)
            except LinealError:
                raise ctx.abort(f"unknown constructor {head.name}", head.line, head.col)
            if want != len(apps):
                raise ctx.abort(
                    f"constructor {head.name} applied to {len(apps)} arguments, "
                    f"expects {want}",
                    head.line,
                    head.col,
                )
            return Ctor(head.name, tuple(_expr(ctx, a.arg) for a in apps))
        out = _expr(ctx, head)
        for a in apps:
            out = App(out, _expr(ctx, a.arg), span=(a.line, a.col))
        return out
    if isinstance(s, SLet):
        return Let(s.name, _expr(ctx, s.bound), _expr(ctx, s.body))
    if isinstance(s, SIf):
        return _if_core(_expr(ctx, s.cond), _expr(ctx, s.then), _expr(ctx, s.other))
    if isinstance(s, SBin):
        lhs, rhs = _expr(ctx, s.lhs), _expr(ctx, s.rhs)
        at = (s.line, s.col)
        if s.op == "neq":
            return ForeignApp("not", (ForeignApp("eq", (lhs, rhs), span=at),), span=at)
        return ForeignApp(s.op, (lhs, rhs), span=at)
    if isinstance(s, SSection):
        if s.op == "neq":
            inner = ForeignApp("not", (ForeignApp("eq", (Var("$a"), Var("$b"))),))
            return Fun(VarElim("$a", Fun(VarElim("$b", inner))))
        return Var(s.op)
    if isinstance(s, SRecord):
        return Record(tuple((n, _expr(ctx, v)) for n, v in s.fields))
    if isinstance(s, SProj):
        return Project(_expr(ctx, s.record), s.field, span=(s.line, s.col))
    if isinstance(s, SList):
        out: Expr = Ctor("Nil", ())
        for item in reversed(s.items):
            out = Ctor("Cons", (_expr(ctx, item), out))
        return out
    if isinstance(s, SFun):
        _check_arities(ctx, s.clauses, "fun")
        _check_linear(ctx, s.clauses)
        return _Merger(ctx, s.clauses).build()
    raise TypeError(f"not a surface expression: {s!r}")


def _check_arities(ctx: _Ctx, clauses: tuple[Clause, ...], name: str) -> None:
    arities = {len(c.patterns) for c in clauses}
    if len(arities) > 1:
        c = clauses[-1]
        raise ctx.abort(
            f"clauses of {name} disagree on argument count: {sorted(arities)}",
            c.line,
            c.col,
        )


def _pattern_vars(p: Pattern, out: list[tuple[str, int, int]]) -> None:
    if isinstance(p, PVar):
        out.append((p.name, p.line, p.col))
    elif isinstance(p, PCtorPat):
        for a in p.args:
            _pattern_vars(a, out)
    elif isinstance(p, PRecordPat):
        for _, a in p.fields:
            _pattern_vars(a, out)


def _check_linear(ctx: _Ctx, clauses: tuple[Clause, ...]) -> None:
    for c in clauses:
        names: list[tuple[str, int, int]] = []
        for p in c.patterns:
            _pattern_vars(p, names)
        seen: set[str] = set()
        for n, line, col in names:
            if n in seen:
                raise ctx.abort(f"variable {n!r} bound twice in one clause", line, col)
            seen.add(n)


# ---------------------------------------------------------------------------
# public entry points


def check_clauses(defn: Definition, csig: ConstructorSig) -> list[Diagnostic]:
    """Dry-run the merge; empty result means the definition is acceptable."""
    ctx = _Ctx(csig)
    try:
        _check_arities(ctx, defn.clauses, defn.name)
        _check_linear(ctx, defn.clauses)
        if defn.clauses[0].patterns:
            _Merger(ctx, defn.clauses).build()
        elif len(defn.clauses) > 1:
            ctx.diag(
                f"{defn.name} has several zero-argument clauses",
                defn.line,
                defn.col,
            )
        else:
            _expr(ctx, defn.clauses[0].body)
    except _Abort:
        pass
    return ctx.diagnostics


def desugar_definition(defn: Definition, csig: ConstructorSig) -> Expr:
    """The right-hand side (a curried function) for one definition."""
    ctx = _Ctx(csig)
    try:
        _check_arities(ctx, defn.clauses, defn.name)
        _check_linear(ctx, defn.clauses)
        out = _Merger(ctx, defn.clauses).build()
    except _Abort:
        raise DesugarError(ctx.diagnostics) from None
    return out


def desugar_expr(s: SExpr, csig: ConstructorSig) -> Expr:
    ctx = _Ctx(csig)
    try:
        out = _expr(ctx, s)
    except _Abort:
        raise DesugarError(ctx.diagnostics) from None
    return out


def desugar_program(prog: SurfaceProgram, csig: ConstructorSig) -> Expr:
    """Lower a whole program: blocks become let-rec, values become let."""
    ctx = _Ctx(csig)
    try:
        core = _expr(ctx, prog.result)
        for item in reversed(prog.items):
            if isinstance(item, DatasetDecl):
                continue
            zero = [d for d in item.definitions if not d.clauses[0].patterns]
            if zero:
                d = zero[0]
                if len(item.definitions) > 1:
                    raise ctx.abort(
                        f"value definition {d.name!r} cannot join a recursive block",
                        d.line,
                        d.col,
                    )
                if len(d.clauses) > 1:
                    raise ctx.abort(
                        f"{d.name} has several zero-argument clauses", d.line, d.col
                    )
                core = Let(d.name, _expr(ctx, d.clauses[0].body), core)
                continue
            defs = []
            for d in item.definitions:
                _check_arities(ctx, d.clauses, d.name)
                _check_linear(ctx, d.clauses)
                fn = _Merger(ctx, d.clauses).build()
                assert isinstance(fn, Fun)
                defs.append((d.name, fn.elim))
            core = LetRec(tuple(defs), core)
    except _Abort:
        raise DesugarError(ctx.diagnostics) from None
    return core
