"""Evaluator: big-step reduction that records a dependence graph.

Every constructed part of a result gets a fresh graph vertex with edges
from the current *demand set*: the addresses whose values were consumed
to reach this point of the program.  Variable lookups and record
projections add nothing, so sharing never manufactures dependence; only
pattern matching (which inspects a value) and foreign application
(which consumes argument roots) do.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .core import (
    Address,
    App,
    Continuation,
    Ctor,
    CtorElim,
    Env,
    Expr,
    FloatLit,
    ForeignApp,
    ForeignSig,
    Fun,
    IntLit,
    Let,
    LetRec,
    LinealError,
    Project,
    RecDefs,
    Record,
    RecordElim,
    StrLit,
    Value,
    Var,
    VarElim,
    VClosure,
    VCtor,
    VFloat,
    VInt,
    VRecord,
    VStr,
)
from .graph import GraphBuilder


class EvalError(LinealError):
    """Evaluation got stuck."""


class UnboundVariable(EvalError):
    pass


class NotAFunction(EvalError):
    pass


class MatchFailure(EvalError):
    pass


class ProjectionError(EvalError):
    pass


class ForeignError(EvalError):
    pass


class Allocator:
    """Monotone address supply; one per session."""

    __slots__ = ("next_addr",)

    def __init__(self, start: Address = 0):
        self.next_addr = start

    def fresh(self) -> Address:
        a = self.next_addr
        self.next_addr += 1
        return a


@dataclass(frozen=True)
class MatchResult:
    """Bindings, chosen branch, and the addresses the match consumed."""

    bindings: dict[str, Value]
    branch: Expr
    consumed: frozenset[Address]


def match(stack: list[Value], kont: Continuation) -> MatchResult:
    """Drive an eliminator over a stack of values.

    Record and constructor layers pop a value, note its address as
    consumed, and push the component values back for deeper layers; a
    variable layer just pops and binds.  The walk must end on a term
    with an empty stack.
    """
    bindings: dict[str, Value] = {}
    consumed: set[Address] = set()
    while isinstance(kont, (VarElim, RecordElim, CtorElim)):
        if not stack:
            raise MatchFailure("eliminator ran out of values to match")
        v, stack = stack[0], stack[1:]
        raw = v.raw
        if isinstance(kont, VarElim):
            bindings[kont.name] = v
            kont = kont.kont
        elif isinstance(kont, RecordElim):
            if not isinstance(raw, VRecord):
                raise MatchFailure(f"record pattern against {type(raw).__name__}")
            picked: list[Value] = []
            for name in kont.fields:
                fv = raw.get(name)
                if fv is None:
                    raise MatchFailure(f"record has no field {name!r}")
                picked.append(fv)
            consumed.add(v.addr)
            stack = picked + stack
            kont = kont.kont
        else:
            if not isinstance(raw, VCtor):
                raise MatchFailure(f"constructor pattern against {type(raw).__name__}")
            branch = kont.branch(raw.name)
            if branch is None:
                raise MatchFailure(f"no branch for constructor {raw.name}")
            consumed.add(v.addr)
            stack = list(raw.args) + stack
            kont = branch
    if stack:
        raise MatchFailure(f"{len(stack)} values left unconsumed by the eliminator")
    return MatchResult(bindings, kont, frozenset(consumed))


# ---------------------------------------------------------------------------
# foreign functions


@dataclass(frozen=True)
class ForeignImpl:
    """A built-in operation: sees argument values and the graph, not the
    ambient demand, so its result depends exactly on its argument roots."""

    name: str
    arity: int
    fn: Callable[[list[Value], GraphBuilder, Allocator], Value]

    def apply(self, args: list[Value], graph: GraphBuilder, alloc: Allocator) -> Value:
        if len(args) != self.arity:
            raise ForeignError(
                f"{self.name} applied to {len(args)} args, expects {self.arity}"
            )
        return self.fn(args, graph, alloc)


def shallow_label(raw) -> str:
    """One-line vertex description: scalar text, field list, or tag."""
    if isinstance(raw, (VInt, VFloat, VStr)):
        return repr(raw.value)
    if isinstance(raw, VRecord):
        return "{" + ", ".join(n for n, _ in raw.fields) + "}"
    if isinstance(raw, VCtor):
        return raw.name
    return "<fun>"


def _fresh_result(raw, args: list[Value], graph: GraphBuilder, alloc: Allocator) -> Value:
    addr = alloc.fresh()
    graph.add_in_star({a.addr for a in args}, addr)
    graph.note_label(addr, shallow_label(raw))
    return Value(raw, addr)


def _num(name: str, v: Value) -> int | float:
    if isinstance(v.raw, (VInt, VFloat)):
        return v.raw.value
    raise ForeignError(f"{name}: expected a number, got {type(v.raw).__name__}")


def _arith(name: str, op: Callable[[int | float, int | float], int | float]) -> ForeignImpl:
    def fn(args: list[Value], graph: GraphBuilder, alloc: Allocator) -> Value:
        x, y = _num(name, args[0]), _num(name, args[1])
        try:
            r = op(x, y)
        except ZeroDivisionError:
            raise ForeignError(f"{name}: division by zero") from None
        raw = VInt(r) if isinstance(r, int) else VFloat(r)
        return _fresh_result(raw, args, graph, alloc)

    return ForeignImpl(name, 2, fn)


def _bool_value(b: bool) -> VCtor:
    return VCtor("True" if b else "False", ())


def _compare(name: str, op: Callable[[object, object], bool]) -> ForeignImpl:
    def fn(args: list[Value], graph: GraphBuilder, alloc: Allocator) -> Value:
        a, b = args[0].raw, args[1].raw
        num_a = isinstance(a, (VInt, VFloat))
        num_b = isinstance(b, (VInt, VFloat))
        if num_a and num_b:
            r = op(a.value, b.value)
        elif isinstance(a, VStr) and isinstance(b, VStr):
            r = op(a.value, b.value)
        else:
            raise ForeignError(
                f"{name}: cannot compare {type(a).__name__} with {type(b).__name__}"
            )
        return _fresh_result(_bool_value(r), args, graph, alloc)

    return ForeignImpl(name, 2, fn)


def _as_bool(name: str, v: Value) -> bool:
    raw = v.raw
    if isinstance(raw, VCtor) and raw.name in ("True", "False") and not raw.args:
        return raw.name == "True"
    raise ForeignError(f"{name}: expected True or False")


def _logic2(name: str, op: Callable[[bool, bool], bool]) -> ForeignImpl:
    def fn(args: list[Value], graph: GraphBuilder, alloc: Allocator) -> Value:
        r = op(_as_bool(name, args[0]), _as_bool(name, args[1]))
        return _fresh_result(_bool_value(r), args, graph, alloc)

    return ForeignImpl(name, 2, fn)


def _div(x: int | float, y: int | float) -> float:
    return x / y


def base_foreigns() -> dict[str, ForeignImpl]:
    """The built-in operation set shared by every session."""

    def _not(args: list[Value], graph: GraphBuilder, alloc: Allocator) -> Value:
        return _fresh_result(_bool_value(not _as_bool("not", args[0])), args, graph, alloc)

    def _concat(args: list[Value], graph: GraphBuilder, alloc: Allocator) -> Value:
        a, b = args[0].raw, args[1].raw
        if not (isinstance(a, VStr) and isinstance(b, VStr)):
            raise ForeignError("concat: expected two strings")
        return _fresh_result(VStr(a.value + b.value), args, graph, alloc)

    def _int_to_float(args: list[Value], graph: GraphBuilder, alloc: Allocator) -> Value:
        raw = args[0].raw
        if not isinstance(raw, VInt):
            raise ForeignError("intToFloat: expected an int")
        return _fresh_result(VFloat(float(raw.value)), args, graph, alloc)

    impls = [
        _arith("plus", lambda x, y: x + y),
        _arith("minus", lambda x, y: x - y),
        _arith("times", lambda x, y: x * y),
        _arith("div", _div),
        _arith("mod", lambda x, y: x % y),
        _arith("pow", lambda x, y: x**y),
        _compare("eq", lambda x, y: x == y),
        _compare("lt", lambda x, y: x < y),
        _compare("leq", lambda x, y: x <= y),
        _compare("gt", lambda x, y: x > y),
        _compare("geq", lambda x, y: x >= y),
        _logic2("and", lambda x, y: x and y),
        _logic2("or", lambda x, y: x or y),
        ForeignImpl("not", 1, _not),
        ForeignImpl("concat", 2, _concat),
        ForeignImpl("intToFloat", 1, _int_to_float),
    ]
    return {f.name: f for f in impls}


def foreign_sig(impls: Optional[dict[str, ForeignImpl]] = None) -> ForeignSig:
    impls = base_foreigns() if impls is None else impls
    return ForeignSig({name: f.arity for name, f in impls.items()})


# ---------------------------------------------------------------------------
# evaluation


@dataclass
class EvalContext:
    """Everything an evaluation step needs besides the expression."""

    env: Env
    demand: frozenset[Address]
    graph: GraphBuilder
    alloc: Allocator
    foreigns: dict[str, ForeignImpl]

    def with_env(self, env: Env, demand: Optional[frozenset[Address]] = None) -> "EvalContext":
        return EvalContext(
            env, self.demand if demand is None else demand, self.graph, self.alloc, self.foreigns
        )

    def make(self, raw) -> Value:
        """Allocate a vertex for a newly constructed value part."""
        addr = self.alloc.fresh()
        self.graph.add_in_star(self.demand, addr)
        self.graph.note_label(addr, shallow_label(raw))
        return Value(raw, addr)


def close_defs(
    env: Env,
    defs: RecDefs,
    demand: frozenset[Address],
    graph: GraphBuilder,
    alloc: Allocator,
) -> dict[str, Value]:
    """Build one closure per recursive definition, in declaration order.

    Each closure captures the surrounding environment and the whole
    definition group, so recursion is re-closed at the call site rather
    than through a cyclic value.
    """
    out: dict[str, Value] = {}
    for name, elim in defs:
        addr = alloc.fresh()
        graph.add_in_star(demand, addr)
        graph.note_label(addr, "<fun>")
        out[name] = Value(VClosure(env, defs, elim), addr)
    return out


def eval_seq(ctx: EvalContext, exprs: tuple[Expr, ...]) -> list[Value]:
    """Evaluate left to right under one demand set."""
    return [eval_expr(ctx, e) for e in exprs]


def _at(span) -> str:
    return f" (line {span[0]}, col {span[1]})" if span else ""


def eval_expr(ctx: EvalContext, e: Expr) -> Value:
    if isinstance(e, Var):
        v = ctx.env.lookup(e.name)
        if v is None:
            raise UnboundVariable(f"unbound variable {e.name!r}{_at(e.span)}")
        return v
    if isinstance(e, IntLit):
        return ctx.make(VInt(e.value))
    if isinstance(e, FloatLit):
        return ctx.make(VFloat(e.value))
    if isinstance(e, StrLit):
        return ctx.make(VStr(e.value))
    if isinstance(e, Let):
        bound = eval_expr(ctx, e.bound)
        return eval_expr(ctx.with_env(ctx.env.extend({e.name: bound})), e.body)
    if isinstance(e, Record):
        values = eval_seq(ctx, tuple(v for _, v in e.fields))
        fields = tuple((n, v) for (n, _), v in zip(e.fields, values))
        return ctx.make(VRecord(fields))
    if isinstance(e, Project):
        v = eval_expr(ctx, e.record)
        if not isinstance(v.raw, VRecord):
            raise ProjectionError(
                f".{e.field} applied to {type(v.raw).__name__}{_at(e.span)}"
            )
        fv = v.raw.get(e.field)
        if fv is None:
            raise ProjectionError(f"record has no field {e.field!r}{_at(e.span)}")
        return fv
    if isinstance(e, Ctor):
        args = eval_seq(ctx, e.args)
        return ctx.make(VCtor(e.name, tuple(args)))
    if isinstance(e, App):
        fv = eval_expr(ctx, e.fn)
        if not isinstance(fv.raw, VClosure):
            raise NotAFunction(f"cannot apply {type(fv.raw).__name__}{_at(e.span)}")
        closure = fv.raw
        rec = close_defs(closure.env, closure.defs, frozenset({fv.addr}), ctx.graph, ctx.alloc)
        arg = eval_expr(ctx, e.arg)
        try:
            m = match([arg], closure.elim)
        except MatchFailure as err:
            raise MatchFailure(f"{err}{_at(e.span)}") from None
        body_env = closure.env.extend(rec).extend(m.bindings)
        body_demand = m.consumed | {fv.addr}
        return eval_expr(ctx.with_env(body_env, body_demand), m.branch)
    if isinstance(e, ForeignApp):
        impl = ctx.foreigns.get(e.name)
        if impl is None:
            raise ForeignError(f"unknown foreign function {e.name!r}{_at(e.span)}")
        args = eval_seq(ctx, e.args)
        try:
            return impl.apply(args, ctx.graph, ctx.alloc)
        except ForeignError as err:
            raise ForeignError(f"{err}{_at(e.span)}") from None
    if isinstance(e, Fun):
        return ctx.make(VClosure(ctx.env, (), e.elim))
    if isinstance(e, LetRec):
        rec = close_defs(ctx.env, e.defs, ctx.demand, ctx.graph, ctx.alloc)
        return eval_expr(ctx.with_env(ctx.env.extend(rec)), e.body)
    raise EvalError(f"cannot evaluate {e!r}")


# ---------------------------------------------------------------------------
# prelude


def _wrapper_elim(name: str, arity: int) -> VarElim:
    """Eliminator for `fun x1 .. xn -> f(x1, .., xn)` (curried)."""
    params = [f"x{i + 1}" for i in range(arity)]
    kont: Continuation = ForeignApp(name, tuple(Var(p) for p in params))
    for i, p in enumerate(reversed(params)):
        layer = VarElim(p, kont)
        kont = layer if i == arity - 1 else Fun(layer)
    assert isinstance(kont, VarElim)
    return kont


def prelude_bindings(
    graph: GraphBuilder, alloc: Allocator, impls: dict[str, ForeignImpl]
) -> dict[str, Value]:
    """Closure wrappers so built-ins can be passed around as values."""
    out: dict[str, Value] = {}
    empty = Env()
    for name in sorted(impls):
        impl = impls[name]
        elim = _wrapper_elim(name, impl.arity)
        addr = alloc.fresh()
        graph.add_in_star(frozenset(), addr)
        graph.note_label(addr, "<fun>")
        out[name] = Value(VClosure(empty, (), elim), addr)
    return out
