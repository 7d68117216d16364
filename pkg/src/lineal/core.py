"""Core term language: expressions, eliminators, values, and signatures.

Expressions form a small pure functional calculus.  Functions carry an
eliminator (a pattern-matching trie) instead of a single bound variable,
so one function value can branch on the shape of its argument.  Values
are address-carrying: every constructed part of a value is tagged with
the graph vertex that was allocated when it was built.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Iterator, Optional, Union

Address = int

# (line, column) of the surface syntax a core node came from, when known
Span = Optional[tuple[int, int]]


class LinealError(Exception):
    """Base class for all errors raised by this package."""


class SignatureError(LinealError):
    """An unknown constructor or foreign function was referenced."""


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True)
class ConstructorSig:
    """Arity table for constructors, with an optional datatype grouping.

    ``arities`` maps constructor name to argument count.  ``datatypes``
    optionally maps constructor name to the datatype it belongs to; it is
    only consulted by :func:`lint`, never by evaluation.
    """

    arities: dict[str, int]
    datatypes: Optional[dict[str, str]] = None

    def arity(self, name: str) -> int:
        try:
            return self.arities[name]
        except KeyError:
            raise SignatureError(f"unknown constructor {name!r}") from None

    def datatype(self, name: str) -> Optional[str]:
        return None if self.datatypes is None else self.datatypes.get(name)


@dataclass(frozen=True)
class ForeignSig:
    """Arity table for foreign (built-in) operations."""

    arities: dict[str, int]

    def arity(self, name: str) -> int:
        try:
            return self.arities[name]
        except KeyError:
            raise SignatureError(f"unknown foreign function {name!r}") from None


def base_constructors() -> ConstructorSig:
    """Booleans and cons lists, the constructors every program can use."""
    return ConstructorSig(
        arities={"True": 0, "False": 0, "Nil": 0, "Cons": 2},
        datatypes={"True": "Bool", "False": "Bool", "Nil": "List", "Cons": "List"},
    )


# ---------------------------------------------------------------------------
# expressions

# A continuation is what an eliminator does once its own pattern layer has
# matched: either produce a term, or keep matching with a deeper eliminator.
Continuation = Union["Expr", "Eliminator"]


@dataclass(frozen=True)
class Var:
    name: str
    span: Span = dataclass_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class FloatLit:
    value: float


@dataclass(frozen=True)
class StrLit:
    value: str


@dataclass(frozen=True)
class Let:
    """Non-recursive binding of a single name."""

    name: str
    bound: "Expr"
    body: "Expr"


@dataclass(frozen=True)
class Record:
    """Record construction; fields are kept sorted by name."""

    fields: tuple[tuple[str, "Expr"], ...]

    def __post_init__(self) -> None:
        names = [n for n, _ in self.fields]
        if names != sorted(names):
            object.__setattr__(
                self, "fields", tuple(sorted(self.fields, key=lambda kv: kv[0]))
            )
        if len(set(names)) != len(names):
            raise LinealError(f"duplicate record field in {names}")


@dataclass(frozen=True)
class Project:
    record: "Expr"
    field: str
    span: Span = dataclass_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Ctor:
    """Saturated constructor application."""

    name: str
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class App:
    fn: "Expr"
    arg: "Expr"
    span: Span = dataclass_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ForeignApp:
    """Saturated application of a foreign operation."""

    name: str
    args: tuple["Expr", ...]
    span: Span = dataclass_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Fun:
    """Function literal; the eliminator consumes exactly one argument."""

    elim: "Eliminator"


@dataclass(frozen=True)
class LetRec:
    """Mutually recursive function definitions, name to eliminator."""

    defs: tuple[tuple[str, "Eliminator"], ...]
    body: "Expr"


Expr = Union[
    Var, IntLit, FloatLit, StrLit, Let, Record, Project, Ctor, App, ForeignApp, Fun, LetRec
]


# ---------------------------------------------------------------------------
# eliminators


@dataclass(frozen=True)
class VarElim:
    """Bind the next value to a name and continue."""

    name: str
    kont: Continuation


@dataclass(frozen=True)
class RecordElim:
    """Project the named fields (in declared order) and match each in turn."""

    fields: tuple[str, ...]
    kont: Continuation


@dataclass(frozen=True)
class CtorElim:
    """Branch on constructor; each branch continues over the arguments."""

    branches: tuple[tuple[str, Continuation], ...]

    def branch(self, name: str) -> Optional[Continuation]:
        for c, k in self.branches:
            if c == name:
                return k
        return None


Eliminator = Union[VarElim, RecordElim, CtorElim]


# ---------------------------------------------------------------------------
# values


@dataclass(frozen=True)
class Env:
    """Immutable environment: a frame of bindings over an optional parent.

    Later bindings shadow earlier ones.  ``extend`` is cheap; ``lookup``
    walks the chain from the newest frame outward.
    """

    frame: dict[str, "Value"] = dataclass_field(default_factory=dict)
    parent: Optional["Env"] = None

    def extend(self, bindings: dict[str, "Value"]) -> "Env":
        if not bindings:
            return self
        return Env(frame=bindings, parent=self)

    def lookup(self, name: str) -> Optional["Value"]:
        env: Optional[Env] = self
        while env is not None:
            v = env.frame.get(name)
            if v is not None:
                return v
            env = env.parent
        return None

    def names(self) -> set[str]:
        out: set[str] = set()
        env: Optional[Env] = self
        while env is not None:
            out.update(env.frame)
            env = env.parent
        return out

    def visible_items(self) -> Iterator[tuple[str, "Value"]]:
        """All bindings after shadowing, newest frame first."""
        seen: set[str] = set()
        env: Optional[Env] = self
        while env is not None:
            for name, v in env.frame.items():
                if name not in seen:
                    seen.add(name)
                    yield name, v
            env = env.parent


# Recursive definitions captured by a closure, in declaration order.
RecDefs = tuple[tuple[str, Eliminator], ...]


@dataclass(frozen=True)
class VInt:
    value: int


@dataclass(frozen=True)
class VFloat:
    value: float


@dataclass(frozen=True)
class VStr:
    value: str


@dataclass(frozen=True)
class VRecord:
    fields: tuple[tuple[str, "Value"], ...]

    def get(self, name: str) -> Optional["Value"]:
        for n, v in self.fields:
            if n == name:
                return v
        return None


@dataclass(frozen=True)
class VCtor:
    name: str
    args: tuple["Value", ...]


@dataclass(frozen=True)
class VClosure:
    env: Env
    defs: RecDefs
    elim: Eliminator


RawValue = Union[VInt, VFloat, VStr, VRecord, VCtor, VClosure]


@dataclass(frozen=True)
class Value:
    """A raw value together with the graph vertex where it was built."""

    raw: RawValue
    addr: Address


# ---------------------------------------------------------------------------
# erased values


@dataclass(frozen=True)
class PInt:
    value: int


@dataclass(frozen=True)
class PFloat:
    value: float


@dataclass(frozen=True)
class PStr:
    value: str


@dataclass(frozen=True)
class PRecord:
    fields: tuple[tuple[str, "PlainTerm"], ...]


@dataclass(frozen=True)
class PCtor:
    name: str
    args: tuple["PlainTerm", ...]


@dataclass(frozen=True)
class PFun:
    """Erased closure; all closures collapse to this single token."""


PlainTerm = Union[PInt, PFloat, PStr, PRecord, PCtor, PFun]


def erase(value: Value) -> PlainTerm:
    """Drop addresses (and closure innards) from a value."""
    raw = value.raw
    if isinstance(raw, VInt):
        return PInt(raw.value)
    if isinstance(raw, VFloat):
        return PFloat(raw.value)
    if isinstance(raw, VStr):
        return PStr(raw.value)
    if isinstance(raw, VRecord):
        return PRecord(tuple((n, erase(v)) for n, v in raw.fields))
    if isinstance(raw, VCtor):
        return PCtor(raw.name, tuple(erase(v) for v in raw.args))
    if isinstance(raw, VClosure):
        return PFun()
    raise TypeError(f"not a value: {raw!r}")


def addresses_of(value: Value) -> frozenset[Address]:
    """Every address tagging any part of the value.

    Closures contribute their own address plus the addresses of every
    value captured in their environment (recursively).  Closure capture
    never forms a cycle, because a recursive definition is re-closed at
    call time rather than captured as a back-reference.
    """
    out: set[Address] = set()
    stack = [value]
    seen: set[int] = set()
    while stack:
        v = stack.pop()
        if id(v) in seen:
            continue
        seen.add(id(v))
        out.add(v.addr)
        raw = v.raw
        if isinstance(raw, VRecord):
            stack.extend(fv for _, fv in raw.fields)
        elif isinstance(raw, VCtor):
            stack.extend(raw.args)
        elif isinstance(raw, VClosure):
            stack.extend(fv for _, fv in raw.env.visible_items())
    return frozenset(out)


# ---------------------------------------------------------------------------
# validation


def _consumes(kont: Continuation, sig: ConstructorSig, problems: list[str]) -> Optional[int]:
    """Stack entries a continuation consumes, or None if inconsistent.

    A term consumes nothing; an eliminator consumes one entry plus
    whatever its continuation still needs, minus anything it pushes back
    (record fields, constructor arguments).  All branches of a
    constructor eliminator must agree.
    """
    if not isinstance(kont, (VarElim, RecordElim, CtorElim)):
        return 0
    if isinstance(kont, VarElim):
        inner = _consumes(kont.kont, sig, problems)
        return None if inner is None else 1 + inner
    if isinstance(kont, RecordElim):
        inner = _consumes(kont.kont, sig, problems)
        if inner is None:
            return None
        if inner < len(kont.fields):
            problems.append(
                f"record eliminator on {list(kont.fields)} continues into something"
                f" consuming only {inner} values"
            )
            return None
        return 1 + inner - len(kont.fields)
    needs: set[int] = set()
    for cname, branch in kont.branches:
        try:
            arity = sig.arity(cname)
        except SignatureError as exc:
            problems.append(str(exc))
            continue
        inner = _consumes(branch, sig, problems)
        if inner is None:
            continue
        if inner < arity:
            problems.append(
                f"branch for {cname} consumes {inner} values but the constructor"
                f" carries {arity}"
            )
            continue
        needs.add(1 + inner - arity)
    if len(needs) > 1:
        problems.append(
            f"constructor eliminator branches disagree on depth: {sorted(needs)}"
        )
        return None
    return needs.pop() if needs else 1


def children(e: Expr) -> tuple[Expr, ...]:
    """Immediate subexpressions, in evaluation order."""
    if isinstance(e, Let):
        return (e.bound, e.body)
    if isinstance(e, Record):
        return tuple(v for _, v in e.fields)
    if isinstance(e, Project):
        return (e.record,)
    if isinstance(e, Ctor):
        return e.args
    if isinstance(e, App):
        return (e.fn, e.arg)
    if isinstance(e, ForeignApp):
        return e.args
    if isinstance(e, LetRec):
        return (e.body,)
    return ()


def _expr_elims(e: Expr) -> Iterator[Eliminator]:
    stack: list[Expr] = [e]
    while stack:
        cur = stack.pop()
        stack.extend(children(cur))
        if isinstance(cur, Fun):
            yield cur.elim
        elif isinstance(cur, LetRec):
            for _, elim in cur.defs:
                yield elim


def _elim_terms(elim: Eliminator) -> Iterator[Expr]:
    stack: list[Continuation] = [elim]
    while stack:
        k = stack.pop()
        if isinstance(k, VarElim) or isinstance(k, RecordElim):
            stack.append(k.kont)
        elif isinstance(k, CtorElim):
            stack.extend(branch for _, branch in k.branches)
        else:
            yield k


def validate(e: Expr, sig: ConstructorSig, fsig: ForeignSig) -> list[str]:
    """Saturation and depth-consistency diagnostics for an expression.

    Returns an empty list iff every constructor and foreign application
    is saturated against its signature and every eliminator reachable in
    the expression consumes exactly one argument value.
    """
    problems: list[str] = []
    stack: list[Expr] = [e]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Ctor):
            try:
                want = sig.arity(cur.name)
                if want != len(cur.args):
                    problems.append(
                        f"constructor {cur.name} applied to {len(cur.args)} args, expects {want}"
                    )
            except SignatureError as exc:
                problems.append(str(exc))
        elif isinstance(cur, ForeignApp):
            try:
                want = fsig.arity(cur.name)
                if want != len(cur.args):
                    problems.append(
                        f"foreign {cur.name} applied to {len(cur.args)} args, expects {want}"
                    )
            except SignatureError as exc:
                problems.append(str(exc))
        stack.extend(children(cur))
        elims: list[Eliminator] = []
        if isinstance(cur, Fun):
            elims = [cur.elim]
        elif isinstance(cur, LetRec):
            elims = [elim for _, elim in cur.defs]
        for elim in elims:
            got = _consumes(elim, sig, problems)
            if got is not None and got != 1:
                problems.append(f"eliminator consumes {got} values, a function takes 1")
            for term in _elim_terms(elim):
                stack.append(term)
    return problems


def lint(e: Expr, sig: ConstructorSig) -> list[str]:
    """Style warnings: constructor eliminators mixing datatypes."""
    warnings: list[str] = []
    for elim in _all_elims(e):
        if isinstance(elim, CtorElim) and sig.datatypes:
            dts = {sig.datatype(c) for c, _ in elim.branches}
            dts.discard(None)
            if len(dts) > 1:
                warnings.append(
                    f"eliminator branches span datatypes {sorted(dts)}: "
                    + ", ".join(c for c, _ in elim.branches)
                )
    return warnings


def _all_elims(e: Expr) -> Iterator[Eliminator]:
    for elim in _expr_elims(e):
        stack: list[Continuation] = [elim]
        while stack:
            k = stack.pop()
            if isinstance(k, (VarElim, RecordElim)):
                yield k
                stack.append(k.kont)
            elif isinstance(k, CtorElim):
                yield k
                stack.extend(b for _, b in k.branches)
            else:
                for inner in _expr_elims(k):
                    stack.append(inner)


# ---------------------------------------------------------------------------
# canonical text form


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def expr_text(e: Expr) -> str:
    """Stable, parenthesized rendering of a core expression."""
    if isinstance(e, Var):
        return e.name
    if isinstance(e, IntLit):
        return repr(e.value)
    if isinstance(e, FloatLit):
        return repr(e.value)
    if isinstance(e, StrLit):
        return _quote(e.value)
    if isinstance(e, Let):
        return f"(let {e.name} = {expr_text(e.bound)} in {expr_text(e.body)})"
    if isinstance(e, Record):
        inner = ", ".join(f"{n}: {expr_text(v)}" for n, v in e.fields)
        return "{" + inner + "}"
    if isinstance(e, Project):
        return f"{expr_text(e.record)}.{e.field}"
    if isinstance(e, Ctor):
        if not e.args:
            return e.name
        return "(" + " ".join([e.name] + [expr_text(a) for a in e.args]) + ")"
    if isinstance(e, App):
        return f"({expr_text(e.fn)} {expr_text(e.arg)})"
    if isinstance(e, ForeignApp):
        return "(%" + " ".join([e.name] + [expr_text(a) for a in e.args]) + ")"
    if isinstance(e, Fun):
        return f"(fun {elim_text(e.elim)})"
    if isinstance(e, LetRec):
        defs = "; ".join(f"{n} = {elim_text(s)}" for n, s in e.defs)
        return f"(letrec {defs} in {expr_text(e.body)})"
    raise TypeError(f"not an expression: {e!r}")


def _kont_text(k: Continuation) -> str:
    if isinstance(k, (VarElim, RecordElim, CtorElim)):
        return elim_text(k)
    return "-> " + expr_text(k)


def elim_text(elim: Eliminator) -> str:
    if isinstance(elim, VarElim):
        return f"{elim.name} {_kont_text(elim.kont)}"
    if isinstance(elim, RecordElim):
        return "{" + ", ".join(elim.fields) + "} " + _kont_text(elim.kont)
    if isinstance(elim, CtorElim):
        inner = " | ".join(f"{c} {_kont_text(k)}" for c, k in elim.branches)
        return "[" + inner + "]"
    raise TypeError(f"not an eliminator: {elim!r}")


def _plain_list(term: PlainTerm) -> Optional[list[PlainTerm]]:
    items: list[PlainTerm] = []
    while isinstance(term, PCtor):
        if term.name == "Nil" and not term.args:
            return items
        if term.name == "Cons" and len(term.args) == 2:
            items.append(term.args[0])
            term = term.args[1]
            continue
        return None
    return None


def plain_text(term: PlainTerm) -> str:
    """Stable rendering of an erased value; cons chains print as lists."""
    if isinstance(term, PInt):
        return repr(term.value)
    if isinstance(term, PFloat):
        return repr(term.value)
    if isinstance(term, PStr):
        return _quote(term.value)
    if isinstance(term, PFun):
        return "<fun>"
    if isinstance(term, PRecord):
        inner = ", ".join(f"{n}: {plain_text(v)}" for n, v in term.fields)
        return "{" + inner + "}"
    if isinstance(term, PCtor):
        items = _plain_list(term)
        if items is not None:
            return "[" + ", ".join(plain_text(x) for x in items) + "]"
        if not term.args:
            return term.name
        return "(" + " ".join([term.name] + [plain_text(a) for a in term.args]) + ")"
    raise TypeError(f"not a plain term: {term!r}")
