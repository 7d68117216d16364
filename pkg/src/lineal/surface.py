"""Surface syntax: lexer and parser for `.lin` programs.

A program is a sequence of top-level items followed by one result
expression.  Items are either dataset declarations or definition
clauses:

    def total Nil = 0;
    def total (Cons x xs) = x + total xs;
    dataset data;
    total data

Clauses repeating a name pile up into one piecewise definition; `and`
in place of `def` joins a new definition into the same recursive block.
Expressions have let/in, fun, if/then/else, infix operators, records,
projection, lists, and constructor application.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .core import LinealError


class ParseError(LinealError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# tokens

KEYWORDS = {"def", "and", "dataset", "let", "in", "fun", "if", "then", "else"}

# longest first so the lexer never splits a two-character operator
PUNCT = [
    "->", "==", "/=", "<=", ">=", "&&", "||", "++",
    "(", ")", "{", "}", "[", "]", ",", ";", ":", ".", "=", "|",
    "<", ">", "+", "-", "*", "/", "%", "^",
]

BINOPS = {
    "||": ("or", 1, "left"),
    "&&": ("and", 2, "left"),
    "==": ("eq", 3, "left"),
    "/=": ("neq", 3, "left"),
    "<": ("lt", 3, "left"),
    "<=": ("leq", 3, "left"),
    ">": ("gt", 3, "left"),
    ">=": ("geq", 3, "left"),
    "++": ("concat", 4, "left"),
    "+": ("plus", 5, "left"),
    "-": ("minus", 5, "left"),
    "*": ("times", 6, "left"),
    "/": ("div", 6, "left"),
    "%": ("mod", 6, "left"),
    "^": ("pow", 7, "right"),
}


@dataclass(frozen=True)
class Token:
    kind: str  # ident | ctor | int | float | string | punct | keyword | eof
    text: str
    line: int
    col: int


def lex(src: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)
    while i < n:
        ch = src[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if src.startswith("--", i):
            while i < n and src[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            if j < n and src[j] == "." and j + 1 < n and src[j + 1].isdigit():
                j += 1
                while j < n and src[j].isdigit():
                    j += 1
                kind = "float"
            else:
                kind = "int"
            tokens.append(Token(kind, src[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            word = src[i:j]
            if word in KEYWORDS:
                kind = "keyword"
            elif word[0].isupper():
                kind = "ctor"
            else:
                kind = "ident"
            tokens.append(Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == '"':
            j = i + 1
            buf: list[str] = []
            while j < n and src[j] != '"':
                if src[j] == "\n":
                    raise ParseError("unterminated string", start_line, start_col)
                if src[j] == "\\":
                    if j + 1 >= n:
                        raise ParseError("dangling escape", start_line, start_col)
                    esc = src[j + 1]
                    buf.append({"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc, esc))
                    j += 2
                else:
                    buf.append(src[j])
                    j += 1
            if j >= n:
                raise ParseError("unterminated string", start_line, start_col)
            tokens.append(Token("string", "".join(buf), start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        for p in PUNCT:
            if src.startswith(p, i):
                tokens.append(Token("punct", p, start_line, start_col))
                i += len(p)
                col += len(p)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# surface trees


@dataclass(frozen=True)
class PVar:
    name: str
    line: int
    col: int


@dataclass(frozen=True)
class PCtorPat:
    name: str
    args: tuple["Pattern", ...]
    line: int
    col: int


@dataclass(frozen=True)
class PRecordPat:
    fields: tuple[tuple[str, "Pattern"], ...]
    line: int
    col: int


@dataclass(frozen=True)
class PLitPat:
    value: Union[int, float, str]
    line: int
    col: int


Pattern = Union[PVar, PCtorPat, PRecordPat, PLitPat]


@dataclass(frozen=True)
class SVar:
    name: str
    line: int
    col: int


@dataclass(frozen=True)
class SInt:
    value: int


@dataclass(frozen=True)
class SFloat:
    value: float


@dataclass(frozen=True)
class SStr:
    value: str


@dataclass(frozen=True)
class SCtorName:
    name: str
    line: int
    col: int


@dataclass(frozen=True)
class SLet:
    name: str
    bound: "SExpr"
    body: "SExpr"


@dataclass(frozen=True)
class SIf:
    cond: "SExpr"
    then: "SExpr"
    other: "SExpr"


@dataclass(frozen=True)
class SApp:
    fn: "SExpr"
    arg: "SExpr"
    line: int
    col: int


@dataclass(frozen=True)
class SBin:
    op: str  # foreign name, or "neq"
    lhs: "SExpr"
    rhs: "SExpr"
    line: int
    col: int


@dataclass(frozen=True)
class SSection:
    op: str


@dataclass(frozen=True)
class SRecord:
    fields: tuple[tuple[str, "SExpr"], ...]


@dataclass(frozen=True)
class SProj:
    record: "SExpr"
    field: str
    line: int
    col: int


@dataclass(frozen=True)
class SList:
    items: tuple["SExpr", ...]


@dataclass(frozen=True)
class SFun:
    clauses: tuple["Clause", ...]


SExpr = Union[
    SVar, SInt, SFloat, SStr, SCtorName, SLet, SIf, SApp, SBin, SSection,
    SRecord, SProj, SList, SFun,
]


@dataclass(frozen=True)
class Clause:
    patterns: tuple[Pattern, ...]
    body: SExpr
    line: int
    col: int


@dataclass(frozen=True)
class Definition:
    name: str
    clauses: tuple[Clause, ...]
    line: int
    col: int


@dataclass(frozen=True)
class Block:
    """One recursive group of definitions."""

    definitions: tuple[Definition, ...]


@dataclass(frozen=True)
class DatasetDecl:
    name: str
    line: int
    col: int


@dataclass(frozen=True)
class SurfaceProgram:
    items: tuple[Union[Block, DatasetDecl], ...]
    result: SExpr

    def dataset_names(self) -> list[str]:
        return [it.name for it in self.items if isinstance(it, DatasetDecl)]


# ---------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def fail(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.col)

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            raise self.fail(f"expected {want!r}, found {t.text or t.kind!r}")
        return self.next()

    def at_punct(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "punct" and t.text == text

    def at_keyword(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "keyword" and t.text == text

    # -- patterns ----------------------------------------------------------

    def pattern_atom(self) -> Pattern:
        t = self.peek()
        if t.kind == "ident":
            self.next()
            return PVar(t.text, t.line, t.col)
        if t.kind == "ctor":
            self.next()
            return PCtorPat(t.text, (), t.line, t.col)
        if t.kind == "int":
            self.next()
            return PLitPat(int(t.text), t.line, t.col)
        if t.kind == "float":
            self.next()
            return PLitPat(float(t.text), t.line, t.col)
        if t.kind == "string":
            self.next()
            return PLitPat(t.text, t.line, t.col)
        if self.at_punct("("):
            self.next()
            p = self.pattern()
            self.expect("punct", ")")
            return p
        if self.at_punct("{"):
            return self.record_pattern()
        if self.at_punct("["):
            return self.list_pattern()
        raise self.fail(f"expected a pattern, found {t.text or t.kind!r}")

    def pattern(self) -> Pattern:
        t = self.peek()
        if t.kind == "ctor":
            self.next()
            args: list[Pattern] = []
            while self.peek().kind in ("ident", "ctor", "int", "float", "string") or (
                self.peek().kind == "punct" and self.peek().text in ("(", "{", "[")
            ):
                args.append(self.pattern_atom())
            return PCtorPat(t.text, tuple(args), t.line, t.col)
        return self.pattern_atom()

    def record_pattern(self) -> PRecordPat:
        start = self.expect("punct", "{")
        fields: list[tuple[str, Pattern]] = []
        if not self.at_punct("}"):
            while True:
                name_tok = self.expect("ident")
                if self.at_punct(":"):
                    self.next()
                    pat = self.pattern()
                else:
                    pat = PVar(name_tok.text, name_tok.line, name_tok.col)
                fields.append((name_tok.text, pat))
                if self.at_punct(","):
                    self.next()
                    continue
                break
        self.expect("punct", "}")
        return PRecordPat(tuple(fields), start.line, start.col)

    def list_pattern(self) -> Pattern:
        start = self.expect("punct", "[")
        items: list[Pattern] = []
        if not self.at_punct("]"):
            while True:
                items.append(self.pattern())
                if self.at_punct(","):
                    self.next()
                    continue
                break
        self.expect("punct", "]")
        out: Pattern = PCtorPat("Nil", (), start.line, start.col)
        for p in reversed(items):
            out = PCtorPat("Cons", (p, out), start.line, start.col)
        return out

    # -- expressions --------------------------------------------------------

    def expr(self) -> SExpr:
        if self.at_keyword("let"):
            self.next()
            name = self.expect("ident").text
            self.expect("punct", "=")
            bound = self.expr()
            self.expect("keyword", "in")
            body = self.expr()
            return SLet(name, bound, body)
        if self.at_keyword("fun"):
            tok = self.next()
            clauses = [self.fun_clause(tok)]
            while self.at_punct("|"):
                self.next()
                clauses.append(self.fun_clause(tok))
            return SFun(tuple(clauses))
        if self.at_keyword("if"):
            self.next()
            cond = self.expr()
            self.expect("keyword", "then")
            then = self.expr()
            self.expect("keyword", "else")
            other = self.expr()
            return SIf(cond, then, other)
        return self.binary(0)

    def fun_clause(self, tok: Token) -> Clause:
        pats: list[Pattern] = [self.pattern_atom()]
        while not self.at_punct("->"):
            pats.append(self.pattern_atom())
        self.expect("punct", "->")
        body = self.expr()
        return Clause(tuple(pats), body, tok.line, tok.col)

    def binary(self, min_level: int) -> SExpr:
        lhs = self.application()
        while True:
            t = self.peek()
            if t.kind != "punct" or t.text not in BINOPS:
                return lhs
            name, level, assoc = BINOPS[t.text]
            if level < min_level:
                return lhs
            self.next()
            next_min = level + 1 if assoc == "left" else level
            rhs = self.binary(next_min)
            lhs = SBin(name, lhs, rhs, t.line, t.col)

    def application(self) -> SExpr:
        fn = self.postfix()
        while self.starts_atom():
            t = self.peek()
            fn = SApp(fn, self.postfix(), t.line, t.col)
        return fn

    def starts_atom(self) -> bool:
        t = self.peek()
        if t.kind in ("ident", "ctor", "int", "float", "string"):
            return True
        if t.kind == "keyword":
            return False
        return t.kind == "punct" and t.text in ("(", "{", "[")

    def postfix(self) -> SExpr:
        e = self.atom()
        while self.at_punct("."):
            dot = self.next()
            field = self.expect("ident").text
            e = SProj(e, field, dot.line, dot.col)
        return e

    def atom(self) -> SExpr:
        t = self.peek()
        if t.kind == "int":
            self.next()
            return SInt(int(t.text))
        if t.kind == "float":
            self.next()
            return SFloat(float(t.text))
        if t.kind == "string":
            self.next()
            return SStr(t.text)
        if t.kind == "ident":
            self.next()
            return SVar(t.text, t.line, t.col)
        if t.kind == "ctor":
            self.next()
            return SCtorName(t.text, t.line, t.col)
        if self.at_punct("("):
            self.next()
            inner = self.peek()
            # operator section: (+)
            if inner.kind == "punct" and inner.text in BINOPS and self.peek(1).text == ")":
                self.next()
                self.next()
                return SSection(BINOPS[inner.text][0])
            # negative literal: (-2) or (-2.0)
            if (
                inner.kind == "punct"
                and inner.text == "-"
                and self.peek(1).kind in ("int", "float")
                and self.peek(2).text == ")"
            ):
                self.next()
                num = self.next()
                self.next()
                if num.kind == "int":
                    return SInt(-int(num.text))
                return SFloat(-float(num.text))
            e = self.expr()
            self.expect("punct", ")")
            return e
        if self.at_punct("{"):
            start = self.next()
            fields: list[tuple[str, SExpr]] = []
            if not self.at_punct("}"):
                while True:
                    name = self.expect("ident").text
                    self.expect("punct", ":")
                    fields.append((name, self.expr()))
                    if self.at_punct(","):
                        self.next()
                        continue
                    break
            self.expect("punct", "}")
            names = [n for n, _ in fields]
            if len(set(names)) != len(names):
                raise ParseError("duplicate record field", start.line, start.col)
            return SRecord(tuple(fields))
        if self.at_punct("["):
            self.next()
            items: list[SExpr] = []
            if not self.at_punct("]"):
                while True:
                    items.append(self.expr())
                    if self.at_punct(","):
                        self.next()
                        continue
                    break
            self.expect("punct", "]")
            return SList(tuple(items))
        raise self.fail(f"expected an expression, found {t.text or t.kind!r}")

    # -- top level -----------------------------------------------------------

    def program(self) -> SurfaceProgram:
        raw: list[tuple[str, Token, list[Pattern], SExpr]] = []
        datasets: list[DatasetDecl] = []
        when: list[tuple[str, object]] = []  # item order: ("block", idx) | ("data", decl)
        while True:
            if self.at_keyword("dataset"):
                self.next()
                name = self.expect("ident")
                self.expect("punct", ";")
                decl = DatasetDecl(name.text, name.line, name.col)
                datasets.append(decl)
                when.append(("data", decl))
                continue
            if self.at_keyword("def") or self.at_keyword("and"):
                kw = self.next()
                name = self.expect("ident")
                pats: list[Pattern] = []
                while not self.at_punct("="):
                    pats.append(self.pattern_atom())
                self.expect("punct", "=")
                body = self.expr()
                self.expect("punct", ";")
                raw.append((kw.text, name, pats, body))
                when.append(("clause", len(raw) - 1))
                continue
            break
        result = self.expr()
        self.expect("eof")
        return self.group(raw, when, result)

    def group(
        self,
        raw: list[tuple[str, Token, list[Pattern], SExpr]],
        when: list[tuple[str, object]],
        result: SExpr,
    ) -> SurfaceProgram:
        items: list[Union[Block, DatasetDecl]] = []
        block: list[Definition] = []

        def close_block() -> None:
            if block:
                items.append(Block(tuple(block)))
                block.clear()

        for tag, payload in when:
            if tag == "data":
                close_block()
                items.append(payload)  # type: ignore[arg-type]
                continue
            kw, name, pats, body = raw[payload]  # type: ignore[index]
            clause = Clause(tuple(pats), body, name.line, name.col)
            if kw == "def":
                if block and block[-1].name == name.text:
                    last = block[-1]
                    block[-1] = Definition(
                        last.name, last.clauses + (clause,), last.line, last.col
                    )
                else:
                    close_block()
                    block.append(Definition(name.text, (clause,), name.line, name.col))
            else:  # and
                if not block:
                    raise ParseError("'and' without a preceding 'def'", name.line, name.col)
                if block[-1].name == name.text:
                    last = block[-1]
                    block[-1] = Definition(
                        last.name, last.clauses + (clause,), last.line, last.col
                    )
                elif any(d.name == name.text for d in block):
                    raise ParseError(
                        f"duplicate definition {name.text!r} in recursive block",
                        name.line,
                        name.col,
                    )
                else:
                    block.append(Definition(name.text, (clause,), name.line, name.col))
        close_block()
        return SurfaceProgram(tuple(items), result)


def parse(src: str) -> SurfaceProgram:
    """Parse a whole program; raises :class:`ParseError` with position."""
    return _Parser(lex(src)).program()


def parse_expr(src: str) -> SExpr:
    p = _Parser(lex(src))
    e = p.expr()
    p.expect("eof")
    return e
