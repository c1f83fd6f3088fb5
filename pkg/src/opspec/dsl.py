"""Operator-description language: lexer, parser, AST and pretty-printer.

A program is a sequence of ``;``-terminated statements::

    let T = diag { 0: 1, 1: inf };
    let D = diag { seq harmonic(1,1) -> 0, 0: 1 };
    assert drazin_spectrum(D) == {0};
    print poles(T);

Source positions are carried on every node but excluded from equality, so
``parse(format_program(p)) == p`` compares structure only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import OpspecError
from .scalars import ComplexValue, Polynomial, format_polynomial

__all__ = [
    "DslError",
    "ParseError",
    "BindingError",
    "Program",
    "Let",
    "Assert",
    "Print",
    "Query",
    "SetLiteral",
    "FlagLiteral",
    "MatrixExpr",
    "JordanExpr",
    "DiagExpr",
    "PointSpec",
    "SeqSpec",
    "DenseSpec",
    "KindSpec",
    "ShiftExpr",
    "Call",
    "Name",
    "parse",
    "parse_matrix",
    "format_program",
    "format_expr",
    "QUERY_FUNCTIONS",
]

QUERY_FUNCTIONS = (
    "spectrum",
    "drazin_spectrum",
    "poles",
    "ies",
    "asc_spectrum",
    "dsc_spectrum",
    "ld_spectrum",
    "rd_spectrum",
    "algebraic",
    "meromorphic",
    "drazin_inverse",
    "profile",
)
COMBINATORS = ("dsum", "mul", "add", "shiftby", "adj", "poly")


class DslError(OpspecError):
    """An error tied to a source location."""

    def __init__(self, message: str, line: int = 0, col: int = 0, expected=()):
        self.line, self.col = line, col
        self.expected = tuple(sorted(set(expected)))
        self.bare = message
        loc = f"{line}:{col}: " if line else ""
        hint = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{loc}{message}{hint}")


class ParseError(DslError):
    """Lexical or syntactic error."""


class BindingError(DslError):
    """Unbound name, rebinding, or an operand that fails a combinator's rules."""


# ---------------------------------------------------------------------------
# AST

Pos = tuple


def _pos():
    return field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class MatrixExpr:
    rows: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class JordanExpr:
    eigen: tuple  # ((value, (sizes...)), ...)
    sim: Optional[MatrixExpr] = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class KindSpec:
    name: str  # geometric | harmonic | list
    args: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class PointSpec:
    value: ComplexValue
    multiplicity: Union[int, str]  # NAT or "inf"
    pos: Pos = _pos()


@dataclass(frozen=True)
class SeqSpec:
    kind: KindSpec
    limit: ComplexValue
    map: Optional[Polynomial] = None
    skip: tuple = ()
    pos: Pos = _pos()


@dataclass(frozen=True)
class DenseSpec:
    lo: Fraction
    hi: Fraction
    map: Optional[Polynomial] = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class DiagExpr:
    specs: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class ShiftExpr:
    kind: KindSpec
    nilpotent: Optional[int]
    pos: Pos = _pos()


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple  # expressions, then a scalar or polynomial for shiftby/poly
    pos: Pos = _pos()


@dataclass(frozen=True)
class Name:
    ident: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Query:
    fn: str
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class SetLiteral:
    values: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class FlagLiteral:
    value: bool
    pos: Pos = _pos()


@dataclass(frozen=True)
class Let:
    name: str
    expr: object
    pos: Pos = _pos()


@dataclass(frozen=True)
class Assert:
    lhs: Query
    relop: str
    rhs: Union[Query, SetLiteral, FlagLiteral]
    pos: Pos = _pos()


@dataclass(frozen=True)
class Print:
    query: Query
    pos: Pos = _pos()


@dataclass(frozen=True)
class Program:
    statements: tuple = ()


# ---------------------------------------------------------------------------
# lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\.\d+(?:[eE][+-]?\d+)?|\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>->|==|<=|[\[\]{}(),:;=+\-/^])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # num | ident | op | eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", line, i - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, i - line_start + 1))
        i = m.end()
    tokens.append(Token("eof", "", line, i - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.tried: set = set()

    def advance(self):
        self.i += 1
        self.tried.clear()

    # token helpers ---------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts) -> bool:
        t = self.tok
        return t.kind in ("op", "ident") and t.text in texts

    def fail(self, expected, what: Optional[str] = None):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(what or f"unexpected {found}", t.line, t.col, set(expected) | self.tried)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail([repr(text)])
        t = self.tok
        self.advance()
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        self.tried.add(repr(text))
        return False

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.fail(["identifier"])
        t = self.tok
        self.advance()
        return t

    def nat(self) -> int:
        t = self.tok
        if t.kind != "num" or not t.text.isdigit():
            self.fail(["natural number"])
        self.advance()
        return int(t.text)

    def pos(self) -> Pos:
        return (self.tok.line, self.tok.col)

    # statements --------------------------------------------------------------

    def program(self) -> Program:
        stmts = []
        while self.tok.kind != "eof":
            stmts.append(self.statement())
            self.expect(";")
        return Program(tuple(stmts))

    def statement(self):
        pos = self.pos()
        if self.accept("let"):
            name = self.ident().text
            self.expect("=")
            return Let(name, self.expr(), pos)
        if self.accept("assert"):
            lhs = self.query()
            if not self.at("==", "<="):
                self.fail(["'=='", "'<='"])
            relop = self.tok.text
            self.advance()
            if self.at("{"):
                rhs = self.set_literal()
            elif self.at("true", "false"):
                rhs = FlagLiteral(self.tok.text == "true", self.pos())
                self.advance()
            else:
                rhs = self.query()
            return Assert(lhs, relop, rhs, pos)
        if self.accept("print"):
            return Print(self.query(), pos)
        self.fail(["'let'", "'assert'", "'print'"])

    def query(self) -> Query:
        pos = self.pos()
        if not (self.tok.kind == "ident" and self.tok.text in QUERY_FUNCTIONS):
            self.fail([repr(f) for f in QUERY_FUNCTIONS])
        fn = self.tok.text
        self.advance()
        self.expect("(")
        name = self.ident().text
        self.expect(")")
        return Query(fn, name, pos)

    def set_literal(self) -> SetLiteral:
        pos = self.pos()
        self.expect("{")
        values = []
        if not self.at("}"):
            values.append(self.complex())
            while self.accept(","):
                values.append(self.complex())
        self.expect("}")
        return SetLiteral(tuple(values), pos)

    # expressions ------------------------------------------------------------

    def expr(self):
        pos = self.pos()
        t = self.tok
        if t.kind != "ident":
            self.fail(["'matrix'", "'jordan'", "'diag'", "'shift'", "identifier"] + [f"'{c}('" for c in COMBINATORS])
        if t.text == "matrix":
            self.advance()
            return self.matrix_body(pos)
        if t.text == "jordan":
            self.advance()
            return self.jordan(pos)
        if t.text == "diag":
            self.advance()
            return self.diag(pos)
        if t.text == "shift" and self.peek().text == "{":
            self.advance()
            return self.shift(pos)
        if t.text in COMBINATORS and self.peek().text == "(":
            self.advance()
            return self.call(t.text, pos)
        self.advance()
        return Name(t.text, pos)

    def matrix_body(self, pos) -> MatrixExpr:
        self.expect("[")
        rows = [self.row()]
        while self.accept(","):
            rows.append(self.row())
        self.expect("]")
        if any(len(r) != len(rows) for r in rows):
            raise ParseError(f"matrix literal must be square, got {len(rows)} rows of lengths "
                             f"{[len(r) for r in rows]}", pos[0], pos[1], set())
        return MatrixExpr(tuple(rows), pos)

    def row(self) -> tuple:
        self.expect("[")
        vals = [self.complex()]
        while self.accept(","):
            vals.append(self.complex())
        self.expect("]")
        return tuple(vals)

    def jordan(self, pos) -> JordanExpr:
        self.expect("{")
        eigen = [self.jordan_entry()]
        while self.accept(","):
            eigen.append(self.jordan_entry())
        self.expect("}")
        sim = None
        if self.accept("sim"):
            mpos = self.pos()
            self.accept("matrix")
            sim = self.matrix_body(mpos)
        return JordanExpr(tuple(eigen), sim, pos)

    def jordan_entry(self):
        lam = self.complex()
        self.expect(":")
        self.expect("[")
        sizes = [self.nat()]
        while self.accept(","):
            sizes.append(self.nat())
        self.expect("]")
        return (lam, tuple(sizes))

    def diag(self, pos) -> DiagExpr:
        self.expect("{")
        specs = [self.pointspec()]
        while self.accept(","):
            specs.append(self.pointspec())
        self.expect("}")
        return DiagExpr(tuple(specs), pos)

    def pointspec(self):
        pos = self.pos()
        if self.accept("seq"):
            kind = self.kind()
            pmap = self.opt_map()
            skip = ()
            if self.accept("skip"):
                self.expect("[")
                skip = [self.nat()]
                while self.accept(","):
                    skip.append(self.nat())
                self.expect("]")
                skip = tuple(skip)
            self.expect("->")
            return SeqSpec(kind, self.complex(), pmap, skip, pos)
        if self.accept("dense"):
            self.expect("[")
            lo = self.real()
            self.expect(",")
            hi = self.real()
            self.expect("]")
            return DenseSpec(lo, hi, self.opt_map(), pos)
        value = self.complex()
        self.expect(":")
        if self.accept("inf"):
            return PointSpec(value, "inf", pos)
        return PointSpec(value, self.nat(), pos)

    def opt_map(self) -> Optional[Polynomial]:
        if not self.accept("map"):
            return None
        self.expect("(")
        p = self.polynomial()
        self.expect(")")
        return p

    def kind(self) -> KindSpec:
        pos = self.pos()
        if not self.at("geometric", "harmonic", "list"):
            self.fail(["'geometric('", "'harmonic('", "'list('"])
        name = self.tok.text
        self.advance()
        self.expect("(")
        if name == "list":
            args = [self.complex()]
            while self.accept(","):
                args.append(self.complex())
        elif name == "geometric":
            args = [self.complex()]
            self.expect(",")
            args.append(self.complex())
        else:
            args = [self.complex()]
            self.expect(",")
            args.append(self.nat())
        self.expect(")")
        return KindSpec(name, tuple(args), pos)

    def shift(self, pos) -> ShiftExpr:
        self.expect("{")
        self.expect("weights")
        self.expect(":")
        kind = self.kind()
        self.expect(",")
        self.expect("nilpotent")
        self.expect(":")
        nil = None if self.accept("none") else self.nat()
        self.expect("}")
        return ShiftExpr(kind, nil, pos)

    def call(self, fn: str, pos) -> Call:
        self.expect("(")
        if fn == "dsum":
            args = [self.expr()]
            while self.accept(","):
                args.append(self.expr())
        elif fn in ("mul", "add"):
            args = [self.expr()]
            self.expect(",")
            args.append(self.expr())
        elif fn == "adj":
            args = [self.expr()]
        elif fn == "shiftby":
            args = [self.expr()]
            self.expect(",")
            args.append(self.complex())
        else:
            args = [self.expr()]
            self.expect(",")
            args.append(self.polynomial())
        self.expect(")")
        return Call(fn, tuple(args), pos)

    # scalars ----------------------------------------------------------------

    def number(self):
        t = self.tok
        if t.kind != "num":
            self.fail(["number"])
        self.advance()
        if t.text.isdigit():
            val = Fraction(int(t.text))
        else:
            val = float(t.text)
        if self.accept("/"):
            den = self.tok
            if den.kind != "num" or not den.text.isdigit() or int(den.text) == 0:
                self.fail(["nonzero natural number"])
            self.advance()
            val = val / int(den.text)
        return val

    def rational(self):
        neg = False
        if self.at("-", "+"):
            neg = self.tok.text == "-"
            self.advance()
        v = self.number()
        return -v if neg else v

    def real(self) -> Fraction:
        v = self.rational()
        if isinstance(v, float):
            self.fail(["exact rational"], "interval endpoints must be exact rationals")
        return v

    def complex(self) -> ComplexValue:
        re_part = self.rational()
        im_part = Fraction(0)
        if self.accept("i"):
            re_part, im_part = Fraction(0), re_part
        elif self.at("+", "-") and self.peek().text == "i":
            im_part = Fraction(-1 if self.tok.text == "-" else 1)
            self.advance()
            self.advance()
        elif self.at("+", "-") and self.peek().kind == "num":
            save = self.i
            sign = -1 if self.tok.text == "-" else 1
            self.advance()
            mag = self.number()
            if not self.accept("i"):
                self.i = save
            else:
                im_part = sign * mag
        exact = not (isinstance(re_part, float) or isinstance(im_part, float))
        return ComplexValue(re_part, im_part, exact)

    def polynomial(self) -> Polynomial:
        coeffs: dict = {}
        sign = 1
        if self.at("-", "+"):
            sign = -1 if self.tok.text == "-" else 1
            self.advance()
        while True:
            c, k = self.term()
            coeffs[k] = coeffs.get(k, ComplexValue(0)) + (c if sign > 0 else -c)
            if not self.at("+", "-"):
                break
            sign = -1 if self.tok.text == "-" else 1
            self.advance()
        deg = max(coeffs)
        return Polynomial([coeffs.get(k, ComplexValue(0)) for k in range(deg + 1)])

    def term(self):
        coef = None
        if self.accept("("):
            coef = self.complex()
            self.expect(")")
        elif self.tok.kind == "num":
            v = self.number()
            if self.accept("i"):
                coef = ComplexValue(0, v, not isinstance(v, float))
            else:
                coef = ComplexValue(v, 0, not isinstance(v, float))
        if self.accept("x"):
            k = 1
            if self.accept("^"):
                k = self.nat()
            return (coef if coef is not None else ComplexValue(1)), k
        if coef is None:
            self.fail(["coefficient", "'x'"])
        return coef, 0


def parse(text: str) -> Program:
    """Parse program text; raises :class:`ParseError` with location on failure."""
    return _Parser(text).program()


def parse_matrix(text: str) -> MatrixExpr:
    """Parse a bare matrix literal ``[[...], ...]`` (``matrix`` keyword optional)."""
    p = _Parser(text)
    pos = p.pos()
    p.accept("matrix")
    m = p.matrix_body(pos)
    p.accept(";")
    if p.tok.kind != "eof":
        p.fail(["end of input"])
    return m


# ---------------------------------------------------------------------------
# pretty-printer


def _c(v: ComplexValue) -> str:
    return str(v)


def _poly(p: Polynomial) -> str:
    return format_polynomial(p, "x")


def _kind(k: KindSpec) -> str:
    return f"{k.name}({', '.join(str(a) for a in k.args)})"


def _spec(s) -> str:
    if isinstance(s, PointSpec):
        return f"{_c(s.value)}: {s.multiplicity}"
    if isinstance(s, SeqSpec):
        out = f"seq {_kind(s.kind)}"
        if s.map is not None:
            out += f" map({_poly(s.map)})"
        if s.skip:
            out += f" skip[{', '.join(map(str, s.skip))}]"
        return out + f" -> {_c(s.limit)}"
    out = f"dense [{_fmt_real(s.lo)}, {_fmt_real(s.hi)}]"
    if s.map is not None:
        out += f" map({_poly(s.map)})"
    return out


def _fmt_real(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _rows(m: MatrixExpr) -> str:
    return "[" + ", ".join("[" + ", ".join(_c(v) for v in r) + "]" for r in m.rows) + "]"


def format_expr(e) -> str:
    if isinstance(e, MatrixExpr):
        return "matrix " + _rows(e)
    if isinstance(e, JordanExpr):
        body = ", ".join(f"{_c(lam)}: [{', '.join(map(str, sizes))}]" for lam, sizes in e.eigen)
        out = f"jordan {{ {body} }}"
        if e.sim is not None:
            out += " sim " + _rows(e.sim)
        return out
    if isinstance(e, DiagExpr):
        return "diag { " + ", ".join(_spec(s) for s in e.specs) + " }"
    if isinstance(e, ShiftExpr):
        nil = "none" if e.nilpotent is None else str(e.nilpotent)
        return f"shift {{ weights: {_kind(e.kind)}, nilpotent: {nil} }}"
    if isinstance(e, Call):
        if e.fn == "shiftby":
            return f"shiftby({format_expr(e.args[0])}, {_c(e.args[1])})"
        if e.fn == "poly":
            return f"poly({format_expr(e.args[0])}, {_poly(e.args[1])})"
        return f"{e.fn}({', '.join(format_expr(a) for a in e.args)})"
    if isinstance(e, Name):
        return e.ident
    raise TypeError(f"not an expression: {e!r}")


def _query(q: Query) -> str:
    return f"{q.fn}({q.name})"


def format_statement(s) -> str:
    if isinstance(s, Let):
        return f"let {s.name} = {format_expr(s.expr)};"
    if isinstance(s, Print):
        return f"print {_query(s.query)};"
    rhs = s.rhs
    if isinstance(rhs, SetLiteral):
        rhs_s = "{" + ", ".join(_c(v) for v in rhs.values) + "}"
    elif isinstance(rhs, FlagLiteral):
        rhs_s = "true" if rhs.value else "false"
    else:
        rhs_s = _query(rhs)
    return f"assert {_query(s.lhs)} {s.relop} {rhs_s};"


def format_program(p: Program) -> str:
    return "".join(format_statement(s) + "\n" for s in p.statements)
