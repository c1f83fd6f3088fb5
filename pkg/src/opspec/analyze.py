"""Evaluate parsed programs into operators, answer queries, check assertions.

Exit codes follow the command-line contract: 0 success, 1 a failed
assertion, 2 a parse/binding/compatibility error, 3 numeric ambiguity or a
spectrum that does not factor over the Gaussian rationals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from . import dsl
from .dsl import (
    Assert,
    BindingError,
    Call,
    DenseSpec,
    DiagExpr,
    FlagLiteral,
    JordanExpr,
    KindSpec,
    Let,
    MatrixExpr,
    Name,
    PointSpec,
    Print,
    Program,
    Query,
    SeqSpec,
    SetLiteral,
    ShiftExpr,
)
from .errors import (
    IncompatibleOperands,
    IrrationalSpectrum,
    NonCommuting,
    NotFiniteRank,
    NumericAmbiguity,
    OpspecError,
    UnsupportedImage,
)
from .matrix import GaussianMatrix, JordanPresentation, drazin_inverse, index_at_zero
from .multiplication import MAX_EXACT_DIM, duality_report
from .operators import (
    Atom,
    Dense,
    DiagonalBlock,
    MatrixBlock,
    Operator,
    Seq,
    ShiftBlock,
    SpectralProfile,
    combine,
    spectral_profile,
)
from .scalars import DEFAULT_TF, ComplexValue, Polynomial, ToleranceFrame, format_polynomial
from .spectra import INF, Family, PoleSet, SpectralSet, includes, pole_relation

__all__ = [
    "EXIT_OK",
    "EXIT_ASSERTION",
    "EXIT_PARSE",
    "EXIT_NUMERIC",
    "evaluate_expr",
    "operator_to_expr",
    "operator_to_dsl",
    "profile_to_json",
    "set_to_json",
    "Analysis",
    "analyze",
    "analyze_text",
    "exit_code_for",
]

EXIT_OK, EXIT_ASSERTION, EXIT_PARSE, EXIT_NUMERIC = 0, 1, 2, 3

X = Polynomial.x()

SET_QUERIES = (
    "spectrum",
    "drazin_spectrum",
    "poles",
    "ies",
    "asc_spectrum",
    "dsc_spectrum",
    "ld_spectrum",
    "rd_spectrum",
)
FLAG_QUERIES = ("algebraic", "meromorphic")


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (NumericAmbiguity, IrrationalSpectrum)):
        return EXIT_NUMERIC
    if isinstance(exc, OpspecError):
        return EXIT_PARSE
    raise exc


# ---------------------------------------------------------------------------
# expressions -> operators


def _binding_error(node, message: str) -> BindingError:
    line, col = getattr(node, "pos", (0, 0))
    return BindingError(message, line, col)


def _kind_family_map(kind: KindSpec, node) -> tuple[str, object, Polynomial]:
    c = kind.args[0]
    if kind.name == "geometric":
        return "geometric", kind.args[1], Polynomial([0, c])
    if kind.name == "harmonic":
        return "harmonic", kind.args[1], Polynomial([0, c])
    raise _binding_error(node, f"{kind.name}(...) has no base sequence")


def _components(spec) -> list:
    if isinstance(spec, PointSpec):
        mult = INF if spec.multiplicity == "inf" else spec.multiplicity
        if mult == 0:
            raise _binding_error(spec, "multiplicity must be positive")
        return [Atom(spec.value, mult)]
    if isinstance(spec, DenseSpec):
        if not spec.lo < spec.hi:
            raise _binding_error(spec, "dense interval requires lo < hi")
        return [Dense(spec.lo, spec.hi, spec.map or X)]
    pmap = spec.map or X
    if spec.kind.name == "list":
        if spec.skip:
            raise _binding_error(spec, "skip applies to geometric/harmonic sequences only")
        vals = [pmap(v) for v in spec.kind.args]
        limit = pmap(spec.limit) if spec.map is not None else spec.limit
        return [Atom(v, 1) for v in vals] + [Atom(limit, INF)]
    kind, param, base = _kind_family_map(spec.kind, spec)
    full = pmap.compose(base)
    if full.is_constant():
        raise _binding_error(spec, "sequence map collapses to a constant")
    if full.coeff(0) != spec.limit:
        raise _binding_error(
            spec, f"declared limit {spec.limit} differs from the sequence limit {full.coeff(0)}"
        )
    first = 0 if kind == "geometric" else 1
    if any(k < first for k in spec.skip):
        raise _binding_error(spec, f"skip indices start at {first}")
    try:
        seq = Seq(kind, param, full, frozenset(spec.skip))
        seq.family()
    except ValueError as exc:
        raise _binding_error(spec, str(exc)) from None
    return [seq]


def evaluate_expr(expr, env: Optional[dict] = None) -> Operator:
    """Turn an expression node into a normalized :class:`Operator`."""
    env = env or {}
    try:
        return _eval(expr, env)
    except (IncompatibleOperands, NotFiniteRank, NonCommuting, UnsupportedImage) as exc:
        raise _binding_error(expr, str(exc)) from None


def _eval(e, env) -> Operator:
    if isinstance(e, Name):
        if e.ident not in env:
            raise _binding_error(e, f"unbound name {e.ident!r}")
        return env[e.ident]
    try:
        if isinstance(e, MatrixExpr):
            return Operator((MatrixBlock(GaussianMatrix(e.rows)),))
        if isinstance(e, JordanExpr):
            n = sum(sum(sizes) for _, sizes in e.eigen)
            sim = GaussianMatrix(e.sim.rows) if e.sim is not None else GaussianMatrix.identity(n)
            return Operator((MatrixBlock.of(JordanPresentation(e.eigen, sim)),))
        if isinstance(e, DiagExpr):
            comps = [c for spec in e.specs for c in _components(spec)]
            return Operator((DiagonalBlock(tuple(comps)),))
        if isinstance(e, ShiftExpr):
            if e.kind.name == "list":
                raise _binding_error(e, "shift weights must be geometric or harmonic")
            return Operator((ShiftBlock(e.kind.name, e.kind.args, e.nilpotent),))
    except ValueError as exc:
        raise _binding_error(e, str(exc)) from None
    if isinstance(e, Call):
        try:
            if e.fn == "dsum":
                return combine("direct_sum", *[_eval(a, env) for a in e.args])
            if e.fn in ("mul", "add"):
                return combine(e.fn, _eval(e.args[0], env), _eval(e.args[1], env))
            if e.fn == "adj":
                return combine("adjoint", _eval(e.args[0], env))
            if e.fn == "shiftby":
                return combine("scalar_shift", _eval(e.args[0], env), lam=e.args[1])
            return combine("poly", _eval(e.args[0], env), p=e.args[1])
        except (IncompatibleOperands, UnsupportedImage) as exc:
            raise _binding_error(e, str(exc)) from None
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# operators -> expressions


def _matrix_expr(M: GaussianMatrix) -> MatrixExpr:
    return MatrixExpr(tuple(tuple(r) for r in M.rows()))


def _block_expr(b):
    if isinstance(b, MatrixBlock):
        if b.presentation is not None:
            pres = b.presentation
            return JordanExpr(pres.eigen_data, _matrix_expr(pres.similarity))
        return _matrix_expr(b.matrix)
    if isinstance(b, DiagonalBlock):
        specs = []
        for c in b.components:
            if isinstance(c, Atom):
                specs.append(PointSpec(c.value, "inf" if c.multiplicity == INF else c.multiplicity))
            elif isinstance(c, Seq):
                one = ComplexValue(1)
                specs.append(
                    SeqSpec(
                        KindSpec(c.kind, (one, c.param)),
                        c.map.coeff(0),
                        None if c.map == X else c.map,
                        tuple(sorted(c.skip)),
                    )
                )
            else:
                specs.append(DenseSpec(c.lo, c.hi, None if c.map == X else c.map))
        return DiagExpr(tuple(specs))
    shift = ShiftExpr(KindSpec(b.weight_kind, b.weight_params), b.nilpotent)
    node = Call("adj", (shift,)) if b.adjoint else shift
    if b.map == X:
        return node
    return Call("poly", (node, b.map))


def operator_to_expr(op: Operator):
    if len(op.blocks) == 1:
        return _block_expr(op.blocks[0])
    return Call("dsum", tuple(_block_expr(b) for b in op.blocks))


def operator_to_dsl(op: Operator) -> str:
    return dsl.format_expr(operator_to_expr(op))


# ---------------------------------------------------------------------------
# JSON serialization


def _scalar(z: ComplexValue) -> str:
    return str(z)


def _family_json(f: Family) -> dict:
    out = {
        "kind": "sequence",
        "base": f.kind,
        "param": str(f.param),
        "map": format_polynomial(f.map),
        "limit": _scalar(f.limit),
        "limit_included": f.include_limit,
    }
    if f.skip:
        out["skip"] = sorted(f.skip)
    if f.excluded:
        out["excluded"] = [_scalar(z) for z in sorted(f.excluded, key=lambda z: z.sort_key())]
    if f.excluded_segments:
        out["excluded_segments"] = [[_scalar(ComplexValue(s.lo)), _scalar(ComplexValue(s.hi))] for s in f.excluded_segments]
    return out


def set_to_json(S: SpectralSet) -> list:
    out = []
    for p in S.points:
        item = {"kind": "point", "value": _scalar(p.value)}
        item["multiplicity"] = "inf" if p.multiplicity == INF else p.multiplicity
        if not p.attained:
            item["attained"] = False
        out.append(item)
    out += [_family_json(f) for f in S.families]
    out += [
        {"kind": "segment", "lo": _scalar(ComplexValue(s.lo)), "hi": _scalar(ComplexValue(s.hi))}
        for s in S.segments
    ]
    return out


def poles_to_json(P: PoleSet) -> list:
    out = [{"point": _scalar(z), "order": k} for z, k in P.finite]
    out += [{"family": _family_json(f), "order": 1} for f in P.families]
    return out


def profile_to_json(op: Operator, prof: SpectralProfile, tf: ToleranceFrame = DEFAULT_TF) -> dict:
    algebraic = {"flag": prof.algebraic}
    if prof.min_poly is not None:
        algebraic["min_poly"] = format_polynomial(prof.min_poly)
    out = {
        "sigma": set_to_json(prof.sigma),
        "iso": set_to_json(prof.iso),
        "acc": set_to_json(prof.acc),
        "poles": poles_to_json(prof.poles),
        "drazin_spectrum": set_to_json(prof.drazin_spectrum),
        "ies": set_to_json(prof.ies),
        "asc_spectrum": set_to_json(prof.asc_spectrum),
        "dsc_spectrum": set_to_json(prof.dsc_spectrum),
        "ld_spectrum": set_to_json(prof.ld_spectrum),
        "rd_spectrum": set_to_json(prof.rd_spectrum),
        "countable": prof.countable,
        "algebraic": algebraic,
        "meromorphic": prof.meromorphic,
    }
    if op.is_matrix():
        M = op.as_matrix()
        out["drazin_index_at_0"] = index_at_zero(M, tf)
        if len(op.blocks) == 1 and M.n <= MAX_EXACT_DIM:
            rep = duality_report(M, tf)
            out["mult_duality"] = {
                "holds": rep.holds,
                "hermitian": rep.hermitian,
                "checks": [
                    {"eigenvalue": _scalar(c.eigenvalue), "quantity": c.quantity, "values": list(c.values)}
                    for c in rep.checks
                ],
            }
    return out


def _matrix_json(M: GaussianMatrix) -> list:
    return [[_scalar(v) for v in row] for row in M.rows()]


# ---------------------------------------------------------------------------
# analysis


@dataclass
class Analysis:
    """Outcome of running a program."""

    operators: dict = field(default_factory=dict)
    queries: list = field(default_factory=list)
    assertions: list = field(default_factory=list)
    error: Optional[str] = None
    exit_code: int = EXIT_OK

    def to_json(self) -> str:
        body = {"operators": self.operators, "queries": self.queries, "assertions": self.assertions}
        if self.error is not None:
            body["error"] = self.error
        return json.dumps(body, indent=2) + "\n"

    def to_text(self) -> str:
        lines = []
        for q in self.queries:
            lines.append(f"{q['query']} = {q['text']}")
        for a in self.assertions:
            status = "ok" if a["holds"] else "FAILED"
            lines.append(f"assert {a['assertion']}: {status}")
            if not a["holds"]:
                lines.append(f"  left:  {a['left']}")
                lines.append(f"  right: {a['right']}")
        if self.error is not None:
            lines.append(f"error: {self.error}")
        return "".join(line + "\n" for line in lines)


class _Session:
    def __init__(self, tf: ToleranceFrame):
        self.tf = tf
        self.env: dict = {}
        self.profiles: dict = {}

    def operator(self, q) -> Operator:
        if q.name not in self.env:
            raise _binding_error(q, f"unbound name {q.name!r}")
        return self.env[q.name]

    def profile(self, q) -> SpectralProfile:
        if q.name not in self.profiles:
            try:
                self.profiles[q.name] = spectral_profile(self.operator(q), self.tf)
            except UnsupportedImage as exc:
                raise _binding_error(q, str(exc)) from None
        return self.profiles[q.name]

    def value(self, q: Query):
        """Returns ``(python value, text, json)`` for a query."""
        if q.fn == "drazin_inverse":
            op = self.operator(q)
            if not op.is_matrix():
                raise _binding_error(q, "drazin_inverse needs a finite-dimensional operator")
            res = drazin_inverse(op.as_matrix(), self.tf)
            text = f"{res.inverse} (index {res.index})"
            return res, text, {"inverse": _matrix_json(res.inverse), "index": res.index}
        prof = self.profile(q)
        if q.fn == "profile":
            js = profile_to_json(self.operator(q), prof, self.tf)
            return prof, json.dumps(js), js
        if q.fn == "poles":
            return prof.poles, str(prof.poles), poles_to_json(prof.poles)
        if q.fn == "algebraic":
            text = "true" if prof.algebraic else "false"
            if prof.min_poly is not None:
                text += f" (min poly {format_polynomial(prof.min_poly)})"
            js = {"flag": prof.algebraic}
            if prof.min_poly is not None:
                js["min_poly"] = format_polynomial(prof.min_poly)
            return prof.algebraic, text, js
        if q.fn == "meromorphic":
            return prof.meromorphic, "true" if prof.meromorphic else "false", prof.meromorphic
        S = {
            "spectrum": prof.sigma,
            "drazin_spectrum": prof.drazin_spectrum,
            "ies": prof.ies,
            "asc_spectrum": prof.asc_spectrum,
            "dsc_spectrum": prof.dsc_spectrum,
            "ld_spectrum": prof.ld_spectrum,
            "rd_spectrum": prof.rd_spectrum,
        }[q.fn]
        return S, str(S), set_to_json(S)

    def check(self, a: Assert) -> tuple[bool, str, str]:
        lhs, rhs = a.lhs, a.rhs
        if lhs.fn in ("drazin_inverse", "profile") or (isinstance(rhs, Query) and rhs.fn in ("drazin_inverse", "profile")):
            raise _binding_error(a, "drazin_inverse and profile cannot appear in assertions")
        lval, ltext, _ = self.value(lhs)
        if lhs.fn in FLAG_QUERIES:
            if isinstance(rhs, SetLiteral) or (isinstance(rhs, Query) and rhs.fn not in FLAG_QUERIES):
                raise _binding_error(a, "flag queries compare only with flags")
            if a.relop != "==":
                raise _binding_error(a, "flags support only '=='")
            rval = rhs.value if isinstance(rhs, FlagLiteral) else self.value(rhs)[0]
            return lval == rval, ltext, "true" if rval else "false"
        if isinstance(rhs, FlagLiteral) or (isinstance(rhs, Query) and rhs.fn in FLAG_QUERIES):
            raise _binding_error(a, "set queries compare only with sets")
        if isinstance(rhs, SetLiteral):
            rset = SpectralSet.of(*rhs.values)
            rtext = str(rset)
            rval = rset
        else:
            rval, rtext, _ = self.value(rhs)
        if a.relop == "==" and isinstance(lval, PoleSet) and isinstance(rval, PoleSet):
            return pole_relation(lval, rval, self.tf), ltext, rtext
        lset = lval.as_set() if isinstance(lval, PoleSet) else lval
        rset = rval.as_set() if isinstance(rval, PoleSet) else rval
        verdicts = [includes(rset, lset, self.tf)]
        if a.relop == "==":
            verdicts.append(includes(lset, rset, self.tf))
        if False in verdicts:
            return False, ltext, rtext
        if None in verdicts:
            raise NumericAmbiguity(f"cannot decide {dsl.format_statement(a)}")
        return True, ltext, rtext


def analyze(program: Program, tf: ToleranceFrame = DEFAULT_TF) -> Analysis:
    """Run every statement; errors stop evaluation and set the exit code."""
    out = Analysis()
    sess = _Session(tf)
    try:
        for stmt in program.statements:
            if isinstance(stmt, Let):
                if stmt.name in sess.env:
                    raise _binding_error(stmt, f"name {stmt.name!r} is already bound")
                sess.env[stmt.name] = evaluate_expr(stmt.expr, sess.env)
            elif isinstance(stmt, Print):
                q = stmt.query
                _, text, js = sess.value(q)
                out.queries.append({"query": f"{q.fn}({q.name})", "result": js, "text": text})
                if q.name not in out.operators and q.fn != "drazin_inverse":
                    out.operators[q.name] = profile_to_json(sess.operator(q), sess.profile(q), tf)
            else:
                holds, ltext, rtext = sess.check(stmt)
                out.assertions.append(
                    {
                        "assertion": dsl.format_statement(stmt)[len("assert "):-1],
                        "holds": holds,
                        "left": ltext,
                        "right": rtext,
                    }
                )
    except OpspecError as exc:
        out.error = str(exc)
        out.exit_code = exit_code_for(exc)
        return out
    if any(not a["holds"] for a in out.assertions):
        out.exit_code = EXIT_ASSERTION
    return out


def analyze_text(text: str, tf: ToleranceFrame = DEFAULT_TF) -> Analysis:
    try:
        program = dsl.parse(text)
    except OpspecError as exc:
        return Analysis(error=str(exc), exit_code=EXIT_PARSE)
    return analyze(program, tf)
