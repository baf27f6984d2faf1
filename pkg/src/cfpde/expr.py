"""Symbolic scalar expressions in the parameters theta_1..theta_d and time t.

The expression language is deliberately tiny: complex constants, the
variables ``t`` and ``theta_k``, sums, products, integer powers, negation,
and the unary functions sin/cos/exp.  It is closed under differentiation,
which is all the rest of the package needs for coefficient functions and
symbolic input signals.

Simplification is local rewriting only (constant folding, 0/1 identities,
flattening of nested sums/products).  No canonical form is attempted;
modules that need equality checks compare by evaluation.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

__all__ = [
    "Expr", "Const", "Var", "Add", "Mul", "Pow", "Neg", "Sin", "Cos", "Exp",
    "ExprError", "ParseError", "EvalError", "PoleError",
    "const", "var", "add", "mul", "neg", "sub", "intpow", "sin", "cos", "exp",
    "parse", "to_string", "simplify", "differentiate", "evaluate",
    "variables", "theta_indices", "depends_on", "as_expr",
]

MAX_EXPONENT = 2 ** 31
_IMAG_DISPLAY_EPS = 1e-12


class ExprError(Exception):
    """Malformed expression construction or use."""


class ParseError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class EvalError(ExprError):
    """Evaluation failure (unbound variable, domain error)."""


class PoleError(EvalError):
    """Zero raised to a negative power."""


@dataclass(frozen=True)
class Const:
    value: complex


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Add:
    terms: tuple["Expr", ...]


@dataclass(frozen=True)
class Mul:
    factors: tuple["Expr", ...]


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Sin:
    arg: "Expr"


@dataclass(frozen=True)
class Cos:
    arg: "Expr"


@dataclass(frozen=True)
class Exp:
    arg: "Expr"


Expr = Union[Const, Var, Add, Mul, Pow, Neg, Sin, Cos, Exp]

ZERO = Const(0j)
ONE = Const(1 + 0j)

_THETA_RE = re.compile(r"theta_([1-9][0-9]*)$")


def _is_zero(e: Expr) -> bool:
    return isinstance(e, Const) and e.value == 0


def _is_one(e: Expr) -> bool:
    return isinstance(e, Const) and e.value == 1


# ---------------------------------------------------------------------------
# smart constructors (these do the local simplification)

def const(value) -> Const:
    return Const(complex(value))


def as_expr(value) -> Expr:
    """Coerce a number into a Const; pass expressions through."""
    if isinstance(value, (int, float, complex)):
        return const(value)
    if isinstance(value, (Const, Var, Add, Mul, Pow, Neg, Sin, Cos, Exp)):
        return value
    raise ExprError(f"cannot interpret {value!r} as an expression")


def var(name: str) -> Var:
    if name != "t" and not _THETA_RE.match(name):
        raise ExprError(f"invalid variable name {name!r}")
    return Var(name)


def add(*terms) -> Expr:
    flat: list[Expr] = []
    acc = 0j
    for term in terms:
        term = as_expr(term)
        if isinstance(term, Add):
            inner_const = 0j
            for sub_t in term.terms:
                if isinstance(sub_t, Const):
                    inner_const += sub_t.value
                else:
                    flat.append(sub_t)
            acc += inner_const
        elif isinstance(term, Const):
            acc += term.value
        else:
            flat.append(term)
    if acc != 0:
        flat.append(Const(acc))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(tuple(flat))


def mul(*factors) -> Expr:
    flat: list[Expr] = []
    acc = 1 + 0j
    sign = 1
    for factor in factors:
        factor = as_expr(factor)
        while isinstance(factor, Neg):
            sign = -sign
            factor = factor.arg
        if isinstance(factor, Mul):
            for sub_f in factor.factors:
                if isinstance(sub_f, Const):
                    acc *= sub_f.value
                else:
                    flat.append(sub_f)
        elif isinstance(factor, Const):
            acc *= factor.value
        else:
            flat.append(factor)
    acc *= sign
    if acc == 0:
        return ZERO
    if acc == -1 and flat:
        body = flat[0] if len(flat) == 1 else Mul(tuple(flat))
        return Neg(body)
    if acc != 1:
        flat.insert(0, Const(acc))
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    return Mul(tuple(flat))


def neg(e) -> Expr:
    e = as_expr(e)
    if isinstance(e, Const):
        return Const(-e.value)
    if isinstance(e, Neg):
        return e.arg
    return Neg(e)


def sub(a, b) -> Expr:
    return add(a, neg(b))


def intpow(base, exponent: int) -> Expr:
    base = as_expr(base)
    if not isinstance(exponent, int):
        raise ExprError("exponents must be integers")
    if abs(exponent) > MAX_EXPONENT:
        raise ExprError(f"exponent {exponent} exceeds the supported range")
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if exponent < 0 and not isinstance(base, (Var, Const)):
        raise ExprError("negative exponents require a variable or constant base")
    if isinstance(base, Const):
        if base.value == 0 and exponent < 0:
            raise PoleError("zero raised to a negative power")
        return Const(base.value ** exponent)
    return Pow(base, exponent)


def sin(e) -> Expr:
    e = as_expr(e)
    if isinstance(e, Const):
        return Const(cmath.sin(e.value))
    return Sin(e)


def cos(e) -> Expr:
    e = as_expr(e)
    if isinstance(e, Const):
        return Const(cmath.cos(e.value))
    return Cos(e)


def exp(e) -> Expr:
    e = as_expr(e)
    if isinstance(e, Const):
        return Const(cmath.exp(e.value))
    return Exp(e)


def simplify(e: Expr) -> Expr:
    """Rebuild the tree through the smart constructors."""
    match e:
        case Const() | Var():
            return e
        case Add(terms):
            return add(*(simplify(t) for t in terms))
        case Mul(factors):
            return mul(*(simplify(f) for f in factors))
        case Pow(base, exponent):
            return intpow(simplify(base), exponent)
        case Neg(arg):
            return neg(simplify(arg))
        case Sin(arg):
            return sin(simplify(arg))
        case Cos(arg):
            return cos(simplify(arg))
        case Exp(arg):
            return exp(simplify(arg))
    raise ExprError(f"unknown node {e!r}")


# ---------------------------------------------------------------------------
# differentiation

def _d(e: Expr, v: str) -> Expr:
    match e:
        case Const():
            return ZERO
        case Var(name):
            return ONE if name == v else ZERO
        case Add(terms):
            return add(*(_d(t, v) for t in terms))
        case Neg(arg):
            return neg(_d(arg, v))
        case Mul(factors):
            parts = []
            for i, f in enumerate(factors):
                df = _d(f, v)
                if _is_zero(df):
                    continue
                parts.append(mul(*factors[:i], df, *factors[i + 1:]))
            return add(*parts)
        case Pow(base, exponent):
            db = _d(base, v)
            if _is_zero(db):
                return ZERO
            return mul(const(exponent), intpow(base, exponent - 1), db)
        case Sin(arg):
            return mul(cos(arg), _d(arg, v))
        case Cos(arg):
            return neg(mul(sin(arg), _d(arg, v)))
        case Exp(arg):
            return mul(exp(arg), _d(arg, v))
    raise ExprError(f"unknown node {e!r}")


def differentiate(e: Expr, v: str, order: int = 1) -> Expr:
    """Return the order-th partial derivative of e with respect to v."""
    if v != "t" and not _THETA_RE.match(v):
        raise ExprError(f"invalid variable name {v!r}")
    if order < 0:
        raise ExprError("derivative order must be nonnegative")
    out = simplify(e)
    for _ in range(order):
        out = _d(out, v)
    return out


# ---------------------------------------------------------------------------
# evaluation

def evaluate(e: Expr, bindings: Mapping[str, object]):
    """Evaluate at the bindings.  Values may be scalars or numpy arrays
    (which broadcast); the result is complex-valued either way."""
    match e:
        case Const(value):
            return value
        case Var(name):
            try:
                v = bindings[name]
            except KeyError:
                raise EvalError(f"unbound variable {name!r}") from None
            if isinstance(v, np.ndarray):
                return v.astype(np.complex128, copy=False)
            return complex(v)
        case Add(terms):
            out = evaluate(terms[0], bindings)
            for term in terms[1:]:
                out = out + evaluate(term, bindings)
            return out
        case Mul(factors):
            out = evaluate(factors[0], bindings)
            for factor in factors[1:]:
                out = out * evaluate(factor, bindings)
            return out
        case Pow(base, exponent):
            b = evaluate(base, bindings)
            if exponent < 0 and np.any(b == 0):
                raise PoleError("zero raised to a negative power")
            if isinstance(b, np.ndarray):
                return b ** exponent
            out = 1 + 0j
            k = abs(exponent)
            p = b
            while k:
                if k & 1:
                    out *= p
                p *= p
                k >>= 1
            return out if exponent >= 0 else 1 / out
        case Neg(arg):
            return -evaluate(arg, bindings)
        case Sin(arg):
            v = evaluate(arg, bindings)
            return np.sin(v) if isinstance(v, np.ndarray) else cmath.sin(v)
        case Cos(arg):
            v = evaluate(arg, bindings)
            return np.cos(v) if isinstance(v, np.ndarray) else cmath.cos(v)
        case Exp(arg):
            v = evaluate(arg, bindings)
            return np.exp(v) if isinstance(v, np.ndarray) else cmath.exp(v)
    raise ExprError(f"unknown node {e!r}")


def variables(e: Expr) -> set[str]:
    match e:
        case Const():
            return set()
        case Var(name):
            return {name}
        case Add(terms):
            out: set[str] = set()
            for t in terms:
                out |= variables(t)
            return out
        case Mul(factors):
            out = set()
            for f in factors:
                out |= variables(f)
            return out
        case Pow(base, _):
            return variables(base)
        case Neg(arg) | Sin(arg) | Cos(arg) | Exp(arg):
            return variables(arg)
    raise ExprError(f"unknown node {e!r}")


def theta_indices(e: Expr) -> set[int]:
    out = set()
    for name in variables(e):
        m = _THETA_RE.match(name)
        if m:
            out.add(int(m.group(1)))
    return out


def depends_on(e: Expr, v: str) -> bool:
    return v in variables(e)


# ---------------------------------------------------------------------------
# parsing
#
# expr   := term (('+'|'-') term)*
# term   := ['-'] unit
# unit   := factor (('*'|'/') factor)*
# factor := atom ['^' int]
# atom   := number | ident | '(' expr ')' | func '(' expr ')'
# func   := 'sin' | 'cos' | 'exp'
#
# Numbers are decimals with an optional exponent and an optional trailing
# 'i' marking an imaginary constant.  A leading '-' on a term is accepted
# so that printed derivatives round-trip.

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?i?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)

_FUNCS = {"sin": Sin, "cos": Cos, "exp": Exp}


class _Parser:
    def __init__(self, text: str, dim: int):
        self.text = text
        self.dim = dim
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None or m.end() == pos:
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                raise ParseError(f"unexpected character {stripped[0]!r}",
                                 len(text) - len(stripped))
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return ("end", "", len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, value, pos = self.next()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse(self) -> Expr:
        e = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {value!r}", pos)
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.next()
                t = self.term()
                terms.append(Neg(t) if value == "-" else t)
            else:
                break
        return terms[0] if len(terms) == 1 else Add(tuple(terms))

    def term(self) -> Expr:
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.next()
            return Neg(self.unit())
        return self.unit()

    def unit(self) -> Expr:
        factors = [self.factor()]
        invert = [False]
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.next()
                factors.append(self.factor())
                invert.append(value == "/")
            else:
                break
        out: list[Expr] = []
        for f, inv in zip(factors, invert):
            if inv:
                kind, _, pos = self.tokens[self.i - 1] if self.i else ("", "", 0)
                if not isinstance(f, (Var, Const)):
                    raise ParseError(
                        "denominator must be a variable or constant", pos)
                out.append(intpow(f, -1))
            else:
                out.append(f)
        return out[0] if len(out) == 1 else Mul(tuple(out))

    def factor(self) -> Expr:
        base = self.atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.next()
            exponent = self.integer()
            return intpow(base, exponent)
        return base

    def integer(self) -> int:
        sign = 1
        kind, value, pos = self.next()
        if kind == "op" and value == "-":
            sign = -1
            kind, value, pos = self.next()
        if kind != "number" or not re.fullmatch(r"\d+", value):
            raise ParseError("expected an integer exponent", pos)
        return sign * int(value)

    def atom(self) -> Expr:
        kind, value, pos = self.next()
        if kind == "number":
            if value.endswith("i"):
                return Const(complex(0, float(value[:-1])))
            return Const(complex(float(value)))
        if kind == "ident":
            if value in _FUNCS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return _FUNCS[value](arg)
            if value == "t":
                return Var("t")
            m = _THETA_RE.match(value)
            if m:
                k = int(m.group(1))
                if not 1 <= k <= self.dim:
                    raise ParseError(
                        f"theta index out of range: {value} with dim={self.dim}", pos)
                return Var(value)
            raise ParseError(f"unknown identifier {value!r}", pos)
        if kind == "op" and value == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ParseError(f"unexpected token {value!r}", pos)


def parse(text: str, dim: int) -> Expr:
    """Parse an expression over t and theta_1..theta_dim."""
    if dim < 1:
        raise ExprError("dim must be a positive integer")
    return _Parser(text, dim).parse()


# ---------------------------------------------------------------------------
# printing

def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _fmt_const(c: complex) -> str:
    re_, im = c.real, c.imag
    if abs(im) < _IMAG_DISPLAY_EPS:
        return _fmt_real(re_)
    if abs(re_) < _IMAG_DISPLAY_EPS:
        return _fmt_real(im) + "i"
    op = "+" if im >= 0 else "-"
    return f"({_fmt_real(re_)}{op}{_fmt_real(abs(im))}i)"


def _product_factor_str(f: Expr, first: bool) -> str:
    s = to_string(f)
    if isinstance(f, Add) or (s.startswith("-") and not first):
        return f"({s})"
    return s


def _atom_str(e: Expr) -> str:
    """Render e as a power base (parenthesize anything non-atomic)."""
    if isinstance(e, Var):
        return e.name
    if isinstance(e, (Sin, Cos, Exp)):
        return to_string(e)
    if isinstance(e, Const):
        s = _fmt_const(e.value)
        return s if not s.startswith("-") else f"({s})"
    return f"({to_string(e)})"


def to_string(e: Expr) -> str:
    match e:
        case Const(value):
            return _fmt_const(value)
        case Var(name):
            return name
        case Add(terms):
            out = []
            for i, term in enumerate(terms):
                body = term
                negative = False
                if isinstance(term, Neg):
                    negative, body = True, term.arg
                s = to_string(body)
                if s.startswith("-"):
                    negative, s = not negative, s[1:]
                if isinstance(body, Add):
                    s = f"({s})"
                if i == 0:
                    out.append(("-" if negative else "") + s)
                else:
                    out.append((" - " if negative else " + ") + s)
            return "".join(out)
        case Mul(factors):
            return "*".join(_product_factor_str(f, i == 0)
                            for i, f in enumerate(factors))
        case Pow(base, exponent):
            return f"{_atom_str(base)}^{exponent}"
        case Neg(arg):
            s = to_string(arg)
            if isinstance(arg, Add) or s.startswith("-"):
                return f"-({s})"
            return f"-{s}"
        case Sin(arg):
            return f"sin({to_string(arg)})"
        case Cos(arg):
            return f"cos({to_string(arg)})"
        case Exp(arg):
            return f"exp({to_string(arg)})"
    raise ExprError(f"unknown node {e!r}")
