"""Multivariate differential operators with symbolic coefficients.

A DiffOp is a finite sum of terms a_alpha(theta) * D^alpha, kept in normal
order: the coefficient always acts by pointwise multiplication to the left
of the partial derivatives.  The noncommutative product expands D^alpha
through a coefficient with the Leibniz rule, so
op_apply(op_mul(A, B), f) == op_apply(A, op_apply(B, f)).

Coefficients depend on the theta variables only, never on t.  Because the
expression layer has no canonical form, zero terms are detected by
evaluating the coefficient at two independent batches of random points.
"""

from __future__ import annotations

import math
from typing import Mapping

import numpy as np

from . import expr as ex

__all__ = [
    "MultiIndex", "DiffOp", "DiffOpError", "DimensionMismatch",
    "mi_zero", "mi_unit", "mi_abs", "mi_add",
    "identity", "zero", "from_expr", "partial", "monomial",
    "op_apply", "op_mul", "op_add", "op_scale", "op_neg", "op_pow",
    "coefficient_derivative",
]

MultiIndex = tuple[int, ...]

MAX_TERM_DEGREE = 64
_PRUNE_EPS = 1e-12
_PRUNE_POINTS = 20
_PRUNE_LOW, _PRUNE_HIGH = 0.3, 2.5


class DiffOpError(Exception):
    pass


class DimensionMismatch(DiffOpError):
    pass


def mi_zero(dim: int) -> MultiIndex:
    return (0,) * dim


def mi_unit(dim: int, axis: int) -> MultiIndex:
    if not 0 <= axis < dim:
        raise DiffOpError(f"axis {axis} out of range for dim {dim}")
    return tuple(1 if i == axis else 0 for i in range(dim))


def mi_abs(alpha: MultiIndex) -> int:
    return sum(alpha)


def mi_add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def _mi_binomial(alpha: MultiIndex, gamma: MultiIndex) -> int:
    out = 1
    for a, g in zip(alpha, gamma):
        out *= math.comb(a, g)
    return out


def _sub_indices(alpha: MultiIndex):
    """All gamma with 0 <= gamma <= alpha componentwise."""
    if not alpha:
        yield ()
        return
    head, tail = alpha[0], alpha[1:]
    for rest in _sub_indices(tail):
        for g in range(head + 1):
            yield (g,) + rest


_prune_cache: dict[int, tuple[dict, dict]] = {}


def _prune_bindings(dim: int) -> tuple[dict, dict]:
    """Two independent batches of random theta points, fixed seeds."""
    if dim not in _prune_cache:
        batches = []
        for seed in (0xC0FFEE, 0x5EED5):
            rng = np.random.default_rng(seed + dim)
            pts = rng.uniform(_PRUNE_LOW, _PRUNE_HIGH, size=(_PRUNE_POINTS, dim))
            batches.append({f"theta_{k + 1}": pts[:, k] for k in range(dim)})
        _prune_cache[dim] = (batches[0], batches[1])
    return _prune_cache[dim]


def _coeff_is_zero(coeff: ex.Expr, dim: int) -> bool:
    if isinstance(coeff, ex.Const):
        return abs(coeff.value) <= _PRUNE_EPS
    first, second = _prune_bindings(dim)
    for bindings in (first, second):
        try:
            values = np.asarray(ex.evaluate(coeff, bindings))
        except ex.EvalError:
            return False
        if np.any(np.abs(values) > _PRUNE_EPS):
            return False
    return True


class DiffOp:
    """Normal-ordered sum of coefficient * D^alpha terms."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[MultiIndex, ex.Expr] | None = None,
                 _trusted: bool = False):
        if dim < 1:
            raise DiffOpError("dim must be a positive integer")
        object.__setattr__(self, "dim", dim)
        cleaned: dict[MultiIndex, ex.Expr] = {}
        for alpha, coeff in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != dim or any(a < 0 for a in alpha):
                raise DiffOpError(f"bad multi-index {alpha} for dim {dim}")
            if mi_abs(alpha) > MAX_TERM_DEGREE:
                raise DiffOpError(
                    f"term degree {mi_abs(alpha)} exceeds the cap {MAX_TERM_DEGREE}")
            coeff = coeff if _trusted else ex.simplify(ex.as_expr(coeff))
            if ex.depends_on(coeff, "t"):
                raise DiffOpError("operator coefficients may not depend on t")
            bad = [k for k in ex.theta_indices(coeff) if k > dim]
            if bad:
                raise DiffOpError(
                    f"coefficient references theta_{max(bad)} beyond dim {dim}")
            if _coeff_is_zero(coeff, dim):
                continue
            cleaned[alpha] = coeff
        object.__setattr__(self, "terms", cleaned)

    def __setattr__(self, *args):
        raise AttributeError("DiffOp is immutable")

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def max_order(self) -> int:
        return max((mi_abs(a) for a in self.terms), default=0)

    def theta_indices(self) -> set[int]:
        out: set[int] = set()
        for alpha, coeff in self.terms.items():
            out |= ex.theta_indices(coeff)
            out |= {i + 1 for i, a in enumerate(alpha) if a > 0}
        return out

    def constant_part(self) -> ex.Expr:
        """Coefficient of D^0; this equals the operator applied to 1."""
        return self.terms.get(mi_zero(self.dim), ex.ZERO)

    def is_scalar_constant(self) -> bool:
        """True when the operator is c * identity with c a constant."""
        if not self.terms:
            return True
        if set(self.terms) != {mi_zero(self.dim)}:
            return False
        return isinstance(self.constant_part(), ex.Const)

    def text(self) -> str:
        if not self.terms:
            return "0 * D[" + ",".join("0" for _ in range(self.dim)) + "]"
        parts = []
        for alpha, coeff in self.sorted_terms():
            c = ex.to_string(coeff)
            if "+" in c[1:] or " - " in c:
                c = f"({c})"
            parts.append(f"{c} * D[{','.join(str(a) for a in alpha)}]")
        return " + ".join(parts)

    def __repr__(self):
        return self.text()

    def __eq__(self, other):
        return (isinstance(other, DiffOp) and self.dim == other.dim
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def apply(self, f: ex.Expr) -> ex.Expr:
        return op_apply(self, f)


def identity(dim: int) -> DiffOp:
    return DiffOp(dim, {mi_zero(dim): ex.ONE})


def zero(dim: int) -> DiffOp:
    return DiffOp(dim, {})


def from_expr(coeff, dim: int) -> DiffOp:
    """The multiplication operator f -> coeff * f."""
    return DiffOp(dim, {mi_zero(dim): ex.as_expr(coeff)})


def partial(dim: int, axis: int = 0, order: int = 1) -> DiffOp:
    """D_axis^order (axis is 0-based: axis k differentiates theta_{k+1})."""
    if order < 0:
        raise DiffOpError("order must be nonnegative")
    alpha = tuple(order if i == axis else 0 for i in range(dim))
    if not 0 <= axis < dim:
        raise DiffOpError(f"axis {axis} out of range for dim {dim}")
    return DiffOp(dim, {alpha: ex.ONE})


def monomial(coeff, alpha: MultiIndex) -> DiffOp:
    """coeff * D^alpha."""
    return DiffOp(len(alpha), {tuple(alpha): ex.as_expr(coeff)})


def _check_dims(a: DiffOp, b: DiffOp):
    if a.dim != b.dim:
        raise DimensionMismatch(f"operator dims differ: {a.dim} vs {b.dim}")


def op_apply(op: DiffOp, f) -> ex.Expr:
    """Apply the operator to an expression: sum of a_alpha * d^alpha f."""
    f = ex.simplify(ex.as_expr(f))
    bad = [k for k in ex.theta_indices(f) if k > op.dim]
    if bad:
        raise DimensionMismatch(
            f"function references theta_{max(bad)} beyond operator dim {op.dim}")
    parts = []
    for alpha, coeff in op.sorted_terms():
        g = f
        for axis, k in enumerate(alpha):
            if k:
                g = ex.differentiate(g, f"theta_{axis + 1}", k)
        parts.append(ex.mul(coeff, g))
    return ex.add(*parts)


def op_add(a: DiffOp, b: DiffOp) -> DiffOp:
    _check_dims(a, b)
    terms: dict[MultiIndex, ex.Expr] = dict(a.terms)
    for alpha, coeff in b.terms.items():
        if alpha in terms:
            terms[alpha] = ex.add(terms[alpha], coeff)
        else:
            terms[alpha] = coeff
    return DiffOp(a.dim, terms)


def op_scale(factor, a: DiffOp) -> DiffOp:
    factor = ex.as_expr(factor)
    return DiffOp(a.dim, {alpha: ex.mul(factor, coeff)
                          for alpha, coeff in a.terms.items()})


def op_neg(a: DiffOp) -> DiffOp:
    return op_scale(-1, a)


def op_mul(a: DiffOp, b: DiffOp) -> DiffOp:
    """Normal-ordered composition a after b.

    Uses D^alpha (b g) = sum over gamma <= alpha of binom(alpha, gamma)
    (D^(alpha-gamma) b) D^gamma g.
    """
    _check_dims(a, b)
    terms: dict[MultiIndex, ex.Expr] = {}
    for alpha, ca in a.terms.items():
        for beta, cb in b.terms.items():
            for gamma in _sub_indices(alpha):
                weight = _mi_binomial(alpha, gamma)
                db = cb
                for axis, k in enumerate(tuple(x - y for x, y in zip(alpha, gamma))):
                    if k:
                        db = ex.differentiate(db, f"theta_{axis + 1}", k)
                if isinstance(db, ex.Const) and db.value == 0:
                    continue
                key = mi_add(gamma, beta)
                piece = ex.mul(ca, ex.const(weight), db)
                if key in terms:
                    terms[key] = ex.add(terms[key], piece)
                else:
                    terms[key] = piece
    return DiffOp(a.dim, terms)


def op_pow(a: DiffOp, k: int) -> DiffOp:
    if k < 0:
        raise DiffOpError("operator powers require k >= 0")
    out = identity(a.dim)
    for _ in range(k):
        out = op_mul(out, a)
    return out


def coefficient_derivative(a: DiffOp, axis: int = 0) -> DiffOp:
    """Differentiate every coefficient in place (the derivative does not
    act through the D factors)."""
    v = f"theta_{axis + 1}"
    return DiffOp(a.dim, {alpha: ex.differentiate(coeff, v)
                          for alpha, coeff in a.terms.items()})
