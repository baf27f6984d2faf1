"""Numerical evaluation of iterated integrals and generating series on
rectangular (theta, t) grids.

The time recursion is evaluated innermost-first with a cumulative
composite trapezoid rule, which delivers every partial integral from 0 to
t_k in one pass at O(h^2).  Partial theta-derivatives of an evaluated map
are distributed over the input-letter occurrences of each word
(``expand_derivative``); derivative orders attach to those occurrences as
decorations, since the drift signal is constant and absorbs none.

Summation order is fixed (canonical word order, then lexicographic
operator terms) so repeated runs are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from . import expr as ex
from .diffop import MultiIndex, mi_abs, mi_zero
from .series import GenSeries
from .words import DRIFT, Letter, Word

__all__ = [
    "Grid", "GridField", "InputSignal", "DecoratedWord", "EvaluationError",
    "cumulative_trapezoid", "expand_derivative", "iterated_integral",
    "evaluate_series", "chen_coefficients", "write_csv",
]


class EvaluationError(Exception):
    pass


@dataclass(frozen=True)
class Grid:
    """Uniform rectangular grid on [a_k, b_k] x ... x [0, T]."""

    theta_axes: tuple[tuple[float, float, int], ...]
    t_end: float
    n_t: int

    def __post_init__(self):
        for a, b, n in self.theta_axes:
            if n < 2:
                raise EvaluationError("each theta axis needs at least 2 points")
            if not b > a:
                raise EvaluationError("theta interval must have positive length")
        if self.n_t < 2:
            raise EvaluationError("time axis needs at least 2 points")
        if not self.t_end > 0:
            raise EvaluationError("time horizon must be positive")

    @property
    def dim(self) -> int:
        return len(self.theta_axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(n for _, _, n in self.theta_axes) + (self.n_t,)

    def theta_points(self, axis: int) -> np.ndarray:
        a, b, n = self.theta_axes[axis]
        return np.linspace(a, b, n)

    def theta_spacing(self, axis: int) -> float:
        a, b, n = self.theta_axes[axis]
        return (b - a) / (n - 1)

    @property
    def t_points(self) -> np.ndarray:
        return np.linspace(0.0, self.t_end, self.n_t)

    @property
    def dt(self) -> float:
        return self.t_end / (self.n_t - 1)

    def meshes(self, with_t: bool = True) -> dict[str, np.ndarray]:
        """Broadcastable coordinate arrays keyed by variable name."""
        ndim = self.dim + (1 if with_t else 0)
        out: dict[str, np.ndarray] = {}
        for k in range(self.dim):
            shape = [1] * ndim
            shape[k] = self.theta_axes[k][2]
            out[f"theta_{k + 1}"] = self.theta_points(k).reshape(shape)
        if with_t:
            shape = [1] * ndim
            shape[-1] = self.n_t
            out["t"] = self.t_points.reshape(shape)
        return out

    @classmethod
    def from_spec(cls, spec: str) -> "Grid":
        """Parse "a:b:n,...,0:T:nt" (theta axes first, time axis last)."""
        axes = []
        for chunk in spec.split(","):
            parts = chunk.split(":")
            if len(parts) != 3:
                raise EvaluationError(f"bad grid axis {chunk!r}; expected a:b:n")
            a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
            axes.append((a, b, n))
        if len(axes) < 2:
            raise EvaluationError("grid needs at least one theta axis and a time axis")
        t0, t1, nt = axes[-1]
        if t0 != 0.0:
            raise EvaluationError("the time axis must start at 0")
        return cls(tuple(axes[:-1]), t1, nt)


class GridField:
    """Complex samples of a scalar field on a grid."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values: np.ndarray):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != grid.shape:
            raise EvaluationError(
                f"field shape {values.shape} does not match grid {grid.shape}")
        self.grid = grid
        self.values = values

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __sub__(self, other: "GridField") -> "GridField":
        return GridField(self.grid, self.values - other.values)


def cumulative_trapezoid(f: np.ndarray, dt: float) -> np.ndarray:
    """Running integral along the last axis; entry 0 is 0."""
    out = np.zeros_like(f, dtype=np.complex128)
    np.cumsum((f[..., :-1] + f[..., 1:]) * (0.5 * dt), axis=-1, out=out[..., 1:])
    return out


MAX_SAMPLED_FD_ORDER = 4


class InputSignal:
    """A control input u(theta, t), symbolic or sampled.

    Symbolic signals support exact theta-derivatives of any order; sampled
    signals fall back to second-order central differences, capped at total
    derivative order 4 beyond which finite differences of samples are
    numerically meaningless.
    """

    __slots__ = ("expr", "field", "_deriv_cache")

    def __init__(self, expr: ex.Expr | None = None,
                 field: GridField | None = None):
        if (expr is None) == (field is None):
            raise EvaluationError("pass exactly one of expr= or field=")
        self.expr = expr
        self.field = field
        self._deriv_cache: dict = {}

    @classmethod
    def symbolic(cls, e) -> "InputSignal":
        return cls(expr=ex.simplify(ex.as_expr(e)))

    @classmethod
    def sampled(cls, field: GridField) -> "InputSignal":
        return cls(field=field)

    @classmethod
    def zero(cls) -> "InputSignal":
        return cls(expr=ex.ZERO)

    @property
    def is_symbolic(self) -> bool:
        return self.expr is not None

    def derivative_values(self, grid: Grid, order: MultiIndex) -> np.ndarray:
        """Samples of the order-th theta-derivative, broadcast to grid shape."""
        key = (grid, tuple(order))
        cached = self._deriv_cache.get(key)
        if cached is not None:
            return cached
        if self.is_symbolic:
            e = self.expr
            for axis, k in enumerate(order):
                if k:
                    e = ex.differentiate(e, f"theta_{axis + 1}", k)
            values = np.asarray(ex.evaluate(e, grid.meshes()), dtype=np.complex128)
            values = np.broadcast_to(values, grid.shape)
        else:
            if self.field.grid.shape != grid.shape:
                raise EvaluationError("sampled signal lives on a different grid")
            if mi_abs(tuple(order)) > MAX_SAMPLED_FD_ORDER:
                raise EvaluationError(
                    f"derivative order {tuple(order)} exceeds the sampled-signal "
                    f"cap of {MAX_SAMPLED_FD_ORDER}")
            values = self.field.values
            for axis, k in enumerate(order):
                h = grid.theta_spacing(axis)
                for _ in range(k):
                    values = np.gradient(values, h, axis=axis, edge_order=2)
        self._deriv_cache[key] = values
        return values


Binding = Mapping[int, InputSignal]


def _as_binding(u: Union[InputSignal, Binding], alphabet) -> Binding:
    if isinstance(u, InputSignal):
        ids = sorted(l.index for l in alphabet if not l.is_drift)
        if not ids:
            return {}
        return {i: u for i in ids}
    return dict(u)


# ---------------------------------------------------------------------------
# decorated words and derivative distribution

# A decorated word is a tuple of (letter, order) pairs; drift letters carry
# order None, input letters carry a theta multi-index.
DecoratedWord = tuple[tuple[Letter, Optional[MultiIndex]], ...]


def undecorated(w: Word, dim: int) -> DecoratedWord:
    z = mi_zero(dim)
    return tuple((l, None if l.is_drift else z) for l in w)


def _compositions(total: int, parts: int):
    """All ways to write total as an ordered sum of `parts` nonnegative
    integers, in a fixed deterministic order."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def expand_derivative(w: Word, alpha: MultiIndex) -> list[tuple[int, DecoratedWord]]:
    """Distribute the derivative D^alpha over the input-letter occurrences
    of w, returning (multinomial weight, decorated word) terms.

    Derivatives falling on the drift letter vanish, so a pure-drift word
    with a nonzero alpha expands to nothing.
    """
    dim = len(alpha)
    positions = [i for i, l in enumerate(w.letters) if not l.is_drift]
    if mi_abs(alpha) == 0:
        return [(1, undecorated(w, dim))]
    if not positions:
        return []
    per_axis: list[list[tuple[int, tuple[int, ...]]]] = []
    for k in alpha:
        axis_terms = []
        for comp in _compositions(k, len(positions)):
            weight = math.factorial(k)
            for m in comp:
                weight //= math.factorial(m)
            axis_terms.append((weight, comp))
        per_axis.append(axis_terms)

    out: list[tuple[int, DecoratedWord]] = []

    def build(axis: int, weight: int, orders: list[list[int]]):
        if axis == dim:
            decorated = []
            slot = 0
            for l in w.letters:
                if l.is_drift:
                    decorated.append((l, None))
                else:
                    decorated.append((l, tuple(orders[a][slot] for a in range(dim))))
                    slot += 1
            out.append((weight, tuple(decorated)))
            return
        for wgt, comp in per_axis[axis]:
            build(axis + 1, weight * wgt, orders + [list(comp)])

    build(0, 1, [])
    return out


# ---------------------------------------------------------------------------
# iterated integrals

def _integral_from_cache(dw: DecoratedWord, binding: Binding, grid: Grid,
                         cache: dict) -> np.ndarray:
    if not dw:
        return np.ones((1,) * grid.dim + (grid.n_t,), dtype=np.complex128)
    key = dw
    hit = cache.get(key)
    if hit is not None:
        return hit
    head, tail = dw[0], dw[1:]
    inner = _integral_from_cache(tail, binding, grid, cache)
    letter, order = head
    if letter.is_drift:
        integrand = inner
    else:
        try:
            signal = binding[letter.index]
        except KeyError:
            raise EvaluationError(
                f"input letter {letter.text()} is not bound to a signal") from None
        integrand = signal.derivative_values(grid, order) * inner
    value = cumulative_trapezoid(integrand, grid.dt)
    cache[key] = value
    return value


def iterated_integral(w: Union[Word, DecoratedWord],
                      u: Union[InputSignal, Binding], grid: Grid,
                      cache: dict | None = None) -> GridField:
    """E_w[u] on the grid: the time recursion integrates the leftmost
    letter's signal against the integral of the remainder."""
    if isinstance(w, Word):
        dw = undecorated(w, grid.dim)
        letters = set(w.letters)
    else:
        dw = w
        letters = {l for l, _ in w}
    binding = _as_binding(u, letters | {DRIFT})
    if cache is None:
        cache = {}
    values = _integral_from_cache(dw, binding, grid, cache)
    return GridField(grid, np.broadcast_to(values, grid.shape).copy())


def evaluate_series(c: GenSeries, u: Union[InputSignal, Binding],
                    grid: Grid) -> GridField:
    """Evaluate the input-output map of c: sum over words and operator
    terms of coefficient(theta) times the decorated iterated integrals."""
    if grid.dim != c.dim:
        raise EvaluationError(
            f"grid dim {grid.dim} does not match series dim {c.dim}")
    binding = _as_binding(u, c.alphabet)
    needed = {l.index for w in c.coeffs for l in w.input_letters()}
    missing = needed - set(binding)
    if missing:
        raise EvaluationError(
            f"unbound input letters: {sorted('x%d' % i for i in missing)}")
    theta_meshes = grid.meshes(with_t=False)
    cache: dict = {}
    total = np.zeros(grid.shape, dtype=np.complex128)
    for w in sorted(c.coeffs, key=Word.sort_key):
        op = c.coeffs[w]
        for alpha, coeff in op.sorted_terms():
            terms = expand_derivative(w, alpha)
            if not terms:
                continue
            acc = np.zeros((1,) * grid.dim + (grid.n_t,), dtype=np.complex128)
            for weight, dw in terms:
                e = _integral_from_cache(dw, binding, grid, cache)
                acc = acc + (weight * e if weight != 1 else e)
            a = np.asarray(ex.evaluate(coeff, theta_meshes), dtype=np.complex128)
            if a.ndim:
                total = total + a[..., np.newaxis] * acc
            else:
                total = total + a * acc
    return GridField(grid, total)


def chen_coefficients(n: int, u: Union[InputSignal, Binding], grid: Grid,
                      alphabet: Sequence[Letter] | None = None
                      ) -> dict[Word, GridField]:
    """All E_w[u] for |w| <= n over the given alphabet (default: the drift
    letter plus every bound input letter; a bare signal binds x1)."""
    if alphabet is None:
        if isinstance(u, InputSignal):
            alphabet = [DRIFT, Letter(1)]
        else:
            alphabet = [DRIFT] + [Letter(i) for i in sorted(u)]
    binding = _as_binding(u, alphabet)
    letters = sorted(set(alphabet) | {DRIFT}, key=Letter.sort_key)
    cache: dict = {}
    out: dict[Word, GridField] = {}
    level = [Word()]
    out[Word()] = iterated_integral(Word(), binding, grid, cache)
    for _ in range(n):
        nxt = []
        for w in level:
            for l in letters:
                nw = Word((l,) + w.letters)
                nxt.append(nw)
                out[nw] = iterated_integral(nw, binding, grid, cache)
        level = nxt
    return out


# ---------------------------------------------------------------------------
# export

def write_csv(field: GridField, fh) -> None:
    """theta coordinates, t, re, im; theta-outer / t-inner row order,
    17 significant digits."""
    grid = field.grid
    names = [f"theta_{k + 1}" for k in range(grid.dim)]
    fh.write(",".join(names + ["t", "re", "im"]) + "\n")
    axes = [grid.theta_points(k) for k in range(grid.dim)]
    t = grid.t_points
    flat = field.values.reshape(-1, grid.n_t)
    theta_shape = tuple(n for _, _, n in grid.theta_axes)
    for row, idx in enumerate(np.ndindex(theta_shape)):
        coords = [f"{axes[k][i]:.17g}" for k, i in enumerate(idx)]
        prefix = ",".join(coords)
        values = flat[row]
        for j in range(grid.n_t):
            v = values[j]
            fh.write(f"{prefix},{t[j]:.17g},{v.real:.17g},{v.imag:.17g}\n")
