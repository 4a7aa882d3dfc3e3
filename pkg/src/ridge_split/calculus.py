"""Directional increments, mixed directional derivatives and antiderivatives.

Bivariate functions come in four backings:

* :class:`ExprFunction` -- a parsed expression, defined on the whole plane and
  differentiable symbolically;
* :class:`GridFunction` -- samples on a uniform rectangular grid, bilinear
  between nodes, an error outside the rectangle;
* :class:`CallableFunction` -- anything derived numerically from the above;
* :class:`RidgeSumFunction` -- a sum of sampled ridge profiles, differentiated
  exactly term by term.

All evaluation is vectorized: pass arrays for ``x`` and ``y``.

Univariate data lives in :class:`SampledProfile` (uniform grid + base point).
"""

from __future__ import annotations

import itertools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from . import expr as ex
from .errors import (BackingError, CalculusError, DegenerateScaleError,
                     DomainMarginError, OutOfDomainError, ProfileRangeError,
                     SmoothnessError)

EPS = np.finfo(float).eps
MAX_GRID_ORDER = 2


class Rect(NamedTuple):
    x0: float
    x1: float
    y0: float
    y1: float

    @classmethod
    def of(cls, r) -> Rect:
        r = cls(*(float(v) for v in r))
        if not (r.x0 < r.x1 and r.y0 < r.y1):
            raise CalculusError(f"degenerate domain {tuple(r)}: need x0<x1 and y0<y1")
        return r

    @property
    def center(self) -> np.ndarray:
        return np.array([(self.x0 + self.x1) / 2, (self.y0 + self.y1) / 2])

    @property
    def size(self) -> float:
        return max(self.x1 - self.x0, self.y1 - self.y0)

    @property
    def corners(self) -> np.ndarray:
        return np.array([[self.x0, self.y0], [self.x1, self.y0],
                         [self.x0, self.y1], [self.x1, self.y1]])

    def contains(self, x, y, tol: float | None = None):
        if tol is None:
            tol = 1e-12 * max(1.0, self.size)
        x, y = np.asarray(x), np.asarray(y)
        return ((x >= self.x0 - tol) & (x <= self.x1 + tol)
                & (y >= self.y0 - tol) & (y <= self.y1 + tol))

    def inside(self, other: Rect) -> bool:
        tol = 1e-12 * max(1.0, other.size)
        return (self.x0 >= other.x0 - tol and self.x1 <= other.x1 + tol
                and self.y0 >= other.y0 - tol and self.y1 <= other.y1 + tol)

    def mesh(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        xs = np.linspace(self.x0, self.x1, n)
        ys = np.linspace(self.y0, self.y1, n)
        return np.meshgrid(xs, ys)

    def ridge_range(self, d: Sequence[float]) -> tuple[float, float]:
        t = self.corners @ np.asarray(d, dtype=float)
        return float(t.min()), float(t.max())


def line_interval(p0, v, rect: Rect) -> tuple[float, float]:
    """Parameter interval {s : p0 + s*v in rect}; lo > hi when empty."""
    lo, hi = -math.inf, math.inf
    for k, (a, b) in enumerate(((rect.x0, rect.x1), (rect.y0, rect.y1))):
        if v[k] == 0.0:
            if not a <= p0[k] <= b:
                return math.inf, -math.inf
            continue
        s1, s2 = (a - p0[k]) / v[k], (b - p0[k]) / v[k]
        lo, hi = max(lo, min(s1, s2)), min(hi, max(s1, s2))
    return lo, hi


# -- bivariate functions -----------------------------------------------------

class BivariateFunction(ABC):
    """Evaluable F(x, y). ``domain`` is None for functions defined everywhere."""

    domain: Rect | None = None
    smoothness: int | None = None

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.domain is not None and not np.all(self.domain.contains(x, y)):
            bad = ~self.domain.contains(*np.broadcast_arrays(x, y))
            i = np.flatnonzero(bad)[0]
            bx, by = np.broadcast_arrays(x, y)
            raise OutOfDomainError(
                f"point ({bx.flat[i]:.6g}, {by.flat[i]:.6g}) is outside "
                f"the domain {tuple(self.domain)}")
        out = np.broadcast_to(self._evaluate(x, y), np.broadcast(x, y).shape)
        if out.ndim == 0:
            return float(out)
        return np.array(out, dtype=float)

    @abstractmethod
    def _evaluate(self, x, y):
        ...

    @property
    def bounded(self) -> bool:
        return self.domain is not None

    def contains(self, x, y):
        if self.domain is None:
            return np.ones(np.broadcast(np.asarray(x), np.asarray(y)).shape, bool)
        return self.domain.contains(x, y)

    def __sub__(self, other: BivariateFunction) -> BivariateFunction:
        domain = _intersect(self.domain, other.domain)
        return CallableFunction(lambda x, y: self(x, y) - other(x, y), domain,
                                _min_smooth(self.smoothness, other.smoothness))


def _min_smooth(*ks):
    known = [k for k in ks if k is not None]
    return min(known) if known else None


def _intersect(a: Rect | None, b: Rect | None) -> Rect | None:
    if a is None:
        return b
    if b is None:
        return a
    return Rect(max(a.x0, b.x0), min(a.x1, b.x1), max(a.y0, b.y0), min(a.y1, b.y1))


class ExprFunction(BivariateFunction):
    def __init__(self, expression: ex.Expr, smoothness: int | None = None,
                 source: str | None = None):
        extra = expression.variables() - {"x", "y"}
        if extra:
            raise CalculusError(f"expression uses variables other than x, y: {sorted(extra)}")
        self.expr = expression
        self.smoothness = smoothness
        self.source = source if source is not None else ex.serialize(expression)
        self.domain = None

    @classmethod
    def from_text(cls, text: str, smoothness: int | None = None) -> ExprFunction:
        return cls(ex.parse(text, ("x", "y")), smoothness, source=text)

    @property
    def smooth(self) -> bool:
        return ex.is_smooth(self.expr)

    def _evaluate(self, x, y):
        return self.expr.evaluate({"x": x, "y": y})

    def __repr__(self):
        return f"ExprFunction({self.source!r})"


class GridFunction(BivariateFunction):
    """Samples ``values[j, i] = F(xs[i], ys[j])`` on a uniform grid, bilinear between nodes."""

    def __init__(self, xs, ys, values, smoothness: int | None = 2):
        self.xs = np.asarray(xs, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != (len(self.ys), len(self.xs)):
            raise CalculusError("grid values must have shape (len(ys), len(xs))")
        if len(self.xs) < 2 or len(self.ys) < 2:
            raise CalculusError("grid needs at least two nodes per axis")
        self.domain = Rect(self.xs[0], self.xs[-1], self.ys[0], self.ys[-1])
        self.smoothness = smoothness

    @classmethod
    def sample(cls, f: Callable, domain, nx: int, ny: int | None = None,
               smoothness: int | None = 2) -> GridFunction:
        r = Rect.of(domain)
        xs = np.linspace(r.x0, r.x1, nx)
        ys = np.linspace(r.y0, r.y1, ny or nx)
        X, Y = np.meshgrid(xs, ys)
        return cls(xs, ys, f(X, Y), smoothness)

    def _evaluate(self, x, y):
        x, y = np.broadcast_arrays(x, y)
        i = np.clip(np.searchsorted(self.xs, x, side="right") - 1, 0, len(self.xs) - 2)
        j = np.clip(np.searchsorted(self.ys, y, side="right") - 1, 0, len(self.ys) - 2)
        fx = np.clip((x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]), 0.0, 1.0)
        fy = np.clip((y - self.ys[j]) / (self.ys[j + 1] - self.ys[j]), 0.0, 1.0)
        v = self.values
        return ((1 - fx) * (1 - fy) * v[j, i] + fx * (1 - fy) * v[j, i + 1]
                + (1 - fx) * fy * v[j + 1, i] + fx * fy * v[j + 1, i + 1])

    def directional_derivative(self, v) -> GridFunction:
        # second-order central differences inside, one-sided at the edges
        dy, dx = np.gradient(self.values, self.ys, self.xs, edge_order=2)
        k = None if self.smoothness is None else max(self.smoothness - 1, 0)
        return GridFunction(self.xs, self.ys, v[0] * dx + v[1] * dy, k)


class CallableFunction(BivariateFunction):
    def __init__(self, fn: Callable, domain: Rect | None = None,
                 smoothness: int | None = None):
        self.fn = fn
        self.domain = domain
        self.smoothness = smoothness

    def _evaluate(self, x, y):
        return self.fn(x, y)


@dataclass(frozen=True)
class RidgeTerm:
    direction: tuple[float, float]
    profile: SampledProfile
    coef: float = 1.0
    order: int = 0


class RidgeSumFunction(BivariateFunction):
    """sum_i coef_i * profile_i^(order_i)(a_i x + b_i y)."""

    def __init__(self, terms: Sequence[RidgeTerm], domain: Rect | None):
        self.terms = tuple(terms)
        self.domain = domain
        self.smoothness = None

    def _evaluate(self, x, y):
        total = np.zeros(np.broadcast(x, y).shape)
        for term in self.terms:
            if term.coef == 0.0:
                continue
            a, b = term.direction
            total = total + term.coef * term.profile(a * x + b * y, derivative=term.order)
        return total

    def directional_derivative(self, v) -> RidgeSumFunction:
        return RidgeSumFunction(
            [RidgeTerm(t.direction, t.profile,
                       t.coef * (t.direction[0] * v[0] + t.direction[1] * v[1]),
                       t.order + 1) for t in self.terms],
            self.domain)


# -- increments and derivatives ---------------------------------------------

def increment(f: BivariateFunction, l, delta: float) -> BivariateFunction:
    """(x, y) -> f(x + l_x*delta, y + l_y*delta) - f(x, y)."""
    sx, sy = float(l[0]) * delta, float(l[1]) * delta
    if isinstance(f, ExprFunction):
        shifted = f.expr.substitute({"x": ex.Var("x") + sx, "y": ex.Var("y") + sy})
        return ExprFunction(ex.BinOp("-", shifted, f.expr), f.smoothness)
    domain = f.domain
    if domain is not None:
        domain = Rect(domain.x0 - min(sx, 0.0), domain.x1 - max(sx, 0.0),
                      domain.y0 - min(sy, 0.0), domain.y1 - max(sy, 0.0))
        if domain.x0 > domain.x1 or domain.y0 > domain.y1:
            raise DomainMarginError(f"shift ({sx:.3g}, {sy:.3g}) leaves no room in the domain")
    return CallableFunction(lambda x, y: f(x + sx, y + sy) - f(x, y), domain, f.smoothness)


def numeric_step(order: int, scale: float) -> float:
    """Step for a nested central-difference stencil of total ``order``."""
    return EPS ** (1.0 / (order + 2)) * scale


def mixed_directional_derivative(f: BivariateFunction, dirs: Sequence[Sequence[float]],
                                 method: str = "symbolic", *, scale: float | None = None,
                                 allow_high_order: bool = False) -> BivariateFunction:
    """Apply (v . grad) for every v in ``dirs`` to ``f``.

    ``method="symbolic"`` differentiates the expression tree (or a ridge sum,
    term by term). ``method="numeric"`` uses nested central differences with
    step ``eps**(1/(m+2)) * scale``; grid-backed functions are differenced
    on their own nodes instead, with one-sided stencils at the edges.
    """
    dirs = [np.asarray(v, dtype=float) for v in dirs]
    m = len(dirs)
    if m == 0:
        return f
    if f.smoothness is not None and m > f.smoothness:
        raise SmoothnessError(
            f"derivative order {m} exceeds the smoothness hint {f.smoothness}")
    if method == "symbolic":
        if isinstance(f, ExprFunction):
            e = f.expr
            for v in dirs:
                e = ex.add(ex.mul(ex.Const(v[0]), e.diff("x")),
                           ex.mul(ex.Const(v[1]), e.diff("y")))
            k = None if f.smoothness is None else f.smoothness - m
            return ExprFunction(e, k)
        if isinstance(f, RidgeSumFunction):
            for v in dirs:
                f = f.directional_derivative(v)
            return f
        raise BackingError("symbolic differentiation needs an expression-backed function")
    if method != "numeric":
        raise ValueError(f"unknown method {method!r}")

    if isinstance(f, GridFunction):
        if m > MAX_GRID_ORDER and not allow_high_order:
            raise BackingError(
                f"order {m} finite differences of sampled data exceed {MAX_GRID_ORDER}; "
                "pass allow_high_order to accept the noise")
        for v in dirs:
            f = f.directional_derivative(v)
        return f

    if scale is None:
        scale = f.domain.size if f.domain is not None else 1.0
    h = numeric_step(m, scale)
    V = np.array(dirs)
    domain = f.domain
    if domain is not None:
        mx, my = h * np.abs(V).sum(axis=0)
        domain = Rect(domain.x0 + mx, domain.x1 - mx, domain.y0 + my, domain.y1 - my)
        if domain.x0 >= domain.x1 or domain.y0 >= domain.y1:
            raise DomainMarginError("domain too small for the difference stencil")
    stencil = [(np.prod(s), h * (np.array(s) @ V))
               for s in itertools.product((1.0, -1.0), repeat=m)]
    denom = (2.0 * h) ** m

    def nested(x, y):
        acc = 0.0
        for sign, shift in stencil:
            acc = acc + sign * f(x + shift[0], y + shift[1])
        return acc / denom

    k = None if f.smoothness is None else f.smoothness - m
    return CallableFunction(nested, domain, k)


# -- univariate profiles -----------------------------------------------------

class TGrid(NamedTuple):
    t_min: float
    t_max: float
    n: int
    base: float

    @property
    def step(self) -> float:
        return (self.t_max - self.t_min) / (self.n - 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.t_min + self.step * np.arange(self.n)


def ridge_grid(d: Sequence[float], domain: Rect, n: int, pad: float = 0.05,
               base: float | None = None) -> TGrid:
    """Grid covering the image of ``domain`` under t = d . (x, y), padded by
    ``pad`` times its width on each side; the base point defaults to the
    image of the domain center."""
    lo, hi = domain.ridge_range(d)
    w = hi - lo
    if base is None:
        base = float(np.dot(d, domain.center))
    return TGrid(lo - pad * w, hi + pad * w, n, base)


@dataclass(frozen=True, eq=False)
class SampledProfile:
    """Univariate samples ``values[m]`` at ``t_min + m*step``.

    ``interpolation`` is "linear" (piecewise linear, exact at nodes) or
    "cubic" (not-a-knot cubic spline through the samples).
    """

    t_min: float
    t_max: float
    step: float
    values: np.ndarray
    base_point: float
    interpolation: str = "linear"

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if not self.step > 0:
            raise CalculusError("profile step must be positive")
        expected = round((self.t_max - self.t_min) / self.step) + 1
        if vals.ndim != 1 or len(vals) != expected:
            raise CalculusError(
                f"profile has {len(vals)} values, grid needs {expected}")
        if abs(self.t_min + (expected - 1) * self.step - self.t_max) > 1e-9 * max(
                self.step, abs(self.t_max)):
            raise CalculusError("profile grid is not uniform over [t_min, t_max]")
        tol = 1e-9 * self.step
        if not (self.t_min - tol <= self.base_point <= self.t_max + tol):
            raise CalculusError("base point outside the profile range")
        if self.interpolation not in ("linear", "cubic"):
            raise CalculusError(f"unknown interpolation {self.interpolation!r}")

    @classmethod
    def on_grid(cls, grid: TGrid, values, interpolation: str = "linear") -> SampledProfile:
        return cls(grid.t_min, grid.t_max, grid.step, values, grid.base, interpolation)

    @property
    def nodes(self) -> np.ndarray:
        return self.t_min + self.step * np.arange(len(self.values))

    @property
    def grid(self) -> TGrid:
        return TGrid(self.t_min, self.t_max, len(self.values), self.base_point)

    @cached_property
    def _spline(self) -> CubicSpline:
        return CubicSpline(self.nodes, self.values)

    def with_values(self, values) -> SampledProfile:
        return SampledProfile(self.t_min, self.t_max, self.step, values,
                              self.base_point, self.interpolation)

    def __call__(self, t, derivative: int = 0):
        t = np.asarray(t, dtype=float)
        tol = 1e-9 * self.step
        if np.any((t < self.t_min - tol) | (t > self.t_max + tol)):
            bad = t[(t < self.t_min - tol) | (t > self.t_max + tol)].flat[0]
            raise ProfileRangeError(
                f"t = {bad:.6g} outside profile range [{self.t_min:.6g}, {self.t_max:.6g}]")
        t = np.clip(t, self.t_min, self.t_max)
        if self.interpolation == "cubic":
            out = self._spline(t, derivative)
        elif derivative == 0:
            out = self._linear(t)
        elif derivative == 1:
            slopes = np.diff(self.values) / self.step
            k = np.clip(((t - self.t_min) // self.step).astype(int), 0, len(slopes) - 1)
            out = slopes[k]
        else:
            raise CalculusError("a linearly interpolated profile has no second derivative")
        return float(out) if np.ndim(out) == 0 else out

    def _linear(self, t):
        pos = (t - self.t_min) / self.step
        near = np.rint(pos)
        pos = np.where(np.abs(pos - near) < 1e-9, near, pos)  # snap rounding at nodes
        k = np.clip(np.floor(pos).astype(int), 0, len(self.values) - 2)
        w = pos - k
        v = self.values
        # exact at nodes: w == 0 returns v[k] untouched
        return np.where(w == 0.0, v[k], (1.0 - w) * v[k] + w * v[k + 1])


def profile_eval(p: SampledProfile, t):
    return p(t)


def _cumulative_from(y: np.ndarray, h: float, start: int) -> np.ndarray:
    """Integral of the sampled y from node ``start`` to every node k >= start.

    Composite Simpson at even offsets; an odd offset adds the three-point
    partial-interval rule on top of the preceding even node.
    """
    seg = y[start:]
    m = len(seg) - 1
    out = np.zeros(m + 1)
    pairs = m // 2
    if pairs:
        pieces = h / 3.0 * (seg[0:2 * pairs:2] + 4.0 * seg[1:2 * pairs:2]
                            + seg[2:2 * pairs + 1:2])
        out[2::2] = np.cumsum(pieces)
    odd = np.arange(1, m + 1, 2)
    if len(odd):
        fwd = odd[odd + 1 <= m]
        out[fwd] = out[fwd - 1] + h / 12.0 * (5.0 * seg[fwd - 1] + 8.0 * seg[fwd] - seg[fwd + 1])
        last = odd[odd + 1 > m]
        for k in last:
            prev = y[start + k - 2]
            out[k] = out[k - 1] + h / 12.0 * (-prev + 8.0 * seg[k - 1] + 5.0 * seg[k])
    return out


def antiderivative(h: SampledProfile, scale: float) -> SampledProfile:
    """``scale`` times the antiderivative of ``h`` that vanishes at its base point.

    Integrates outward from the base node in both directions with cumulative
    composite Simpson; a base point between nodes is handled by integrating the
    local quadratic interpolant over the fractional step.
    """
    if scale == 0.0 or not math.isfinite(scale):
        raise DegenerateScaleError(
            f"antiderivative scale {scale!r} is degenerate (dependent directions?)")
    y = np.asarray(h.values)
    n = len(y)
    if n < 3:
        raise CalculusError("antiderivative needs at least three samples")
    step = h.step
    pos = (h.base_point - h.t_min) / step
    kb = int(min(max(round(pos), 0), n - 1))
    right = _cumulative_from(y, step, kb)
    left = -_cumulative_from(y[::-1], step, n - 1 - kb)[::-1]
    integral = np.concatenate([left[:-1], right])
    frac = pos - kb
    if abs(frac) > 1e-9:
        c = min(max(kb, 1), n - 2)
        fm, f0, fp = y[c - 1], y[c], y[c + 1]

        def Q(s):
            return f0 * s + (fp - fm) * s ** 2 / 4.0 + (fp - 2.0 * f0 + fm) * s ** 3 / 6.0

        integral = integral - step * (Q(pos - c) - Q(kb - c))
    return h.with_values(scale * integral)
