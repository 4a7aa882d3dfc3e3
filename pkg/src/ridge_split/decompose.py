"""Split a smooth F(x, y) into smooth ridge profiles along given directions.

For n >= 3 directions the pipeline works like an induction on the number of
ridge terms. Two directions (the axis pair) are treated as coordinate axes.
The other n-2 terms are annihilated by differentiating along a perpendicular
to each. What remains is a function of the two axis arguments, which splits
as h1(s) + h2(u). Integrating one perpendicular at a time brings back one
ridge term per stage. That term is read off the residual along a line where
it is the only unknown.

Everything runs in the original (x, y) coordinates. If M has the axis pair
as rows, a perpendicular l in normalized coordinates becomes the original
derivative direction w = inv(M) @ l. A profile along direction d_k then
picks up the integration scale 1 / (d_k . w) at that stage.

Constants are pinned at a base point, the domain center, instead of at the
origin. So the domain does not need to contain the origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .calculus import (BivariateFunction, CallableFunction, ExprFunction,
                       Rect, RidgeSumFunction, RidgeTerm,
                       SampledProfile, TGrid, antiderivative, line_interval,
                       mixed_directional_derivative, ridge_grid)
from .errors import (BackingError, CalculusError, DegenerateScaleError,
                     DomainMarginError, OutOfDomainError, RepresentabilityError,
                     SmoothnessError)
from .geometry import (DirectionSet, as_direction_set, normalize,
                       perpendicular_unit)

# stage tolerances, relative to 1 + max|G_j|
METHOD_RTOL = {"symbolic": 1e-8, "numeric": 1e-4}
# reconstruction tolerances used by verify, relative to 1 + max|F|
RECONSTRUCTION_RTOL = {"symbolic": 1e-6, "numeric": 1e-3}
VERIFY_N = 101
CHECK_N = 65
PROBE_N = 17


@dataclass(frozen=True)
class StageState:
    index: int
    target: BivariateFunction
    h1: SampledProfile
    h2: SampledProfile
    ridge: tuple[SampledProfile, ...]
    residual_sup: float
    constancy_defect: float
    tolerance: float


@dataclass(frozen=True, eq=False)
class Decomposition:
    directions: DirectionSet
    profiles: tuple[SampledProfile, ...]
    domain: Rect
    method: str
    reconstruction_sup_error: float
    separation_defect: float
    metadata: dict = field(default_factory=dict)
    source_expression: str | None = None
    stages: tuple[StageState, ...] = ()

    def __call__(self, x, y):
        return reconstruct(self, x, y)

    def as_function(self) -> RidgeSumFunction:
        return RidgeSumFunction(
            [RidgeTerm(tuple(d), p) for d, p in zip(self.directions, self.profiles)],
            self.domain)


def _sup(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _as_function(F) -> BivariateFunction:
    if isinstance(F, str):
        return ExprFunction.from_text(F)
    return F


# -- traces: where to read a univariate profile off a bivariate function -----

def _extrapolate(values: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Fill invalid entries at both ends with the cubic through the last four
    valid nodes, so the filled samples continue the data smoothly and a
    spline through them keeps its accuracy up to the edge."""
    idx = np.flatnonzero(valid)
    if len(idx) == 0:
        raise DomainMarginError("no profile node can be traced inside the domain")
    out = values.copy()
    lo, hi = idx[0], idx[-1]
    if not np.all(valid[lo:hi + 1]):
        raise DomainMarginError("profile trace is not contiguous inside the domain")
    ks = np.arange(len(values))
    deg = min(3, hi - lo)
    if ks[-1] > hi:
        fit = np.polyfit(np.arange(-deg, 1), out[hi - deg:hi + 1], deg)
        out[hi + 1:] = np.polyval(fit, ks[hi + 1:] - hi)
    if lo > 0:
        fit = np.polyfit(np.arange(0, deg + 1), out[lo:lo + deg + 1], deg)
        out[:lo] = np.polyval(fit, ks[:lo] - lo)
    return out


def _base_index(grid: TGrid) -> int:
    return int(min(max(round((grid.base - grid.t_min) / grid.step), 0), grid.n - 1))


def _trace_axis(G: BivariateFunction, nodes: np.ndarray, kb: int, fixed: float,
                move_col: np.ndarray, fixed_col: np.ndarray, rect: Rect | None) -> np.ndarray:
    """Values of G along the line {move_col*t + fixed_col*fixed}.

    On a bounded domain the line may leave the rectangle; there the trace is
    glued from parallel lines: consecutive nodes are differenced on a common
    line inside the rectangle and the differences are accumulated outward
    from the base node. For a function of the form h1(s) + h2(u) this
    reproduces h1 up to the same constant as the straight trace.
    """
    if rect is None:
        pts = np.outer(nodes, move_col) + fixed * fixed_col
        return G(pts[:, 0], pts[:, 1])

    n = len(nodes)
    ivals = np.array([line_interval(move_col * t, fixed_col, rect) for t in nodes])
    lo, hi = ivals[:, 0], ivals[:, 1]
    feasible = lo <= hi
    if not feasible[kb]:
        raise DomainMarginError("base point lies outside the domain")

    def point(t, u):
        return move_col[0] * t + fixed_col[0] * u, move_col[1] * t + fixed_col[1] * u

    values = np.full(n, np.nan)
    valid = np.zeros(n, bool)
    u_b = float(np.clip(fixed, lo[kb], hi[kb]))
    values[kb] = G(*point(nodes[kb], u_b))
    valid[kb] = True
    for direction in (1, -1):
        ks, us = [], []
        k = kb
        u = u_b
        while 0 <= k + direction < n:
            k2 = k + direction
            a, b = max(lo[k], lo[k2]), min(hi[k], hi[k2])
            if not (feasible[k2] and a <= b):
                break
            # stay on one line as long as possible: differences along a single
            # line telescope, so interpolation errors only enter at switches
            if not a <= u <= b:
                u = (a + b) / 2.0
            ks.append(k)
            us.append(u)
            k = k2
        if not ks:
            continue
        ks = np.array(ks)
        us = np.array(us)
        steps = G(*point(nodes[ks + direction], us)) - G(*point(nodes[ks], us))
        targets = ks + direction
        values[targets] = values[kb] + np.cumsum(steps)
        valid[targets] = True
    return _extrapolate(values, valid)


def _trace_ridge(R: BivariateFunction, d: Sequence[float], grid: TGrid,
                 work: Rect, anchor: np.ndarray) -> np.ndarray:
    """R along a curve on which d . (x, y) takes every grid value.

    Unbounded functions use the straight line through ``anchor`` parallel to
    the domain diagonal joining the corners where d . p is smallest and
    largest. Through the center that diagonal stays inside the domain over
    the whole image, and it overshoots any other ridge argument by no more
    than the shared padding. Bounded functions use the midpoint of each chord
    {d . p = t} of the working rectangle.
    """
    d = np.asarray(d, dtype=float)
    t = grid.nodes
    if not R.bounded:
        corners = work.corners
        c_lo = corners[np.argmin(corners @ d)]
        v = 2.0 * (work.center - c_lo)
        v = v / float(d @ v)
        pts = anchor + np.outer(t - float(d @ anchor), v)
        return R(pts[:, 0], pts[:, 1])
    along = d / float(d @ d)
    base_pts = anchor + np.outer(t - float(d @ anchor), along)
    perp = perpendicular_unit(d)
    ivals = np.array([line_interval(p, perp, work) for p in base_pts])
    valid = ivals[:, 0] <= ivals[:, 1]
    mid = np.where(valid, (np.where(valid, ivals[:, 0], 0.0)
                           + np.where(valid, ivals[:, 1], 0.0)) / 2.0, 0.0)
    pts = base_pts + np.outer(mid, perp)
    values = np.full(len(t), np.nan)
    values[valid] = R(pts[valid, 0], pts[valid, 1])
    return _extrapolate(values, valid)


# -- diagnostics ------------------------------------------------------------

def _separation(G: BivariateFunction, base, domain: Rect, grid_n: int,
                M: np.ndarray | None = None) -> tuple[float, float]:
    X, Y = domain.mesh(grid_n)
    X, Y = X.ravel(), Y.ravel()
    bx, by = float(base[0]), float(base[1])
    if M is None:
        c1 = (X, np.full_like(X, by))
        c2 = (np.full_like(Y, bx), Y)
    else:
        Mi = np.linalg.inv(M)
        s, u = M[0, 0] * X + M[0, 1] * Y, M[1, 0] * X + M[1, 1] * Y
        s0, u0 = M @ np.array([bx, by])
        c1 = (Mi[0, 0] * s + Mi[0, 1] * u0, Mi[1, 0] * s + Mi[1, 1] * u0)
        c2 = (Mi[0, 0] * s0 + Mi[0, 1] * u, Mi[1, 0] * s0 + Mi[1, 1] * u)
    keep = G.contains(X, Y) & G.contains(*c1) & G.contains(*c2)
    if not np.any(keep):
        raise DomainMarginError("no grid point admits the separation check")
    g = G(X[keep], Y[keep])
    defect = g - G(c1[0][keep], c1[1][keep]) - G(c2[0][keep], c2[1][keep]) + G(bx, by)
    return _sup(defect), _sup(g)


def separation_defect(G: BivariateFunction, base, domain, grid_n: int = CHECK_N,
                      transform: np.ndarray | None = None) -> float:
    """max |G(x,y) - G(x,y0) - G(x0,y) + G(x0,y0)| over a grid_n x grid_n grid.

    Zero exactly when G is a sum of a function of x and a function of y.
    With ``transform`` M the split is tested in the coordinates M @ (x, y).
    """
    G = _as_function(G)
    return _separation(G, base, Rect.of(domain), grid_n, transform)[0]


def representability_defect(F: BivariateFunction, ds, deltas, domain,
                            grid_n: int = CHECK_N) -> float:
    """Max over a grid of the n-fold iterated increment of F, one increment
    along the perpendicular of every direction. A ridge sum along ``ds``
    gives zero, so a clearly nonzero value rules out such a representation."""
    F = _as_function(F)
    ds = as_direction_set(ds)
    domain = Rect.of(domain)
    n = len(ds)
    deltas = np.broadcast_to(np.asarray(deltas, dtype=float), (n,))
    shifts = np.array([perpendicular_unit(d) * dl for d, dl in zip(ds, deltas)])
    lo = np.minimum(shifts, 0.0).sum(axis=0)
    hi = np.maximum(shifts, 0.0).sum(axis=0)
    inner = Rect(domain.x0 - lo[0], domain.x1 - hi[0], domain.y0 - lo[1], domain.y1 - hi[1])
    if inner.x0 > inner.x1 or inner.y0 > inner.y1:
        raise DomainMarginError(f"domain too small for increments {list(deltas)}")
    xs = np.linspace(inner.x0, inner.x1, grid_n)
    ys = np.linspace(inner.y0, inner.y1, grid_n)
    X, Y = np.meshgrid(xs, ys)
    total = np.zeros_like(X)
    for mask in range(1 << n):
        sel = [(mask >> i) & 1 for i in range(n)]
        shift = np.array(sel, dtype=float) @ shifts
        sign = -1.0 if (n - sum(sel)) % 2 else 1.0
        total += sign * F(X + shift[0], Y + shift[1])
    return _sup(total)


def extract_ridge_profile(R: BivariateFunction, d: Sequence[float], grid: TGrid,
                          working_domain, *, tol: float | None = None,
                          anchor=None, interpolation: str = "cubic"
                          ) -> tuple[SampledProfile, float]:
    """Read phi with R(x, y) = phi(d . (x, y)) off R.

    Returns the profile and the measured constancy defect: the largest change
    of R along the perpendicular of ``d`` over probe pairs in the working
    domain. If ``tol`` is given and the defect exceeds
    ``tol * (1 + max|R|)``, a RepresentabilityError is raised instead.
    """
    work = Rect.of(working_domain)
    anchor = work.center if anchor is None else np.asarray(anchor, dtype=float)
    values = _trace_ridge(R, d, grid, work, anchor)
    profile = SampledProfile.on_grid(grid, values, interpolation)

    l = perpendicular_unit(d)
    X, Y = work.mesh(PROBE_N)
    X, Y = X.ravel(), Y.ravel()
    r0 = R(X, Y)
    defect = 0.0
    for frac in (-0.5, -0.25, 0.25, 0.5):
        s = frac * work.size
        Xs, Ys = X + s * l[0], Y + s * l[1]
        ok = work.contains(Xs, Ys)
        if np.any(ok):
            defect = max(defect, _sup(R(Xs[ok], Ys[ok]) - r0[ok]))
    if tol is not None:
        threshold = tol * (1.0 + _sup(r0))
        if defect > threshold:
            raise RepresentabilityError("constancy", defect, threshold)
    return profile, defect


# -- the pipeline ------------------------------------------------------------

def _inverse_scale(d: Sequence[float], w: np.ndarray) -> float:
    dot = float(d[0] * w[0] + d[1] * w[1])
    if dot == 0.0:
        raise DegenerateScaleError(
            f"direction {tuple(d)} is orthogonal to derivative direction {tuple(w)}")
    return 1.0 / dot


def _ridge_sum(pairs) -> callable:
    def total(x, y):
        acc = 0.0
        for d, prof in pairs:
            acc = acc + prof(d[0] * x + d[1] * y)
        return acc
    return total



# -- two-resolution stage runs -------------------------------------------------

COARSE_MIN_N = 9


@dataclass
class _StageRecord:
    k: int
    residual: float
    defect: float
    r_sup: float


@dataclass
class _StageRun:
    h1: list
    h2: list
    snapshots: list
    ridge: list
    records: list


def _half_grid(g: TGrid) -> TGrid:
    """Every other node of ``g``."""
    nc = (g.n - 1) // 2 + 1
    return TGrid(g.t_min, g.t_min + 2.0 * g.step * (nc - 1), nc, g.base)


def _extrapolated(fine: float, coarse: float | None) -> float:
    """Defect extrapolated to zero step from runs at steps h and 2h.

    Discretization error falls by 16 per halving (Simpson plus cubic
    splines), so a defect made of it cancels. A genuine defect does not
    depend on the step and survives. Without a coarse run, the fine value
    is returned unchanged.
    """
    if coarse is None:
        return fine
    return max(0.0, fine - max(0.0, coarse - fine) / 15.0)


def _run_stages(targets, ds: DirectionSet, norm, W, grids, domain: Rect,
                check_n: int) -> _StageRun:
    """Split G_0 and integrate back one ridge term per stage on ``grids``.

    Nothing is gated here; every stage records its residual and constancy
    defect for the caller.
    """
    n = len(ds)
    p, q = norm.axis_pair
    G0 = targets[0]
    rect = domain if G0.bounded else None
    Mi = norm.M_inv
    s_vals = _trace_axis(G0, grids[p].nodes, _base_index(grids[p]), grids[q].base,
                         Mi[:, 0], Mi[:, 1], rect)
    u_vals = _trace_axis(G0, grids[q].nodes, _base_index(grids[q]), grids[p].base,
                         Mi[:, 1], Mi[:, 0], rect)
    g_base = s_vals[_base_index(grids[p])]
    h1 = SampledProfile.on_grid(grids[p], s_vals, "cubic")
    h2 = SampledProfile.on_grid(grids[q], u_vals - g_base, "cubic")
    run = _StageRun([h1], [h2], [()], [], [])
    ridge: list[tuple[int, SampledProfile]] = []
    for j in range(1, n - 1):
        w = W[j - 1]
        h1 = antiderivative(h1, _inverse_scale(ds[p], w))
        h2 = antiderivative(h2, _inverse_scale(ds[q], w))
        ridge = [(k, antiderivative(phi, _inverse_scale(ds[k], w))) for k, phi in ridge]
        Gj = targets[j]
        known = [(ds[p], h1), (ds[q], h2)] + [(ds[k], phi) for k, phi in ridge]
        known_sum = _ridge_sum(known)
        work = domain if Gj.domain is None else Rect(
            max(domain.x0, Gj.domain.x0), min(domain.x1, Gj.domain.x1),
            max(domain.y0, Gj.domain.y0), min(domain.y1, Gj.domain.y1))
        R = CallableFunction(lambda x, y, G=Gj, s=known_sum: G(x, y) - s(x, y),
                             Gj.domain)
        k = norm.perm[j - 1]
        phi, defect = extract_ridge_profile(R, ds[k], grids[k], work)
        X, Y = work.mesh(check_n)
        r = R(X, Y)
        residual = _sup(r - phi(ds[k][0] * X + ds[k][1] * Y))
        ridge.append((k, phi))
        run.h1.append(h1)
        run.h2.append(h2)
        run.snapshots.append(tuple(ph for _, ph in ridge))
        run.records.append(_StageRecord(k, residual, defect, _sup(r)))
    run.ridge = ridge
    return run


def _prepare(F, dirs, domain, method, grid_n):
    F = _as_function(F)
    ds = as_direction_set(dirs)
    if domain is None:
        domain = F.domain if F.domain is not None else Rect(-1.0, 1.0, -1.0, 1.0)
    domain = Rect.of(domain)
    if F.domain is not None and not domain.inside(F.domain):
        raise OutOfDomainError(
            f"domain {tuple(domain)} is not inside the function's domain {tuple(F.domain)}")
    if method not in METHOD_RTOL:
        raise ValueError(f"unknown method {method!r}")
    if grid_n < 5:
        raise CalculusError("grid_n must be at least 5")
    return F, ds, domain


def _verify(F: BivariateFunction, ds: DirectionSet, profiles, domain: Rect, n: int) -> float:
    X, Y = domain.mesh(n)
    rec = _ridge_sum(list(zip(ds, profiles)))(X, Y)
    return _sup(F(X, Y) - rec)


def decompose_small_n(F, dirs, domain=None, grid_n: int = 1025, method: str = "symbolic",
                      *, stage_rtol: float | None = None, verify_n: int = VERIFY_N,
                      check_n: int = CHECK_N) -> Decomposition:
    """One or two directions: read the profiles directly off F.

    n = 1: f(t) = F on the line through the anchor with d . p = t.
    n = 2: with (c_i, d_i) the dual basis of the two directions, f_i is F on
    the anchor line along (c_i, d_i), minus half of F(anchor). The anchor is
    the origin when the domain contains it, else the domain center.
    """
    F, ds, domain = _prepare(F, dirs, domain, method, grid_n)
    n = len(ds)
    if n > 2:
        raise ValueError("decompose_small_n handles one or two directions")
    rtol = METHOD_RTOL[method] if stage_rtol is None else stage_rtol
    anchor = np.zeros(2) if bool(domain.contains(0.0, 0.0, tol=0.0)) else domain.center
    grids = [ridge_grid(d, domain, grid_n, base=float(np.dot(d, anchor))) for d in ds]
    meta = {"grid_n": grid_n, "anchor": anchor.tolist(), "interpolation": "cubic"}

    if n == 1:
        phi, defect = extract_ridge_profile(F, ds[0], grids[0], domain, tol=rtol, anchor=anchor)
        profiles = (phi,)
    else:
        M = np.array(ds.dirs, dtype=float)
        defect, gmax = _separation(F, anchor, domain, check_n, M)
        threshold = rtol * (1.0 + gmax)
        if defect > threshold:
            raise RepresentabilityError("separation", defect, threshold)
        Mi = np.linalg.inv(M)
        rect = domain if F.bounded else None
        s_vals = _trace_axis(F, grids[0].nodes, _base_index(grids[0]), grids[1].base,
                             Mi[:, 0], Mi[:, 1], rect)
        u_vals = _trace_axis(F, grids[1].nodes, _base_index(grids[1]), grids[0].base,
                             Mi[:, 1], Mi[:, 0], rect)
        f_anchor = F(*anchor)
        profiles = (SampledProfile.on_grid(grids[0], s_vals - f_anchor / 2, "cubic"),
                    SampledProfile.on_grid(grids[1], u_vals - f_anchor / 2, "cubic"))
        meta["dual_basis"] = Mi.T.tolist()
    meta["steps"] = [p.step for p in profiles]
    err = _verify(F, ds, profiles, domain, verify_n)
    return Decomposition(ds, profiles, domain, method, err, defect, meta,
                         getattr(F, "source", None))


def decompose(F, dirs, domain=None, grid_n: int = 1025, method: str = "symbolic", *,
              axis_pair: tuple[int, int] | None = None, stage_rtol: float | None = None,
              verify_n: int = VERIFY_N, check_n: int = CHECK_N,
              perp_signs: Sequence[int] | None = None,
              allow_high_order: bool = False) -> Decomposition:
    """Decompose F into smooth sampled profiles f_i with F = sum f_i(a_i x + b_i y).

    Parameters
    ----------
    F : BivariateFunction or str
        The function; a string is parsed as an expression in x and y.
    dirs : DirectionSet or sequence of (a, b)
    domain : (x0, x1, y0, y1), optional
        Defaults to the function's own rectangle, or [-1, 1]^2.
    grid_n : int
        Nodes per profile.
    method : {"symbolic", "numeric"}
        How the mixed directional derivatives of F are taken.

    Raises
    ------
    RepresentabilityError
        When a stage finds F is not a ridge sum along ``dirs``; no
        decomposition is produced in that case.
    """
    F, ds, domain = _prepare(F, dirs, domain, method, grid_n)
    n = len(ds)
    if F.smoothness is not None and F.smoothness < n - 2:
        raise SmoothnessError(
            f"smoothness hint {F.smoothness} is below n-2 = {n - 2}")
    if n <= 2:
        return decompose_small_n(F, ds, domain, grid_n, method, stage_rtol=stage_rtol,
                                 verify_n=verify_n, check_n=check_n)
    if method == "symbolic" and not isinstance(F, (ExprFunction, RidgeSumFunction)):
        raise BackingError("the symbolic method needs an expression-backed function")

    rtol = METHOD_RTOL[method] if stage_rtol is None else stage_rtol
    norm = normalize(ds, axis_pair)
    p, q = norm.axis_pair
    signs = list(perp_signs) if perp_signs is not None else [1] * (n - 2)
    if len(signs) != n - 2 or any(s not in (1, -1) for s in signs):
        raise ValueError("perp_signs needs n-2 entries of +1 or -1")
    W = [norm.M_inv @ (s * l) for s, l in zip(signs, norm.perps)]
    center = domain.center
    grids = [ridge_grid(d, domain, grid_n) for d in ds]

    def target(j: int) -> BivariateFunction:
        return mixed_directional_derivative(F, W[j:], method, scale=domain.size,
                                            allow_high_order=allow_high_order)

    G0 = target(0)
    sep, gmax = _separation(G0, center, domain, check_n, norm.M)
    threshold = rtol * (1.0 + gmax)
    if sep > threshold:
        raise RepresentabilityError("separation", sep, threshold, stage=0)

    targets = [G0] + [target(j) for j in range(1, n - 1)]
    fine = _run_stages(targets, ds, norm, W, grids, domain, check_n)
    coarse = None
    if grid_n >= COARSE_MIN_N:
        coarse = _run_stages(targets, ds, norm, W, [_half_grid(g) for g in grids],
                             domain, check_n)
    stages = [StageState(0, G0, fine.h1[0], fine.h2[0], (), sep, 0.0, threshold)]
    stage_meta = [{"stage": 0, "separation_defect": sep, "threshold": threshold}]
    for j in range(1, n - 1):
        rec = fine.records[j - 1]
        threshold = rtol * (1.0 + rec.r_sup)
        prev = coarse.records[j - 1] if coarse is not None else None
        for kind, attr in (("constancy", "defect"), ("stage residual", "residual")):
            value = getattr(rec, attr)
            if _extrapolated(value, getattr(prev, attr, None)) > threshold:
                raise RepresentabilityError(kind, value, threshold, stage=j)
        stages.append(StageState(j, targets[j], fine.h1[j], fine.h2[j], fine.snapshots[j],
                                 rec.residual, rec.defect, threshold))
        meta_j = {"stage": j, "direction_index": rec.k, "constancy_defect": rec.defect,
                  "residual_sup": rec.residual, "threshold": threshold}
        if coarse is not None:
            meta_j["coarse_residual_sup"] = coarse.records[j - 1].residual
        stage_meta.append(meta_j)

    h1, h2 = fine.h1[-1], fine.h2[-1]
    ridge = fine.ridge
    by_index = {p: h1, q: h2, **dict(ridge)}
    profiles = tuple(by_index[i] for i in range(n))
    err = _verify(F, ds, profiles, domain, verify_n)
    meta = {
        "grid_n": grid_n,
        "axis_pair": [p, q],
        "normalization": norm.M.tolist(),
        "derivative_directions": [w.tolist() for w in W],
        "perp_signs": signs,
        "steps": [pr.step for pr in profiles],
        "stage_rtol": rtol,
        "stages": stage_meta,
        "verify_n": verify_n,
        "interpolation": "cubic",
    }
    if isinstance(F, ExprFunction):
        meta["smooth_expression"] = F.smooth
    return Decomposition(ds, profiles, domain, method, err, sep, meta,
                         getattr(F, "source", None), tuple(stages))


def reconstruct(dec: Decomposition, x, y):
    """sum_i profiles[i](a_i x + b_i y); errors outside the domain or profile ranges."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not np.all(dec.domain.contains(x, y)):
        raise OutOfDomainError(f"point outside the decomposition domain {tuple(dec.domain)}")
    out = _ridge_sum(list(zip(dec.directions, dec.profiles)))(x, y)
    out = np.broadcast_to(out, np.broadcast(x, y).shape)
    return float(out) if out.ndim == 0 else np.array(out)
