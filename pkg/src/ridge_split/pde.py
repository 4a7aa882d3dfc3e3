"""Plane waves and factored constant-coefficient operators.

The operator prod_i (alpha_i d/dx + beta_i d/dy) annihilates every
v(beta_i x - alpha_i y), so sums of such plane waves solve the homogeneous
equation. :func:`corollary_check` runs the converse direction. It splits a
candidate u into smooth plane waves along the operator's characteristic
directions. Then it checks that the operator kills the reconstructed sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import expr as ex
from .calculus import (BivariateFunction, ExprFunction, Rect,
                       mixed_directional_derivative)
from .decompose import Decomposition, decompose
from .geometry import DirectionSet, validate_directions


@dataclass(frozen=True)
class PlaneWaveOperator:
    factors: tuple[tuple[float, float], ...]

    def __init__(self, factors: Sequence[Sequence[float]]):
        ds = validate_directions(factors)
        object.__setattr__(self, "factors", tuple((d.a, d.b) for d in ds))

    @property
    def r(self) -> int:
        return len(self.factors)

    def permuted(self, order: Sequence[int]) -> PlaneWaveOperator:
        return PlaneWaveOperator([self.factors[i] for i in order])


def wave_directions(op: PlaneWaveOperator) -> DirectionSet:
    """Ridge directions (beta_i, -alpha_i) of the plane waves solving op u = 0."""
    return validate_directions([(beta, -alpha) for alpha, beta in op.factors])


def plane_wave_solution(op: PlaneWaveOperator, profiles: Sequence) -> ExprFunction:
    """u(x, y) = sum_i v_i(beta_i x - alpha_i y) for profiles v_i given in t."""
    if len(profiles) != op.r:
        raise ValueError(f"operator has {op.r} factors but {len(profiles)} profiles were given")
    x, y = ex.Var("x"), ex.Var("y")
    total: ex.Expr = ex.Const(0.0)
    for (alpha, beta), v in zip(op.factors, profiles):
        if isinstance(v, str):
            v = ex.parse(v, ("t",))
        arg = ex.sub(ex.mul(ex.Const(beta), x), ex.mul(ex.Const(alpha), y))
        total = ex.add(total, v.substitute({"t": arg}))
    return ExprFunction(total)


def apply_operator(op: PlaneWaveOperator, u: BivariateFunction,
                   method: str = "symbolic") -> BivariateFunction:
    """Apply the factors left to right; returns the residual op(u)."""
    return mixed_directional_derivative(u, op.factors, method)


@dataclass(frozen=True)
class SolutionReport:
    max_residual: float
    max_abs_u: float
    tol: float
    passed: bool

    @property
    def threshold(self) -> float:
        return self.tol * (1.0 + self.max_abs_u)


def verify_solution(op: PlaneWaveOperator, u: BivariateFunction, domain, grid_n: int = 101,
                    tol: float = 1e-8, method: str = "symbolic") -> SolutionReport:
    """Max |op(u)| on a grid, compared against tol * (1 + max|u|)."""
    domain = Rect.of(domain)
    residual = apply_operator(op, u, method)
    X, Y = domain.mesh(grid_n)
    if residual.domain is not None:
        keep = residual.domain.contains(X, Y)
        X, Y = X[keep], Y[keep]
    res = float(np.max(np.abs(residual(X, Y))))
    umax = float(np.max(np.abs(u(X, Y))))
    return SolutionReport(res, umax, tol, res <= tol * (1.0 + umax))


@dataclass(frozen=True)
class CorollaryReport:
    decomposition: Decomposition
    solution: SolutionReport
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return self.solution.passed


def corollary_check(op: PlaneWaveOperator, u: BivariateFunction, domain, grid_n: int = 1025,
                    tol: float = 1e-8, method: str = "symbolic", verify_n: int = 101,
                    **decompose_kwargs) -> CorollaryReport:
    """Split u into plane waves along the operator's directions, then apply the
    operator to the reconstructed sum.

    The operator acts on the sampled ridge sum exactly. Each factor
    multiplies a term f(a x + b y) by (alpha a + beta b) and differentiates
    its spline once. Raises RepresentabilityError when u is not of plane-wave
    form for this operator.
    """
    if isinstance(u, str):
        u = ExprFunction.from_text(u)
    notes = []
    if u.smoothness is not None and u.smoothness < op.r:
        notes.append(f"smoothness hint {u.smoothness} is below the operator order {op.r}; "
                     "the statement assumes u in C^r")
    dec = decompose(u, wave_directions(op), domain, grid_n, method, **decompose_kwargs)
    report = verify_solution(op, dec.as_function(), dec.domain, verify_n, tol, "symbolic")
    return CorollaryReport(dec, report, tuple(notes))
