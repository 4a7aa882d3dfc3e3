"""Ridge directions: validation, perpendiculars and axis normalization.

A ridge term ``g(a*x + b*y)`` only cares about the line spanned by ``(a, b)``,
so direction sets are validated for pairwise linear independence using the
cross product normalized by both lengths (the |sine| of the angle between them).

Normalization picks two directions, forms the matrix ``M`` whose rows they
are, and re-expresses every direction as ``d @ inv(M)``. Ridge arguments are
unchanged, ``d . (x, y) == (d @ inv(M)) . (M @ (x, y))``, and the chosen pair
becomes the coordinate axes of the new variables.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DependentDirectionsError, DirectionError, ZeroDirectionError

DEFAULT_TOL_INDEP = 1e-12


class Direction(NamedTuple):
    a: float
    b: float

    @property
    def norm(self) -> float:
        return math.hypot(self.a, self.b)

    def dot(self, v: Sequence[float]) -> float:
        return self.a * v[0] + self.b * v[1]


def normalized_cross(d1: Sequence[float], d2: Sequence[float]) -> float:
    """|a1*b2 - a2*b1| / (|d1| |d2|), i.e. |sin| of the angle between d1 and d2."""
    return abs(d1[0] * d2[1] - d2[0] * d1[1]) / (
        math.hypot(d1[0], d1[1]) * math.hypot(d2[0], d2[1]))


@dataclass(frozen=True)
class DirectionSet:
    dirs: tuple[Direction, ...]
    tol_indep: float = DEFAULT_TOL_INDEP

    def __len__(self) -> int:
        return len(self.dirs)

    def __iter__(self):
        return iter(self.dirs)

    def __getitem__(self, i: int) -> Direction:
        return self.dirs[i]

    def as_array(self) -> np.ndarray:
        return np.array(self.dirs, dtype=float).reshape(-1, 2)

    def pairwise_cross(self) -> dict[tuple[int, int], float]:
        return {(i, j): normalized_cross(self.dirs[i], self.dirs[j])
                for i, j in itertools.combinations(range(len(self.dirs)), 2)}


def validate_directions(dirs: Iterable[Sequence[float]],
                        tol_indep: float = DEFAULT_TOL_INDEP) -> DirectionSet:
    """Check that ``dirs`` is a non-empty set of pairwise independent vectors.

    Raises ZeroDirectionError naming the first zero vector, or
    DependentDirectionsError naming the first pair (in lexicographic order)
    whose normalized cross product does not exceed ``tol_indep``.
    """
    ds = []
    for i, d in enumerate(dirs):
        if len(d) != 2:
            raise DirectionError(f"direction {i} must have two components")
        a, b = float(d[0]), float(d[1])
        if not (math.isfinite(a) and math.isfinite(b)):
            raise DirectionError(f"direction {i} has non-finite components")
        if a == 0.0 and b == 0.0:
            raise ZeroDirectionError(i)
        ds.append(Direction(a, b))
    if not ds:
        raise DirectionError("at least one direction is required")
    for i, j in itertools.combinations(range(len(ds)), 2):
        cross = normalized_cross(ds[i], ds[j])
        if not cross > tol_indep:
            raise DependentDirectionsError(i, j, cross)
    return DirectionSet(tuple(ds), tol_indep)


def as_direction_set(dirs, tol_indep: float = DEFAULT_TOL_INDEP) -> DirectionSet:
    if isinstance(dirs, DirectionSet):
        return dirs
    return validate_directions(dirs, tol_indep)


def perpendicular_unit(d: Sequence[float]) -> np.ndarray:
    """Unit vector obtained by rotating ``d`` by +90 degrees: (-b, a)/|d|."""
    a, b = float(d[0]), float(d[1])
    r = math.hypot(a, b)
    if r == 0.0:
        raise ZeroDirectionError(0)
    return np.array([-b / r, a / r])


@dataclass(frozen=True)
class NormalizedProblem:
    """Directions after mapping the axis pair onto the coordinate axes.

    ``perm`` lists original direction indices in normalized order: the
    n-2 non-axis directions first (in their original order), then the axis pair.
    ``dirs_normalized[k]`` is the image of original direction ``perm[k]``;
    ``perps[j]`` is the unit perpendicular to ``dirs_normalized[j]``.
    """

    M: np.ndarray
    M_inv: np.ndarray
    perm: tuple[int, ...]
    dirs_normalized: DirectionSet
    perps: tuple[np.ndarray, ...]

    @property
    def axis_pair(self) -> tuple[int, int]:
        return self.perm[-2], self.perm[-1]

    def to_normalized(self, x, y):
        """(x', y') = M (x, y); works on arrays."""
        M = self.M
        return M[0, 0] * x + M[0, 1] * y, M[1, 0] * x + M[1, 1] * y

    def from_normalized(self, xp, yp):
        Mi = self.M_inv
        return Mi[0, 0] * xp + Mi[0, 1] * yp, Mi[1, 0] * xp + Mi[1, 1] * yp


def select_axis_pair(ds: DirectionSet) -> tuple[int, int]:
    """Pair with the largest normalized cross product; first one wins ties."""
    if len(ds) < 2:
        raise DirectionError("need at least two directions to choose an axis pair")
    best, best_val = None, -1.0
    for (i, j), val in ds.pairwise_cross().items():
        if val > best_val:
            best, best_val = (i, j), val
    return best


def normalize(ds: DirectionSet, axis_pair: tuple[int, int] | None = None) -> NormalizedProblem:
    n = len(ds)
    if n < 3:
        raise DirectionError("normalization needs at least three directions")
    if axis_pair is None:
        axis_pair = select_axis_pair(ds)
    p, q = axis_pair
    if p == q or not (0 <= p < n and 0 <= q < n):
        raise DirectionError(f"invalid axis pair {axis_pair}")
    M = np.array([ds[p], ds[q]], dtype=float)
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    if det == 0.0 or normalized_cross(ds[p], ds[q]) <= ds.tol_indep:
        raise DependentDirectionsError(p, q, normalized_cross(ds[p], ds[q]))
    M_inv = np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]]) / det

    others = [i for i in range(n) if i not in (p, q)]
    perm = tuple(others + [p, q])
    mapped = [tuple(np.asarray(ds[i], dtype=float) @ M_inv) for i in others]
    mapped += [(1.0, 0.0), (0.0, 1.0)]
    normalized = validate_directions(mapped, ds.tol_indep)
    perps = tuple(perpendicular_unit(d) for d in normalized.dirs[: n - 2])
    return NormalizedProblem(M, M_inv, perm, normalized, perps)
