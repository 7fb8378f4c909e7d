"""Piecewise-monotone continuous self-maps of a compact interval.

A map is an ordered list of monotone branches whose sub-domains partition
the domain.  Monotonicity makes interval images exact: the image of a
closed interval is spanned by the values at its endpoints, at interior
seams, and (as a guard for user-supplied quadratics) at the vertex.

Branch evaluation is endpoint-exact: querying a branch at the ends of its
sub-domain returns the stored values bit-for-bit, so iterated images of
preset maps do not drift.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConstructionError, UnsupportedMapError
from .intervals import IntervalSet

SEAM_TOL = 1e-12
_MONOTONE_SAMPLES = 257


class MonotoneBranch:
    """Common interface of the branch kinds; not instantiated directly."""

    x0: float
    x1: float
    is_linear = False

    def eval(self, x: float) -> float:
        raise NotImplementedError

    def eval_array(self, xs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inverse_array(self, ys: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def strict_direction_on(self, lo: float, hi: float):
        """+1/-1 if strictly monotone with nonzero slope on [lo, hi], else None."""
        raise NotImplementedError

    def slope_bound(self) -> float:
        raise NotImplementedError

    def interior_extrema(self) -> tuple[float, ...]:
        return ()

    @property
    def value_lo(self) -> float:
        return self.eval(self.x0)

    @property
    def value_hi(self) -> float:
        return self.eval(self.x1)

    def _check_monotone(self) -> None:
        xs = np.linspace(self.x0, self.x1, _MONOTONE_SAMPLES)
        ys = self.eval_array(xs)
        d = np.diff(ys)
        if not (np.all(d >= -SEAM_TOL) or np.all(d <= SEAM_TOL)):
            raise ConstructionError(
                f"branch on [{self.x0}, {self.x1}] is not monotone"
            )


@dataclass(frozen=True)
class LinearBranch(MonotoneBranch):
    x0: float
    x1: float
    y0: float
    y1: float
    is_linear = True

    def __post_init__(self):
        if not self.x0 < self.x1:
            raise ConstructionError("branch needs x0 < x1")

    @property
    def slope(self) -> float:
        return (self.y1 - self.y0) / (self.x1 - self.x0)

    def eval(self, x: float) -> float:
        if x == self.x0:
            return self.y0
        if x == self.x1:
            return self.y1
        return self.y0 + (x - self.x0) * self.slope

    def eval_array(self, xs: np.ndarray) -> np.ndarray:
        out = self.y0 + (xs - self.x0) * self.slope
        out = np.where(xs == self.x0, self.y0, out)
        out = np.where(xs == self.x1, self.y1, out)
        return out

    def inverse_array(self, ys: np.ndarray) -> np.ndarray:
        # caller guarantees ys within the value range and slope != 0
        return self.x0 + (ys - self.y0) / self.slope

    def strict_direction_on(self, lo: float, hi: float):
        s = self.slope
        if s > 0:
            return 1
        if s < 0:
            return -1
        return None

    def slope_bound(self) -> float:
        return abs(self.slope)


@dataclass(frozen=True)
class QuadraticBranch(MonotoneBranch):
    """a*x^2 + b*x + c, monotone on [x0, x1]."""

    x0: float
    x1: float
    a: float
    b: float
    c: float

    def __post_init__(self):
        if not self.x0 < self.x1:
            raise ConstructionError("branch needs x0 < x1")
        self._check_monotone()

    def eval(self, x: float) -> float:
        return (self.a * x + self.b) * x + self.c

    def eval_array(self, xs: np.ndarray) -> np.ndarray:
        return (self.a * xs + self.b) * xs + self.c

    def derivative(self, x: float) -> float:
        return 2.0 * self.a * x + self.b

    def inverse_array(self, ys: np.ndarray) -> np.ndarray:
        if self.a == 0.0:
            return (ys - self.c) / self.b
        disc = self.b * self.b - 4.0 * self.a * (self.c - ys)
        root = np.sqrt(np.maximum(disc, 0.0))
        sign = self._root_sign()
        return (-self.b + sign * root) / (2.0 * self.a)

    def _root_sign(self) -> float:
        xm = (self.x0 + self.x1) / 2.0
        ym = self.eval(xm)
        disc = self.b * self.b - 4.0 * self.a * (self.c - ym)
        root = math.sqrt(max(disc, 0.0))
        plus = (-self.b + root) / (2.0 * self.a)
        minus = (-self.b - root) / (2.0 * self.a)
        return 1.0 if abs(plus - xm) <= abs(minus - xm) else -1.0

    def strict_direction_on(self, lo: float, hi: float):
        # the derivative is linear, so a zero at one endpoint still leaves
        # the branch strictly monotone on [lo, hi]
        dlo, dhi = self.derivative(lo), self.derivative(hi)
        if dlo >= 0 and dhi >= 0 and (dlo > 0 or dhi > 0):
            return 1
        if dlo <= 0 and dhi <= 0 and (dlo < 0 or dhi < 0):
            return -1
        return None

    def slope_bound(self) -> float:
        return max(abs(self.derivative(self.x0)), abs(self.derivative(self.x1)))

    def interior_extrema(self) -> tuple[float, ...]:
        if self.a == 0.0:
            return ()
        v = -self.b / (2.0 * self.a)
        if self.x0 < v < self.x1:
            return (v,)
        return ()


@dataclass(frozen=True)
class CallableBranch(MonotoneBranch):
    """Generic monotone callable with a certified direction."""

    x0: float
    x1: float
    fn: Callable[[float], float]
    increasing: bool

    def __post_init__(self):
        if not self.x0 < self.x1:
            raise ConstructionError("branch needs x0 < x1")
        self._check_monotone()

    def eval(self, x: float) -> float:
        return float(self.fn(x))

    def eval_array(self, xs: np.ndarray) -> np.ndarray:
        return np.asarray([float(self.fn(float(x))) for x in xs])

    def inverse_array(self, ys: np.ndarray) -> np.ndarray:
        ys = np.asarray(ys, dtype=float)
        lo = np.full_like(ys, self.x0)
        hi = np.full_like(ys, self.x1)
        for _ in range(80):  # bisection to ~2^-80 of the branch width
            mid = 0.5 * (lo + hi)
            vals = self.eval_array(mid)
            below = (vals < ys) if self.increasing else (vals > ys)
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def strict_direction_on(self, lo: float, hi: float):
        return 1 if self.increasing else -1

    def slope_bound(self) -> float:
        xs = np.linspace(self.x0, self.x1, _MONOTONE_SAMPLES)
        ys = self.eval_array(xs)
        return float(np.max(np.abs(np.diff(ys) / np.diff(xs))))


class PiecewiseMonotoneMap:
    """Continuous self-map given by monotone branches partitioning the domain."""

    def __init__(self, branches: Sequence[MonotoneBranch]):
        branches = tuple(branches)
        if not branches:
            raise ConstructionError("map needs at least one branch")
        for left, right in zip(branches, branches[1:]):
            if abs(left.x1 - right.x0) > SEAM_TOL:
                raise ConstructionError(
                    f"branch sub-domains do not partition: gap at {left.x1}"
                )
            if abs(left.value_hi - right.value_lo) > SEAM_TOL:
                raise ConstructionError(
                    f"discontinuity at seam x={left.x1}: "
                    f"{left.value_hi} vs {right.value_lo}"
                )
        self.branches = branches
        self.domain = (branches[0].x0, branches[-1].x1)
        self._starts = np.asarray([br.x0 for br in branches])
        self._starts_list = [br.x0 for br in branches]
        seams = [br.x0 for br in branches[1:]]
        extrema = [p for br in branches for p in br.interior_extrema()]
        self._interior_candidates = tuple(sorted(set(seams + extrema)))

    # -- evaluation -----------------------------------------------------

    def _branch_index(self, x: float) -> int:
        i = bisect.bisect_right(self._starts_list, x) - 1
        return min(max(i, 0), len(self.branches) - 1)

    def eval(self, x: float) -> float:
        return self.branches[self._branch_index(x)].eval(x)

    def eval_array(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        idx = np.searchsorted(self._starts, xs, side="right") - 1
        idx = np.clip(idx, 0, len(self.branches) - 1)
        out = np.empty_like(xs)
        for j, br in enumerate(self.branches):
            m = idx == j
            if m.any():
                out[m] = br.eval_array(xs[m])
        return out

    # -- exact interval images -------------------------------------------

    def image_interval(self, lo: float, hi: float) -> tuple[float, float]:
        """Exact image of [lo, hi]; extremes sit at endpoints, seams, vertices."""
        vals = [self.eval(lo), self.eval(hi)]
        for p in self._interior_candidates:
            if lo < p < hi:
                vals.append(self.eval(p))
        return min(vals), max(vals)

    def image_arrays(
        self, los: np.ndarray, his: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized :meth:`image_interval` over parallel arrays."""
        vlo = self.eval_array(los)
        vhi = self.eval_array(his)
        out_lo = np.minimum(vlo, vhi)
        out_hi = np.maximum(vlo, vhi)
        for p in self._interior_candidates:
            m = (los < p) & (p < his)
            if m.any():
                v = self.eval(p)
                np.minimum(out_lo, v, where=m, out=out_lo)
                np.maximum(out_hi, v, where=m, out=out_hi)
        return out_lo, out_hi

    def image_set(self, A: IntervalSet) -> IntervalSet:
        """Exact forward image of an interval set (the map_image operation)."""
        parts = [self.image_interval(a, b) for a, b in A.parts]
        return IntervalSet.build(parts, A.domain)

    # -- structure queries -------------------------------------------------

    @property
    def is_piecewise_linear(self) -> bool:
        return all(br.is_linear for br in self.branches)

    def as_pl(self) -> tuple[np.ndarray, np.ndarray]:
        """Breakpoint/value arrays of a piecewise-linear map."""
        if not self.is_piecewise_linear:
            raise UnsupportedMapError("map is not piecewise linear")
        xs = [self.branches[0].x0]
        ys = [self.branches[0].y0]
        for br in self.branches:
            xs.append(br.x1)
            ys.append(br.y1)
        return np.asarray(xs), np.asarray(ys)

    def max_slope_bound(self) -> float:
        return max(br.slope_bound() for br in self.branches)

    def strict_direction_on(self, lo: float, hi: float):
        """Shared strict direction of all branch pieces meeting [lo, hi].

        Returns +1 or -1 when the restriction to [lo, hi] is strictly
        monotone with nowhere-zero slope, else None.
        """
        directions = set()
        for br in self.branches:
            a, b = max(br.x0, lo), min(br.x1, hi)
            if a >= b:
                continue
            d = br.strict_direction_on(a, b)
            if d is None:
                return None
            directions.add(d)
        if len(directions) != 1:
            return None
        return directions.pop()


# -- constructors ----------------------------------------------------------


def piecewise_linear(vertices: Sequence[tuple[float, float]]) -> PiecewiseMonotoneMap:
    """Map through the given (x, y) vertices, linear between them."""
    if len(vertices) < 2:
        raise ConstructionError("need at least two vertices")
    branches = [
        LinearBranch(x0, x1, y0, y1)
        for (x0, y0), (x1, y1) in zip(vertices, vertices[1:])
    ]
    return PiecewiseMonotoneMap(branches)


def linear_map(domain: tuple[float, float], y0: float, y1: float) -> PiecewiseMonotoneMap:
    return piecewise_linear([(domain[0], y0), (domain[1], y1)])


def quadratic_map(
    a: float, b: float, c: float, domain: tuple[float, float]
) -> PiecewiseMonotoneMap:
    return PiecewiseMonotoneMap([QuadraticBranch(domain[0], domain[1], a, b, c)])


# -- the IFS ----------------------------------------------------------------


_SELF_MAP_TOL = 1e-9


@dataclass(frozen=True)
class Ifs:
    """A finite family of piecewise-monotone self-maps of one domain."""

    domain: tuple[float, float]
    maps: tuple[PiecewiseMonotoneMap, ...]

    def __post_init__(self):
        if not self.maps:
            raise ConstructionError("an IFS needs at least one map")
        lo, hi = self.domain
        for i, T in enumerate(self.maps):
            if abs(T.domain[0] - lo) > SEAM_TOL or abs(T.domain[1] - hi) > SEAM_TOL:
                raise ConstructionError(f"map {i + 1} domain differs from IFS domain")
            ilo, ihi = T.image_interval(lo, hi)
            if ilo < lo - _SELF_MAP_TOL or ihi > hi + _SELF_MAP_TOL:
                raise ConstructionError(
                    f"map {i + 1} is not a self-map: image [{ilo}, {ihi}]"
                )

    @property
    def k(self) -> int:
        return len(self.maps)

    def map(self, symbol: int) -> PiecewiseMonotoneMap:
        """The map for a 1-based symbol."""
        if not 1 <= symbol <= self.k:
            raise IndexError(f"symbol {symbol} outside alphabet 1..{self.k}")
        return self.maps[symbol - 1]

    def apply(self, symbol: int, x: float) -> float:
        lo, hi = self.domain
        return min(max(self.map(symbol).eval(x), lo), hi)

    def whole_domain(self) -> IntervalSet:
        return IntervalSet.whole(self.domain)


# -- piecewise-linear composition --------------------------------------------


def _pl_eval(xs: np.ndarray, ys: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.interp(q, xs, ys)


def _pl_compose(
    fxy: tuple[np.ndarray, np.ndarray], gxy: tuple[np.ndarray, np.ndarray]
) -> tuple[np.ndarray, np.ndarray]:
    """Piecewise-linear representation of f o g."""
    fx, fy = fxy
    gx, gy = gxy
    nodes = list(gx)
    interior = fx[1:-1]
    for i in range(len(gx) - 1):
        a, b = gx[i], gx[i + 1]
        ya, yb = gy[i], gy[i + 1]
        if yb == ya:
            continue
        lo, hi = (ya, yb) if ya < yb else (yb, ya)
        for bp in interior:
            if lo < bp < hi:
                t = (bp - ya) / (yb - ya)
                nodes.append(a + t * (b - a))
    xs = np.unique(np.asarray(nodes))
    ys = _pl_eval(fx, fy, _pl_eval(gx, gy, xs))
    return xs, ys


def lipschitz_exact(F: Ifs, w) -> float:
    """Exact Lipschitz constant of T_{w0} o ... o T_{wn} for linear branches.

    Breakpoints are propagated through the composition, so only slope
    products along admissible pieces contribute.
    """
    from .symbolic import as_symbols

    syms = as_symbols(w)
    if not syms:
        raise UnsupportedMapError("Lipschitz constant of the empty word is undefined")
    for s in syms:
        if not F.map(s).is_piecewise_linear:
            raise UnsupportedMapError(f"map {s} is not piecewise linear")
    cur = F.map(syms[-1]).as_pl()
    for s in reversed(syms[:-1]):
        cur = _pl_compose(F.map(s).as_pl(), cur)
    xs, ys = cur
    dx = np.diff(xs)
    dy = np.diff(ys)
    keep = dx > 0
    return float(np.max(np.abs(dy[keep] / dx[keep])))
