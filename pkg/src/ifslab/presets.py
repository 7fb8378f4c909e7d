"""Built-in two-map systems used throughout the tests and the CLI.

Each builder re-verifies the qualitative facts the preset is meant to
exhibit (fixed-point structure, contraction windows), so a typo in the
vertex data fails loudly at construction.
"""

from __future__ import annotations

import math

from .errors import ConstructionError
from .maps import Ifs, PiecewiseMonotoneMap, linear_map, piecewise_linear, quadratic_map


def _fixed_points_pl(T: PiecewiseMonotoneMap) -> list[tuple[float, float]]:
    """(x, slope) for every fixed point of a piecewise-linear map."""
    out = []
    for br in T.branches:
        s = br.slope
        if s == 1.0:
            continue  # a whole segment of fixed points is reported per-endpoint
        x = (br.y0 - s * br.x0) / (1.0 - s)
        if br.x0 - 1e-12 <= x <= br.x1 + 1e-12:
            out.append((x, s))
    return out


def cantor() -> Ifs:
    """x/3 and x/3 + 2/3 on [0, 1]; the classic middle-thirds pair."""
    return Ifs(
        (0.0, 1.0),
        (linear_map((0.0, 1.0), 0.0, 1.0 / 3.0), linear_map((0.0, 1.0), 2.0 / 3.0, 1.0)),
    )


def example_3_4() -> Ifs:
    """Contraction x/3 on [0, 2] paired with a map fixing [1, 2] pointwise."""
    t1 = linear_map((0.0, 2.0), 0.0, 2.0 / 3.0)
    t2 = piecewise_linear([(0.0, 2.0 / 3.0), (1.0, 1.0), (2.0, 2.0)])
    return Ifs((0.0, 2.0), (t1, t2))


def figure_2() -> Ifs:
    """Non-injective pair whose target set is the three points {0, 1/2, 1}."""
    t1 = piecewise_linear([(0.0, 0.5), (0.5, 1.0), (1.0, 1.0)])
    t2 = piecewise_linear([(0.0, 0.0), (0.5, 0.0), (1.0, 0.5)])
    return Ifs((0.0, 1.0), (t1, t2))


def flip() -> Ifs:
    """Identity and reflection: every composition is an isometry."""
    return Ifs(
        (0.0, 1.0),
        (linear_map((0.0, 1.0), 0.0, 1.0), linear_map((0.0, 1.0), 1.0, 0.0)),
    )


def nonregular_6_1() -> Ifs:
    """Quadratic with repelling 0 / attracting 1, against a 3-fixed-point map."""
    t1 = quadratic_map(-1.0, 2.0, 0.0, (0.0, 1.0))
    t2 = piecewise_linear([(0.0, 0.1), (0.33, 0.25), (0.45, 0.52), (1.0, 0.7)])
    fps = _fixed_points_pl(t2)
    if len(fps) != 3:
        raise ConstructionError(f"expected 3 fixed points for map 2, got {fps}")
    (p1, s1), (p2, s2), (p3, s3) = sorted(fps)
    if not (abs(s1) < 1 and abs(s2) > 1 and abs(s3) < 1):
        raise ConstructionError("map 2 fixed points are not attractor/repeller/attractor")
    alpha, beta = t2.image_interval(0.0, 1.0)
    if not (0.0 < alpha and beta < 1.0):
        raise ConstructionError("map 2 image must avoid the domain endpoints")
    if not t1.eval(p1) < beta:
        raise ConstructionError("map 1 must send p1 below beta")
    return Ifs((0.0, 1.0), (t1, t2))


def porcupine_6_2(lam: float = 0.9) -> Ifs:
    """lam*(1-x) against -x^2+2x; dense target set, 1 never reached."""
    t1 = linear_map((0.0, 1.0), lam, 0.0)
    t2 = quadratic_map(-1.0, 2.0, 0.0, (0.0, 1.0))
    # uniform contraction of map 2 on [t2^{-1}(lam), 1] needs that preimage > 1/2
    pre = 1.0 - math.sqrt(1.0 - lam)
    if not pre > 0.5:
        raise ConstructionError(f"lambda={lam} breaks the contraction window")
    return Ifs((0.0, 1.0), (t1, t2))


def bony_6_3() -> Ifs:
    """Piecewise-linear pair, not weakly hyperbolic, target set all of [0, 1]."""
    t1 = piecewise_linear([(0.0, 0.0), (0.6, 0.2), (1.0, 0.8)])
    t2 = piecewise_linear([(0.0, 0.15), (0.4, 0.8), (1.0, 1.0)])
    return Ifs((0.0, 1.0), (t1, t2))


PRESETS = {
    "cantor": cantor,
    "example-3-4": example_3_4,
    "figure-2": figure_2,
    "flip": flip,
    "nonregular-6-1": nonregular_6_1,
    "porcupine-6-2": porcupine_6_2,
    "bony-6-3": bony_6_3,
}


def get_preset(name: str) -> Ifs:
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None
