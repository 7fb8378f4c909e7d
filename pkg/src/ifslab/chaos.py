"""Chaos-game orbits and tail-set convergence diagnostics.

An orbit applies the stream's maps one after another; its tail from some
index, reported as a resolution-cover, approximates the attracting set
when the theory applies.  Probes only ever report the measured distance:
slow mixing at finite length is indistinguishable from failure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, ParameterError
from .intervals import IntervalSet
from .maps import Ifs
from .symbolic import SymbolStream


@dataclass(frozen=True)
class Orbit:
    x0: float
    stream_kind: str
    points: np.ndarray
    domain: tuple[float, float]

    def __len__(self) -> int:
        return self.points.size


def orbit(F: Ifs, x0: float, stream: SymbolStream, n: int) -> Orbit:
    """Forward orbit x_{j+1} = T_{s_{j+1}}(x_j) of length n, starting with
    x_0 = T_{s_0}(x0)."""
    lo, hi = F.domain
    if not lo <= x0 <= hi:
        raise DomainError(f"x0={x0} outside domain [{lo}, {hi}]")
    if n < 1:
        raise ParameterError("orbit length must be >= 1")
    syms = stream.prefix(n)
    maps = F.maps
    out = np.empty(n)
    x = float(x0)
    for j, s in enumerate(syms):
        x = maps[s - 1].eval(x)
        if x < lo:
            x = lo
        elif x > hi:
            x = hi
        out[j] = x
    return Orbit(x0, stream.kind, out, (lo, hi))


def tail_cover(orb: Orbit, from_index: int, resolution: float) -> IntervalSet:
    """Resolution-cover of the orbit tail {x_n : n >= from_index}.

    The carrier domain is the orbit's ambient domain padded by the
    resolution, the same for every tail at a fixed resolution, so tail
    covers of one orbit can be compared directly.
    """
    if not 0 <= from_index < len(orb):
        raise ParameterError("from_index must fall inside the orbit")
    if resolution <= 0:
        raise ParameterError("resolution must be > 0")
    pts = orb.points[from_index:]
    half = resolution / 2.0
    carrier = (orb.domain[0] - resolution, orb.domain[1] + resolution)
    return IntervalSet.from_arrays(pts - half, pts + half, carrier)


@dataclass(frozen=True)
class ChaosReport:
    distance: float
    tolerance: float
    verdict: str  # "pass" | "fail"
    n: int
    from_index: int
    resolution: float
    cover: IntervalSet
    orbit: Orbit


def chaos_probe(
    F: Ifs,
    x0: float,
    n: int,
    from_index: int,
    resolution: float,
    reference: IntervalSet,
    reference_tol: float,
    mode: str = "disjunctive",
    weights: Optional[Sequence[float]] = None,
    seed: Optional[int] = None,
) -> ChaosReport:
    """Distance between the orbit's tail cover and a reference set.

    Passes iff the Hausdorff distance is at most
    max(2 * resolution, 2 * reference_tol).
    """
    if reference is None or reference.is_empty:
        raise ParameterError("chaos_probe needs a nonempty reference set")
    if mode == "disjunctive":
        stream = SymbolStream.disjunctive(F.k)
    elif mode == "bernoulli":
        if weights is None or seed is None:
            raise ParameterError("bernoulli mode needs weights and a seed")
        stream = SymbolStream.bernoulli(weights, seed)
    else:
        raise ParameterError(f"unknown chaos game mode {mode!r}")
    orb = orbit(F, x0, stream, n)
    cover = tail_cover(orb, from_index, resolution)
    # compare over a common carrier wide enough for both sets
    carrier = (
        min(cover.domain[0], reference.domain[0]),
        max(cover.domain[1], reference.domain[1]),
    )
    cov = IntervalSet.build(cover.parts, carrier)
    ref = IntervalSet.build(reference.parts, carrier)
    d = cov.hausdorff(ref)
    tol = max(2.0 * resolution, 2.0 * reference_tol)
    return ChaosReport(
        d, tol, "pass" if d <= tol else "fail", n, from_index, resolution, cover, orb
    )


def orbit_csv(orb: Orbit) -> str:
    lines = ["n,x"]
    lines.extend(f"{j},{x:.17g}" for j, x in enumerate(orb.points))
    return "\n".join(lines) + "\n"
