"""Shared fixtures and independent oracle constructions."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from ifslab.intervals import IntervalSet
from ifslab.presets import get_preset
from ifslab.stochastic import TransitionMatrix


def middle_thirds_level(n: int, domain=(0.0, 1.0)) -> IntervalSet:
    """Level-n middle-thirds set, built from ternary digit sums.

    Independent of the map-iteration code path: interval starts are
    computed as explicit digit expansions sum(2 d_i / 3^i).
    """
    width = 3.0 ** (-n)
    starts = [
        sum(2.0 * d / 3.0 ** (i + 1) for i, d in enumerate(digits))
        for digits in itertools.product((0, 1), repeat=n)
    ]
    return IntervalSet.build([(s, s + width) for s in starts], domain)


def middle_thirds_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized digit-sum construction of the level-n middle-thirds set.

    Start of block m is sum_i bit_i(m) * 2 / 3^(i+1) with the most
    significant bit carrying the largest weight, so starts come out
    sorted without the map-iteration arithmetic path.
    """
    m = np.arange(2 ** n, dtype=np.int64)
    starts = np.zeros(2 ** n)
    for i in range(n):
        bit = (m >> (n - 1 - i)) & 1
        starts += bit * (2.0 / 3.0 ** (i + 1))
    return starts, starts + 3.0 ** (-n)


def dist_to_parts(xs: np.ndarray, los: np.ndarray, his: np.ndarray) -> np.ndarray:
    """Distance from each point to a sorted union of disjoint parts."""
    xs = np.asarray(xs, dtype=float)
    i = np.searchsorted(los, xs, side="right") - 1
    d_prev = np.full(xs.shape, np.inf)
    valid = i >= 0
    d_prev[valid] = np.maximum(xs[valid] - his[i[valid]], 0.0)
    j = np.searchsorted(los, xs, side="left")
    d_next = np.where(
        j < los.size, los[np.minimum(j, los.size - 1)] - xs, np.inf
    )
    return np.minimum(d_prev, np.maximum(d_next, 0.0))


def hausdorff_arrays(
    alos: np.ndarray, ahis: np.ndarray, blos: np.ndarray, bhis: np.ndarray
) -> float:
    """Hausdorff distance between two part-array sets; handles part counts
    far beyond what IntervalSet accepts."""

    def one_sided(plos, phis, qlos, qhis):
        cands = [plos, phis]
        if qlos.size > 1:
            mids = 0.5 * (qhis[:-1] + qlos[1:])
            inside = dist_to_parts(mids, plos, phis) == 0.0
            cands.append(mids[inside])
        pts = np.concatenate(cands)
        return float(dist_to_parts(pts, qlos, qhis).max())

    return max(one_sided(alos, ahis, blos, bhis), one_sided(blos, bhis, alos, ahis))


def parts_arrays(s: IntervalSet) -> tuple[np.ndarray, np.ndarray]:
    los = np.asarray([a for a, _ in s.parts])
    his = np.asarray([b for _, b in s.parts])
    return los, his


def grid_hausdorff(A: IntervalSet, B: IntervalSet, n_grid: int = 10_000) -> float:
    """Brute-force Hausdorff estimate on a uniform point grid."""
    lo, hi = A.domain
    xs = np.linspace(lo, hi, n_grid)
    in_a = np.fromiter((A.contains(x) for x in xs), dtype=bool, count=n_grid)
    in_b = np.fromiter((B.contains(x) for x in xs), dtype=bool, count=n_grid)
    d_a = max((A.distance_to(float(x)) for x in xs[in_b]), default=0.0)
    d_b = max((B.distance_to(float(x)) for x in xs[in_a]), default=0.0)
    return max(d_a, d_b)


def random_interval_set(
    rng: np.random.Generator, domain=(0.0, 1.0), max_parts: int = 6
) -> IntervalSet:
    lo, hi = domain
    n = int(rng.integers(1, max_parts + 1))
    pts = np.sort(rng.uniform(lo, hi, size=2 * n))
    parts = [(pts[2 * i], pts[2 * i + 1]) for i in range(n)]
    return IntervalSet.build(parts, domain)


def random_irreducible_matrix(
    rng: np.random.Generator, k_max: int = 4
) -> TransitionMatrix:
    k = int(rng.integers(2, k_max + 1))
    entries = rng.random((k, k)) + 0.01
    entries /= entries.sum(axis=1, keepdims=True)
    return TransitionMatrix(entries)


@pytest.fixture
def cantor_ifs():
    return get_preset("cantor")


@pytest.fixture
def flip_ifs():
    return get_preset("flip")


@pytest.fixture
def bony_ifs():
    return get_preset("bony-6-3")
