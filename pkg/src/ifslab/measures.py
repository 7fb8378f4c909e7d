"""Probability measures discretized on a uniform bin grid, the averaged and
matrix-driven pushforward operators, transport distance, and the sampled
coding-map estimator.

Measures carry a piecewise-uniform density per bin.  Pushforwards work on
the piecewise-linear CDF, which makes them exact for linear branches (up
to the within-bin-uniform convention) and mass-preserving to rounding.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dynamics import _child_images
from .errors import (
    DegenerateOutputError,
    GridMismatchError,
    ParameterError,
)
from .intervals import IntervalSet
from .maps import Ifs, PiecewiseMonotoneMap
from .stochastic import TransitionMatrix

_MASS_TOL = 1e-12


@dataclass(frozen=True)
class GridMeasure:
    """Probability measure as masses on a uniform bin grid."""

    domain: tuple[float, float]
    masses: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=float)
        if m.ndim != 1 or m.size < 1:
            raise ParameterError("masses must be a nonempty 1-d array")
        if np.any(m < -1e-15):
            raise ParameterError("masses must be nonnegative")
        if abs(m.sum() - 1.0) > _MASS_TOL:
            raise ParameterError(f"masses must sum to 1, got {m.sum()!r}")
        m = np.clip(m, 0.0, None)
        m.setflags(write=False)
        object.__setattr__(self, "masses", m)

    @property
    def n_bins(self) -> int:
        return self.masses.size

    @property
    def bin_width(self) -> float:
        return (self.domain[1] - self.domain[0]) / self.n_bins

    def edges(self) -> np.ndarray:
        return np.linspace(self.domain[0], self.domain[1], self.n_bins + 1)

    def midpoints(self) -> np.ndarray:
        e = self.edges()
        return 0.5 * (e[:-1] + e[1:])

    def mean(self) -> float:
        return float(self.masses @ self.midpoints())

    def variance(self) -> float:
        mids = self.midpoints()
        m1 = self.masses @ mids
        return float(self.masses @ (mids - m1) ** 2)

    @staticmethod
    def uniform(domain: tuple[float, float], n_bins: int) -> "GridMeasure":
        return GridMeasure(domain, np.full(n_bins, 1.0 / n_bins))

    @staticmethod
    def dirac(domain: tuple[float, float], n_bins: int, x: float) -> "GridMeasure":
        masses = np.zeros(n_bins)
        masses[_bin_index(x, domain, n_bins)] = 1.0
        return GridMeasure(domain, masses)

    def to_csv(self) -> str:
        e = self.edges()
        lines = [
            f"# domain {self.domain[0]:.17g} {self.domain[1]:.17g}"
        ]
        lines.extend(
            f"{e[j]:.17g},{e[j + 1]:.17g},{m:.17g}"
            for j, m in enumerate(self.masses)
        )
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_csv(text: str) -> "GridMeasure":
        domain, rows = _parse_measure_csv(text, n_fields=3)
        return GridMeasure(domain, np.asarray([m for *_, m in rows]))


@dataclass(frozen=True)
class HatMeasure:
    """k finite sections over the grid; total mass across sections is 1."""

    domain: tuple[float, float]
    sections: np.ndarray  # shape (k, n_bins)

    def __post_init__(self):
        s = np.asarray(self.sections, dtype=float)
        if s.ndim != 2 or s.shape[0] < 1 or s.shape[1] < 1:
            raise ParameterError("sections must be a (k, n_bins) array")
        if np.any(s < -1e-15):
            raise ParameterError("section masses must be nonnegative")
        if abs(s.sum() - 1.0) > _MASS_TOL:
            raise ParameterError("total mass across sections must be 1")
        s = np.clip(s, 0.0, None)
        s.setflags(write=False)
        object.__setattr__(self, "sections", s)

    @property
    def k(self) -> int:
        return self.sections.shape[0]

    @property
    def n_bins(self) -> int:
        return self.sections.shape[1]

    def section_masses(self) -> np.ndarray:
        return self.sections.sum(axis=1)

    def marginal(self) -> GridMeasure:
        return GridMeasure(self.domain, self.sections.sum(axis=0))

    @staticmethod
    def uniform(domain: tuple[float, float], k: int, n_bins: int) -> "HatMeasure":
        return HatMeasure(domain, np.full((k, n_bins), 1.0 / (k * n_bins)))

    def to_csv(self) -> str:
        e = np.linspace(self.domain[0], self.domain[1], self.n_bins + 1)
        lines = [
            f"# domain {self.domain[0]:.17g} {self.domain[1]:.17g}"
        ]
        for i in range(self.k):
            lines.extend(
                f"{e[j]:.17g},{e[j + 1]:.17g},{m:.17g},{i + 1}"
                for j, m in enumerate(self.sections[i])
            )
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_csv(text: str) -> "HatMeasure":
        domain, rows = _parse_measure_csv(text, n_fields=4)
        k = int(max(r[3] for r in rows))
        n_bins = len(rows) // k
        sections = np.empty((k, n_bins))
        for idx, (_, _, m, section) in enumerate(rows):
            sections[int(section) - 1, idx % n_bins] = m
        return HatMeasure(domain, sections)


def _parse_measure_csv(text: str, n_fields: int):
    domain = None
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = line[1:].split()
            if fields and fields[0] == "domain":
                domain = (float(fields[1]), float(fields[2]))
            continue
        parts = [float(x) for x in line.split(",")]
        if len(parts) != n_fields:
            raise ParameterError(f"expected {n_fields} fields, got {line!r}")
        rows.append(parts)
    if domain is None or not rows:
        raise ParameterError("measure CSV needs a domain header and rows")
    return domain, rows


def _bin_index(x: float, domain: tuple[float, float], n_bins: int) -> int:
    lo, hi = domain
    j = int(np.floor((x - lo) / (hi - lo) * n_bins))
    return min(max(j, 0), n_bins - 1)


# -- pushforward -------------------------------------------------------------


def _push_masses(
    T: PiecewiseMonotoneMap, masses: np.ndarray, domain: tuple[float, float]
) -> np.ndarray:
    """CDF transport of a piecewise-uniform mass vector through the map."""
    n = masses.size
    lo, hi = domain
    edges = np.linspace(lo, hi, n + 1)
    cum = np.concatenate([[0.0], np.cumsum(masses)])
    out_cdf = np.zeros(n + 1)
    atoms = np.zeros(n)
    for br in T.branches:
        a, b = br.x0, br.x1
        Fa = np.interp(a, edges, cum)
        Fb = np.interp(b, edges, cum)
        seg = Fb - Fa
        if seg <= 0.0:
            continue
        va, vb = br.eval(a), br.eval(b)
        if va == vb:  # constant branch: all its mass lands in one bin
            atoms[_bin_index(va, domain, n)] += seg
            continue
        v_lo, v_hi = (va, vb) if va < vb else (vb, va)
        ys = np.clip(edges, v_lo, v_hi)
        xs = np.clip(br.inverse_array(ys), a, b)
        pre_cdf = np.interp(xs, edges, cum)
        if va < vb:
            out_cdf += pre_cdf - Fa
        else:
            out_cdf += Fb - pre_cdf
    out = np.diff(out_cdf) + atoms
    np.clip(out, 0.0, None, out=out)
    return out


def pushforward(T: PiecewiseMonotoneMap, mu: GridMeasure) -> GridMeasure:
    """Image measure: output bin b receives the mass of its preimage."""
    return GridMeasure(mu.domain, _push_masses(T, mu.masses, mu.domain))


def markov_step(
    F: Ifs, weights: Sequence[float], mu: GridMeasure
) -> GridMeasure:
    """Convex combination of the per-map pushforwards."""
    w = np.asarray(weights, dtype=float)
    if w.size != F.k or np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-9:
        raise ParameterError("weights must be positive, one per map, summing to 1")
    out = np.zeros(mu.n_bins)
    for i, T in enumerate(F.maps):
        out += w[i] * _push_masses(T, mu.masses, mu.domain)
    return GridMeasure(mu.domain, out)


def generalized_markov_step(
    F: Ifs, P: TransitionMatrix, hat: HatMeasure
) -> HatMeasure:
    """Matrix-driven operator: section j of the output is the pushforward
    under map j of the p_ij-mixture of the input sections.  Section masses
    evolve exactly as the row vector of masses times the matrix."""
    if P.k != F.k or hat.k != F.k:
        raise ParameterError("matrix, IFS and hat measure must share one k")
    mixed = P.entries.T @ hat.sections  # row j: sum_i p_ij * section_i
    out = np.empty_like(hat.sections)
    for j, T in enumerate(F.maps):
        out[j] = _push_masses(T, mixed[j], hat.domain)
    return HatMeasure(hat.domain, out)


# -- transport distance --------------------------------------------------------


def w1_distance(mu: GridMeasure, nu: GridMeasure) -> float:
    """L1 distance between the CDFs times bin width: the 1-Wasserstein
    distance between the piecewise-uniform representatives."""
    if mu.domain != nu.domain or mu.n_bins != nu.n_bins:
        raise GridMismatchError("measures live on different grids")
    diff = np.cumsum(mu.masses - nu.masses)
    return float(np.abs(diff).sum() * mu.bin_width)


def _hat_cdf_distance(h1: HatMeasure, h2: HatMeasure) -> float:
    """Per-section CDF-L1 distance; penalizes section mass mismatch too."""
    if h1.domain != h2.domain or h1.sections.shape != h2.sections.shape:
        raise GridMismatchError("hat measures live on different grids")
    w = (h1.domain[1] - h1.domain[0]) / h1.n_bins
    diff = np.cumsum(h1.sections - h2.sections, axis=1)
    return float(np.abs(diff).sum() * w)


# -- coding-map sampling --------------------------------------------------------


def _sample_symbols(
    rng: np.random.Generator,
    n: int,
    length: int,
    weights: Optional[np.ndarray],
    matrix: Optional[np.ndarray],
    initial: Optional[np.ndarray],
) -> np.ndarray:
    k = weights.size if weights is not None else matrix.shape[0]
    if weights is not None:
        return rng.choice(k, size=(n, length), p=weights).astype(np.int8) + 1
    cum0 = np.cumsum(initial)
    cum = np.cumsum(matrix, axis=1)
    sym = np.empty((n, length), dtype=np.int8)
    cur = np.minimum(
        np.searchsorted(cum0, rng.random(n), side="right"), k - 1
    )
    sym[:, 0] = cur + 1
    for t in range(1, length):
        u = rng.random(n)
        cur = np.minimum((u[:, None] >= cum[cur]).sum(axis=1), k - 1)
        sym[:, t] = cur + 1
    return sym


def _shard_sizes(n_samples: int, n_shards: int) -> list[int]:
    base, extra = divmod(n_samples, n_shards)
    return [base + (1 if i < extra else 0) for i in range(n_shards)]


def coding_pushforward(
    F: Ifs,
    n_samples: int,
    prefix_len: int,
    tol: float,
    n_bins: int,
    seed: int,
    weights: Optional[Sequence[float]] = None,
    matrix: Optional[TransitionMatrix] = None,
    initial: Optional[Sequence[float]] = None,
    hat: bool = False,
    n_shards: int = 64,
    n_workers: int = 1,
):
    """Monte-Carlo estimate of the coding-map image measure.

    Each sampled prefix whose word-image has diameter at most ``tol``
    deposits one count at the midpoint bin (in the section of its first
    symbol for the hat variant); wider prefixes count as unresolved.
    Returns (measure, unresolved_fraction).

    Sampling is sharded with per-shard seeds derived from the master
    seed, so the result is identical for any worker count; deposits are
    integer counts, hence order-independent.
    """
    if n_samples < 1 or prefix_len < 1:
        raise ParameterError("need n_samples >= 1 and prefix_len >= 1")
    if (weights is None) == (matrix is None):
        raise ParameterError("give exactly one of weights or matrix")
    w = None if weights is None else np.asarray(weights, dtype=float)
    M = None if matrix is None else np.asarray(matrix.entries, dtype=float)
    init = None
    if matrix is not None:
        if initial is None:
            raise ParameterError("matrix sampling needs an initial distribution")
        init = np.asarray(initial, dtype=float)
    k = F.k
    if (w is not None and w.size != k) or (M is not None and M.shape[0] != k):
        raise ParameterError("weights/matrix size must match the IFS")

    dom_lo, dom_hi = F.domain
    seeds = [F.map(s).image_interval(dom_lo, dom_hi) for s in range(1, k + 1)]
    n_slots = k * n_bins if hat else n_bins
    shard_seeds = np.random.SeedSequence(seed).spawn(n_shards)
    sizes = _shard_sizes(n_samples, n_shards)

    def run_shard(i: int) -> tuple[np.ndarray, int]:
        n = sizes[i]
        if n == 0:
            return np.zeros(n_slots, dtype=np.int64), 0
        rng = np.random.default_rng(shard_seeds[i])
        sym = _sample_symbols(rng, n, prefix_len, w, M, init)
        los, his = _child_images(F, sym, seeds)
        resolved = his - los <= tol
        mids = 0.5 * (los[resolved] + his[resolved])
        bins = np.clip(
            np.floor((mids - dom_lo) / (dom_hi - dom_lo) * n_bins).astype(np.int64),
            0,
            n_bins - 1,
        )
        if hat:
            bins = (sym[resolved, 0].astype(np.int64) - 1) * n_bins + bins
        counts = np.bincount(bins, minlength=n_slots)
        return counts, int(n - resolved.sum())

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(run_shard, range(n_shards)))
    else:
        results = [run_shard(i) for i in range(n_shards)]

    counts = np.zeros(n_slots, dtype=np.int64)
    unresolved = 0
    for c, u in results:
        counts += c
        unresolved += u
    fraction = unresolved / n_samples
    total = counts.sum()
    if total == 0:
        raise DegenerateOutputError(
            "every sampled prefix stayed wider than tol", unresolved_fraction=fraction
        )
    if hat:
        sections = counts.reshape(k, n_bins) / total
        return HatMeasure(F.domain, sections), fraction
    return GridMeasure(F.domain, counts / total), fraction


# -- stationarity probes ---------------------------------------------------------


@dataclass(frozen=True)
class MeasureStabilityReport:
    stable: bool
    iterations: int
    estimate: "GridMeasure | HatMeasure | None"
    max_pairwise: float
    max_step: float


def stability_probe_measures(
    F: Ifs,
    starts: Sequence["GridMeasure | HatMeasure"],
    tol: float,
    max_iter: int,
    weights: Optional[Sequence[float]] = None,
    matrix: Optional[TransitionMatrix] = None,
) -> MeasureStabilityReport:
    """Iterate the relevant operator from several starts; stable once all
    trajectories are pairwise within ``tol`` and each moved at most ``tol``."""
    if (weights is None) == (matrix is None):
        raise ParameterError("give exactly one of weights or matrix")
    if len(starts) < 1:
        raise ParameterError("need at least one start measure")
    if weights is not None:
        step = lambda m: markov_step(F, weights, m)  # noqa: E731
        dist = w1_distance
    else:
        step = lambda m: generalized_markov_step(F, matrix, m)  # noqa: E731
        dist = _hat_cdf_distance
    cur = list(starts)
    max_pair = float("inf")
    max_step_move = float("inf")
    for it in range(1, max_iter + 1):
        nxt = [step(m) for m in cur]
        max_step_move = max(dist(a, b) for a, b in zip(cur, nxt))
        max_pair = 0.0
        for i in range(len(nxt)):
            for j in range(i + 1, len(nxt)):
                max_pair = max(max_pair, dist(nxt[i], nxt[j]))
        cur = nxt
        if max_pair <= tol and max_step_move <= tol:
            return MeasureStabilityReport(True, it, cur[0], max_pair, max_step_move)
    return MeasureStabilityReport(False, max_iter, None, max_pair, max_step_move)


def support_estimate(mu: GridMeasure, mass_tol: float) -> IntervalSet:
    """Union of the bins carrying more than mass_tol / n_bins of mass."""
    if not 0 <= mass_tol < 1:
        raise ParameterError("mass_tol must lie in [0, 1)")
    e = mu.edges()
    idx = np.nonzero(mu.masses > mass_tol / mu.n_bins)[0]
    if idx.size == 0:
        return IntervalSet.empty(mu.domain)
    return IntervalSet.from_arrays(e[idx], e[idx + 1], mu.domain)
