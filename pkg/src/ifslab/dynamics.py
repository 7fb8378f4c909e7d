"""Set dynamics of an IFS: union operator iteration, fibres, target sets,
attractor and stability probes.

The refinement searches run over batches of words kept as integer arrays,
with images updated by vectorized map evaluation; everything else works
on :class:`IntervalSet` values directly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import BudgetError, ParameterError, PreconditionError
from .intervals import IntervalSet
from .maps import Ifs
from .symbolic import SymbolStream, Word, as_symbols

INVARIANCE_TOL = 1e-12


def bh_apply(F: Ifs, A: IntervalSet) -> IntervalSet:
    """Union of the forward images of A under every map of the IFS."""
    parts = []
    for T in F.maps:
        parts.extend(T.image_interval(a, b) for a, b in A.parts)
    return IntervalSet.build(parts, A.domain)


@dataclass(frozen=True)
class StarResult:
    set: IntervalSet
    iterations: int
    converged: bool


def star_set(
    F: Ifs, A: IntervalSet, tol: float = 1e-12, max_iter: int = 200
) -> StarResult:
    """Iterate the union operator on an invariant set until it settles.

    Requires the invariance B(A) within A; the iterates are then nested,
    so the last one is an outer approximation of the limit.
    """
    if not bh_apply(F, A).subset_within(A, INVARIANCE_TOL):
        raise PreconditionError("star_set needs B(A) contained in A")
    prev = A
    for n in range(1, max_iter + 1):
        cur = bh_apply(F, prev)
        if cur.hausdorff(prev) <= tol:
            return StarResult(cur, n, True)
        prev = cur
    return StarResult(prev, max_iter, False)


def word_image_bounds(F: Ifs, syms: Sequence[int]) -> tuple[float, float]:
    lo, hi = F.domain
    for s in reversed(syms):
        lo, hi = F.map(s).image_interval(lo, hi)
    return lo, hi


def word_image(F: Ifs, w) -> IntervalSet:
    """Image of the whole domain under the composition along the word."""
    syms = as_symbols(w)
    if not syms:
        raise ParameterError("word_image needs a nonempty word")
    lo, hi = word_image_bounds(F, syms)
    return IntervalSet.build([(lo, hi)], F.domain)


def fibre_approx(F: Ifs, stream: SymbolStream, depth: int) -> IntervalSet:
    """Finite truncation of the fibre along the stream's first `depth` symbols."""
    if depth < 1:
        raise ParameterError("depth must be >= 1")
    return word_image(F, stream.prefix(depth))


@dataclass(frozen=True)
class TargetResult:
    atoms: IntervalSet
    undecided: IntervalSet
    complete: bool
    depth_reached: int
    n_atom_words: int
    n_undecided_words: int


def _child_images(
    F: Ifs, child_words: np.ndarray, seeds: list[tuple[float, float]]
) -> tuple[np.ndarray, np.ndarray]:
    """Images of the whole domain under each row's word (batched)."""
    n_rows, depth = child_words.shape
    los = np.empty(n_rows)
    his = np.empty(n_rows)
    last = child_words[:, -1]
    for s in range(1, F.k + 1):
        m = last == s
        if m.any():
            los[m], his[m] = seeds[s - 1]
    for j in range(depth - 2, -1, -1):
        col = child_words[:, j]
        for s in range(1, F.k + 1):
            m = col == s
            if m.any():
                los[m], his[m] = F.map(s).image_arrays(los[m], his[m])
    return los, his


def target_approx(
    F: Ifs,
    tol: float,
    max_depth: int,
    max_pending: int = 200_000,
    deadline: Optional[float] = None,
) -> TargetResult:
    """Breadth-first refinement of the word tree into a target-set cover.

    A word whose image has diameter at most ``tol`` becomes an atom and is
    not expanded; words still wide at ``max_depth`` are reported as
    undecided.  Atoms plus undecided always form an outer cover of the
    closure of the target set.
    """
    if tol <= 0:
        raise ParameterError("tol must be > 0")
    dom_lo, dom_hi = F.domain
    if dom_hi - dom_lo <= tol:
        whole = F.whole_domain()
        return TargetResult(whole, IntervalSet.empty(F.domain), True, 0, 1, 0)

    seeds = [F.map(s).image_interval(dom_lo, dom_hi) for s in range(1, F.k + 1)]
    atom_los: list[np.ndarray] = []
    atom_his: list[np.ndarray] = []
    n_atoms = 0
    words = np.zeros((1, 0), dtype=np.int8)
    frontier_los = np.array([dom_lo])
    frontier_his = np.array([dom_hi])
    depth = 0

    def result(complete: bool) -> TargetResult:
        atoms = (
            IntervalSet.from_arrays(
                np.concatenate(atom_los), np.concatenate(atom_his), F.domain
            )
            if atom_los
            else IntervalSet.empty(F.domain)
        )
        undecided = (
            IntervalSet.from_arrays(frontier_los, frontier_his, F.domain)
            if len(words)
            else IntervalSet.empty(F.domain)
        )
        return TargetResult(
            atoms, undecided, complete, depth, n_atoms, len(words)
        )

    for depth in range(1, max_depth + 1):
        n_rows = len(words)
        child_words = np.repeat(words, F.k, axis=0)
        new_col = np.tile(
            np.arange(1, F.k + 1, dtype=np.int8), n_rows
        ).reshape(-1, 1)
        child_words = np.concatenate([child_words, new_col], axis=1)
        los, his = _child_images(F, child_words, seeds)
        atom_mask = his - los <= tol
        if atom_mask.any():
            atom_los.append(los[atom_mask])
            atom_his.append(his[atom_mask])
            n_atoms += int(atom_mask.sum())
        keep = ~atom_mask
        words = child_words[keep]
        frontier_los = los[keep]
        frontier_his = his[keep]
        if len(words) == 0:
            return result(True)
        if len(words) > max_pending:
            raise BudgetError(
                f"pending word count {len(words)} exceeds {max_pending}",
                partial=result(False),
            )
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetError("target refinement hit its deadline", partial=result(False))
    return result(False)


def weakly_hyperbolic_witness(
    F: Ifs, tol: float, max_depth: int, max_level_size: int = 2 ** 22
) -> Optional[Word]:
    """First word (by length, then lexicographically) whose image has
    diameter at most ``tol``; None if no word up to ``max_depth`` qualifies.

    The periodic extension of a returned word has fibre diameter at most
    ``tol``, an epsilon-certificate that shrinking sequences exist.
    """
    if tol <= 0:
        raise ParameterError("tol must be > 0")
    k = F.k
    los = np.array([F.domain[0]])
    his = np.array([F.domain[1]])
    for depth in range(1, max_depth + 1):
        n_rows = len(los)
        if n_rows * k > max_level_size:
            raise BudgetError(
                f"witness search level would exceed {max_level_size} words"
            )
        new_los = np.empty(n_rows * k)
        new_his = np.empty(n_rows * k)
        for s in range(1, k + 1):
            sl = slice((s - 1) * n_rows, s * n_rows)
            new_los[sl], new_his[sl] = F.map(s).image_arrays(los, his)
        hits = np.nonzero(new_his - new_los <= tol)[0]
        if hits.size:
            idx = int(hits[0])
            syms = []
            for j in range(depth):
                power = k ** (depth - 1 - j)
                syms.append(idx // power % k + 1)
            return Word(tuple(syms), k)
        los, his = new_los, new_his
    return None


@dataclass(frozen=True)
class ConleyVerdict:
    kind: str  # "attracts" | "escapes" | "inconclusive"
    residual: Optional[IntervalSet]
    iterations: int


def conley_probe(
    F: Ifs,
    A: IntervalSet,
    eps: float,
    tol: float = 1e-3,
    max_iter: int = 200,
) -> ConleyVerdict:
    """Iterate the union operator on a fattened neighbourhood of A.

    Attracts when the iterates come within ``tol`` of A; escapes when the
    iterate sequence itself stabilizes away from A (slow convergence is
    never misread as escape); inconclusive otherwise.
    """
    if eps <= 0:
        raise ParameterError("eps must be > 0")
    prev = A.fatten(eps)
    for n in range(1, max_iter + 1):
        cur = bh_apply(F, prev)
        if cur.hausdorff(A) <= tol:
            return ConleyVerdict("attracts", None, n)
        if cur.hausdorff(prev) <= tol:
            residual = cur.difference(A.fatten(tol))
            return ConleyVerdict("escapes", residual, n)
        prev = cur
    return ConleyVerdict("inconclusive", None, max_iter)


def stability_probe(
    F: Ifs,
    A: IntervalSet,
    v_eps: float,
    v0_eps: float,
    n_iter: int,
    resolution: float | None = None,
) -> bool:
    """True iff all iterates of the v0-neighbourhood stay in the v-neighbourhood.

    Iterates are coarsened to ``resolution`` (default domain width * 1e-4)
    to keep the part count bounded; coarsening only enlarges the iterate,
    so a True verdict is reliable while False may be conservative.
    """
    if not 0 < v0_eps <= v_eps:
        raise ParameterError("need 0 < v0_eps <= v_eps")
    if resolution is None:
        resolution = (F.domain[1] - F.domain[0]) * 1e-4
    V = A.fatten(v_eps)
    cur = A.fatten(v0_eps)
    for _ in range(n_iter):
        cur = bh_apply(F, cur)
        if len(cur.parts) > 8192:
            cur = cur.coarsen(resolution)
        if not cur.subset_within(V, INVARIANCE_TOL):
            return False
    return True


def invariance_check(F: Ifs, A: IntervalSet, tol: float) -> bool:
    """True iff the image of A stays within ``tol`` of A."""
    return bh_apply(F, A).subset_within(A, tol)


def common_fixed_points(F: Ifs, tol: float, grid_n: int) -> IntervalSet:
    """Grid-cell cover of the points moved at most ``tol`` by every map.

    The empty sentinel means no common fixed point exists at resolution
    (domain width) / grid_n.
    """
    if grid_n < 2:
        raise ParameterError("grid_n must be >= 2")
    lo, hi = F.domain
    xs = np.linspace(lo, hi, grid_n + 1)
    worst = np.zeros_like(xs)
    for T in F.maps:
        np.maximum(worst, np.abs(T.eval_array(xs) - xs), out=worst)
    cell = (hi - lo) / grid_n
    slack = (max(T.max_slope_bound() for T in F.maps) + 1.0) * cell
    ok = np.minimum(worst[:-1], worst[1:]) <= tol + slack
    idx = np.nonzero(ok)[0]
    if idx.size == 0:
        return IntervalSet.empty(F.domain)
    return IntervalSet.from_arrays(xs[idx], xs[idx + 1], F.domain)
