"""Transition matrices, their stationary structure, and the finite-depth
splitting / separability / rigidity witness searches.

Bernoulli weights are the rank-one transition matrix with identical rows,
so IFSs with probabilities and recurrent IFSs share one code path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    ConvergenceError,
    ParameterError,
    PreconditionError,
    StructureError,
)
from .maps import Ifs
from .symbolic import Word

_ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic k x k matrix."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] < 1:
            raise ParameterError(f"transition matrix must be square, got {e.shape}")
        if np.any(e < 0):
            raise ParameterError("transition matrix entries must be >= 0")
        if np.max(np.abs(e.sum(axis=1) - 1.0)) > _ROW_SUM_TOL:
            raise ParameterError("transition matrix rows must sum to 1")
        e = e.copy()
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def k(self) -> int:
        return self.entries.shape[0]

    @staticmethod
    def bernoulli(weights: Sequence[float]) -> "TransitionMatrix":
        w = np.asarray(weights, dtype=float)
        if np.any(w <= 0):
            raise ParameterError("bernoulli weights must be strictly positive")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ParameterError("bernoulli weights must sum to 1")
        return TransitionMatrix(np.tile(w / w.sum(), (w.size, 1)))

    @staticmethod
    def cyclic(k: int) -> "TransitionMatrix":
        e = np.zeros((k, k))
        for i in range(k):
            e[i, (i + 1) % k] = 1.0
        return TransitionMatrix(e)

    def to_csv(self) -> str:
        return "\n".join(
            ",".join(format(x, ".17g") for x in row) for row in self.entries
        ) + "\n"

    @staticmethod
    def from_csv(text: str) -> "TransitionMatrix":
        rows = [
            [float(x) for x in line.split(",")]
            for line in text.splitlines()
            if line.strip() and not line.startswith("#")
        ]
        return TransitionMatrix(np.asarray(rows))


def _positivity(P: TransitionMatrix) -> np.ndarray:
    return P.entries > 0


def is_irreducible(P: TransitionMatrix) -> bool:
    """Strong connectivity of the positive-entry digraph."""
    A = _positivity(P)
    reach = A.copy()
    for _ in range(P.k):
        reach = reach | ((reach.astype(np.int64) @ A.astype(np.int64)) > 0)
    return bool(reach.all())


def is_primitive(P: TransitionMatrix) -> bool:
    """Wielandt bound: P^((k-1)^2 + 1) has all entries positive."""
    A = _positivity(P).astype(np.int64)
    n = (P.k - 1) ** 2 + 1
    result = np.eye(P.k, dtype=np.int64)
    base = A
    while n:
        if n & 1:
            result = np.clip(result @ base, 0, 1)
        base = np.clip(base @ base, 0, 1)
        n >>= 1
    return bool(np.all(result > 0))


def stationary_vector(
    P: TransitionMatrix, tol: float = 1e-15, max_iter: int = 500_000
) -> np.ndarray:
    """Unique stationary probability vector of an irreducible matrix.

    Power iteration against the lazified chain (P + I)/2, which converges
    for periodic irreducible matrices as well.
    """
    if not is_irreducible(P):
        raise StructureError("matrix is not irreducible")
    lazy = 0.5 * (P.entries + np.eye(P.k))
    v = np.full(P.k, 1.0 / P.k)
    for _ in range(max_iter):
        nxt = v @ lazy
        nxt /= nxt.sum()
        if np.abs(nxt - v).sum() <= tol:
            return nxt
        v = nxt
    raise ConvergenceError(f"no stationary vector after {max_iter} iterations")


def inverse_matrix(P: TransitionMatrix, pbar: Sequence[float]) -> TransitionMatrix:
    """Time-reversed chain q_ij = (p_j / p_i) * p_ji."""
    p = np.asarray(pbar, dtype=float)
    if np.any(p <= 0):
        raise StructureError("inverse chain needs a strictly positive stationary vector")
    if np.abs(p @ P.entries - p).max() > 1e-8:
        raise StructureError("pbar is not stationary for P")
    q = (P.entries.T * p[None, :]) / p[:, None]
    return TransitionMatrix(q)


# -- word tables and witness searches ------------------------------------------


@dataclass(frozen=True)
class _WordTable:
    """Images and cylinder measures of every word up to a depth, length-lex."""

    k: int
    lengths: np.ndarray  # word length per row
    level_index: np.ndarray  # lex index within the row's level
    first: np.ndarray  # first symbol per row
    lo: np.ndarray
    hi: np.ndarray
    cyl: np.ndarray  # cylinder measures (1.0 when no chain given)

    def word(self, row: int) -> Word:
        n = int(self.lengths[row])
        idx = int(self.level_index[row])
        syms = []
        for j in range(n):
            power = self.k ** (n - 1 - j)
            syms.append(idx // power % self.k + 1)
        return Word(tuple(syms), self.k)


def _word_table(
    F: Ifs,
    max_depth: int,
    P: Optional[TransitionMatrix] = None,
    pbar: Optional[Sequence[float]] = None,
) -> _WordTable:
    k = F.k
    dom_lo, dom_hi = F.domain
    los = [np.array([dom_lo])]
    his = [np.array([dom_hi])]
    firsts = [np.zeros(1, dtype=np.int64)]
    cyls = [np.array([1.0])]
    out: dict[str, list[np.ndarray]] = {
        "len": [], "idx": [], "first": [], "lo": [], "hi": [], "cyl": []
    }
    p = None if pbar is None else np.asarray(pbar, dtype=float)
    if p is not None and np.any(p <= 0):
        raise StructureError("cylinder measures need a strictly positive pbar")
    for depth in range(1, max_depth + 1):
        n_prev = los[-1].size
        lo_new = np.empty(k * n_prev)
        hi_new = np.empty(k * n_prev)
        first_new = np.repeat(np.arange(1, k + 1, dtype=np.int64), n_prev)
        cyl_new = np.empty(k * n_prev)
        for s in range(1, k + 1):
            sl = slice((s - 1) * n_prev, s * n_prev)
            lo_new[sl], hi_new[sl] = F.map(s).image_arrays(los[-1], his[-1])
            if P is None:
                cyl_new[sl] = 1.0
            elif depth == 1:
                cyl_new[sl] = p[s - 1]
            else:
                prev_first = firsts[-1]
                cyl_new[sl] = (
                    p[s - 1]
                    * P.entries[s - 1, prev_first - 1]
                    * cyls[-1]
                    / p[prev_first - 1]
                )
        los.append(lo_new)
        his.append(hi_new)
        firsts.append(first_new)
        cyls.append(cyl_new)
        out["len"].append(np.full(k * n_prev, depth, dtype=np.int64))
        out["idx"].append(np.arange(k * n_prev, dtype=np.int64))
        out["first"].append(first_new)
        out["lo"].append(lo_new)
        out["hi"].append(hi_new)
        out["cyl"].append(cyl_new)
    return _WordTable(
        k,
        np.concatenate(out["len"]),
        np.concatenate(out["idx"]),
        np.concatenate(out["first"]),
        np.concatenate(out["lo"]),
        np.concatenate(out["hi"]),
        np.concatenate(out["cyl"]),
    )


def check_invariant_injective(F: Ifs, J: tuple[float, float]) -> None:
    """Precondition of the witness searches: T_i(J) within J and T_i strictly
    monotone with nowhere-zero slope on J, for every map."""
    lo, hi = float(J[0]), float(J[1])
    if not (F.domain[0] - 1e-12 <= lo < hi <= F.domain[1] + 1e-12):
        raise PreconditionError(f"J=[{lo}, {hi}] is not a non-trivial subinterval")
    for i, T in enumerate(F.maps, start=1):
        ilo, ihi = T.image_interval(lo, hi)
        if ilo < lo - 1e-12 or ihi > hi + 1e-12:
            raise PreconditionError(f"map {i} does not keep J invariant")
        if T.strict_direction_on(lo, hi) is None:
            raise PreconditionError(f"map {i} is not injective on J")


def _pair_scan(
    table: _WordTable,
    eligible: np.ndarray,
    same_first: bool,
) -> Optional[tuple[Word, Word]]:
    """First (length-lex) pair of eligible words with disjoint images."""
    idx = np.nonzero(eligible)[0]
    lo = table.lo[idx]
    hi = table.hi[idx]
    first = table.first[idx]
    for b in range(1, idx.size):
        mask = (hi[:b] < lo[b]) | (lo[:b] > hi[b])
        if same_first:
            mask &= first[:b] == first[b]
        hits = np.nonzero(mask)[0]
        if hits.size:
            a = int(hits[0])
            return table.word(int(idx[a])), table.word(int(idx[b]))
    return None


def split_check(
    F: Ifs,
    P: TransitionMatrix,
    pbar: Sequence[float],
    J: tuple[float, float],
    max_depth: int,
) -> Optional[tuple[Word, Word]]:
    """Search for admissible words with equal first symbol whose images are
    disjoint and inside J; None if no witness exists up to ``max_depth``."""
    if P.k != F.k:
        raise ParameterError(f"matrix is {P.k}-state but the IFS has {F.k} maps")
    check_invariant_injective(F, J)
    table = _word_table(F, max_depth, P, pbar)
    eligible = (
        (table.cyl > 0.0)
        & (table.lo >= J[0] - 1e-12)
        & (table.hi <= J[1] + 1e-12)
    )
    return _pair_scan(table, eligible, same_first=True)


def separability_check(
    F: Ifs, J: tuple[float, float], max_depth: int
) -> Optional[tuple[Word, Word]]:
    """Like :func:`split_check` but with no admissibility or first-symbol
    constraint: any two disjoint word-images inside J qualify."""
    check_invariant_injective(F, J)
    table = _word_table(F, max_depth)
    eligible = (table.lo >= J[0] - 1e-12) & (table.hi <= J[1] + 1e-12)
    return _pair_scan(table, eligible, same_first=False)


def rigidity_check(
    F: Ifs,
    P: TransitionMatrix,
    pbar: Sequence[float],
    symbol: int,
    tol: float,
    max_depth: int,
    J: Optional[tuple[float, float]] = None,
) -> Optional[tuple[Word, Word]]:
    """Two admissible words starting with ``symbol`` whose images are disjoint
    and each thinner than ``tol``: an epsilon-certificate that the coding map
    takes two values on that cylinder.  None means no witness up to depth."""
    if tol <= 0:
        raise ParameterError("tol must be > 0")
    if P.k != F.k:
        raise ParameterError(f"matrix is {P.k}-state but the IFS has {F.k} maps")
    check_invariant_injective(F, F.domain if J is None else J)
    table = _word_table(F, max_depth, P, pbar)
    eligible = (
        (table.cyl > 0.0)
        & (table.first == symbol)
        & (table.hi - table.lo <= tol)
    )
    return _pair_scan(table, eligible, same_first=True)
