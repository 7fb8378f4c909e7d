"""Finite unions of closed subintervals of a compact interval.

An :class:`IntervalSet` is the computable stand-in for a nonempty compact
subset of the ambient domain: a sorted tuple of pairwise-disjoint closed
parts, degenerate (point) parts allowed.  The empty set is representable
(no parts) but rejected by every operation that needs nonemptiness.

All operations are pure; instances are immutable.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DomainError,
    EmptySetError,
    ParameterError,
    PartOverflowError,
)

MERGE_EPS = 1e-12
MAX_PARTS = 2 ** 16


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class IntervalSet:
    """Sorted union of disjoint closed intervals inside a fixed domain."""

    domain: tuple[float, float]
    parts: tuple[tuple[float, float], ...]

    # -- construction -------------------------------------------------

    @staticmethod
    def build(
        raw: Iterable[Sequence[float]],
        domain: tuple[float, float],
        merge_eps: float = MERGE_EPS,
        max_parts: int = MAX_PARTS,
    ) -> "IntervalSet":
        """Normalize raw closed intervals: sort, validate, merge.

        Intervals that overlap or whose gap is at most ``merge_eps`` are
        fused; set equality with the raw union holds up to ``merge_eps``.
        """
        lo, hi = float(domain[0]), float(domain[1])
        if not lo < hi:
            raise DomainError(f"domain [{lo}, {hi}] must satisfy lo < hi")
        cleaned = []
        for a, b in raw:
            a, b = float(a), float(b)
            if b < a:
                raise DomainError(f"malformed interval [{a}, {b}]")
            if a < lo - merge_eps or b > hi + merge_eps:
                raise DomainError(
                    f"interval [{a}, {b}] outside domain [{lo}, {hi}]"
                )
            cleaned.append((min(max(a, lo), hi), min(max(b, lo), hi)))
        cleaned.sort()
        merged: list[list[float]] = []
        for a, b in cleaned:
            if merged and a - merged[-1][1] <= merge_eps:
                if b > merged[-1][1]:
                    merged[-1][1] = b
            else:
                merged.append([a, b])
        if len(merged) > max_parts:
            raise PartOverflowError(
                f"{len(merged)} parts exceed the cap of {max_parts}"
            )
        return IntervalSet((lo, hi), tuple((a, b) for a, b in merged))

    @staticmethod
    def whole(domain: tuple[float, float]) -> "IntervalSet":
        return IntervalSet.build([domain], domain)

    @staticmethod
    def point(x: float, domain: tuple[float, float]) -> "IntervalSet":
        return IntervalSet.build([(x, x)], domain)

    @staticmethod
    def empty(domain: tuple[float, float]) -> "IntervalSet":
        """The empty sentinel; most operations refuse it."""
        return IntervalSet((float(domain[0]), float(domain[1])), ())

    # -- basic queries -------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self.parts

    def _require_nonempty(self) -> None:
        if not self.parts:
            raise EmptySetError("operation requires a nonempty interval set")

    @property
    def inf(self) -> float:
        self._require_nonempty()
        return self.parts[0][0]

    @property
    def sup(self) -> float:
        self._require_nonempty()
        return self.parts[-1][1]

    def diam(self) -> float:
        self._require_nonempty()
        return self.sup - self.inf

    def measure(self) -> float:
        """Total length of the parts (Lebesgue measure)."""
        self._require_nonempty()
        return sum(b - a for a, b in self.parts)

    def contains(self, x: float) -> bool:
        self._require_nonempty()
        i = bisect.bisect_right([a for a, _ in self.parts], x) - 1
        return i >= 0 and self.parts[i][0] <= x <= self.parts[i][1]

    def midpoints(self) -> list[float]:
        self._require_nonempty()
        return [(a + b) / 2.0 for a, b in self.parts]

    # -- distances -----------------------------------------------------

    def distance_to(self, x: float) -> float:
        """Distance from the point ``x`` to the set."""
        self._require_nonempty()
        starts = [a for a, _ in self.parts]
        i = bisect.bisect_right(starts, x) - 1
        best = float("inf")
        if i >= 0:
            a, b = self.parts[i]
            best = 0.0 if x <= b else x - b
        if best > 0.0 and i + 1 < len(self.parts):
            best = min(best, self.parts[i + 1][0] - x)
        return best

    def gap_from(self, other: "IntervalSet") -> float:
        """One-sided Hausdorff gap sup_{a in self} d(a, other).

        Exact: on each part of ``self`` the distance to ``other`` is a
        piecewise-linear function whose maxima sit at part endpoints of
        ``self`` or at midpoints of gaps of ``other``.
        """
        self._require_nonempty()
        other._require_nonempty()
        candidates: list[float] = []
        for a, b in self.parts:
            candidates.append(a)
            candidates.append(b)
        for (_, b1), (a2, _) in zip(other.parts, other.parts[1:]):
            mid = (b1 + a2) / 2.0
            if self.contains(mid):
                candidates.append(mid)
        return max(other.distance_to(x) for x in candidates)

    def hausdorff(self, other: "IntervalSet") -> float:
        return max(self.gap_from(other), other.gap_from(self))

    def subset_within(self, other: "IntervalSet", tol: float) -> bool:
        """True iff every point of ``self`` is within ``tol`` of ``other``."""
        return self.gap_from(other) <= tol

    def approx_equal(self, other: "IntervalSet", tol: float = MERGE_EPS) -> bool:
        """Part-by-part equality of the normalized representations."""
        if self.is_empty or other.is_empty:
            return self.is_empty and other.is_empty
        if len(self.parts) != len(other.parts):
            return False
        return all(
            abs(a1 - a2) <= tol and abs(b1 - b2) <= tol
            for (a1, b1), (a2, b2) in zip(self.parts, other.parts)
        )

    # -- constructive operations ----------------------------------------

    def fatten(self, eps: float, merge_eps: float = MERGE_EPS) -> "IntervalSet":
        """Closed eps-neighbourhood, clipped to the domain."""
        if eps < 0:
            raise ParameterError(f"fatten needs eps >= 0, got {eps}")
        self._require_nonempty()
        lo, hi = self.domain
        grown = [
            (max(a - eps, lo), min(b + eps, hi)) for a, b in self.parts
        ]
        return IntervalSet.build(grown, self.domain, merge_eps)

    def coarsen(self, resolution: float) -> "IntervalSet":
        """Fatten by resolution/2 then re-normalize; reduces part count."""
        if resolution <= 0:
            raise ParameterError("coarsen needs resolution > 0")
        return self.fatten(resolution / 2.0, merge_eps=resolution / 2.0)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        if self.domain != other.domain:
            raise DomainError("union of sets over different domains")
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        return IntervalSet.build(self.parts + other.parts, self.domain)

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        """Cover of the closure of ``self`` minus ``other``; may be empty."""
        if self.is_empty or other.is_empty:
            return self
        out: list[tuple[float, float]] = []
        for a, b in self.parts:
            pieces = [(a, b)]
            for c, d in other.parts:
                if d < a or c > b:
                    continue
                nxt: list[tuple[float, float]] = []
                for pa, pb in pieces:
                    if d < pa or c > pb:
                        nxt.append((pa, pb))
                        continue
                    if pa < c:
                        nxt.append((pa, c))
                    if d < pb:
                        nxt.append((d, pb))
                pieces = nxt
            out.extend(pieces)
        if not out:
            return IntervalSet.empty(self.domain)
        return IntervalSet.build(out, self.domain)

    # -- serialization ---------------------------------------------------

    def to_csv(self) -> str:
        """One part per line "a,b", preceded by a "# domain lo hi" header."""
        lines = [f"# domain {_fmt(self.domain[0])} {_fmt(self.domain[1])}"]
        lines.extend(f"{_fmt(a)},{_fmt(b)}" for a, b in self.parts)
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_arrays(
        los: np.ndarray,
        his: np.ndarray,
        domain: tuple[float, float],
        merge_eps: float = MERGE_EPS,
        max_parts: int = MAX_PARTS,
    ) -> "IntervalSet":
        """Vectorized :meth:`build` for large part batches."""
        los = np.asarray(los, dtype=float)
        his = np.asarray(his, dtype=float)
        if los.size == 0:
            return IntervalSet.empty(domain)
        lo, hi = float(domain[0]), float(domain[1])
        if np.any(his < los):
            raise DomainError("malformed interval in batch")
        if los.min() < lo - merge_eps or his.max() > hi + merge_eps:
            raise DomainError("interval batch exceeds domain")
        los = np.clip(los, lo, hi)
        his = np.clip(his, lo, hi)
        order = np.argsort(los, kind="stable")
        los = los[order]
        his = np.maximum.accumulate(his[order])
        starts = np.empty(los.size, dtype=bool)
        starts[0] = True
        starts[1:] = los[1:] - his[:-1] > merge_eps
        idx = np.nonzero(starts)[0]
        if idx.size > max_parts:
            raise PartOverflowError(
                f"{idx.size} parts exceed the cap of {max_parts}"
            )
        out_lo = los[idx]
        out_hi = np.maximum.reduceat(his, idx)
        return IntervalSet(
            (lo, hi), tuple(zip(out_lo.tolist(), out_hi.tolist()))
        )

    @staticmethod
    def from_csv(text: str) -> "IntervalSet":
        domain = None
        raw = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                fields = line[1:].split()
                if fields and fields[0] == "domain":
                    domain = (float(fields[1]), float(fields[2]))
                continue
            a, b = line.split(",")
            raw.append((float(a), float(b)))
        if domain is None:
            raise DomainError("missing '# domain lo hi' header")
        if not raw:
            return IntervalSet.empty(domain)
        return IntervalSet.build(raw, domain)
