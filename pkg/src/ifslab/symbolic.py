"""Finite words and infinite symbol streams over the alphabet {1..k}.

Words are 1-based at every interface.  Streams are deterministic: the
n-th symbol is a pure function of the stream's kind and seed, so repeated
or concurrent queries always agree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class Word:
    """A finite word over {1..k}; the empty word denotes the identity."""

    symbols: tuple[int, ...]
    alphabet_size: int

    def __post_init__(self):
        k = self.alphabet_size
        if k < 1:
            raise ParameterError(f"alphabet size must be >= 1, got {k}")
        for s in self.symbols:
            if not 1 <= s <= k:
                raise ParameterError(f"symbol {s} outside alphabet 1..{k}")

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[int]:
        return iter(self.symbols)

    def extended(self, s: int) -> "Word":
        return Word(self.symbols + (s,), self.alphabet_size)


def as_symbols(w: "Word | Sequence[int]") -> tuple[int, ...]:
    """Accept a Word or a bare 1-based symbol sequence."""
    if isinstance(w, Word):
        return w.symbols
    return tuple(int(s) for s in w)


def enumerate_words(k: int, max_len: int) -> list[Word]:
    """All words of length 1..max_len in length-then-lexicographic order."""
    if k < 1:
        raise ParameterError(f"invalid alphabet size {k}")
    if max_len < 0:
        raise ParameterError(f"max_len must be >= 0, got {max_len}")
    out = []
    for n in range(1, max_len + 1):
        for tup in itertools.product(range(1, k + 1), repeat=n):
            out.append(Word(tup, k))
    return out


def words_up_to(k: int, max_len: int) -> Iterator[tuple[int, ...]]:
    """Lazy variant of :func:`enumerate_words` yielding bare tuples."""
    if k < 1:
        raise ParameterError(f"invalid alphabet size {k}")
    for n in range(1, max_len + 1):
        yield from itertools.product(range(1, k + 1), repeat=n)


class SymbolStream:
    """Lazily generated infinite symbol sequence with random access.

    Symbols are produced by an underlying deterministic generator and
    cached, so ``symbol(n)`` is stable across repeated queries.
    """

    _CHUNK = 4096

    def __init__(self, kind: str, k: int, gen: Iterator[int]):
        if k < 1:
            raise ParameterError(f"invalid alphabet size {k}")
        self.kind = kind
        self.alphabet_size = k
        self._gen = gen
        self._cache: list[int] = []

    def _extend_to(self, n: int) -> None:
        while len(self._cache) < n:
            self._cache.extend(
                itertools.islice(self._gen, self._CHUNK)
            )

    def symbol(self, n: int) -> int:
        """The n-th symbol, 0-indexed."""
        self._extend_to(n + 1)
        return self._cache[n]

    def prefix(self, n: int) -> tuple[int, ...]:
        self._extend_to(n)
        return tuple(self._cache[:n])

    def prefix_array(self, n: int) -> np.ndarray:
        self._extend_to(n)
        return np.asarray(self._cache[:n], dtype=np.int64)

    # -- constructors ----------------------------------------------------

    @staticmethod
    def constant(symbol: int, k: int | None = None) -> "SymbolStream":
        k = symbol if k is None else k
        if not 1 <= symbol <= k:
            raise ParameterError(f"symbol {symbol} outside alphabet 1..{k}")
        return SymbolStream("constant", k, itertools.repeat(symbol))

    @staticmethod
    def periodic(word: "Word | Sequence[int]", k: int | None = None) -> "SymbolStream":
        syms = as_symbols(word)
        if not syms:
            raise ParameterError("periodic stream needs a nonempty word")
        if k is None:
            k = word.alphabet_size if isinstance(word, Word) else max(syms)
        return SymbolStream("periodic", k, itertools.cycle(syms))

    @staticmethod
    def disjunctive(k: int) -> "SymbolStream":
        """Concatenation of all words in length-lexicographic order.

        Every word of length L occurs as a block within the first
        sum_{l<=L} l*k^l symbols, so the shift-orbit is dense.
        """

        def gen():
            for n in itertools.count(1):
                for tup in itertools.product(range(1, k + 1), repeat=n):
                    yield from tup

        if k < 1:
            raise ParameterError(f"invalid alphabet size {k}")
        return SymbolStream("disjunctive", k, gen())

    @staticmethod
    def bernoulli(weights: Sequence[float], seed: int) -> "SymbolStream":
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size < 1 or np.any(w <= 0):
            raise ParameterError("bernoulli weights must be positive")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ParameterError("bernoulli weights must sum to 1")
        k = w.size
        rng = np.random.default_rng(seed)

        def gen():
            while True:
                block = rng.choice(k, size=SymbolStream._CHUNK, p=w) + 1
                yield from (int(s) for s in block)

        return SymbolStream("random-bernoulli", k, gen())

    @staticmethod
    def markov(
        matrix, initial: Sequence[float], seed: int
    ) -> "SymbolStream":
        """Markov chain stream driven by a row-stochastic matrix."""
        P = np.asarray(getattr(matrix, "entries", matrix), dtype=float)
        init = np.asarray(initial, dtype=float)
        k = P.shape[0]
        if P.shape != (k, k) or init.shape != (k,):
            raise ParameterError("matrix/initial shape mismatch")
        rng = np.random.default_rng(seed)
        cum = np.cumsum(P, axis=1)
        cum_init = np.cumsum(init)

        def gen():
            state = int(np.searchsorted(cum_init, rng.random(), side="right"))
            state = min(state, k - 1)
            yield state + 1
            while True:
                u = rng.random(SymbolStream._CHUNK)
                for x in u:
                    state = int(np.searchsorted(cum[state], x, side="right"))
                    state = min(state, k - 1)
                    yield state + 1

        return SymbolStream("random-markov", k, gen())


def disjunctive_stream(k: int) -> SymbolStream:
    return SymbolStream.disjunctive(k)


def cylinder_measure(matrix, pbar: Sequence[float], w: "Word | Sequence[int]") -> float:
    """Markov measure of the cylinder [w0 ... wn]: p_{w0} prod p_{wi w(i+1)}.

    Returns 0 exactly when the cylinder is not admissible.
    """
    P = np.asarray(getattr(matrix, "entries", matrix), dtype=float)
    p = np.asarray(pbar, dtype=float)
    syms = as_symbols(w)
    if not syms:
        raise ParameterError("cylinder of the empty word is undefined")
    k = P.shape[0]
    for s in syms:
        if not 1 <= s <= k:
            raise IndexError(f"symbol {s} outside alphabet 1..{k}")
    m = p[syms[0] - 1]
    for a, b in zip(syms, syms[1:]):
        m *= P[a - 1, b - 1]
    return float(m)
