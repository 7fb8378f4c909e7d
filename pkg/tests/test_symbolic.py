import itertools

import numpy as np
import pytest

from ifslab.errors import ParameterError
from ifslab.stochastic import TransitionMatrix, stationary_vector
from ifslab.symbolic import (
    SymbolStream,
    Word,
    cylinder_measure,
    disjunctive_stream,
    enumerate_words,
)

from conftest import random_irreducible_matrix


class TestWord:
    def test_symbols_validated(self):
        with pytest.raises(ParameterError):
            Word((0,), 2)
        with pytest.raises(ParameterError):
            Word((3,), 2)

    def test_empty_word_allowed(self):
        assert len(Word((), 2)) == 0


class TestEnumerate:
    def test_k2_len1(self):
        words = enumerate_words(2, 1)
        assert [w.symbols for w in words] == [(1,), (2,)]

    def test_k2_len2_count_and_order(self):
        words = enumerate_words(2, 2)
        assert len(words) == 6
        assert [w.symbols for w in words[-2:]] == [(2, 1), (2, 2)]

    def test_k3_len2_count(self):
        assert len(enumerate_words(3, 2)) == 12

    def test_invalid_alphabet(self):
        with pytest.raises(ParameterError):
            enumerate_words(0, 3)


class TestDisjunctive:
    def test_first_eight(self):
        s = disjunctive_stream(2)
        assert s.prefix(8) == (1, 2, 1, 1, 1, 2, 2, 1)

    def test_every_short_word_occurs_early(self):
        # all words of length 3 occur within the first 2 + 8 + 24 symbols
        s = disjunctive_stream(2)
        prefix = s.prefix(34)
        for w in itertools.product((1, 2), repeat=3):
            assert any(
                prefix[i : i + 3] == w for i in range(len(prefix) - 2)
            ), f"block {w} missing"

    def test_unary_alphabet(self):
        s = disjunctive_stream(1)
        assert s.prefix(5) == (1, 1, 1, 1, 1)

    def test_determinism_100k(self):
        a = disjunctive_stream(2).prefix_array(100_000)
        b = disjunctive_stream(2).prefix_array(100_000)
        assert np.array_equal(a, b)


class TestRandomStreams:
    def test_bernoulli_reproducible(self):
        a = SymbolStream.bernoulli([0.3, 0.7], seed=42).prefix(1000)
        b = SymbolStream.bernoulli([0.3, 0.7], seed=42).prefix(1000)
        assert a == b

    def test_bernoulli_seed_changes_stream(self):
        a = SymbolStream.bernoulli([0.5, 0.5], seed=1).prefix(64)
        b = SymbolStream.bernoulli([0.5, 0.5], seed=2).prefix(64)
        assert a != b

    def test_markov_follows_support(self):
        chain = SymbolStream.markov(
            TransitionMatrix.cyclic(3), [1.0, 0.0, 0.0], seed=5
        )
        got = chain.prefix(9)
        assert got == (1, 2, 3, 1, 2, 3, 1, 2, 3)

    def test_repeated_queries_stable(self):
        s = SymbolStream.bernoulli([0.5, 0.5], seed=9)
        first = s.symbol(500)
        assert s.symbol(500) == first

    def test_periodic_and_constant(self):
        assert SymbolStream.periodic((1, 2)).prefix(5) == (1, 2, 1, 2, 1)
        assert SymbolStream.constant(2, k=2).prefix(3) == (2, 2, 2)


class TestCylinderMeasure:
    def test_uniform_rows(self):
        P = TransitionMatrix.bernoulli([0.5, 0.5])
        assert cylinder_measure(P, [0.5, 0.5], (1, 2)) == pytest.approx(0.25)

    def test_cyclic_admissible_path(self):
        P = TransitionMatrix.cyclic(3)
        pbar = np.full(3, 1 / 3)
        assert cylinder_measure(P, pbar, (1, 2, 3)) == pytest.approx(1 / 3)

    def test_cyclic_blocked_path(self):
        P = TransitionMatrix.cyclic(3)
        assert cylinder_measure(P, np.full(3, 1 / 3), (1, 1)) == 0.0

    def test_symbol_out_of_range(self):
        P = TransitionMatrix.bernoulli([0.5, 0.5])
        with pytest.raises(IndexError):
            cylinder_measure(P, [0.5, 0.5], (1, 3))

    def test_empty_word_rejected(self):
        P = TransitionMatrix.bernoulli([0.5, 0.5])
        with pytest.raises(ParameterError):
            cylinder_measure(P, [0.5, 0.5], ())

    def test_additivity_random_chains(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            P = random_irreducible_matrix(rng)
            pbar = stationary_vector(P)
            k = P.k
            for length in range(1, 6):
                for w in itertools.product(range(1, k + 1), repeat=length):
                    total = sum(
                        cylinder_measure(P, pbar, w + (s,))
                        for s in range(1, k + 1)
                    )
                    assert total == pytest.approx(
                        cylinder_measure(P, pbar, w), abs=1e-12
                    )

    def test_level_sums_to_one(self):
        rng = np.random.default_rng(29)
        for _ in range(5):
            P = random_irreducible_matrix(rng)
            pbar = stationary_vector(P)
            for length in range(1, 7):
                total = sum(
                    cylinder_measure(P, pbar, w)
                    for w in itertools.product(range(1, P.k + 1), repeat=length)
                )
                assert total == pytest.approx(1.0, abs=1e-12)
