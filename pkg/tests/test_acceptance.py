"""Acceptance suite: every criterion runs at its stated tolerance and
prints one PASS/FAIL line (run with ``pytest -s`` to see them live).
"""

import itertools
from contextlib import contextmanager

import numpy as np
import pytest

from ifslab import chaos, dynamics as dyn, measures as ms
from ifslab.errors import DegenerateOutputError
from ifslab.intervals import IntervalSet
from ifslab.maps import Ifs, linear_map, lipschitz_exact
from ifslab.presets import get_preset
from ifslab.stochastic import (
    TransitionMatrix,
    inverse_matrix,
    is_primitive,
    separability_check,
    split_check,
    stationary_vector,
)
from ifslab.symbolic import SymbolStream, cylinder_measure

import property_suites
from conftest import (
    hausdorff_arrays,
    middle_thirds_arrays,
    middle_thirds_level,
    parts_arrays,
    random_irreducible_matrix,
)


@contextmanager
def criterion(num: int, title: str):
    try:
        yield
    except Exception:
        print(f"ACCEPTANCE {num:2d} FAIL: {title}")
        raise
    print(f"ACCEPTANCE {num:2d} PASS: {title}")


def cantor3_ifs():
    t1 = linear_map((0.0, 1.0), 0.0, 1 / 3)
    t2 = linear_map((0.0, 1.0), 2 / 3, 1.0)
    return Ifs((0.0, 1.0), (t1, t2, t1))


def test_criterion_01_nested_iteration_matches_analytic_levels():
    with criterion(1, "union-operator iterates match analytic level sets"):
        F = get_preset("cantor")
        ref_lo, ref_hi = middle_thirds_arrays(20)
        cur = F.whole_domain()
        for n in range(1, 16):
            cur = dyn.bh_apply(F, cur)
            los, his = parts_arrays(cur)
            level_lo, level_hi = middle_thirds_arrays(n)
            exact = hausdorff_arrays(los, his, level_lo, level_hi)
            assert exact <= 1e-12, f"level {n}: {exact}"
            deep = hausdorff_arrays(los, his, ref_lo, ref_hi)
            assert deep <= 3.0 ** -n + 1e-12, f"level {n} vs deep ref: {deep}"


def test_criterion_02_wide_domain_two_fixed_points():
    with criterion(2, "two fixed points: stable target, no global attraction"):
        F = get_preset("example-3-4")
        star = dyn.star_set(F, F.whole_domain())
        assert star.set.parts == ((0.0, 2.0),)
        assert star.iterations == 1 and star.converged

        res = dyn.target_approx(F, 1e-4, 14, max_pending=300_000)
        ref = middle_thirds_level(9, domain=(0.0, 2.0))
        assert res.atoms.hausdorff(ref) <= 1e-4

        approx = middle_thirds_level(12, domain=(0.0, 2.0))
        probe = dyn.conley_probe(F, approx, eps=0.05, tol=1e-3, max_iter=200)
        assert probe.kind == "escapes"
        assert any(b >= 1.0 and a <= 1.04 for a, b in probe.residual.parts)

        assert dyn.stability_probe(F, approx, 0.1, 0.01, 50)


def test_criterion_03_three_atom_target():
    with criterion(3, "plateau pair has exactly three target atoms"):
        F = get_preset("figure-2")
        res = dyn.target_approx(F, 1e-4, 30)
        assert len(res.atoms.parts) == 3
        for got, want in zip(res.atoms.midpoints(), (0.0, 0.5, 1.0)):
            assert abs(got - want) <= 1e-4


def test_criterion_04_expansive_pair_contracting_words():
    with criterion(4, "expansive pair: contracting words cover the interval"):
        F = get_preset("bony-6-3")
        words = [(1, 1, 1), (1, 1, 2), (2, 2, 1), (2, 2, 2, 2, 2)]
        lips = [lipschitz_exact(F, w) for w in words]
        assert all(L < 1.0 for L in lips), lips
        assert abs(lips[0] - 0.75) <= 1e-12

        union = dyn.word_image(F, words[0])
        for w in words[1:]:
            union = union.union(dyn.word_image(F, w))
        assert union.hausdorff(IntervalSet.whole((0.0, 1.0))) <= 1e-12

        fib = dyn.fibre_approx(F, SymbolStream.periodic((1, 2)), 40)
        assert fib.diam() >= 0.01

        res = dyn.target_approx(F, 5e-3, 14, max_pending=300_000)
        full = IntervalSet.whole((0.0, 1.0))
        cover = res.atoms.union(res.undecided)
        assert cover.hausdorff(full) <= 5e-3
        assert res.atoms.hausdorff(full) <= 5e-3


def test_criterion_05_isometric_pair_negative_results():
    with criterion(5, "isometric pair: no witnesses, everything unresolved"):
        F = get_preset("flip")
        assert dyn.weakly_hyperbolic_witness(F, 0.5, 20) is None
        U = TransitionMatrix.bernoulli([0.5, 0.5])
        assert split_check(F, U, [0.5, 0.5], (0.0, 1.0), 12) is None
        assert separability_check(F, (0.0, 1.0), 12) is None
        cells = dyn.common_fixed_points(F, 1e-9, 1024)
        assert cells.contains(0.5)
        with pytest.raises(DegenerateOutputError) as info:
            ms.coding_pushforward(
                F, 2000, 30, 0.5, 64, seed=7, weights=[0.5, 0.5]
            )
        assert info.value.unresolved_fraction == 1.0


def test_criterion_06_stationary_moments_and_support():
    with criterion(6, "stationary estimates agree: moments, transport, support"):
        F = get_preset("cantor")
        n_bins = 2187
        mu = ms.GridMeasure.uniform(F.domain, n_bins)
        for _ in range(200):
            nxt = ms.markov_step(F, [0.5, 0.5], mu)
            drift = ms.w1_distance(mu, nxt)
            mu = nxt
            if drift <= 1e-12:
                break
        assert abs(mu.mean() - 0.5) <= 5e-3
        assert abs(mu.variance() - 0.125) <= 5e-3
        # independent reference for the variance: self-similarity series
        series = 4 * 0.25 * sum(9.0 ** -n for n in range(1, 40))
        assert abs(series - 0.125) <= 1e-12

        est, unresolved = ms.coding_pushforward(
            F, 100_000, 40, 1e-9, n_bins, seed=20240801, weights=[0.5, 0.5]
        )
        assert unresolved == 0.0
        assert abs(est.mean() - 0.5) <= 5e-3
        assert abs(est.variance() - 0.125) <= 5e-3
        assert ms.w1_distance(mu, est) <= 2 * mu.bin_width + 0.01

        atoms = dyn.target_approx(F, (3.0 ** -7) * (1 + 1e-9), 10).atoms
        supp = ms.support_estimate(mu, 1e-9)
        assert supp.hausdorff(atoms) <= 2 * mu.bin_width


def test_criterion_07_matrix_driven_sections():
    with criterion(7, "matrix-driven operator: section masses and stability"):
        F = cantor3_ifs()
        rng = np.random.default_rng(61)

        C = TransitionMatrix.cyclic(3)
        sec = rng.random((3, 81))
        sec /= sec.sum()
        hat = ms.HatMeasure(F.domain, sec)
        phat = hat.section_masses()
        h = hat
        for n in range(1, 51):
            h = ms.generalized_markov_step(F, C, h)
            expect = phat @ np.linalg.matrix_power(C.entries, n)
            assert np.abs(h.section_masses() - expect).max() <= 1e-12

        P = TransitionMatrix(np.array([[0.5, 0.5, 0], [0, 0.5, 0.5], [0.5, 0, 0.5]]))
        pbar = stationary_vector(P)
        sec = rng.random((3, 243))
        sec /= sec.sum()
        h = ms.HatMeasure(F.domain, sec)
        converged_at = None
        for n in range(1, 201):
            h = ms.generalized_markov_step(F, P, h)
            if np.abs(h.section_masses() - pbar).max() <= 1e-8:
                converged_at = n
                break
        assert converged_at is not None

        starts = []
        for _ in range(3):
            sec = rng.random((3, 243))
            sec /= sec.sum()
            starts.append(ms.HatMeasure(F.domain, sec))
        rep = ms.stability_probe_measures(F, starts, 1e-3, 200, matrix=P)
        assert rep.stable and rep.max_pairwise <= 1e-3


def test_criterion_08_inverse_chain_identities():
    with criterion(8, "inverse-chain identities on random irreducible matrices"):
        rng = np.random.default_rng(67)
        for _ in range(100):
            P = random_irreducible_matrix(rng)
            p = stationary_vector(P)
            Q = inverse_matrix(P, p)
            lhs = p[:, None] * Q.entries
            rhs = (p[:, None] * P.entries).T
            assert np.abs(lhs - rhs).max() <= 1e-12
            assert is_primitive(P) == is_primitive(Q)
            for length in range(1, 6):
                for w in itertools.product(range(1, P.k + 1), repeat=length):
                    assert abs(
                        cylinder_measure(Q, p, w)
                        - cylinder_measure(P, p, tuple(reversed(w)))
                    ) <= 1e-12


def test_criterion_09_deterministic_chaos_game():
    with criterion(9, "deterministic chaos game recovers the target set"):
        F = get_preset("cantor")
        atoms = dyn.target_approx(F, 1e-3, 16).atoms
        rep = chaos.chaos_probe(F, 0.5, 100_000, 1000, 1e-3, atoms, 1e-3)
        assert rep.distance <= 5e-3

        F34 = get_preset("example-3-4")
        ref = middle_thirds_level(7, domain=(0.0, 2.0))
        rep = chaos.chaos_probe(F34, 2.0, 100_000, 1000, 1e-3, ref, 3.0 ** -7)
        assert rep.distance <= 5e-3


def test_criterion_10_property_suites():
    with criterion(10, "randomized property suites at full trial counts"):
        property_suites.interval_metric_axioms(1000)
        property_suites.bh_monotone_and_additive(500)
        property_suites.depth_cover_identity(6)
        property_suites.measure_operator_laws(50)
        property_suites.seeded_worker_determinism()
