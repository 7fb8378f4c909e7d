import itertools

import numpy as np
import pytest

from ifslab.errors import ParameterError, PreconditionError, StructureError
from ifslab.maps import Ifs, linear_map
from ifslab.presets import get_preset
from ifslab.stochastic import (
    TransitionMatrix,
    inverse_matrix,
    is_irreducible,
    is_primitive,
    rigidity_check,
    separability_check,
    split_check,
    stationary_vector,
)
from ifslab.symbolic import cylinder_measure

from conftest import random_irreducible_matrix

UNIFORM2 = TransitionMatrix.bernoulli([0.5, 0.5])


def cantor3_ifs():
    """Middle-thirds pair extended to three symbols by duplicating map 1."""
    t1 = linear_map((0.0, 1.0), 0.0, 1 / 3)
    t2 = linear_map((0.0, 1.0), 2 / 3, 1.0)
    return Ifs((0.0, 1.0), (t1, t2, t1))


class TestMatrixBasics:
    def test_row_sum_validation(self):
        with pytest.raises(ParameterError):
            TransitionMatrix(np.array([[0.5, 0.6], [0.5, 0.5]]))

    def test_negative_rejected(self):
        with pytest.raises(ParameterError):
            TransitionMatrix(np.array([[1.5, -0.5], [0.5, 0.5]]))

    def test_csv_roundtrip(self):
        P = TransitionMatrix(np.array([[0.25, 0.75], [0.1, 0.9]]))
        back = TransitionMatrix.from_csv(P.to_csv())
        assert np.array_equal(back.entries, P.entries)


class TestStationary:
    def test_two_state_hand_solution(self):
        P = TransitionMatrix(np.array([[0.0, 1.0], [0.5, 0.5]]))
        assert stationary_vector(P) == pytest.approx([1 / 3, 2 / 3], abs=1e-10)

    def test_cyclic_uniform(self):
        assert stationary_vector(TransitionMatrix.cyclic(3)) == pytest.approx(
            [1 / 3] * 3, abs=1e-10
        )

    def test_rank_one_returns_weights(self):
        w = [0.2, 0.3, 0.5]
        assert stationary_vector(TransitionMatrix.bernoulli(w)) == pytest.approx(
            w, abs=1e-12
        )

    def test_reducible_rejected(self):
        with pytest.raises(StructureError):
            stationary_vector(TransitionMatrix(np.eye(2)))

    def test_residual_bound(self):
        rng = np.random.default_rng(41)
        for _ in range(50):
            P = random_irreducible_matrix(rng)
            p = stationary_vector(P, tol=1e-14)
            assert np.abs(p @ P.entries - p).sum() <= 1e-13
            assert np.all(p > 0)


class TestStructureFlags:
    def test_identity_not_irreducible(self):
        assert not is_irreducible(TransitionMatrix(np.eye(3)))

    def test_cyclic_irreducible_not_primitive(self):
        C = TransitionMatrix.cyclic(3)
        assert is_irreducible(C) and not is_primitive(C)

    def test_positive_is_primitive(self):
        assert is_primitive(TransitionMatrix(np.full((4, 4), 0.25)))


class TestInverseChain:
    def test_cyclic_reverses(self):
        C = TransitionMatrix.cyclic(3)
        Q = inverse_matrix(C, np.full(3, 1 / 3))
        assert np.allclose(Q.entries, C.entries.T, atol=1e-15)

    def test_symmetric_uniform_is_self_inverse(self):
        P = TransitionMatrix(np.array([[0.2, 0.8], [0.8, 0.2]]))
        Q = inverse_matrix(P, np.array([0.5, 0.5]))
        assert np.allclose(Q.entries, P.entries, atol=1e-15)

    def test_two_state_always_reversible(self):
        P = TransitionMatrix(np.array([[0.0, 1.0], [0.5, 0.5]]))
        Q = inverse_matrix(P, stationary_vector(P))
        assert np.allclose(Q.entries, P.entries, atol=1e-10)

    def test_zero_stationary_component_rejected(self):
        P = TransitionMatrix.cyclic(2)
        with pytest.raises(StructureError):
            inverse_matrix(P, np.array([1.0, 0.0]))

    def test_identities_random(self):
        rng = np.random.default_rng(43)
        for _ in range(100):
            P = random_irreducible_matrix(rng)
            p = stationary_vector(P)
            Q = inverse_matrix(P, p)
            assert np.abs(p @ Q.entries - p).max() <= 1e-12
            assert np.abs(
                p[:, None] * Q.entries - (p[:, None] * P.entries).T
            ).max() <= 1e-12
            back = inverse_matrix(Q, p)
            assert np.abs(back.entries - P.entries).max() <= 1e-12
            assert is_primitive(P) == is_primitive(Q)

    def test_reversal_identity_on_cylinders(self):
        rng = np.random.default_rng(47)
        for _ in range(20):
            P = random_irreducible_matrix(rng)
            p = stationary_vector(P)
            Q = inverse_matrix(P, p)
            for length in range(1, 6):
                for w in itertools.product(range(1, P.k + 1), repeat=length):
                    assert cylinder_measure(Q, p, w) == pytest.approx(
                        cylinder_measure(P, p, tuple(reversed(w))), abs=1e-12
                    )


class TestSplitCheck:
    def test_thirds_pair_witness(self, cantor_ifs):
        w = split_check(cantor_ifs, UNIFORM2, [0.5, 0.5], (0.0, 1.0), 6)
        assert w is not None
        assert (w[0].symbols, w[1].symbols) == ((1, 1), (1, 2))

    def test_isometries_none(self, flip_ifs):
        assert split_check(flip_ifs, UNIFORM2, [0.5, 0.5], (0.0, 1.0), 12) is None

    def test_mixed_fixed_point_system_has_witness(self):
        F = get_preset("nonregular-6-1")
        w = split_check(F, UNIFORM2, [0.5, 0.5], (0.0, 1.0), 8)
        assert w is not None
        assert w[0].symbols[0] == w[1].symbols[0]

    def test_plateau_map_fails_precondition(self):
        F = get_preset("figure-2")
        with pytest.raises(PreconditionError):
            split_check(F, UNIFORM2, [0.5, 0.5], (0.0, 1.0), 4)

    def test_witness_images_disjoint_inside_j(self, cantor_ifs):
        from ifslab.dynamics import word_image

        J = (0.0, 1.0)
        w = split_check(cantor_ifs, UNIFORM2, [0.5, 0.5], J, 8)
        a = word_image(cantor_ifs, w[0]).parts[0]
        b = word_image(cantor_ifs, w[1]).parts[0]
        assert a[1] < b[0] or b[1] < a[0]
        assert min(a[0], b[0]) >= J[0] and max(a[1], b[1]) <= J[1]

    def test_invalid_j_rejected(self, cantor_ifs):
        with pytest.raises(PreconditionError):
            split_check(cantor_ifs, UNIFORM2, [0.5, 0.5], (0.0, 0.5), 8)


class TestSeparability:
    def test_thirds_pair_single_symbols(self, cantor_ifs):
        w = separability_check(cantor_ifs, (0.0, 1.0), 6)
        assert (w[0].symbols, w[1].symbols) == ((1,), (2,))

    def test_isometries_none(self, flip_ifs):
        assert separability_check(flip_ifs, (0.0, 1.0), 12) is None

    def test_dense_target_still_separable(self):
        F = get_preset("porcupine-6-2")
        assert separability_check(F, (0.0, 1.0), 8) is not None

    def test_split_witness_is_separability_witness(self, cantor_ifs):
        split_w = split_check(cantor_ifs, UNIFORM2, [0.5, 0.5], (0.0, 1.0), 6)
        from ifslab.dynamics import word_image

        a = word_image(cantor_ifs, split_w[0]).parts[0]
        b = word_image(cantor_ifs, split_w[1]).parts[0]
        # disjoint images inside J is exactly the separability condition
        assert a[1] < b[0] or b[1] < a[0]


class TestRigidity:
    def test_thirds_pair_witness_thin(self, cantor_ifs):
        tol = 0.05
        w = rigidity_check(cantor_ifs, UNIFORM2, [0.5, 0.5], 1, tol, 8)
        assert w is not None
        from ifslab.dynamics import word_image

        for word in w:
            assert word.symbols[0] == 1
            assert word_image(cantor_ifs, word).diam() <= tol

    def test_deterministic_chain_single_cylinder(self):
        F = cantor3_ifs()
        C = TransitionMatrix.cyclic(3)
        assert rigidity_check(F, C, np.full(3, 1 / 3), 1, 0.05, 9) is None

    def test_isometries_none(self, flip_ifs):
        assert rigidity_check(flip_ifs, UNIFORM2, [0.5, 0.5], 1, 0.05, 10) is None

    def test_matrix_size_mismatch(self, cantor_ifs):
        with pytest.raises(ParameterError):
            rigidity_check(
                cantor_ifs, TransitionMatrix.cyclic(3), np.full(3, 1 / 3), 1, 0.1, 5
            )
