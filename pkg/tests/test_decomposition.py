import itertools

import numpy as np
import pytest

from dcglearn.decomposition import (
    flatten_matrix,
    hamming,
    precision,
    rank_one_factorize,
    similarity,
    t_transform,
    top_singular_triplet,
    weight_matrix,
)
from dcglearn.encoding import UtilityVector, case_one_weights, encode
from dcglearn.errors import DegenerateInputError, InvalidArgumentError
from dcglearn.learner import PreferencePair, label_pair
from dcglearn.simulation import ExperimentConfig, make_ground_truth, sample_pairs, to_preference_pairs

TRUTH = make_ground_truth(ExperimentConfig().truth)


def cosine(a, b):
    return a @ b / (np.linalg.norm(a) * np.linalg.norm(b))


def tie_free_pairs(seed, n=500):
    pairs = to_preference_pairs(sample_pairs(ExperimentConfig(), n, np.random.default_rng(seed)), "base", 5)
    return [p for p in pairs if TRUTH.weights @ (p.winner - p.loser) != 0]


def test_reshape_round_trip(rng):
    w = UtilityVector(rng.normal(size=50), 5)
    m = weight_matrix(w)
    assert m.shape == (5, 10)
    assert m[2, 7] == w.weights[7 * 5 + 2]
    np.testing.assert_array_equal(flatten_matrix(m).weights, w.weights)


def test_exact_rank_one_recovery():
    gains = np.array([1.0, 3.0, 7.0, 15.0, 31.0])
    discounts = 1 / np.log2(np.arange(2, 12))
    m = weight_matrix(case_one_weights(gains, discounts))
    f = rank_one_factorize(m)
    assert f.residual_ratio <= 1e-10
    assert cosine(f.gains_est, gains[::-1]) >= 1 - 1e-9
    assert cosine(f.discounts_est, discounts) >= 1 - 1e-9
    assert np.linalg.norm(f.discounts_est) == pytest.approx(1.0)
    assert f.discounts_est.sum() > 0


def test_unit_outer_product():
    m = np.zeros((3, 4))
    m[0, 0] = 1.0
    f = rank_one_factorize(m)
    assert f.sigma1 == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(f.gains_est, [1, 0, 0], atol=1e-12)
    np.testing.assert_allclose(f.discounts_est, [1, 0, 0, 0], atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_random_matrix_against_dense_oracle(seed):
    m = np.random.default_rng(seed).normal(size=(5, 10))
    f = rank_one_factorize(m)
    singular = np.linalg.svd(m, compute_uv=False)
    eig_sigma = np.sqrt(np.linalg.eigvalsh(m.T @ m).max())
    assert f.sigma1 == pytest.approx(eig_sigma, abs=1e-8)
    tail = np.sqrt(np.sum(singular[1:] ** 2))
    assert np.linalg.norm(m - f.approximation()) <= tail + 1e-8
    assert f.residual_ratio == pytest.approx(singular[1] / singular[0], abs=1e-6)


def test_zero_matrix_rejected():
    with pytest.raises(DegenerateInputError):
        rank_one_factorize(np.zeros((2, 3)))


def test_top_singular_triplet_zero_matrix():
    sigma, u, v = top_singular_triplet(np.zeros((2, 3)))
    assert sigma == 0.0


def test_precision_of_truth_is_one():
    assert precision(TRUTH, tie_free_pairs(1)) == 1.0


def test_precision_of_negated_truth_is_zero():
    assert precision(UtilityVector(-TRUTH.weights, 5), tie_free_pairs(2)) == 0.0


def test_precision_counts_ties_as_errors():
    pair = PreferencePair(encode([1, 2], 2), encode([2, 1], 2))
    assert precision(np.zeros(4), [pair]) == 0.0


def test_precision_of_random_weights_near_half():
    pairs = tie_free_pairs(3, 1000)
    rng = np.random.default_rng(4)
    for _ in range(3):
        random_w = rng.normal(size=50)
        # random direction against random balanced labels: orientation is a coin flip
        balanced = [p if rng.random() < 0.5 else PreferencePair(p.loser, p.winner) for p in pairs]
        assert abs(precision(random_w, balanced) - 0.5) <= 0.05


def test_precision_and_similarity_scale_invariant(rng):
    w_hat = UtilityVector(TRUTH.weights + rng.normal(scale=0.3, size=50), 5)
    pairs = tie_free_pairs(5)
    for alpha in (0.1, 7.0):
        scaled = UtilityVector(alpha * w_hat.weights, 5)
        assert precision(scaled, pairs) == precision(w_hat, pairs)
        assert similarity(TRUTH, scaled) == pytest.approx(similarity(TRUTH, w_hat), abs=1e-12)


def test_precision_needs_pairs():
    with pytest.raises(InvalidArgumentError):
        precision(TRUTH, [])


def test_t_transform_definition():
    w = UtilityVector(np.array([5.0, 3.0, 1.0, 9.0, 4.0, 2.0]), 3)
    np.testing.assert_allclose(t_transform(w).weights, [4, 2, 0, 7, 2, 0])


def test_t_transform_kills_block_constants():
    w = UtilityVector(np.repeat([3.0, -1.0, 2.5], 4), 4)
    np.testing.assert_array_equal(t_transform(w).weights, 0.0)


def test_similarity_properties(rng):
    assert similarity(TRUTH, TRUTH) == pytest.approx(1.0)
    assert similarity(TRUTH, UtilityVector(4.2 * TRUTH.weights, 5)) == pytest.approx(1.0)
    offsets = np.repeat(rng.normal(size=10), 5)
    assert similarity(TRUTH, UtilityVector(TRUTH.weights + offsets, 5)) == pytest.approx(1.0)
    with pytest.raises(DegenerateInputError):
        similarity(TRUTH, UtilityVector(np.ones(50), 5))


def test_hamming_examples():
    assert hamming([0, 1, 2], [0, 1, 2]) == 0
    assert hamming([1, 2, 3], [2, 1, 3]) == 2
    with pytest.raises(InvalidArgumentError):
        hamming([1, 2], [1, 2, 3])


def test_hamming_range_and_metric_axioms(rng):
    for k in range(1, 7):
        perms = list(itertools.permutations(range(k)))
        for p, q in itertools.combinations(perms, 2):
            assert hamming(p, q) in range(2, k + 1)
    for _ in range(300):
        a, b, c = (rng.permutation(8) for _ in range(3))
        assert hamming(a, b) == hamming(b, a)
        assert hamming(a, c) <= hamming(a, b) + hamming(b, c)


def test_label_pair_feeds_precision():
    s1, s2 = encode([2, 1], 2), encode([1, 2], 2)
    pair = label_pair(np.array([2.0, 1.0, 1.0, 0.5]), s1, s2)
    assert precision(np.array([2.0, 1.0, 1.0, 0.5]), [pair]) == 1.0
