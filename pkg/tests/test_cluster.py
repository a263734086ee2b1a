import numpy as np
import pytest

from sparse_rank1 import (
    BadK,
    ClusterAssignment,
    DenseTensor,
    LengthMismatch,
    ShapeMismatch,
    SparsityBudget,
    StcConfig,
    bic,
    cluster_error,
    deflate,
    frobenius_norm,
    gen_cluster_synthetic,
    kmeans,
    rank1_outer,
    reduced_samples,
    select_k,
    select_model,
    stack_samples,
    stc_pipeline,
)
from sparse_rank1.cluster import kmeans_with_wcss

from conftest import random_tensor


def sparse_unit(n, support, rng):
    x = np.zeros(n)
    x[list(support)] = rng.standard_normal(len(support))
    return x / np.linalg.norm(x)


class TestStackSamples:
    def test_single_sample(self, rng):
        t = random_tensor(rng, (3, 4))
        stacked = stack_samples([t])
        assert stacked.shape == (3, 4, 1)
        np.testing.assert_array_equal(stacked.data, t.data)

    def test_two_matrix_samples(self, rng):
        a = random_tensor(rng, (2, 2))
        b = random_tensor(rng, (2, 2))
        stacked = stack_samples([a, b])
        arr = stacked.to_array()
        np.testing.assert_array_equal(arr[:, :, 0], a.to_array())
        np.testing.assert_array_equal(arr[:, :, 1], b.to_array())

    def test_round_trip_20_samples(self, rng):
        samples = [random_tensor(rng, (3, 3)) for _ in range(20)]
        arr = stack_samples(samples).to_array()
        for i, s in enumerate(samples):
            np.testing.assert_array_equal(arr[:, :, i], s.to_array())

    def test_shape_mismatch(self, rng):
        with pytest.raises(ShapeMismatch):
            stack_samples([random_tensor(rng, (2, 2)), random_tensor(rng, (2, 3))])


class TestDeflate:
    def test_exact_rank1_recovery(self, rng):
        xs = [sparse_unit(6, (1, 4), rng) for _ in range(3)]
        t = rank1_outer(xs, 3.0)
        model = deflate(t, 1, SparsityBudget((2, 2, 2)), init_alg="C")
        assert model.rank == 1
        assert model.residual_norm <= 1e-8 * frobenius_norm(t)
        assert model.terms[0].alpha == pytest.approx(3.0, abs=1e-8)

    def test_rank_must_be_positive(self, rng):
        with pytest.raises(BadK):
            deflate(random_tensor(rng, (2, 2, 2)), 0, SparsityBudget((1, 1, 1)))

    def test_residual_norm_strictly_decreasing(self, rng):
        samples, _ = gen_cluster_synthetic(8, 0.1, 0.5, seed=1)
        t = stack_samples(samples)
        budget = SparsityBudget((7, 7, 8))
        norms = [frobenius_norm(t)]
        for m in range(1, 5):
            model = deflate(t, m, budget, init_alg="D")
            norms.append(model.residual_norm)
        assert all(b < a for a, b in zip(norms, norms[1:]))

    def test_alpha_recomputable(self, rng):
        from sparse_rank1 import multilinear_value

        t = random_tensor(rng, (4, 4, 4))
        budget = SparsityBudget((2, 2, 2))
        model = deflate(t, 3, budget, init_alg="D")
        residual = t
        for term in model.terms:
            assert term.alpha == pytest.approx(
                multilinear_value(residual, list(term.factors)), abs=1e-10
            )
            residual = DenseTensor(
                residual.data - rank1_outer(list(term.factors), term.alpha).data,
                t.shape,
            )
        assert model.residual_norm == pytest.approx(frobenius_norm(residual), abs=1e-10)

    def test_random_init_deterministic(self, rng):
        t = random_tensor(rng, (4, 4, 4))
        budget = SparsityBudget((2, 2, 2))
        m1 = deflate(t, 2, budget, init_alg="random", seed=11)
        m2 = deflate(t, 2, budget, init_alg="random", seed=11)
        assert m1.residual_norm == m2.residual_norm
        for t1, t2 in zip(m1.terms, m2.terms):
            assert t1.alpha == t2.alpha


class TestReducedSamples:
    def test_single_term_layout(self, rng):
        from sparse_rank1.cluster import DeflationModel, Rank1Term
        from sparse_rank1 import SparseFactorSet

        e1 = np.zeros(4)
        e1[0] = 1.0
        factors = SparseFactorSet([np.ones(2) / np.sqrt(2), np.ones(2) / np.sqrt(2), e1])
        model = DeflationModel(
            (Rank1Term(factors, 2.0),), 0.5, SparsityBudget((2, 2, 4)), (2, 2, 4)
        )
        pts = reduced_samples(model)
        assert pts.shape == (4, 1)
        assert pts[0, 0] == pytest.approx(2.0)
        assert np.all(pts[1:, 0] == 0)

    def test_columns_are_weighted_sample_factors(self, rng):
        t = stack_samples([random_tensor(rng, (3, 3)) for _ in range(5)])
        model = deflate(t, 2, SparsityBudget((2, 2, 5)), init_alg="C")
        pts = reduced_samples(model)
        for m, term in enumerate(model.terms):
            np.testing.assert_allclose(pts[:, m], term.alpha * term.factors[-1])

    def test_column_entries_are_per_sample_contractions(self, rng):
        # alpha_m * x_{d}^m[i] equals the contraction of residual slice i
        # with the data-mode factors (two-sample case, checked directly)
        from sparse_rank1 import multilinear_value

        a, b = random_tensor(rng, (3, 3)), random_tensor(rng, (3, 3))
        t = stack_samples([a, b])
        model = deflate(t, 1, SparsityBudget((3, 3, 2)), init_alg="C")
        pts = reduced_samples(model)
        term = model.terms[0]
        for i, sample in enumerate((a, b)):
            slice_value = multilinear_value(sample, list(term.factors)[:2])
            assert pts[i, 0] == pytest.approx(slice_value, abs=1e-8)


class TestKmeans:
    def test_k1_all_same_label(self, rng):
        pts = rng.standard_normal((7, 2))
        out = kmeans(pts, 1, seed=0)
        assert out.labels == (1,) * 7

    def test_k_equals_n_zero_wcss(self, rng):
        pts = rng.standard_normal((5, 2)) * 10
        assignment, wcss = kmeans_with_wcss(pts, 5, seed=0)
        assert sorted(assignment.labels) == [1, 2, 3, 4, 5]
        assert wcss == pytest.approx(0.0, abs=1e-20)

    def test_two_far_blobs(self, rng):
        a = rng.normal(loc=10.0, scale=0.1, size=(8, 2))
        b = rng.normal(loc=-10.0, scale=0.1, size=(8, 2))
        pts = np.vstack([a, b])
        out = kmeans(pts, 2, seed=3)
        labels = np.asarray(out.labels)
        assert len(set(labels[:8])) == 1
        assert len(set(labels[8:])) == 1
        assert labels[0] != labels[-1]

    def test_deterministic_per_seed(self, rng):
        pts = rng.standard_normal((12, 3))
        a = kmeans(pts, 3, seed=9)
        b = kmeans(pts, 3, seed=9)
        assert a.labels == b.labels

    def test_bad_k(self, rng):
        with pytest.raises(BadK):
            kmeans(rng.standard_normal((3, 2)), 4, seed=0)

    def test_duplicate_points_fill_all_clusters(self):
        # repair must seed distinct points when several clusters are empty
        pts = np.ones((6, 2))
        assignment, wcss = kmeans_with_wcss(pts, 4, seed=0)
        assert len(set(assignment.labels)) == 4
        assert wcss == 0.0

    def test_wcss_nonincreasing_in_iterations(self, rng):
        # same seeding, growing iteration caps: Lloyd never increases WCSS
        pts = rng.standard_normal((30, 2))
        wcss = [
            kmeans_with_wcss(pts, 4, seed=2, restarts=1, max_iter=m)[1]
            for m in range(1, 12)
        ]
        assert all(b <= a + 1e-12 for a, b in zip(wcss, wcss[1:]))


class TestClusterError:
    def test_identical_assignments(self):
        a = ClusterAssignment((1, 1, 2, 2), 2)
        assert cluster_error(a, a) == 0.0

    def test_hand_counted_case(self):
        truth = ClusterAssignment((1, 1, 2, 2), 2)
        pred = ClusterAssignment((1, 2, 1, 2), 2)
        # pairs (0,1),(2,3) same in truth, split in pred; (0,2),(1,3)
        # split in truth, same in pred -> 4 of 6 disagree
        assert cluster_error(pred, truth) == pytest.approx(4 / 6)

    def test_relabeling_invariance(self, rng):
        labels = tuple(int(v) for v in rng.integers(1, 4, size=10))
        truth = ClusterAssignment(labels, 3)
        relabeled = ClusterAssignment(tuple({1: 3, 2: 1, 3: 2}[v] for v in labels), 3)
        assert cluster_error(relabeled, truth) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            cluster_error(ClusterAssignment((1, 1), 1), ClusterAssignment((1, 1, 1), 1))

    def test_bounded(self, rng):
        for _ in range(20):
            a = ClusterAssignment(tuple(int(v) for v in rng.integers(1, 4, size=9)), 3)
            b = ClusterAssignment(tuple(int(v) for v in rng.integers(1, 4, size=9)), 3)
            assert 0.0 <= cluster_error(a, b) <= 1.0


class TestBic:
    def test_empty_model_is_log_mean_square(self, rng):
        from sparse_rank1.cluster import DeflationModel

        t = random_tensor(rng, (2, 2, 4))
        model = DeflationModel((), frobenius_norm(t), SparsityBudget((2, 2, 4)), t.shape)
        score = bic(t, model)
        expected = np.log(frobenius_norm(t) ** 2 / t.size)
        assert score.value == pytest.approx(expected, abs=1e-12)

    def test_hand_computed_one_term(self, rng):
        from sparse_rank1.cluster import DeflationModel, Rank1Term
        from sparse_rank1 import SparseFactorSet

        t = random_tensor(rng, (2, 2, 2))
        factors = SparseFactorSet([
            np.array([1.0, 0.0]),
            np.array([0.0, 1.0]),
            np.array([1.0, 0.0]),
        ])
        alpha = 1.5
        model = DeflationModel(
            (Rank1Term(factors, alpha),), 0.0, SparsityBudget((1, 1, 2)), t.shape
        )
        resid2 = float(
            np.sum((t.data - rank1_outer(list(factors), alpha).data) ** 2)
        )
        expected = np.log(resid2 / 8) + np.log(8) / 8 * 3
        assert bic(t, model).value == pytest.approx(expected, abs=1e-12)

    def test_penalty_linear_in_sparsity(self, rng):
        # same residual, doubled support count -> BIC grows by exactly the
        # penalty increment
        from sparse_rank1.cluster import DeflationModel, Rank1Term
        from sparse_rank1 import SparseFactorSet

        t = random_tensor(rng, (2, 2, 2))
        sparse = SparseFactorSet(
            [np.array([1.0, 0.0]), np.array([1.0, 0.0]), np.array([1.0, 0.0])]
        )
        dense = SparseFactorSet(
            [np.ones(2) / np.sqrt(2), np.ones(2) / np.sqrt(2), np.ones(2) / np.sqrt(2)]
        )
        m1 = DeflationModel((Rank1Term(sparse, 0.0),), 0.0, SparsityBudget((2, 2, 2)), t.shape)
        m2 = DeflationModel((Rank1Term(dense, 0.0),), 0.0, SparsityBudget((2, 2, 2)), t.shape)
        gap = bic(t, m2).value - bic(t, m1).value
        assert gap == pytest.approx(np.log(8) / 8 * 3, abs=1e-12)

    def test_zero_residual_sentinel(self, rng):
        xs = [sparse_unit(3, (0, 1), rng) for _ in range(3)]
        t = rank1_outer(xs, 2.0)
        model = deflate(t, 1, SparsityBudget((2, 2, 2)), init_alg="C")
        score = bic(t, model)
        if model.residual_norm == 0.0:
            assert score.value == float("-inf")
        else:
            assert np.isfinite(score.value)


class TestSelectModel:
    def test_single_grid_point(self, rng):
        t = random_tensor(rng, (3, 3, 4))
        rank, budget, model, score = select_model(
            t, [2], [(2, 2, 4)], init_alg="D"
        )
        assert rank == 2
        assert tuple(budget) == (2, 2, 4)
        assert model.rank <= 2

    def test_planted_rank1_prefers_rank1(self, rng):
        xs = [sparse_unit(5, (0, 2), rng) for _ in range(3)]
        t = rank1_outer(xs, 4.0)
        rank, _, _, _ = select_model(t, [1, 2], [(2, 2, 5)], init_alg="C")
        assert rank == 1

    def test_paper_grids_run(self, rng):
        samples, _ = gen_cluster_synthetic(8, 0.1, 0.5, seed=0)
        t = stack_samples(samples)
        rank, budget, model, score = select_model(
            t, [4, 6], [(7, 7, 8), (8, 8, 8)], init_alg="D"
        )
        assert rank in (4, 6)
        assert tuple(budget) in ((7, 7, 8), (8, 8, 8))
        assert np.isfinite(score.value) or score.value == float("-inf")


class TestSelectK:
    def test_two_blobs(self, rng):
        a = rng.normal(loc=10.0, scale=0.1, size=(10, 2))
        b = rng.normal(loc=-10.0, scale=0.1, size=(10, 2))
        pts = np.vstack([a, b])
        assert select_k(pts, [1, 2, 3], seed=0) == 2

    def test_single_tight_blob(self, rng):
        pts = rng.normal(scale=0.05, size=(12, 2))
        assert select_k(pts, [1, 2], seed=0) == 1

    def test_identical_points_take_smallest(self):
        pts = np.ones((8, 3))
        assert select_k(pts, [2, 3, 4], seed=0) == 2

    def test_candidate_validation(self, rng):
        pts = rng.standard_normal((5, 2))
        with pytest.raises(BadK):
            select_k(pts, [2, 5], seed=0)  # max candidate must be < N
        with pytest.raises(BadK):
            select_k(pts, [3, 2], seed=0)


class TestPipeline:
    def test_two_identical_samples(self, rng):
        s = random_tensor(rng, (3, 3))
        cfg = StcConfig(rank_grid=(1,), budget_grid=((2, 2, 2),), fixed_k=1,
                        init_alg="C")
        pred, model, score = stc_pipeline([s, s], cfg)
        assert pred.labels == (1, 1)
        truth = ClusterAssignment((1, 1), 1)
        assert cluster_error(pred, truth) == 0.0

    def test_synthetic_low_noise_perfect(self):
        samples, truth = gen_cluster_synthetic(20, 0.1, 0.5, seed=0)
        cfg = StcConfig(init_alg="D", seed=0)
        pred, model, score = stc_pipeline(samples, cfg)
        assert cluster_error(pred, truth) == 0.0

    def test_synthetic_high_noise_small_error(self):
        samples, truth = gen_cluster_synthetic(20, 0.9, 0.5, seed=0)
        cfg = StcConfig(init_alg="D", seed=0)
        pred, _, _ = stc_pipeline(samples, cfg)
        assert cluster_error(pred, truth) <= 0.06

    def test_deterministic(self):
        samples, _ = gen_cluster_synthetic(8, 0.5, 0.5, seed=2)
        cfg = StcConfig(init_alg="C", seed=5, rank_grid=(4,))
        a = stc_pipeline(samples, cfg)
        b = stc_pipeline(samples, cfg)
        assert a[0].labels == b[0].labels
        assert a[2].value == b[2].value
