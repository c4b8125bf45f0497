import itertools

import numpy as np
import pytest

from chandis import ksvm
from chandis.channels import apply, depolarizing
from chandis.ksvm import (
    IntervalSpec, LabeledSet, bias, evaluate, fit, gram, intervals_I,
    kernel, make_interval_dataset, predict, predict_label, solve_dual,
)
from chandis.qcore import (
    ContractError, DensityMatrix, ketbra, random_mixed_state,
    KET0, KET1, KET_PLUS,
)


def dm(vec):
    return DensityMatrix(ketbra(vec, vec))


class TestKernel:
    def test_pure_self_overlap(self):
        assert np.isclose(kernel(dm(KET_PLUS), dm(KET_PLUS), 1), 1.0)

    def test_orthogonal_states(self):
        for n in (1, 2, 3):
            assert np.isclose(kernel(dm(KET0), dm(KET1), n), 0.0)

    def test_depolarized_closed_form(self):
        rho = dm(KET_PLUS)
        for a, b, n in ((0.1, 0.3, 1), (0.2, 0.9, 2), (0.5, 0.6, 3)):
            ra = apply(depolarizing(a), rho)
            rb = apply(depolarizing(b), rho)
            expect = (0.5 * (1 + (1 - 4 * a / 3) * (1 - 4 * b / 3))) ** n
            assert np.isclose(kernel(ra, rb, n), expect, atol=1e-12)

    def test_power_is_single_copy_power(self):
        rng = np.random.default_rng(0)
        ra, rb = (random_mixed_state(2, rng) for _ in range(2))
        k1 = kernel(ra, rb, 1)
        for n in (2, 3):
            assert np.isclose(kernel(ra, rb, n), k1 ** n, atol=1e-12)


class TestGram:
    def test_identical_pure_states_all_ones(self):
        states = [dm(KET_PLUS)] * 4
        assert np.allclose(gram(states, 1), np.ones((4, 4)))

    def test_psd_on_random_sets(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            states = [random_mixed_state(2, rng) for _ in range(6)]
            k = gram(states, n=int(rng.integers(1, 4)))
            assert np.linalg.eigvalsh(k).min() > -1e-10

    def test_diagonal_is_purity_power(self):
        rng = np.random.default_rng(2)
        states = [random_mixed_state(2, rng) for _ in range(5)]
        k = gram(states, 2)
        for i, s in enumerate(states):
            purity = float(np.trace(s.mat @ s.mat).real)
            assert np.isclose(k[i, i], purity ** 2)
            assert k[i, i] <= 1 + 1e-12


class TestIntervals:
    def test_i1_negative_below_half(self):
        spec = intervals_I(1)
        rng = np.random.default_rng(3)
        assert all(spec.sample(-1, rng) < 0.5 for _ in range(200))
        assert all(spec.sample(1, rng) >= 0.5 for _ in range(200))

    def test_i2_disjoint(self):
        spec = intervals_I(2)
        rng = np.random.default_rng(4)
        for _ in range(200):
            assert 0.1 <= spec.sample(-1, rng) <= 0.2
            assert 0.7 <= spec.sample(1, rng) <= 0.9

    def test_i3_overlap_region(self):
        spec = intervals_I(3)
        lo_n, hi_n = spec.neg[0][0], spec.neg[0][1]
        lo_p, hi_p = spec.pos[0][0], spec.pos[0][1]
        assert (max(lo_n, lo_p), min(hi_n, hi_p)) == (0.25, 0.75)

    def test_i4_quarters(self):
        spec = intervals_I(4)
        rng = np.random.default_rng(5)
        for _ in range(300):
            a = spec.sample(-1, rng)
            assert (0 <= a < 0.25) or (0.5 <= a < 0.75)
            b = spec.sample(1, rng)
            assert (0.25 <= b < 0.5) or (0.75 <= b <= 1.0)

    def test_bad_index(self):
        with pytest.raises(ContractError):
            intervals_I(5)


def brute_force_dual(K, y, C, steps=9):
    """Dense grid search over the dual with the equality constraint
    eliminated by solving for the last coordinate."""
    n = len(y)
    best, best_theta = -np.inf, None
    axes = [np.linspace(0, C, steps)] * (n - 1)
    for partial in itertools.product(*axes):
        partial = np.array(partial)
        # sum theta_i y_i = 0 -> theta_last fixed.
        last = -y[-1] * (partial * y[:-1]).sum()
        if last < -1e-12 or last > C + 1e-12:
            continue
        theta = np.append(partial, min(max(last, 0.0), C))
        v = theta.sum() - 0.5 * (theta * y) @ K @ (theta * y)
        if v > best:
            best, best_theta = v, theta
    return best, best_theta


def dual_objective(theta, K, y):
    return theta.sum() - 0.5 * (theta * y) @ K @ (theta * y)


class TestSolveDual:
    def test_two_orthogonal_points(self):
        K = np.eye(2)
        y = np.array([1, -1])
        res = solve_dual(K, y)
        assert res.converged
        assert np.allclose(res.theta, [1.0, 1.0], atol=1e-6)

    def test_contradictory_points_report_nonconvergence(self):
        # Same state, opposite labels: hard margin infeasible.
        K = np.ones((2, 2))
        y = np.array([1, -1])
        res = solve_dual(K, y, C=np.inf, max_updates=2000)
        assert not res.converged
        capped = solve_dual(K, y, C=1.0, max_updates=2000)
        assert capped.converged

    def test_single_class_rejected(self):
        with pytest.raises(ContractError):
            solve_dual(np.eye(3), np.array([1, 1, 1]))

    def test_matches_brute_force_on_six_points(self):
        rng = np.random.default_rng(6)
        for trial in range(3):
            states = [random_mixed_state(2, rng) for _ in range(6)]
            K = gram(states, 1)
            y = np.array([1, 1, 1, -1, -1, -1])
            C = 2.0
            res = solve_dual(K, y, C=C)
            assert res.converged
            ours = dual_objective(res.theta, K, y)
            ref, _ = brute_force_dual(K, y, C)
            assert ours >= ref - 1e-4

    def test_kkt_gap_small_on_convergence(self):
        rng = np.random.default_rng(7)
        states = [random_mixed_state(2, rng) for _ in range(8)]
        K = gram(states, 1)
        y = np.array([1, -1] * 4)
        res = solve_dual(K, y, C=5.0)
        assert res.converged
        assert res.kkt_gap < 1e-6


class TestBiasPredict:
    def test_symmetric_two_point_bias_zero(self):
        K = np.eye(2)
        y = np.array([1, -1])
        res = solve_dual(K, y)
        assert abs(bias(res.theta, K, y)) < 1e-9

    def test_support_vectors_classified_correctly(self):
        rng = np.random.default_rng(8)
        spec = intervals_I(2)
        train_set = make_interval_dataset(spec, "plus", 40, rng)
        model = fit(train_set, n=1)
        assert model.converged
        for s, yl in zip(model.support_states, model.support_labels):
            assert predict_label(model, s) == yl

    def test_score_affine_in_kernel_column(self):
        rng = np.random.default_rng(9)
        spec = intervals_I(2)
        train_set = make_interval_dataset(spec, "plus", 30, rng)
        model = fit(train_set, n=1)
        probe = random_mixed_state(2, rng)
        ks = np.array([kernel(s, probe, 1) for s in model.support_states])
        manual = float((model.theta * model.support_labels) @ ks - model.b)
        assert np.isclose(predict(model, probe), manual)


class TestDatasets:
    def test_interval_dataset_sizes_and_alphas(self):
        rng = np.random.default_rng(10)
        ds = make_interval_dataset(intervals_I(1), "plus", 50, rng)
        assert len(ds.states) == 50
        for a, yl in zip(ds.alphas, ds.labels):
            assert (a < 0.5) == (yl == -1)

    def test_random_mixed_policy(self):
        rng = np.random.default_rng(11)
        ds = make_interval_dataset(intervals_I(1), "random-mixed", 20, rng)
        purities = [float(np.trace(s.mat @ s.mat).real) for s in ds.states]
        assert any(p < 0.98 for p in purities)

    def test_bad_policy(self):
        with pytest.raises(ContractError):
            make_interval_dataset(intervals_I(1), "bell", 5,
                                  np.random.default_rng(12))


class TestEndToEnd:
    def test_separated_intervals_generalize(self):
        out = ksvm.run_experiment(intervals_I(2), "plus", 1, n_train=40,
                                  n_test=150, seed=5)
        assert out["accuracy"] >= 0.95
        assert out["converged"]
        assert len(out["records"]) == 150
        for rec in out["records"][:5]:
            assert set(rec) == {"alpha", "true_label", "score", "pred_label"}

    def test_determinism(self):
        a = ksvm.run_experiment(intervals_I(1), "plus", 1, n_train=30,
                                n_test=50, seed=3)
        b = ksvm.run_experiment(intervals_I(1), "plus", 1, n_train=30,
                                n_test=50, seed=3)
        assert a["accuracy"] == b["accuracy"]
        assert [r["score"] for r in a["records"]] \
            == [r["score"] for r in b["records"]]
