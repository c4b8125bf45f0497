"""End-to-end acceptance gate.

One test per headline criterion; each asserts the stated numeric target
at its stated tolerance.  These are slower than the unit suites (several
minutes in total).

Known failure, kept deliberately: criterion 3b (parallel p=2, l=5, r=0 on
the entanglement-breaking pair reaching 0.975).  With no ancilla and the
fixed half-space projective readout, the best rank-2-projector
measurement attains exactly 0.96483 — verified by an independent
brute-force optimization over input states and projectors — while 0.9771
requires a rank-1 measurement this pipeline cannot express.  The
threshold is asserted as stated rather than weakened.
"""

import time

import numpy as np
import pytest

from chandis import analysis, ksvm, vclass
from chandis.channels import (
    apply, choi, depolarizing, eb_channel_A, eb_channel_B, identity_channel,
    tensor_channels,
)
from chandis.diamond import p_diamond
from chandis.qcore import bloch_vector, random_mixed_state
from chandis.vardisc import StrategySpec, train


EB = (eb_channel_A(), eb_channel_B())


def test_criterion_1_diamond_eb_baselines():
    t0 = time.time()
    rng = np.random.default_rng(0)
    p1 = p_diamond(*EB, p=1, restarts=20, rng=rng)
    p2 = p_diamond(*EB, p=2, restarts=20, rng=rng)
    assert abs(p1 - 0.9268) < 1e-3
    assert abs(p2 - 0.9771) < 1e-3
    assert time.time() - t0 < 300


def test_criterion_2_depolarizing_baseline_and_symmetry():
    rng = np.random.default_rng(0)
    lo = p_diamond(depolarizing(0.0), depolarizing(0.1), p=2, restarts=20,
                   rng=rng)
    hi = p_diamond(depolarizing(0.9), depolarizing(1.0), p=2, restarts=20,
                   rng=rng)
    assert abs(lo - 0.595) < 5e-3
    assert abs(lo - hi) < 5e-3


def test_criterion_3a_eb_sequential_training():
    t0 = time.time()
    spec = StrategySpec("sequential", p=2, r=0, l=1, restarts=10, seed=0)
    report = train(*EB, spec)
    assert report.best_value >= 0.999
    assert time.time() - t0 < 600


def test_criterion_3b_eb_parallel_training():
    # Expected to fail: see the module docstring.  The training itself is
    # converged to ~9 digits; the ceiling is the measurement class.
    t0 = time.time()
    spec = StrategySpec("parallel", p=2, r=0, l=5, restarts=10, seed=0)
    report = train(*EB, spec)
    assert time.time() - t0 < 600
    assert report.best_value >= 0.975


def test_criterion_3c_eb_single_use_training():
    t0 = time.time()
    spec = StrategySpec("parallel", p=1, r=0, l=1, restarts=10, seed=0)
    report = train(*EB, spec)
    assert abs(report.best_value - 0.9268) < 5e-3
    assert time.time() - t0 < 600


def test_criterion_4_depolarizing_sweep_desk_scale():
    pairs = ((0.0, 0.1), (0.9, 1.0))
    bounds = {}
    rng = np.random.default_rng(0)
    for a0, a1 in pairs:
        bounds[(a0, a1)] = p_diamond(depolarizing(a0), depolarizing(a1),
                                     p=2, restarts=10, rng=rng)

    seq_gaps, par_gaps = [], []
    for a0, a1 in pairs:
        spec = StrategySpec("sequential", p=2, r=4, l=14, restarts=1,
                            seed=0, max_iters=500)
        rep = train(depolarizing(a0), depolarizing(a1), spec)
        seq_gaps.append(bounds[(a0, a1)] - rep.best_value)
    for a0, a1 in pairs:
        spec = StrategySpec("parallel", p=2, r=3, l=14, restarts=1,
                            seed=0, max_iters=500)
        rep = train(depolarizing(a0), depolarizing(a1), spec)
        par_gaps.append(bounds[(a0, a1)] - rep.best_value)

    # Sequential at l=14 on 5 qubits reaches the bound on both pairs.
    assert all(gap <= 0.01 for gap in seq_gaps)
    # Parallel at the same depth falls short on at least one pair
    # (qualitative: a clearly larger shortfall than sequential's).
    assert max(par_gaps) > 1e-3
    assert max(par_gaps) > 10 * max(seq_gaps)


def test_criterion_5_variational_classifier():
    out = vclass.run_cell("U2", 0.1, 0.9, n_train=1000, n_test=1000,
                          rng=np.random.default_rng(0), restarts=5)
    assert out["test_acc"] >= 0.95

    chance = vclass.run_cell("U2", 0.5, 0.5, n_train=1000, n_test=1000,
                             rng=np.random.default_rng(1), restarts=5)
    assert 0.45 <= chance["test_acc"] <= 0.55

    accs = {}
    for alpha in (0.6, 0.7, 0.8, 0.9):
        out = vclass.run_cell("U3", 0.0, alpha, n_train=1000, n_test=1000,
                              rng=np.random.default_rng(2), restarts=5)
        accs[alpha] = out["test_acc"]
    assert max(accs, key=accs.get) in (0.7, 0.8)


def test_criterion_6_kernel_classifier():
    i2 = ksvm.run_experiment(ksvm.intervals_I(2), "plus", 1, n_train=100,
                             n_test=1000, seed=5)
    assert i2["accuracy"] >= 0.98

    i1 = ksvm.run_experiment(ksvm.intervals_I(1), "plus", 1, n_train=100,
                             n_test=1000, seed=5)
    assert i1["accuracy"] >= 0.95

    i4_1 = ksvm.run_experiment(ksvm.intervals_I(4), "plus", 1, n_train=100,
                               n_test=1000, seed=5)
    i4_3 = ksvm.run_experiment(ksvm.intervals_I(4), "plus", 3, n_train=100,
                               n_test=1000, seed=5)
    assert i4_1["accuracy"] <= 0.75
    assert i4_3["accuracy"] >= 0.90

    mixed = {n: ksvm.run_experiment(ksvm.intervals_I(1), "random-mixed", n,
                                    n_train=100, n_test=1000, seed=9)
             for n in (1, 2)}
    assert mixed[1]["accuracy"] <= 0.75          # single copy degraded
    assert mixed[2]["accuracy"] >= mixed[1]["accuracy"] + 0.05


def test_criterion_7_analytic_oracles():
    rng = np.random.default_rng(0)
    # trace_product closed form on 10^3 cases.
    for _ in range(1000):
        rho = random_mixed_state(2, rng)
        r2 = float(np.dot(bloch_vector(rho), bloch_vector(rho)))
        a, b = rng.uniform(0, 1, 2)
        expect = 0.5 * (1 + (1 - 4 * a / 3) * (1 - 4 * b / 3) * r2)
        assert abs(analysis.trace_product(rho, a, b) - expect) < 1e-12
    # extremum location.
    for eps in (0.0, 0.05, 0.1, 0.2):
        assert abs(analysis.trace_product_extremum(eps)
                   - (0.75 - eps / 2)) <= 1e-3
    # fully depolarizing fixed point on 100 states.
    dep34 = depolarizing(0.75)
    for _ in range(100):
        out = apply(dep34, random_mixed_state(2, rng))
        assert np.abs(out.mat - np.eye(2) / 2).max() < 1e-12
    # constructed channels pass CPTP checks.
    for ch in (identity_channel(2), depolarizing(0.3), *EB,
               tensor_channels(depolarizing(0.6), 2)):
        ch.validate()
        assert np.linalg.eigvalsh(choi(ch)).min() > -1e-9
    # Gram PSD on random state sets.
    for _ in range(20):
        states = [random_mixed_state(2, rng) for _ in range(8)]
        assert np.linalg.eigvalsh(ksvm.gram(states, 2)).min() > -1e-10
    # SMO: KKT residual and brute-force dual match on 6-point instances.
    from test_ksvm import brute_force_dual, dual_objective
    for _ in range(2):
        states = [random_mixed_state(2, rng) for _ in range(6)]
        K = ksvm.gram(states, 1)
        y = np.array([1, 1, 1, -1, -1, -1])
        res = ksvm.solve_dual(K, y, C=2.0)
        assert res.converged and res.kkt_gap < 1e-6
        ref, _ = brute_force_dual(K, y, 2.0)
        assert dual_objective(res.theta, K, y) >= ref - 1e-4
    # parameter-shift vs finite differences.
    from chandis.ansatz import gradient, hea, unitary
    from chandis.qcore import basis_ket
    c = hea(3, 2)
    obs = np.diag(rng.uniform(-1, 1, 8)).astype(complex)
    ket = basis_ket(8, 0)

    def objective(th):
        v = unitary(c, th) @ ket
        return float((v.conj() @ obs @ v).real)

    th = rng.uniform(0, 2 * np.pi, c.param_count)
    shift = gradient(objective, th, circuit=c)
    fd = gradient(objective, th, circuit=None)
    assert np.abs(shift - fd).max() < 1e-6


def test_criterion_8_correlation_trend():
    res = analysis.correlation_study(runs=3, seed=1)
    corr = res["corr_trace"]
    layers = res["layers"]
    # Nonincreasing along the depth grid (within numeric slack), with a
    # clear overall decrease from the shallowest to the deepest circuit.
    for a, b in zip(layers, layers[1:]):
        assert corr[b] <= corr[a] + 5e-3
    assert corr[layers[0]] - corr[layers[-1]] >= 0.02
