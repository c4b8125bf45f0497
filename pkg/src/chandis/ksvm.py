"""Kernel classifier over channel output states.

The kernel is the trace of the product of density operators raised to
the n-th power, which equals the plain trace kernel evaluated on n-fold
tensor copies; the power form is used so copies never have to be
materialized.  The dual problem

    max  sum_i t_i - 1/2 sum_ij t_i t_j y_i y_j K_ij
    s.t. sum_i t_i y_i = 0,  0 <= t_i <= C

is solved by SMO-style pairwise coordinate ascent: pick the most
violating pair, solve the two-variable subproblem in closed form, clip
to the box, repeat until the KKT gap closes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import channels as ch_mod, qcore
from .qcore import ContractError, DensityMatrix, ShapeError, ketbra, KET_PLUS

DEFAULT_C = 1e6          # effectively hard margin
KKT_TOL = 1e-6
MAX_PAIR_UPDATES = 10 ** 5
SUPPORT_EPS = 1e-8


def kernel(rho_i: DensityMatrix, rho_j: DensityMatrix, n: int = 1) -> float:
    """[Tr(rho_i rho_j)]^n."""
    if rho_i.dim != rho_j.dim:
        raise ShapeError("kernel needs equal dims")
    if n < 1:
        raise ContractError(f"n={n} must be >= 1")
    val = np.trace(rho_i.mat @ rho_j.mat)
    if abs(val.imag) > 1e-12:
        raise ContractError("kernel value has imaginary residue")
    return float(val.real) ** n


def gram(states, n: int = 1) -> np.ndarray:
    """Gram matrix of the power-trace kernel; symmetric and PSD."""
    mats = np.stack([s.mat for s in states])
    base = np.einsum("iab,jba->ij", mats, mats).real
    k = base ** n
    return 0.5 * (k + k.T)


@dataclass
class IntervalSpec:
    """Class regions: unions of (lo, hi, closed_hi) subintervals of [0, 1]."""
    neg: list
    pos: list

    def __post_init__(self):
        for region in (self.neg, self.pos):
            if not region:
                raise ContractError("empty class region")
            for lo, hi, _ in region:
                if not (0.0 <= lo < hi <= 1.0):
                    raise ContractError(f"bad subinterval [{lo}, {hi}]")

    def sample(self, label: int, rng: np.random.Generator) -> float:
        region = self.neg if label == -1 else self.pos
        lengths = np.array([hi - lo for lo, hi, _ in region])
        idx = rng.choice(len(region), p=lengths / lengths.sum())
        lo, hi, _ = region[idx]
        return float(rng.uniform(lo, hi))


def intervals_I(k: int) -> IntervalSpec:
    """The four interval pairs used for the depolarization-factor classes.

    The fourth set alternates four quarters of [0, 1] between the two
    classes; its positive region is the union of the 2nd and 4th
    quarters.
    """
    if k == 1:
        return IntervalSpec(neg=[(0.0, 0.5, False)], pos=[(0.5, 1.0, True)])
    if k == 2:
        return IntervalSpec(neg=[(0.1, 0.2, True)], pos=[(0.7, 0.9, True)])
    if k == 3:
        return IntervalSpec(neg=[(0.0, 0.75, True)], pos=[(0.25, 1.0, True)])
    if k == 4:
        return IntervalSpec(neg=[(0.0, 0.25, False), (0.5, 0.75, False)],
                            pos=[(0.25, 0.5, False), (0.75, 1.0, True)])
    raise ContractError(f"interval set index {k} not in 1..4")


@dataclass
class LabeledSet:
    states: list
    labels: np.ndarray        # +/-1
    alphas: np.ndarray
    input_policy: str
    seed: int | None = None


def make_interval_dataset(spec: IntervalSpec, input_policy: str, count: int,
                          rng: np.random.Generator) -> LabeledSet:
    """Sample (state, label) pairs: label by fair coin, alpha uniform over
    the class region (weighted by subinterval length), state is the
    depolarizing output of either the fixed |+> probe or a fresh random
    mixed state."""
    if input_policy not in ("plus", "random-mixed"):
        raise ContractError(f"unknown input policy {input_policy!r}")
    plus = DensityMatrix(ketbra(KET_PLUS, KET_PLUS), check=False)
    states, labels, alphas = [], [], []
    for _ in range(count):
        y = -1 if rng.random() < 0.5 else 1
        alpha = spec.sample(y, rng)
        rho_in = plus if input_policy == "plus" \
            else qcore.random_mixed_state(2, rng)
        states.append(ch_mod.apply(ch_mod.depolarizing(alpha), rho_in))
        labels.append(y)
        alphas.append(alpha)
    return LabeledSet(states=states, labels=np.array(labels),
                      alphas=np.array(alphas), input_policy=input_policy)


@dataclass
class SmoResult:
    theta: np.ndarray
    converged: bool
    iterations: int
    kkt_gap: float


def solve_dual(K: np.ndarray, y: np.ndarray, C: float = DEFAULT_C,
               tol: float = KKT_TOL,
               max_updates: int = MAX_PAIR_UPDATES) -> SmoResult:
    """SMO pairwise ascent on the dual from the feasible start theta = 0.

    Pair selection follows the maximal-violation rule on the gradient of
    the objective; non-convergence within the update budget is reported,
    not raised (hard-margin infeasible data is a legitimate input).
    """
    y = np.asarray(y, dtype=float)
    if not np.all(np.abs(y) == 1):
        raise ContractError("labels must be +/-1")
    if np.all(y == y[0]):
        raise ContractError("need both classes present")
    n = len(y)
    theta = np.zeros(n)
    # grad_i of the objective: 1 - y_i sum_j theta_j y_j K_ij.
    grad = np.ones(n)
    kkt_gap = np.inf
    it = 0
    for it in range(1, max_updates + 1):
        # The feasible pair move is theta_i += y_i t, theta_j -= y_j t
        # (t > 0), which changes the objective by t (f_i - f_j) to first
        # order, where f = y * grad.  "up"/"down" are the index sets
        # where the respective move stays inside the box.
        f = y * grad
        up = ((y > 0) & (theta < C)) | ((y < 0) & (theta > 0))
        down = ((y < 0) & (theta < C)) | ((y > 0) & (theta > 0))
        if not up.any() or not down.any():
            return SmoResult(theta, True, it, 0.0)
        i = int(np.flatnonzero(up)[np.argmax(f[up])])
        j = int(np.flatnonzero(down)[np.argmin(f[down])])
        kkt_gap = f[i] - f[j]
        if kkt_gap < tol:
            return SmoResult(theta, True, it, kkt_gap)
        # In v = theta*y coordinates the move is v_i += t, v_j -= t, so
        # the curvature along it is K_ii + K_jj - 2 K_ij.
        quad = max(K[i, i] + K[j, j] - 2 * K[i, j], 1e-15)
        t = kkt_gap / quad
        t = min(t,
                (C - theta[i]) if y[i] > 0 else theta[i],
                (C - theta[j]) if y[j] < 0 else theta[j])
        theta[i] += y[i] * t
        theta[j] -= y[j] * t
        grad -= y * t * (K[:, i] - K[:, j])
    return SmoResult(theta, False, it, kkt_gap)


def bias(theta: np.ndarray, K: np.ndarray, y: np.ndarray,
         C: float = DEFAULT_C) -> float:
    """Bias from the support-vector margin conditions, averaged over all
    free support vectors for numerical robustness."""
    y = np.asarray(y, dtype=float)
    sv = theta > SUPPORT_EPS
    if not sv.any():
        raise ContractError("no support vectors")
    free = sv & (theta < C - SUPPORT_EPS)
    use = free if free.any() else sv
    margins = K[:, use].T @ (theta * y)
    return float((margins - y[use]).mean())


@dataclass
class KernelModel:
    support_states: list
    support_labels: np.ndarray
    theta: np.ndarray
    b: float
    n: int = 1
    converged: bool = True
    train_info: dict = field(default_factory=dict)


def fit(train_set: LabeledSet, n: int = 1, C: float = DEFAULT_C) -> KernelModel:
    """Train on a labeled set: Gram, SMO, bias; keep support vectors."""
    K = gram(train_set.states, n)
    res = solve_dual(K, train_set.labels, C=C)
    b = bias(res.theta, K, train_set.labels, C=C)
    sv = res.theta > SUPPORT_EPS
    return KernelModel(
        support_states=[s for s, keep in zip(train_set.states, sv) if keep],
        support_labels=train_set.labels[sv],
        theta=res.theta[sv], b=b, n=n, converged=res.converged,
        train_info={"iterations": res.iterations, "kkt_gap": res.kkt_gap})


def predict(model: KernelModel, rho: DensityMatrix) -> float:
    """Signed prediction score; the label is its sign (0 breaks to +1)."""
    ks = np.array([kernel(s, rho, model.n) for s in model.support_states])
    # Score convention: y_i (k - margin): p = sum theta_i y_i K(.) - b
    return float((model.theta * model.support_labels) @ ks - model.b)


def predict_label(model: KernelModel, rho: DensityMatrix) -> int:
    return 1 if predict(model, rho) >= 0 else -1


def evaluate(model: KernelModel, test_set: LabeledSet) -> float:
    correct = sum(predict_label(model, s) == yl
                  for s, yl in zip(test_set.states, test_set.labels))
    return correct / len(test_set.labels)


def run_experiment(spec: IntervalSpec, input_policy: str = "plus",
                   n_copies: int = 1, n_train: int = 100, n_test: int = 1000,
                   seed: int = 0, C: float = DEFAULT_C) -> dict:
    """Full train/test cycle; returns the summary plus per-item records."""
    t0 = time.time()
    rng_train = np.random.default_rng(np.random.SeedSequence([seed, 0]))
    rng_test = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    train_set = make_interval_dataset(spec, input_policy, n_train, rng_train)
    test_set = make_interval_dataset(spec, input_policy, n_test, rng_test)
    model = fit(train_set, n=n_copies, C=C)
    records = []
    correct = 0
    for s, yl, alpha in zip(test_set.states, test_set.labels, test_set.alphas):
        score = predict(model, s)
        pred = 1 if score >= 0 else -1
        correct += pred == yl
        records.append({"alpha": alpha, "true_label": int(yl),
                        "score": score, "pred_label": pred})
    return {"accuracy": correct / n_test, "model": model, "records": records,
            "n_support": len(model.theta), "converged": model.converged,
            "seconds": time.time() - t0}
