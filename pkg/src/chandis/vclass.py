"""Variational binary classifier of depolarizing channels.

The dataset pairs a channel output with (optionally) the untouched
original state; prediction is a rescaled Pauli-Z correlation after a
small trainable circuit; training minimizes the least-squares distance
between predictions and 0/1 labels, followed by a threshold scan on the
training predictions.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import ansatz, channels as ch_mod, qcore
from .qcore import ContractError, DensityMatrix, ShapeError, SZ

ANSATZE = {
    "U1": (ansatz.u1_circuit, "paired"),
    "U2": (ansatz.u2_circuit, "paired"),
    "U3": (ansatz.u3_circuit, "output_only"),
}

DEFAULT_RESTARTS = 5
ZZ = np.kron(SZ, SZ)


@dataclass
class ClassifierDataset:
    items: list                       # (DensityMatrix, 0|1) pairs
    pairing: str                      # "paired" | "output_only"
    alpha0: float
    alpha1: float
    seed: int | None = None

    def states(self) -> np.ndarray:
        return np.stack([s.mat for s, _ in self.items])

    def labels(self) -> np.ndarray:
        return np.array([y for _, y in self.items])


@dataclass
class TrainedClassifier:
    ansatz_id: str
    theta: np.ndarray
    b: float
    train_accuracy: float = 0.0
    history: list = field(default_factory=list)


def make_dataset(alpha0: float, alpha1: float, n: int, pairing: str,
                 rng: np.random.Generator) -> ClassifierDataset:
    """Draw n labeled items: y is a fair coin, the input state is
    Hilbert-Schmidt random, and the item is Phi(alpha_y)[rho] (x) rho
    (paired) or just Phi(alpha_y)[rho] (output_only)."""
    if pairing not in ("paired", "output_only"):
        raise ContractError(f"unknown pairing {pairing!r}")
    chans = {0: ch_mod.depolarizing(alpha0), 1: ch_mod.depolarizing(alpha1)}
    items = []
    for _ in range(n):
        y = int(rng.integers(0, 2))
        rho = qcore.random_mixed_state(2, rng)
        out = ch_mod.apply(chans[y], rho)
        if pairing == "paired":
            state = DensityMatrix(qcore.tensor(out.mat, rho.mat), check=False)
        else:
            state = out
        items.append((state, y))
    return ClassifierDataset(items=items, pairing=pairing,
                             alpha0=alpha0, alpha1=alpha1)


def _observable(dim: int) -> np.ndarray:
    if dim == 4:
        return ZZ
    if dim == 2:
        return SZ
    raise ShapeError(f"no classifier observable for dim {dim}")


def _predict_batch(circuit, theta, states: np.ndarray) -> np.ndarray:
    """Vectorized 1/2 (1 + <obs>) over a stack of density matrices."""
    u = ansatz.unitary(circuit, theta)
    eff = u.conj().T @ _observable(u.shape[0]) @ u
    vals = np.einsum("ab,nba->n", eff, states).real
    return 0.5 * (1.0 + vals)


def predict_value(clf: TrainedClassifier, state: DensityMatrix) -> float:
    """Prediction value in [0, 1] for one state."""
    circuit = ANSATZE[clf.ansatz_id][0]()
    if state.dim != 2 ** circuit.qubits:
        raise ShapeError(
            f"state dim {state.dim} does not match ansatz {clf.ansatz_id}")
    return float(_predict_batch(circuit, clf.theta, state.mat[None])[0])


def find_threshold(predictions, labels) -> tuple[float, float]:
    """Scan all cut positions on the sorted predictions.

    Items with prediction <= b are assigned class 0.  Returns (b,
    training accuracy); ties break toward the smallest cut.  The
    all-class-1 cut is represented by a b just below the smallest
    prediction, clamped inside (0, 1).
    """
    predictions = np.asarray(predictions, dtype=float)
    if not np.isfinite(predictions).all():
        raise ContractError("non-finite predictions")
    labels = np.asarray(labels)
    order = np.argsort(predictions, kind="stable")
    p_sorted = predictions[order]
    y_sorted = labels[order]
    n = len(p_sorted)
    # correct(t) = (# of label-0 among first t) + (# of label-1 among rest)
    zeros_prefix = np.concatenate([[0], np.cumsum(y_sorted == 0)])
    ones_suffix = (y_sorted == 1).sum() - np.concatenate(
        [[0], np.cumsum(y_sorted == 1)])
    correct = zeros_prefix + ones_suffix
    t_best = int(np.argmax(correct))
    if t_best == 0:
        b = min(max(p_sorted[0] - 1e-9, 1e-12), 1.0 - 1e-12)
    else:
        b = float(np.clip(p_sorted[t_best - 1], 1e-12, 1.0 - 1e-12))
    return b, float(correct[t_best]) / n


def train_classifier(ansatz_id: str, dataset: ClassifierDataset,
                     restarts: int = DEFAULT_RESTARTS,
                     seed: int = 0) -> TrainedClassifier:
    """Least-squares training with multi-restart L-BFGS-B, then the
    threshold scan on the training predictions."""
    if ansatz_id not in ANSATZE:
        raise ContractError(f"unknown ansatz {ansatz_id!r}")
    circuit_fn, needed = ANSATZE[ansatz_id]
    if dataset.pairing != needed:
        raise ContractError(
            f"ansatz {ansatz_id} needs {needed} data, got {dataset.pairing}")
    circuit = circuit_fn()
    states = dataset.states()
    labels = dataset.labels().astype(float)

    def loss(theta):
        return float(((labels - _predict_batch(circuit, theta, states)) ** 2)
                     .sum())

    history = []
    best_val, best_theta = np.inf, None
    for i in range(restarts):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        theta0 = rng.uniform(0, 2 * np.pi, circuit.param_count)
        res = minimize(loss, theta0, method="L-BFGS-B")
        history.append(float(res.fun))
        if res.fun < best_val:
            best_val, best_theta = float(res.fun), res.x

    preds = _predict_batch(circuit, best_theta, states)
    b, acc = find_threshold(preds, labels.astype(int))
    return TrainedClassifier(ansatz_id=ansatz_id, theta=best_theta, b=b,
                             train_accuracy=acc, history=history)


def evaluate(clf: TrainedClassifier, testset: ClassifierDataset) -> float:
    """Fraction of test items labeled correctly by the p <= b rule."""
    circuit = ANSATZE[clf.ansatz_id][0]()
    preds = _predict_batch(circuit, clf.theta, testset.states())
    guesses = (preds > clf.b).astype(int)
    return float((guesses == testset.labels()).mean())


def run_cell(ansatz_id: str, alpha0: float, alpha1: float, n_train: int,
             n_test: int, rng: np.random.Generator,
             restarts: int = DEFAULT_RESTARTS) -> dict:
    """Train and test one (alpha0, alpha1) cell; returns a summary row."""
    t0 = time.time()
    pairing = ANSATZE[ansatz_id][1]
    train_set = make_dataset(alpha0, alpha1, n_train, pairing, rng)
    test_set = make_dataset(alpha0, alpha1, n_test, pairing, rng)
    clf = train_classifier(ansatz_id, train_set, restarts=restarts)
    return {"ansatz": ansatz_id, "alpha0": alpha0, "alpha1": alpha1,
            "train_acc": clf.train_accuracy,
            "test_acc": evaluate(clf, test_set),
            "b": clf.b, "seconds": time.time() - t0}


def accuracy_heatmap(ansatz_id: str, alpha_grid, n_train: int, n_test: int,
                     seed: int = 0, restarts: int = DEFAULT_RESTARTS):
    """Test accuracy over an (alpha0, alpha1) grid.

    Cell RNG streams are keyed by (seed, i, j) so the grid is
    deterministic and cells are order independent.
    """
    alpha_grid = list(alpha_grid)
    m = len(alpha_grid)
    out = np.zeros((m, m))
    for i, a0 in enumerate(alpha_grid):
        for j, a1 in enumerate(alpha_grid):
            rng = np.random.default_rng(np.random.SeedSequence([seed, i, j]))
            out[i, j] = run_cell(ansatz_id, a0, a1, n_train, n_test, rng,
                                 restarts=restarts)["test_acc"]
    return out
