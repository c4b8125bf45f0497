"""Variational parallel and sequential channel discrimination.

A strategy is compiled to a pipeline of stages: parameterized unitary
blocks (hardware-efficient ansatz), fixed channel applications, and, for
dimension-shrinking channels, fresh |0> qubit insertions.  The success
probability

    1/2 [ Tr(Pi_0 rho_out(theta, Phi_0)) + Tr(Pi_1 rho_out(theta, Phi_1)) ]

is maximized with multi-restart L-BFGS-B.  Gradients are exact: each
unitary block is differentiated by a forward/backward sweep over its
gates (the generator of exp(-i theta sigma) is -i sigma), and channel /
insertion stages are pulled through in the Heisenberg picture.  Tests
cross-check this against the parameter-shift rule from the ansatz
module.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import ansatz, channels as ch_mod
from .ansatz import ParamCircuit, _PAULI, _embed_1q, gate_matrix
from .channels import KrausChannel
from .qcore import ContractError, DensityMatrix, ShapeError

log = logging.getLogger(__name__)

DEFAULT_RESTARTS = 10
MAX_ITERS = 2000
FTOL = 1e-9
GTOL = 1e-7


@dataclass(frozen=True)
class StrategySpec:
    strategy: str              # "parallel" | "sequential"
    p: int = 1
    r: int = 0
    l: int = 1
    restarts: int = DEFAULT_RESTARTS
    seed: int = 0
    max_iters: int = MAX_ITERS

    def __post_init__(self):
        if self.strategy not in ("parallel", "sequential"):
            raise ContractError(f"unknown strategy {self.strategy!r}")
        if self.p < 1 or self.r < 0 or self.l < 1:
            raise ContractError("need p >= 1, r >= 0, l >= 1")


@dataclass
class Povm:
    elements: list

    def validate(self):
        acc = sum(self.elements)
        if np.abs(acc - np.eye(acc.shape[0])).max() > 1e-10:
            raise ContractError("POVM elements do not sum to identity")
        for e in self.elements:
            if np.linalg.eigvalsh(e).min() < -1e-9:
                raise ContractError("POVM element is not PSD")


@dataclass
class TrainReport:
    best_value: float
    best_params: np.ndarray
    history: list
    per_restart: list
    wall_time: float
    seed: int
    alpha_pair: tuple | None = None


def povm_half(dim: int) -> Povm:
    """Computational-basis half split: Pi_0 on the first dim/2 kets."""
    if dim % 2 != 0:
        raise ContractError(f"povm_half needs even dim, got {dim}")
    pi0 = np.zeros((dim, dim), dtype=complex)
    pi0[range(dim // 2), range(dim // 2)] = 1.0
    return Povm(elements=[pi0, np.eye(dim) - pi0])


def _qubits_of(dim: int) -> int:
    q = int(round(math.log2(dim)))
    if 2 ** q != dim:
        raise ShapeError(f"dimension {dim} is not a power of 2")
    return q


# A pipeline is a list of stages:
#   ("U", circuit, slot_lo, slot_hi) - parameterized unitary block
#   ("CH", kraus_list)               - fixed channel application
#   ("FRESH",)                       - prepend a fresh |0> qubit


def build_pipeline(spec: StrategySpec, ch: KrausChannel):
    """Compile a strategy into (stages, param_count, in_dim, out_dim)."""
    in_q = _qubits_of(ch.in_dim)
    out_q = _qubits_of(ch.out_dim)
    stages = []
    slot = 0

    def ublock(q):
        nonlocal slot
        c = ansatz.hea(q, spec.l)
        stages.append(("U", c, slot, slot + c.param_count))
        slot += c.param_count

    if spec.strategy == "parallel":
        pre_q = spec.p * in_q + spec.r
        post_q = spec.p * out_q + spec.r
        ublock(pre_q)
        full = ch_mod.extend_identity(ch_mod.tensor_channels(ch, spec.p),
                                      spec.r)
        stages.append(("CH", full.kraus))
        ublock(post_q)
        return stages, slot, 2 ** pre_q, 2 ** post_q

    # Sequential: one channel use per step, fresh qubits restore the
    # register when the channel shrinks it (e.g. 2 qubits -> 1).
    reg_q = in_q + spec.r
    single = ch_mod.extend_identity(ch, spec.r)
    ublock(reg_q)
    for step in range(spec.p):
        stages.append(("CH", single.kraus))
        last = step == spec.p - 1
        if not last:
            for _ in range(in_q - out_q):
                stages.append(("FRESH",))
            ublock(reg_q)
        else:
            ublock(out_q + spec.r)
    return stages, slot, 2 ** reg_q, 2 ** (out_q + spec.r)


def _block_matrices(c: ParamCircuit, theta_block: np.ndarray):
    """Per-gate full matrices plus generator info for param gates."""
    mats, gens = [], []
    for g in c.gates:
        t = theta_block[g.param_slot] if g.param_slot is not None else 0.0
        mats.append(gate_matrix(g, t, c.qubits))
        if g.param_slot is None:
            gens.append(None)
        elif g.kind in _PAULI:
            gens.append(_embed_1q(_PAULI[g.kind], g.target, c.qubits))
        else:
            raise ContractError(
                f"analytic gradient needs Pauli rotations, got {g.kind}")
    return mats, gens


def pipeline_output(stages, theta: np.ndarray, in_dim: int) -> np.ndarray:
    """Forward evaluation from |0...0><0...0| to the output matrix."""
    rho = np.zeros((in_dim, in_dim), dtype=complex)
    rho[0, 0] = 1.0
    for st in stages:
        if st[0] == "U":
            _, c, lo, hi = st
            u = ansatz.unitary(c, theta[lo:hi])
            rho = u @ rho @ u.conj().T
        elif st[0] == "CH":
            rho = ch_mod.apply_raw(st[1], rho)
        else:
            d = rho.shape[0]
            new = np.zeros((2 * d, 2 * d), dtype=complex)
            new[:d, :d] = rho
            rho = new
    return rho


def pipeline_value_and_grad(stages, theta: np.ndarray, in_dim: int,
                            obs: np.ndarray):
    """Tr(obs rho_out) and its exact gradient over all parameters."""
    # Forward: state entering each stage; unitary blocks also record the
    # state after each of their gates (needed for per-gate gradients).
    rho = np.zeros((in_dim, in_dim), dtype=complex)
    rho[0, 0] = 1.0
    entries = []          # per stage: (rho_in, extras)
    for st in stages:
        if st[0] == "U":
            _, c, lo, hi = st
            mats, gens = _block_matrices(c, theta[lo:hi])
            xs = []
            x = rho
            for m in mats:
                x = m @ x @ m.conj().T
                xs.append(x)
            entries.append((rho, mats, gens, xs))
            rho = x
        elif st[0] == "CH":
            entries.append((rho, None, None, None))
            rho = ch_mod.apply_raw(st[1], rho)
        else:
            entries.append((rho, None, None, None))
            d = rho.shape[0]
            new = np.zeros((2 * d, 2 * d), dtype=complex)
            new[:d, :d] = rho
            rho = new

    value = float(np.trace(obs @ rho).real)

    # Backward: propagate the observable and collect gradients.
    grad = np.zeros(theta.shape[0])
    e = obs.astype(complex)
    for st, entry in zip(reversed(stages), reversed(entries)):
        if st[0] == "U":
            _, c, lo, hi = st
            _, mats, gens, xs = entry
            y = e
            for k in range(len(mats) - 1, -1, -1):
                g = c.gates[k]
                if gens[k] is not None:
                    # d/dtheta Tr(E U rho U+) = 2 Re Tr(Y (-i Sigma) X)
                    val = np.trace(y @ gens[k] @ xs[k])
                    grad[lo + g.param_slot] += 2.0 * val.imag
                y = mats[k].conj().T @ y @ mats[k]
            e = y
        elif st[0] == "CH":
            acc = np.zeros((st[1][0].shape[1],) * 2, dtype=complex)
            for k in st[1]:
                acc += k.conj().T @ e @ k
            e = acc
        else:
            d = e.shape[0] // 2
            e = e[:d, :d].copy()
    return value, grad


def success_prob(theta, phi0: KrausChannel, phi1: KrausChannel,
                 spec: StrategySpec) -> float:
    """Discrimination success probability for one parameter vector."""
    theta = np.asarray(theta, dtype=float)
    stages, n_par, in_dim, out_dim = build_pipeline(spec, phi0)
    stages1, n_par1, in1, out1 = build_pipeline(spec, phi1)
    if (n_par, in_dim, out_dim) != (n_par1, in1, out1):
        raise ShapeError("channels lead to incompatible pipelines")
    if theta.shape != (n_par,):
        raise ContractError(f"expected {n_par} parameters, got {theta.shape}")
    povm = povm_half(out_dim)
    r0 = pipeline_output(stages, theta, in_dim)
    r1 = pipeline_output(stages1, theta, in_dim)
    return 0.5 * float((np.trace(povm.elements[0] @ r0)
                        + np.trace(povm.elements[1] @ r1)).real)


def parallel_output(theta, ch: KrausChannel, p: int, r: int,
                    l: int = 1) -> DensityMatrix:
    """Output state of the parallel pipeline (validated)."""
    spec = StrategySpec("parallel", p=p, r=r, l=l)
    stages, n_par, in_dim, _ = build_pipeline(spec, ch)
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (n_par,):
        raise ContractError(f"expected {n_par} parameters, got {theta.shape}")
    return DensityMatrix(pipeline_output(stages, theta, in_dim))


def sequential_output(theta, ch: KrausChannel, p: int, r: int,
                      l: int = 1) -> DensityMatrix:
    """Output state of the sequential pipeline (validated)."""
    spec = StrategySpec("sequential", p=p, r=r, l=l)
    stages, n_par, in_dim, _ = build_pipeline(spec, ch)
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (n_par,):
        raise ContractError(f"expected {n_par} parameters, got {theta.shape}")
    return DensityMatrix(pipeline_output(stages, theta, in_dim))


def param_count(spec: StrategySpec, ch: KrausChannel) -> int:
    return build_pipeline(spec, ch)[1]


def train(phi0: KrausChannel, phi1: KrausChannel, spec: StrategySpec,
          init_theta=None, alpha_pair=None) -> TrainReport:
    """Multi-restart L-BFGS-B maximization of the success probability.

    Each restart draws its start point uniformly from [0, 2pi) out of a
    child RNG stream keyed by (seed, restart index), so restarts are
    order independent.  If ``init_theta`` is given, the first restart
    starts there instead (warm start).
    """
    t0 = time.time()
    stages0, n_par, in_dim, out_dim = build_pipeline(spec, phi0)
    stages1 = build_pipeline(spec, phi1)[0]
    povm = povm_half(out_dim)
    pi0, pi1 = povm.elements

    def neg_value_and_grad(theta):
        v0, g0 = pipeline_value_and_grad(stages0, theta, in_dim, pi0)
        v1, g1 = pipeline_value_and_grad(stages1, theta, in_dim, pi1)
        return -0.5 * (v0 + v1), -0.5 * (g0 + g1)

    history: list[float] = []
    per_restart: list[dict] = []
    best_value, best_params = -np.inf, None
    for i in range(spec.restarts):
        t_restart = time.time()
        rng = np.random.default_rng(np.random.SeedSequence([spec.seed, i]))
        if i == 0 and init_theta is not None:
            theta0 = np.asarray(init_theta, dtype=float)
            if theta0.shape != (n_par,):
                raise ContractError(
                    f"init_theta has {theta0.shape}, expected {n_par}")
        else:
            theta0 = rng.uniform(0.0, 2 * np.pi, size=n_par)

        def track(theta):
            v = -neg_value_and_grad(theta)[0]
            history.append(max(v, history[-1]) if history else v)

        try:
            res = minimize(neg_value_and_grad, theta0, jac=True,
                           method="L-BFGS-B", callback=track,
                           options={"maxiter": spec.max_iters,
                                    "ftol": FTOL, "gtol": GTOL})
        except FloatingPointError:
            log.warning("restart %d aborted on non-finite objective", i)
            per_restart.append({"value": float("nan"), "iters": 0,
                                "seconds": time.time() - t_restart})
            continue
        value = -float(res.fun)
        if not np.isfinite(value):
            log.warning("restart %d produced non-finite value", i)
            per_restart.append({"value": float("nan"), "iters": int(res.nit),
                                "seconds": time.time() - t_restart})
            continue
        per_restart.append({"value": value, "iters": int(res.nit),
                            "seconds": time.time() - t_restart})
        if value > best_value:
            best_value, best_params = value, res.x
    if best_params is None:
        raise ContractError("all restarts failed")
    return TrainReport(best_value=best_value, best_params=best_params,
                       history=history, per_restart=per_restart,
                       wall_time=time.time() - t0, seed=spec.seed,
                       alpha_pair=alpha_pair)


def default_sweep_pairs():
    """The two warm-start chains over the (alpha, alpha + 0.1) grid."""
    forward = [(round(a, 1), round(a + 0.1, 1))
               for a in (0.0, 0.1, 0.2, 0.3, 0.4)]
    backward = [(round(a, 1), round(a + 0.1, 1))
                for a in (0.9, 0.8, 0.7, 0.6, 0.5)]
    return forward, backward


def sweep_depolarizing(spec: StrategySpec, pairs=None,
                       warm_start: bool = True) -> list:
    """Train over a chain of depolarizing pairs, warm-starting each pair
    from the previous optimum.

    With ``pairs=None`` both default chains are run (random init at the
    two endpoints, warm starts inward).  An explicit ``pairs`` sequence
    is treated as a single chain in the given order.
    """
    if pairs is None:
        forward, backward = default_sweep_pairs()
        chains = [forward, backward]
    else:
        chains = [list(pairs)]
    reports = []
    for chain in chains:
        prev = None
        for a0, a1 in chain:
            rep = train(ch_mod.depolarizing(a0), ch_mod.depolarizing(a1),
                        spec, init_theta=prev if warm_start else None,
                        alpha_pair=(a0, a1))
            prev = rep.best_params
            reports.append(rep)
    return reports
