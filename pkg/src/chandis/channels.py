"""CPTP maps in Kraus form and the named channels used throughout.

A channel is a finite list of Kraus operators, possibly dimension
changing (the entanglement-breaking channels here map two qubits to
one).  Channel algebra (tensor powers, identity extension, composition)
keeps the Kraus representation canonical; superoperator or Choi forms
are derived on demand.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import qcore
from .qcore import (ContractError, DensityMatrix, ShapeError, I2, SX, SY, SZ,
                    KET0, KET1, KET_PLUS, KET_MINUS, ketbra, tensor)

# Tensoring channels multiplies Kraus counts; beyond this we error out
# rather than silently thrash.
MAX_KRAUS = 4096


class KrausChannel:
    """A CPTP map given by Kraus operators of shape (out_dim, in_dim)."""

    def __init__(self, kraus, label: str = "", check: bool = True):
        kraus = [np.asarray(k, dtype=complex) for k in kraus]
        if not kraus:
            raise ContractError("a channel needs at least one Kraus operator")
        shape = kraus[0].shape
        if any(k.shape != shape for k in kraus):
            raise ShapeError("all Kraus operators must share one shape")
        self.kraus = kraus
        self.out_dim, self.in_dim = shape
        self.label = label
        if check:
            self.validate()

    def validate(self) -> None:
        acc = sum(k.conj().T @ k for k in self.kraus)
        if np.abs(acc - np.eye(self.in_dim)).max() > 1e-10:
            raise ContractError(
                f"channel '{self.label}' is not trace preserving")
        c = choi(self)
        if np.linalg.eigvalsh(c).min() < -1e-9:
            raise ContractError(
                f"channel '{self.label}' is not completely positive")

    def __repr__(self):
        return (f"KrausChannel({self.label or 'unnamed'}, "
                f"{self.in_dim}->{self.out_dim}, {len(self.kraus)} ops)")


def apply(ch: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """Apply the channel: sum_k K rho K^dagger."""
    if rho.dim != ch.in_dim:
        raise ShapeError(f"state dim {rho.dim} != channel in_dim {ch.in_dim}")
    return DensityMatrix(apply_raw(ch.kraus, rho.mat), check=False)


def apply_raw(kraus, mat: np.ndarray) -> np.ndarray:
    """Kraus application on a bare ndarray (hot-loop variant of apply)."""
    out = kraus[0] @ mat @ kraus[0].conj().T
    for k in kraus[1:]:
        out += k @ mat @ k.conj().T
    return out


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel([np.eye(dim, dtype=complex)], label=f"id{dim}",
                        check=False)


def depolarizing(alpha: float) -> KrausChannel:
    """Qubit depolarizing channel with depolarization factor alpha.

    Acts as ``rho -> (1 - alpha) rho + (alpha/3)(X rho X + Y rho Y + Z rho Z)``,
    which contracts the Bloch vector by ``1 - 4 alpha / 3``;  alpha = 3/4 is
    the fully depolarizing point.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ContractError(f"alpha={alpha} outside [0, 1]")
    ops = [np.sqrt(1 - alpha) * I2,
           np.sqrt(alpha / 3) * SX,
           np.sqrt(alpha / 3) * SY,
           np.sqrt(alpha / 3) * SZ]
    return KrausChannel(ops, label=f"dep({alpha})", check=False)


def eb_channel_A() -> KrausChannel:
    """First entanglement-breaking channel (two qubits to one), 5 Kraus ops."""
    s = 1 / np.sqrt(2)
    k00, k01 = np.kron(KET0, KET0), np.kron(KET0, KET1)
    k10, k11 = np.kron(KET1, KET0), np.kron(KET1, KET1)
    ops = [ketbra(KET0, k00),
           ketbra(KET0, k01),
           ketbra(KET0, k10),
           s * ketbra(KET0, k11),
           s * ketbra(KET1, k11)]
    return KrausChannel(ops, label="eb-A")


def eb_channel_B() -> KrausChannel:
    """Second entanglement-breaking channel (two qubits to one), 5 Kraus ops."""
    s = 1 / np.sqrt(2)
    k00, k01 = np.kron(KET0, KET0), np.kron(KET0, KET1)
    k1p, k1m = np.kron(KET1, KET_PLUS), np.kron(KET1, KET_MINUS)
    ops = [ketbra(KET_PLUS, k00),
           ketbra(KET_PLUS, k01),
           ketbra(KET1, k1p),
           s * ketbra(KET0, k1m),
           s * ketbra(KET1, k1m)]
    return KrausChannel(ops, label="eb-B")


def tensor_channels(ch: KrausChannel, p: int) -> KrausChannel:
    """p-fold tensor power of a channel (all products of Kraus operators)."""
    if p < 1:
        raise ContractError(f"p={p} must be >= 1")
    if len(ch.kraus) ** p > MAX_KRAUS:
        raise ContractError(
            f"Kraus count {len(ch.kraus)}^{p} exceeds cap {MAX_KRAUS}")
    if p == 1:
        return ch
    ops = [qcore.tensor_all(combo)
           for combo in itertools.product(ch.kraus, repeat=p)]
    return KrausChannel(ops, label=f"{ch.label}^x{p}", check=False)


def extend_identity(ch: KrausChannel, r: int) -> KrausChannel:
    """Tensor an r-qubit identity onto the channel: K -> K (x) I(2^r)."""
    if r < 0:
        raise ContractError(f"r={r} must be >= 0")
    if r == 0:
        return ch
    eye = np.eye(2 ** r, dtype=complex)
    ops = [tensor(k, eye) for k in ch.kraus]
    return KrausChannel(ops, label=f"{ch.label}+id{r}", check=False)


def compose(b: KrausChannel, a: KrausChannel) -> KrausChannel:
    """Channel composition (b after a); Kraus set is all products B_i A_j."""
    if a.out_dim != b.in_dim:
        raise ShapeError(
            f"cannot compose: {a.out_dim} (out of a) != {b.in_dim} (in of b)")
    if len(a.kraus) * len(b.kraus) > MAX_KRAUS:
        raise ContractError("composed Kraus count exceeds cap")
    ops = [bk @ ak for bk in b.kraus for ak in a.kraus]
    return KrausChannel(ops, label=f"{b.label}.{a.label}", check=False)


def choi(ch: KrausChannel) -> np.ndarray:
    """Choi matrix: (Phi (x) Id) applied to the normalized maximally
    entangled state on in_dim^2."""
    d = ch.in_dim
    omega = np.zeros(d * d, dtype=complex)
    omega[:: d + 1] = 1 / np.sqrt(d)
    rho = np.outer(omega, omega.conj())
    eye = np.eye(d, dtype=complex)
    out = np.zeros((ch.out_dim * d, ch.out_dim * d), dtype=complex)
    for k in ch.kraus:
        ke = np.kron(k, eye)
        out += ke @ rho @ ke.conj().T
    return out


def insert_fresh_qubit(rho: DensityMatrix, position: str = "first") -> DensityMatrix:
    """Adjoin a fresh |0> qubit: rho -> |0><0| (x) rho (or rho (x) |0><0|)."""
    zero = ketbra(KET0, KET0)
    if position == "first":
        m = tensor(zero, rho.mat)
    elif position == "last":
        m = tensor(rho.mat, zero)
    else:
        raise ContractError(f"unknown position {position!r}")
    return DensityMatrix(m, check=False)


def from_config(cfg: dict) -> KrausChannel:
    """Build a channel from a config mapping.

    Supported forms::

        {"type": "depolarizing", "alpha": 0.3}
        {"type": "eb-A"} / {"type": "eb-B"} / {"type": "identity", "dim": 2}
        {"type": "kraus", "matrices": [[[ [re, im], ... ], ...], ...]}
    """
    kind = cfg.get("type")
    if kind == "depolarizing":
        return depolarizing(float(cfg["alpha"]))
    if kind == "eb-A":
        return eb_channel_A()
    if kind == "eb-B":
        return eb_channel_B()
    if kind == "identity":
        return identity_channel(int(cfg.get("dim", 2)))
    if kind == "kraus":
        mats = []
        for m in cfg["matrices"]:
            arr = np.array([[complex(re, im) for re, im in row] for row in m])
            mats.append(arr)
        return KrausChannel(mats, label=cfg.get("label", "custom"))
    raise ContractError(f"unknown channel type {kind!r}")
