"""Parameterized unitaries and their gradients.

The workhorse circuit is a layered hardware-efficient ansatz: per-qubit
Rx-Rz-Rx rotations followed by a CX ring.  Rotations use the convention
``R_sigma(theta) = exp(-i theta sigma)`` (no factor 1/2), so a bare
Pauli rotation has eigenphases exp(-/+ i theta) and the exact
parameter-shift spacing is pi/4.

Three small fixed circuits used by the variational classifier are also
defined here: a 7-parameter two-qubit circuit with a controlled-Ry, its
4-parameter rotation-only truncation, and a 2-parameter single-qubit
circuit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import ContractError, I2, SX, SY, SZ

_PAULI = {"Rx": SX, "Ry": SY, "Rz": SZ}

# Central-difference step for the finite-difference gradient fallback.
FD_STEP = 1e-5


@dataclass(frozen=True)
class Gate:
    kind: str                 # Rx | Ry | Rz | CRy | CX
    target: int
    control: int | None = None
    param_slot: int | None = None


@dataclass(frozen=True)
class ParamCircuit:
    """An ordered gate list over ``qubits`` wires with ``param_count`` slots."""
    qubits: int
    gates: tuple
    param_count: int

    def pauli_slots(self) -> list[int]:
        """Slots driven by a bare Pauli rotation (parameter-shiftable)."""
        return [g.param_slot for g in self.gates
                if g.param_slot is not None and g.kind in _PAULI]


def rot(kind: str, theta: float) -> np.ndarray:
    """Single-qubit rotation exp(-i theta sigma) = cos(theta) I - i sin(theta) sigma."""
    sigma = _PAULI[kind]
    return np.cos(theta) * I2 - 1j * np.sin(theta) * sigma


def _embed_1q(u: np.ndarray, qubit: int, n: int) -> np.ndarray:
    left, right = 2 ** qubit, 2 ** (n - 1 - qubit)
    out = u
    if left > 1:
        out = np.kron(np.eye(left), out)
    if right > 1:
        out = np.kron(out, np.eye(right))
    return out


_CX_CACHE: dict = {}


def _cx_matrix(control: int, target: int, n: int) -> np.ndarray:
    key = (control, target, n)
    cached = _CX_CACHE.get(key)
    if cached is not None:
        return cached
    dim = 2 ** n
    u = np.zeros((dim, dim), dtype=complex)
    cbit = n - 1 - control
    tbit = n - 1 - target
    for i in range(dim):
        j = i ^ (1 << tbit) if (i >> cbit) & 1 else i
        u[j, i] = 1.0
    _CX_CACHE[key] = u
    return u


def _cry_matrix(control: int, target: int, theta: float, n: int) -> np.ndarray:
    # Controlled exp(-i theta Y): identity on the control-0 subspace.
    dim = 2 ** n
    u = np.eye(dim, dtype=complex)
    cbit = n - 1 - control
    tbit = n - 1 - target
    ry = rot("Ry", theta)
    for i in range(dim):
        if not (i >> cbit) & 1:
            continue
        t = (i >> tbit) & 1
        i0 = i & ~(1 << tbit)
        i1 = i | (1 << tbit)
        u[i0, i] = ry[0, t]
        u[i1, i] = ry[1, t]
    return u


def gate_matrix(g: Gate, theta, n: int) -> np.ndarray:
    """Full 2^n-dimensional matrix of one gate (theta ignored for CX)."""
    if g.kind in _PAULI:
        return _embed_1q(rot(g.kind, theta), g.target, n)
    if g.kind == "CX":
        return _cx_matrix(g.control, g.target, n)
    if g.kind == "CRy":
        return _cry_matrix(g.control, g.target, theta, n)
    raise ContractError(f"unknown gate kind {g.kind!r}")


def unitary(c: ParamCircuit, theta) -> np.ndarray:
    """Evaluate the circuit to a 2^q x 2^q unitary matrix."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (c.param_count,):
        raise ContractError(
            f"expected {c.param_count} parameters, got {theta.shape}")
    u = np.eye(2 ** c.qubits, dtype=complex)
    for g in c.gates:
        t = theta[g.param_slot] if g.param_slot is not None else 0.0
        u = gate_matrix(g, t, c.qubits) @ u
    return u


def hea(q: int, l: int) -> ParamCircuit:
    """Hardware-efficient ansatz: l layers of per-qubit Rx,Rz,Rx plus a CX ring.

    The ring is CX(0->1), CX(1->2), ..., CX(q-2 -> q-1), CX(q-1 -> 0);
    for q = 2 it degenerates to a single CX(0->1) and for q = 1 there is
    no entangler.  Parameter count is 3*q*l.
    """
    if q < 1 or l < 1:
        raise ContractError(f"hea needs q >= 1 and l >= 1, got q={q}, l={l}")
    gates = []
    slot = 0
    for _ in range(l):
        for qb in range(q):
            for kind in ("Rx", "Rz", "Rx"):
                gates.append(Gate(kind, target=qb, param_slot=slot))
                slot += 1
        if q == 2:
            gates.append(Gate("CX", target=1, control=0))
        elif q > 2:
            for qb in range(q - 1):
                gates.append(Gate("CX", target=qb + 1, control=qb))
            gates.append(Gate("CX", target=0, control=q - 1))
    return ParamCircuit(qubits=q, gates=tuple(gates), param_count=slot)


def u1_circuit() -> ParamCircuit:
    """Two-qubit classifier circuit: local Rx-Rz-Rx pairs, then CRy(0->1)."""
    gates = (Gate("Rx", 0, param_slot=0), Gate("Rz", 0, param_slot=1),
             Gate("Rx", 0, param_slot=2),
             Gate("Rx", 1, param_slot=3), Gate("Rz", 1, param_slot=4),
             Gate("Rx", 1, param_slot=5),
             Gate("CRy", target=1, control=0, param_slot=6))
    return ParamCircuit(qubits=2, gates=gates, param_count=7)


def u2_circuit() -> ParamCircuit:
    """Truncated two-qubit classifier circuit: local Rx-Rz pairs, no entangler."""
    gates = (Gate("Rx", 0, param_slot=0), Gate("Rz", 0, param_slot=1),
             Gate("Rx", 1, param_slot=2), Gate("Rz", 1, param_slot=3))
    return ParamCircuit(qubits=2, gates=gates, param_count=4)


def u3_circuit() -> ParamCircuit:
    """Single-qubit classifier circuit: Rx then Rz."""
    gates = (Gate("Rx", 0, param_slot=0), Gate("Rz", 0, param_slot=1))
    return ParamCircuit(qubits=1, gates=gates, param_count=2)


def u1(theta) -> np.ndarray:
    return unitary(u1_circuit(), theta)


def u2(theta) -> np.ndarray:
    return unitary(u2_circuit(), theta)


def u3(theta) -> np.ndarray:
    return unitary(u3_circuit(), theta)


def gradient(objective, theta, circuit: ParamCircuit | None = None) -> np.ndarray:
    """Gradient of a scalar objective over circuit parameters.

    Slots backed by a bare Pauli rotation (known from ``circuit``) use
    the exact parameter-shift rule ``f(t + pi/4) - f(t - pi/4)``; all
    other slots, and every slot when no circuit is given, use central
    finite differences with step ``FD_STEP``.
    """
    theta = np.asarray(theta, dtype=float)
    shift_slots = set(circuit.pauli_slots()) if circuit is not None else set()
    grad = np.empty(theta.shape[0])
    for k in range(theta.shape[0]):
        t = theta.copy()
        if k in shift_slots:
            t[k] = theta[k] + np.pi / 4
            plus = objective(t)
            t[k] = theta[k] - np.pi / 4
            grad[k] = plus - objective(t)
        else:
            t[k] = theta[k] + FD_STEP
            plus = objective(t)
            t[k] = theta[k] - FD_STEP
            grad[k] = (plus - objective(t)) / (2 * FD_STEP)
    return grad
