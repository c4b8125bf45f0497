import numpy as np
import pytest

from chandis import ansatz
from chandis.ansatz import (
    gradient, hea, rot, u1, u2, u3, u1_circuit, u2_circuit, u3_circuit,
    unitary,
)
from chandis.qcore import ContractError, basis_ket, ketbra, SX, SZ, KET0


CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
              dtype=complex)


def test_rotation_convention():
    # R_sigma(theta) = exp(-i theta sigma), no half-angle factor.
    theta = 0.37
    expect = np.cos(theta) * np.eye(2) - 1j * np.sin(theta) * SX
    assert np.allclose(rot("Rx", theta), expect, atol=1e-14)
    assert np.allclose(rot("Rx", np.pi), -np.eye(2), atol=1e-12)


class TestHea:
    def test_param_counts(self):
        assert hea(4, 1).param_count == 12
        assert hea(5, 14).param_count == 210
        assert hea(1, 3).param_count == 9

    def test_zero_theta_two_qubits_is_cx(self):
        u = unitary(hea(2, 1), np.zeros(6))
        assert np.allclose(u, CX, atol=1e-12)

    def test_zero_theta_is_cx_ring(self):
        # At theta = 0 the rotations vanish and only the ring remains.
        q = 3
        u = unitary(hea(q, 1), np.zeros(3 * q))
        ring = np.eye(2 ** q, dtype=complex)
        for ctl in range(q):
            ring = ansatz._cx_matrix(ctl, (ctl + 1) % q, q) @ ring
        assert np.allclose(u, ring, atol=1e-12)

    def test_single_qubit_has_no_entangler(self):
        c = hea(1, 2)
        assert all(g.kind != "CX" for g in c.gates)

    def test_unitarity_random_theta(self):
        rng = np.random.default_rng(0)
        for c in (hea(2, 2), hea(3, 1), u1_circuit(), u2_circuit(),
                  u3_circuit()):
            for _ in range(25):
                th = rng.uniform(0, 2 * np.pi, c.param_count)
                u = unitary(c, th)
                assert np.abs(u @ u.conj().T - np.eye(len(u))).max() < 1e-10

    def test_length_mismatch(self):
        with pytest.raises(ContractError):
            unitary(hea(2, 1), np.zeros(5))

    def test_channel_pi_periodicity(self):
        # exp(-i theta sigma) has period pi up to a global phase, so the
        # induced channel U rho U^dagger is pi-periodic per Pauli slot.
        rng = np.random.default_rng(1)
        c = hea(2, 1)
        th = rng.uniform(0, 2 * np.pi, c.param_count)
        rho = ketbra(basis_ket(4, 1), basis_ket(4, 1))
        base = unitary(c, th)
        for k in c.pauli_slots()[:3]:
            shifted = th.copy()
            shifted[k] += np.pi
            u2_ = unitary(c, shifted)
            assert np.abs(u2_ @ rho @ u2_.conj().T
                          - base @ rho @ base.conj().T).max() < 1e-12


class TestClassifierCircuits:
    def test_u2_zero_is_identity(self):
        assert np.allclose(u2(np.zeros(4)), np.eye(4), atol=1e-12)

    def test_u3_zero_is_identity(self):
        assert np.allclose(u3(np.zeros(2)), np.eye(2), atol=1e-12)

    def test_u1_idle_control(self):
        rng = np.random.default_rng(2)
        th = rng.uniform(0, 2 * np.pi, 7)
        th[6] = 0.0
        local0 = rot("Rx", th[2]) @ rot("Rz", th[1]) @ rot("Rx", th[0])
        local1 = rot("Rx", th[5]) @ rot("Rz", th[4]) @ rot("Rx", th[3])
        assert np.allclose(u1(th), np.kron(local0, local1), atol=1e-12)

    def test_param_counts(self):
        assert u1_circuit().param_count == 7
        assert u2_circuit().param_count == 4
        assert u3_circuit().param_count == 2

    def test_cry_zero_is_identity(self):
        assert np.allclose(ansatz._cry_matrix(0, 1, 0.0, 2), np.eye(4),
                           atol=1e-14)


class TestGradient:
    def test_constant_objective(self):
        g = gradient(lambda th: 1.0, np.array([0.3, 0.4]))
        assert np.allclose(g, 0.0, atol=1e-9)

    def test_closed_form_rx(self):
        c = hea(1, 1)

        def objective(th):
            # Only slot 0 matters: f = <0| Rx(t)^dag sz Rx(t) |0> = cos 2t.
            u = rot("Rx", th[0])
            v = u @ KET0
            return float((v.conj() @ SZ @ v).real)

        rng = np.random.default_rng(3)
        for _ in range(10):
            th = np.zeros(3)
            th[0] = rng.uniform(0, 2 * np.pi)
            g = gradient(objective, th, circuit=c)
            assert abs(g[0] - (-2 * np.sin(2 * th[0]))) < 1e-6

    def test_parameter_shift_matches_finite_differences(self):
        c = hea(3, 2)
        rng = np.random.default_rng(4)
        obs = np.diag(rng.uniform(-1, 1, 8)).astype(complex)
        ket = basis_ket(8, 0)

        def objective(th):
            v = unitary(c, th) @ ket
            return float((v.conj() @ obs @ v).real)

        th = rng.uniform(0, 2 * np.pi, c.param_count)
        shift = gradient(objective, th, circuit=c)
        fd = gradient(objective, th, circuit=None)
        assert np.abs(shift - fd).max() < 1e-6
