"""Dense complex linear algebra and quantum-state primitives.

Everything downstream (channels, circuits, classifiers) is built on the
small set of operations in this module: Kronecker products, partial
traces, trace norms, expectation values, and random-state sampling.

Conventions
-----------
Qubit 0 is the leftmost tensor factor and the most significant bit of
the computational-basis index, so ``|01>`` has index 1 on two qubits.
All matrices are dense ``complex128`` numpy arrays in row-major order.
"""

from __future__ import annotations

import numpy as np

# Validation tolerances for state-like objects.
TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = -1e-9
TOL_NORM = 1e-12

# Hard cap on Hilbert-space dimension; larger requests are a
# misconfiguration, not a workload.
MAX_DIM = 2**12

# Single-qubit constants.
I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)


class ShapeError(ValueError):
    """Dimension bookkeeping mismatch between operands."""


class ContractError(ValueError):
    """An input violates a documented precondition (e.g. non-Hermitian)."""


def _as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeError(f"expected a matrix, got ndim={m.ndim}")
    return m


class DensityMatrix:
    """A validated density operator.

    Checks Hermiticity, unit trace, and positive semi-definiteness on
    construction.  Use ``check=False`` only in hot loops where the
    producer guarantees validity.
    """

    __slots__ = ("mat", "dim")

    def __init__(self, mat, check: bool = True):
        mat = _as_matrix(mat)
        if mat.shape[0] != mat.shape[1]:
            raise ShapeError(f"density matrix must be square, got {mat.shape}")
        self.mat = mat
        self.dim = mat.shape[0]
        if check:
            self.validate()

    def validate(self) -> None:
        m = self.mat
        if not np.isfinite(m).all():
            raise ContractError("non-finite entries in density matrix")
        if np.abs(m - m.conj().T).max() > TOL_HERM:
            raise ContractError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TOL_TRACE:
            raise ContractError(f"density matrix trace {tr} != 1")
        if np.linalg.eigvalsh(m).min() < TOL_PSD:
            raise ContractError("density matrix has a negative eigenvalue")

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


class PureState:
    """A normalized state vector."""

    __slots__ = ("vec", "dim")

    def __init__(self, vec, check: bool = True):
        vec = np.asarray(vec, dtype=complex).ravel()
        self.vec = vec
        self.dim = vec.shape[0]
        if check:
            nrm = np.linalg.norm(vec)
            if abs(nrm - 1.0) > TOL_NORM:
                raise ContractError(f"state vector norm {nrm} != 1")

    def to_density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.vec, self.vec.conj()), check=False)

    def __repr__(self):
        return f"PureState(dim={self.dim})"


def ketbra(ket, bra) -> np.ndarray:
    """Outer product |ket><bra| for plain vectors."""
    return np.outer(np.asarray(ket, dtype=complex),
                    np.asarray(bra, dtype=complex).conj())


def basis_ket(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def tensor(a, b) -> np.ndarray:
    """Kronecker product, with the configured dimension cap enforced."""
    a = _as_matrix(a)
    b = _as_matrix(b)
    if a.shape[0] * b.shape[0] > MAX_DIM or a.shape[1] * b.shape[1] > MAX_DIM:
        raise ShapeError(
            f"tensor product dimension exceeds cap {MAX_DIM}: "
            f"{a.shape} x {b.shape}")
    return np.kron(a, b)


def tensor_all(mats) -> np.ndarray:
    """Left-to-right Kronecker product of a sequence of matrices."""
    mats = list(mats)
    if not mats:
        raise ShapeError("tensor_all needs at least one factor")
    out = _as_matrix(mats[0])
    for m in mats[1:]:
        out = tensor(out, m)
    return out


def partial_trace(rho: DensityMatrix, dims, keep) -> DensityMatrix:
    """Trace out all subsystems not listed in ``keep``.

    Parameters
    ----------
    rho : DensityMatrix
        State on the full composite system.
    dims : sequence of int
        Subsystem dimensions; their product must equal ``rho.dim``.
    keep : iterable of int
        Indices (into ``dims``) of the subsystems to keep, in order.
    """
    dims = list(dims)
    if int(np.prod(dims)) != rho.dim:
        raise ShapeError(f"prod(dims)={np.prod(dims)} != dim {rho.dim}")
    keep = sorted(set(keep))
    n = len(dims)
    if any(k < 0 or k >= n for k in keep):
        raise ShapeError("keep indices out of range")
    t = rho.mat.reshape(dims + dims)
    # Trace out dropped subsystems from the back so axis numbering stays valid.
    for ax in sorted(set(range(n)) - set(keep), reverse=True):
        t = np.trace(t, axis1=ax, axis2=ax + (t.ndim // 2))
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return DensityMatrix(t.reshape(d_keep, d_keep), check=False)


def trace_norm(h) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    h = _as_matrix(h)
    if np.abs(h - h.conj().T).max() > TOL_HERM:
        raise ContractError("trace_norm requires a Hermitian matrix")
    return float(np.abs(np.linalg.eigvalsh(h)).sum())


def expectation(rho: DensityMatrix, obs) -> float:
    """Tr(obs @ rho) for a Hermitian observable; asserts the value is real."""
    obs = _as_matrix(obs)
    if obs.shape[0] != rho.dim:
        raise ShapeError(f"observable dim {obs.shape[0]} != state dim {rho.dim}")
    val = np.trace(obs @ rho.mat)
    if abs(val.imag) > 1e-10:
        raise ContractError(f"expectation has imaginary residue {val.imag}")
    return float(val.real)


def random_mixed_state(dim: int, rng: np.random.Generator) -> DensityMatrix:
    """Hilbert-Schmidt-distributed mixed state via the Ginibre construction."""
    if dim < 2:
        raise ContractError("random_mixed_state needs dim >= 2")
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, check=False)


def random_pure_state(dim: int, rng: np.random.Generator) -> PureState:
    """Haar-distributed pure state via a normalized complex Gaussian vector."""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(v / np.linalg.norm(v), check=False)


def bloch_vector(rho: DensityMatrix) -> np.ndarray:
    """(x, y, z) Bloch components of a qubit state."""
    if rho.dim != 2:
        raise ShapeError("bloch_vector is defined for qubits only")
    m = rho.mat
    return np.array([np.trace(SX @ m).real,
                     np.trace(SY @ m).real,
                     np.trace(SZ @ m).real])
