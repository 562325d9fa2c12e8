"""Dense complex linear algebra for small multi-qubit systems.

All operations act on plain complex128 numpy arrays. Basis indexing puts
qubit 0 in the most significant bit of the row index, so
``tensor_product(a, b)`` places ``a`` on the high-order qubits, and the
qubit indices accepted by ``partial_trace`` and ``embed_operator`` count
down from that bit. Dimensions never exceed a few hundred here, so every
routine favors exact dense methods (eigendecompositions rather than
iterative or scaling/squaring approximations).
"""

from functools import lru_cache

import numpy as np

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

#: Hermiticity tolerance accepted by the matrix exponential.
HERMITIAN_TOL = 1e-8
#: Tolerance for density-matrix validity (trace, Hermiticity, eigenvalues).
DENSITY_TOL = 1e-10


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def zero_projector(num_qubits: int) -> np.ndarray:
    """Projector |0...0><0...0| on ``num_qubits`` qubits."""
    dim = 2**num_qubits
    p = np.zeros((dim, dim), dtype=complex)
    p[0, 0] = 1.0
    return p


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with ``a`` on the slow (high-order) indices."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(m: np.ndarray, qubit_count: int, keep) -> np.ndarray:
    """Trace out every qubit not listed in ``keep``.

    ``keep`` must be strictly increasing qubit indices; the kept qubits
    retain their relative order in the result. The total trace is
    preserved: trace(result) == trace(m).
    """
    m = np.asarray(m, dtype=complex)
    dim = 2**qubit_count
    if m.shape != (dim, dim):
        raise ValueError(f"matrix shape {m.shape} does not match {qubit_count} qubits")
    keep = tuple(keep)
    if not keep:
        raise ValueError("keep must name at least one qubit")
    if any(q < 0 or q >= qubit_count for q in keep):
        raise ValueError(f"keep indices {keep} out of range for {qubit_count} qubits")
    if list(keep) != sorted(set(keep)):
        raise ValueError(f"keep indices must be strictly increasing, got {keep}")

    drop = [q for q in range(qubit_count) if q not in keep]
    t = m.reshape((2,) * (2 * qubit_count))
    n = qubit_count
    # Trace highest-index qubits first so remaining axis positions are stable.
    for q in sorted(drop, reverse=True):
        t = np.trace(t, axis1=q, axis2=q + n)
        n -= 1
    d = 2 ** len(keep)
    return t.reshape(d, d)


@lru_cache(maxsize=None)
def _embed_permutation(qubits: tuple, total_qubits: int) -> np.ndarray:
    """Basis permutation sending natural qubit order to (qubits..., rest...)."""
    order = list(qubits) + [q for q in range(total_qubits) if q not in qubits]
    dim = 2**total_qubits
    perm = np.empty(dim, dtype=np.intp)
    for i in range(dim):
        j = 0
        for pos, q in enumerate(order):
            bit = (i >> (total_qubits - 1 - q)) & 1
            j |= bit << (total_qubits - 1 - pos)
        perm[i] = j
    return perm


def embed_operator(op: np.ndarray, qubits, total_qubits: int) -> np.ndarray:
    """Extend ``op``, acting on the listed qubits (in that order), by identity.

    ``op`` must be 2^k x 2^k for k = len(qubits); the result acts on the
    full 2^total_qubits space.
    """
    op = np.asarray(op, dtype=complex)
    qubits = tuple(qubits)
    k = len(qubits)
    if len(set(qubits)) != k or any(q < 0 or q >= total_qubits for q in qubits):
        raise ValueError(f"invalid qubit set {qubits} for {total_qubits} qubits")
    if op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {op.shape} does not match {k} qubits")
    if k == total_qubits and qubits == tuple(range(total_qubits)):
        return op
    full = np.kron(op, np.eye(2 ** (total_qubits - k), dtype=complex))
    perm = _embed_permutation(qubits, total_qubits)
    return full[np.ix_(perm, perm)]


def is_hermitian(m: np.ndarray, tol: float = DENSITY_TOL) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def is_unitary(m: np.ndarray, tol: float = DENSITY_TOL) -> bool:
    d = m.shape[0]
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(d))) <= tol)


def validate_density(m: np.ndarray, tol: float = DENSITY_TOL, name: str = "matrix") -> None:
    """Raise ValueError unless ``m`` is Hermitian, trace-1 and PSD within tol."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} is not square")
    dev = np.max(np.abs(m - m.conj().T))
    if dev > tol:
        raise ValueError(f"{name} is not Hermitian (max deviation {dev:.3e})")
    tr = m.trace()
    if abs(tr - 1.0) > tol:
        raise ValueError(f"{name} has trace {tr:.12g}, expected 1")
    w_min = np.linalg.eigvalsh(m)[0]
    if w_min < -tol:
        raise ValueError(f"{name} has negative eigenvalue {w_min:.3e}")


def herm_exp_unitary(k: np.ndarray, s: float) -> np.ndarray:
    """exp(i * s * k) for Hermitian k, via eigendecomposition.

    Exactly unitary up to eigensolver round-off, which is what keeps
    repeated multiplicative updates stable.
    """
    k = np.asarray(k, dtype=complex)
    dev = np.max(np.abs(k - k.conj().T)) if k.size else 0.0
    if dev > HERMITIAN_TOL:
        raise ValueError(f"generator is not Hermitian (max deviation {dev:.3e})")
    w, v = np.linalg.eigh(k)
    return (v * np.exp(1j * s * w)) @ v.conj().T


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Seeded random unitary exp(iH) with H a symmetrized Gaussian matrix.

    Deterministic for a fixed generator state and call order. The
    distribution is well-spread but not Haar; that is all the training
    initialization needs.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return herm_exp_unitary((a + a.conj().T) / 2.0, 1.0)


def pure_fidelity(phi: np.ndarray, rho: np.ndarray) -> float:
    """<phi|rho|phi> for a pure reference state, clamped to [0, 1]."""
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (phi.size, phi.size):
        raise ValueError(f"state dim {phi.size} does not match matrix shape {rho.shape}")
    val = phi.conj() @ rho @ phi
    if abs(val.imag) > 1e-10:
        raise ValueError(f"fidelity has imaginary part {val.imag:.3e}")
    return float(min(max(val.real, 0.0), 1.0))


def sqrtm_psd(m: np.ndarray) -> np.ndarray:
    """Hermitian square root with negative round-off eigenvalues clamped to 0."""
    w, v = np.linalg.eigh(np.asarray(m, dtype=complex))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def mixed_fidelity(s: np.ndarray, t: np.ndarray) -> float:
    """Fidelity of two density matrices: (tr sqrt(sqrt(S) T sqrt(S)))^2.

    Symmetric in its arguments and equal to ``pure_fidelity`` whenever one
    argument is rank one.
    """
    s = np.asarray(s, dtype=complex)
    t = np.asarray(t, dtype=complex)
    if s.shape != t.shape:
        raise ValueError(f"shape mismatch {s.shape} vs {t.shape}")
    for name, m in (("first", s), ("second", t)):
        w_min = np.linalg.eigvalsh(m)[0]
        if w_min < -DENSITY_TOL:
            raise ValueError(f"{name} argument has negative eigenvalue {w_min:.3e}")
    rs = sqrtm_psd(s)
    w = np.linalg.eigvalsh(rs @ t @ rs)
    f = float(np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2)
    return min(max(f, 0.0), 1.0)


def state_overlap(s: np.ndarray, t: np.ndarray) -> float:
    """Plain trace overlap tr(S T) of two Hermitian matrices."""
    return float(np.trace(np.asarray(s) @ np.asarray(t)).real)
