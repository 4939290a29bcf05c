"""Dense complex linear algebra for the 4-level qubit/memory system.

Basis order of the product space is fixed everywhere as
``|0q 0m>, |0q 1m>, |1q 0m>, |1q 1m>`` (index ``2 * q + m``).  The
one-excitation subspace is ordered ``(|1q 0m>, |0q 1m>)``, i.e. full-space
indices ``(2, 1)``.

Superoperators act on column-stacked density matrices:
``vec(A @ X @ B) == kron(B.T, A) @ vec(X)``.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg

DIM = 4
SUBSPACE = (2, 1)
GROUND = 0
DOUBLE = 3

SIGMA_I = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
LOWER = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|
EXCITED = np.array([[0, 0], [0, 1]], dtype=complex)  # |1><1|
PAULIS = (SIGMA_I, SIGMA_X, SIGMA_Y, SIGMA_Z)


def on_qubit(op: np.ndarray) -> np.ndarray:
    return np.kron(op, SIGMA_I)


def on_memory(op: np.ndarray) -> np.ndarray:
    return np.kron(SIGMA_I, op)


def basis_state(q: int, m: int) -> np.ndarray:
    psi = np.zeros(DIM, dtype=complex)
    psi[2 * q + m] = 1.0
    return psi


def subspace_state(a: complex, b: complex) -> np.ndarray:
    """Full-space vector ``a |1q 0m> + b |0q 1m>``."""
    psi = np.zeros(DIM, dtype=complex)
    psi[SUBSPACE[0]] = a
    psi[SUBSPACE[1]] = b
    return psi


def embed_subspace(u: np.ndarray, phases: tuple[complex, complex] = (1.0, 1.0)) -> np.ndarray:
    """Lift a 2x2 one-excitation operator to the full space.

    ``phases`` are the factors picked up by ``|0q 0m>`` and ``|1q 1m>``.
    """
    full = np.zeros((DIM, DIM), dtype=complex)
    full[np.ix_(SUBSPACE, SUBSPACE)] = u
    full[GROUND, GROUND] = phases[0]
    full[DOUBLE, DOUBLE] = phases[1]
    return full


def restrict_subspace(op: np.ndarray) -> np.ndarray:
    return np.asarray(op)[np.ix_(SUBSPACE, SUBSPACE)]


def expm(m: np.ndarray) -> np.ndarray:
    """Matrix exponential (Pade scaling and squaring)."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expm needs a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("expm input has non-finite entries")
    return scipy.linalg.expm(m.astype(complex))


def dm(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    n = int(round(np.sqrt(v.size)))
    return np.asarray(v).reshape((n, n), order="F")


def partial_trace_memory(rho: np.ndarray) -> np.ndarray:
    """Reduced 2x2 qubit state ``Tr_m rho``."""
    return np.einsum("imjm->ij", np.asarray(rho).reshape(2, 2, 2, 2))


def unitary_superop(u: np.ndarray) -> np.ndarray:
    """Superoperator of ``rho -> u rho u^dag``."""
    return np.kron(u.conj(), u)


def dissipator(op: np.ndarray, rate: float) -> np.ndarray:
    n = op.shape[0]
    eye = np.eye(n)
    ldl = op.conj().T @ op
    return rate * (np.kron(op.conj(), op) - 0.5 * (np.kron(eye, ldl) + np.kron(ldl.T, eye)))


def liouvillian(h: np.ndarray, collapse_ops=()) -> np.ndarray:
    """Lindblad generator for ``d rho/dt = -i[h, rho] + sum_k rate_k D[L_k] rho``.

    Parameters
    ----------
    h : ndarray
        Hermitian Hamiltonian.
    collapse_ops : iterable of (ndarray, float)
        Jump operators with their (non-negative) rates.
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    eye = np.eye(n)
    out = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for op, rate in collapse_ops:
        if rate < 0:
            raise ValueError(f"collapse rate must be >= 0, got {rate!r}")
        if rate == 0:
            continue
        out = out + dissipator(np.asarray(op, dtype=complex), rate)
    return out


def validity_errors(rho: np.ndarray) -> tuple[float, float, float]:
    """Return (trace error, Hermiticity error, minimum eigenvalue)."""
    rho = np.asarray(rho)
    trace_err = abs(np.trace(rho) - 1.0)
    herm_err = float(np.max(np.abs(rho - rho.conj().T)))
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
    return float(trace_err), herm_err, min_eig


def check_density_matrix(rho: np.ndarray, trace_tol=1e-9, herm_tol=1e-10, eig_tol=1e-9) -> None:
    trace_err, herm_err, min_eig = validity_errors(rho)
    if trace_err > trace_tol or herm_err > herm_tol or min_eig < -eig_tol:
        raise ValueError(
            f"invalid density matrix: trace error {trace_err:.3g}, "
            f"Hermiticity error {herm_err:.3g}, min eigenvalue {min_eig:.3g}"
        )


def global_phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``min_phi ||a - exp(i phi) b||`` in the Frobenius norm."""
    overlap = np.vdot(b, a)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))
