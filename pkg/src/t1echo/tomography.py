"""Single-qubit process tomography of the echo sequence in the Pauli basis.

A channel is written ``E(rho) = sum_mn chi[m, n] P_m rho P_n^dag`` with
``P = (I, X, Y, Z)``.  The memory is traced out and starts in its ground state.
"""
from __future__ import annotations

import math

import numpy as np

from . import linalg
from .model import NoiseRates, SystemParams
from .open_dynamics import NoiseModel, propagate
from .unitary import PulseSchedule, t1_echo_schedule

BASIS_LABELS = ("I", "X", "Y", "Z")

# column-stacked superoperator of rho -> P_m rho P_n^dag, one column per (m, n)
_CHI_TO_SUPEROP = np.column_stack(
    [np.kron(pn.conj(), pm).reshape(-1) for pm in linalg.PAULIS for pn in linalg.PAULIS]
)


def chi_analytic(gamma_plus: float, epsilon: float, t: float) -> np.ndarray:
    """Closed-form chi matrix of the echo sequence under relaxation only.

    ``epsilon = 0`` gives the rotating-frame channel.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    e = math.exp(-gamma_plus * t)
    h = math.exp(-0.5 * gamma_plus * t)
    c, s = math.cos(epsilon * t), math.sin(epsilon * t)
    chi = np.zeros((4, 4), dtype=complex)
    chi[0, 0] = 1 + e - 2 * h * c
    chi[0, 3] = 1 - e - 2j * h * s
    chi[3, 0] = 1 - e + 2j * h * s
    chi[3, 3] = 1 + e + 2 * h * c
    chi[1, 1] = chi[2, 2] = 1 - e
    chi[1, 2] = -1j * (1 - e)
    chi[2, 1] = 1j * (1 - e)
    return chi / 4


def chi_from_superop(superop: np.ndarray) -> np.ndarray:
    """Solve ``superop = sum_mn chi_mn conj(P_n) (x) P_m`` for chi (linear inversion)."""
    cond = np.linalg.cond(_CHI_TO_SUPEROP)
    assert cond < 1e6, "Pauli process basis is singular"
    sol = np.linalg.solve(_CHI_TO_SUPEROP, np.asarray(superop).reshape(-1))
    return sol.reshape(4, 4)


def chi_from_kraus(kraus) -> np.ndarray:
    """chi matrix of a channel given by Kraus operators."""
    chi = np.zeros((4, 4), dtype=complex)
    for k in kraus:
        coeffs = np.array([0.5 * np.trace(p.conj().T @ k) for p in linalg.PAULIS])
        chi += np.outer(coeffs, coeffs.conj())
    return chi


def apply_chi(chi: np.ndarray, rho: np.ndarray) -> np.ndarray:
    out = np.zeros((2, 2), dtype=complex)
    for m, pm in enumerate(linalg.PAULIS):
        for n, pn in enumerate(linalg.PAULIS):
            out += chi[m, n] * pm @ rho @ pn.conj().T
    return out


_INPUTS = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / math.sqrt(2),
    "+i": np.array([1, 1j], dtype=complex) / math.sqrt(2),
}


def qubit_map_superop(channel) -> np.ndarray:
    """Reconstruct the 4x4 qubit superoperator from the four standard input states.

    ``channel`` maps a 2x2 qubit density matrix to a 2x2 output.
    """
    out = {k: channel(np.outer(v, v.conj())) for k, v in _INPUTS.items()}
    e00, e11 = out["0"], out["1"]
    e01 = out["+"] + 1j * out["+i"] - 0.5 * (1 + 1j) * (e00 + e11)
    e10 = out["+"] - 1j * out["+i"] - 0.5 * (1 - 1j) * (e00 + e11)
    images = {(0, 0): e00, (0, 1): e01, (1, 0): e10, (1, 1): e11}
    superop = np.zeros((4, 4), dtype=complex)
    for (i, j), img in images.items():
        unit = np.zeros((2, 2))
        unit[i, j] = 1.0
        superop[:, np.flatnonzero(linalg.vec(unit))[0]] = linalg.vec(img)
    return superop


def sequence_channel(schedule: PulseSchedule, noise: NoiseRates, model=NoiseModel.SECULAR_DRESSED):
    """Qubit channel of a schedule with the memory prepared in ``|0m>`` and traced out."""
    mem0 = np.array([[1, 0], [0, 0]], dtype=complex)

    def channel(rho_q):
        rho = propagate(schedule, np.kron(rho_q, mem0), noise, model)
        return linalg.partial_trace_memory(rho)

    return channel


def lab_frame_phase(epsilon: float, t: float) -> np.ndarray:
    """Qubit precession ``diag(1, exp(i epsilon t))`` removed by the rotating frame."""
    return np.diag([1.0, np.exp(1j * epsilon * t)])


def chi_reconstruct(
    params: SystemParams,
    noise: NoiseRates,
    model=NoiseModel.SECULAR_DRESSED,
    t: float = 1.0,
    pulses: str = "ideal",
    epsilon: float = 0.0,
    sequence_builder=t1_echo_schedule,
) -> np.ndarray:
    """Linear-inversion process tomography of the full sequence of free time ``t``.

    ``sequence_builder(params, t, pulses)`` must return a :class:`PulseSchedule`.
    A nonzero ``epsilon`` reinstates the lab-frame qubit precession over ``t``.
    """
    schedule = sequence_builder(params, t, pulses)
    channel = sequence_channel(schedule, noise, model)
    if epsilon:
        u = lab_frame_phase(epsilon, t)
        inner = channel

        def channel(rho_q):
            return u @ inner(rho_q) @ u.conj().T

    return chi_from_superop(qubit_map_superop(channel))


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def process_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Uhlmann fidelity of the trace-normalized chi matrices.

    Equals ``Tr(a b)`` when either channel is unitary (rank-one chi) and 1
    for identical channels.
    """
    a = np.asarray(a) / np.trace(a).real
    b = np.asarray(b) / np.trace(b).real
    sa = _psd_sqrt(a)
    w = np.linalg.eigvalsh(sa @ b @ sa)
    f = float(np.sum(np.sqrt(np.clip(w, 0, None))) ** 2)
    return min(max(f, 0.0), 1.0)


def chi_invariant_errors(chi: np.ndarray) -> dict[str, float]:
    """Deviations from Hermiticity, unit trace, non-negative diagonal and trace preservation."""
    chi = np.asarray(chi)
    tp = np.zeros((2, 2), dtype=complex)
    for m, pm in enumerate(linalg.PAULIS):
        for n, pn in enumerate(linalg.PAULIS):
            tp += chi[m, n] * pn.conj().T @ pm
    diag = np.diag(chi)
    return {
        "hermitian": float(np.max(np.abs(chi - chi.conj().T))),
        "trace": float(abs(np.trace(chi) - 1)),
        "diag_negative": float(max(0.0, -np.min(diag.real))),
        "diag_imag": float(np.max(np.abs(diag.imag))),
        "trace_preserving": float(np.max(np.abs(tp - np.eye(2)))),
    }
