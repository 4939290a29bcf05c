"""Closed-system evolution of the qubit/memory pair and the T1-echo pulse schedule.

The rotating frame is chosen so that the one-excitation block of the
Hamiltonian is traceless and ``|0q 0m>``, ``|1q 1m>`` have zero energy.  In
subspace order ``(|1q 0m>, |0q 1m>)`` the block reads

    [[-dw/2, v/2],
     [ v/2, dw/2]]

which exponentiates to the free-precession operator below.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .model import SystemParams, derive, detuning_angle, omega

PULSE_MODES = ("none", "ideal", "hamiltonian")


def hamiltonian(params: SystemParams, detuning_override: float | None = None) -> np.ndarray:
    """4x4 rotating-frame Hamiltonian ``-dw/2 n_q + dw/2 n_m + v/2 (s+ t- + s- t+)``."""
    dw = params.delta_omega if detuning_override is None else detuning_override
    h = np.zeros((linalg.DIM, linalg.DIM), dtype=complex)
    h[np.ix_(linalg.SUBSPACE, linalg.SUBSPACE)] = subspace_hamiltonian(params.v_perp, dw)
    return h


def subspace_hamiltonian(v_perp: float, delta_omega: float) -> np.ndarray:
    return 0.5 * np.array([[-delta_omega, v_perp], [v_perp, delta_omega]], dtype=complex)


def _precession(omega_t: float, xi: float) -> np.ndarray:
    c, s = math.cos(xi), math.sin(xi)
    axis = np.array([[-c, s], [s, c]], dtype=complex)
    return math.cos(0.5 * omega_t) * np.eye(2) - 1j * math.sin(0.5 * omega_t) * axis


def free_propagator(t: float, params: SystemParams, detuning_override: float | None = None) -> np.ndarray:
    """One-excitation propagator ``exp(-i H1 t)`` in closed form."""
    if t < 0:
        raise ValueError(f"duration must be >= 0, got {t!r}")
    dw = params.delta_omega if detuning_override is None else detuning_override
    return _precession(omega(params.v_perp, dw) * t, detuning_angle(params.v_perp, dw))


def echo_pulse(params: SystemParams) -> np.ndarray:
    """Pi-rotation about the in-plane axis perpendicular to free precession."""
    xi = detuning_angle(params.v_perp, params.delta_omega)
    s, c = math.sin(xi), math.cos(xi)
    return 1j * np.array([[s, c], [c, -s]], dtype=complex)


def pulse_via_detuning(params: SystemParams) -> np.ndarray:
    """Echo pulse realized as free evolution at the pulse detuning for ``t_pi``.

    Equal to :func:`echo_pulse` up to a global phase unless the detuning
    clamp is engaged, in which case the axis is off by ``atan(1/K)``.
    """
    d = derive(params)
    return free_propagator(d.t_pi, params, detuning_override=d.delta_omega_1)


def rotation_axis(u: np.ndarray) -> np.ndarray:
    """Unit rotation axis of a 2x2 unitary (sign is arbitrary)."""
    u = np.asarray(u, dtype=complex)
    su = u / np.sqrt(np.linalg.det(u))
    comps = np.array([0.5j * np.trace(su @ p) for p in linalg.PAULIS[1:]])
    # drop the arbitrary overall sign/phase left by the square root
    comps = comps * np.exp(-1j * np.angle(comps[np.argmax(np.abs(comps))]))
    axis = comps.real
    return axis / np.linalg.norm(axis)


# --- schedules --------------------------------------------------------------


@dataclass(frozen=True)
class Free:
    duration: float
    detuning: float


@dataclass(frozen=True)
class DetunedPulse:
    duration: float
    detuning: float


@dataclass(frozen=True, eq=False)
class IdealGate:
    unitary: np.ndarray
    label: str = "gate"


@dataclass(frozen=True)
class PulseSchedule:
    params: SystemParams
    segments: tuple = field(default=())

    def __post_init__(self):
        for seg in self.segments:
            if isinstance(seg, (Free, DetunedPulse)):
                if not (seg.duration >= 0 and math.isfinite(seg.duration)):
                    raise ValueError(f"segment duration must be finite and >= 0: {seg!r}")
            elif isinstance(seg, IdealGate):
                if np.shape(seg.unitary) != (2, 2):
                    raise ValueError("ideal gates act on the 2-dim one-excitation subspace")
            else:
                raise TypeError(f"unknown schedule segment {seg!r}")

    @property
    def duration(self) -> float:
        return sum(getattr(s, "duration", 0.0) for s in self.segments)


def t1_echo_schedule(
    params: SystemParams,
    free_time: float,
    pulses: str = "ideal",
    recovery: bool = True,
    ideal_z: bool = False,
) -> PulseSchedule:
    """Free(T/2), echo, Free(T/2), recovery.

    ``pulses`` selects instantaneous gates (``"ideal"``), detuned free
    evolution (``"hamiltonian"``) or no pulses at all (``"none"``, a single
    free segment of length ``free_time``).  With ``ideal_z`` a resonant
    Hamiltonian-mode schedule uses the exact instantaneous gate instead of
    the clamped detuned pulse.
    """
    if pulses not in PULSE_MODES:
        raise ValueError(f"pulses must be one of {PULSE_MODES}, got {pulses!r}")
    if free_time < 0:
        raise ValueError(f"free_time must be >= 0, got {free_time!r}")
    dw = params.delta_omega
    half = Free(0.5 * free_time, dw)
    if pulses == "none":
        return PulseSchedule(params, (Free(free_time, dw),))
    if pulses == "ideal" or (ideal_z and dw == 0.0):
        u = echo_pulse(params)
        echo, rec = IdealGate(u, "echo"), IdealGate(u, "recovery")
    else:
        d = derive(params)
        echo = rec = DetunedPulse(d.t_pi, d.delta_omega_1)
    segments = [half, echo, half] + ([rec] if recovery else [])
    return PulseSchedule(params, tuple(segments))


def pulses_only_schedule(params: SystemParams, ideal_z: bool = False) -> PulseSchedule:
    """Echo and recovery pulses back to back via detuned evolution (no free time)."""
    full = t1_echo_schedule(params, 0.0, "hamiltonian", ideal_z=ideal_z)
    return PulseSchedule(params, tuple(s for s in full.segments if not isinstance(s, Free)))


def segment_unitary(seg, params: SystemParams) -> np.ndarray:
    """Full-space 4x4 unitary of one schedule segment."""
    if isinstance(seg, IdealGate):
        return linalg.embed_subspace(seg.unitary)
    return linalg.embed_subspace(free_propagator(seg.duration, params, detuning_override=seg.detuning))


def schedule_unitary(schedule: PulseSchedule) -> np.ndarray:
    u = np.eye(linalg.DIM, dtype=complex)
    for seg in schedule.segments:
        u = segment_unitary(seg, schedule.params) @ u
    return u


def run_schedule(schedule: PulseSchedule, psi0: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi0, dtype=complex)
    if psi.shape != (linalg.DIM,):
        raise ValueError(f"state must have shape ({linalg.DIM},), got {psi.shape}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-12:
        raise ValueError("initial state is not normalized")
    for seg in schedule.segments:
        psi = segment_unitary(seg, schedule.params) @ psi
    return psi


# --- Bloch sphere -----------------------------------------------------------


def state_to_bloch(psi: np.ndarray, leakage_tol: float = 1e-9) -> np.ndarray:
    """Effective Bloch vector of a one-excitation state.

    ``|1q 0m>`` maps to (0, 0, 1) and ``(|1q 0m> + i|0q 1m>)/sqrt2`` to (0, 1, 0).
    """
    psi = np.asarray(psi, dtype=complex)
    leak = max(abs(psi[linalg.GROUND]), abs(psi[linalg.DOUBLE]))
    if leak > leakage_tol:
        raise ValueError(f"state leaks out of the one-excitation subspace (amplitude {leak:.3g})")
    a, b = psi[linalg.SUBSPACE[0]], psi[linalg.SUBSPACE[1]]
    return np.array([2 * (a * b.conjugate()).real, 2 * (b * a.conjugate()).imag, abs(a) ** 2 - abs(b) ** 2])


def excited_population_pure(psi: np.ndarray) -> float:
    psi = np.asarray(psi)
    return float(abs(psi[2]) ** 2 + abs(psi[3]) ** 2)


def trajectory(schedule: PulseSchedule, psi0: np.ndarray, sample_dt: float):
    """Sample the state densely along a schedule.

    Returns a list of ``(time, bloch_vector, psi)``.  Ideal gates add a
    second sample at the timestamp of the state they act on.
    """
    if not sample_dt > 0:
        raise ValueError(f"sample_dt must be > 0, got {sample_dt!r}")
    psi = np.asarray(psi0, dtype=complex)
    t = 0.0
    out = [(t, state_to_bloch(psi), psi)]
    params = schedule.params
    for seg in schedule.segments:
        if isinstance(seg, IdealGate):
            psi = linalg.embed_subspace(seg.unitary) @ psi
            out.append((t, state_to_bloch(psi), psi))
            continue
        n_inner = max(int(math.ceil(seg.duration / sample_dt)) - 1, 0)
        taus = [k * sample_dt for k in range(1, n_inner + 1)] + [seg.duration]
        if seg.duration == 0:
            taus = []
        for tau in taus:
            u = linalg.embed_subspace(free_propagator(tau, params, detuning_override=seg.detuning))
            phi = u @ psi
            out.append((t + tau, state_to_bloch(phi), phi))
        psi = segment_unitary(seg, params) @ psi
        t += seg.duration
    return out
