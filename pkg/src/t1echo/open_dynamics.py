"""Dissipative evolution of the qubit/memory pair.

Two noise models are provided:

``lindblad``
    Local Lindblad operators on each subsystem: qubit and memory lowering
    operators at the relaxation rates and ``sigma_z`` / ``tau_z`` at half the
    pure-dephasing rates, so that coherences decay at ``gamma1/2 + gammaphi``.
``secular``
    The same operators resolved into Bohr-frequency components of the
    instantaneous dressed eigenbasis, keeping only secular terms (flat bath
    spectrum, zero temperature, no Lamb shift).

Piecewise-constant segments are propagated with the exact superoperator
exponential; :func:`propagate_ode` integrates the same generator with an
adaptive Runge-Kutta scheme as an independent check.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import linalg
from .model import NoiseRates, SystemParams
from .unitary import (
    IdealGate,
    PulseSchedule,
    hamiltonian,
    pulses_only_schedule,
    t1_echo_schedule,
)


class NoiseModel(str, enum.Enum):
    LINDBLAD_LOCAL = "lindblad"
    SECULAR_DRESSED = "secular"


# excitation number of each product-basis state
_EXCITATIONS = np.array([0, 1, 1, 2])


def local_collapse_ops(noise: NoiseRates):
    return [
        (linalg.on_qubit(linalg.LOWER), noise.gamma1_q),
        (linalg.on_memory(linalg.LOWER), noise.gamma1_m),
        (linalg.on_qubit(linalg.SIGMA_Z), 0.5 * noise.gammaphi_q),
        (linalg.on_memory(linalg.SIGMA_Z), 0.5 * noise.gammaphi_m),
    ]


def dressed_basis(h: np.ndarray):
    """Eigenvectors, energies and excitation numbers of an excitation-conserving ``h``.

    Diagonalizing sector by sector keeps ``|0q 0m>`` and ``|1q 1m>`` apart
    even when they are degenerate in the rotating frame.
    """
    vecs = np.zeros((linalg.DIM, linalg.DIM), dtype=complex)
    energies = np.zeros(linalg.DIM)
    numbers = np.zeros(linalg.DIM, dtype=int)
    col = 0
    for n in range(3):
        idx = np.flatnonzero(_EXCITATIONS == n)
        block = h[np.ix_(idx, idx)]
        w, v = np.linalg.eigh(block)
        for k in range(len(idx)):
            vecs[idx, col] = v[:, k]
            energies[col] = w[k]
            numbers[col] = n
            col += 1
    return vecs, energies, numbers


def secular_components(op: np.ndarray, h: np.ndarray, tol: float = 1e-9):
    """Split ``op`` into its Bohr-frequency components ``A(omega)`` in the eigenbasis of ``h``.

    Transitions are grouped by excitation change and energy release; within a
    group cross terms are kept, between groups they are dropped.
    """
    vecs, energies, numbers = dressed_basis(h)
    op_e = vecs.conj().T @ op @ vecs
    scale = tol * (1.0 + float(np.max(np.abs(energies))))
    groups: list[tuple[int, float, list[tuple[int, int]]]] = []
    for a in range(linalg.DIM):
        for b in range(linalg.DIM):
            if abs(op_e[a, b]) < 1e-14:
                continue
            dn, de = numbers[b] - numbers[a], energies[b] - energies[a]
            for g_dn, g_de, members in groups:
                if g_dn == dn and abs(g_de - de) <= scale:
                    members.append((a, b))
                    break
            else:
                groups.append((dn, de, [(a, b)]))
    comps = []
    for _, _, members in groups:
        part = np.zeros_like(op_e)
        for a, b in members:
            part[a, b] = op_e[a, b]
        comps.append(vecs @ part @ vecs.conj().T)
    return comps


def generator(
    params: SystemParams,
    noise: NoiseRates,
    model: NoiseModel | str = NoiseModel.LINDBLAD_LOCAL,
    detuning_override: float | None = None,
) -> np.ndarray:
    """16x16 generator of one constant-detuning segment (column-stacked)."""
    model = NoiseModel(model)
    h = hamiltonian(params, detuning_override)
    ops = local_collapse_ops(noise)
    if model is NoiseModel.SECULAR_DRESSED:
        ops = [(comp, rate) for op, rate in ops if rate > 0 for comp in secular_components(op, h)]
    return linalg.liouvillian(h, ops)


@functools.lru_cache(maxsize=4096)
def _segment_superop(v_perp, clamp_factor, detuning, duration, model, rates):
    params = SystemParams(v_perp, detuning, clamp_factor=clamp_factor)
    gen = generator(params, NoiseRates(*rates), model)
    out = linalg.expm(gen * duration)
    out.setflags(write=False)
    return out


def segment_superop(seg, params: SystemParams, noise: NoiseRates, model) -> np.ndarray:
    """Cached propagator of one schedule segment; read-only."""
    if isinstance(seg, IdealGate):
        return linalg.unitary_superop(linalg.embed_subspace(seg.unitary))
    return _segment_superop(
        params.v_perp, params.clamp_factor, float(seg.detuning), float(seg.duration),
        NoiseModel(model).value, noise.as_tuple(),
    )


def _check_rho(rho0) -> np.ndarray:
    rho = np.asarray(rho0, dtype=complex)
    if rho.shape != (linalg.DIM, linalg.DIM):
        raise ValueError(f"density matrix must be {linalg.DIM}x{linalg.DIM}, got shape {rho.shape}")
    return rho


def propagate_steps(schedule: PulseSchedule, rho0, noise: NoiseRates, model=NoiseModel.LINDBLAD_LOCAL):
    """Yield ``(elapsed_time, rho)`` after every segment, starting with ``rho0``."""
    rho = _check_rho(rho0)
    t = 0.0
    yield t, rho
    v = linalg.vec(rho)
    for seg in schedule.segments:
        v = segment_superop(seg, schedule.params, noise, model) @ v
        t += getattr(seg, "duration", 0.0)
        yield t, linalg.unvec(v)


def propagate(schedule: PulseSchedule, rho0, noise: NoiseRates, model=NoiseModel.LINDBLAD_LOCAL) -> np.ndarray:
    for _, rho in propagate_steps(schedule, rho0, noise, model):
        pass
    return rho


def propagate_ode(
    schedule: PulseSchedule,
    rho0,
    noise: NoiseRates,
    model=NoiseModel.LINDBLAD_LOCAL,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
) -> np.ndarray:
    """Adaptive-step integration of ``d vec(rho)/dt = L vec(rho)`` segment by segment."""
    if not (rel_tol > 0 and abs_tol > 0):
        raise ValueError("tolerances must be > 0")
    v = linalg.vec(_check_rho(rho0)).copy()
    for seg in schedule.segments:
        if isinstance(seg, IdealGate):
            v = linalg.unitary_superop(linalg.embed_subspace(seg.unitary)) @ v
            continue
        if seg.duration == 0:
            continue
        gen = generator(schedule.params, noise, model, detuning_override=seg.detuning)
        sol = solve_ivp(
            lambda _t, y: gen @ y, (0.0, seg.duration), v,
            method="DOP853", rtol=rel_tol, atol=abs_tol, jac=gen,
        )
        if not sol.success:
            raise RuntimeError(f"ODE integration failed: {sol.message}")
        v = sol.y[:, -1]
    return linalg.unvec(v)


def excited_population(rho) -> float:
    """Population of the qubit excited state, ``<1q| Tr_m rho |1q>``."""
    rho = np.asarray(rho)
    return float((rho[2, 2] + rho[3, 3]).real)


INITIAL_STATE = linalg.dm(linalg.basis_state(1, 0))


@dataclass
class Curve:
    """Simulated excited-state population along a grid.

    ``x`` is elapsed time (decay) or initial detuning (pulse loss).  Every
    intermediate density matrix is kept in ``states`` when requested.
    """

    x: np.ndarray
    p1q: np.ndarray
    ref_qubit: np.ndarray
    ref_gamma_plus: np.ndarray
    states: list = field(default_factory=list, repr=False)


def decay_curve(
    params: SystemParams,
    noise: NoiseRates,
    pulse_mode: str,
    model=NoiseModel.LINDBLAD_LOCAL,
    t_grid=(),
    ideal_z: bool = False,
    keep_states: bool = False,
) -> Curve:
    """Qubit excited population versus elapsed time.

    ``t_grid`` holds free-evolution times ``T``.  With Hamiltonian pulses the
    reported time is ``T + 2 t_pi`` since the pulses take time as well.
    References are evaluated at the reported times.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size and (np.any(t_grid < 0) or np.any(np.diff(t_grid) < 0)):
        raise ValueError("t_grid must be ascending and >= 0")
    times, pops, states = [], [], []
    for T in t_grid:
        sched = t1_echo_schedule(params, float(T), pulse_mode, ideal_z=ideal_z)
        for _, rho in propagate_steps(sched, INITIAL_STATE, noise, model):
            if keep_states:
                states.append(rho)
        times.append(sched.duration)
        pops.append(excited_population(rho))
    times = np.array(times)
    return Curve(
        x=times,
        p1q=np.array(pops),
        ref_qubit=np.exp(-noise.gamma1_q * times),
        ref_gamma_plus=np.exp(-noise.gamma_plus * times),
        states=states,
    )


def pulse_loss_curve(
    params: SystemParams,
    noise: NoiseRates,
    model=NoiseModel.LINDBLAD_LOCAL,
    delta_omegas=(),
    ideal_z: bool = False,
    keep_states: bool = False,
) -> Curve:
    """Qubit excited population after only the two detuned pulses, versus initial detuning."""
    dws = np.asarray(delta_omegas, dtype=float)
    pops, ref_q, ref_p, states = [], [], [], []
    for dw in dws:
        p = params.with_detuning(float(dw))
        sched = pulses_only_schedule(p, ideal_z=ideal_z)
        for _, rho in propagate_steps(sched, INITIAL_STATE, noise, model):
            if keep_states:
                states.append(rho)
        two_tpi = sched.duration
        pops.append(excited_population(rho))
        ref_q.append(math.exp(-noise.gamma1_q * two_tpi))
        ref_p.append(math.exp(-noise.gamma_plus * two_tpi))
    return Curve(x=dws, p1q=np.array(pops), ref_qubit=np.array(ref_q), ref_gamma_plus=np.array(ref_p), states=states)
