"""Physical parameters of the qubit/memory pair and their closed-form derived quantities.

All rates are measured in units of the qubit relaxation rate (``gamma1_q = 1``
is the canonical normalization) and all times in ``1 / gamma1_q``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

DEFAULT_CLAMP_FACTOR = 50.0
RWA_RATIO = 0.1


class RWAWarning(UserWarning):
    """Coupling or detuning is not small compared to the lab-frame splitting."""


@dataclass(frozen=True)
class SystemParams:
    """Coherent parameters of the coupled pair.

    Parameters
    ----------
    v_perp : float
        Coupling strength, taken as the full vacuum-Rabi splitting at resonance.
    delta_omega : float
        Qubit-memory detuning ``eps_q - eps_m``.
    epsilon : float, optional
        Lab-frame splitting. Only used for the RWA sanity check and to
        reinstate lab-frame phases in process tomography.
    clamp_factor : float
        Bound ``K`` on the echo-pulse detuning, ``|delta_omega_1| <= K * v_perp``.
    """

    v_perp: float
    delta_omega: float = 0.0
    epsilon: float | None = None
    clamp_factor: float = DEFAULT_CLAMP_FACTOR

    def __post_init__(self):
        for name in ("v_perp", "delta_omega", "clamp_factor"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.v_perp <= 0:
            raise ValueError(f"v_perp must be > 0, got {self.v_perp!r}")
        if self.clamp_factor <= 0:
            raise ValueError(f"clamp_factor must be > 0, got {self.clamp_factor!r}")
        if self.epsilon is not None:
            limit = RWA_RATIO * abs(self.epsilon)
            if self.v_perp > limit or abs(self.delta_omega) > limit:
                warnings.warn(
                    f"v_perp={self.v_perp} / delta_omega={self.delta_omega} exceed "
                    f"{RWA_RATIO} * epsilon={self.epsilon}; rotating-wave approximation is doubtful",
                    RWAWarning,
                    stacklevel=2,
                )

    def with_detuning(self, delta_omega: float) -> SystemParams:
        return SystemParams(self.v_perp, delta_omega, self.epsilon, self.clamp_factor)


@dataclass(frozen=True)
class NoiseRates:
    """Markovian relaxation and pure-dephasing rates of qubit and memory."""

    gamma1_q: float = 1.0
    gamma1_m: float = 0.0
    gammaphi_q: float = 0.0
    gammaphi_m: float = 0.0

    def __post_init__(self):
        for name in ("gamma1_q", "gamma1_m", "gammaphi_q", "gammaphi_m"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be a finite rate >= 0, got {value!r}")

    @property
    def gamma2_q(self) -> float:
        return 0.5 * self.gamma1_q + self.gammaphi_q

    @property
    def gamma2_m(self) -> float:
        return 0.5 * self.gamma1_m + self.gammaphi_m

    @property
    def gamma_plus(self) -> float:
        return gamma_plus(self)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.gamma1_q, self.gamma1_m, self.gammaphi_q, self.gammaphi_m)


@dataclass(frozen=True)
class DerivedParams:
    omega0: float
    xi0: float
    delta_omega_1: float
    omega1: float
    t_pi: float
    gamma_plus: float
    t_swap: float
    xi1: float
    clamp_active: bool = False


def gamma_plus(noise: NoiseRates) -> float:
    """Mean of the qubit and memory relaxation rates."""
    return 0.5 * (noise.gamma1_q + noise.gamma1_m)


def omega(v_perp: float, delta_omega: float) -> float:
    """Vacuum-Rabi frequency at detuning ``delta_omega``."""
    return math.hypot(v_perp, delta_omega)


def detuning_angle(v_perp: float, delta_omega: float) -> float:
    """Angle of the precession axis from the z axis, in (0, pi) for ``v_perp > 0``."""
    return math.atan2(v_perp, delta_omega)


def pulse_detuning(params: SystemParams) -> tuple[float, bool]:
    """Detuning that turns free evolution into the perpendicular pi-rotation.

    Returns the detuning and whether the ``clamp_factor`` bound was applied.
    Exactly at resonance the clamped value carries the sign of the
    ``delta_omega -> 0+`` limit.
    """
    bound = params.clamp_factor * params.v_perp
    dw = params.delta_omega
    if dw == 0.0:
        return -bound, True
    dw1 = -params.v_perp**2 / dw
    if abs(dw1) > bound:
        return math.copysign(bound, dw1), True
    return dw1, False


def derive(params: SystemParams, noise: NoiseRates | None = None) -> DerivedParams:
    noise = noise if noise is not None else NoiseRates()
    dw1, clamped = pulse_detuning(params)
    omega1 = omega(params.v_perp, dw1)
    return DerivedParams(
        omega0=omega(params.v_perp, params.delta_omega),
        xi0=detuning_angle(params.v_perp, params.delta_omega),
        delta_omega_1=dw1,
        omega1=omega1,
        t_pi=math.pi / omega1,
        gamma_plus=gamma_plus(noise),
        t_swap=math.pi / params.v_perp,
        xi1=detuning_angle(params.v_perp, dw1),
        clamp_active=clamped,
    )
