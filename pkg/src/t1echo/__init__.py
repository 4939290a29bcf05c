"""Simulator of the T1-echo pulse sequence for a qubit coherently coupled to a two-level memory."""
from .model import DerivedParams, NoiseRates, RWAWarning, SystemParams, derive, gamma_plus
from .open_dynamics import (
    NoiseModel,
    decay_curve,
    excited_population,
    generator,
    propagate,
    propagate_ode,
    pulse_loss_curve,
)
from .tomography import chi_analytic, chi_reconstruct, process_fidelity
from .unitary import (
    DetunedPulse,
    Free,
    IdealGate,
    PulseSchedule,
    echo_pulse,
    free_propagator,
    hamiltonian,
    pulse_via_detuning,
    run_schedule,
    state_to_bloch,
    t1_echo_schedule,
    trajectory,
)

__version__ = "0.1.0"
