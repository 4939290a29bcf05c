import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from t1echo import linalg
from t1echo.model import NoiseRates, SystemParams, derive
from t1echo.open_dynamics import (
    INITIAL_STATE,
    NoiseModel,
    decay_curve,
    dressed_basis,
    excited_population,
    generator,
    propagate,
    propagate_ode,
    propagate_steps,
    pulse_loss_curve,
    secular_components,
)
from t1echo.unitary import Free, PulseSchedule, hamiltonian, run_schedule, t1_echo_schedule

from conftest import random_density_matrix

MODELS = list(NoiseModel)
TRACE_ROW = linalg.vec(np.eye(4)).conj()


@pytest.mark.parametrize("model", MODELS)
def test_noiseless_generator_is_anti_hermitian(model):
    g = generator(SystemParams(5, 1.3), NoiseRates(0), model)
    assert np.max(np.abs(g + g.conj().T)) < 1e-14


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("noise", [NoiseRates(1, 0.3, 0.5, 0.2), NoiseRates(0, 0, 1, 0), NoiseRates(2)])
def test_generator_is_trace_preserving(model, noise):
    g = generator(SystemParams(5, 0.8), noise, model)
    assert np.max(np.abs(TRACE_ROW @ g)) < 1e-12


def test_bare_qubit_decay():
    # a tiny coupling at huge detuning leaves the qubit effectively alone
    p = SystemParams(1e-9, 1e3)
    rho = propagate(PulseSchedule(p, (Free(1.7, 1e3),)), INITIAL_STATE, NoiseRates(1))
    assert excited_population(rho) == pytest.approx(math.exp(-1.7), rel=1e-9)


def test_negative_rates_rejected():
    with pytest.raises(ValueError):
        NoiseRates(-1)
    with pytest.raises(ValueError):
        linalg.liouvillian(np.zeros((4, 4)), [(linalg.on_qubit(linalg.LOWER), -0.5)])


@pytest.mark.parametrize("dw", [0.0, 3.0, -7.0])
def test_secular_dressed_decay_rates(dw):
    p, noise = SystemParams(5, dw), NoiseRates(1, 0.25)
    vecs, energies, numbers = dressed_basis(hamiltonian(p))
    g = generator(p, noise, "secular")
    for k in np.flatnonzero(numbers == 1):
        state = vecs[:, k]
        rate = -(linalg.vec(linalg.dm(state)).conj() @ g @ linalg.vec(linalg.dm(state))).real
        expected = 1.0 * abs(state[2]) ** 2 + 0.25 * abs(state[1]) ** 2
        assert rate == pytest.approx(expected, abs=1e-12)
        if dw == 0:
            assert rate == pytest.approx(0.5 * (1 + 0.25))


def test_secular_resonant_dressed_states_decay_at_half_rate():
    p = SystemParams(5, 0)
    vecs, _, numbers = dressed_basis(hamiltonian(p))
    for k in np.flatnonzero(numbers == 1):
        rho0 = linalg.dm(vecs[:, k])
        rho = propagate(PulseSchedule(p, (Free(1.0, 0.0),)), rho0, NoiseRates(1), "secular")
        assert np.real(np.trace(rho @ rho0)) == pytest.approx(math.exp(-0.5), rel=1e-12)


def test_secular_components_sum_to_operator():
    h = hamiltonian(SystemParams(5, 2))
    op = linalg.on_qubit(linalg.SIGMA_Z)
    assert np.allclose(sum(secular_components(op, h)), op, atol=1e-14)
    assert len(secular_components(linalg.on_qubit(linalg.LOWER), h)) == 2


def test_dressed_basis_keeps_sectors_apart():
    vecs, energies, numbers = dressed_basis(hamiltonian(SystemParams(5, 0)))
    assert np.allclose(vecs[:, 0], linalg.basis_state(0, 0))
    assert np.allclose(vecs[:, 3], linalg.basis_state(1, 1))
    assert list(numbers) == [0, 1, 1, 2]


def test_empty_schedule_returns_input(rng):
    rho = random_density_matrix(rng)
    out = propagate(PulseSchedule(SystemParams(1, 0)), rho, NoiseRates(1, 1, 1, 1))
    assert np.array_equal(out, rho)
    assert np.array_equal(propagate_ode(PulseSchedule(SystemParams(1, 0)), rho, NoiseRates()), rho)


def test_zero_duration_schedule_for_ode(rng):
    rho = random_density_matrix(rng)
    s = PulseSchedule(SystemParams(1, 0), (Free(0.0, 0.0),))
    assert np.array_equal(propagate_ode(s, rho, NoiseRates()), rho)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        propagate(PulseSchedule(SystemParams(1, 0)), np.eye(2) / 2, NoiseRates())


@pytest.mark.parametrize("model", MODELS)
def test_closed_system_limit(model):
    p = SystemParams(5, 1.7)
    for pulses in ("none", "ideal", "hamiltonian"):
        s = t1_echo_schedule(p, 1.3, pulses)
        psi = run_schedule(s, linalg.basis_state(1, 0))
        rho = propagate(s, INITIAL_STATE, NoiseRates(0), model)
        assert np.max(np.abs(rho - linalg.dm(psi))) < 1e-10
        rho_ode = propagate_ode(s, INITIAL_STATE, NoiseRates(0), model)
        assert np.max(np.abs(rho_ode - linalg.dm(psi))) < 1e-8


def test_ideal_echo_decay_law_example():
    s = t1_echo_schedule(SystemParams(5, 5), 2.0, "ideal")
    rho = propagate(s, INITIAL_STATE, NoiseRates(1), "secular")
    assert excited_population(rho) == pytest.approx(math.exp(-1.0), abs=1e-12)


@pytest.mark.parametrize("model", MODELS)
def test_ode_agrees_with_expm(model):
    noise = NoiseRates(1, 0.2, 0.5, 0.1)
    s = t1_echo_schedule(SystemParams(5, 5), 1.7, "hamiltonian")
    a = propagate(s, INITIAL_STATE, noise, model)
    b = propagate_ode(s, INITIAL_STATE, noise, model, rel_tol=1e-10, abs_tol=1e-12)
    assert np.max(np.abs(a - b)) < max(10 * 1e-10, 1e-8)


def test_ode_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        propagate_ode(PulseSchedule(SystemParams(1, 0)), INITIAL_STATE, NoiseRates(), rel_tol=0)


def test_excited_population_examples():
    assert excited_population(INITIAL_STATE) == 1
    assert excited_population(linalg.dm(linalg.basis_state(0, 0))) == 0
    t = 0.37
    rho = propagate(PulseSchedule(SystemParams(5, 0), (Free(t, 0.0),)), INITIAL_STATE, NoiseRates(0))
    assert excited_population(rho) == pytest.approx(math.cos(2.5 * t) ** 2, abs=1e-12)


@given(st.floats(0, 5), st.floats(-10, 10), st.sampled_from(MODELS), st.sampled_from(["none", "ideal", "hamiltonian"]))
@settings(max_examples=40, deadline=None)
def test_state_validity_along_schedules(T, dw, model, pulses):
    noise = NoiseRates(1, 0.3, 0.5, 0.2)
    s = t1_echo_schedule(SystemParams(5, dw), T, pulses)
    for _, rho in propagate_steps(s, INITIAL_STATE, noise, model):
        linalg.check_density_matrix(rho)


def test_segment_cache_is_read_only():
    from t1echo.open_dynamics import segment_superop

    m = segment_superop(Free(1.0, 0.5), SystemParams(5, 0.5), NoiseRates(1), "lindblad")
    with pytest.raises(ValueError):
        m[0, 0] = 1


def test_decay_curve_time_axes():
    p, noise = SystemParams(5, 1), NoiseRates(1, 0, 0.5)
    T = np.linspace(0, 1, 5)
    ideal = decay_curve(p, noise, "ideal", "lindblad", T)
    ham = decay_curve(p, noise, "hamiltonian", "lindblad", T)
    assert np.array_equal(ideal.x, T)
    assert np.allclose(ham.x, T + 2 * derive(p).t_pi)
    assert np.allclose(ham.ref_qubit, np.exp(-ham.x))
    assert decay_curve(p, noise, "none", "lindblad", [0.0]).p1q[0] == pytest.approx(1)
    with pytest.raises(ValueError):
        decay_curve(p, noise, "none", "lindblad", [1.0, 0.5])


def test_resonant_free_decay_envelope():
    # secular resonant solution: exp(-gamma_plus t) cos^2(omega0 t / 2)
    T = np.linspace(0, 4, 81)
    c = decay_curve(SystemParams(5, 0), NoiseRates(1), "none", "secular", T)
    assert np.max(np.abs(c.p1q - np.exp(-0.5 * T) * np.cos(2.5 * T) ** 2)) < 1e-12


@pytest.mark.parametrize("dw", [0.0, 5.0, 15.0])
def test_secular_decay_law_detuning_independent(dw):
    T = np.linspace(0, 4, 21)
    c = decay_curve(SystemParams(5, dw), NoiseRates(1, 0.4), "ideal", "secular", T)
    assert np.max(np.abs(c.p1q - np.exp(-0.7 * T))) < 1e-8


def test_pulse_loss_without_noise_is_lossless():
    c = pulse_loss_curve(SystemParams(5, 0), NoiseRates(0), "lindblad", [0.3, 1, 5, 20])
    assert np.allclose(c.p1q, 1, atol=1e-12)
    assert np.allclose(c.ref_qubit, 1)


def test_pulse_loss_returns_start_state():
    p = SystemParams(5, 5)
    c = pulse_loss_curve(p, NoiseRates(0), "lindblad", [5.0], keep_states=True)
    assert np.max(np.abs(c.states[-1] - INITIAL_STATE)) < 1e-12


def test_pulse_loss_references():
    c = pulse_loss_curve(SystemParams(5, 0), NoiseRates(1, 0, 0.5), "lindblad", [2.0])
    two_tpi = 2 * derive(SystemParams(5, 2.0)).t_pi
    assert c.ref_qubit[0] == pytest.approx(math.exp(-two_tpi))
    assert c.ref_gamma_plus[0] == pytest.approx(math.exp(-0.5 * two_tpi))
