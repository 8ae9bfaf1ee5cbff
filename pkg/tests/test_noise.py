import numpy as np
import pytest

from mu_metrics import grids
from mu_metrics.noise import (
    moment_disturbance_sq,
    moment_error_sq,
    ozawa_disturbance,
    ozawa_disturbance_dilated,
    ozawa_error,
    ozawa_error_dilated,
    ozawa_error_sq,
    product_check,
    three_state_error,
)
from mu_metrics.operators import (
    DimensionError,
    DiscretePOVM,
    MeasurementModel,
    Observable,
    State,
    bloch_operator,
    constant_channel,
    identity_channel,
    measure_and_prepare,
    model_to_channel,
    model_to_povm,
    povm_dilation,
    swap_operator,
)
from mu_metrics.qubit import BlochObservable
from mu_metrics.sampling import (
    random_model,
    random_observable,
    random_povm,
    random_pure_state,
    random_state,
)


def _unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def _variance(rho, b):
    return np.trace(rho @ b @ b).real - np.trace(rho @ b).real ** 2


# -- error ----------------------------------------------------------------


def test_error_of_exact_measurement_is_zero(rng):
    for _ in range(10):
        obs = random_observable(rng, 3, degenerate=bool(rng.integers(2)))
        assert ozawa_error(random_state(rng, 3), obs, DiscretePOVM.spectral(obs)) <= 1e-7


def test_error_qubit_unbiased_formula_and_dilation(rng):
    for _ in range(20):
        a = _unit(rng)
        c = _unit(rng) * rng.uniform(0, 1)
        povm = BlochObservable.unbiased(c).povm()
        target = Observable(bloch_operator(a))
        expected = np.sqrt(2 * (1 - a @ c))
        model = povm_dilation(povm)
        for _ in range(5):
            s = random_state(rng, 2)
            assert ozawa_error(s, target, povm) == pytest.approx(expected, abs=1e-12)
            assert ozawa_error_dilated(s, model, target) == pytest.approx(expected, abs=1e-10)


def test_error_parity_construction():
    x = Observable.diagonal([-2.0, -1.0, 1.0, 2.0])
    inverted = DiscretePOVM.spectral(Observable(-x.operator))
    sym = State.pure([0.5, 0.5, 0.5, 0.5])
    # 2 sqrt(<X^2>) with <X^2> = (4 + 1 + 1 + 4)/4
    assert ozawa_error(sym, x, inverted) == pytest.approx(2 * np.sqrt(2.5), abs=1e-12)


def test_error_dimension_mismatch(rng):
    with pytest.raises(DimensionError):
        ozawa_error(random_state(rng, 3), random_observable(rng, 2), random_povm(rng, 2))


def test_moment_form_matches_reduced_form(rng):
    for _ in range(50):
        d = int(rng.integers(2, 5))
        s, a, p = random_state(rng, d), random_observable(rng, d), random_povm(rng, d)
        assert moment_error_sq(s, a, p) == pytest.approx(ozawa_error_sq(s, a, p), abs=1e-10)


def test_squares_never_negative(rng):
    for _ in range(100):
        m = random_model(rng)
        s = random_state(rng, m.system_dim)
        a = random_observable(rng, m.system_dim)
        assert moment_error_sq(s, a, model_to_povm(m)) >= -1e-10
        assert moment_disturbance_sq(s, a, model_to_channel(m)) >= -1e-10


# -- dilated oracle -------------------------------------------------------


def test_dilated_oracle_agreement(rng):
    for _ in range(100):
        m = random_model(rng)
        s = random_state(rng, m.system_dim)
        a = random_observable(rng, m.system_dim)
        b = random_observable(rng, m.system_dim)
        assert abs(ozawa_error(s, a, model_to_povm(m)) - ozawa_error_dilated(s, m, a)) <= 1e-10
        assert abs(ozawa_disturbance(s, b, model_to_channel(m)) - ozawa_disturbance_dilated(s, m, b)) <= 1e-10


def test_dilated_identity_coupling_fixed_pointer(rng):
    z0 = 1.5
    pointer = Observable.diagonal([-0.5, z0])
    m = MeasurementModel(State.pure([0, 1]), np.eye(6), pointer)
    s = random_state(rng, 3)
    a = random_observable(rng, 3)
    shifted = z0 * np.eye(3) - a.operator
    expected = np.sqrt(np.trace(s.density @ shifted @ shifted).real)
    assert ozawa_error_dilated(s, m, a) == pytest.approx(expected, abs=1e-12)


def test_dilated_swap_exact_on_eigenstate(rng):
    a = random_observable(rng, 3)
    w, v = np.linalg.eigh(a.operator)
    m = MeasurementModel(State.pure(v[:, 0]), swap_operator(3), a)
    assert ozawa_error_dilated(State.pure(v[:, 0]), m, a) <= 1e-7


# -- disturbance ----------------------------------------------------------


def test_disturbance_identity_channel(rng):
    s = random_state(rng, 4)
    assert ozawa_disturbance(s, random_observable(rng, 4), identity_channel(4)) == 0.0


def test_disturbance_measure_reprepare(rng):
    for _ in range(10):
        psi = random_pure_state(rng, 3)
        b = random_observable(rng, 3)
        ch = measure_and_prepare(random_observable(rng, 3), psi)
        expected = np.sqrt(2 * _variance(psi.density, b.operator))
        assert ozawa_disturbance(psi, b, ch) == pytest.approx(expected, abs=1e-12)
        # swap dilation of the same instrument
        m = MeasurementModel(psi, swap_operator(3), random_observable(rng, 3))
        assert ozawa_disturbance_dilated(psi, m, b) == pytest.approx(expected, abs=1e-10)


def test_disturbance_constant_channel_on_its_fixed_state(rng):
    rho0 = random_state(rng, 4)
    b = random_observable(rng, 4)
    ch = constant_channel(rho0, 4)
    np.testing.assert_allclose(ch.apply(rho0.density), rho0.density, atol=1e-12)
    eta = ozawa_disturbance(rho0, b, ch)
    assert eta > 0.1
    assert eta == pytest.approx(np.sqrt(2 * _variance(rho0.density, b.operator)), abs=1e-12)


def test_disturbance_vanishes_for_eigenstate_fixed_point(rng):
    b = random_observable(rng, 3)
    v = np.linalg.eigh(b.operator)[1][:, 2]
    rho0 = State.pure(v)
    assert ozawa_disturbance(rho0, b, constant_channel(rho0, 3)) <= 1e-7


# -- three-state method ---------------------------------------------------


def test_three_state_matches_direct(rng):
    for _ in range(100):
        d = int(rng.integers(2, 5))
        s, a, p = random_state(rng, d), random_observable(rng, d), random_povm(rng, d)
        assert abs(three_state_error(s, a, p) - ozawa_error(s, a, p)) <= 1e-10


def test_three_state_exact_measurement(rng):
    # statistics-based route subtracts O(1) numbers, so the square sits at ~1e-16
    obs = random_observable(rng, 3)
    assert three_state_error(random_state(rng, 3), obs, DiscretePOVM.spectral(obs)) <= 1e-7


def test_three_state_parity():
    x = Observable.diagonal([-2.0, -1.0, 1.0, 2.0])
    inverted = DiscretePOVM.spectral(Observable(-x.operator))
    sym = State.pure([0.5, 0.5, 0.5, 0.5])
    assert three_state_error(sym, x, inverted) == pytest.approx(ozawa_error(sym, x, inverted), abs=1e-10)
    assert three_state_error(sym, x, inverted) > 3.0


def test_three_state_handles_null_auxiliary_state():
    # A rho A = 0 when rho lives in the kernel of A
    a = Observable(np.diag([0.0, 1.0]))
    s = State.pure([1.0, 0.0])
    p = BlochObservable.unbiased([0.2, 0.0, 0.3]).povm()
    assert three_state_error(s, a, p) == pytest.approx(ozawa_error(s, a, p), abs=1e-10)


# -- product checker ------------------------------------------------------


def test_product_check_reprepare_model_violates():
    d = 8
    x, p = grids.position(d), grids.momentum(d)
    psi = grids.gaussian_state(d, 0.6, momentum_space=True)
    m = MeasurementModel(psi, swap_operator(d), x)
    rep = product_check(psi, m, x, p, 0.5)
    assert rep.epsilon == 0.0
    assert rep.product == 0.0
    assert rep.violated
    assert rep.eta == pytest.approx(np.sqrt(2 * _variance(psi.density, p.operator)), abs=1e-10)


def test_product_check_identity_coupling(rng):
    d = 4
    x, p = grids.position(d), grids.momentum(d)
    m = MeasurementModel(State.pure([0, 0, 0, 1]), np.eye(d * d), x)
    rep = product_check(grids.gaussian_state(d, 0.8), m, x, p, 0.5)
    assert rep.epsilon > 1.0
    assert rep.eta <= 1e-7
    assert rep.violated


def test_product_check_faithful_partial_swap():
    # frozen from a search over theta in [0.05, 1.5], probe/input spreads on a d = 8 grid
    d, theta = 8, 0.8
    x, p = grids.position(d), grids.momentum(d)
    u = np.cos(theta) * np.eye(d * d) - 1j * np.sin(theta) * swap_operator(d)
    m = MeasurementModel(grids.gaussian_state(d, 1.4), u, x)
    rep = product_check(grids.gaussian_state(d, 0.5), m, x, p, 0.5)
    assert rep.epsilon > 0 and rep.eta > 0
    assert rep.product == pytest.approx(0.78947336966472, abs=1e-10)
    assert not rep.violated


def test_noise_report_contract(rng):
    m = random_model(rng, 2, 2)
    rep = product_check(random_state(rng, 2), m, random_observable(rng, 2), random_observable(rng, 2), 0.5)
    assert rep.product == pytest.approx(rep.epsilon * rep.eta, abs=1e-12)
    assert rep.violated == (rep.product < rep.bound - 1e-12)
    assert set(rep.to_json()) == {
        "epsilon", "eta", "product", "bound", "violated", "raw_epsilon_sq", "raw_eta_sq"
    }


def test_qubit_error_state_independent(rng):
    a, c = _unit(rng), 0.7 * _unit(rng)
    target, povm = Observable(bloch_operator(a)), BlochObservable.unbiased(c).povm()
    vals = [ozawa_error(random_state(rng, 2), target, povm) for _ in range(100)]
    assert np.std(vals, ddof=1) <= 1e-12

