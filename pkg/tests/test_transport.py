import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mu_metrics.operators import (
    DimensionError,
    DiscretePOVM,
    Observable,
    State,
    bloch_operator,
    constant_channel,
    identity_channel,
)
from mu_metrics.qubit import BlochObservable
from mu_metrics.sampling import random_distribution, random_observable, random_povm, random_state
from mu_metrics.transport import (
    Distribution,
    calibration_error,
    distribution_disturbance,
    distribution_error,
    w2,
    w2_lp,
    worst_case_error,
)

Z = np.array([0.0, 0.0, 1.0])


def test_distribution_validation():
    with pytest.raises(ValueError):
        Distribution([], [])
    with pytest.raises(ValueError):
        Distribution([1.0, 0.0], [0.5, 0.5])
    with pytest.raises(ValueError):
        Distribution([0.0, 1.0], [0.7, 0.7])
    with pytest.raises(ValueError):
        Distribution([0.0, 1.0], [1.5, -0.5])


def test_distribution_csv():
    text = Distribution([-1.0, 2.5], [0.25, 0.75]).to_csv()
    assert text.splitlines() == ["outcome,probability", "-1,0.25", "2.5,0.75"]


# -- order-2 Wasserstein --------------------------------------------------


def test_w2_identical_is_zero(rng):
    p = random_distribution(rng)
    assert w2(p, p) == 0.0


def test_w2_point_masses():
    assert w2(Distribution.point(0.0), Distribution.point(3.0)) == pytest.approx(3.0, abs=1e-15)


def test_w2_split_mass():
    p = Distribution([0.0, 1.0], [0.5, 0.5])
    assert w2(p, Distribution.point(0.0)) == pytest.approx(np.sqrt(0.5), abs=1e-15)
    assert w2_lp(p, Distribution.point(0.0)) == pytest.approx(np.sqrt(0.5), abs=1e-12)


def test_w2_translation_and_symmetry(rng):
    for _ in range(20):
        p, q = random_distribution(rng), random_distribution(rng)
        shift = rng.normal()
        ps = Distribution(p.support + shift, p.probs)
        qs = Distribution(q.support + shift, q.probs)
        assert w2(p, q) == pytest.approx(w2(q, p), abs=1e-12)
        assert w2(ps, qs) == pytest.approx(w2(p, q), abs=1e-10)


def test_w2_reflected_symmetric_law_is_zero():
    x = np.array([-2.0, -1.0, 1.0, 2.0])
    p = Distribution(x, [0.1, 0.4, 0.4, 0.1])
    q = Distribution(-x[::-1], p.probs[::-1])
    assert w2(p, q) == 0.0


def test_w2_matches_lp_on_random_pairs(rng):
    worst = 0.0
    for _ in range(200):
        p, q = random_distribution(rng), random_distribution(rng)
        worst = max(worst, abs(w2(p, q) - w2_lp(p, q)))
    assert worst <= 1e-8


def test_w2_triangle_inequality(rng):
    for _ in range(200):
        p, q, r = (random_distribution(rng) for _ in range(3))
        assert w2(p, r) <= w2(p, q) + w2(q, r) + 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_w2_lower_bounded_by_mean_gap(seed):
    rng = np.random.default_rng(seed)
    p, q = random_distribution(rng, 12), random_distribution(rng, 12)
    assert w2(p, q) >= abs(p.mean() - q.mean()) - 1e-12


def test_lp_coupling_marginals(rng):
    p, q = random_distribution(rng, 10), random_distribution(rng, 10)
    _, plan = w2_lp(p, q, return_coupling=True)
    np.testing.assert_allclose(plan.sum(axis=1), p.probs, atol=1e-9)
    np.testing.assert_allclose(plan.sum(axis=0), q.probs, atol=1e-9)


def test_lp_size_limit():
    big = Distribution(np.arange(65.0), np.full(65, 1 / 65))
    with pytest.raises(ValueError):
        w2_lp(big, big)


# -- error and disturbance from distributions -----------------------------


def test_distribution_error_exact_measurement(rng):
    obs = random_observable(rng, 4)
    assert distribution_error(random_state(rng, 4), obs, DiscretePOVM.spectral(obs)) == 0.0


def test_distribution_error_trivial_qubit_povm():
    # fair coin on an eigenstate: half the mass moves by 2
    target = Observable(bloch_operator(Z))
    coin = BlochObservable.unbiased([0.0, 0.0, 0.0]).povm()
    assert distribution_error(State.from_bloch(Z), target, coin) == pytest.approx(np.sqrt(2), abs=1e-12)


def test_distribution_error_bounded_by_diameter(rng):
    for _ in range(30):
        obs = random_observable(rng, 3)
        p = random_povm(rng, 3)
        lo = min(obs.eigenvalues.min(), p.outcomes.min())
        hi = max(obs.eigenvalues.max(), p.outcomes.max())
        assert distribution_error(random_state(rng, 3), obs, p) <= hi - lo + 1e-12


def test_distribution_error_dimension_mismatch(rng):
    with pytest.raises(DimensionError):
        distribution_error(random_state(rng, 2), random_observable(rng, 3), random_povm(rng, 3))


def test_distribution_disturbance_identity_and_fixed_point(rng):
    s = random_state(rng, 3)
    b = random_observable(rng, 3)
    assert distribution_disturbance(s, b, identity_channel(3)) == 0.0
    assert distribution_disturbance(s, b, constant_channel(s, 3)) <= 1e-12


def test_distribution_disturbance_constant_channel_moves_law(rng):
    b = Observable(bloch_operator(Z))
    ch = constant_channel(State.from_bloch(-Z), 2)
    assert distribution_disturbance(State.from_bloch(Z), b, ch) == pytest.approx(2.0, abs=1e-12)


# -- calibration ----------------------------------------------------------


def test_calibration_exact_measurement(rng):
    obs = random_observable(rng, 3, degenerate=True)
    res = calibration_error(obs, DiscretePOVM.spectral(obs))
    assert res.worst_value <= 1e-7


def test_calibration_qubit_tilted_sharp():
    # sharp measurement along a direction at 45 degrees: sqrt(2(1 - cos 45))
    c = np.array([1.0, 0.0, 1.0]) / np.sqrt(2)
    res = calibration_error(Observable(bloch_operator(Z)), BlochObservable.unbiased(c).povm())
    assert res.worst_value == pytest.approx(np.sqrt(2 - np.sqrt(2)), abs=1e-12)
    assert set(res.per_eigenvalue) == {-1.0, 1.0}


def _brute_force_eigenstate_rms(target, p, rng, draws=400):
    best = 0.0
    for a, proj in zip(target.eigenvalues, target.projectors):
        w, v = np.linalg.eigh(proj)
        basis = v[:, w > 0.5]
        for _ in range(draws):
            z = basis @ (rng.normal(size=basis.shape[1]) + 1j * rng.normal(size=basis.shape[1]))
            z /= np.linalg.norm(z)
            probs = np.array([np.real(z.conj() @ e @ z) for e in p.effects])
            best = max(best, float(np.sqrt(max(probs @ (p.outcomes - a) ** 2, 0.0))))
    return best


def test_calibration_dominates_sampled_eigenstates(rng):
    for _ in range(5):
        obs = random_observable(rng, 4, degenerate=True)
        p = random_povm(rng, 4)
        exact = calibration_error(obs, p).worst_value
        sampled = _brute_force_eigenstate_rms(obs, p, rng)
        assert sampled <= exact + 1e-10
        assert sampled >= exact - 0.05 * max(exact, 1.0)


# -- worst case -----------------------------------------------------------


def test_worst_case_nondecreasing_in_restarts(rng):
    obs, p = random_observable(rng, 3), random_povm(rng, 3)
    vals = [worst_case_error(obs, p, restarts=r) for r in (1, 2, 4)]
    assert vals[0] <= vals[1] + 1e-12 <= vals[2] + 2e-12


def test_worst_case_at_least_sharp_input_value(rng):
    obs, p = random_observable(rng, 3), random_povm(rng, 3)
    w, v = np.linalg.eigh(obs.operator)
    sharp = max(distribution_error(State.pure(v[:, k]), obs, p) for k in range(3))
    assert worst_case_error(obs, p, restarts=2) >= sharp - 1e-12


def test_worst_case_qubit_parallel():
    # c parallel to a: eigenstates are already the worst inputs
    target = Observable(bloch_operator(Z))
    povm = BlochObservable.unbiased(0.6 * Z).povm()
    assert worst_case_error(target, povm, restarts=4) == pytest.approx(np.sqrt(2 * 0.4), abs=1e-6)


def test_worst_case_qubit_tilted():
    # for unbiased c the supremum is sqrt(2 |a - c|), reached off the eigenbasis
    c = 0.8 * np.array([np.sin(0.7), 0.0, np.cos(0.7)])
    target = Observable(bloch_operator(Z))
    povm = BlochObservable.unbiased(c).povm()
    expected = np.sqrt(2 * np.linalg.norm(Z - c))
    assert worst_case_error(target, povm, restarts=6) == pytest.approx(expected, abs=1e-5)


def test_worst_case_rejects_bad_arguments(rng):
    with pytest.raises(ValueError):
        worst_case_error(random_observable(rng, 2), random_povm(rng, 2), restarts=0)
    with pytest.raises(DimensionError):
        worst_case_error(random_observable(rng, 2), random_povm(rng, 3))


def test_lp_point_masses_and_identity(rng):
    assert w2_lp(Distribution.point(-1.5), Distribution.point(2.0)) == pytest.approx(3.5, abs=1e-12)
    p = random_distribution(rng, 8)
    val, plan = w2_lp(p, p, return_coupling=True)
    assert val <= 1e-6
    np.testing.assert_allclose(np.diag(plan), p.probs, atol=1e-9)


def test_calibration_qubit_family_formula(rng):
    for _ in range(30):
        a = rng.normal(size=3)
        a /= np.linalg.norm(a)
        c = rng.normal(size=3)
        c *= rng.uniform() / np.linalg.norm(c)
        res = calibration_error(Observable(bloch_operator(a)), BlochObservable.unbiased(c).povm())
        assert res.worst_value == pytest.approx(np.sqrt(2 * (1 - a @ c)), abs=1e-12)
        assert res.worst_value == pytest.approx(max(res.per_eigenvalue.values()), abs=1e-12)


def test_worst_case_exact_measurement_is_zero(rng):
    obs = random_observable(rng, 3)
    assert worst_case_error(obs, DiscretePOVM.spectral(obs), restarts=2) <= 1e-12


def test_worst_case_parity_exceeds_asymmetric_inputs():
    x = Observable.diagonal([-2.0, -1.0, 1.0, 2.0])
    inverted = DiscretePOVM.spectral(Observable(-x.operator))
    basis = max(distribution_error(State.pure(np.eye(4)[k]), x, inverted) for k in range(4))
    assert basis > 0
    assert worst_case_error(x, inverted, restarts=2) >= basis - 1e-12


def test_worst_case_dominates_calibration_in_qubit_family(rng):
    for _ in range(10):
        a = rng.normal(size=3)
        a /= np.linalg.norm(a)
        c = rng.normal(size=3)
        c *= rng.uniform() / np.linalg.norm(c)
        target, povm = Observable(bloch_operator(a)), BlochObservable.unbiased(c).povm()
        assert calibration_error(target, povm).worst_value <= worst_case_error(target, povm, restarts=2) + 1e-9
