"""Named scenarios that run the noise-operator and distribution metrics side by side.

Every scenario returns a :class:`~mu_metrics.report.Report` whose verdicts are
the scenario's contract; all of them pass on default parameters.
"""
from dataclasses import dataclass, field

import numpy as np

from . import gaussian, grids, qubit
from ._jit import apply_thread_cap
from .noise import (
    noise_report,
    ozawa_disturbance,
    ozawa_disturbance_dilated,
    ozawa_error,
    ozawa_error_dilated,
    three_state_error,
)
from .operators import (
    DiscretePOVM,
    MeasurementModel,
    Observable,
    State,
    constant_channel,
    expectation,
    measure_and_prepare,
    outcome_distribution,
    swap_operator,
)
from .report import Report
from .transport import (
    calibration_error,
    distribution_disturbance,
    distribution_error,
    w2,
    worst_case_error,
)

DIM_RANGE = (2, 64)
UNCERTAINTY_BOUND = 0.5  # hbar / 2 with hbar = 1


class ScenarioError(ValueError):
    """Unknown scenario or invalid configuration."""


@dataclass
class ScenarioConfig:
    name: str
    dimension: int = None
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    output_path: str = None


def _param(cfg, key, default):
    return cfg.parameters.get(key, default)


def _variance(rho, obs):
    return expectation(rho, obs.operator @ obs.operator) - expectation(rho, obs.operator) ** 2


def scenario_parity(cfg):
    d = cfg.dimension
    if d % 2:
        raise ScenarioError("parity scenario needs an even dimension")
    x = grids.symmetric_integer_position(d)
    inverted = DiscretePOVM.spectral(Observable(-x.operator))
    sym = State.pure(np.ones(d) / np.sqrt(d))
    asym = State.pure(np.eye(d)[d // 2])
    eps = ozawa_error(sym, x, inverted)
    m = {
        "ozawa_error": eps,
        "ozawa_error_expected": 2 * np.sqrt(expectation(sym.density, x.operator @ x.operator)),
        "three_state_error": three_state_error(sym, x, inverted),
        "w2_symmetric": distribution_error(sym, x, inverted),
        "w2_asymmetric": distribution_error(asym, x, inverted),
        "ozawa_error_asymmetric": ozawa_error(asym, x, inverted),
        "calibration_error": calibration_error(x, inverted).worst_value,
        "worst_case_error": worst_case_error(
            x, inverted, int(_param(cfg, "restarts", 4)), cfg.seed
        ),
    }
    v = {
        "ozawa_positive": m["ozawa_error"] >= 0.5,
        "w2_zero": m["w2_symmetric"] <= 1e-10,
        "asymmetric_w2_positive": m["w2_asymmetric"] > 0.0,
        "three_state_agrees": abs(m["three_state_error"] - eps) <= 1e-10,
    }
    prov = {
        "ozawa_error": "per-outcome noise-operator sum",
        "three_state_error": "outcome statistics on three auxiliary states",
        "w2_symmetric": "quantile coupling",
        "worst_case_error": "multi-start ascent lower bound",
    }
    return m, v, prov, None


SPREAD_LADDER = (1.2, 1.0, 0.8, 0.6, 0.45)


def scenario_constant_channel(cfg):
    d = cfg.dimension
    if d < 4:
        raise ScenarioError("constant-channel scenario needs dimension >= 4")
    spread = float(_param(cfg, "spread", 0.6))
    x, p = grids.position(d), grids.momentum(d)
    rho0 = grids.gaussian_state(d, spread)
    ch = constant_channel(rho0, d)
    etas = []
    for s in SPREAD_LADDER:
        r = grids.gaussian_state(d, s)
        etas.append(ozawa_disturbance(r, p, constant_channel(r, d)))
    mixed = State.maximally_mixed(d)
    mixed_ch = constant_channel(mixed, d)
    control = State.pure(np.eye(d)[0])
    m = {
        "position_spread": float(np.sqrt(_variance(rho0.density, x))),
        "ozawa_disturbance": ozawa_disturbance(rho0, p, ch),
        "ozawa_disturbance_expected": float(np.sqrt(2 * _variance(rho0.density, p))),
        "w2_disturbance": distribution_disturbance(rho0, p, ch),
        "ozawa_error": ozawa_error(rho0, x, DiscretePOVM.spectral(x)),
        "w2_error": distribution_error(rho0, x, DiscretePOVM.spectral(x)),
        "ozawa_disturbance_mixed": ozawa_disturbance(mixed, p, mixed_ch),
        "w2_disturbance_mixed": distribution_disturbance(mixed, p, mixed_ch),
        "w2_disturbance_control": distribution_disturbance(control, p, ch),
    }
    for s, e in zip(SPREAD_LADDER, etas):
        m[f"ozawa_disturbance_spread_{s:g}"] = e
    v = {
        "w2_zero": m["w2_disturbance"] <= 1e-10,
        "eta_positive": m["ozawa_disturbance"] > 0.0,
        "eta_monotone": bool(np.all(np.diff(etas) > 0)),
        "mixed_eta_positive": m["ozawa_disturbance_mixed"] > 0.0,
        "mixed_w2_zero": m["w2_disturbance_mixed"] <= 1e-10,
        "control_w2_positive": m["w2_disturbance_control"] > 0.0,
    }
    prov = {
        "ozawa_disturbance": "Kraus commutator sum",
        "w2_disturbance": "quantile coupling of momentum laws before/after",
    }
    return m, v, prov, None


def scenario_reprepare(cfg):
    d = cfg.dimension
    if d < 4:
        raise ScenarioError("reprepare scenario needs dimension >= 4")
    x, p = grids.position(d), grids.momentum(d)
    psi = grids.gaussian_state(d, float(_param(cfg, "momentum_spread", 0.6)), momentum_space=True)
    povm = DiscretePOVM.spectral(x)
    channel = measure_and_prepare(x, psi)
    rep = noise_report(psi, x, povm, p, channel, UNCERTAINTY_BOUND)
    # the same instrument realised as a swap with the prepared probe
    model = MeasurementModel(psi, swap_operator(d), x)
    others = [State.pure(v) for v in np.eye(d)] + [State.pure(v) for v in grids.dft(d).T]
    worst = max(distribution_disturbance(s, p, channel) for s in others)
    m = {
        "ozawa_error": rep.epsilon,
        "ozawa_disturbance": rep.eta,
        "product": rep.product,
        "bound": rep.bound,
        "raw_epsilon_sq": rep.raw_epsilon_sq,
        "raw_eta_sq": rep.raw_eta_sq,
        "eta_expected": float(np.sqrt(2 * _variance(psi.density, p))),
        "ozawa_error_dilated": ozawa_error_dilated(psi, model, x),
        "ozawa_disturbance_dilated": ozawa_disturbance_dilated(psi, model, p),
        "w2_error": distribution_error(psi, x, povm),
        "w2_disturbance": distribution_disturbance(psi, p, channel),
        "w2_disturbance_worst_other": worst,
    }
    v = {
        "epsilon_zero": rep.epsilon == 0.0,
        "product_violated": rep.violated,
        "eta_matches_variance": abs(rep.eta - m["eta_expected"]) <= 1e-10,
        "dilation_agrees": abs(m["ozawa_disturbance_dilated"] - rep.eta) <= 1e-10
        and m["ozawa_error_dilated"] <= 1e-10,
        "worst_disturbance_detected": worst >= 0.1,
    }
    prov = {
        "ozawa_error": "per-outcome noise-operator sum on the sharp POVM",
        "ozawa_disturbance_dilated": "swap coupling on system x probe",
        "w2_disturbance_worst_other": "max over position and momentum eigenstates",
    }
    return m, v, prov, None


def _random_hermitian(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2


def _spectral_w2(psi, a, b):
    da = outcome_distribution(DiscretePOVM.spectral(a), psi)
    db = outcome_distribution(DiscretePOVM.spectral(b), psi)
    return w2(da, db)


def scenario_vanishing_error(cfg, max_draws=10_000):
    d = cfg.dimension
    if d < 3:
        raise ScenarioError("vanishing-error scenario needs dimension >= 3")
    rng = np.random.default_rng(cfg.seed)
    for draw in range(1, max_draws + 1):
        vec = rng.normal(size=d) + 1j * rng.normal(size=d)
        vec /= np.linalg.norm(vec)
        a = Observable(_random_hermitian(rng, d))
        q = np.eye(d) - np.outer(vec, vec.conj())
        n = q @ _random_hermitian(rng, d) @ q
        b = Observable(a.operator + n)
        psi = State.pure(vec)
        if np.linalg.norm(a.operator @ n - n @ a.operator) < 1e-6:
            continue
        dist = _spectral_w2(psi, a, b)
        if dist >= 0.1:
            break
    else:
        raise RuntimeError(f"no separating draw in {max_draws} attempts; try another seed")
    nvec = n @ vec
    approx = DiscretePOVM.spectral(b)
    # commuting control: diagonal A, Ψ on the first two basis states, N off its support
    vals = np.arange(d, dtype=float)
    comm_a = Observable.diagonal(vals)
    comm_b = Observable.diagonal(vals + np.r_[0.0, 0.0, rng.uniform(1, 2, d - 2)])
    comm_psi = State.pure(np.r_[1.0, 1.0, np.zeros(d - 2)])
    m = {
        "draws": draw,
        "squared_difference": float(np.real(np.vdot(nvec, nvec))),
        "ozawa_error": ozawa_error(psi, a, approx),
        "w2": dist,
        "commutator_norm": float(np.linalg.norm(a.operator @ n - n @ a.operator)),
        "w2_null_control": _spectral_w2(psi, a, a),
        "w2_commuting_control": _spectral_w2(comm_psi, comm_a, comm_b),
        "squared_difference_commuting": float(
            expectation(comm_psi.density, (comm_b.operator - comm_a.operator) @ (comm_b.operator - comm_a.operator))
        ),
    }
    v = {
        "squared_difference_zero": m["squared_difference"] <= 1e-12,
        "ozawa_zero": m["ozawa_error"] <= 1e-10,
        "w2_separated": m["w2"] >= 0.1,
        "null_control_equal": m["w2_null_control"] <= 1e-12,
        "commuting_control_equal": m["w2_commuting_control"] <= 1e-12,
    }
    prov = {
        "squared_difference": "|N psi|^2 with N = Q M Q, Q = 1 - |psi><psi|",
        "ozawa_error": "spectral POVM of B as approximator of A",
        "w2": "quantile coupling of the two spectral laws in psi",
    }
    return m, v, prov, None


def scenario_qubit_sweep(cfg):
    if cfg.dimension != 2:
        raise ScenarioError("qubit-sweep runs in dimension 2")
    steps = int(_param(cfg, "steps", 50))
    resolution = int(_param(cfg, "resolution", 20))
    a, b = np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0])
    ts, reps = qubit.smeared_family_sweep(a, b, steps, resolution)
    rng = np.random.default_rng(cfg.seed)
    states = [State.from_bloch(v / max(1.0, np.linalg.norm(v))) for v in rng.normal(size=(20, 3))]
    eps_gap, state_spread = 0.0, 0.0
    for t in ts:
        c = t * a
        eps = [qubit.qubit_ozawa(a, c, s) for s in states]
        eps_gap = max(eps_gap, abs(eps[0] - qubit.qubit_delta(a, c)))
        state_spread = max(state_spread, float(np.std(eps)))
    gaps = [abs(r.sum_sq - r.bound) for r in reps]
    k = int(np.argmin(gaps))
    bound = reps[0].bound
    m = {
        "bound": bound,
        "bound_closed_form": 4 - 2 * np.sqrt(2),
        "min_saturation_gap": gaps[k],
        "t_saturating": float(ts[k]),
        "max_ozawa_delta_gap": eps_gap,
        "max_ozawa_state_stdev": state_spread,
        "points": len(ts),
    }
    v = {
        "tradeoff_all": all(r.satisfies_tradeoff for r in reps),
        "ozawa_sum_all": all(r.satisfies_ozawa_sum for r in reps),
        "saturation_found": any(r.saturated for r in reps),
        "ozawa_equals_delta": eps_gap <= 1e-10,
        "ozawa_state_independent": state_spread <= 1e-12,
        "bound_matches_closed_form": abs(bound - m["bound_closed_form"]) <= 1e-3,
    }
    table = {
        "columns": list(qubit.SWEEP_COLUMNS),
        "rows": [
            [float(t), r.delta_a, r.delta_b, r.sum_sq, r.ozawa_sum, r.bound, r.saturated]
            for t, r in zip(ts, reps)
        ],
    }
    prov = {
        "bound": "polar grid minimum polished along the joint-measurability boundary",
        "delta": "sharp-input calibration formula",
        "ozawa_sum": "noise-operator error in the maximally mixed state",
    }
    return m, v, prov, table


MASS_PAIRS = ((1.0, 1.0), (1.0, 3.0), (3.0, 1.0))
RANGES = (1.0, 10.0, 100.0, 1000.0)


def scenario_linear_models(cfg):
    slopes = [gaussian.scattering_slopes(m1, m2) for m1, m2 in MASS_PAIRS]
    rows = gaussian.sweep_rows(slopes, [1.0, "corrected"], RANGES)
    m, ok_div, ok_const = {}, True, True
    for a, b in slopes:
        model = gaussian.make_linear_model(a, b)
        vac = gaussian.GaussianState.vacuum()
        tag = f"a={a:g},b={b:g}"
        m[f"ozawa_error[{tag}]"] = gaussian.gaussian_noise_error(model, vac)
        m[f"ozawa_disturbance[{tag}]"] = gaussian.gaussian_noise_disturbance(model, vac)
        raw = [gaussian.ranged_calibration_error(model, 1.0, r)[0] for r in RANGES]
        fixed = [gaussian.ranged_calibration_error(model, 1.0 / a, r)[0] for r in RANGES]
        m[f"calibration_raw_r1000[{tag}]"] = raw[-1]
        m[f"calibration_corrected[{tag}]"] = fixed[-1]
        if a != 1.0:
            ok_div &= bool(np.all(np.diff(raw) > 0) and raw[-1] >= 100 * raw[0])
        else:
            ok_div &= max(raw) - min(raw) <= 1e-12
        ok_const &= max(fixed) - min(fixed) <= 1e-12
    flags = all(row[7] == (abs(row[2] * row[0] - 1) > 1e-12) for row in rows)
    v = {
        "uncorrected_diverges": ok_div,
        "corrected_range_constant": ok_const,
        "divergence_flags_consistent": flags,
    }
    table = {"columns": list(gaussian.SWEEP_COLUMNS), "rows": [list(r) for r in rows]}
    prov = {
        "ozawa_error": "closed-form Gaussian moments of readout minus input position",
        "calibration": "sup over sharp positions in [-r, r]",
    }
    return m, v, prov, table


def scenario_husimi_bound(cfg):
    best, arg = gaussian.min_covariant_product(int(_param(cfg, "grid", 41)))
    valid, dq, dp = gaussian.covariant_joint_validity(0.5 * np.eye(2))
    model = gaussian.make_linear_model(1.0, 1.0)
    vac = gaussian.GaussianState.vacuum()
    eps = gaussian.gaussian_noise_error(model, vac)
    eta = gaussian.gaussian_noise_disturbance(model, vac)
    m = {
        "min_product": best,
        "vacuum_delta_q": dq,
        "vacuum_delta_p": dp,
        "ozawa_error_vacuum": eps,
        "ozawa_disturbance_vacuum": eta,
        "ozawa_product_vacuum": eps * eta,
    }
    v = {
        "saturates_half": abs(best - 0.5) <= 1e-6,
        "never_below_half": best >= 0.5 - 1e-9,
        "vacuum_noise_valid": valid,
    }
    prov = {"min_product": "grid over admissible added-noise covariances"}
    return m, v, prov, None


REGISTRY = {
    "parity": (scenario_parity, 4, "space-inverted approximator: Ozawa error large, W2 zero"),
    "constant-channel": (
        scenario_constant_channel,
        16,
        "constant output channel on its own fixed state: W2 disturbance zero, Ozawa positive",
    ),
    "reprepare": (
        scenario_reprepare,
        8,
        "sharp measurement with re-preparation: Ozawa product 0 below the bound",
    ),
    "vanishing-error": (
        scenario_vanishing_error,
        3,
        "B = A + N with N psi = 0: zero squared difference, different distributions",
    ),
    "qubit-sweep": (
        scenario_qubit_sweep,
        2,
        "smeared qubit joint measurements: trade-off bound and its saturation",
    ),
    "linear-models": (
        scenario_linear_models,
        2,
        "mass-scattering linear models: range divergence without slope correction",
    ),
    "husimi-bound": (
        scenario_husimi_bound,
        2,
        "covariant joint measurements: position-momentum product bottoms out at 1/2",
    ),
}


def list_scenarios():
    return [(name, desc) for name, (_, _, desc) in REGISTRY.items()]


def run_scenario(cfg):
    if cfg.name not in REGISTRY:
        raise ScenarioError(f"unknown scenario {cfg.name!r}; known: {', '.join(REGISTRY)}")
    func, default_dim, _ = REGISTRY[cfg.name]
    if cfg.dimension is None:
        cfg.dimension = default_dim
    cfg.dimension = int(cfg.dimension)
    if not DIM_RANGE[0] <= cfg.dimension <= DIM_RANGE[1]:
        raise ScenarioError(f"dimension must be in {DIM_RANGE}, got {cfg.dimension}")
    apply_thread_cap()
    metrics, verdicts, provenance, table = func(cfg)
    echo = {
        "name": cfg.name,
        "dimension": cfg.dimension,
        "parameters": dict(cfg.parameters),
        "seed": int(cfg.seed),
    }
    return Report(
        scenario=cfg.name,
        config=echo,
        metrics={k: float(v) for k, v in metrics.items()},
        verdicts={k: bool(v) for k, v in verdicts.items()},
        provenance=provenance,
        table=table,
    )
