"""Noise-operator error and disturbance.

Both quantities are expectations of squared operator differences. The reduced
forms below sum squared Frobenius norms, e.g. for the error

    ε² = Σ_x ‖F_x† (x - A) L‖² = tr ρM₂ - tr ρ(M₁A + AM₁) + tr ρA²

with ρ = LL† and E_x = F_x F_x†. This is algebraically the moment-operator
expression but never produces the catastrophic cancellation that turns an
exact zero into ~1e-8 after the square root. :func:`moment_error_sq` keeps the literal moment form.
"""
from dataclasses import asdict, dataclass

import numpy as np

from .operators import (
    DimensionError,
    State,
    dag,
    expectation,
    heisenberg_apply,
    model_to_channel,
    model_to_povm,
    moment_operator,
    outcome_distribution,
)

NEG_SQ_TOL = 1e-10


def _clamped_sqrt(sq):
    if sq < -NEG_SQ_TOL:
        raise ArithmeticError(f"squared noise quantity {sq!r} is negative beyond tolerance")
    return float(np.sqrt(max(sq, 0.0)))


def _check(s, *objs):
    for o in objs:
        if o.dim != s.dim:
            raise DimensionError(f"dimension {o.dim} does not match state dimension {s.dim}")


def ozawa_error_sq(s, target, p):
    _check(s, target, p)
    L = s.factor()
    A = target.operator
    total = 0.0
    for x, f in zip(p.outcomes, p.effect_factors):
        y = dag(f) @ (x * L - A @ L)
        total += float(np.real(np.vdot(y, y)))
    return total


def ozawa_error(s, target, p):
    """Noise-operator error of POVM ``p`` as a measurement of ``target`` in ``s``."""
    return _clamped_sqrt(ozawa_error_sq(s, target, p))


def moment_error_sq(s, target, p):
    """Literal ``tr ρM₂ - tr ρ(M₁A + AM₁) + tr ρA²``."""
    _check(s, target, p)
    rho, A = s.density, target.operator
    m1, m2 = moment_operator(p, 1), moment_operator(p, 2)
    return expectation(rho, m2) - expectation(rho, m1 @ A + A @ m1) + expectation(rho, A @ A)


def ozawa_disturbance_sq(s, obs, c):
    _check(s, obs)
    if c.dim_in != s.dim or c.dim_out != s.dim:
        raise DimensionError("channel dimensions do not match the state")
    L = s.factor()
    B = obs.operator
    total = 0.0
    for K in c.kraus:
        y = (B @ K - K @ B) @ L
        total += float(np.real(np.vdot(y, y)))
    return total


def ozawa_disturbance(s, obs, c):
    """Noise-operator disturbance of ``obs`` by channel ``c`` in state ``s``."""
    return _clamped_sqrt(ozawa_disturbance_sq(s, obs, c))


def moment_disturbance_sq(s, obs, c):
    """Literal ``tr ρΛ*(B²) - tr ρ(Λ*(B)B + BΛ*(B)) + tr ρB²``."""
    rho, B = s.density, obs.operator
    lb = heisenberg_apply(c, B)
    return (
        expectation(rho, heisenberg_apply(c, B @ B))
        - expectation(rho, lb @ B + B @ lb)
        + expectation(rho, B @ B)
    )


def _dilated_sq(s, m, before, after):
    d1, d2 = m.dims
    if s.dim != d1:
        raise DimensionError(f"state dim {s.dim} != model system dim {d1}")
    u = m.coupling
    diff = dag(u) @ after @ u - before
    L = np.kron(s.factor(), m.probe.factor())
    y = diff @ L
    return float(np.real(np.vdot(y, y)))


def ozawa_error_dilated_sq(s, m, target):
    d1, d2 = m.dims
    return _dilated_sq(
        s, m, np.kron(target.operator, np.eye(d2)), np.kron(np.eye(d1), m.pointer.operator)
    )


def ozawa_error_dilated(s, m, target):
    """Error evaluated on system ⊗ probe: ``tr ρ⊗σ (U^†(1⊗Z)U - A⊗1)²``."""
    return _clamped_sqrt(ozawa_error_dilated_sq(s, m, target))


def ozawa_disturbance_dilated_sq(s, m, obs):
    d2 = m.probe_dim
    b = np.kron(obs.operator, np.eye(d2))
    return _dilated_sq(s, m, b, b)


def ozawa_disturbance_dilated(s, m, obs):
    return _clamped_sqrt(ozawa_disturbance_dilated_sq(s, m, obs))


def _weighted_first_moment(sub, p):
    # tr[M1 τ] for an unnormalised τ, read off the outcome statistics of τ/tr τ
    t = float(np.real(np.trace(sub)))
    if t < 1e-14:
        return 0.0
    return t * outcome_distribution(p, State(sub / t)).mean()


def three_state_error(s, target, p):
    """Error reconstructed from outcome statistics on ρ, AρA and (1+A)ρ(1+A)."""
    _check(s, target, p)
    rho, A = s.density, target.operator
    one_a = np.eye(s.dim) + A
    a_rho_a = A @ rho @ A
    a_rho_a = 0.5 * (a_rho_a + dag(a_rho_a))
    plus = one_a @ rho @ one_a
    plus = 0.5 * (plus + dag(plus))
    base = outcome_distribution(p, s)
    cross = (
        _weighted_first_moment(plus, p)
        - base.mean()
        - _weighted_first_moment(a_rho_a, p)
    )
    sq = base.moment(2) - cross + float(np.real(np.trace(a_rho_a)))
    return _clamped_sqrt(sq)


@dataclass(frozen=True)
class NoiseReport:
    epsilon: float
    eta: float
    product: float
    bound: float
    violated: bool
    raw_epsilon_sq: float
    raw_eta_sq: float

    def to_json(self):
        return asdict(self)


def noise_report(s, target_a, povm, target_b, channel, bound):
    eps_sq = ozawa_error_sq(s, target_a, povm)
    eta_sq = ozawa_disturbance_sq(s, target_b, channel)
    eps, eta = _clamped_sqrt(eps_sq), _clamped_sqrt(eta_sq)
    product = eps * eta
    return NoiseReport(
        epsilon=eps,
        eta=eta,
        product=product,
        bound=float(bound),
        violated=bool(product < bound - 1e-12),
        raw_epsilon_sq=eps_sq,
        raw_eta_sq=eta_sq,
    )


def product_check(s, m, target_a, target_b, bound):
    """Test ``ε(A) η(B) >= bound`` for measurement model ``m`` in state ``s``."""
    return noise_report(s, target_a, model_to_povm(m), target_b, model_to_channel(m), bound)
