"""Two-outcome qubit observables, joint measurability and the error trade-off."""
import csv
import io
from dataclasses import asdict, dataclass

import cvxpy as cp
import numpy as np
from scipy.optimize import minimize

from . import kernels
from .noise import ozawa_error
from .operators import (
    PAULI,
    DiscretePOVM,
    Observable,
    State,
    bloch_operator,
)

UNIT_TOL = 1e-12
JM_TOL = 1e-12


@dataclass(frozen=True)
class BlochObservable:
    """Outcomes ±1 with effects ``(1 ± (γ·1 + c·σ))/2``."""

    bias: float
    bloch: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.bloch, dtype=float).ravel()
        if c.shape != (3,):
            raise ValueError("Bloch vector must have 3 components")
        if abs(self.bias) + np.linalg.norm(c) > 1 + 1e-12:
            raise ValueError("|bias| + |bloch| > 1: effects are not positive")
        object.__setattr__(self, "bloch", c)
        object.__setattr__(self, "bias", float(self.bias))

    @classmethod
    def unbiased(cls, c):
        return cls(0.0, c)

    def povm(self):
        plus = 0.5 * ((1 + self.bias) * np.eye(2) + bloch_operator(self.bloch))
        return DiscretePOVM([-1.0, 1.0], [np.eye(2) - plus, plus])


def sharp(a):
    """The ±1-valued observable ``a·σ`` for a unit vector ``a``."""
    return Observable(bloch_operator(_unit(a)))


def _unit(a):
    a = np.asarray(a, dtype=float).ravel()
    if a.shape != (3,) or abs(np.linalg.norm(a) - 1) > UNIT_TOL:
        raise ValueError(f"expected a unit 3-vector, got {a!r}")
    return a


def _as_unbiased(c):
    if isinstance(c, BlochObservable):
        if c.bias != 0:
            raise ValueError("only unbiased approximators are supported")
        return c.bloch
    return BlochObservable.unbiased(c).bloch


def qubit_delta(a, c):
    """Calibration error of unbiased ``c`` as an approximation of sharp ``a·σ``."""
    a, c = _unit(a), _as_unbiased(c)
    return float(np.sqrt(max(2.0 * (1.0 - a @ c), 0.0)))


def qubit_ozawa(a, c, s):
    c = _as_unbiased(c)
    if s.dim != 2:
        raise ValueError("qubit state expected")
    return ozawa_error(s, sharp(a), BlochObservable.unbiased(c).povm())


def _in_ball(v):
    v = np.asarray(v, dtype=float).ravel()
    if v.shape != (3,) or np.linalg.norm(v) > 1 + 1e-12:
        raise ValueError(f"Bloch vector outside the unit ball: {v!r}")
    return v


def jointly_measurable(c, d):
    """Whether unbiased ±1 observables with Bloch vectors c, d admit a joint POVM."""
    c, d = _in_ball(c), _in_ball(d)
    return bool(np.linalg.norm(c + d) + np.linalg.norm(c - d) <= 2 + JM_TOL)


# joint outcome (i, j) in {±1}^2 is encoded as the real label 2i + j
JOINT_LABELS = {(-1, -1): -3.0, (-1, 1): -1.0, (1, -1): 1.0, (1, 1): 3.0}


def joint_povm(c, d):
    """Four-outcome POVM with margins ``c`` (first label) and ``d`` (second).

    ``G_ij = ((1 + ij·α) 1 + (i c + j d)·σ)/4``. Positivity needs
    ``|c+d| - 1 <= α <= 1 - |c-d|``, an interval that is nonempty exactly
    when the pair is jointly measurable; the upper end is used, so equal
    margins give ``G_{+-} = G_{-+} = 0``.
    """
    c, d = _in_ball(c), _in_ball(d)
    if not jointly_measurable(c, d):
        raise ValueError("pair is not jointly measurable")
    alpha = 1.0 - np.linalg.norm(c - d)
    effects = []
    for (i, j), _ in sorted(JOINT_LABELS.items(), key=lambda kv: kv[1]):
        effects.append(0.25 * ((1 + i * j * alpha) * np.eye(2) + bloch_operator(i * c + j * d)))
    return DiscretePOVM(sorted(JOINT_LABELS.values()), np.array(effects))


def joint_margins(g):
    """Bloch vectors of the two ±1 margins of a :func:`joint_povm` result."""
    by_label = dict(zip(g.outcomes, g.effects))
    first = by_label[3.0] + by_label[1.0]
    second = by_label[3.0] + by_label[-1.0]
    to_bloch = lambda e: np.array([np.real(np.trace(2 * e @ s)) / 2 for s in PAULI])
    return to_bloch(first), to_bloch(second)


def joint_feasibility_margin(c, d):
    """Largest t such that some joint POVM for (c, d) has all effects >= t·1.

    Independent convex oracle for :func:`jointly_measurable`: the pair is
    jointly measurable iff the margin is >= 0. Writing ``G_{++} = (x0 1 + x·σ)/2``
    fixes the other three effects, and ``(y0 1 + y·σ)/2 >= t`` is the cone
    ``|y| <= y0 - 2t``.
    """
    c, d = _in_ball(c), _in_ball(d)
    x0 = cp.Variable()
    x = cp.Variable(3)
    t = cp.Variable()
    # (scalar, vector) parts of 2·G for each joint outcome
    parts = [
        (x0, x),
        (1 - x0, c - x),
        (1 - x0, d - x),
        (x0, x - c - d),
    ]
    cons = [cp.norm(v, 2) <= s - 2 * t for s, v in parts]
    prob = cp.Problem(cp.Maximize(t), cons + [t <= 1])
    prob.solve(solver=cp.CLARABEL)
    return float(t.value)


def _plane(a, b):
    u = a
    w = b - (b @ u) * u
    if np.linalg.norm(w) < 1e-12:
        w = np.cross(u, [1.0, 0.0, 0.0])
        if np.linalg.norm(w) < 1e-6:
            w = np.cross(u, [0.0, 1.0, 0.0])
    v = w / np.linalg.norm(w)
    return u, v


def _tradeoff_objective(a2, b2, z):
    return 4.0 - 2.0 * (a2 @ z[:2] + b2 @ z[2:])


def _from_boundary(w):
    # w = (sigma, phi_s, phi_t): c + d has length sigma, c - d has length 2 - sigma
    s = w[0] * np.array([np.cos(w[1]), np.sin(w[1])])
    t = (2.0 - w[0]) * np.array([np.cos(w[2]), np.sin(w[2])])
    return np.concatenate([(s + t) / 2, (s - t) / 2])


def _to_boundary(z):
    s, t = z[:2] + z[2:], z[:2] - z[2:]
    ns, nt = np.linalg.norm(s), np.linalg.norm(t)
    sigma = 1.0 if ns + nt == 0 else 2.0 * ns / (ns + nt)
    return np.array([sigma, np.arctan2(s[1], s[0]), np.arctan2(t[1], t[0])])


def incompatibility_bound(a, b, resolution=20, return_minimizer=False):
    """Minimum of Δ(a,c)² + Δ(b,d)² over jointly measurable unbiased (c, d).

    Brute-force polar grid in the plane spanned by the targets (components
    off that plane only tighten the constraint), then a smooth local polish.
    The objective is linear, so its minimum over the convex feasible set sits
    on the boundary ``|c+d| + |c-d| = 2``; the polish runs in coordinates
    that parametrise that boundary exactly.
    """
    a, b = _unit(a), _unit(b)
    if resolution < 20:
        raise ValueError("resolution must be >= 20")
    u, v = _plane(a, b)
    a2 = np.array([a @ u, a @ v])
    b2 = np.array([b @ u, b @ v])
    radii = np.linspace(0.0, 1.0, resolution)
    angles = np.linspace(0.0, 2 * np.pi, 2 * resolution, endpoint=False)
    best, (i1, k1, i2, k2) = kernels.qubit_grid(a2, b2, radii, angles)
    z = np.array([
        radii[i1] * np.cos(angles[k1]),
        radii[i1] * np.sin(angles[k1]),
        radii[i2] * np.cos(angles[k2]),
        radii[i2] * np.sin(angles[k2]),
    ])
    res = minimize(
        lambda w: _tradeoff_objective(a2, b2, _from_boundary(w)),
        _to_boundary(z),
        method="L-BFGS-B",
        bounds=[(0.0, 2.0), (None, None), (None, None)],
        options={"ftol": 1e-15, "gtol": 1e-12},
    )
    polished = _from_boundary(res.x)
    val = _tradeoff_objective(a2, b2, polished)
    if val < best:
        best, z = val, polished
    best = max(float(best), 0.0)
    if return_minimizer:
        c = z[0] * u + z[1] * v
        d = z[2] * u + z[3] * v
        return best, c, d
    return best


@dataclass(frozen=True)
class TradeoffReport:
    delta_a: float
    delta_b: float
    sum_sq: float
    ozawa_sum: float
    bound: float
    bound_half: float
    satisfies_tradeoff: bool
    satisfies_ozawa_sum: bool
    saturated: bool

    def to_json(self):
        return asdict(self)


SATURATION_TOL = 1e-3


def tradeoff_report(a, b, c, d, bound=None, state=None):
    """Both error families for approximating (a·σ, b·σ) by the pair (c, d)."""
    if not jointly_measurable(c, d):
        raise ValueError("approximators are not jointly measurable")
    if bound is None:
        bound = incompatibility_bound(a, b)
    state = State.maximally_mixed(2) if state is None else state
    da, db = qubit_delta(a, c), qubit_delta(b, d)
    sum_sq = da * da + db * db
    ozawa_sum = qubit_ozawa(a, c, state) + qubit_ozawa(b, d, state)
    return TradeoffReport(
        delta_a=da,
        delta_b=db,
        sum_sq=sum_sq,
        ozawa_sum=ozawa_sum,
        bound=float(bound),
        bound_half=float(bound) / 2,
        satisfies_tradeoff=bool(sum_sq >= bound - 1e-9),
        satisfies_ozawa_sum=bool(ozawa_sum >= bound / 2 - 1e-9),
        saturated=bool(abs(sum_sq - bound) <= SATURATION_TOL),
    )


def sweep_points(steps):
    t = np.linspace(0.0, 1.0, steps + 2)[1:-1]
    return np.unique(np.append(t, 1 / np.sqrt(2)))


def smeared_family_sweep(a, b, steps=50, resolution=20):
    """Reports along ``c = t a``, ``d = sqrt(1 - t²) b`` for orthogonal a, b."""
    a, b = _unit(a), _unit(b)
    if abs(a @ b) > 1e-12:
        raise ValueError("smeared family sweep needs orthogonal targets")
    if steps < 10:
        raise ValueError("steps must be >= 10")
    bound = incompatibility_bound(a, b, resolution)
    ts = sweep_points(steps)
    reports = [tradeoff_report(a, b, t * a, np.sqrt(1 - t * t) * b, bound) for t in ts]
    return ts, reports


SWEEP_COLUMNS = ("t", "delta_a", "delta_b", "sum_sq", "ozawa_sum", "bound", "saturated")


def sweep_csv(ts, reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for t, r in zip(ts, reports):
        w.writerow([
            format(t, ".17g"),
            *(format(v, ".17g") for v in (r.delta_a, r.delta_b, r.sum_sq, r.ozawa_sum, r.bound)),
            str(r.saturated).lower(),
        ])
    return buf.getvalue()
