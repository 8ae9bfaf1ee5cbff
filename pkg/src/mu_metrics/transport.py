"""Distribution-comparison error measures built on the order-2 Wasserstein distance."""
import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, minimize

from . import kernels
from .operators import (
    DimensionError,
    DiscretePOVM,
    State,
    moment_operator,
    outcome_distribution,
)


@dataclass(frozen=True)
class Distribution:
    """Finitely supported probability law on the real line."""

    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.support, dtype=float).ravel()
        p = np.asarray(self.probs, dtype=float).ravel()
        if x.size == 0:
            raise ValueError("empty support")
        if x.size != p.size:
            raise ValueError("support and probabilities differ in length")
        if np.any(np.diff(x) <= 0):
            raise ValueError("support must be strictly increasing")
        if np.any(p < -1e-14):
            raise ValueError("negative probability")
        if abs(p.sum() - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {p.sum()!r}")
        object.__setattr__(self, "support", x)
        object.__setattr__(self, "probs", np.clip(p, 0.0, None))

    @classmethod
    def point(cls, x):
        return cls([float(x)], [1.0])

    def mean(self):
        return float(self.support @ self.probs)

    def moment(self, k):
        return float((self.support ** k) @ self.probs)

    def to_json(self):
        return [[float(x), float(p)] for x, p in zip(self.support, self.probs)]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["outcome", "probability"])
        for x, p in zip(self.support, self.probs):
            w.writerow([format(x, ".17g"), format(p, ".17g")])
        return buf.getvalue()


def w2(p, q):
    """Order-2 Wasserstein distance via the monotone (quantile) coupling."""
    sq = kernels.w2_squared(p.support, p.probs, q.support, q.probs)
    return float(np.sqrt(max(sq, 0.0)))


def w2_lp(p, q, return_coupling=False):
    """Same distance by explicit minimisation over all couplings (oracle).

    Solves the transportation LP with cost ``(x - y)^2`` using HiGHS.
    """
    n, m = len(p.support), len(q.support)
    if n > 64 or m > 64:
        raise ValueError("w2_lp supports at most 64 support points per side")
    cost = (p.support[:, None] - q.support[None, :]) ** 2
    a_eq = np.zeros((n + m, n * m))
    for i in range(n):
        a_eq[i, i * m:(i + 1) * m] = 1.0
    for j in range(m):
        a_eq[n + j, j::m] = 1.0
    b_eq = np.concatenate([p.probs / p.probs.sum(), q.probs / q.probs.sum()])
    res = linprog(
        cost.ravel(),
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=(0, None),
        method="highs",
        options={
            "primal_feasibility_tolerance": 1e-10,
            "dual_feasibility_tolerance": 1e-10,
        },
    )
    if res.status != 0:
        raise RuntimeError(f"transport LP failed: {res.message}")
    value = float(np.sqrt(max(res.fun, 0.0)))
    if return_coupling:
        return value, res.x.reshape(n, m)
    return value


def _target_distribution(s, target):
    return outcome_distribution(DiscretePOVM.spectral(target), s)


def distribution_error(s, target, p):
    if not (s.dim == target.dim == p.dim):
        raise DimensionError("state, target and POVM dimensions differ")
    return w2(_target_distribution(s, target), outcome_distribution(p, s))


def distribution_disturbance(s, obs, c):
    if not (s.dim == obs.dim == c.dim_in == c.dim_out):
        raise DimensionError("state, observable and channel dimensions differ")
    after = State(_renormalised(c.apply(s.density)))
    return w2(_target_distribution(s, obs), _target_distribution(after, obs))


def _renormalised(rho):
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


@dataclass(frozen=True)
class CalibrationResult:
    worst_value: float
    per_eigenvalue: dict
    argmax_eigenvalue: float


def calibration_error(target, p, draws=32, rng=None):
    """Worst RMS deviation from the true value over eigenstates of ``target``.

    For an eigenvector ψ of eigenvalue a the squared deviation is
    ``<ψ|M2 - 2a M1 + a^2|ψ>``; inside a degenerate eigenspace its maximum
    is the top eigenvalue of that operator compressed to the eigenspace.
    ``draws`` random unit vectors per degenerate eigenspace are also
    evaluated, which can only confirm the compressed maximum.
    """
    if target.dim != p.dim:
        raise DimensionError("target and POVM dimensions differ")
    rng = np.random.default_rng(0) if rng is None else rng
    m1, m2 = moment_operator(p, 1), moment_operator(p, 2)
    eye = np.eye(p.dim)
    per = {}
    for a, proj in zip(target.eigenvalues, target.projectors):
        dev = m2 - 2 * a * m1 + a * a * eye
        w, v = np.linalg.eigh(proj)
        basis = v[:, w > 0.5]
        comp = basis.conj().T @ dev @ basis
        best = float(np.linalg.eigvalsh(0.5 * (comp + comp.conj().T))[-1])
        if basis.shape[1] > 1:
            for _ in range(draws):
                z = rng.normal(size=basis.shape[1]) + 1j * rng.normal(size=basis.shape[1])
                z /= np.linalg.norm(z)
                best = max(best, float(np.real(z.conj() @ comp @ z)))
        per[float(a)] = float(np.sqrt(max(best, 0.0)))
    arg = max(per, key=per.get)
    return CalibrationResult(per[arg], per, arg)


def _pure(params, d):
    z = params[:d] + 1j * params[d:]
    n = np.linalg.norm(z)
    if n < 1e-12:
        z = np.ones(d, dtype=complex)
        n = np.linalg.norm(z)
    return State.pure(z / n)


def worst_case_error(target, p, restarts=8, seed=0):
    """Lower bound on ``sup_ψ distribution_error(ψ, target, p)``.

    Multi-start Powell ascent over normalised complex vectors. The eigenvectors
    of ``target`` are always evaluated first, so the result never falls below
    the sharp-input value; restart k uses the k-th draw of a seeded stream,
    which makes the result nondecreasing in ``restarts``.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    d = target.dim
    if d != p.dim:
        raise DimensionError("target and POVM dimensions differ")

    def objective(x):
        return -distribution_error(_pure(x, d), target, p)

    best = 0.0
    starts = []
    for proj in target.projectors:
        w, v = np.linalg.eigh(proj)
        for vec in v[:, w > 0.5].T:
            best = max(best, distribution_error(State.pure(vec), target, p))
            starts.append(np.concatenate([vec.real, vec.imag]))
    rng = np.random.default_rng(seed)
    draws = [rng.normal(size=2 * d) for _ in range(restarts - 1)]
    # the best eigenstate seeds the first ascent
    seed_vals = [-objective(x) for x in starts]
    for x0 in [starts[int(np.argmax(seed_vals))]] + draws[: restarts - 1]:
        res = minimize(objective, x0, method="Powell", options={"xtol": 1e-10, "ftol": 1e-13})
        best = max(best, -float(res.fun))
    return best
