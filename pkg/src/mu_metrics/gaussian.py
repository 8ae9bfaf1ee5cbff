"""Linear (symplectic) measurement models with Gaussian probes, in closed form.

Phase-space ordering is (Q1, P1, Q2, P2): object particle first, probe second.
Units have hbar = 1, so the vacuum has variance 1/2 in each quadrature.
"""
import csv
import io
from dataclasses import dataclass

import numpy as np

OMEGA1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA = np.kron(np.eye(2), OMEGA1)

Q1, P1, Q2, P2 = range(4)


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).ravel()
        cov = np.asarray(self.cov, dtype=float)
        if mean.shape != (2,) or cov.shape != (2, 2):
            raise ValueError("single-mode Gaussian needs a 2-vector mean and 2x2 covariance")
        if np.max(np.abs(cov - cov.T)) > 1e-12:
            raise ValueError("covariance is not symmetric")
        if np.linalg.eigvalsh(cov + 0.5j * OMEGA1)[0] < -1e-10:
            raise ValueError("covariance violates the uncertainty principle")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def vacuum(cls, q=0.0, p=0.0):
        return cls([q, p], 0.5 * np.eye(2))

    @classmethod
    def squeezed(cls, s, q=0.0, p=0.0):
        """Position variance ``s/2``, momentum variance ``1/(2s)``."""
        return cls([q, p], np.diag([s / 2, 1 / (2 * s)]))


@dataclass(frozen=True)
class GaussianModel:
    s_matrix: np.ndarray
    probe: GaussianState
    slope_a: float
    slope_b: float
    readout_row: int = Q2

    def __post_init__(self):
        s = np.asarray(self.s_matrix, dtype=float)
        if s.shape != (4, 4):
            raise ValueError("s_matrix must be 4x4")
        if np.max(np.abs(s.T @ OMEGA @ s - OMEGA)) > 1e-10:
            raise ValueError("s_matrix is not symplectic")
        if abs(s[self.readout_row, Q1] - self.slope_a) > 1e-12:
            raise ValueError("readout row does not carry slope_a on Q1")
        if abs(s[P1, P1] - self.slope_b) > 1e-12:
            raise ValueError("momentum row does not carry slope_b on P1")
        object.__setattr__(self, "s_matrix", s)


def scattering_slopes(m1, m2):
    """Readout and momentum slopes for a probe of mass ``m2`` hitting mass ``m1``."""
    if m1 <= 0 or m2 <= 0:
        raise ValueError("masses must be positive")
    return 2 * m1 / (m1 + m2), (m1 - m2) / (m1 + m2)


def make_linear_model(a, b, probe=None):
    """Point-transformation completion of the two prescribed slopes.

    Positions map as ``Q' = A Q`` and momenta as ``P' = A^{-T} P`` with
    ``A = [[alpha, beta], [a, d]]`` on (Q1, Q2). For ``b != 0`` take
    ``d = 1, beta = 0, alpha = 1/b``; for ``b == 0`` take ``d = 0, beta = -1/a``.
    """
    probe = GaussianState.vacuum() if probe is None else probe
    if b != 0:
        aq = np.array([[1.0 / b, 0.0], [a, 1.0]])
    elif a != 0:
        aq = np.array([[1.0, -1.0 / a], [a, 0.0]])
    else:
        raise ValueError("a = b = 0 has no point-transformation completion")
    ap = np.linalg.inv(aq).T
    s = np.zeros((4, 4))
    qi, pi = [Q1, Q2], [P1, P2]
    s[np.ix_(qi, qi)] = aq
    s[np.ix_(pi, pi)] = ap
    # rounding in the inverse must not break the slope contract
    s[P1, P1] = b
    return GaussianModel(s, probe, float(a), float(b))


def _joint_moments(m, inp):
    mean = np.concatenate([inp.mean, m.probe.mean])
    cov = np.zeros((4, 4))
    cov[:2, :2] = inp.cov
    cov[2:, 2:] = m.probe.cov
    return mean, cov


def _linear_form_sq(w, mean, cov):
    return float((w @ mean) ** 2 + w @ cov @ w)


def gaussian_noise_error(m, inp):
    """ε for readout-after minus Q1-before under the product Gaussian."""
    w = m.s_matrix[m.readout_row].copy()
    w[Q1] -= 1.0
    return float(np.sqrt(_linear_form_sq(w, *_joint_moments(m, inp))))


def gaussian_noise_disturbance(m, inp):
    """η for P1-after minus P1-before under the product Gaussian."""
    w = m.s_matrix[P1].copy()
    w[P1] -= 1.0
    return float(np.sqrt(_linear_form_sq(w, *_joint_moments(m, inp))))


def ranged_calibration_error(m, gain, range_r):
    """Worst sharp-position deviation of the estimator ``gain * readout``.

    Calibration inputs have position q in [-r, r] and vanishing position
    variance. Returns ``(value, diverges)``; ``diverges`` says the value
    grows without bound as r -> infinity, i.e. ``gain * a != 1`` or the
    readout picks up the (then infinitely uncertain) input momentum.
    """
    if range_r <= 0:
        raise ValueError("range_r must be positive")
    row = m.s_matrix[m.readout_row]
    bias_slope = gain * row[Q1] - 1.0
    probe_w = gain * row[[Q2, P2]]
    offset = float(probe_w @ m.probe.mean)
    noise_var = float(probe_w @ m.probe.cov @ probe_w)
    if abs(gain * row[P1]) > 0:
        return np.inf, True
    value = float(np.sqrt((abs(bias_slope) * range_r + abs(offset)) ** 2 + noise_var))
    return value, bool(abs(bias_slope) > 1e-12)


@dataclass(frozen=True)
class NoiseCovariance:
    n_matrix: np.ndarray


def covariant_joint_validity(n):
    """Admissibility of an added-noise covariance for a covariant joint measurement.

    Returns ``(valid, delta_q, delta_p)``.
    """
    n = np.asarray(n.n_matrix if isinstance(n, NoiseCovariance) else n, dtype=float)
    if n.shape != (2, 2) or np.max(np.abs(n - n.T)) > 1e-12:
        raise ValueError("noise covariance must be a symmetric 2x2 matrix")
    valid = bool(np.linalg.eigvalsh(n + 0.5j * OMEGA1)[0] >= -1e-10)
    return valid, float(np.sqrt(max(n[0, 0], 0.0))), float(np.sqrt(max(n[1, 1], 0.0)))


def min_covariant_product(grid=41, lo=0.05, hi=5.0, corr_steps=11):
    """Smallest δq·δp over admissible noise covariances on a parameter grid."""
    diag = np.geomspace(lo, hi, grid)
    best = np.inf
    argbest = None
    for n11 in diag:
        for n22 in diag:
            bound = np.sqrt(n11 * n22)
            for n12 in np.linspace(-bound, bound, corr_steps):
                n = np.array([[n11, n12], [n12, n22]])
                valid, dq, dp = covariant_joint_validity(n)
                if valid and dq * dp < best:
                    best, argbest = dq * dp, n
    return float(best), argbest


SWEEP_COLUMNS = ("a", "b", "gain", "range", "epsilon", "eta", "calib", "diverges")


def sweep_rows(slopes, gains, ranges, probe=None, inp=None):
    """Rows of the linear-model sweep table (``SWEEP_COLUMNS`` order)."""
    inp = GaussianState.vacuum() if inp is None else inp
    rows = []
    for a, b in slopes:
        m = make_linear_model(a, b, probe)
        eps = gaussian_noise_error(m, inp)
        eta = gaussian_noise_disturbance(m, inp)
        for gain in gains:
            g = 1.0 / a if gain == "corrected" else float(gain)
            for r in ranges:
                calib, div = ranged_calibration_error(m, g, r)
                rows.append((float(a), float(b), g, float(r), eps, eta, calib, div))
    return rows


def sweep_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row in rows:
        w.writerow([str(v).lower() if isinstance(v, bool) else format(v, ".17g") for v in row])
    return buf.getvalue()
