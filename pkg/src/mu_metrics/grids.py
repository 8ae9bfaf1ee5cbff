"""Finite position/momentum analogs on a d-point grid.

Positions are ``h (k - (d-1)/2)`` with ``h = sqrt(2π/d)``; momentum is the same
diagonal conjugated by the unitary DFT ``F[j, k] = exp(i x_j p_k)/sqrt(d)``.
With this spacing the grid is self-dual: a vacuum-like Gaussian has variance
close to 1/2 in both quadratures.
"""
import numpy as np

from .operators import Observable, State


def grid_points(d):
    h = np.sqrt(2 * np.pi / d)
    return h * (np.arange(d) - (d - 1) / 2)


def dft(d):
    x = grid_points(d)
    return np.exp(1j * np.outer(x, x)) / np.sqrt(d)


def position(d):
    return Observable.diagonal(grid_points(d))


def momentum(d):
    f = dft(d)
    projs = np.einsum("ik,jk->kij", f, f.conj())
    return Observable.from_spectrum(grid_points(d), projs)


def symmetric_integer_position(d):
    """Parity-symmetric support without zero, e.g. {-2, -1, 1, 2} for d = 4."""
    if d % 2:
        raise ValueError("parity grid needs an even dimension")
    half = np.arange(1, d // 2 + 1, dtype=float)
    return Observable.diagonal(np.concatenate([-half[::-1], half]))


def gaussian_vector(d, spread, center=0.0, momentum_space=False):
    """Discretised Gaussian amplitude with position standard deviation ``spread``.

    With ``momentum_space`` the profile is laid out over momentum eigenvectors
    instead, so ``spread`` is then the momentum standard deviation.
    """
    x = grid_points(d)
    amp = np.exp(-((x - center) ** 2) / (4 * spread**2)).astype(np.complex128)
    amp /= np.linalg.norm(amp)
    if momentum_space:
        amp = dft(d) @ amp
    return amp


def gaussian_state(d, spread, center=0.0, momentum_space=False):
    return State.pure(gaussian_vector(d, spread, center, momentum_space))
