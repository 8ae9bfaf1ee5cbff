"""Seeded random quantum objects for property checks and benchmarks."""
import numpy as np
from scipy.stats import unitary_group

from .operators import DiscretePOVM, MeasurementModel, Observable, State
from .transport import Distribution


def ginibre(rng, n, m=None):
    m = n if m is None else m
    return rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))


def random_state(rng, d, rank=None):
    rank = d if rank is None else rank
    g = ginibre(rng, d, rank)
    rho = g @ g.conj().T
    return State(rho / np.trace(rho).real)


def random_pure_state(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return State.pure(v)


def random_unitary(rng, d):
    return unitary_group.rvs(d, random_state=rng) if d > 1 else np.eye(1, dtype=complex)


def random_observable(rng, d, degenerate=False):
    if degenerate and d > 1:
        vals = rng.choice([-1.0, 0.5, 2.0], size=d)
        u = random_unitary(rng, d)
        return Observable(u @ np.diag(vals) @ u.conj().T)
    g = ginibre(rng, d)
    return Observable((g + g.conj().T) / 2)


def random_povm(rng, d, n_outcomes=None):
    n = int(rng.integers(2, 5)) if n_outcomes is None else n_outcomes
    gs = [ginibre(rng, d) for _ in range(n)]
    raw = np.array([g @ g.conj().T for g in gs])
    total = raw.sum(axis=0)
    w, v = np.linalg.eigh(total)
    inv_sqrt = v @ np.diag(w ** -0.5) @ v.conj().T
    effects = np.array([inv_sqrt @ e @ inv_sqrt for e in raw])
    outcomes = np.sort(rng.normal(scale=2.0, size=n))
    return DiscretePOVM.from_pairs(outcomes, effects)


def random_model(rng, d1=None, d2=None):
    d1 = int(rng.integers(2, 5)) if d1 is None else d1
    d2 = int(rng.integers(2, 5)) if d2 is None else d2
    return MeasurementModel(
        random_state(rng, d2),
        random_unitary(rng, d1 * d2),
        random_observable(rng, d2, degenerate=bool(rng.integers(2))),
    )


def random_distribution(rng, max_support=32):
    n = int(rng.integers(1, max_support + 1))
    support = np.sort(rng.choice(np.linspace(-5, 5, 201), size=n, replace=False))
    probs = rng.dirichlet(np.ones(n))
    return Distribution(support, probs)
