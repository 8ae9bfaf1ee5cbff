"""Finite-dimensional states, observables, POVMs, channels and measurement models.

Operators are plain complex ``numpy`` arrays. The container types below are
frozen dataclasses that validate their invariants on construction, so any
instance that exists is physically admissible.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

STRUCT_TOL = 1e-10
HERMITIAN_TOL = 1e-12
# eigenvalues closer than this are merged into one spectral projector
DEGENERACY_TOL = 1e-9
# effect eigenvalues at or below this are rounding noise of a zero eigenvalue
FACTOR_DROP = 1e-14


class DimensionError(ValueError):
    pass


def as_operator(x):
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"operator must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("operator has non-finite entries")
    return a


def dag(a):
    return np.conj(np.swapaxes(a, -1, -2))


def is_hermitian(a, tol=HERMITIAN_TOL):
    return bool(np.max(np.abs(a - dag(a)), initial=0.0) <= tol)


def hermitian_part(a):
    return 0.5 * (a + dag(a))


def tensor(a, b):
    """Kronecker product ``a ⊗ b``."""
    return np.kron(as_operator(a), as_operator(b))


def partial_trace(o, dims, keep="first"):
    """Trace out one factor of a bipartite operator on ``C^d1 ⊗ C^d2``."""
    o = as_operator(o)
    d1, d2 = (int(d) for d in dims)
    if o.shape[0] != d1 * d2:
        raise DimensionError(f"operator of dim {o.shape[0]} is not {d1}x{d2}")
    t = o.reshape(d1, d2, d1, d2)
    if keep == "first":
        return np.einsum("ijkj->ik", t)
    if keep == "second":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'first' or 'second', got {keep!r}")


def expectation(rho, x):
    return float(np.real(np.einsum("ij,ji->", rho, x)))


def operator_to_json(a):
    a = as_operator(a)
    return {
        "dim": int(a.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def operator_from_json(obj):
    dim = int(obj["dim"])
    flat = np.array([complex(re, im) for re, im in obj["entries"]])
    if flat.size != dim * dim:
        raise DimensionError(f"expected {dim * dim} entries, got {flat.size}")
    return flat.reshape(dim, dim)


def spectral_decomposition(a, tol=DEGENERACY_TOL):
    """Distinct eigenvalues (ascending) and their spectral projectors."""
    a = as_operator(a)
    if not is_hermitian(a, 1e-10):
        raise ValueError("spectral decomposition needs a Hermitian operator")
    w, v = np.linalg.eigh(hermitian_part(a))
    values, projectors = [], []
    start = 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k] - w[start] > tol:
            block = v[:, start:k]
            values.append(float(np.mean(w[start:k])))
            projectors.append(block @ dag(block))
            start = k
    return np.array(values), np.array(projectors)


@dataclass(frozen=True)
class State:
    """Density operator; pure states are stored as rank-one projectors."""

    density: np.ndarray

    def __post_init__(self):
        rho = as_operator(self.density)
        if not is_hermitian(rho):
            raise ValueError("density operator is not Hermitian")
        rho = hermitian_part(rho)
        if abs(np.trace(rho).real - 1.0) > 1e-12:
            raise ValueError(f"density has trace {np.trace(rho).real!r}, not 1")
        if np.linalg.eigvalsh(rho)[0] < -1e-12:
            raise ValueError("density operator is not positive")
        object.__setattr__(self, "density", rho)

    @property
    def dim(self):
        return self.density.shape[0]

    @classmethod
    def pure(cls, vec):
        v = np.asarray(vec, dtype=np.complex128).ravel()
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim):
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    @classmethod
    def from_bloch(cls, r):
        r = np.asarray(r, dtype=float)
        return cls(0.5 * (np.eye(2) + sum(ri * s for ri, s in zip(r, PAULI))))

    def factor(self):
        """``L`` with ``L @ L^† = density`` (columns are weighted eigenvectors)."""
        w, v = np.linalg.eigh(self.density)
        keep = w > 1e-15
        return v[:, keep] * np.sqrt(w[keep])


@dataclass(frozen=True)
class Observable:
    operator: np.ndarray
    eigenvalues: np.ndarray = field(default=None)
    projectors: np.ndarray = field(default=None)

    def __post_init__(self):
        op = as_operator(self.operator)
        if not is_hermitian(op):
            raise ValueError("observable operator is not Hermitian")
        op = hermitian_part(op)
        if self.eigenvalues is None or self.projectors is None:
            vals, projs = spectral_decomposition(op)
        else:
            vals = np.asarray(self.eigenvalues, dtype=float)
            projs = np.asarray(self.projectors, dtype=np.complex128)
            _check_spectral(op, vals, projs)
        object.__setattr__(self, "operator", op)
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "projectors", projs)

    @property
    def dim(self):
        return self.operator.shape[0]

    @classmethod
    def from_spectrum(cls, values, projectors):
        values = np.asarray(values, dtype=float)
        projectors = np.asarray(projectors, dtype=np.complex128)
        order = np.argsort(values)
        values, projectors = values[order], projectors[order]
        op = np.einsum("k,kij->ij", values, projectors)
        return cls(op, values, projectors)

    @classmethod
    def diagonal(cls, values):
        values = np.asarray(values, dtype=float)
        d = len(values)
        projs = np.zeros((d, d, d), dtype=np.complex128)
        projs[np.arange(d), np.arange(d), np.arange(d)] = 1.0
        return cls.from_spectrum(values, projs)


def _check_spectral(op, vals, projs):
    d = op.shape[0]
    if len(vals) != len(projs):
        raise ValueError("eigenvalue / projector count mismatch")
    if np.any(np.diff(vals) <= 0):
        raise ValueError("eigenvalues must be strictly increasing")
    for p in projs:
        if np.max(np.abs(p @ p - p)) > STRUCT_TOL:
            raise ValueError("spectral projector is not idempotent")
    for i in range(len(projs)):
        for j in range(i + 1, len(projs)):
            if np.max(np.abs(projs[i] @ projs[j])) > STRUCT_TOL:
                raise ValueError("spectral projectors are not orthogonal")
    if np.max(np.abs(projs.sum(axis=0) - np.eye(d))) > STRUCT_TOL:
        raise ValueError("spectral projectors do not resolve the identity")
    if np.max(np.abs(np.einsum("k,kij->ij", vals, projs) - op)) > STRUCT_TOL:
        raise ValueError("operator differs from its spectral sum")


@dataclass(frozen=True)
class DiscretePOVM:
    outcomes: np.ndarray
    effects: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.outcomes, dtype=float).ravel()
        e = np.asarray(self.effects, dtype=np.complex128)
        if e.ndim != 3 or e.shape[1] != e.shape[2] or e.shape[0] != len(x):
            raise DimensionError("effects must be an (n, d, d) stack matching outcomes")
        if np.any(np.diff(x) <= 0):
            raise ValueError("outcomes must be strictly increasing")
        e = hermitian_part(e)
        for k, ek in enumerate(e):
            if np.linalg.eigvalsh(ek)[0] < -STRUCT_TOL:
                raise ValueError(f"effect for outcome {x[k]!r} is not positive")
        if np.max(np.abs(e.sum(axis=0) - np.eye(e.shape[1]))) > STRUCT_TOL:
            raise ValueError("effects do not sum to the identity")
        object.__setattr__(self, "outcomes", x)
        object.__setattr__(self, "effects", e)

    @property
    def dim(self):
        return self.effects.shape[1]

    @cached_property
    def effect_factors(self):
        """Thin factors F_x with ``E_x = F_x F_x†`` (rounding-level eigenvalues dropped).

        Quadratic forms ``<y|E_x|y>`` evaluated as ``|F_x† y|^2`` keep an exact
        zero at rounding-squared size instead of rounding size.
        """
        out = []
        for e in self.effects:
            w, v = np.linalg.eigh(e)
            keep = w > FACTOR_DROP
            out.append(v[:, keep] * np.sqrt(w[keep]))
        return out

    @classmethod
    def from_pairs(cls, outcomes, effects, tol=DEGENERACY_TOL):
        """Sort by outcome and merge effects whose outcomes coincide."""
        outcomes = np.asarray(outcomes, dtype=float)
        effects = np.asarray(effects, dtype=np.complex128)
        order = np.argsort(outcomes, kind="stable")
        xs, es = [], []
        for k in order:
            if xs and outcomes[k] - xs[-1] <= tol:
                es[-1] = es[-1] + effects[k]
            else:
                xs.append(float(outcomes[k]))
                es.append(effects[k].copy())
        return cls(np.array(xs), np.array(es))

    @classmethod
    def spectral(cls, obs):
        return cls(obs.eigenvalues, obs.projectors)


@dataclass(frozen=True)
class QuantumChannel:
    """Completely positive trace-preserving map in Kraus form."""

    kraus: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.kraus, dtype=np.complex128)
        if k.ndim == 2:
            k = k[None]
        if k.ndim != 3 or k.shape[0] == 0:
            raise ValueError("need a nonempty (n, d_out, d_in) Kraus stack")
        s = np.einsum("kji,kjl->il", k.conj(), k)
        if np.max(np.abs(s - np.eye(k.shape[2]))) > STRUCT_TOL:
            raise ValueError("Kraus operators are not trace preserving")
        object.__setattr__(self, "kraus", k)

    @property
    def dim_in(self):
        return self.kraus.shape[2]

    @property
    def dim_out(self):
        return self.kraus.shape[1]

    def apply(self, rho):
        return np.einsum("kij,jl,kml->im", self.kraus, rho, self.kraus.conj())

    def choi(self):
        d = self.dim_in
        out = np.zeros((self.dim_out * d, self.dim_out * d), dtype=np.complex128)
        for i in range(d):
            for j in range(d):
                e = np.zeros((d, d), dtype=np.complex128)
                e[i, j] = 1.0
                out += np.kron(self.apply(e), e)
        return out


def identity_channel(dim):
    return QuantumChannel(np.eye(dim, dtype=np.complex128)[None])


def constant_channel(rho0, dim_in):
    """``rho -> rho0`` for every input; Kraus ``sqrt(l_j) |v_j><e_k|``."""
    rho0 = rho0.density if isinstance(rho0, State) else as_operator(rho0)
    w, v = np.linalg.eigh(rho0)
    kraus = []
    for lam, vec in zip(w, v.T):
        if lam <= 1e-15:
            continue
        for k in range(dim_in):
            K = np.zeros((rho0.shape[0], dim_in), dtype=np.complex128)
            K[:, k] = np.sqrt(lam) * vec
            kraus.append(K)
    return QuantumChannel(np.array(kraus))


def measure_and_prepare(obs, rho0):
    """Nonselective sharp measurement of ``obs`` followed by preparing ``rho0``.

    As a channel this coincides with :func:`constant_channel`; the Kraus
    operators are kept aligned with the eigenspaces of ``obs``.
    """
    rho0 = rho0.density if isinstance(rho0, State) else as_operator(rho0)
    w, v = np.linalg.eigh(rho0)
    kraus = []
    for proj in obs.projectors:
        pw, pv = np.linalg.eigh(proj)
        basis = pv[:, pw > 0.5]
        for lam, vec in zip(w, v.T):
            if lam <= 1e-15:
                continue
            for u in basis.T:
                kraus.append(np.sqrt(lam) * np.outer(vec, u.conj()))
    return QuantumChannel(np.array(kraus))


@dataclass(frozen=True)
class MeasurementModel:
    """Probe state, system-probe coupling and pointer observable on the probe."""

    probe: State
    coupling: np.ndarray
    pointer: Observable

    def __post_init__(self):
        u = as_operator(self.coupling)
        if np.max(np.abs(dag(u) @ u - np.eye(u.shape[0]))) > STRUCT_TOL:
            raise ValueError("coupling is not unitary")
        if self.pointer.dim != self.probe.dim:
            raise DimensionError("pointer and probe dimensions differ")
        if u.shape[0] % self.probe.dim:
            raise DimensionError("coupling dimension is not a multiple of the probe dimension")
        object.__setattr__(self, "coupling", u)

    @property
    def probe_dim(self):
        return self.probe.dim

    @property
    def system_dim(self):
        return self.coupling.shape[0] // self.probe.dim

    @property
    def dims(self):
        return (self.system_dim, self.probe_dim)


def swap_operator(d):
    s = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


def model_to_povm(m):
    """POVM seen by the pointer: ``E_x = tr_probe[(1⊗σ) U^†(1⊗Π_x)U]``."""
    d1, d2 = m.dims
    u = m.coupling
    left = np.kron(np.eye(d1), m.probe.density)
    effects = []
    for proj in m.pointer.projectors:
        heis = dag(u) @ np.kron(np.eye(d1), proj) @ u
        effects.append(hermitian_part(partial_trace(left @ heis, (d1, d2), "first")))
    return DiscretePOVM(m.pointer.eigenvalues, np.array(effects))


def model_to_channel(m):
    """Nonselective state change ``rho -> tr_probe U(rho⊗σ)U^†``.

    One Kraus operator per (probe eigenvector j, probe basis vector k):
    ``K_kj = sqrt(p_j) (1⊗<e_k|) U (1⊗|φ_j>)``.
    """
    d1, d2 = m.dims
    w, v = np.linalg.eigh(m.probe.density)
    u4 = m.coupling.reshape(d1, d2, d1, d2)
    kraus = []
    for p, phi in zip(w, v.T):
        if p <= 1e-15:
            continue
        # contract the probe input leg with phi
        col = np.einsum("abcd,d->abc", u4, phi) * np.sqrt(p)
        for k in range(d2):
            kraus.append(col[:, k, :])
    return QuantumChannel(np.array(kraus))


def moment_operator(p, k):
    """``M_k = Σ_x x^k E_x``."""
    if not 0 <= int(k) <= 4:
        raise ValueError("moment order must be in 0..4")
    return hermitian_part(np.einsum("x,xij->ij", p.outcomes ** int(k), p.effects))


def outcome_distribution(p, s):
    from .transport import Distribution

    if p.dim != s.dim:
        raise DimensionError(f"POVM dim {p.dim} != state dim {s.dim}")
    probs = np.real(np.einsum("xij,ji->x", p.effects, s.density))
    return Distribution(p.outcomes, probs)


def heisenberg_apply(c, x):
    """Dual channel ``Σ K^† X K``."""
    x = as_operator(x)
    if x.shape[0] != c.dim_out:
        raise DimensionError(f"operator dim {x.shape[0]} != channel output dim {c.dim_out}")
    return np.einsum("kji,jl,klm->im", c.kraus.conj(), x, c.kraus)


PAULI = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


def bloch_operator(v):
    return sum(float(vi) * s for vi, s in zip(v, PAULI))


def _psd_sqrt(e):
    w, v = np.linalg.eigh(hermitian_part(e))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ dag(v)


def povm_dilation(p):
    """Naimark dilation of ``p``: probe ``|0>``, pointer ``diag(outcomes)``.

    The coupling sends ``|i>⊗|0>`` to ``Σ_x sqrt(E_x)|i> ⊗ |x>``; the rest of
    the unitary is an arbitrary orthonormal completion.
    """
    d, n = p.dim, len(p.outcomes)
    iso = np.zeros((d * n, d), dtype=np.complex128)
    for x, e in enumerate(p.effects):
        iso[x::n, :] = _psd_sqrt(e)
    # orthonormal completion of the isometry's range
    q, _ = np.linalg.qr(np.hstack([iso, np.eye(d * n)]))
    comp = q[:, d:]
    u = np.zeros((d * n, d * n), dtype=np.complex128)
    other = iter(comp.T)
    for i in range(d):
        for k in range(n):
            u[:, i * n + k] = iso[:, i] if k == 0 else next(other)
    probe = np.zeros(n)
    probe[0] = 1.0
    return MeasurementModel(State.pure(probe), u, Observable.diagonal(p.outcomes))
