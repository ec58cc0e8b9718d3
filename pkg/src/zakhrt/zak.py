"""Zak transform on torus grids and the covariance identities it satisfies.

Conventions (kept deliberately close to the source derivation):

    Zf(t, w)   = sum_tau f(t + tau) exp(-2 pi i <w, tau>)
    pi(x, y) f = exp(-2 pi i <y, t>) f(t - x)
    P(t, w)    = sum_j c_j exp(-2 pi i <t, l_j>) exp(-2 pi i <w, m_j>)
    gamma      = (-x, y)

Many references use exp(+2 pi i <y, t>) for modulation; with that sign the
torus shift would be (-x, -y) instead.

Grids are stored as arrays of shape (M,)*n + (M,)*n indexed (i_1..i_n, k_1..k_n)
for the node (t, w) = (i/M, k/M), row-major.
"""
import itertools
from dataclasses import dataclass

import numpy as np

from ._numeric import character, is_power_of_two, pairwise_sum, parallel_map, wrap_unit
from .functions import Combination, TFPoint, TFShift, sample, window_offsets

_CHUNK_ELEMS = 1 << 20


@dataclass(frozen=True)
class ZakGridSpec:
    n: int
    M: int
    T: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError("dimension n must be a positive integer")
        if not is_power_of_two(self.M) or self.M < 2:
            raise ValueError("resolution must be a power of two")
        if not isinstance(self.T, (int, np.integer)) or self.T < 1:
            raise ValueError("window T must be a positive integer")

    @classmethod
    def for_function(cls, f, M):
        return cls(n=f.n, M=M, T=f.default_window())

    def nodes(self):
        """All grid nodes as an (M^{2n}, 2n) array in row-major order."""
        axis = np.arange(self.M) / self.M
        mesh = np.meshgrid(*([axis] * (2 * self.n)), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    @property
    def shape(self):
        return (self.M,) * (2 * self.n)

    def to_dict(self):
        return {"n": int(self.n), "M": int(self.M), "T": int(self.T)}


@dataclass(frozen=True)
class ZakGrid:
    spec: ZakGridSpec
    values: np.ndarray
    error_bound: float

    def __post_init__(self):
        if self.values.shape != self.spec.shape:
            raise ValueError("grid values do not match spec shape")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite Zak values")

    @property
    def modulus(self):
        return np.abs(self.values)


def _tau_offsets(lo, hi):
    ranges = [range(int(a), int(b) + 1) for a, b in zip(lo, hi)]
    return np.array(list(itertools.product(*ranges)), dtype=np.float64)


def zak_at(h, points, T):
    """Truncated Zak sum of a function or handle at arbitrary points.

    ``points`` has shape (P, 2n) holding (t, w).  tau runs over the cube
    [-T, T]^n, widened by the handle's translations so the sum stays centred
    on the function's mass.  Each point is reduced independently with a
    compensated pairwise tree, so chunking and threading never change bits.
    """
    n = h.n
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if points.shape[-1] != 2 * n:
        raise ValueError(f"points must have {2 * n} coordinates")
    lo, hi = window_offsets(h)
    taus = _tau_offsets(lo - T, hi + T)
    k = len(taus)
    chunk = max(1, _CHUNK_ELEMS // k)

    def run(start):
        pts = points[start:start + chunk]
        t, w = pts[:, :n], pts[:, n:]
        args = t[None, :, :] + taus[:, None, :]
        terms = h(args) * character(w @ taus.T).T
        return pairwise_sum(terms, axis=0)

    parts = parallel_map(run, range(0, len(points), chunk))
    if not parts:
        return np.zeros(0, dtype=np.complex128)
    return np.concatenate(parts)


def zak_modulus_at(h, points, T):
    """|Zh| at points wrapped onto [0,1)^{2n}; |Zh| is Z^{2n}-periodic."""
    return np.abs(zak_at(h, wrap_unit(np.asarray(points, dtype=np.float64)), T))


def zak_direct(f, spec):
    """Zak grid by direct summation over tau in [-T, T]^n."""
    _check_dims(f, spec)
    values = zak_at(f, spec.nodes(), spec.T).reshape(spec.shape)
    return ZakGrid(spec, values, f.base.tail_bound(spec.T))


def zak_fft(samples, spec):
    """Zak grid from samples by folding tau mod M and a DFT per residue axis."""
    if samples.n != spec.n or samples.M != spec.M or samples.T != spec.T:
        raise ValueError(
            f"sample grid (n={samples.n}, M={samples.M}, T={samples.T}) does not match "
            f"spec (n={spec.n}, M={spec.M}, T={spec.T})"
        )
    n, M, T = spec.n, spec.M, spec.T
    # (tau_1, i_1, ..., tau_n, i_n)
    arr = samples.values.reshape([2 * T + 1, M] * n)
    block_lo = (-T) // M
    nblocks = T // M - block_lo + 1
    for ax in range(n):
        tau_axis = 2 * ax
        moved = np.moveaxis(arr, tau_axis, 0)
        padded = np.zeros((nblocks * M,) + moved.shape[1:], dtype=np.complex128)
        start = -T - block_lo * M
        padded[start:start + 2 * T + 1] = moved
        folded = pairwise_sum(padded.reshape((nblocks, M) + moved.shape[1:]), axis=0)
        arr = np.moveaxis(folded, 0, tau_axis)
    # now (r_1, i_1, ..., r_n, i_n); DFT over residues gives k
    arr = np.fft.fftn(arr, axes=tuple(2 * ax for ax in range(n)))
    order = [2 * ax + 1 for ax in range(n)] + [2 * ax for ax in range(n)]
    values = np.ascontiguousarray(np.transpose(arr, order))
    return ZakGrid(spec, values, samples.tail_bound)


def zak_transform(f, spec):
    """Zak grid through the FFT path (the fast default)."""
    return zak_fft(sample(f, spec.T, spec.M), spec)


def _check_dims(f, spec):
    if f.n != spec.n:
        raise ValueError("function dimension does not match grid spec")


def check_quasi_periodicity(f, spec):
    """Sup residuals of Zf(t, w+e_j) = Zf(t, w) and Zf(t+e_j, w) = e^{2 pi i w_j} Zf(t, w).

    Every side is an independent direct sum at its own arguments.
    """
    _check_dims(f, spec)
    nodes = spec.nodes()
    base = zak_at(f, nodes, spec.T)
    omega_res = 0.0
    t_res = 0.0
    n = spec.n
    for j in range(n):
        shifted = nodes.copy()
        shifted[:, n + j] += 1.0
        omega_res = max(omega_res, float(np.max(np.abs(zak_at(f, shifted, spec.T) - base))))
        shifted = nodes.copy()
        shifted[:, j] += 1.0
        expected = character(-nodes[:, n + j]) * base
        t_res = max(t_res, float(np.max(np.abs(zak_at(f, shifted, spec.T) - expected))))
    return {"omega_periodicity": omega_res, "t_quasi_periodicity": t_res}


def check_unitarity(Z, f):
    """Relative error between the grid L2 norm of Zf and ||f||."""
    m2n = Z.spec.M ** (2 * Z.spec.n)
    energy = pairwise_sum(np.abs(Z.values.ravel()) ** 2) / m2n
    norm = f.norm()
    return abs(float(np.sqrt(energy)) - norm) / norm


@dataclass(frozen=True)
class TrigPoly:
    """P(t, w) = sum_j c_j exp(-2 pi i <t, l_j>) exp(-2 pi i <w, m_j>)."""

    terms: tuple  # ((c, l, m), ...)

    def __post_init__(self):
        if not self.terms:
            raise ValueError("a trigonometric polynomial needs at least one term")
        clean = []
        seen = set()
        n = len(self.terms[0][1])
        for c, l, m in self.terms:
            c = complex(c)
            l = tuple(int(v) for v in l)
            m = tuple(int(v) for v in m)
            if c == 0:
                raise ValueError("coefficients must be nonzero")
            if len(l) != n or len(m) != n:
                raise ValueError("inconsistent frequency dimensions")
            if (l, m) in seen:
                raise ValueError(f"duplicate frequency pair {(l, m)}")
            seen.add((l, m))
            clean.append((c, l, m))
        object.__setattr__(self, "terms", tuple(clean))

    @property
    def n(self):
        return len(self.terms[0][1])

    @property
    def N(self):
        return len(self.terms)

    def scaled(self, kappa):
        return TrigPoly(tuple((kappa * c, l, m) for c, l, m in self.terms))

    def __call__(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        n = self.n
        t, w = points[:, :n], points[:, n:]
        vals = np.stack([
            c * character(t @ np.array(l, float) + w @ np.array(m, float))
            for c, l, m in self.terms
        ])
        return pairwise_sum(vals, axis=0)

    def combination(self, f):
        """sum_j c_j pi(x = m_j, y = l_j) f, the function whose Zak is P * Zf."""
        return Combination(f, tuple(
            (c, TFPoint(tuple(float(v) for v in m), tuple(float(v) for v in l)))
            for c, l, m in self.terms
        ))

    def to_dict(self):
        return {"terms": [
            {"c": [c.real, c.imag], "l": list(l), "m": list(m)} for c, l, m in self.terms
        ]}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple((complex(*t["c"]), t["l"], t["m"]) for t in d["terms"]))


def eval_trig_poly(P, z):
    return complex(P(np.atleast_1d(np.asarray(z, dtype=np.float64))[None, :])[0])


@dataclass(frozen=True)
class IdentityCheck:
    lhs: ZakGrid
    rhs: ZakGrid
    residual: float


def lattice_combination_zak(f, P, spec):
    """Z[sum_j c_j pi(l_j, m_j) f] by direct summation against P * Zf."""
    _check_dims(f, spec)
    nodes = spec.nodes()
    lhs = zak_at(P.combination(f), nodes, spec.T)
    rhs = P(nodes) * zak_at(f, nodes, spec.T)
    bound = f.tail_bound(spec.T) * sum(abs(c) for c, _, _ in P.terms)
    return IdentityCheck(
        ZakGrid(spec, lhs.reshape(spec.shape), bound),
        ZakGrid(spec, rhs.reshape(spec.shape), bound),
        float(np.max(np.abs(lhs - rhs))),
    )


def shifted_zak(f, p, spec):
    """Z[pi(x, y) f](t, w) against exp(-2 pi i <t, y>) Zf(t - x, w + y).

    The right side is a fresh direct sum at the shifted, generally off-grid,
    arguments; nothing is interpolated.
    """
    _check_dims(f, spec)
    n = spec.n
    nodes = spec.nodes()
    lhs = zak_at(TFShift(f, p), nodes, spec.T)
    moved = np.concatenate([nodes[:, :n] - p.xa, nodes[:, n:] + p.ya], axis=1)
    rhs = character(nodes[:, :n] @ p.ya) * zak_at(f, moved, spec.T)
    bound = f.tail_bound(spec.T)
    return IdentityCheck(
        ZakGrid(spec, lhs.reshape(spec.shape), bound),
        ZakGrid(spec, rhs.reshape(spec.shape), bound),
        float(np.max(np.abs(lhs - rhs))),
    )


def gamma_of(p):
    """Torus shift (-x, y) induced by a time-frequency point."""
    return np.concatenate([-p.xa, p.ya])


def functional_equation_residual(f, P, p, spec):
    """sup_z | |P(z)| |F(z)| - |F(z + gamma)| | over grid nodes, gamma = (-x, y)."""
    _check_dims(f, spec)
    nodes = spec.nodes()
    fz = zak_modulus_at(f, nodes, spec.T)
    fshift = zak_modulus_at(f, nodes + gamma_of(p), spec.T)
    return float(np.max(np.abs(np.abs(P(nodes)) * fz - fshift)))


def relation_residual_l2(f, P, p, spec):
    """Grid L2 norm of P(z) F(z) - exp(-2 pi i <t, y>) F(t - x, w + y).

    By unitarity this is the L2 distance between sum_j c_j pi(l_j, m_j) f
    and pi(x, y) f.
    """
    n = spec.n
    nodes = spec.nodes()
    moved = np.concatenate([nodes[:, :n] - p.xa, nodes[:, n:] + p.ya], axis=1)
    diff = P(nodes) * zak_at(f, nodes, spec.T) - character(nodes[:, :n] @ p.ya) * zak_at(f, moved, spec.T)
    energy = pairwise_sum(np.abs(diff) ** 2) / spec.M ** (2 * n)
    return float(np.sqrt(energy))


def random_trig_poly(rng, n=1, max_terms=4, max_freq=5):
    """Random P: coefficients in the unit disk, |l|, |m| <= max_freq."""
    count = int(rng.integers(1, max_terms + 1))
    seen = {}
    while len(seen) < count:
        l = tuple(int(v) for v in rng.integers(-max_freq, max_freq + 1, size=n))
        m = tuple(int(v) for v in rng.integers(-max_freq, max_freq + 1, size=n))
        r = np.sqrt(rng.uniform(0.01, 1.0))
        c = r * np.exp(2j * np.pi * rng.uniform())
        seen.setdefault((l, m), c)
    return TrigPoly(tuple((c, l, m) for (l, m), c in seen.items()))


def random_tf_point(rng, n=1, bound=2.0):
    return TFPoint(tuple(rng.uniform(-bound, bound, size=n).tolist()),
                   tuple(rng.uniform(-bound, bound, size=n).tolist()))


def identity_sweep(f, spec, draws=100, seed=0):
    """Identity-I, identity-II and functional-equation residuals for random draws."""
    rng = np.random.default_rng(seed)
    out = {"identity_I": [], "identity_II": [], "functional_equation": []}
    for _ in range(draws):
        P = random_trig_poly(rng, spec.n)
        p = random_tf_point(rng, spec.n)
        out["identity_I"].append(lattice_combination_zak(f, P, spec).residual)
        out["identity_II"].append(shifted_zak(f, p, spec).residual)
        out["functional_equation"].append(functional_equation_residual(f, P, p, spec))
    return out
