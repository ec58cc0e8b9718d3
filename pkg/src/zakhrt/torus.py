"""Torus shifts z -> z + gamma mod Z^{2n}: orbits, classification, products."""
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._numeric import neumaier_sum, parallel_map, two_product, wrap_unit

RELATION_TOL = 1e-12
RATIONAL_TOL = 1e-12


def _reduce_exact(v):
    return v - math.floor(v)


@dataclass(frozen=True)
class TorusVector:
    coords: tuple
    tags: tuple  # Fraction or None per coordinate

    @classmethod
    def of(cls, values):
        """Build from floats and/or Fractions; Fractions become exact tags."""
        coords, tags = [], []
        for v in np.atleast_1d(np.asarray(values, dtype=object)).tolist():
            if isinstance(v, Fraction) or isinstance(v, int):
                fr = _reduce_exact(Fraction(v))
                tags.append(fr)
                coords.append(float(fr))
            else:
                coords.append(float(wrap_unit(float(v))))
                tags.append(None)
        return cls(tuple(coords), tuple(tags))

    @property
    def dim(self):
        return len(self.coords)

    @property
    def exact(self):
        return all(t is not None for t in self.tags)

    def array(self):
        return np.array(self.coords)

    def to_list(self):
        return [str(t) if t is not None else c for c, t in zip(self.coords, self.tags)]


def _as_torus(v):
    return v if isinstance(v, TorusVector) else TorusVector.of(v)


def advance(z, gamma, m):
    """(z + m gamma) mod 1.

    Exact in rational arithmetic when both inputs carry tags.  Otherwise m*gamma
    is formed error-free and reduced before the single rounding of the final
    addition, so the error does not grow with m.
    """
    z, gamma = _as_torus(z), _as_torus(gamma)
    if z.dim != gamma.dim:
        raise ValueError("dimension mismatch")
    if m < 0:
        raise ValueError("m must be non-negative")
    if z.exact and gamma.exact:
        return TorusVector.of([zt + m * gt for zt, gt in zip(z.tags, gamma.tags)])
    return TorusVector.of(_advance_float(z.array(), gamma.array(), np.array([m]))[0])


def _advance_float(z, gamma, ms):
    p, err = two_product(np.asarray(ms, dtype=np.float64)[:, None], gamma[None, :])
    frac = np.mod(p, 1.0)
    return wrap_unit(wrap_unit(frac + err) + z[None, :])


def orbit(z0, gamma, count):
    """Forward orbit points z0 + j gamma, j = 0..count-1, as a float array."""
    z0, gamma = _as_torus(z0), _as_torus(gamma)
    if z0.exact and gamma.exact:
        num, den = _orbit_exact(z0, gamma, count)
        return num / den
    return _advance_float(z0.array(), gamma.array(), np.arange(count))


def _orbit_exact(z0, gamma, count):
    den = math.lcm(*[t.denominator for t in z0.tags + gamma.tags])
    zn = np.array([int(t * den) for t in z0.tags], dtype=np.int64)
    gn = np.array([int(t * den) for t in gamma.tags], dtype=np.int64)
    j = np.arange(count, dtype=np.int64)[:, None]
    return (zn[None, :] + (j * gn[None, :]) % den) % den, den


@dataclass(frozen=True)
class OrbitClass:
    kind: str  # finite | infinite_nondense | dense_up_to_bound | unresolved
    order: int = None
    relation: tuple = None
    search_bound: int = None
    rational_dimension: int = None

    @property
    def infinite(self):
        return self.kind in ("infinite_nondense", "dense_up_to_bound")

    def to_dict(self):
        d = {"kind": self.kind, "rational_dimension": self.rational_dimension}
        if self.order is not None:
            d["order"] = self.order
        if self.relation is not None:
            d["relation"] = list(self.relation)
        if self.search_bound is not None:
            d["search_bound"] = self.search_bound
        return d

    @classmethod
    def from_dict(cls, d):
        rel = d.get("relation")
        return cls(d["kind"], d.get("order"), tuple(rel) if rel is not None else None,
                   d.get("search_bound"), d.get("rational_dimension"))


def rational_match(value, tag, Q, tol=RATIONAL_TOL):
    """Rational p/q with q <= Q within tol of value, or None."""
    if tag is not None:
        return tag if tag.denominator <= Q else None
    fr = Fraction(value).limit_denominator(Q)
    return fr if abs(Fraction(value) - fr) <= tol else None


def find_relation(gamma, H, tol=RELATION_TOL):
    """Smallest-height integer relation a0 + sum a_i gamma_i ~ 0, or None.

    Exhaustive over a_1..a_d in [-H, H] with a_0 determined by rounding; the
    sign is normalised so the first nonzero a_i (i >= 1) is positive.
    """
    g = np.asarray(gamma, dtype=np.float64)
    d = len(g)
    span = np.arange(-H, H + 1)
    rest_grid = np.stack(np.meshgrid(*([span] * (d - 1)), indexing="ij"), axis=-1).reshape(-1, d - 1) \
        if d > 1 else np.zeros((1, 0), dtype=np.int64)
    rest_dot = rest_grid @ g[1:] if d > 1 else np.zeros(1)

    def scan(a1):
        s = a1 * g[0] + rest_dot
        a0 = -np.rint(s)
        ok = (np.abs(a0 + s) <= tol) & (np.abs(a0) <= H)
        if a1 == 0:
            # first nonzero of the tail must be positive
            nz = rest_grid != 0
            first = np.where(nz.any(axis=1), rest_grid[np.arange(len(rest_grid)), nz.argmax(axis=1)], 0)
            ok &= first > 0
        idx = np.flatnonzero(ok)
        return [(int(a0[i]), a1) + tuple(int(v) for v in rest_grid[i]) for i in idx]

    hits = [h for part in parallel_map(scan, range(0, H + 1)) for h in part]
    if not hits:
        return None
    return min(hits, key=lambda r: (max(abs(v) for v in r), sum(abs(v) for v in r), r))


def default_height(dim):
    return 1000 if dim <= 2 else 30


def classify_generator(gamma, Q=10 ** 4, H=None, budget=10 ** 8, tol=RELATION_TOL):
    """Classify the group generated by gamma mod Z^d: finite, infinite or dense."""
    gamma = _as_torus(gamma)
    d = gamma.dim
    if Q < 1 or (H is not None and H < 1):
        raise ValueError("caps Q and H must be at least 1")
    H = default_height(d) if H is None else int(H)
    one_torus_pair = d == 2

    rationals = [rational_match(c, t, Q) for c, t in zip(gamma.coords, gamma.tags)]
    if all(r is not None for r in rationals):
        order = math.lcm(*[r.denominator for r in rationals])
        assert all((order * r).denominator == 1 for r in rationals)
        return OrbitClass("finite", order=order, rational_dimension=1 if one_torus_pair else None)

    if (2 * H + 1) ** d > budget:
        return OrbitClass("unresolved", search_bound=H)
    g = np.array([float(r) if r is not None else c for r, c in zip(rationals, gamma.coords)])
    rel = find_relation(g, H, tol)
    if rel is not None:
        return OrbitClass("infinite_nondense", relation=rel,
                          rational_dimension=2 if one_torus_pair else None)
    return OrbitClass("dense_up_to_bound", search_bound=H,
                      rational_dimension=3 if one_torus_pair else None)


def orbit_discrepancy(z0, gamma, m, b):
    """max over the b^d axis boxes of |empirical fraction - box volume|."""
    if m < 1 or b < 2:
        raise ValueError("need m >= 1 and b >= 2")
    z0, gamma = _as_torus(z0), _as_torus(gamma)
    d = z0.dim
    if z0.exact and gamma.exact:
        num, den = _orbit_exact(z0, gamma, m)
        cells = (num * b) // den
    else:
        pts = orbit(z0, gamma, m)
        cells = np.minimum(np.floor(pts * b).astype(np.int64), b - 1)
    flat = np.ravel_multi_index(tuple(cells.T), (b,) * d)
    counts = np.bincount(flat, minlength=b ** d)
    return float(np.max(np.abs(counts / m - 1.0 / b ** d)))


@dataclass(frozen=True)
class OrbitProduct:
    log_magnitude: float
    zero_index: int = None

    @property
    def is_zero(self):
        return self.zero_index is not None


def _multiplier_values(P, pts):
    return np.abs(P(pts))


def product_along_orbit(P, z, gamma, m):
    """sum_{j<m} log|P(z + j gamma)| with a flag for the first exact zero.

    ``P`` is a TrigPoly or any callable mapping (k, 2n) points to values.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    pts = orbit(z, gamma, m)
    vals = _multiplier_values(P, pts)
    zeros = np.flatnonzero(vals == 0.0)
    if zeros.size:
        return OrbitProduct(-math.inf, int(zeros[0]))
    return OrbitProduct(neumaier_sum(np.log(vals)))


@dataclass(frozen=True)
class ProductIdentityReport:
    residual: float           # max_m | |F(z + m gamma)| - prod |P| * |F(z)| |
    excess: float             # part of the residual not explained by per-step errors
    max_step_residual: float  # max_j | |P(z_j)| |F(z_j)| - |F(z_{j+1})| |
    m_max: int


def verify_product_identity(f, P, p, z, m_max, spec, multiplier=None):
    """Check |F(z + m gamma)| = prod_{j<m} |P(z + j gamma)| |F(z)| for m <= m_max.

    With e_0 = 0 and e_m = |P(z_{m-1})| e_{m-1} + delta_{m-1}, the telescoped
    prediction can differ from the direct value by at most e_m; ``excess``
    reports anything beyond that bound.  ``multiplier`` replaces |P| by an
    arbitrary callable on (k, 2n) points.
    """
    from .zak import gamma_of, zak_modulus_at

    gamma = TorusVector.of(gamma_of(p))
    pts = orbit(z, gamma, m_max + 1)
    F = zak_modulus_at(f, pts, spec.T)
    mult = np.abs(multiplier(pts[:-1])) if multiplier is not None else _multiplier_values(P, pts[:-1])
    steps = np.abs(mult * F[:-1] - F[1:])
    residual = excess = 0.0
    bound = 0.0
    log_prod = []
    for m in range(1, m_max + 1):
        bound = mult[m - 1] * bound + steps[m - 1]
        log_prod.append(math.log(mult[m - 1]) if mult[m - 1] > 0 else -math.inf)
        lp = neumaier_sum(log_prod) if all(math.isfinite(v) for v in log_prod) else -math.inf
        predicted = math.exp(lp) * F[0] if math.isfinite(lp) else 0.0
        gap = abs(F[m] - predicted)
        residual = max(residual, gap)
        excess = max(excess, gap - bound)
    return ProductIdentityReport(float(residual), max(float(excess), 0.0), float(steps.max()), m_max)
