"""Zeros of |Zf| on the torus: grid scan, shrinking-box refinement,
finiteness certificates and invariance under the gamma shift."""
import itertools
from dataclasses import dataclass, field

import numpy as np

from ._numeric import wrap_unit
from .torus import TorusVector, orbit
from .zak import ZakGridSpec, zak_modulus_at, zak_transform

MERGE_CELLS = 2
DEFAULT_EXCLUSION = 0.125


class RefinementError(RuntimeError):
    """Refinement could not contract onto a zero (spurious or non-isolated)."""


def default_threshold(error_bound):
    return max(10.0 * error_bound, 1e-8)


def torus_distance(a, b):
    """Sup-norm distance on the torus."""
    d = np.abs(np.asarray(a, float) - np.asarray(b, float)) % 1.0
    return float(np.max(np.minimum(d, 1.0 - d)))


@dataclass(frozen=True)
class Candidate:
    index: tuple
    location: tuple
    value: float


@dataclass(frozen=True)
class ZeroPoint:
    location: tuple
    residual: float
    radius: float

    def to_dict(self):
        return {"location": list(self.location), "residual": self.residual, "radius": self.radius}


@dataclass(frozen=True)
class ZeroSetReport:
    zeros: tuple
    off_zero_lower_bound: float
    spec: ZakGridSpec
    threshold: float
    exclusion_radius: float = DEFAULT_EXCLUSION

    @property
    def finite(self):
        return self.off_zero_lower_bound > self.threshold

    def to_dict(self):
        return {
            "zeros": [z.to_dict() for z in self.zeros],
            "off_zero_lower_bound": self.off_zero_lower_bound,
            "grid": self.spec.to_dict(),
            "threshold": self.threshold,
            "exclusion_radius": self.exclusion_radius,
            "finite": self.finite,
        }

    @classmethod
    def from_dict(cls, d):
        zeros = tuple(ZeroPoint(tuple(z["location"]), z["residual"], z["radius"]) for z in d["zeros"])
        g = d["grid"]
        return cls(zeros, d["off_zero_lower_bound"], ZakGridSpec(g["n"], g["M"], g["T"]),
                   d["threshold"], d.get("exclusion_radius", DEFAULT_EXCLUSION))


def scan_zeros(Z, threshold):
    """Grid-local minima of |F| (torus neighbourhood) with value below threshold."""
    if threshold <= Z.error_bound:
        raise ValueError(
            f"threshold {threshold:g} is below the truncation error {Z.error_bound:g}"
        )
    A = Z.modulus
    dims = A.ndim
    is_min = A < threshold
    for off in itertools.product((-1, 0, 1), repeat=dims):
        if any(off):
            is_min &= A <= np.roll(A, off, axis=tuple(range(dims)))
    M = Z.spec.M
    out = [Candidate(tuple(int(v) for v in idx), tuple(float(v) / M for v in idx), float(A[idx]))
           for idx in zip(*np.nonzero(is_min))]
    return sorted(out, key=lambda c: (c.value, c.index))


def refine_zero(f, candidate, spec, target_radius=1e-6, threshold=None, max_rounds=400):
    """Shrinking-box search around a grid candidate.

    Each round probes the 3^{2n} stencil centre + r*{-1,0,1}^{2n} by direct
    summation, moves to the best probe, and halves r when the centre is
    already best.  Stops once r <= target_radius and the residual is below the
    acceptance threshold.  Raises RefinementError if the minimum drifts more
    than two cells from the candidate or never falls below the threshold.
    """
    if threshold is None:
        threshold = default_threshold(f.tail_bound(spec.T))
    dims = 2 * spec.n
    start = np.array(candidate.location, dtype=np.float64)
    centre = start.copy()
    r = 1.0 / spec.M
    stencil = np.array(sorted(itertools.product((-1, 0, 1), repeat=dims), key=lambda o: any(o)),
                       dtype=np.float64)
    best = float(zak_modulus_at(f, centre[None, :], spec.T)[0])
    floor_radius = 1e-14
    for _ in range(max_rounds):
        if r <= target_radius and best <= threshold:
            loc = tuple(float(v) for v in wrap_unit(centre))
            return ZeroPoint(loc, best, r)
        if r < floor_radius:
            break
        probes = centre + r * stencil
        vals = zak_modulus_at(f, probes, spec.T)
        j = int(np.argmin(vals))
        if vals[j] < best:
            centre, best = probes[j], float(vals[j])
            if torus_distance(centre, start) > MERGE_CELLS / spec.M:
                raise RefinementError(f"minimum escaped the box around {candidate.location}")
        else:
            r /= 2.0
    raise RefinementError(
        f"no contraction towards a zero near {candidate.location}: residual {best:g} > {threshold:g}"
    )


def _scan_default(Z):
    peak = float(Z.modulus.max())
    return min(0.5, 8.0 / Z.spec.M) * peak


def certify_finite_zero_set(f, spec, threshold=None, scan_threshold=None,
                            exclusion_radius=DEFAULT_EXCLUSION, target_radius=1e-6, grid=None):
    """Scan, refine and merge zeros, then bound |F| away from them.

    Finiteness at resolution is claimed when the minimum of |F| over grid
    nodes farther than ``exclusion_radius`` from every zero exceeds the
    acceptance threshold.
    """
    Z = zak_transform(f, spec) if grid is None else grid
    if threshold is None:
        threshold = default_threshold(Z.error_bound)
    if scan_threshold is None:
        scan_threshold = max(_scan_default(Z), 2.0 * threshold)
    zeros = []
    for cand in scan_zeros(Z, scan_threshold):
        z = refine_zero(f, cand, spec, target_radius, threshold)
        dup = [k for k, q in enumerate(zeros)
               if torus_distance(q.location, z.location) <= MERGE_CELLS / spec.M]
        if dup:
            k = dup[0]
            if z.residual < zeros[k].residual:
                zeros[k] = z
        else:
            zeros.append(z)
    zeros.sort(key=lambda q: q.location)
    nodes = spec.nodes()
    keep = np.ones(len(nodes), dtype=bool)
    for q in zeros:
        d = np.abs(nodes - np.array(q.location)) % 1.0
        keep &= np.max(np.minimum(d, 1.0 - d), axis=1) > exclusion_radius
    A = Z.modulus.ravel()
    lower = float(A[keep].min()) if keep.any() else 0.0
    return ZeroSetReport(tuple(zeros), lower, spec, threshold, exclusion_radius)


@dataclass(frozen=True)
class ZeroInvariance:
    zero: tuple
    holds: bool
    witness_m: int = None
    witness_value: float = None


@dataclass(frozen=True)
class InvarianceVerdict:
    holds: bool
    m_max: int
    per_zero: tuple = field(default_factory=tuple)

    @property
    def witness(self):
        for z in self.per_zero:
            if not z.holds:
                return {"location": list(z.zero), "m": z.witness_m, "value": z.witness_value}
        return None

    def describe(self):
        return f"holds up to m_max={self.m_max}" if self.holds else "fails"


def check_zero_invariance(report, gamma, f, tol=None, m_max=100):
    """Test whether each zero's forward orbit under gamma stays in the zero set.

    A failure at some m <= m_max is a witness that no dependence relation with
    this gamma exists; success is only "holds up to m_max".
    """
    if not report.zeros:
        raise ValueError("zero report is empty")
    gamma = gamma if isinstance(gamma, TorusVector) else TorusVector.of(gamma)
    tol = report.threshold if tol is None else tol
    results = []
    for q in report.zeros:
        pts = orbit(q.location, gamma, m_max + 1)[1:]
        vals = zak_modulus_at(f, pts, report.spec.T)
        bad = np.flatnonzero(vals > tol)
        if bad.size:
            k = int(bad[0])
            results.append(ZeroInvariance(q.location, False, k + 1, float(vals[k])))
        else:
            results.append(ZeroInvariance(q.location, True))
    return InvarianceVerdict(all(r.holds for r in results), m_max, tuple(results))
