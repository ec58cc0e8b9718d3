"""Linear-independence evidence for the (N, 1) time-frequency configuration:
N integer lattice shifts plus one distinguished shift (x, y)."""
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from ._numeric import pairwise_sum, parallel_map
from .functions import TFPoint, TFShift, sample
from .linalg import min_eigenvalue
from .torus import OrbitClass, TorusVector, classify_generator
from .zak import TrigPoly, ZakGridSpec, functional_equation_residual, relation_residual_l2
from .zeros import DEFAULT_EXCLUSION, certify_finite_zero_set, check_zero_invariance

VERDICTS = ("independent_numerical", "independent_prop1", "independent_prop3", "inconclusive")
TIKHONOV = 1e-14
SMALL_COEFFICIENT = 1e-10


@dataclass(frozen=True)
class TFSystem:
    """Lattice entries are integer 2n-vectors (l, m): l modulates, m translates,
    i.e. the shift pi(x=m, y=l).  ``point`` is the distinguished (x, y)."""

    lattice: tuple
    point: TFPoint

    def __post_init__(self):
        n = self.point.n
        lat = tuple(tuple(int(v) for v in p) for p in self.lattice)
        for p, raw in zip(lat, self.lattice):
            if len(p) != 2 * n or any(float(a) != float(b) for a, b in zip(p, raw)):
                raise ValueError(f"lattice point {raw} is not an integer {2 * n}-vector")
        if len(set(lat)) != len(lat):
            raise ValueError("lattice points must be pairwise distinct")
        for p in self.lattice_points_of(lat, n):
            if np.array_equal(p.xa, self.point.xa) and np.array_equal(p.ya, self.point.ya):
                raise ValueError("distinguished point coincides with a lattice point")
        object.__setattr__(self, "lattice", lat)

    @staticmethod
    def lattice_points_of(lat, n):
        return [TFPoint(tuple(float(v) for v in p[n:]), tuple(float(v) for v in p[:n])) for p in lat]

    @property
    def n(self):
        return self.point.n

    @property
    def N(self):
        return len(self.lattice)

    def points(self):
        return self.lattice_points_of(self.lattice, self.n) + [self.point]

    @property
    def gamma(self):
        return TorusVector.of([-v for v in self.point.x] + list(self.point.y))

    def without(self, j):
        return TFSystem(self.lattice[:j] + self.lattice[j + 1:], self.point)

    def to_dict(self):
        return {
            "n": self.n,
            "lattice": [list(p) for p in self.lattice],
            "distinguished": [_num(v) for v in self.point.x + self.point.y],
            "gamma": self.gamma.to_list(),
        }


def _num(v):
    return float(v) if isinstance(v, float) else str(v)


def _window(f, system, T):
    T = f.default_window() if T is None else T
    shift = max(int(math.ceil(np.max(np.abs(p.xa)))) for p in system.points())
    return T + shift


def _samples(f, system, T, M):
    Tw = _window(f, system, T)
    rows = [sample(TFShift(f, p), Tw, M).values.ravel() for p in system.points()]
    return np.stack(rows), float(M) ** system.n


def gram_matrix(f, system, T=None, M=64, samples=None):
    """Hermitian matrix of discrete inner products <pi(p_j) f, pi(p_k) f>.

    Rows/columns follow the lattice order with the distinguished point last.
    """
    S, scale = _samples(f, system, T, M) if samples is None else samples
    k = S.shape[0]
    pairs = [(j, l) for j in range(k) for l in range(j, k)]
    vals = parallel_map(lambda jl: pairwise_sum(S[jl[0]] * np.conj(S[jl[1]])) / scale, pairs)
    G = np.zeros((k, k), dtype=np.complex128)
    for (j, l), v in zip(pairs, vals):
        G[j, l] = v
        G[l, j] = np.conj(v)
    G[np.diag_indices(k)] = G.diagonal().real
    return G


@dataclass(frozen=True)
class DependenceFit:
    coefficients: np.ndarray
    residual: float

    @property
    def small_coefficients(self):
        return [int(j) for j in np.flatnonzero(np.abs(self.coefficients) < SMALL_COEFFICIENT)]


def best_dependence(f, system, T=None, M=64, samples=None):
    """Least-squares fit of pi(x, y) f by the lattice shifts.

    Normal equations with a 1e-14 Tikhonov floor; the residual is measured
    directly on the samples, relative to ||f||.
    """
    if system.N == 0:
        raise ValueError("best_dependence needs at least one lattice point")
    S, scale = _samples(f, system, T, M) if samples is None else samples
    A, b = S[:-1], S[-1]
    N = system.N
    normal = np.empty((N, N), dtype=np.complex128)
    rhs = np.empty(N, dtype=np.complex128)
    for j in range(N):
        rhs[j] = pairwise_sum(np.conj(A[j]) * b) / scale
        for k in range(N):
            normal[j, k] = pairwise_sum(np.conj(A[j]) * A[k]) / scale
    c = np.linalg.solve(normal + TIKHONOV * np.eye(N), rhs)
    r = c @ A - b
    energy = pairwise_sum(np.abs(r) ** 2) / scale
    return DependenceFit(c, float(np.sqrt(energy)) / f.norm())


@dataclass(frozen=True)
class CertifyConfig:
    gram_M: int = None
    T: int = None
    zak_M: int = None
    Q: int = 10 ** 4
    H: int = None
    budget: int = 10 ** 8
    min_eig_rel: float = 1e-4
    residual_threshold: float = 1e-3
    m_max: int = 100
    exclusion_radius: float = DEFAULT_EXCLUSION
    zero_threshold: float = None

    def resolved(self, f):
        n = f.n
        return CertifyConfig(
            gram_M=self.gram_M or (64 if n == 1 else 16),
            T=self.T or f.default_window(),
            zak_M=self.zak_M or (128 if n == 1 else 16),
            Q=self.Q,
            H=self.H or (1000 if n == 1 else 30),
            budget=self.budget,
            min_eig_rel=self.min_eig_rel,
            residual_threshold=self.residual_threshold,
            m_max=self.m_max,
            exclusion_radius=self.exclusion_radius,
            zero_threshold=self.zero_threshold,
        )

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: v for k, v in d.items() if k in cls.__dataclass_fields__})


@dataclass
class IndependenceCertificate:
    function: dict
    system: dict
    gram_min_eig: float
    ls_residual: float
    ls_coefficients: list
    small_coefficients: list
    zak_ls_residual: float
    feq_residual: float
    orbit: OrbitClass
    zeros: dict
    witness: dict
    verdict: str
    annotations: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def to_dict(self):
        d = {
            "function": self.function,
            "system": self.system,
            "gram_min_eig": self.gram_min_eig,
            "ls_residual": self.ls_residual,
            "ls_coefficients": self.ls_coefficients,
            "small_coefficients": self.small_coefficients,
            "zak_ls_residual": self.zak_ls_residual,
            "feq_residual": self.feq_residual,
            "orbit": self.orbit.to_dict(),
            "zeros": self.zeros,
            "verdict": self.verdict,
            "annotations": self.annotations,
            "config": self.config,
            "versions": {"zakhrt": __version__, "numpy": np.__version__},
        }
        if self.witness is not None:
            d["witness"] = self.witness
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def certify(f, system, config=None):
    """Gram/least-squares evidence plus orbit and zero-set arguments.

    Verdict precedence: dense orbit with continuous Zak -> independent_prop1;
    infinite orbit with a finite zero set -> independent_prop3; Gram and
    residual above thresholds -> independent_numerical; else inconclusive.
    Dependence is never claimed.
    """
    if f.n != system.n:
        raise ValueError("function and system dimensions differ")
    cfg = (config or CertifyConfig()).resolved(f)
    notes = []

    samples = _samples(f, system, cfg.T, cfg.gram_M)
    G = gram_matrix(f, system, samples=samples)
    lam = min_eigenvalue(G)

    ls_res, coeffs, small, zak_res, feq = None, [], [], None, None
    zspec = ZakGridSpec(system.n, cfg.zak_M, cfg.T)
    if system.N:
        fit = best_dependence(f, system, samples=samples)
        ls_res = fit.residual
        coeffs = [[float(c.real), float(c.imag)] for c in fit.coefficients]
        small = fit.small_coefficients
        if small:
            notes.append("some fitted coefficients are below 1e-10: a smaller-N relation fits as well")
        terms = tuple((c, p[:system.n], p[system.n:])
                      for c, p in zip(fit.coefficients, system.lattice) if c != 0)
        if terms:
            P = TrigPoly(terms)
            feq = functional_equation_residual(f, P, system.point, zspec)
            gspec = ZakGridSpec(system.n, cfg.gram_M, cfg.T)
            zak_res = relation_residual_l2(f, P, system.point, gspec) / f.norm()

    gamma = system.gamma
    orbit = classify_generator(gamma, Q=cfg.Q, H=cfg.H, budget=cfg.budget)
    if orbit.kind == "finite":
        notes.append("rational time-frequency shift: independence is known in this case; "
                     "evidence reported numerically only")

    zeros, witness = None, None
    continuous = f.zak_continuous
    if continuous:
        report = certify_finite_zero_set(f, zspec, threshold=cfg.zero_threshold,
                                         exclusion_radius=cfg.exclusion_radius)
        zeros = report.to_dict()
        if report.zeros:
            inv = check_zero_invariance(report, gamma, f, m_max=cfg.m_max)
            witness = inv.witness
            zeros["invariance"] = inv.describe()
    else:
        notes.append("Zak transform not continuous: orbit-based branches disabled")

    norm2 = f.norm() ** 2
    if continuous and orbit.kind == "dense_up_to_bound":
        verdict = "independent_prop1"
    elif continuous and orbit.infinite and zeros is not None and zeros["finite"]:
        verdict = "independent_prop3"
    elif lam > cfg.min_eig_rel * norm2 and ls_res is not None and ls_res > cfg.residual_threshold:
        verdict = "independent_numerical"
    else:
        verdict = "inconclusive"

    return IndependenceCertificate(
        function=f.to_dict(),
        system=system.to_dict(),
        gram_min_eig=lam,
        ls_residual=ls_res,
        ls_coefficients=coeffs,
        small_coefficients=small,
        zak_ls_residual=zak_res,
        feq_residual=feq,
        orbit=orbit,
        zeros=zeros,
        witness=witness,
        verdict=verdict,
        annotations=notes,
        config=cfg.to_dict(),
    )
