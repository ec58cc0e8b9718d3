"""Test functions with closed-form values, norms and tail bounds.

All built-in functions are products of a one-dimensional profile over the
coordinates of R^n.  Time-frequency shifts use the negative modulation sign:

    pi(x, y) f (t) = exp(-2 pi i <y, t>) f(t - x)
"""
import math
from dataclasses import dataclass, field
from numbers import Real

import numpy as np

from ._numeric import character, is_power_of_two

KINDS = ("gaussian", "two_sided_exponential", "box_indicator")
_ALIASES = {"box": "box_indicator", "exp": "two_sided_exponential", "exponential": "two_sided_exponential"}


def canonical_kind(kind):
    kind = _ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise ValueError(f"unknown function kind {kind!r}; expected one of {', '.join(KINDS)}")
    return kind


def _gaussian_tail(k0):
    # upper bound for sum_{k >= k0} exp(-pi k^2)
    return math.exp(-math.pi * k0 * k0) / (1.0 - math.exp(-math.pi * (2 * k0 + 1)))


@dataclass(frozen=True)
class AnalyticFunction:
    kind: str
    n: int = 1
    a: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", canonical_kind(self.kind))
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError("dimension n must be a positive integer")
        if self.kind == "two_sided_exponential" and not (self.a > 0 and math.isfinite(self.a)):
            raise ValueError("decay rate a must be positive and finite")
        object.__setattr__(self, "a", float(self.a))

    # handle protocol shared with TFShift / Combination
    @property
    def base(self):
        return self

    def translations(self):
        return np.zeros((1, self.n))

    @property
    def zak_continuous(self):
        return self.kind != "box_indicator"

    def profile(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "gaussian":
            return 2.0 ** 0.25 * np.exp(-np.pi * t * t)
        if self.kind == "two_sided_exponential":
            return np.exp(-self.a * np.abs(t))
        return ((t >= 0.0) & (t < 1.0)).astype(np.float64)

    def __call__(self, t):
        """Evaluate on an array of shape (..., n); returns complex values."""
        t = np.asarray(t, dtype=np.float64)
        if t.shape[-1] != self.n:
            raise ValueError(f"expected trailing dimension {self.n}, got {t.shape}")
        return np.prod(self.profile(t), axis=-1).astype(np.complex128)

    def norm(self):
        if self.kind == "two_sided_exponential":
            return (1.0 / self.a) ** (self.n / 2.0)
        return 1.0

    def _sup_profile(self, tau):
        """sup over t in [0,1) of |profile(t + tau)| for integer tau."""
        tau = np.asarray(tau, dtype=np.float64)
        dist = np.where(tau >= 0, tau, -tau - 1.0)
        if self.kind == "gaussian":
            return 2.0 ** 0.25 * np.exp(-np.pi * dist * dist)
        if self.kind == "two_sided_exponential":
            return np.exp(-self.a * dist)
        return (tau == 0).astype(np.float64)

    def _tail_1d(self, T):
        """Upper bound for sum_{|tau| >= T} of the 1-D sup profile."""
        left0 = max(T, 1)
        if self.kind == "gaussian":
            c = 2.0 ** 0.25
            # left side: sup at distance k - 1 for tau = -k
            return c * _gaussian_tail(T) + c * _gaussian_tail(left0 - 1)
        if self.kind == "two_sided_exponential":
            q = -math.expm1(-self.a)
            return math.exp(-self.a * T) / q + math.exp(-self.a * (left0 - 1)) / q
        return 1.0 if T == 0 else 0.0

    def tail_bound(self, T):
        """B(T) >= sum over |tau|_inf >= T of sup_{t in [0,1)^n} |f(t + tau)|."""
        if T < 0:
            raise ValueError("window must be non-negative")
        T = int(T)
        tail = self._tail_1d(T)
        inner = float(np.sum(self._sup_profile(np.arange(-T + 1, T)))) if T > 0 else 0.0
        total = inner + tail
        # total^n - inner^n, factored to avoid cancellation
        acc = sum(total ** k * inner ** (self.n - 1 - k) for k in range(self.n))
        return tail * acc

    def default_window(self):
        """Truncation window with B(T) <= 1e-10 (at least 10 for the Gaussian)."""
        if self.kind == "box_indicator":
            return 2
        T = 10 if self.kind == "gaussian" else 1
        while self.tail_bound(T) > 1e-10:
            T += 1
        return T

    def to_dict(self):
        d = {"kind": self.kind, "n": int(self.n)}
        if self.kind == "two_sided_exponential":
            d["a"] = self.a
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(kind=d["kind"], n=int(d.get("n", 1)), a=float(d.get("a", 1.0)))


@dataclass(frozen=True)
class TFPoint:
    """Time-frequency point: x translates, y modulates.

    Entries may be ``fractions.Fraction`` to mark them as exact rationals.
    """

    x: tuple
    y: tuple

    def __post_init__(self):
        x = tuple(np.atleast_1d(self.x).tolist()) if not isinstance(self.x, tuple) else self.x
        y = tuple(np.atleast_1d(self.y).tolist()) if not isinstance(self.y, tuple) else self.y
        if len(x) != len(y) or not x:
            raise ValueError("x and y must be non-empty and of equal length")
        for v in x + y:
            if not isinstance(v, Real) or not math.isfinite(float(v)):
                raise ValueError("time-frequency point entries must be finite reals")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self):
        return len(self.x)

    @property
    def xa(self):
        return np.array([float(v) for v in self.x])

    @property
    def ya(self):
        return np.array([float(v) for v in self.y])

    @classmethod
    def origin(cls, n=1):
        return cls((0.0,) * n, (0.0,) * n)


@dataclass(frozen=True)
class TFShift:
    """Handle for pi(x, y) f."""

    f: AnalyticFunction
    point: TFPoint

    def __post_init__(self):
        if self.point.n != self.f.n:
            raise ValueError("shift dimension does not match function dimension")

    @property
    def n(self):
        return self.f.n

    @property
    def base(self):
        return self.f

    def translations(self):
        return self.point.xa[None, :]

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        phase = character(t @ self.point.ya)
        return phase * self.f(t - self.point.xa)


@dataclass(frozen=True)
class Combination:
    """Handle for sum_j c_j pi(p_j) f."""

    f: AnalyticFunction
    terms: tuple = field(default_factory=tuple)  # ((coef, TFPoint), ...)

    @property
    def n(self):
        return self.f.n

    @property
    def base(self):
        return self.f

    def translations(self):
        return np.array([p.xa for _, p in self.terms])

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        out = np.zeros(t.shape[:-1], dtype=np.complex128)
        for coef, p in self.terms:
            out = out + complex(coef) * TFShift(self.f, p)(t)
        return out


def evaluate(f, t):
    """Value of a function or shifted handle at a single point t."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    return complex(f(t[None, :])[0])


def norm_l2(f):
    return f.norm()


def apply_tf_shift(f, p):
    return TFShift(f, p)


def window_offsets(h):
    """Integer range (lo, hi) of tau-offsets that keeps a handle's mass centred."""
    tr = h.translations()
    return np.floor(tr.min(axis=0)).astype(int), np.ceil(tr.max(axis=0)).astype(int)


@dataclass(frozen=True)
class SampledGrid:
    n: int
    M: int
    T: int
    values: np.ndarray
    tail_bound: float

    @property
    def axis(self):
        return -self.T + np.arange(self.M * (2 * self.T + 1)) / self.M


def sample(h, T, M):
    """Sample on nodes i/M covering [-T, T+1)^n."""
    if not is_power_of_two(M):
        raise ValueError("resolution must be a power of two")
    if not isinstance(T, (int, np.integer)) or T <= 0:
        raise ValueError("window T must be a positive integer")
    n = h.n
    axis = -T + np.arange(M * (2 * T + 1)) / M
    mesh = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1)
    values = h(mesh)
    if not np.all(np.isfinite(values)):
        raise ValueError("non-finite sample values")
    shift = int(np.ceil(np.abs(h.translations()).max()))
    bound = h.base.tail_bound(max(T - shift, 0))
    return SampledGrid(n=n, M=M, T=T, values=values, tail_bound=bound)
