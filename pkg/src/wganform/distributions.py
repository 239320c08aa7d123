"""One-dimensional laws, activation pushforwards, and synthetic data.

The continuous distributions here expose a common quartet — ``cdf``,
``quantile``, moments, and seeded sampling — which is everything the
closed-form generator solvers need.  Activation pushforward laws (the
distribution of ``h(Z)`` for standard normal ``Z``) are provided both as
standalone functions and as distribution objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .normal import std_normal_cdf, std_normal_quantile

_LOGIT_EPS = 1e-15


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    t = np.exp(-np.abs(z))  # in (0, 1]; no overflow either way
    out = np.where(z >= 0, 1.0 / (1.0 + t), t / (1.0 + t))
    return float(out) if out.ndim == 0 else out


def logit(p):
    """log(p / (1-p)) with inputs clamped away from {0, 1}."""
    p = np.clip(np.asarray(p, dtype=float), _LOGIT_EPS, 1.0 - _LOGIT_EPS)
    out = np.log(p) - np.log1p(-p)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Continuous 1-D distributions
# ---------------------------------------------------------------------------


class ContinuousDistribution1D:
    """Common interface: vectorized ``cdf``/``quantile``, moments, sampling.

    ``quantile(cdf(x)) == x`` holds (to 1e-9) on the interior of the support
    for the strictly increasing kinds; the rectified Gaussian has an atom at
    zero and only satisfies the round-trip above its median.
    """

    kind: str = "abstract"

    def cdf(self, x):
        raise NotImplementedError

    def quantile(self, p):
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def variance(self) -> float:
        raise NotImplementedError

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"{type(self).__name__}()"


def _check_prob_open(p) -> np.ndarray:
    a = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(a)) or np.any(a <= 0.0) or np.any(a >= 1.0):
        raise ValueError("probability must lie in the open interval (0, 1)")
    return a


@dataclass(frozen=True)
class Gaussian(ContinuousDistribution1D):
    loc: float = 0.0
    scale: float = 1.0
    kind: str = field(default="gaussian", init=False, repr=False)

    def __post_init__(self):
        if not (self.scale > 0):
            raise ValueError("Gaussian scale must be positive")

    def cdf(self, x):
        return std_normal_cdf((np.asarray(x, dtype=float) - self.loc) / self.scale)

    def quantile(self, p):
        _check_prob_open(p)
        return self.loc + self.scale * std_normal_quantile(p)

    def mean(self):
        return self.loc

    def variance(self):
        return self.scale ** 2

    def sample(self, n, rng):
        return rng.normal(self.loc, self.scale, size=n)


@dataclass(frozen=True)
class Laplace(ContinuousDistribution1D):
    loc: float = 0.0
    scale: float = 1.0  # diversity b; variance = 2 b^2
    kind: str = field(default="laplace", init=False, repr=False)

    def __post_init__(self):
        if not (self.scale > 0):
            raise ValueError("Laplace scale must be positive")

    def cdf(self, x):
        z = (np.asarray(x, dtype=float) - self.loc) / self.scale
        out = np.where(z < 0, 0.5 * np.exp(z), 1.0 - 0.5 * np.exp(-z))
        return float(out) if out.ndim == 0 else out

    def quantile(self, p):
        a = _check_prob_open(p)
        out = np.where(a < 0.5,
                       self.loc + self.scale * np.log(2.0 * a),
                       self.loc - self.scale * np.log(2.0 * (1.0 - a)))
        return float(out) if out.ndim == 0 else out

    def mean(self):
        return self.loc

    def variance(self):
        return 2.0 * self.scale ** 2

    def sample(self, n, rng):
        return rng.laplace(self.loc, self.scale, size=n)


def _logit_normal_raw_moments() -> tuple[float, float]:
    # E[s(Z)] = 1/2 by symmetry; E[s(Z)^2] via 64-node Gauss-Hermite.
    t, w = np.polynomial.hermite.hermgauss(64)
    z = np.sqrt(2.0) * t
    weights = w / np.sqrt(np.pi)
    s = sigmoid(z)
    return 0.5, float(np.sum(weights * s * s))


_LOGIT_NORMAL_M1, _LOGIT_NORMAL_M2 = _logit_normal_raw_moments()


@dataclass(frozen=True)
class LogitNormal(ContinuousDistribution1D):
    """Law of sigmoid(Z) for Z ~ N(0, 1), supported on (0, 1)."""

    kind: str = field(default="logit-normal", init=False, repr=False)

    def cdf(self, x):
        a = np.asarray(x, dtype=float)
        inside = std_normal_cdf(logit(np.clip(a, _LOGIT_EPS, 1.0 - _LOGIT_EPS)))
        out = np.where(a <= 0.0, 0.0, np.where(a >= 1.0, 1.0, inside))
        return float(out) if out.ndim == 0 else out

    def quantile(self, p):
        _check_prob_open(p)
        return sigmoid(std_normal_quantile(p))

    def mean(self):
        return _LOGIT_NORMAL_M1

    def variance(self):
        return _LOGIT_NORMAL_M2 - _LOGIT_NORMAL_M1 ** 2

    def sample(self, n, rng):
        return sigmoid(rng.standard_normal(n))


@dataclass(frozen=True)
class RectifiedGaussian(ContinuousDistribution1D):
    """Law of max(Z, 0): an atom of mass 1/2 at zero, Gaussian above it."""

    kind: str = field(default="rectified-gaussian", init=False, repr=False)

    def cdf(self, x):
        a = np.asarray(x, dtype=float)
        out = np.where(a < 0.0, 0.0, std_normal_cdf(np.maximum(a, 0.0)))
        return float(out) if out.ndim == 0 else out

    def quantile(self, p):
        a = _check_prob_open(p)
        out = np.where(a <= 0.5, 0.0, std_normal_quantile(np.where(a > 0.5, a, 0.75)))
        return float(out) if out.ndim == 0 else out

    def mean(self):
        return 1.0 / math.sqrt(2.0 * math.pi)

    def variance(self):
        return (math.pi - 1.0) / (2.0 * math.pi)

    def sample(self, n, rng):
        return np.maximum(rng.standard_normal(n), 0.0)


@dataclass(frozen=True)
class Uniform(ContinuousDistribution1D):
    lo: float = 0.0
    hi: float = 1.0
    kind: str = field(default="uniform", init=False, repr=False)

    def __post_init__(self):
        if not (self.hi > self.lo):
            raise ValueError("Uniform requires hi > lo")

    def cdf(self, x):
        out = np.clip((np.asarray(x, dtype=float) - self.lo) / (self.hi - self.lo), 0.0, 1.0)
        return float(out) if out.ndim == 0 else out

    def quantile(self, p):
        a = _check_prob_open(p)
        out = self.lo + (self.hi - self.lo) * a
        return float(out) if out.ndim == 0 else out

    def mean(self):
        return 0.5 * (self.lo + self.hi)

    def variance(self):
        return (self.hi - self.lo) ** 2 / 12.0

    def sample(self, n, rng):
        return rng.uniform(self.lo, self.hi, size=n)


@dataclass(frozen=True)
class Empirical(ContinuousDistribution1D):
    """Empirical law of a finite sample (stored sorted ascending)."""

    samples: np.ndarray
    kind: str = field(default="empirical", init=False, repr=False)

    def __post_init__(self):
        xs = np.sort(np.asarray(self.samples, dtype=float))
        if xs.size < 1 or np.any(~np.isfinite(xs)):
            raise ValueError("Empirical requires at least one finite sample")
        object.__setattr__(self, "samples", xs)

    def cdf(self, x):
        out = np.searchsorted(self.samples, np.asarray(x, dtype=float), side="right") / self.samples.size
        return float(out) if np.ndim(x) == 0 else out

    def quantile(self, p):
        a = _check_prob_open(p)
        idx = np.minimum(np.ceil(a * self.samples.size).astype(int) - 1, self.samples.size - 1)
        out = self.samples[np.maximum(idx, 0)]
        return float(out) if out.ndim == 0 else out

    def mean(self):
        return float(np.mean(self.samples))

    def variance(self):
        return float(np.var(self.samples))

    def sample(self, n, rng):
        return rng.choice(self.samples, size=n, replace=True)


@dataclass(frozen=True)
class Affine(ContinuousDistribution1D):
    """Law of ``scale * X + shift`` for X drawn from ``base`` (scale != 0)."""

    base: ContinuousDistribution1D
    scale: float = 1.0
    shift: float = 0.0
    kind: str = field(default="affine", init=False, repr=False)

    def __post_init__(self):
        if self.scale == 0.0:
            raise ValueError("Affine scale must be nonzero")

    def cdf(self, x):
        z = (np.asarray(x, dtype=float) - self.shift) / self.scale
        out = self.base.cdf(z) if self.scale > 0 else 1.0 - self.base.cdf(z)
        return float(out) if np.ndim(out) == 0 else out

    def quantile(self, p):
        a = _check_prob_open(p)
        q = self.base.quantile(a) if self.scale > 0 else self.base.quantile(1.0 - a)
        out = self.shift + self.scale * np.asarray(q, dtype=float)
        return float(out) if out.ndim == 0 else out

    def mean(self):
        return self.shift + self.scale * self.base.mean()

    def variance(self):
        return self.scale ** 2 * self.base.variance()

    def sample(self, n, rng):
        return self.shift + self.scale * self.base.sample(n, rng)


# ---------------------------------------------------------------------------
# Activations and their pushforward laws
# ---------------------------------------------------------------------------


class ActivationKind(Enum):
    LINEAR = "linear"
    SIGMOID = "sigmoid"
    RELU = "relu"


def activation_apply(kind: ActivationKind, z):
    """h(z) for the given activation."""
    z = np.asarray(z, dtype=float)
    if kind is ActivationKind.LINEAR:
        out = z
    elif kind is ActivationKind.SIGMOID:
        out = sigmoid(z)
    else:
        out = np.maximum(z, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def activation_law(kind: ActivationKind) -> ContinuousDistribution1D:
    """Distribution of h(Z) for Z ~ N(0, 1)."""
    if kind is ActivationKind.LINEAR:
        return Gaussian(0.0, 1.0)
    if kind is ActivationKind.SIGMOID:
        return LogitNormal()
    return RectifiedGaussian()


def activation_cdf(kind: ActivationKind, v):
    """CDF of h(Z) at ``v``.

    The ReLU law jumps from 0 to 1/2 at v = 0; sigmoid output lives on
    (0, 1) with the CDF saturating to 0/1 at the endpoints.
    """
    return activation_law(kind).cdf(v)


def activation_quantile(kind: ActivationKind, p):
    """Inverse CDF of h(Z); for ReLU every p <= 1/2 maps to 0 (the jump)."""
    return activation_law(kind).quantile(p)


def activation_moments(kind: ActivationKind) -> tuple[float, float]:
    """(E[h(Z)], Var(h(Z)))."""
    law = activation_law(kind)
    return law.mean(), law.variance()


# ---------------------------------------------------------------------------
# Synthetic high-dimensional data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ar1Spec:
    """Order-1 autoregression across the coordinates of each sample.

    ``x[j] = coefficient * x[j-1] + eta[j]`` with i.i.d. noise, either unit
    Gaussian or Student-t rescaled to unit variance.  Stationarity requires
    |coefficient| < 1; the per-coordinate stationary variance is then
    1 / (1 - coefficient^2).
    """

    coefficient: float = 0.5
    noise: str = "student-t"  # "student-t" | "gaussian"
    dof: float = 5.0
    dimension: int | None = None

    def __post_init__(self):
        if not abs(self.coefficient) < 1:
            raise ValueError("AR(1) coefficient must satisfy |coefficient| < 1")
        if self.noise not in ("student-t", "gaussian"):
            raise ValueError("noise must be 'student-t' or 'gaussian'")
        if self.noise == "student-t" and not self.dof > 2:
            raise ValueError("Student-t noise needs dof > 2 for a finite variance")


@dataclass(frozen=True)
class SampleMatrix:
    """M x d data matrix plus provenance (synthetic spec or file path)."""

    data: np.ndarray
    source: str = "unknown"
    seed: int | None = None

    def __post_init__(self):
        a = np.asarray(self.data, dtype=float)
        if a.ndim != 2:
            raise ValueError("SampleMatrix data must be 2-D (samples x dimensions)")
        object.__setattr__(self, "data", a)

    @property
    def n_samples(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    def to_csv(self, path, header: bool = True) -> None:
        """One sample per row, 17-significant-digit decimal round-trip."""
        head = ",".join(f"x{j}" for j in range(self.dim)) if header else ""
        np.savetxt(path, self.data, delimiter=",", fmt="%.17g", header=head, comments="")

    @staticmethod
    def from_csv(path) -> "SampleMatrix":
        path = Path(path)
        with open(path) as fh:
            first = fh.readline()
        skip = 0
        try:
            [float(tok) for tok in first.strip().split(",") if tok]
        except ValueError:
            skip = 1
        data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)
        return SampleMatrix(data=data, source=str(path), seed=None)


_AR_BURN_IN = 50


def _ar1_noise(spec: Ar1Spec, shape, rng: np.random.Generator) -> np.ndarray:
    if spec.noise == "gaussian":
        return rng.standard_normal(shape)
    scale = math.sqrt((spec.dof - 2.0) / spec.dof)  # unit-variance rescaling
    return rng.standard_t(spec.dof, size=shape) * scale


def sample_matrix(spec, d: int, n_samples: int, seed: int) -> SampleMatrix:
    """Draw an ``n_samples x d`` matrix, deterministically from ``seed``.

    ``spec`` is either a :class:`ContinuousDistribution1D` (i.i.d. entries)
    or an :class:`Ar1Spec` (each row is an AR(1) path over the d
    coordinates, recorded after a burn-in from a stationary-scale start).
    """
    if d < 1 or n_samples < 1:
        raise ValueError("d and n_samples must be positive")
    from .streams import stream

    rng = stream(seed, 0)
    if isinstance(spec, Ar1Spec):
        if spec.dimension is not None and spec.dimension != d:
            raise ValueError(f"Ar1Spec.dimension={spec.dimension} conflicts with d={d}")
        phi = spec.coefficient
        x = _ar1_noise(spec, n_samples, rng) / math.sqrt(1.0 - phi * phi)
        eta = _ar1_noise(spec, (n_samples, _AR_BURN_IN + d), rng)
        out = np.empty((n_samples, d))
        for j in range(_AR_BURN_IN + d):
            x = phi * x + eta[:, j]
            if j >= _AR_BURN_IN:
                out[:, j - _AR_BURN_IN] = x
        src = (f"ar1(coefficient={phi}, noise={spec.noise}"
               + (f", dof={spec.dof}" if spec.noise == "student-t" else "") + ")")
        return SampleMatrix(data=out, source=src, seed=seed)

    if isinstance(spec, ContinuousDistribution1D):
        data = spec.sample(n_samples * d, rng).reshape(n_samples, d)
        return SampleMatrix(data=data, source=repr(spec), seed=seed)

    raise TypeError("spec must be a ContinuousDistribution1D or an Ar1Spec")


def sample_sphere_direction(d: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform unit vector on the (d-1)-sphere via a normalized Gaussian."""
    if d < 1:
        raise ValueError("d must be positive")
    while True:
        g = rng.standard_normal(d)
        norm = np.linalg.norm(g)
        if norm > 0.0:  # zero draw has probability zero; loop is a formality
            return g / norm
