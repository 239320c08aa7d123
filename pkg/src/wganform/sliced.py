"""Linear generators for the high-dimensional sliced quadratic WGAN.

For a linear generator ``Theta Z`` the projection of the output onto any
direction is Gaussian, so each one-dimensional inner problem couples the
projected data against ``N(0, omega' Theta Theta' omega)`` analytically.
Replacing uniform sphere directions by isotropic Gaussian ones with
covariance ``I/d`` and the projected data by a matched-variance Gaussian
turns the population objective into a function of the eigenvalues ``S`` of
``Theta Theta'`` alone:

    Tr(S)/d  -  (sigma/Gamma(1/2)) * int_0^inf z^{-1/2}
                 sum_i (2/d) S_i (1 + 2 z S_i / d)^{-3/2}
                 prod_{j != i} (1 + 2 z S_j / d)^{-1/2} dz,

the constant ``sigma^2`` dropped.  The same quantity re-expressed through
the Carlson R function (a Dirichlet average of ``(u . S)^{1/2}``) is
Schur-convex, so equal eigenvalues are optimal; the optimal common value
is  ``s = (d/2) (Gamma((d+1)/2) / Gamma(d/2+1))^2 sigma^2``  and the
attained distance is  ``sigma * sqrt(1 - g(d))``  with ``g`` that same
gamma ratio, which tends to one as d grows.  For d = 2 everything also
has an elliptic-integral closed form, used here as a cross-check oracle.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .distributions import SampleMatrix
from .errors import QuadratureError
from .normal import std_normal_quantile
from .streams import stream

_SQRT_PI = math.sqrt(math.pi)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearGenerator:
    """Matrix generator ``Theta Z`` with cached spectrum of Theta Theta'.

    ``S`` holds the eigenvalues of ``Theta Theta'`` in descending order
    (squared singular values of Theta, zero-padded to the output
    dimension); their sum equals the squared Frobenius norm of Theta.
    """

    theta: np.ndarray
    S: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=float)
        if th.ndim != 2:
            raise ValueError("theta must be a d x r matrix")
        object.__setattr__(self, "theta", th)
        sv = np.linalg.svd(th, compute_uv=False)
        s = np.zeros(th.shape[0])
        k = min(th.shape)
        s[:k] = sv[:k] ** 2
        object.__setattr__(self, "S", np.sort(s)[::-1])

    @property
    def dim(self) -> int:
        return self.theta.shape[0]

    @property
    def rank_budget(self) -> int:
        return self.theta.shape[1]

    def gram(self) -> np.ndarray:
        return self.theta @ self.theta.T


@dataclass(frozen=True)
class SigmaTilde:
    """Per-coordinate RMS scale: value^2 = E[|X|^2] / d."""

    value: float

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("sigma-tilde must be nonnegative")


@dataclass(frozen=True)
class SlicedEvalConfig:
    n_projections: int = 20_000
    q: int = 2
    seed: int = 0
    parallel: bool = False
    threads: int | None = None  # None: pick from cpu count when parallel

    def __post_init__(self):
        if self.n_projections < 1:
            raise ValueError("n_projections must be positive")
        if self.q not in (1, 2):
            raise ValueError("q must be 1 or 2")


class McEstimate(NamedTuple):
    value: float
    stderr: float


# ---------------------------------------------------------------------------
# Scales and gamma-ratio curve
# ---------------------------------------------------------------------------


def sigma_tilde(samples: SampleMatrix) -> SigmaTilde:
    """Sample version of the per-coordinate RMS scale."""
    data = samples.data
    return SigmaTilde(math.sqrt(float(np.mean(np.sum(data * data, axis=1))) / samples.dim))


def gamma_ratio(d: int) -> float:
    """Gamma((d+1)/2) / Gamma(d/2 + 1) via log-gamma differences."""
    if d < 1:
        raise ValueError("d must be a positive integer")
    return math.exp(math.lgamma((d + 1) / 2.0) - math.lgamma(d / 2.0 + 1.0))


def gamma_ratio_sq(d: int) -> float:
    """g(d) = (d/2) (Gamma((d+1)/2)/Gamma(d/2+1))^2, increasing to 1."""
    return (d / 2.0) * gamma_ratio(d) ** 2


def ub_value(d: int, st: SigmaTilde) -> float:
    """Attainable sliced distance of the best linear generator: st*sqrt(1-g(d))."""
    return st.value * math.sqrt(max(1.0 - gamma_ratio_sq(d), 0.0))


# ---------------------------------------------------------------------------
# Optimal linear generators
# ---------------------------------------------------------------------------


def _embed(diag_value: float, d: int, r: int, u: np.ndarray | None) -> LinearGenerator:
    theta = np.zeros((d, r))
    np.fill_diagonal(theta, diag_value)
    if u is not None:
        u = np.asarray(u, dtype=float)
        if u.shape != (d, d) or not np.allclose(u @ u.T, np.eye(d), atol=1e-10):
            raise ValueError("u must be a d x d orthogonal matrix")
        theta = u @ theta
    return LinearGenerator(theta)


def optimal_theta_w2(d: int, r: int, st: SigmaTilde,
                     u: np.ndarray | None = None) -> LinearGenerator:
    """Quadratic-loss optimal linear generator: Theta Theta' = g(d) st^2 I.

    Needs ``r >= d`` (an isotropic Gram matrix requires full row rank).
    ``u`` optionally rotates the default identity embedding; the sliced
    objective is invariant to that choice.
    """
    if r < d:
        raise ValueError("isotropic optimum needs rank budget r >= d")
    s = gamma_ratio_sq(d) * st.value ** 2
    return _embed(math.sqrt(s), d, r, u)


def optimal_theta_w1(d: int, r: int, st: SigmaTilde,
                     u: np.ndarray | None = None) -> LinearGenerator:
    """Absolute-loss optimal linear generator: Theta Theta' = st^2 I."""
    if r < d:
        raise ValueError("isotropic optimum needs rank budget r >= d")
    return _embed(st.value, d, r, u)


def r_pca(samples: SampleMatrix, r: int) -> LinearGenerator:
    """Rank-r PCA generator from the top eigenpairs of the sample covariance.

    ``Theta = U_r diag(sqrt(lambda_1..lambda_r))``, so ``Theta Theta'``
    shares the covariance's largest r eigenvalues and eigenvectors.
    Zero eigenvalues from rank-deficient data pass through as zero columns.
    """
    data = samples.data
    m, d = data.shape
    if not (1 <= r <= d):
        raise ValueError("r must satisfy 1 <= r <= d")
    if m < 2:
        raise ValueError("need at least two samples for a covariance")
    centered = data - data.mean(axis=0)
    cov = (centered.T @ centered) / m
    lam, vec = np.linalg.eigh(cov)
    order = np.argsort(lam)[::-1][:r]
    theta = vec[:, order] * np.sqrt(np.clip(lam[order], 0.0, None))
    return LinearGenerator(theta)


# ---------------------------------------------------------------------------
# Population objectives for Gaussian projections (constant sigma^2 dropped)
# ---------------------------------------------------------------------------


def _check_spectrum(S) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    if S.ndim != 1 or S.size < 1:
        raise ValueError("S must be a 1-D array of eigenvalues")
    if np.any(S < 0):
        raise ValueError("eigenvalues must be nonnegative")
    return S


def _improper_integral(f) -> float:
    """Adaptive integral of ``f`` over (0, inf) with an accuracy check."""
    val, err = integrate.quad(f, 0.0, np.inf, limit=400)
    if not np.isfinite(val) or err > max(1e-10, 1e-8 * abs(val)):
        raise QuadratureError(f"improper integral did not converge (err={err!r})")
    return val


def objective_mc(theta: LinearGenerator, st: SigmaTilde, q: int = 2,
                 n: int = 100_000, seed: int = 0) -> McEstimate:
    """Monte Carlo value of E_omega |st - sqrt(omega' Theta Theta' omega)|^q.

    Directions are isotropic Gaussian with covariance I/d (not normalized
    to the sphere); returns the average and its standard error.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if q not in (1, 2):
        raise ValueError("q must be 1 or 2")
    d = theta.dim
    rng = stream(seed, 0)
    w = rng.standard_normal((n, d)) / math.sqrt(d)
    proj = w @ theta.theta
    u = np.einsum("ij,ij->i", proj, proj)
    vals = np.abs(st.value - np.sqrt(u)) ** q
    return McEstimate(float(vals.mean()),
                      float(vals.std(ddof=1) / math.sqrt(n)) if n > 1 else float("nan"))


def objective_quadrature(S, st: SigmaTilde) -> float:
    """Exact q = 2 objective (minus the constant st^2) for spectrum ``S``.

    The moment-generating-function integral is evaluated under ``z = w^2``,
    which removes the integrable endpoint singularity; each summand is
    assembled in log space so large spectra cannot overflow.
    """
    S = _check_spectrum(S)
    d = S.size
    a = 2.0 * S / d
    if np.all(a == 0.0):
        return 0.0

    def integrand(w: float) -> float:
        z = w * w
        t = 1.0 + a * z
        log_prod = -0.5 * np.sum(np.log(t))
        return 2.0 * float(np.sum(a * np.exp(log_prod - np.log(t))))

    integral = _improper_integral(integrand)
    return float(np.sum(S)) / d - st.value / _SQRT_PI * integral


def carlson_r_half(b, z) -> float:
    """Dirichlet average R_{1/2}(b; z) of the square root, b > 0, z >= 0.

    Computed through the Euler homogeneity relation, which expresses the
    degree-1/2 average via convergent beta-kernel integrals:

        R_{1/2}(b; z) = (1/c) sum_i b_i z_i R_{-1/2}(b + e_i; z),  c = sum b.

    Satisfies R_{1/2}(b; s*1) = sqrt(s) and the homogeneity
    R_{1/2}(b; t z) = sqrt(t) R_{1/2}(b; z).
    """
    b = np.asarray(b, dtype=float)
    z = np.asarray(z, dtype=float)
    if b.shape != z.shape or b.ndim != 1:
        raise ValueError("b and z must be 1-D arrays of equal length")
    if np.any(b <= 0):
        raise ValueError("weights b must be positive")
    if np.any(z < 0):
        raise ValueError("z must be nonnegative")

    c = float(np.sum(b))
    norm = math.exp(math.lgamma(c + 1.0) - math.lgamma(0.5) - math.lgamma(c + 0.5))
    total = 0.0
    for i in range(z.size):
        if z[i] == 0.0:
            continue

        def integrand(w: float, i: int = i) -> float:
            t = w * w
            log_term = -float(np.sum(b * np.log1p(t * z))) - math.log1p(t * z[i])
            return 2.0 * math.exp(log_term)

        total += b[i] * z[i] * _improper_integral(integrand)
    return total * norm / c


def objective_carlson(S, st: SigmaTilde) -> float:
    """The q = 2 objective written through the Carlson R function."""
    S = _check_spectrum(S)
    d = S.size
    r_val = carlson_r_half(np.full(d, 0.5), S)
    return float(np.sum(S)) / d - st.value * math.sqrt(2.0 * d) * gamma_ratio(d) * r_val


# ---------------------------------------------------------------------------
# Complete elliptic integrals (AGM) and the d = 2 closed form
# ---------------------------------------------------------------------------


def _agm_sequences(m: float) -> tuple[float, float]:
    """Returns (AGM(1, sqrt(1-m)), sum 2^{n-1} c_n^2) for 0 <= m < 1."""
    a = 1.0
    b = math.sqrt(1.0 - m)
    c_sq_sum = 0.5 * m  # n = 0 term with c_0 = sqrt(m)
    pow2 = 1.0
    for _ in range(64):
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        c_sq_sum += pow2 * c * c
        pow2 *= 2.0
        if abs(c) <= 1e-17 * a:
            break
    return a, c_sq_sum


def elliptic_K(m: float) -> float:
    """Complete elliptic integral of the first kind, parameter m < 1.

    Negative parameters are mapped into [0, 1) by the imaginary-modulus
    transformation K(m) = K(m/(m-1)) / sqrt(1-m).
    """
    if m >= 1.0:
        raise ValueError("K(m) diverges for m >= 1")
    if m < 0.0:
        return elliptic_K(m / (m - 1.0)) / math.sqrt(1.0 - m)
    agm, _ = _agm_sequences(m)
    return math.pi / (2.0 * agm)


def elliptic_E(m: float) -> float:
    """Complete elliptic integral of the second kind, parameter m <= 1."""
    if m > 1.0:
        raise ValueError("E(m) requires m <= 1")
    if m == 1.0:
        return 1.0
    if m < 0.0:
        return math.sqrt(1.0 - m) * elliptic_E(m / (m - 1.0))
    agm, c_sq_sum = _agm_sequences(m)
    return math.pi / (2.0 * agm) * (1.0 - c_sq_sum)


def closed_form_objective_d2(S, st: SigmaTilde) -> float:
    """d = 2 objective in elliptic-integral closed form (four branches).

    Continuous across the branch boundaries; equals
    :func:`objective_quadrature` on 2-vectors.
    """
    s11, s22 = (float(v) for v in S)
    if s11 < 0 or s22 < 0:
        raise ValueError("eigenvalues must be nonnegative")
    sv = st.value
    if s11 == s22:
        s = s11
        return s - sv * _SQRT_PI * math.sqrt(s)
    if s22 == 0.0:
        return 0.5 * s11 - 2.0 * sv / _SQRT_PI * math.sqrt(s11)
    if s11 == 0.0:
        return 0.5 * s22 - 2.0 * sv / _SQRT_PI * math.sqrt(s22)

    def half_integral(p: float, q: float) -> float:
        # int_0^inf (1/2) z^{-1/2} p (1 + q z) / [(1+p z)(1+q z)]^{3/2} dz
        m = 1.0 - q / p
        return (-math.sqrt(p) * q * elliptic_K(m) + p * math.sqrt(p) * elliptic_E(m)) / (p - q)

    total = half_integral(s11, s22) + half_integral(s22, s11)
    return 0.5 * (s11 + s22) - 2.0 * sv / _SQRT_PI * total


# ---------------------------------------------------------------------------
# Empirical sliced distance
# ---------------------------------------------------------------------------


def projection_direction(seed: int, index: int, d: int) -> np.ndarray:
    """Unit direction for projection ``index``; deterministic in (seed, index)."""
    g = stream(seed, index).standard_normal(d)
    return g / np.linalg.norm(g)


def sliced_values_for_directions(samples: SampleMatrix, theta: LinearGenerator,
                                 directions: np.ndarray, q: int) -> np.ndarray:
    """Per-direction q-powered inner values |W_q(mu_w, nu_w)|^q.

    For each row ``w`` of ``directions``: project the data, sort, and couple
    against the quantiles of N(0, w' Theta Theta' w).  Vectorized over a
    block of directions.
    """
    data = samples.data
    m = data.shape[0]
    targets = std_normal_quantile((np.arange(m) + 0.5) / m)
    proj = data @ directions.T  # m x k
    proj.sort(axis=0)
    gram_half = directions @ theta.theta  # k x r
    sig = np.sqrt(np.maximum(np.einsum("ij,ij->i", gram_half, gram_half), 0.0))
    resid = np.abs(proj - targets[:, None] * sig[None, :])
    if q == 2:
        resid *= resid
    return resid.mean(axis=0)


_CHUNK = 256


def sliced_wq_empirical(samples: SampleMatrix, theta: LinearGenerator,
                        cfg: SlicedEvalConfig) -> McEstimate:
    """Monte Carlo sliced W_q between the data and the generator law.

    Projections use uniform sphere directions keyed by ``(seed, index)``;
    the result is ``mean_i(value_i)^(1/q)`` with a jackknife standard
    error, and is bit-identical for a fixed seed regardless of the thread
    count (per-chunk partials are reduced in index order).
    """
    n = cfg.n_projections
    d = samples.dim
    vals = np.empty(n)

    def run_chunk(start: int) -> None:
        k = min(_CHUNK, n - start)
        dirs = np.empty((k, d))
        for j in range(k):
            dirs[j] = projection_direction(cfg.seed, start + j, d)
        vals[start:start + k] = sliced_values_for_directions(samples, theta, dirs, cfg.q)

    starts = range(0, n, _CHUNK)
    if cfg.parallel:
        workers = cfg.threads or min(8, os.cpu_count() or 1)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_chunk, starts))
    else:
        for start in starts:
            run_chunk(start)

    mean = float(vals.mean())
    value = mean ** (1.0 / cfg.q)
    if n > 1:
        loo = (mean * n - vals) / (n - 1)
        loo_stats = np.maximum(loo, 0.0) ** (1.0 / cfg.q)
        se = math.sqrt((n - 1) / n * float(np.sum((loo_stats - loo_stats.mean()) ** 2)))
    else:
        se = float("nan")
    return McEstimate(value, se)
