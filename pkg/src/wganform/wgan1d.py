"""Closed-form optimal generators for the 1-D quadratic-loss population WGAN.

A generator ``G(Z) = theta1 + theta2 * h(Z)`` with standard normal input is
fitted to a continuous data law ``mu`` in closed form.  With ``Psi`` the CDF
of ``h(Z)`` and ``F`` the data CDF, the optimal coefficients are covariance
ratios of ``X`` against ``Psi^{-1}(F(X))`` (or its ``1 - F`` mirror for the
negative-slope branch); the ReLU activation gets its own branch pair built
from half-line covariances against the normal score.  First-order necessary
conditions for the absolute-loss problem are exposed as sign residuals.

All population expectations are evaluated as integrals over the unit
interval after the substitution ``u = F(x)``, so heavy-tailed data never
requires truncating the real line.  The graded panel layout refines
geometrically toward u in {0, 1} where quantiles diverge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .distributions import (
    ActivationKind,
    ContinuousDistribution1D,
    activation_moments,
    activation_quantile,
)
from .errors import NumericsError, QuadratureError
from .kde import KdeModel, clamp_probability, fit as kde_fit
from .normal import std_normal_quantile

_SQRT2PI = math.sqrt(2.0 * math.pi)

# ---------------------------------------------------------------------------
# Quadrature over the unit interval
# ---------------------------------------------------------------------------

_EDGE_DEPTH = 48  # panels shrink to 2^-48 ~ 3.6e-15 at each endpoint


@lru_cache(maxsize=None)
def _gl_nodes(order: int):
    return np.polynomial.legendre.leggauss(order)


@lru_cache(maxsize=1)
def _base_edges() -> np.ndarray:
    left = 2.0 ** -np.arange(1, _EDGE_DEPTH + 1)
    mid = np.linspace(0.25, 0.75, 9)
    return np.unique(np.concatenate([left, mid, 1.0 - left]))


def _panelize(breaks: tuple[float, ...]) -> np.ndarray:
    edges = _base_edges()
    if breaks:
        extra = np.asarray(breaks, dtype=float)
        if np.any(extra <= 0.0) or np.any(extra >= 1.0):
            raise ValueError("breakpoints must lie strictly inside (0, 1)")
        edges = np.unique(np.concatenate([edges, extra]))
    return edges


def _fixed_order_integral(g, edges: np.ndarray, order: int) -> float:
    xi, wi = _gl_nodes(order)
    a = edges[:-1]
    half = 0.5 * (edges[1:] - a)
    nodes = (a + half)[:, None] + half[:, None] * xi[None, :]
    weights = half[:, None] * wi[None, :]
    vals = np.asarray(g(nodes.ravel()), dtype=float)
    if vals.shape != (nodes.size,):
        raise ValueError("integrand must return one value per input point")
    return float(np.sum(vals * weights.ravel()))


def integrate_unit(g, breaks: tuple[float, ...] = (), rel_tol: float = 1e-10,
                   abs_tol: float = 1e-13) -> float:
    """Integrate a vectorized ``g`` over (0, 1) on graded Gauss-Legendre panels.

    The estimate at each panel order is compared with the doubled order;
    refinement stagnation raises :class:`QuadratureError`.
    """
    edges = _panelize(tuple(breaks))
    prev = _fixed_order_integral(g, edges, 12)
    for order in (24, 48, 96, 192):
        cur = _fixed_order_integral(g, edges, order)
        if abs(cur - prev) <= max(abs_tol, rel_tol * abs(cur)):
            return cur
        prev = cur
    raise QuadratureError("unit-interval integral did not converge under refinement")


def expect(mu, f, u_breaks: tuple[float, ...] = ()) -> float:
    """E_mu[f(X)] as the integral of ``f(quantile(u))`` du over (0, 1).

    ``f`` must be vectorized and piecewise continuous; known interior
    discontinuity locations can be passed in quantile space via
    ``u_breaks`` so no panel straddles them.
    """
    return integrate_unit(lambda u: np.asarray(f(mu.quantile(u)), dtype=float),
                          breaks=u_breaks)


def _mu_mean_var(mu) -> tuple[float, float]:
    m = integrate_unit(lambda u: mu.quantile(u))
    m2 = integrate_unit(lambda u: np.square(mu.quantile(u)))
    return m, max(m2 - m * m, 0.0)


# ---------------------------------------------------------------------------
# Result types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Generator1D:
    """Parameters of the scalar generator ``theta1 + theta2 * h(Z)``."""

    theta1: float
    theta2: float
    activation: ActivationKind


class Branch(Enum):
    NON_NEGATIVE_THETA2 = "theta2 >= 0"
    NON_POSITIVE_THETA2 = "theta2 <= 0"


@dataclass(frozen=True)
class SolveReport:
    """Solver output: parameters, active branch, and diagnostics.

    ``objective_value`` is the squared quadratic-Wasserstein distance at the
    optimum; ``condition_value`` is the covariance statistic whose sign
    selects the branch (ties go to the non-negative branch).
    """

    params: Generator1D
    branch: Branch
    objective_value: float
    condition_value: float


def generator_quantile(params: Generator1D, u):
    """Quantile function of the generator output law at probability ``u``.

    For ``theta2 >= 0`` this is ``theta1 + theta2 * Psi^{-1}(u)``; a negative
    slope mirrors the argument to ``1 - u``.  The ReLU jump (quantile pinned
    to 0 for probabilities at or below 1/2) is inherited from the activation
    quantile, which reproduces the piecewise transport expressions.
    """
    u = np.asarray(u, dtype=float)
    arg = u if params.theta2 >= 0 else 1.0 - u
    out = params.theta1 + params.theta2 * np.asarray(
        activation_quantile(params.activation, arg), dtype=float)
    return float(out) if out.ndim == 0 else out


def objective_w2(mu, params: Generator1D) -> float:
    """Squared 2-Wasserstein distance between ``mu`` and the generator law.

    Uses the quantile representation of the optimal coupling; the ReLU
    activation inserts a panel break at u = 1/2 so quadrature never
    straddles the quantile kink.
    """
    breaks = (0.5,) if params.activation is ActivationKind.RELU else ()

    def g(u):
        diff = np.asarray(mu.quantile(u), dtype=float) - generator_quantile(params, u)
        return diff * diff

    return integrate_unit(g, breaks=breaks)


# ---------------------------------------------------------------------------
# Closed-form solvers
# ---------------------------------------------------------------------------


def solve_w2_general(mu, activation: ActivationKind) -> SolveReport:
    """Optimal generator for a strictly increasing activation pushforward.

    Supports the linear and sigmoid activations (their pushforward CDFs are
    continuous and strictly increasing); use :func:`solve_w2_relu` for the
    jump CDF of the rectifier.
    """
    if activation is ActivationKind.RELU:
        raise ValueError("the ReLU pushforward has a jump CDF; use solve_w2_relu")
    mh, vh = activation_moments(activation)
    if not vh > 0:
        raise ValueError("activation output variance must be positive")

    mean_x, var_x = _mu_mean_var(mu)
    if not var_x > 0:
        raise ValueError("data distribution is degenerate (zero variance)")

    def score(u):
        return np.asarray(activation_quantile(activation, u), dtype=float)

    cov_pos = integrate_unit(lambda u: mu.quantile(u) * score(u)) - mean_x * mh
    cov_neg = integrate_unit(lambda u: mu.quantile(u) * score(1.0 - u)) - mean_x * mh
    condition = cov_pos + cov_neg

    if condition >= 0.0:
        cov = max(cov_pos, 0.0)  # provably nonnegative; guards roundoff
        branch = Branch.NON_NEGATIVE_THETA2
    else:
        cov = min(cov_neg, 0.0)
        branch = Branch.NON_POSITIVE_THETA2
    theta2 = cov / vh
    theta1 = mean_x - theta2 * mh
    objective = max(var_x - cov * cov / vh, 0.0)
    return SolveReport(Generator1D(theta1, theta2, activation), branch, objective, condition)


def solve_w2_relu(mu) -> SolveReport:
    """Optimal ReLU generator via the half-line normal-score covariances.

    The branch test compares Cov(X, Q(F(X)) 1{F(X) > 1/2}) against
    Cov(X, Q(F(X)) 1{F(X) <= 1/2}) with Q the standard normal quantile;
    quadrature splits at u = 1/2 where the indicator switches.
    """
    mean_x, var_x = _mu_mean_var(mu)
    if not var_x > 0:
        raise ValueError("data distribution is degenerate (zero variance)")

    def upper(u):
        w = np.where(u > 0.5, std_normal_quantile(np.maximum(u, 0.25)), 0.0)
        return np.asarray(mu.quantile(u), dtype=float) * w

    def lower(u):
        w = np.where(u <= 0.5, std_normal_quantile(np.minimum(u, 0.75)), 0.0)
        return np.asarray(mu.quantile(u), dtype=float) * w

    # E[Q(U) 1{U>1/2}] = 1/sqrt(2 pi) and its mirror carries the minus sign.
    cov_pos = integrate_unit(upper, breaks=(0.5,)) - mean_x / _SQRT2PI
    cov_neg = integrate_unit(lower, breaks=(0.5,)) + mean_x / _SQRT2PI
    cov_pos = max(cov_pos, 0.0)
    cov_neg = max(cov_neg, 0.0)
    condition = cov_pos - cov_neg

    gain = 2.0 * math.pi / (math.pi - 1.0)
    if condition >= 0.0:
        theta2 = gain * cov_pos
        branch = Branch.NON_NEGATIVE_THETA2
        objective = max(var_x - gain * cov_pos * cov_pos, 0.0)
    else:
        theta2 = -gain * cov_neg
        branch = Branch.NON_POSITIVE_THETA2
        objective = max(var_x - gain * cov_neg * cov_neg, 0.0)
    theta1 = mean_x - theta2 / _SQRT2PI
    return SolveReport(Generator1D(theta1, theta2, ActivationKind.RELU),
                       branch, objective, condition)


def solve_w2_linear(mu) -> SolveReport:
    """Optimal linear generator: ``theta1 = E[X]``, ``theta2 = E[X Q(F(X))]``.

    The slope is evaluated through two equivalent routes — the data-side
    integral of ``quantile(u) * Q(u)`` over the unit interval and the
    Gaussian-side average ``E[F^{-1}(Phi(Z)) Z]`` integrated in z — which
    must agree to 1e-6; disagreement signals a quadrature failure on this
    distribution.
    """
    mean_x, var_x = _mu_mean_var(mu)
    if not var_x > 0:
        raise ValueError("data distribution is degenerate (zero variance)")

    theta2 = integrate_unit(lambda u: mu.quantile(u) * std_normal_quantile(u))
    theta2_gauss = _gaussian_side_slope(mu)
    if abs(theta2 - theta2_gauss) > 1e-6 * max(1.0, abs(theta2)):
        raise NumericsError(
            f"dual slope formulas disagree: {theta2!r} vs {theta2_gauss!r}")

    objective = max(var_x - theta2 * theta2, 0.0)
    return SolveReport(Generator1D(mean_x, theta2, ActivationKind.LINEAR),
                       Branch.NON_NEGATIVE_THETA2, objective, 0.0)


_Z_CUTOFF = 8.5  # |z| beyond this contributes < 1e-13 to the slope integrals


def _gaussian_side_slope(mu) -> float:
    """E[Z F^{-1}(Phi(Z))] by panelled Gauss-Legendre on the z axis."""
    from .normal import std_normal_cdf, std_normal_pdf

    edges = np.linspace(-_Z_CUTOFF, _Z_CUTOFF, 69)

    def g(z):
        u = np.clip(std_normal_cdf(z), 1e-300, 1.0 - 1e-16)
        return z * np.asarray(mu.quantile(u), dtype=float) * std_normal_pdf(z)

    prev = _fixed_order_integral(g, edges, 12)
    for order in (24, 48, 96):
        cur = _fixed_order_integral(g, edges, order)
        if abs(cur - prev) <= max(1e-13, 1e-10 * abs(cur)):
            return cur
        prev = cur
    raise QuadratureError("Gaussian-side slope integral did not converge")


def empirical_theta2_linear(samples, kde_model: KdeModel | None = None) -> float:
    """Plug-in slope estimate ``mean(x_i * Q(F_hat(x_i)))`` from a sample.

    ``F_hat`` is the Epanechnikov-KDE CDF (fitted here when not supplied),
    clamped into [1/(M+1), M/(M+1)] before the normal quantile map.
    """
    xs = np.asarray(samples, dtype=float)
    if kde_model is None:
        kde_model = kde_fit(xs)
    f_hat = clamp_probability(kde_model.cdf_hat(xs), xs.size)
    return float(np.mean(xs * std_normal_quantile(f_hat)))


# ---------------------------------------------------------------------------
# Absolute-loss stationarity residuals
# ---------------------------------------------------------------------------


def w1_residuals(mu, params: Generator1D) -> tuple[float, float]:
    """Sign-expectation residuals of the absolute-loss first-order conditions.

    Returns ``(E[sign(D)], E[sign(D) * Psi^{-1}(F(X))])`` with
    ``D = theta1 + theta2 Psi^{-1}(F(X)) - X``; both vanish at a stationary
    point.  Requires ``theta2 > 0``.  ``mu`` may be any distribution-like
    object with a vectorized quantile (a fitted KDE qualifies).
    """
    if not params.theta2 > 0:
        raise ValueError("stationarity residuals are defined for theta2 > 0")

    act = params.activation

    def score(u):
        return np.asarray(activation_quantile(act, u), dtype=float)

    def discrepancy(u):
        return (params.theta1 + params.theta2 * score(u)
                - np.asarray(mu.quantile(u), dtype=float))

    kink: tuple[float, ...] = (0.5,) if act is ActivationKind.RELU else ()

    # Locate sign changes of the discrepancy on a graded probe grid, then
    # integrate sign-constant pieces separately.
    probes = _probe_grid(kink)
    vals = discrepancy(probes)
    if np.all(vals == 0.0):
        return 0.0, 0.0

    roots: list[float] = []
    sgn = np.sign(vals)
    for i in range(len(probes) - 1):
        if sgn[i] == 0.0:
            roots.append(float(probes[i]))
        elif sgn[i] * sgn[i + 1] < 0.0:
            roots.append(float(brentq(lambda u: float(discrepancy(np.array([u]))[0]),
                                      probes[i], probes[i + 1], xtol=1e-15)))
    pieces = np.unique(np.concatenate([[0.0, 1.0], roots, kink]))

    r1 = 0.0
    r2 = 0.0
    for a, b in zip(pieces[:-1], pieces[1:]):
        if b - a <= 0.0:
            continue
        mid = 0.5 * (a + b)
        s = float(np.sign(discrepancy(np.array([mid]))[0]))
        if s == 0.0:
            continue
        r1 += s * (b - a)
        r2 += s * _integrate_sub(score, a, b)
    return r1, r2


def _probe_grid(extra: tuple[float, ...]) -> np.ndarray:
    tails = 2.0 ** -np.arange(2, 40, dtype=float)
    body = np.linspace(0.0, 1.0, 2049)[1:-1]
    return np.unique(np.concatenate([tails, body, 1.0 - tails, extra]))


def _integrate_sub(g, a: float, b: float) -> float:
    """Integral of ``g`` over the subinterval (a, b) of the unit interval."""
    edges = _panelize(())
    edges = np.unique(np.clip(edges, a, b))
    edges = np.concatenate([[a], edges, [b]])
    edges = np.unique(edges)
    prev = _fixed_order_integral(g, edges, 12)
    for order in (24, 48, 96):
        cur = _fixed_order_integral(g, edges, order)
        if abs(cur - prev) <= max(1e-13, 1e-10 * abs(cur)):
            return cur
        prev = cur
    raise QuadratureError("subinterval integral did not converge under refinement")
