"""One-dimensional optimal transport primitives.

In one dimension the optimal coupling for convex costs pairs quantiles:
the monotone map ``t(x) = G^{-1}(F(x))`` pushes the data law with CDF
``F`` onto the target with CDF ``G``, and for equal-size empirical
measures it reduces to sorted pairing.  A factorial-search oracle over
explicit assignments (n <= 8) backs the sorted-pairing implementation in
tests.  The module also evaluates the multi-to-one projected transport
used by the sliced objective: project, rank, and couple against Gaussian
quantiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .distributions import SampleMatrix
from .normal import std_normal_quantile
from .wgan1d import Generator1D, generator_quantile


@dataclass(frozen=True)
class TransportMap1D:
    """Monotone map pushing ``source`` onto the law of the generator output.

    Evaluates ``x -> generator_quantile(params, F_source(x))``; nondecreasing
    because both the source CDF and the target quantile are.
    """

    source: object  # distribution-like: vectorized cdf/quantile
    params: Generator1D

    def __call__(self, x):
        return generator_quantile(self.params, np.asarray(self.source.cdf(x), dtype=float))


def transport_map(mu, params: Generator1D) -> TransportMap1D:
    """Optimal (quantile) transport map from ``mu`` to the generator law."""
    return TransportMap1D(source=mu, params=params)


def wq_empirical(x: np.ndarray, y: np.ndarray, q: int) -> float:
    """Order-q Wasserstein distance between equal-size sorted samples.

    Sorted pairing realizes the optimal assignment for atomless data, so
    the distance is ``(mean |x_(i) - y_(i)|^q)^(1/q)``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("wq_empirical expects two 1-D arrays of equal length")
    if q not in (1, 2):
        raise ValueError("q must be 1 or 2")
    d = np.abs(x - y)
    return float(np.mean(d ** q) ** (1.0 / q))


def wq_brute(x: np.ndarray, y: np.ndarray, q: int) -> float:
    """Exact minimum over all pairings; factorial cost, capped at n = 8."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("wq_brute expects two 1-D arrays of equal length")
    if x.size > 8:
        raise ValueError("brute-force assignment is capped at 8 points")
    if q not in (1, 2):
        raise ValueError("q must be 1 or 2")
    best = math.inf
    for perm in permutations(range(x.size)):
        cost = float(np.mean(np.abs(x - y[list(perm)]) ** q))
        best = min(best, cost)
    return best ** (1.0 / q)


def wq_to_gaussian(x_sorted: np.ndarray, sigma: float, q: int) -> float:
    """Distance from a sorted sample to N(0, sigma^2) via midpoint quantiles.

    Couples the i-th order statistic with ``sigma * Q((i - 1/2) / M)``;
    the midpoint convention keeps the normal quantile finite and is
    unbiased for continuous targets.  ``sigma = 0`` degenerates to the
    distance to a point mass at the origin.
    """
    x_sorted = np.asarray(x_sorted, dtype=float)
    if x_sorted.ndim != 1 or x_sorted.size == 0:
        raise ValueError("expected a non-empty 1-D array")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if q not in (1, 2):
        raise ValueError("q must be 1 or 2")
    m = x_sorted.size
    targets = sigma * std_normal_quantile((np.arange(m) + 0.5) / m) if sigma > 0 else 0.0
    d = np.abs(x_sorted - targets)
    return float(np.mean(d ** q) ** (1.0 / q))


def unprojected_inner_value(samples: SampleMatrix, omega: np.ndarray, theta) -> float:
    """Squared distance of projected data to its matched Gaussian, row-wise.

    Implements the multi-to-one coupling ``x -> sigma * Q(F_emp(omega' x))``
    directly on the unsorted rows (rank-based CDF with the midpoint
    convention), so it is an independent route to
    ``wq_to_gaussian(sorted projections, sigma, 2) ** 2``.
    """
    from .sliced import LinearGenerator

    omega = np.asarray(omega, dtype=float)
    data = samples.data
    if omega.shape != (data.shape[1],):
        raise ValueError("omega must be a d-vector matching the sample dimension")
    theta_mat = theta.theta if isinstance(theta, LinearGenerator) else np.asarray(theta, float)

    proj = data @ omega
    sigma2 = float(omega @ (theta_mat @ (theta_mat.T @ omega)))
    sigma = math.sqrt(max(sigma2, 0.0))
    m = proj.size

    ranks = np.empty(m, dtype=float)
    ranks[np.argsort(proj, kind="stable")] = np.arange(m)
    mapped = sigma * std_normal_quantile((ranks + 0.5) / m) if sigma > 0 else np.zeros(m)
    diff = proj - mapped
    return float(np.mean(diff * diff))
