"""Momentum SGD for the absolute-loss scalar generator on empirical data.

The gradient surrogate is the pair of minibatch sign residuals

    g1 = mean sign(theta1 + theta2 * psi_i - x_i)
    g2 = mean sign(theta1 + theta2 * psi_i - x_i) * psi_i

with ``psi_i = Psi^{-1}(F_hat(x_i))`` computed once from a KDE CDF fitted
to the full sample (clamped before inversion).  ``sign(0) = 0``.  The
slope is kept positive by projection, matching the branch these residuals
are derived for.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distributions import ActivationKind, activation_quantile
from .kde import clamp_probability, fit as kde_fit
from .streams import stream
from .wgan1d import Generator1D

_THETA2_FLOOR = 1e-6
_DIVERGENCE_LIMIT = 1e6


@dataclass(frozen=True)
class SgdConfig:
    learning_rate: float = 0.01
    momentum: float = 0.9
    batch_size: int = 256
    iterations: int = 5_000
    seed: int = 0
    init: tuple[float, float] = (0.0, 1.0)
    activation: ActivationKind = ActivationKind.LINEAR
    bandwidth: float | None = None

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must lie in [0, 1)")
        if self.batch_size < 1 or self.iterations < 0:
            raise ValueError("batch_size and iterations must be positive")
        if not self.init[1] > 0:
            raise ValueError("initial theta2 must be positive")


@dataclass(frozen=True)
class SgdTrace:
    """Per-iteration (theta1, theta2, residual norm), including the start."""

    theta1: np.ndarray
    theta2: np.ndarray
    residual_norm: np.ndarray

    def __len__(self) -> int:
        return self.theta1.size

    def to_csv(self, path) -> None:
        it = np.arange(len(self))
        np.savetxt(path, np.column_stack([it, self.theta1, self.theta2, self.residual_norm]),
                   delimiter=",", fmt=("%d", "%.17g", "%.17g", "%.17g"),
                   header="iteration,theta1,theta2,residual_norm", comments="")


def fit_w1(samples, cfg: SgdConfig) -> tuple[Generator1D, SgdTrace]:
    """Fit (theta1, theta2) by momentum SGD on the sign residuals.

    Single-threaded and deterministic for a fixed seed.  Aborts if the
    iterate escapes past 1e6 in absolute value.
    """
    xs = np.asarray(samples, dtype=float)
    if xs.size < 100:
        raise ValueError("need at least 100 samples")

    model = kde_fit(xs, cfg.bandwidth)
    f_hat = clamp_probability(model.cdf_hat(xs), xs.size)
    psi = np.asarray(activation_quantile(cfg.activation, f_hat), dtype=float)

    rng = stream(cfg.seed, 0)
    theta1, theta2 = float(cfg.init[0]), float(cfg.init[1])
    v1 = v2 = 0.0

    t1_trace = np.empty(cfg.iterations + 1)
    t2_trace = np.empty(cfg.iterations + 1)
    r_trace = np.empty(cfg.iterations + 1)

    def residuals(t1: float, t2: float, idx) -> tuple[float, float]:
        s = np.sign(t1 + t2 * psi[idx] - xs[idx])
        return float(s.mean()), float((s * psi[idx]).mean())

    full = np.arange(xs.size)
    g1, g2 = residuals(theta1, theta2, full)
    t1_trace[0], t2_trace[0], r_trace[0] = theta1, theta2, float(np.hypot(g1, g2))

    for it in range(1, cfg.iterations + 1):
        idx = rng.integers(0, xs.size, size=cfg.batch_size)
        g1, g2 = residuals(theta1, theta2, idx)
        v1 = cfg.momentum * v1 + g1
        v2 = cfg.momentum * v2 + g2
        theta1 -= cfg.learning_rate * v1
        theta2 -= cfg.learning_rate * v2
        theta2 = max(theta2, _THETA2_FLOOR)
        if abs(theta1) > _DIVERGENCE_LIMIT or abs(theta2) > _DIVERGENCE_LIMIT:
            raise RuntimeError(f"SGD diverged at iteration {it}")
        t1_trace[it], t2_trace[it] = theta1, theta2
        r_trace[it] = float(np.hypot(g1, g2))

    params = Generator1D(theta1, theta2, cfg.activation)
    return params, SgdTrace(t1_trace, t2_trace, r_trace)
