"""Closed-form WGAN generator parameters and sliced-Wasserstein machinery."""

__version__ = "0.1.0"

from .distributions import (
    ActivationKind,
    Affine,
    Ar1Spec,
    ContinuousDistribution1D,
    Empirical,
    Gaussian,
    Laplace,
    LogitNormal,
    RectifiedGaussian,
    SampleMatrix,
    Uniform,
    activation_cdf,
    activation_law,
    activation_moments,
    activation_quantile,
    sample_matrix,
    sample_sphere_direction,
)
from .errors import NumericsError, QuadratureError
from .kde import KdeModel, clamp_probability, fit
from .normal import std_normal_cdf, std_normal_pdf, std_normal_quantile, std_normal_sf
from .ot1d import (
    TransportMap1D,
    transport_map,
    unprojected_inner_value,
    wq_brute,
    wq_empirical,
    wq_to_gaussian,
)
from .sgd import SgdConfig, SgdTrace, fit_w1
from .sliced import (
    LinearGenerator,
    McEstimate,
    SigmaTilde,
    SlicedEvalConfig,
    carlson_r_half,
    closed_form_objective_d2,
    elliptic_E,
    elliptic_K,
    gamma_ratio,
    gamma_ratio_sq,
    objective_carlson,
    objective_mc,
    objective_quadrature,
    optimal_theta_w1,
    optimal_theta_w2,
    r_pca,
    sigma_tilde,
    sliced_wq_empirical,
    ub_value,
)
from .streams import stream
from .wgan1d import (
    Branch,
    Generator1D,
    SolveReport,
    empirical_theta2_linear,
    expect,
    generator_quantile,
    objective_w2,
    solve_w2_general,
    solve_w2_linear,
    solve_w2_relu,
    w1_residuals,
)

__all__ = [name for name in dir() if not name.startswith("_")]
