"""Batch experiment runner: closed-form fits, convergence sweeps, SGD traces,
sliced-distance comparisons, and the dimension curve of the attainable bound.

Every run resolves its configuration from flags plus an optional JSON file
(flags win), embeds the resolved configuration as a comment line in the
output CSV, and is reproducible from the seed.  Exit codes: 0 ok, 2 usage,
3 precondition violation, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .distributions import (
    ActivationKind,
    Ar1Spec,
    ContinuousDistribution1D,
    Gaussian,
    Laplace,
    LogitNormal,
    SampleMatrix,
    Uniform,
    sample_matrix,
)
from .errors import NumericsError
from .kde import fit as kde_fit
from .sgd import SgdConfig, fit_w1
from .sliced import (
    SigmaTilde,
    SlicedEvalConfig,
    gamma_ratio_sq,
    optimal_theta_w2,
    r_pca,
    sigma_tilde,
    sliced_wq_empirical,
    ub_value,
)
from .streams import stream
from .wgan1d import (
    SolveReport,
    empirical_theta2_linear,
    solve_w2_general,
    solve_w2_linear,
    solve_w2_relu,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_NUMERIC = 4


def parse_distribution(spec: str) -> ContinuousDistribution1D:
    """Parse 'gaussian:m,s' | 'laplace:m,b' | 'logitnormal' | 'uniform:a,b'."""
    name, _, argstr = spec.partition(":")
    args = [float(tok) for tok in argstr.split(",") if tok] if argstr else []
    name = name.strip().lower()
    if name == "gaussian":
        return Gaussian(*(args or (0.0, 1.0)))
    if name == "laplace":
        return Laplace(*(args or (0.0, 1.0)))
    if name == "logitnormal":
        return LogitNormal()
    if name == "uniform":
        return Uniform(*(args or (0.0, 1.0)))
    raise ValueError(f"unknown distribution spec {spec!r}")


def parse_activation(name: str) -> ActivationKind:
    try:
        return ActivationKind(name.strip().lower())
    except ValueError:
        raise ValueError(f"unknown activation {name!r}") from None


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_csv(path, header: list[str], rows: list[list], config: dict) -> None:
    lines = ["# config: " + json.dumps({"tool": f"wganform {__version__}", **config},
                                       sort_keys=True)]
    lines.append(",".join(header))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n")


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("--config file must contain a JSON object")
    return cfg


def _resolve(args: argparse.Namespace, cfg: dict, key: str, default=None):
    val = getattr(args, key, None)
    if val is not None:
        return val
    return cfg.get(key, default)


def _load_column(path: str) -> np.ndarray:
    mat = SampleMatrix.from_csv(path)
    return mat.data[:, 0]


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_fit1d(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    activation = parse_activation(_resolve(args, cfg, "activation", "linear"))
    dist_spec = _resolve(args, cfg, "dist")
    data_path = _resolve(args, cfg, "data")
    if (dist_spec is None) == (data_path is None):
        print("fit1d: exactly one of --dist or --data is required", file=sys.stderr)
        return EXIT_USAGE

    if dist_spec is not None:
        mu = parse_distribution(dist_spec)
        report = _solve_for(mu, activation)
        source = dist_spec
    else:
        xs = _load_column(data_path)
        model = kde_fit(xs)
        if activation is ActivationKind.LINEAR:
            theta2 = empirical_theta2_linear(xs, model)
            from .wgan1d import Branch, Generator1D
            params = Generator1D(float(np.mean(xs)), theta2, activation)
            from .wgan1d import objective_w2
            report = SolveReport(params, Branch.NON_NEGATIVE_THETA2,
                                 objective_w2(model, params), 0.0)
        else:
            report = _solve_for(model, activation)
        source = data_path

    payload = {
        "source": source,
        "activation": activation.value,
        "theta1": report.params.theta1,
        "theta2": report.params.theta2,
        "branch": report.branch.name,
        "objective_value": report.objective_value,
        "condition_value": report.condition_value,
    }
    print(f"theta1={report.params.theta1:.10g} theta2={report.params.theta2:.10g} "
          f"branch={report.branch.name} objective={report.objective_value:.10g}")
    out = _resolve(args, cfg, "out")
    if out:
        Path(out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _solve_for(mu, activation: ActivationKind) -> SolveReport:
    if activation is ActivationKind.RELU:
        return solve_w2_relu(mu)
    if activation is ActivationKind.LINEAR:
        return solve_w2_linear(mu)
    return solve_w2_general(mu, activation)


def cmd_convergence(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    dist_spec = _resolve(args, cfg, "dist", "gaussian:0,1")
    sizes = [int(s) for s in str(_resolve(args, cfg, "sizes", "1000,10000,50000")).split(",")]
    if sizes != sorted(sizes):
        print("convergence: sizes must be ascending", file=sys.stderr)
        return EXIT_USAGE
    trials = int(_resolve(args, cfg, "trials", 10))
    seed = int(_resolve(args, cfg, "seed", 0))
    out = _resolve(args, cfg, "out", "convergence.csv")

    mu = parse_distribution(dist_spec)
    theta2_pop = solve_w2_linear(mu).params.theta2

    rows = []
    for m_idx, m in enumerate(sizes):
        for trial in range(trials):
            rng = stream(seed, m_idx * trials + trial)
            xs = mu.sample(m, rng)
            est = empirical_theta2_linear(xs)
            rows.append([dist_spec, m, trial, est, abs(est - theta2_pop)])
    write_csv(out, ["dist", "M", "trial", "theta2_hat", "abs_err"],
              rows, {"command": "convergence", "dist": dist_spec, "sizes": sizes,
                     "trials": trials, "seed": seed, "theta2_population": theta2_pop})
    print(f"wrote {out} ({len(rows)} rows); population theta2={theta2_pop:.6f}")
    return EXIT_OK


def cmd_sgd_w1(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    data_path = _resolve(args, cfg, "data")
    dist_spec = _resolve(args, cfg, "dist")
    n_samples = int(_resolve(args, cfg, "m", 100_000))
    seed = int(_resolve(args, cfg, "seed", 0))
    out = _resolve(args, cfg, "out", "sgd_trace.csv")

    if data_path is None and dist_spec is None:
        print("sgd-w1: a data source is required (--data or --dist)", file=sys.stderr)
        return EXIT_USAGE
    if data_path is not None:
        xs = _load_column(data_path)
    else:
        xs = parse_distribution(dist_spec).sample(n_samples, stream(seed, 1))

    sgd_cfg = SgdConfig(
        learning_rate=float(_resolve(args, cfg, "learning_rate", 0.01)),
        momentum=float(_resolve(args, cfg, "momentum", 0.9)),
        batch_size=int(_resolve(args, cfg, "batch_size", 256)),
        iterations=int(_resolve(args, cfg, "iterations", 5_000)),
        seed=seed,
        init=(float(_resolve(args, cfg, "init_theta1", 0.0)),
              float(_resolve(args, cfg, "init_theta2", 1.0))),
    )
    params, trace = fit_w1(xs, sgd_cfg)
    trace.to_csv(out)
    print(f"final theta1={params.theta1:.6f} theta2={params.theta2:.6f} "
          f"residual_norm={trace.residual_norm[-1]:.6f}; wrote {out}")
    return EXIT_OK


_FLOPS_NOTE = {
    "proposed": "O(M d) second-moment scan",
    "r-pca": "O((M + r) d^2) covariance + eigenpairs",
}


def cmd_sliced_compare(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    dims = [int(s) for s in str(_resolve(args, cfg, "dims", "30")).split(",")]
    r_rule = str(_resolve(args, cfg, "r_rule", "2/3"))
    data_spec = str(_resolve(args, cfg, "data_spec", "laplace-iid"))
    m = int(_resolve(args, cfg, "m", 20_000))
    n_proj = int(_resolve(args, cfg, "n_proj", 2_000))
    seed = int(_resolve(args, cfg, "seed", 0))
    threads = int(_resolve(args, cfg, "threads", 1))
    out = _resolve(args, cfg, "out", "sliced_compare.csv")

    rows = []
    for d in dims:
        r = _resolve_rank(r_rule, d)
        data = _make_data(data_spec, d, m, seed)
        st = sigma_tilde(data)
        eval_cfg = SlicedEvalConfig(n_projections=n_proj, q=2, seed=seed,
                                    parallel=threads > 1,
                                    threads=threads if threads > 1 else None)
        for method, theta in (("proposed", optimal_theta_w2(d, d, st)),
                              ("r-pca", r_pca(data, r))):
            t0 = time.perf_counter()
            est = sliced_wq_empirical(data, theta, eval_cfg)
            wall_ms = (time.perf_counter() - t0) * 1e3
            rows.append([d, r if method == "r-pca" else d, method, 2, n_proj, seed,
                         est.value, est.stderr, wall_ms, _FLOPS_NOTE[method]])
            print(f"d={d} {method:>8}: value={est.value:.6f} stderr={est.stderr:.2e}")
    write_csv(out, ["d", "r", "method", "q", "n_projections", "seed",
                    "value", "stderr", "wall_ms", "flops_note"],
              rows, {"command": "sliced-compare", "dims": dims, "r_rule": r_rule,
                     "data_spec": data_spec, "m": m, "n_proj": n_proj,
                     "seed": seed, "threads": threads})
    print(f"wrote {out}")
    return EXIT_OK


def _resolve_rank(rule: str, d: int) -> int:
    rule = rule.strip().lower()
    if rule == "d":
        return d
    if "/" in rule:
        num, den = rule.split("/")
        r = round(d * float(num) / float(den))
    else:
        r = int(rule)
    if not (1 <= r <= d):
        raise ValueError(f"rank rule {rule!r} gives r={r} outside [1, {d}]")
    return r


def _make_data(spec: str, d: int, m: int, seed: int) -> SampleMatrix:
    spec = spec.strip().lower()
    if spec == "laplace-iid":
        return sample_matrix(Laplace(0.0, 1.0 / np.sqrt(2.0)), d, m, seed)
    if spec == "ar-student":
        return sample_matrix(Ar1Spec(coefficient=0.5, noise="student-t", dof=5.0), d, m, seed)
    if spec == "ar-gaussian":
        return sample_matrix(Ar1Spec(coefficient=0.5, noise="gaussian"), d, m, seed)
    if spec.startswith("csv:"):
        return SampleMatrix.from_csv(spec[4:])
    raise ValueError(f"unknown data spec {spec!r}")


def cmd_sliced_bound(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    dims = [int(s) for s in str(_resolve(args, cfg, "dims", "1,2,10,100,1000")).split(",")]
    sigma = float(_resolve(args, cfg, "sigma", 1.0))
    out = _resolve(args, cfg, "out", "sliced_bound.csv")
    if any(d < 1 for d in dims):
        print("sliced-bound: dimensions must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    st = SigmaTilde(sigma)
    rows = [[d, gamma_ratio_sq(d), ub_value(d, st)] for d in dims]
    write_csv(out, ["d", "gamma_ratio_sq", "ub_value"], rows,
              {"command": "sliced-bound", "dims": dims, "sigma": sigma})
    for d, g, ub in rows:
        print(f"d={d}: g={g:.8f} bound={ub:.8f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wganform",
        description="Closed-form WGAN generator fits and sliced-distance experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None, help="64-bit RNG seed")
        p.add_argument("--out", type=str, default=None, help="output path")
        p.add_argument("--config", type=str, default=None, help="JSON config file")
        p.add_argument("--threads", type=int, default=None, help="worker threads")

    p = sub.add_parser("fit1d", help="closed-form generator fit for 1-D data")
    p.add_argument("--dist", type=str, default=None,
                   help="population law, e.g. gaussian:0,1 or laplace:0,0.7071")
    p.add_argument("--data", type=str, default=None, help="sample CSV (first column)")
    p.add_argument("--activation", type=str, default=None,
                   choices=["linear", "sigmoid", "relu"])
    common(p)
    p.set_defaults(func=cmd_fit1d)

    p = sub.add_parser("convergence", help="empirical slope estimates vs sample size")
    p.add_argument("--dist", type=str, default=None)
    p.add_argument("--sizes", type=str, default=None, help="ascending sizes, comma-separated")
    p.add_argument("--trials", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("sgd-w1", help="momentum SGD on the absolute-loss residuals")
    p.add_argument("--data", type=str, default=None)
    p.add_argument("--dist", type=str, default=None)
    p.add_argument("--m", type=int, default=None, help="synthetic sample size")
    p.add_argument("--learning-rate", dest="learning_rate", type=float, default=None)
    p.add_argument("--momentum", type=float, default=None)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=None)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--init-theta1", dest="init_theta1", type=float, default=None)
    p.add_argument("--init-theta2", dest="init_theta2", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_sgd_w1)

    p = sub.add_parser("sliced-compare", help="proposed linear generator vs r-PCA")
    p.add_argument("--dims", type=str, default=None, help="dimensions, comma-separated")
    p.add_argument("--r-rule", dest="r_rule", type=str, default=None,
                   help="rank for r-PCA: integer, fraction like 2/3, or 'd'")
    p.add_argument("--data-spec", dest="data_spec", type=str, default=None,
                   help="laplace-iid | ar-student | ar-gaussian | csv:PATH")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--n-proj", dest="n_proj", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_sliced_compare)

    p = sub.add_parser("sliced-bound", help="attainable-bound curve over dimension")
    p.add_argument("--dims", type=str, default=None)
    p.add_argument("--sigma", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_sliced_bound)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except NumericsError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
