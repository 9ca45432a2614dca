"""Bandwidth-selection rules and the Monte-Carlo convergence-rate harness.

The spectral cutoff V_n trades the bias of ignoring high frequencies
against the noise of the ratio estimator there; the optimal schedule
depends on how fast the stationary density's Mellin transform decays along
vertical lines (polynomially with exponent beta, or exponentially with
rate alpha).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import DomainError, GouestError
from .estimators import (EstimationConfig, LevyDensityEstimate, default_x_grid,
                         run_algorithm1, run_algorithm2)
from .models import SubordinatorModel, levy_density
from .sampling import sample_stationary

__all__ = [
    "RateStudyConfig",
    "MiseReport",
    "choose_vn_polynomial",
    "choose_vn_exponential",
    "mise",
    "rate_study",
    "write_mise_report_json",
]


@dataclass(frozen=True)
class RateStudyConfig:
    """Inputs of a replicated convergence study across a ladder of sample sizes.

    ``decay_class`` selects the bandwidth rule; ``beta`` (polynomial Mellin
    decay) or ``alpha`` (exponential decay) feeds it; ``smoothness`` is the
    kernel-order parameter s; ``radius`` is recorded metadata describing the
    density class, never used numerically.
    """

    n_ladder: tuple
    replicates: int = 25
    smoothness: int = 0
    beta: float | None = None
    alpha: float | None = None
    decay_class: str = "polynomial"
    radius: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_ladder", tuple(int(n) for n in self.n_ladder))
        if len(self.n_ladder) < 2:
            raise DomainError("n-ladder needs at least two sample sizes")
        if any(b <= a for a, b in zip(self.n_ladder, self.n_ladder[1:])):
            raise DomainError(f"n-ladder must be strictly increasing, got {self.n_ladder}")
        if self.replicates < 2:
            raise DomainError(f"need at least 2 replicates, got {self.replicates}")
        if self.smoothness < 0:
            raise DomainError(f"smoothness must be >= 0, got {self.smoothness}")
        if self.decay_class not in ("polynomial", "exponential"):
            raise DomainError(f"unknown decay class {self.decay_class!r}")
        if self.decay_class == "polynomial" and self.beta is None:
            raise DomainError("polynomial decay class requires beta")
        if self.decay_class == "exponential" and self.alpha is None:
            raise DomainError("exponential decay class requires alpha")

    def bandwidth(self, n: int) -> float:
        if self.decay_class == "polynomial":
            return choose_vn_polynomial(n, self.beta, self.smoothness)
        return choose_vn_exponential(n, self.alpha, self.smoothness)


@dataclass
class MiseReport:
    """Per-n medians/quartiles of squared errors plus fitted log-log slopes."""

    n: list
    median_sq_err_mu: list
    median_sq_err_lambda: list
    median_mise: list
    slope_mu: float
    slope_mise: float
    quartiles: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def choose_vn_polynomial(n: int, beta: float, s: int) -> float:
    """Bandwidth for polynomially decaying Mellin transforms:
    V_n = n^{1/(2 beta + 2 s + 3)}."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    denom = 2.0 * beta + 2.0 * s + 3.0
    if denom <= 0.0:
        raise DomainError(f"rate exponent denominator must be positive, got {denom}")
    return float(n) ** (1.0 / denom)


def choose_vn_exponential(n: int, alpha: float, s: int) -> float:
    """Bandwidth for exponentially decaying Mellin transforms:
    V_n = log(n)/(2 alpha) - ((s+2)/alpha) log log (n); rejects values <= 0
    (n too small for the given decay rate)."""
    if n < 3:
        raise DomainError(f"need n >= 3 for the iterated logarithm, got {n}")
    if alpha <= 0.0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    value = np.log(n) / (2.0 * alpha) - (s + 2.0) / alpha * np.log(np.log(n))
    if not (value > 0.0):
        raise DomainError(
            f"exponential bandwidth rule gives {value:.4g} <= 0 at n={n}, alpha={alpha}, s={s}")
    return float(value)


def mise(estimate: LevyDensityEstimate, truth, x_range=(0.0, 3.0)) -> float:
    """Integrated squared error of the tilted density estimate:
    trapezoid of |nu_bar_hat - nu_bar|^2 over x_range on the estimate's grid.

    ``truth`` is a callable returning the tilted density nu_bar at x.
    """
    lo, hi = float(x_range[0]), float(x_range[1])
    if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
        raise DomainError(f"x-range must be finite and increasing, got {x_range}")
    mask = (estimate.x >= lo) & (estimate.x <= hi)
    if int(mask.sum()) < 2:
        raise DomainError("x-range covers fewer than 2 grid points")
    x = estimate.x[mask]
    err = estimate.nu_bar_hat[mask] - np.asarray(truth(x), dtype=float)
    return float(np.trapezoid(err**2, x))


def _log_log_slope(n_values, medians) -> float:
    medians = np.asarray(medians, dtype=float)
    if np.any(~np.isfinite(medians)) or np.any(medians <= 0.0):
        return float("nan")
    return float(np.polyfit(np.log(np.asarray(n_values, dtype=float)), np.log(medians), 1)[0])


def rate_study(study: RateStudyConfig, model: SubordinatorModel,
               config_template: EstimationConfig, seed: int = 0,
               x_range=(0.0, 3.0), x_points: int = 151,
               triplet_estimator=None, with_mise: bool = True) -> MiseReport:
    """Replicated error study across the n-ladder with the matching bandwidth
    rule applied at every n.

    Per replicate: draw a fresh stationary sample (independent stream),
    fit (mu, lambda), and, when ``with_mise``, run the full density pipeline
    and integrate its squared error. Replicate failures are recorded in the
    report, not fatal. ``triplet_estimator`` optionally replaces the fitting
    pipeline (same signature as run_algorithm1) for diagnostics.
    """
    if triplet_estimator is None:
        triplet_estimator = run_algorithm1
    mu_true = float(getattr(model, "mu", 0.0))
    lambda_true = model.jump_mass
    x_grid = default_x_grid(x_range[0], x_range[1], x_points)
    if with_mise:
        def truth(x):
            x = np.asarray(x, dtype=float)
            return np.exp(-config_template.u0 * x) * levy_density(model, x)

    med_mu, med_lam, med_mise_list = [], [], []
    quartiles = {"sq_err_mu": [], "sq_err_lambda": [], "mise": []}
    failures = []
    for i_n, n in enumerate(study.n_ladder):
        config = replace(config_template, vn=study.bandwidth(n))
        sq_mu, sq_lam, mise_vals = [], [], []
        for r in range(study.replicates):
            stream = i_n * study.replicates + r
            try:
                sample = sample_stationary(model, n, seed=seed, stream=stream)
                triplet = triplet_estimator(sample, config)
                sq_mu.append((triplet.mu_hat - mu_true) ** 2)
                sq_lam.append((triplet.lambda_hat - lambda_true) ** 2)
                if with_mise:
                    estimate = run_algorithm2(sample, config, x_grid)
                    mise_vals.append(mise(estimate, truth, x_range))
            except GouestError as exc:
                failures.append({"n": n, "replicate": r,
                                 "error": type(exc).__name__, "message": str(exc)})
        if not sq_mu:
            raise DomainError(f"all {study.replicates} replicates failed at n={n}")
        med_mu.append(float(np.median(sq_mu)))
        med_lam.append(float(np.median(sq_lam)))
        quartiles["sq_err_mu"].append([float(q) for q in np.percentile(sq_mu, [25, 75])])
        quartiles["sq_err_lambda"].append([float(q) for q in np.percentile(sq_lam, [25, 75])])
        if with_mise:
            med_mise_list.append(float(np.median(mise_vals)))
            quartiles["mise"].append([float(q) for q in np.percentile(mise_vals, [25, 75])])

    return MiseReport(
        n=list(study.n_ladder),
        median_sq_err_mu=med_mu,
        median_sq_err_lambda=med_lam,
        median_mise=med_mise_list,
        slope_mu=_log_log_slope(study.n_ladder, med_mu),
        slope_mise=_log_log_slope(study.n_ladder, med_mise_list) if with_mise else float("nan"),
        quartiles=quartiles,
        failures=failures,
        meta={"seed": seed, "x_range": [float(x_range[0]), float(x_range[1])],
              "x_points": x_points, "decay_class": study.decay_class,
              "replicates": study.replicates},
    )


def _json_safe(value: float):
    return None if not np.isfinite(value) else value


def write_mise_report_json(report: MiseReport, path: str | Path) -> Path:
    """Serialize the study summary with the documented flat schema."""
    payload = {
        "n": report.n,
        "median_sq_err_mu": report.median_sq_err_mu,
        "median_sq_err_lambda": report.median_sq_err_lambda,
        "median_mise": report.median_mise,
        "slope_mu": _json_safe(report.slope_mu),
        "slope_mise": _json_safe(report.slope_mise),
    }
    path = Path(path)
    with open(path, "w", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
