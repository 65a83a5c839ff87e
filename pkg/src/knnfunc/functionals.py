"""Plug-in estimators of density functionals G(f) = E[g(f(X))].

The estimator averages g over N evaluation points using a k-NN density
built from M disjoint reference points (a bipartite construction: density
edges run from evaluation nodes to reference nodes).  For Shannon and
Renyi functionals a multiplicative/additive correction pair (g1, g2),
defined by

    E[g((k-1)x / (M p))] = g1(k,M) * g(x) + g2(k,M) + o(1),
    p ~ Beta(k, M-k+1),

removes the O(1/k) bias term; the corrected estimator is
(plain - g2) / g1.
"""

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .boundary import BoundaryConfig, detect_boundary
from .data import Dataset, SampleSplit
from .density import corrected_density, knn_density
from .knn import build_index

__all__ = [
    "Functional",
    "EstimateReport",
    "shannon_functional",
    "renyi_functional",
    "custom_functional",
    "digamma",
    "log_gamma",
    "special_functions",
    "bpi_estimate",
    "bpi_estimate_bc",
    "renyi_entropy",
    "mutual_information",
]


# -- special functions -------------------------------------------------------

def digamma(x: float) -> float:
    """psi(x) for x > 0, absolute error below 1e-10.

    Recurrence psi(x) = psi(x+1) - 1/x up to x >= 8, then the asymptotic
    series with Bernoulli terms through x^-8.
    """
    if x <= 0:
        raise ValueError("digamma requires x > 0")
    acc = 0.0
    while x < 8.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = (
        math.log(x)
        - 0.5 / x
        - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)))
    )
    return acc + series


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    if x <= 0:
        raise ValueError("log_gamma requires x > 0")
    return math.lgamma(x)


def special_functions(x: float):
    """(digamma(x), log_gamma(x)) for x > 0."""
    return digamma(x), log_gamma(x)


# -- functional definitions ---------------------------------------------------

@dataclass(frozen=True)
class Functional:
    """g with derivatives in the density argument and optional (g1, g2).

    g, g_prime, g_double_prime take (values, points) where points may be
    None; the built-in functionals ignore the point argument.
    bias_factors(k, M) -> (g1, g2) or None when no correction exists.
    """

    id: str
    g: Callable
    g_prime: Callable
    g_double_prime: Callable
    bias_factors: Optional[Callable] = None
    alpha: Optional[float] = None


def shannon_functional() -> Functional:
    """g(u) = -log u with additive correction g2 = psi(k) - log(k-1)."""

    def factors(k, M):
        return 1.0, digamma(k) - math.log(k - 1)

    return Functional(
        id="shannon",
        g=lambda u, x=None: -np.log(u),
        g_prime=lambda u, x=None: -1.0 / u,
        g_double_prime=lambda u, x=None: 1.0 / u**2,
        bias_factors=factors,
    )


def renyi_functional(alpha: float) -> Functional:
    """g(u) = u^(alpha-1), the Renyi integral integrand.

    g1(k,M) = (Gamma(k+1-alpha)/Gamma(k)) * (k-1)^(alpha-1), the exact
    multiplicative factor of the Beta(k, M-k+1) coverage moment (see the
    defining condition in the module docstring); g2 = 0.  Requires
    0 < alpha < 2, alpha != 1, and k+1-alpha > 0 at use time.
    """
    if alpha == 1.0:
        raise ValueError("alpha = 1 is the Shannon case; use shannon_functional")
    if not 0.0 < alpha < 2.0:
        raise ValueError("alpha must lie in (0, 2)")

    def factors(k, M):
        if k + 1 - alpha <= 0:
            raise ValueError("need k + 1 - alpha > 0")
        g1 = math.exp(log_gamma(k + 1 - alpha) - log_gamma(k)) * (k - 1) ** (alpha - 1)
        return g1, 0.0

    return Functional(
        id="renyi",
        g=lambda u, x=None: u ** (alpha - 1.0),
        g_prime=lambda u, x=None: (alpha - 1.0) * u ** (alpha - 2.0),
        g_double_prime=lambda u, x=None: (alpha - 1.0) * (alpha - 2.0) * u ** (alpha - 3.0),
        bias_factors=factors,
        alpha=alpha,
    )


def custom_functional(
    g, g_prime, g_double_prime=None, bias_factors=None, id: str = "custom"
) -> Functional:
    """User-supplied functional; bias correction only if factors given."""
    if g_double_prime is None:
        g_double_prime = lambda u, x=None: np.zeros_like(np.asarray(u, dtype=float))
    return Functional(
        id=id,
        g=g,
        g_prime=g_prime,
        g_double_prime=g_double_prime,
        bias_factors=bias_factors,
    )


# -- reports ------------------------------------------------------------------

@dataclass(frozen=True)
class EstimateReport:
    estimate: float
    k: int
    N: int
    M: int
    estimator_variant: str  # "bpi" | "bpi_bias_corrected"
    boundary_corrected: bool
    variance_estimate: float
    ci: Optional[tuple] = None  # (lo, hi, level)
    bias_components: Optional[dict] = None

    def to_dict(self) -> dict:
        out = {
            "estimate": self.estimate,
            "k": self.k,
            "N": self.N,
            "M": self.M,
            "estimator_variant": self.estimator_variant,
            "boundary_corrected": self.boundary_corrected,
            "variance_estimate": self.variance_estimate,
        }
        if self.ci is not None:
            out["ci"] = {"lo": self.ci[0], "hi": self.ci[1], "level": self.ci[2]}
        if self.bias_components is not None:
            out["bias_components"] = self.bias_components
        return out


def _attach_ci(report: EstimateReport, level: Optional[float]) -> EstimateReport:
    if level is None:
        return report
    from .inference import normal_quantile  # local import, avoids cycle

    if not 0.0 < level < 1.0:
        raise ValueError("ci level must lie in (0, 1)")
    half = normal_quantile((1.0 + level) / 2.0) * math.sqrt(report.variance_estimate)
    return dataclasses.replace(
        report, ci=(report.estimate - half, report.estimate + half, level)
    )


# -- estimators ---------------------------------------------------------------

def _density_values(data, split, k, boundary_correct, config):
    ev = split.eval_points(data)
    rf = split.ref_points(data)
    index = build_index(rf)
    if boundary_correct:
        labels = detect_boundary(ev, k, split.n_ref, config or BoundaryConfig())
        dens = corrected_density(index, ev, k, labels)
    else:
        dens = knn_density(index, ev, k)
    return ev, dens


def _evaluate_g(functional, values, points):
    with np.errstate(all="ignore"):
        gv = np.asarray(functional.g(values, points), dtype=np.float64)
    if not np.all(np.isfinite(gv)):
        bad = int(np.argmax(~np.isfinite(gv)))
        raise ValueError(
            f"g({functional.id}) non-finite at evaluation point {bad} "
            f"(density estimate {values[bad]!r})"
        )
    return gv


def bpi_estimate(
    data: Dataset,
    split: SampleSplit,
    functional: Functional,
    k: int,
    boundary_correct: bool = True,
    config: Optional[BoundaryConfig] = None,
    ci_level: Optional[float] = None,
) -> EstimateReport:
    """Plain plug-in estimate (1/N) sum g(f_tilde(X_i)).

    boundary_correct selects the corrected density f_tilde; otherwise the
    standard k-NN estimate is plugged in.  The variance estimate is the
    empirical c4/N + c5/M (sample variances of g and of u*g'(u)).
    """
    ev, dens = _density_values(data, split, k, boundary_correct, config)
    u = dens.values
    gv = _evaluate_g(functional, u, ev)
    est = float(np.mean(gv))
    N, M = split.n_eval, split.n_ref
    c4 = float(np.var(gv, ddof=1)) if N > 1 else 0.0
    with np.errstate(all="ignore"):
        fg = u * np.asarray(functional.g_prime(u, ev), dtype=np.float64)
    c5 = float(np.var(fg, ddof=1)) if N > 1 else 0.0
    report = EstimateReport(
        estimate=est,
        k=k,
        N=N,
        M=M,
        estimator_variant="bpi",
        boundary_corrected=boundary_correct,
        variance_estimate=c4 / N + c5 / M,
    )
    return _attach_ci(report, ci_level)


def bpi_estimate_bc(
    data: Dataset,
    split: SampleSplit,
    functional: Functional,
    k: int,
    config: Optional[BoundaryConfig] = None,
    ci_level: Optional[float] = None,
) -> EstimateReport:
    """Bias-corrected plug-in estimate (plain - g2(k,M)) / g1(k,M).

    Boundary correction is always on.  Raises when the functional carries
    no bias factors (no general correction exists) or when g1 = 0.
    """
    if functional.bias_factors is None:
        raise ValueError(
            f"functional {functional.id!r} has no bias-correction factors"
        )
    plain = bpi_estimate(
        data, split, functional, k, boundary_correct=True, config=config
    )
    g1, g2 = functional.bias_factors(k, split.n_ref)
    if g1 == 0:
        raise ValueError("bias factor g1 is zero")
    report = EstimateReport(
        estimate=(plain.estimate - g2) / g1,
        k=k,
        N=plain.N,
        M=plain.M,
        estimator_variant="bpi_bias_corrected",
        boundary_corrected=True,
        variance_estimate=plain.variance_estimate / g1**2,
    )
    return _attach_ci(report, ci_level)


def renyi_entropy(
    data: Dataset,
    split: SampleSplit,
    alpha: float,
    k: int,
    config: Optional[BoundaryConfig] = None,
    ci_level: Optional[float] = None,
) -> EstimateReport:
    """Renyi entropy log(I_alpha) / (1 - alpha) from the corrected integral.

    Variance propagated by the delta method: Var(H) = Var(I) / ((1-alpha)*I)^2.
    """
    integral = bpi_estimate_bc(data, split, renyi_functional(alpha), k, config=config)
    if integral.estimate <= 0:
        raise ValueError(f"nonpositive Renyi integral estimate {integral.estimate}")
    ent = math.log(integral.estimate) / (1.0 - alpha)
    var = integral.variance_estimate / ((1.0 - alpha) * integral.estimate) ** 2
    report = EstimateReport(
        estimate=ent,
        k=k,
        N=integral.N,
        M=integral.M,
        estimator_variant="bpi_bias_corrected",
        boundary_corrected=True,
        variance_estimate=var,
    )
    return _attach_ci(report, ci_level)


def mutual_information(
    data: Dataset,
    split: SampleSplit,
    x_cols,
    y_cols,
    k: int,
    config: Optional[BoundaryConfig] = None,
    ci_level: Optional[float] = None,
) -> EstimateReport:
    """Shannon mutual information H(X) + H(Y) - H(X,Y).

    All three entropies are bias-corrected Shannon plug-ins computed on the
    same split (joint on all named columns, marginals on their blocks).
    The variance estimate is the empirical variance of
    log(f_X * f_Y / f_XY) times (1/N + 1/M).
    """
    x_cols = list(x_cols)
    y_cols = list(y_cols)
    if set(x_cols) & set(y_cols):
        raise ValueError("x and y column blocks overlap")
    shannon = shannon_functional()
    logs = {}
    entropies = {}
    for name, cols in (("x", x_cols), ("y", y_cols), ("joint", x_cols + y_cols)):
        sub = Dataset(data.points[:, cols])
        ev, dens = _density_values(sub, split, k, True, config)
        logs[name] = np.log(dens.values)
        g1, g2 = shannon.bias_factors(k, split.n_ref)
        entropies[name] = float(np.mean(-logs[name])) - g2
    est = entropies["x"] + entropies["y"] - entropies["joint"]
    ratio = logs["x"] + logs["y"] - logs["joint"]
    c_v = float(np.var(ratio, ddof=1)) if split.n_eval > 1 else 0.0
    N, M = split.n_eval, split.n_ref
    report = EstimateReport(
        estimate=est,
        k=k,
        N=N,
        M=M,
        estimator_variant="bpi_bias_corrected",
        boundary_corrected=True,
        variance_estimate=c_v * (1.0 / N + 1.0 / M),
    )
    return _attach_ci(report, ci_level)
