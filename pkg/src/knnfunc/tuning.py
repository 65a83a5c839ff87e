"""Theory constants, MSE-optimal k, and bias/variance predictions.

The estimator's leading error terms are

    bias     ~  c1 * (k/M)^(2/d)  +  c2 / k  +  c3
    variance ~  c4 / N  +  c5 / M

with c1 = E[g'(f(Z)) h(Z)], c2 = E[f(Z)^2 g''(f(Z))] / 2,
c4 = V[g(f(Z))], c5 = V[f(Z) g'(f(Z))], and

    h(x) = Gamma((d+2)/2)^(2/d) / (2 (d+2) pi) * f(x)^(-2/d) * tr Hess f(x).

The 1/(2(d+2)pi) factor is the normalization the coverage Taylor expansion
actually produces (checked against simulated pointwise k-NN density bias);
h is sometimes quoted without it, which over-predicts by 2(d+2)pi.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data import AnalyticDensity, Dataset, SampleSplit
from .functionals import Functional
from .knn import build_index, knn_query, unit_ball_volume

__all__ = [
    "TheoryConstants",
    "hessian_weight",
    "constants_oracle",
    "constants_empirical",
    "estimate_c3_boundary",
    "optimal_k",
    "rate_matched_k",
    "predict_bias_variance",
]


@dataclass(frozen=True)
class TheoryConstants:
    """c1..c5 plus provenance.  c1/c3 are None when not estimable
    (empirical mode has no density Hessian; oracle mode does not model
    the boundary term and reports c3 = 0 with c3_estimated False)."""

    c1: Optional[float]
    c2: float
    c3: Optional[float]
    c4: float
    c5: float
    mode: str  # "oracle" | "empirical"
    c3_estimated: bool = False

    def __post_init__(self):
        if self.c4 < 0 or self.c5 < 0:
            raise ValueError("variance constants must be nonnegative")


def hessian_weight(d: int) -> float:
    """Gamma((d+2)/2)^(2/d) / (2 (d+2) pi)."""
    return math.gamma((d + 2) / 2.0) ** (2.0 / d) / (2.0 * (d + 2) * math.pi)


def _trace_hessian(pdf, x, step):
    """Central-difference trace of the pdf Hessian at each row of x."""
    n, d = x.shape
    f0 = pdf(x)
    tr = np.zeros(n)
    for i in range(d):
        e = np.zeros(d)
        e[i] = step
        tr += pdf(x + e) - 2.0 * f0 + pdf(x - e)
    return tr / step**2, f0


def constants_oracle(
    density: AnalyticDensity,
    functional: Functional,
    n_mc: int,
    seed: int,
    hessian_step: float = 1e-4,
) -> TheoryConstants:
    """Monte Carlo theory constants using the analytic density.

    Draws Z ~ f, evaluates h(Z) with a finite-difference Hessian trace, and
    averages.  c3 (the boundary-extrapolation term) is not modeled: it is
    reported as 0.0 with c3_estimated False.  Warns below 10^5 draws.
    """
    if n_mc < 100_000:
        warnings.warn(
            f"n_mc = {n_mc} < 1e5: oracle constants will be noisy", RuntimeWarning
        )
    z = density.sample(n_mc, seed, "oracle-constants", functional.id)
    tr, f = _trace_hessian(density.pdf, z, hessian_step)
    d = density.dim
    h = hessian_weight(d) * f ** (-2.0 / d) * tr
    gp = np.asarray(functional.g_prime(f, z), dtype=np.float64)
    gpp = np.asarray(functional.g_double_prime(f, z), dtype=np.float64)
    gv = np.asarray(functional.g(f, z), dtype=np.float64)
    return TheoryConstants(
        c1=float(np.mean(gp * h)),
        c2=float(np.mean(f**2 * gpp / 2.0)),
        c3=0.0,
        c4=float(np.var(gv, ddof=1)),
        c5=float(np.var(f * gp, ddof=1)),
        mode="oracle",
        c3_estimated=False,
    )


def constants_empirical(
    data: Dataset,
    split: SampleSplit,
    functional: Functional,
    k: int,
    boundary_correct: bool = True,
    config=None,
) -> TheoryConstants:
    """Plug-in estimates of c2, c4, c5 from the data; c1, c3 unavailable.

    c2 is the plug-in of u^2 g''(u)/2 at the estimated density, c4 and c5
    are the sample variances of the plug-in summands.
    """
    from .functionals import _density_values  # shared density plumbing

    ev, dens = _density_values(data, split, k, boundary_correct, config)
    u = dens.values
    gv = np.asarray(functional.g(u, ev), dtype=np.float64)
    gp = np.asarray(functional.g_prime(u, ev), dtype=np.float64)
    gpp = np.asarray(functional.g_double_prime(u, ev), dtype=np.float64)
    n = len(u)
    return TheoryConstants(
        c1=None,
        c2=float(np.mean(u**2 * gpp / 2.0)),
        c3=None,
        c4=float(np.var(gv, ddof=1)) if n > 1 else 0.0,
        c5=float(np.var(u * gp, ddof=1)) if n > 1 else 0.0,
        mode="empirical",
    )


def estimate_c3_boundary(
    data: Dataset,
    split: SampleSplit,
    functional: Functional,
    k: int,
    config=None,
) -> float:
    """Boundary-term estimate from detected boundary points.

    c3_hat = (1/N) sum over boundary i of
             g'(f_hat(X_n(i))) <grad_hat f(X_n(i)), X_i - X_n(i)>
    with the gradient from a least-squares linear fit of the reference
    points' own density estimates over the k nearest references.  The
    gradient estimator is a self-contained choice, not a prescribed one.
    """
    from .boundary import BoundaryConfig, detect_boundary
    from .density import knn_density

    ev = split.eval_points(data)
    rf = split.ref_points(data)
    index = build_index(rf)
    labels = detect_boundary(ev, k, split.n_ref, config or BoundaryConfig())
    if labels.n_boundary == 0:
        return 0.0
    dens_ev = knn_density(index, ev, k).values
    # density at the reference points themselves, self excluded
    res = knn_query(index, rf, min(k + 1, index.size))
    radii = res.distances[:, -1]
    cd = unit_ball_volume(index.dim)
    dens_rf = (min(k + 1, index.size) - 2) / ((index.size - 1) * cd * radii**index.dim)
    total = 0.0
    for b, src in labels.nearest_interior.items():
        anchor = ev[src]
        near = knn_query(index, anchor, min(k, index.size))
        pts = index.points[near.indices]
        vals = dens_rf[near.indices]
        A = np.hstack([pts - anchor, np.ones((len(pts), 1))])
        coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
        grad = coef[: index.dim]
        gp = float(functional.g_prime(np.array([dens_ev[src]]), anchor[None, :])[0])
        total += gp * float(grad @ (ev[b] - anchor))
    return total / split.n_eval


def rate_matched_k(M: int, d: int) -> int:
    """k = M^(2/(2+d)) rounded, floored at 3: balances the two bias rates
    without knowing the density's constants."""
    if M < 2:
        raise ValueError("M must be >= 2")
    return max(3, int(round(M ** (2.0 / (2.0 + d)))))


def optimal_k(c0: float, c2: float, d: int, M: int) -> int:
    """MSE-optimal k = round(k0 * M^(2/(2+d))), clamped to [3, M].

    k0 = (|c2| d / (2 |c0|))^(d/(d+2)) when c0*c2 > 0 (interior optimum of
    |bias|), and (|c2|/|c0|)^(d/(d+2)) when the signs differ (bias zero
    crossing).  c0 should include any boundary contribution the caller can
    supply (c0 = c1 + c3-normalized); c0 = 0 falls back to the rate-matched
    rule with a warning.
    """
    if M < 2:
        raise ValueError("M must be >= 2")
    if c0 == 0.0:
        warnings.warn("c0 = 0: falling back to rate-matched k", RuntimeWarning)
        return rate_matched_k(M, d)
    if c2 == 0.0:
        warnings.warn("c2 = 0: k0 degenerates, clamping to 3", RuntimeWarning)
        return 3
    if c0 * c2 > 0:
        k0 = (abs(c2) * d / (2.0 * abs(c0))) ** (d / (d + 2.0))
    else:
        k0 = (abs(c2) / abs(c0)) ** (d / (d + 2.0))
    k = int(round(k0 * M ** (2.0 / (2.0 + d))))
    return min(max(k, 3), M)


def predict_bias_variance(constants: TheoryConstants, k: int, N: int, M: int, d: int):
    """Leading-term predictions (bias, variance) at the given (k, N, M)."""
    if constants.c1 is None:
        raise ValueError("bias prediction requires c1 (oracle-mode constants)")
    c3 = constants.c3 if constants.c3 is not None else 0.0
    bias = constants.c1 * (k / M) ** (2.0 / d) + constants.c2 / k + c3
    variance = constants.c4 / N + constants.c5 / M
    return bias, variance
