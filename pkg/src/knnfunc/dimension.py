"""Intrinsic dimension from k-NN log-length statistics.

The log-length statistic L_k = (gamma/N) * sum log R_k(X_i) is linear in
log(k-1) with slope gamma/d, so contrasting two bandwidths k1 < k2 gives

    alpha_hat = (L_k2 - L_k1) / (log(k2-1) - log(k1-1)),
    d_hat     = gamma / alpha_hat.

The independent variant evaluates the two statistics on disjoint halves of
the data; the correlated variant reuses one half for both, which cancels
most of the sampling noise in the difference and lowers the variance (its
own variance theory is open, so the independent prediction is reported as
an upper bound).
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data import Dataset
from .knn import NeighborIndex, build_index, knn_radii
from .rng import make_rng

__all__ = [
    "DimensionEstimate",
    "log_length",
    "estimate_dimension",
    "optimal_dim_params",
    "anomaly_scan",
]


@dataclass(frozen=True)
class DimensionEstimate:
    d_hat: float
    d_rounded: int
    alpha_hat: float
    k1: int
    k2: int
    gamma: float
    variant: str  # "independent" | "correlated"
    variance_estimate: Optional[float] = None

    def __post_init__(self):
        if self.d_rounded < 1:
            raise ValueError("rounded dimension must be >= 1")


def log_length(eval_points, ref_index: NeighborIndex, k: int, gamma: float) -> float:
    """(gamma/N) * sum of log k-NN radii from eval points into the refs."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    r = np.atleast_1d(knn_radii(ref_index, eval_points, k))
    if np.any(r == 0.0):
        raise ValueError("zero k-NN radius (duplicate points)")
    return gamma * float(np.mean(np.log(r)))


def _length_pair(points, alpha_frac, k1, k2):
    """Split one half into eval/ref and return (L-summands at k1, at k2)."""
    n = len(points)
    M = int(round(alpha_frac * n))
    M = min(max(M, max(k2, 1)), n - 1)
    ev, rf = points[: n - M], points[n - M :]
    index = build_index(rf)
    r1 = np.atleast_1d(knn_radii(index, ev, k1))
    r2 = np.atleast_1d(knn_radii(index, ev, k2))
    if np.any(r1 == 0.0) or np.any(r2 == 0.0):
        raise ValueError("zero k-NN radius (duplicate points)")
    return np.log(r1), np.log(r2)


def estimate_dimension(
    data: Dataset,
    k1: int,
    k2: Optional[int] = None,
    gamma: float = 1.0,
    variant: str = "correlated",
    alpha_frac: float = 0.7,
    seed: int = 0,
) -> DimensionEstimate:
    """Two-bandwidth dimension estimate on a seeded half/half partition.

    k2 defaults to 2*k1.  The data is shuffled once (seeded), split into
    halves X and Z; each half splits into eval/ref by alpha_frac.  The
    independent variant takes L_k1 from X and L_k2 from Z; the correlated
    variant takes both from X.
    """
    if k1 < 3:
        raise ValueError("k1 must be >= 3")
    k2 = 2 * k1 if k2 is None else k2
    if k2 <= k1:
        raise ValueError("k2 must exceed k1")
    if variant not in ("independent", "correlated"):
        raise ValueError(f"unknown variant {variant!r}")
    T = data.count
    if T < 8:
        raise ValueError("need at least 8 samples")
    rng = make_rng(seed, "dimension-partition", T)
    perm = rng.permutation(T)
    half = T // 2
    x_half = data.points[perm[:half]]
    z_half = data.points[perm[half : 2 * half]]
    logs1_x, logs2_x = _length_pair(x_half, alpha_frac, k1, k2)
    if variant == "independent":
        _, logs2 = _length_pair(z_half, alpha_frac, k1, k2)
        logs1 = logs1_x
    else:
        logs1, logs2 = logs1_x, logs2_x
    denom = math.log(k2 - 1) - math.log(k1 - 1)
    L1 = gamma * float(np.mean(logs1))
    L2 = gamma * float(np.mean(logs2))
    alpha_hat = (L2 - L1) / denom
    if alpha_hat <= 0:
        raise ValueError("nonpositive slope; data may be degenerate")
    d_hat = gamma / alpha_hat
    # variance via kappa = -gamma*nu/alpha^2, nu = -alpha/denom, with c_v
    # the empirical variance of log f_hat ~ d * log R up to constants
    nu = -alpha_hat / denom
    kappa = -gamma * nu / alpha_hat**2
    n = len(logs1)
    c_v = d_hat**2 * float(np.var(logs1, ddof=1)) if n > 1 else 0.0
    var_d = 2.0 * kappa**2 * c_v / n
    return DimensionEstimate(
        d_hat=float(d_hat),
        d_rounded=max(1, int(round(d_hat))),
        alpha_hat=float(alpha_hat),
        k1=k1,
        k2=k2,
        gamma=gamma,
        variant=variant,
        variance_estimate=var_d,
    )


def optimal_dim_params(constants, d_guess: int, total: int):
    """(k_opt, N_opt) minimizing the dimension-estimate MSE model.

    constants = (C_b1, C_b2, C_v) from the bias/variance expansion
    MSE = (C_b1 (k/M)^(2/d) + C_b2 / k)^2 + C_v / N.  total is the sample
    budget N + M for one length statistic.  Zero constants fall back to the
    rate-matched bandwidth with a warning.
    """
    import warnings

    c_b1, c_b2, c_v = constants
    if total < 8:
        raise ValueError("total must be >= 8")
    d = d_guess
    if c_b1 == 0 or c_b2 == 0 or c_v < 0:
        warnings.warn("degenerate constants: rate-matched fallback", RuntimeWarning)
        M = max(2, int(0.7 * total))
        from .tuning import rate_matched_k

        return rate_matched_k(M, d), total - M
    k0 = (abs(c_b2) * d / (2.0 * abs(c_b1))) ** (d / (d + 2.0))
    b0 = abs(c_b1) * k0 ** (2.0 / d) + abs(c_b2) / k0
    n0 = math.sqrt(c_v * (2.0 + d)) / (2.0 * b0)
    expo = (6.0 + d) / (2.0 * (2.0 + d))
    # budget constraint N + M = total with N = n0 M^expo: the left side is
    # strictly increasing in M, so bisect for the root
    lo, hi = 2.0, float(total - 1)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if n0 * mid**expo + mid < total:
            lo = mid
        else:
            hi = mid
    M = int(round(0.5 * (lo + hi)))
    M = min(max(M, 2), total - 1)
    n_opt = min(max(int(n0 * M**expo), 1), total - M)
    k_opt = int(k0 * M ** (2.0 / (2.0 + d)))
    k_opt = min(max(k_opt, 3), M - 1)
    return k_opt, n_opt


def anomaly_scan(
    series: Dataset,
    window: int,
    stride: int,
    k1: int,
    k2: Optional[int] = None,
    gamma: float = 1.0,
    alpha_frac: float = 0.7,
    seed: int = 0,
):
    """Correlated-variant dimension estimate per sliding window.

    Returns a list of (window_start, DimensionEstimate or None); windows
    whose estimate fails (e.g. duplicate-dominated) are reported as None
    rather than aborting the scan.
    """
    k2 = 2 * k1 if k2 is None else k2
    if window < 8 * k2:
        raise ValueError("window must be at least 8 * k2")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    T = series.count
    if window > T:
        raise ValueError("window exceeds series length")
    out = []
    for start in range(0, T - window + 1, stride):
        chunk = Dataset(series.points[start : start + window])
        try:
            est = estimate_dimension(
                chunk, k1, k2, gamma=gamma, variant="correlated",
                alpha_frac=alpha_frac, seed=seed,
            )
        except ValueError:
            est = None
        out.append((start, est))
    return out
