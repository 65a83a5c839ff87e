"""Support-boundary detection on the evaluation sample.

Points whose k-NN neighborhoods overspill the support boundary have
deficient reverse-neighbor counts in a K-NN graph built on the evaluation
points alone (K = floor(k*N/M), matching the graph scale to the density
estimator's).  A point is labeled boundary when its count falls below
(1 - q(K,N))*K; every boundary point is mapped to its nearest interior
point so the density layer can extrapolate.

The threshold ``q`` has two parts: a Lipschitz/density term
(L/eps0)*(K/(c_d*N*eps0))^(1/d) and a concentration term
pk_scale*2*sqrt(6)/k^(delta/2).  With pk_scale = 1 the concentration term
exceeds 1 for every k < 25 or so, which makes the detector label
everything interior at small k; pk_scale < 1 trades that guarantee for a
detector that actually fires at practical sample sizes.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .knn import build_index, count_reverse_neighbors, knn_query, knn_radii, unit_ball_volume

__all__ = ["BoundaryConfig", "BoundaryLabels", "q_threshold", "p_k", "detect_boundary"]

Auto = Union[float, str]


@dataclass(frozen=True)
class BoundaryConfig:
    """Detector tuning.

    delta: exponent in the concentration term, must lie in (2/3, 1).
    lipschitz_L, eps0: Lipschitz constant and density lower bound of the
        underlying density, or "auto" to estimate both from the evaluation
        sample (see resolve_auto).
    pk_scale: multiplier on the 2*sqrt(6)/k^(delta/2) concentration term;
        1.0 is the literal threshold, smaller values make detection fire
        at moderate k.
    """

    delta: float = 0.8
    lipschitz_L: Auto = "auto"
    eps0: Auto = "auto"
    pk_scale: float = 1.0

    def __post_init__(self):
        if not (2.0 / 3.0 < self.delta < 1.0):
            raise ValueError("delta must lie in (2/3, 1)")
        if self.pk_scale < 0:
            raise ValueError("pk_scale must be nonnegative")
        for name in ("lipschitz_L", "eps0"):
            v = getattr(self, name)
            if isinstance(v, str):
                if v != "auto":
                    raise ValueError(f"{name} must be a positive real or 'auto'")
            elif v < 0:
                raise ValueError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class BoundaryLabels:
    """Interior/boundary partition of the N evaluation points.

    nearest_interior maps each boundary index to the interior index whose
    point is closest (ties by index).  threshold_used is (1-q)*K.
    """

    interior: np.ndarray
    boundary: np.ndarray
    nearest_interior: dict
    threshold_used: float
    K_used: int
    q_used: float

    @property
    def n_interior(self) -> int:
        return self.interior.size

    @property
    def n_boundary(self) -> int:
        return self.boundary.size


def p_k(k: int, delta: float) -> float:
    """Concentration half-width sqrt(6)/k^(delta/2)."""
    return math.sqrt(6.0) / k ** (delta / 2.0)


def _resolve_auto(eval_points, K, config):
    """Estimate (L, eps0) from the evaluation sample when set to "auto".

    eps0: 10th percentile of standard K-NN density estimates computed
    within the evaluation set (self excluded).  L: 95th percentile of
    |f_i - f_j| / ||X_i - X_j|| over the K-NN graph edges.
    """
    N, d = eval_points.shape
    need_l = config.lipschitz_L == "auto"
    need_e = config.eps0 == "auto"
    if not (need_l or need_e):
        return float(config.lipschitz_L), float(config.eps0)
    kk = min(K + 1, N)
    index = build_index(eval_points)
    res = knn_query(index, eval_points, kk)
    radii = res.distances[:, -1]
    radii = np.maximum(radii, 1e-300)
    cd = unit_ball_volume(d)
    dens = max(kk - 1, 1) / ((N - 1) * cd * radii**d)
    eps0 = float(config.eps0) if not need_e else float(np.percentile(dens, 10.0))
    if need_l:
        nbr = res.indices[:, 1:]
        dst = np.maximum(res.distances[:, 1:], 1e-300)
        ratios = np.abs(dens[nbr] - dens[:, None]) / dst
        L = float(np.percentile(ratios, 95.0))
    else:
        L = float(config.lipschitz_L)
    return L, eps0


def q_threshold(K: int, N: int, k: int, d: int, config: BoundaryConfig,
                lipschitz_L: Optional[float] = None, eps0: Optional[float] = None) -> float:
    """q(K,N) = (L/eps0)*(K/(c_d*N*eps0))^(1/d) + pk_scale*2*sqrt(6)/k^(delta/2).

    Resolved L and eps0 must be supplied when the config says "auto"
    (detect_boundary does this).  Emits a warning when q >= 1, in which
    case the threshold degenerates and everything is labeled interior.
    """
    L = config.lipschitz_L if lipschitz_L is None else lipschitz_L
    e0 = config.eps0 if eps0 is None else eps0
    if isinstance(L, str) or isinstance(e0, str):
        raise ValueError("auto constants must be resolved before q_threshold")
    if e0 <= 0:
        raise ValueError("eps0 must be positive")
    cd = unit_ball_volume(d)
    q = (L / e0) * (K / (cd * N * e0)) ** (1.0 / d)
    q += config.pk_scale * 2.0 * p_k(k, config.delta)
    if q >= 1.0:
        warnings.warn(
            f"q(K,N) = {q:.3f} >= 1: boundary threshold degenerates, "
            "all points will be labeled interior",
            RuntimeWarning,
            stacklevel=2,
        )
    return q


def detect_boundary(eval_points, k: int, M: int, config: BoundaryConfig = BoundaryConfig()) -> BoundaryLabels:
    """Label evaluation points interior/boundary via reverse K-NN counts.

    K = max(1, floor(k*N/M)).  Raises if every point ends up boundary (no
    interior source for extrapolation) or if the inputs are degenerate
    (all points identical).
    """
    eval_points = np.asarray(eval_points, dtype=np.float64)
    N, d = eval_points.shape
    if N < 2:
        raise ValueError("need at least 2 evaluation points")
    if k < 3:
        raise ValueError("k must be >= 3")
    K = max(1, int(k * N / M))
    if K >= N:
        raise ValueError(f"K={K} must be < N={N}; adjust k or the split")
    if np.allclose(eval_points, eval_points[0]):
        raise ValueError("all evaluation points identical; k-NN radii are zero")
    L, e0 = _resolve_auto(eval_points, K, config)
    q = q_threshold(K, N, k, d, config, lipschitz_L=L, eps0=e0)
    counts = count_reverse_neighbors(eval_points, K)
    threshold = (1.0 - q) * K
    interior_mask = counts >= threshold
    interior = np.where(interior_mask)[0]
    boundary = np.where(~interior_mask)[0]
    if interior.size == 0:
        raise ValueError("no interior points; increase T or adjust config")
    nearest = {}
    if boundary.size:
        idx = build_index(eval_points[interior])
        res = knn_query(idx, eval_points[boundary], 1)
        picks = np.atleast_2d(res.indices)[:, 0]
        for b, p in zip(boundary, picks):
            nearest[int(b)] = int(interior[p])
    return BoundaryLabels(
        interior=interior,
        boundary=boundary,
        nearest_interior=nearest,
        threshold_used=float(threshold),
        K_used=K,
        q_used=float(q),
    )
