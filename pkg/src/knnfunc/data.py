"""Datasets, deterministic splits, synthetic generators and analytic truths.

Everything downstream consumes a ``Dataset`` (a T x d matrix of finite
reals) plus a ``SampleSplit`` that partitions its rows into N evaluation
points and M density-reference points.  The generators here reproduce the
synthetic densities used by the estimation experiments: a Beta/uniform
mixture on the unit cube, the same mixture embedded in a higher-dimensional
ambient space, and block-dependent Beta mixtures for the factor-graph
comparisons.
"""

from dataclasses import dataclass, field

import numpy as np

from .rng import make_rng

__all__ = [
    "Dataset",
    "SampleSplit",
    "AnalyticDensity",
    "load_csv",
    "split",
    "sample_beta_uniform_mixture",
    "sample_projected_manifold",
    "sample_block_beta_mixture",
    "beta_uniform_mixture_density",
    "uniform_density",
    "true_functional",
]


@dataclass(frozen=True)
class Dataset:
    """Immutable T x d sample matrix.

    Invariants enforced at construction: 2-d float array, at least one row
    and one column, every entry finite.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"points must be a T x d matrix, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain non-finite entries")
        pts = np.ascontiguousarray(pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class SampleSplit:
    """Disjoint row-index sets: N evaluation points, M reference points."""

    eval_indices: np.ndarray
    ref_indices: np.ndarray
    seed: int

    def __post_init__(self):
        ev = np.asarray(self.eval_indices, dtype=np.intp)
        rf = np.asarray(self.ref_indices, dtype=np.intp)
        if ev.size < 1 or rf.size < 1:
            raise ValueError("both split parts must be nonempty")
        if np.intersect1d(ev, rf).size:
            raise ValueError("eval and reference indices overlap")
        ev.setflags(write=False)
        rf.setflags(write=False)
        object.__setattr__(self, "eval_indices", ev)
        object.__setattr__(self, "ref_indices", rf)

    @property
    def n_eval(self) -> int:
        return self.eval_indices.size

    @property
    def n_ref(self) -> int:
        return self.ref_indices.size

    def eval_points(self, data: Dataset) -> np.ndarray:
        return data.points[self.eval_indices]

    def ref_points(self, data: Dataset) -> np.ndarray:
        return data.points[self.ref_indices]


def load_csv(path, header: bool = False) -> Dataset:
    """Parse a headerless CSV of reals into a Dataset.

    Raises ValueError naming the 1-based row for ragged rows, non-numeric
    cells, or an empty file.  UTF-8, LF or CRLF, '.' decimal separator.
    """
    rows = []
    width = None
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            if header and lineno == 1:
                continue
            line = line.strip("\r\n")
            if not line:
                continue
            cells = line.split(",")
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise ValueError(
                    f"row {lineno}: expected {width} columns, got {len(cells)}"
                )
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                raise ValueError(f"row {lineno}: non-numeric cell") from None
    if not rows:
        raise ValueError("empty input file")
    return Dataset(np.array(rows, dtype=np.float64))


def split(data: Dataset, alpha_frac: float, seed: int) -> SampleSplit:
    """Uniform random partition into M = round(alpha_frac*T) reference rows
    and N = T - M evaluation rows.

    Deterministic for fixed (row order, alpha_frac, seed): indices are a
    Fisher-Yates shuffle on a Philox stream, reference part first.
    """
    T = data.count
    if T < 2:
        raise ValueError("need at least 2 rows to split")
    if not 0.0 < alpha_frac < 1.0:
        raise ValueError("alpha_frac must lie in (0, 1)")
    M = int(round(alpha_frac * T))
    M = min(max(M, 1), T - 1)
    rng = make_rng(seed, "split", T, format(alpha_frac, ".17g"))
    perm = rng.permutation(T)
    return SampleSplit(eval_indices=perm[M:], ref_indices=perm[:M], seed=seed)


def sample_beta_uniform_mixture(
    count: int, dim: int, a: float, b: float, eps: float, seed: int
) -> Dataset:
    """i.i.d. draws from (1-eps)*prod Beta(a,b) + eps*Uniform on [0,1]^dim."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if a <= 0 or b <= 0:
        raise ValueError("Beta shapes must be positive")
    if not 0.0 <= eps <= 1.0:
        raise ValueError("mixture weight must lie in [0, 1]")
    rng = make_rng(seed, "beta-uniform", count, dim)
    use_uniform = rng.random(count) < eps
    beta_part = rng.beta(a, b, size=(count, dim))
    unif_part = rng.random((count, dim))
    return Dataset(np.where(use_uniform[:, None], unif_part, beta_part))


def sample_projected_manifold(
    count: int, intrinsic_dim: int, ambient_dim: int, seed: int
) -> Dataset:
    """Low-dimensional Beta(2,2)/uniform mixture embedded isometrically.

    Draws from 0.8*Beta(2,2)^(x)intrinsic_dim + 0.2*Uniform, then multiplies
    by a random ambient_dim x intrinsic_dim matrix with orthonormal columns,
    so pairwise distances are preserved exactly.
    """
    if intrinsic_dim >= ambient_dim:
        raise ValueError("intrinsic_dim must be < ambient_dim")
    base = sample_beta_uniform_mixture(count, intrinsic_dim, 2.0, 2.0, 0.2, seed)
    rng = make_rng(seed, "manifold-basis", intrinsic_dim, ambient_dim)
    gauss = rng.normal(size=(ambient_dim, intrinsic_dim))
    u, _ = np.linalg.qr(gauss)
    return Dataset(base.points @ u.T)


def sample_block_beta_mixture(
    count: int,
    block_sizes,
    seed: int,
    a1: float = 5.0,
    b1: float = 2.0,
    a2: float = 2.0,
    b2: float = 5.0,
    weight: float = 0.5,
) -> Dataset:
    """Blockwise-dependent Beta mixture for factor-graph experiments.

    Each block of columns draws a shared component label per sample, then
    fills its coordinates i.i.d. from Beta(a1,b1) or Beta(a2,b2).  Columns
    in different blocks are independent; columns within a multi-column
    block are dependent through the shared label.
    """
    rng = make_rng(seed, "block-beta", count, tuple(block_sizes))
    cols = []
    for j, m in enumerate(block_sizes):
        pick_first = rng.random(count) < weight
        first = rng.beta(a1, b1, size=(count, m))
        second = rng.beta(a2, b2, size=(count, m))
        cols.append(np.where(pick_first[:, None], first, second))
    return Dataset(np.hstack(cols))


@dataclass(frozen=True)
class AnalyticDensity:
    """A density on [0,1]^dim with an evaluable pdf and an exact sampler.

    ``pdf`` maps an (n, dim) array to n density values; ``sampler`` maps
    (n, rng) to an (n, dim) array of draws.  Used by the Monte Carlo truth
    oracle and by the theory-constant estimators.
    """

    dim: int
    pdf: callable
    sampler: callable
    params: dict = field(default_factory=dict)

    def sample(self, n: int, seed: int, *tags) -> np.ndarray:
        return self.sampler(n, make_rng(seed, "analytic-density", *tags))


def _beta_pdf_1d(x, a, b):
    from math import lgamma

    lognorm = lgamma(a + b) - lgamma(a) - lgamma(b)
    with np.errstate(divide="ignore"):
        out = np.exp(lognorm) * x ** (a - 1) * (1 - x) ** (b - 1)
    return out


def beta_uniform_mixture_density(
    dim: int, a: float, b: float, eps: float
) -> AnalyticDensity:
    """Analytic form of the density drawn by sample_beta_uniform_mixture."""

    def pdf(x):
        x = np.asarray(x, dtype=np.float64)
        return (1 - eps) * np.prod(_beta_pdf_1d(x, a, b), axis=-1) + eps

    def sampler(n, rng):
        use_uniform = rng.random(n) < eps
        return np.where(
            use_uniform[:, None], rng.random((n, dim)), rng.beta(a, b, size=(n, dim))
        )

    return AnalyticDensity(
        dim=dim, pdf=pdf, sampler=sampler, params={"a": a, "b": b, "eps": eps}
    )


def uniform_density(dim: int) -> AnalyticDensity:
    def pdf(x):
        x = np.asarray(x, dtype=np.float64)
        return np.ones(x.shape[:-1])

    def sampler(n, rng):
        return rng.random((n, dim))

    return AnalyticDensity(dim=dim, pdf=pdf, sampler=sampler, params={})


def true_functional(
    density: AnalyticDensity, functional_id: str, n_mc: int, seed: int, alpha=None
):
    """Monte Carlo truth for E[g(f(X))] under the analytic density.

    functional_id is "shannon" (g = -log u) or "renyi" (g = u^(alpha-1),
    the Renyi integral, not the entropy).  Returns (estimate, standard
    error) from n_mc draws.
    """
    if n_mc < 10_000:
        raise ValueError("n_mc must be at least 10^4")
    x = density.sample(n_mc, seed, "truth", functional_id)
    f = density.pdf(x)
    if functional_id == "shannon":
        vals = -np.log(f)
    elif functional_id == "renyi":
        if alpha is None or alpha == 1.0:
            raise ValueError("renyi requires alpha != 1")
        vals = f ** (alpha - 1.0)
    else:
        raise ValueError(f"unknown functional_id {functional_id!r}")
    return float(np.mean(vals)), float(np.std(vals, ddof=1) / np.sqrt(n_mc))
