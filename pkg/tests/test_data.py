import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knnfunc import (
    Dataset,
    beta_uniform_mixture_density,
    load_csv,
    sample_beta_uniform_mixture,
    sample_block_beta_mixture,
    sample_projected_manifold,
    split,
    true_functional,
    uniform_density,
)

import oracles


# -- load_csv ------------------------------------------------------------

def test_load_csv_basic(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("0.1,0.2\n0.1,0.2\n0.1,0.2\n")
    d = load_csv(p)
    assert d.count == 3 and d.dim == 2


def test_load_csv_malformed_cell_names_row(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("1,2,x\n")
    with pytest.raises(ValueError, match="row 1"):
        load_csv(p)


def test_load_csv_ragged_row(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("1,2\n1,2,3\n")
    with pytest.raises(ValueError, match="row 2"):
        load_csv(p)


def test_load_csv_empty(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("")
    with pytest.raises(ValueError, match="empty"):
        load_csv(p)


def test_load_csv_telemetry_shape(tmp_path):
    # 576 samples x 11 columns, the Abilene-shaped input
    rng = np.random.default_rng(0)
    rows = rng.random((576, 11))
    p = tmp_path / "telemetry.csv"
    p.write_text("\n".join(",".join(f"{v:.6f}" for v in r) for r in rows) + "\n")
    d = load_csv(p)
    assert d.count == 576 and d.dim == 11


def test_load_csv_header_and_crlf(tmp_path):
    p = tmp_path / "d.csv"
    p.write_bytes(b"colA,colB\r\n1.5,2.5\r\n3.5,4.5\r\n")
    d = load_csv(p, header=True)
    assert d.count == 2 and d.points[0, 1] == 2.5


def test_dataset_rejects_nonfinite():
    with pytest.raises(ValueError):
        Dataset(np.array([[1.0, np.inf]]))


# -- split ---------------------------------------------------------------

def test_split_paper_sizes():
    d = Dataset(np.zeros((10_000, 1)) + np.arange(10_000)[:, None])
    sp = split(d, 0.7, seed=1)
    assert sp.n_eval == 3000 and sp.n_ref == 7000


def test_split_smallest():
    d = Dataset(np.array([[0.0], [1.0]]))
    sp = split(d, 0.5, seed=9)
    assert sp.n_eval == 1 and sp.n_ref == 1


def test_split_deterministic():
    d = Dataset(np.arange(50, dtype=float)[:, None])
    a = split(d, 0.4, seed=123)
    b = split(d, 0.4, seed=123)
    assert np.array_equal(a.eval_indices, b.eval_indices)
    assert np.array_equal(a.ref_indices, b.ref_indices)
    c = split(d, 0.4, seed=124)
    assert not np.array_equal(a.ref_indices, c.ref_indices)


def test_split_validation():
    d = Dataset(np.arange(10, dtype=float)[:, None])
    with pytest.raises(ValueError):
        split(d, 0.0, seed=0)
    with pytest.raises(ValueError):
        split(d, 1.0, seed=0)
    with pytest.raises(ValueError):
        split(Dataset(np.array([[1.0]])), 0.5, seed=0)


@given(
    T=st.integers(min_value=2, max_value=400),
    alpha=st.floats(min_value=0.01, max_value=0.99),
    seed=st.integers(min_value=0, max_value=2**31),
)
@settings(max_examples=60, deadline=None)
def test_split_partition_property(T, alpha, seed):
    d = Dataset(np.arange(T, dtype=float)[:, None])
    sp = split(d, alpha, seed)
    merged = np.sort(np.concatenate([sp.eval_indices, sp.ref_indices]))
    assert np.array_equal(merged, np.arange(T))


# -- generators ----------------------------------------------------------

def test_mixture_eps_one_is_uniform():
    d = sample_beta_uniform_mixture(20_000, 2, 4, 4, 1.0, seed=5)
    se = 1.0 / math.sqrt(12 * 20_000)
    assert np.all(np.abs(d.points.mean(axis=0) - 0.5) < 4 * se)
    assert d.points.min() >= 0 and d.points.max() <= 1


def test_mixture_beta11_is_uniform_too():
    d = sample_beta_uniform_mixture(20_000, 2, 1, 1, 0.0, seed=6)
    se = 1.0 / math.sqrt(12 * 20_000)
    assert np.all(np.abs(d.points.mean(axis=0) - 0.5) < 4 * se)


def test_mixture_marginal_mean():
    a, b, T = 4.0, 2.0, 40_000
    d = sample_beta_uniform_mixture(T, 3, a, b, 0.0, seed=7)
    mean = a / (a + b)
    var = a * b / ((a + b) ** 2 * (a + b + 1))
    se = math.sqrt(var / T)
    assert np.all(np.abs(d.points.mean(axis=0) - mean) < 4 * se)


def test_mixture_validation():
    with pytest.raises(ValueError):
        sample_beta_uniform_mixture(10, 2, -1, 4, 0.2, 0)
    with pytest.raises(ValueError):
        sample_beta_uniform_mixture(10, 2, 4, 4, 1.5, 0)
    with pytest.raises(ValueError):
        sample_beta_uniform_mixture(0, 2, 4, 4, 0.2, 0)


def test_manifold_rank_one_line():
    d = sample_projected_manifold(200, 1, 2, seed=3)
    centered = d.points - d.points.mean(axis=0)
    # all points on a line: cross products of centered pairs vanish
    cross = centered[:, 0][:, None] * centered[:, 1][None, :] - centered[:, 1][:, None] * centered[:, 0][None, :]
    assert np.max(np.abs(cross)) < 1e-8


def test_manifold_preserves_distances():
    base_seed = 11
    d = sample_projected_manifold(300, 2, 5, seed=base_seed)
    # distances in the ambient space match a rank-2 representation exactly:
    # Gram matrix has (at most) 2 nonzero eigenvalues
    centered = d.points - d.points.mean(axis=0)
    svals = np.linalg.svd(centered, compute_uv=False)
    assert svals[2] < 1e-10 * svals[0]


def test_manifold_validation():
    with pytest.raises(ValueError):
        sample_projected_manifold(10, 3, 3, seed=0)


def test_block_mixture_shape_and_bounds():
    d = sample_block_beta_mixture(500, [1, 2, 3], seed=4)
    assert d.count == 500 and d.dim == 6
    assert d.points.min() > 0 and d.points.max() < 1


# -- analytic truths -----------------------------------------------------

def test_true_functional_uniform_shannon_zero():
    dens = uniform_density(3)
    val, se = true_functional(dens, "shannon", 50_000, seed=1)
    assert abs(val) <= max(3 * se, 1e-12)


def test_true_functional_uniform_renyi_one():
    dens = uniform_density(3)
    val, se = true_functional(dens, "renyi", 50_000, seed=2, alpha=0.5)
    assert abs(val - 1.0) <= max(3 * se, 1e-12)


def test_true_functional_mixture_vs_quadrature():
    dens = beta_uniform_mixture_density(3, 4, 4, 0.2)
    val, se = true_functional(dens, "shannon", 400_000, seed=3)
    assert abs(val - oracles.H_SHANNON_MIX) < 4 * se


def test_true_functional_validation():
    dens = uniform_density(2)
    with pytest.raises(ValueError):
        true_functional(dens, "shannon", 100, seed=0)
    with pytest.raises(ValueError):
        true_functional(dens, "renyi", 20_000, seed=0, alpha=1.0)


def test_mixture_pdf_integrates_to_one():
    dens = beta_uniform_mixture_density(2, 4, 4, 0.2)
    x = dens.sample(100_000, 12, "normcheck")
    # importance identity: E_f[1/f] = volume of support = 1
    vals = 1.0 / dens.pdf(x)
    assert abs(vals.mean() - 1.0) < 4 * vals.std() / math.sqrt(len(vals))


def test_oracles_selfcheck():
    got = oracles.recompute_mixture_truths(n=80)
    assert abs(got["H_shannon"] - oracles.H_SHANNON_MIX) < 1e-7
    assert abs(got["I_renyi05"] - oracles.I_RENYI05_MIX) < 1e-7
    assert abs(got["c1_shannon"] - oracles.C1_SHANNON_MIX) < 1e-4
    assert abs(got["c4_shannon"] - oracles.C4_SHANNON_MIX) < 1e-6
    assert abs(got["c1_renyi05"] - oracles.C1_RENYI05_MIX) < 1e-4
    blk = oracles.recompute_blockmix_truths(n=200)
    assert abs(blk["H1"] - oracles.H1_BLOCKMIX) < 1e-5
    assert abs(blk["H2"] - oracles.H2_BLOCKMIX) < 1e-5
