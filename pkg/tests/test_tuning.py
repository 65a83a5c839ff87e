import math

import numpy as np
import pytest

from knnfunc import (
    BoundaryConfig,
    beta_uniform_mixture_density,
    constants_empirical,
    constants_oracle,
    custom_functional,
    optimal_k,
    predict_bias_variance,
    rate_matched_k,
    renyi_functional,
    shannon_functional,
    split,
    uniform_density,
)
from knnfunc.inference import generate_dataset
from knnfunc.tuning import TheoryConstants, estimate_c3_boundary, hessian_weight

import oracles


def test_constants_oracle_uniform_shannon():
    dens = uniform_density(3)
    c = constants_oracle(dens, shannon_functional(), 120_000, seed=1)
    assert abs(c.c1) < 1e-6  # trace of a constant pdf's Hessian is 0
    assert abs(c.c2 - 0.5) < 1e-12  # f^2 g'' / 2 = 1/2 pointwise
    assert abs(c.c4) < 1e-12  # g(f) constant
    assert abs(c.c5) < 1e-12  # f g'(f) = -1 constant
    assert c.c3 == 0.0 and not c.c3_estimated


def test_constants_oracle_mixture_shannon_fixtures():
    dens = beta_uniform_mixture_density(3, 4, 4, 0.2)
    c = constants_oracle(dens, shannon_functional(), 300_000, seed=2)
    # MC standard errors at 3e5 draws: se(c1) ~ 0.010, se(c4) ~ 0.006
    assert abs(c.c1 - oracles.C1_SHANNON_MIX) < 0.05
    assert abs(c.c2 - oracles.C2_SHANNON_MIX) < 1e-12
    assert abs(c.c4 - oracles.C4_SHANNON_MIX) < 0.03
    assert c.c5 < 1e-12


def test_constants_oracle_mixture_renyi_fixtures():
    dens = beta_uniform_mixture_density(3, 4, 4, 0.2)
    c = constants_oracle(dens, renyi_functional(0.5), 300_000, seed=3)
    assert abs(c.c1 - oracles.C1_RENYI05_MIX) < 0.05
    assert abs(c.c2 - oracles.C2_RENYI05_MIX) < 0.005
    assert abs(c.c4 - oracles.C4_RENYI05_MIX) < 0.01
    # exact identity: c5 = (alpha-1)^2 c4 = c4/4 for alpha = 1/2
    assert abs(c.c5 - c.c4 / 4.0) < 1e-12


def test_constants_oracle_warns_small_mc():
    with pytest.warns(RuntimeWarning, match="noisy"):
        constants_oracle(uniform_density(2), shannon_functional(), 20_000, seed=0)


def test_hessian_weight_d3_value():
    # Gamma(2.5)^(2/3) / (10 pi)
    expected = math.gamma(2.5) ** (2.0 / 3.0) / (10.0 * math.pi)
    assert math.isclose(hessian_weight(3), expected, rel_tol=1e-14)


def test_constants_empirical_uniform_c4_shrinks():
    # true c4 is 0; the plug-in carries the estimator's own sampling noise
    # (var(log f_hat) ~ 1/k plus boundary spread), so k must be largish
    # and the detector live for the median to drop to 0.05 at T = 1e4
    cfg = BoundaryConfig(delta=0.9, lipschitz_L=0.0, eps0=1.0, pk_scale=0.02)
    vals = []
    for t in range(10):
        data = generate_dataset("uniform", 10_000, 100 + t, {"d": 3})
        sp = split(data, 0.7, 100 + t)
        c = constants_empirical(data, sp, shannon_functional(), 60,
                                boundary_correct=True, config=cfg)
        vals.append(c.c4)
    assert np.median(vals) <= 0.05
    assert c.c1 is None and c.c3 is None


def test_constants_empirical_constant_functional_zero_variance():
    data = generate_dataset("uniform", 2000, 5, {"d": 2})
    sp = split(data, 0.7, 5)
    f = custom_functional(
        g=lambda u, x=None: np.ones_like(u),
        g_prime=lambda u, x=None: np.zeros_like(u),
    )
    c = constants_empirical(data, sp, f, 10, boundary_correct=False)
    assert c.c4 == 0.0 and c.c5 == 0.0


def test_constants_empirical_mixture_c4_vs_oracle():
    vals = []
    for t in range(10):
        data = generate_dataset("beta_uniform_mixture", 10_000, 200 + t,
                                {"d": 3, "a": 4, "b": 4, "eps": 0.2})
        sp = split(data, 0.7, 200 + t)
        c = constants_empirical(data, sp, shannon_functional(), 35,
                                boundary_correct=False)
        vals.append(c.c4)
    med = float(np.median(vals))
    assert abs(med - oracles.C4_SHANNON_MIX) / oracles.C4_SHANNON_MIX < 0.25


def test_empirical_c4_equals_two_pass_variance():
    from knnfunc import build_index, knn_density

    data = generate_dataset("beta_uniform_mixture", 3000, 6,
                            {"d": 2, "a": 4, "b": 4, "eps": 0.2})
    sp = split(data, 0.7, 6)
    c = constants_empirical(data, sp, shannon_functional(), 10,
                            boundary_correct=False)
    dens = knn_density(build_index(sp.ref_points(data)), sp.eval_points(data), 10)
    g = -np.log(dens.values)
    mean = sum(g) / len(g)
    twopass = sum((v - mean) ** 2 for v in g) / (len(g) - 1)
    assert abs(c.c4 - twopass) < 1e-12


def test_optimal_k_mixture_fixture_value():
    # with the quadrature constants (normalized h), the Shannon mixture
    # recommendation at M = 7000 is k = 17 (c1 c2 < 0: bias zero crossing)
    k = optimal_k(oracles.C1_SHANNON_MIX, oracles.C2_SHANNON_MIX, 3, 7000)
    assert k == 17


def test_optimal_k_degenerate_and_unit_cases():
    with pytest.warns(RuntimeWarning, match="rate-matched"):
        assert optimal_k(0.0, 0.5, 3, 7000) == rate_matched_k(7000, 3)
    with pytest.warns(RuntimeWarning, match="clamping"):
        assert optimal_k(1.0, 0.0, 3, 7000) == 3
    # |c2| d / (2 |c0|) = 1 with matching signs: k0 = 1
    d, M = 3, 7000
    c2 = 0.5
    c0 = c2 * d / 2.0
    assert optimal_k(c0, c2, d, M) == round(M ** (2.0 / (2.0 + d)))


def test_optimal_k_matches_grid_scan():
    for c0, c2, d, M in [(-1.64, 0.5, 3, 7000), (0.75, 0.5, 3, 7000),
                         (-0.3, 0.4, 2, 5000), (2.0, 1.0, 4, 20000)]:
        k_formula = optimal_k(c0, c2, d, M)
        ks = np.arange(3, M + 1)
        bias = c0 * (ks / M) ** (2.0 / d) + c2 / ks
        k_grid = int(ks[np.argmin(np.abs(bias))])
        assert abs(k_formula - k_grid) <= 1, (c0, c2, d, M, k_formula, k_grid)


def test_rate_matched_values():
    assert rate_matched_k(7000, 3) == 35
    assert rate_matched_k(32, 2) == 6
    assert rate_matched_k(3, 5) == 3


def test_predict_bias_variance():
    c = TheoryConstants(c1=0.0, c2=0.5, c3=0.0, c4=1.0, c5=2.0, mode="oracle")
    bias, var = predict_bias_variance(c, k=10, N=100, M=200, d=3)
    assert math.isclose(bias, 0.05)
    assert math.isclose(var, 1.0 / 100 + 2.0 / 200)
    bias2, _ = predict_bias_variance(c, k=20, N=100, M=200, d=3)
    assert math.isclose(bias2, bias / 2)  # the c2 term halves exactly
    # variance monotone decreasing in N and M
    _, v_bigN = predict_bias_variance(c, 10, 200, 200, 3)
    _, v_bigM = predict_bias_variance(c, 10, 100, 400, 3)
    assert v_bigN < var and v_bigM < var
    empirical = TheoryConstants(c1=None, c2=0.5, c3=None, c4=1.0, c5=0.0,
                                mode="empirical")
    with pytest.raises(ValueError, match="c1"):
        predict_bias_variance(empirical, 10, 100, 200, 3)


def test_theory_constants_validation():
    with pytest.raises(ValueError):
        TheoryConstants(c1=0.0, c2=0.5, c3=0.0, c4=-1.0, c5=0.0, mode="oracle")


def test_estimate_c3_boundary_signs():
    cfg = BoundaryConfig(delta=0.9, lipschitz_L=0.0, eps0=1.0, pk_scale=0.3)
    # uniform density: gradients vanish, c3_hat should be near zero
    data_u = generate_dataset("uniform", 4000, 7, {"d": 2})
    sp_u = split(data_u, 0.7, 7)
    c3_u = estimate_c3_boundary(data_u, sp_u, shannon_functional(), 20, config=cfg)
    # mixture: density increases inward, g' < 0, offsets point outward:
    # the boundary term is negative and larger in magnitude
    data_m = generate_dataset("beta_uniform_mixture", 4000, 7,
                              {"d": 2, "a": 4, "b": 4, "eps": 0.2})
    sp_m = split(data_m, 0.7, 7)
    c3_m = estimate_c3_boundary(data_m, sp_m, shannon_functional(), 20, config=cfg)
    assert abs(c3_u) < 0.05
    assert np.isfinite(c3_m)
