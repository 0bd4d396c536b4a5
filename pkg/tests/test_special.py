import math

import numpy as np
import pytest
from scipy.integrate import quad

from vinefab.errors import ValidationError
from vinefab.special import (chi2_sf, f_sf, log_gamma, normal_cdf,
                             normal_range_cdf, regularized_incomplete_beta,
                             regularized_incomplete_gamma_p,
                             regularized_incomplete_gamma_q,
                             studentized_range_cdf, t_quantile,
                             t_sf_two_sided)

from oracles import mc_normal_range_cdf, mc_studentized_range_cdf


def test_log_gamma_exact_points():
    assert log_gamma(1.0) == 0.0
    assert log_gamma(2.0) == pytest.approx(0.0, abs=1e-15)
    assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), abs=1e-14)
    assert log_gamma(6.0) == pytest.approx(math.log(120.0), abs=1e-12)
    with pytest.raises(ValidationError):
        log_gamma(0.0)
    with pytest.raises(ValidationError):
        log_gamma(-1.5)


def test_incomplete_beta_identities():
    for x in np.linspace(0.0, 1.0, 21):
        assert regularized_incomplete_beta(1.0, 1.0, x) == pytest.approx(x, abs=1e-14)
    # closed form: I_x(1/2, 1/2) = (2/pi) asin(sqrt(x))
    for x in (0.1, 0.37, 0.5, 0.9):
        assert regularized_incomplete_beta(0.5, 0.5, x) == pytest.approx(
            2.0 / math.pi * math.asin(math.sqrt(x)), abs=1e-12)
    # symmetry
    rng = np.random.default_rng(59)
    for _ in range(200):
        a, b = rng.uniform(0.2, 50.0, 2)
        x = rng.uniform(0.0, 1.0)
        assert regularized_incomplete_beta(a, b, x) == pytest.approx(
            1.0 - regularized_incomplete_beta(b, a, 1.0 - x), abs=1e-12)


def test_incomplete_beta_against_quadrature():
    rng = np.random.default_rng(61)
    for _ in range(25):
        a, b = rng.uniform(0.5, 20.0, 2)
        x = rng.uniform(0.05, 0.95)
        norm = math.exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b))
        mine = regularized_incomplete_beta(a, b, x)
        # integrate whichever tail is smaller so the oracle keeps precision
        if mine <= 0.5:
            integral, _ = quad(lambda t: t ** (a - 1) * (1 - t) ** (b - 1),
                               0.0, x, epsabs=1e-14, epsrel=1e-12)
            assert mine == pytest.approx(integral / norm, abs=1e-10)
        else:
            integral, _ = quad(lambda t: t ** (a - 1) * (1 - t) ** (b - 1),
                               x, 1.0, epsabs=1e-14, epsrel=1e-12)
            assert 1.0 - mine == pytest.approx(integral / norm, abs=1e-10)


def test_incomplete_beta_domain():
    with pytest.raises(ValidationError):
        regularized_incomplete_beta(0.0, 1.0, 0.5)
    with pytest.raises(ValidationError):
        regularized_incomplete_beta(1.0, 1.0, 1.5)


def test_incomplete_gamma_identities():
    for x in (0.1, 0.7, 2.0, 9.0):
        assert regularized_incomplete_gamma_p(1.0, x) == pytest.approx(
            1.0 - math.exp(-x), abs=1e-13)
        assert regularized_incomplete_gamma_p(0.5, x) == pytest.approx(
            math.erf(math.sqrt(x)), abs=1e-13)
        assert regularized_incomplete_gamma_p(3.0, x) + \
            regularized_incomplete_gamma_q(3.0, x) == pytest.approx(1.0, abs=1e-13)
    assert regularized_incomplete_gamma_p(2.0, 0.0) == 0.0
    assert regularized_incomplete_gamma_q(2.0, 0.0) == 1.0


def test_tail_function_relations():
    rng = np.random.default_rng(67)
    for _ in range(50):
        t = rng.uniform(0.0, 5.0)
        df = rng.uniform(2.0, 60.0)
        # F(1, df) of t^2 equals the two-sided t tail
        assert f_sf(t * t, 1.0, df) == pytest.approx(t_sf_two_sided(t, df), abs=1e-12)
        z = rng.uniform(0.0, 4.0)
        # chi-square with 1 df of z^2 equals the two-sided normal tail
        assert chi2_sf(z * z, 1.0) == pytest.approx(2.0 * (1.0 - normal_cdf(z)),
                                                    abs=1e-12)


def test_t_quantile_inverts_cdf():
    rng = np.random.default_rng(71)
    for _ in range(50):
        p = rng.uniform(0.01, 0.99)
        df = rng.uniform(1.5, 80.0)
        t = t_quantile(p, df)
        cdf = 1.0 - 0.5 * t_sf_two_sided(abs(t), df)
        cdf = cdf if t >= 0 else 1.0 - cdf
        assert cdf == pytest.approx(p, abs=1e-10)
    assert t_quantile(0.5, 10.0) == 0.0
    assert t_quantile(0.975, 9.0) == pytest.approx(2.2621571628, abs=1e-6)
    assert t_quantile(0.025, 9.0) == pytest.approx(-2.2621571628, abs=1e-6)
    with pytest.raises(ValidationError):
        t_quantile(1.0, 10.0)


def test_normal_range_cdf_against_monte_carlo():
    for w, k in ((2.0, 3), (3.5, 5), (1.0, 2)):
        ref = mc_normal_range_cdf(w, k, 200_000, seed=91)
        assert normal_range_cdf(w, k) == pytest.approx(ref, abs=5e-3)
    assert normal_range_cdf(0.0, 3) == 0.0
    assert normal_range_cdf(50.0, 4) == pytest.approx(1.0, abs=1e-9)


def test_studentized_range_spot_value():
    # a classic 5% critical point: k = 3, df = 10, q = 3.88
    assert studentized_range_cdf(3.88, 3, 10) == pytest.approx(0.95, abs=2e-3)


def test_studentized_range_against_monte_carlo():
    qs = np.array([2.0, 3.0, 4.5])
    ref = mc_studentized_range_cdf(qs, 3, 10.0, 1_000_000, seed=97)
    for q, r in zip(qs, ref):
        assert studentized_range_cdf(q, 3, 10.0) == pytest.approx(r, abs=3e-3)


def test_studentized_range_domain():
    assert studentized_range_cdf(0.0, 3, 10.0) == 0.0
    assert studentized_range_cdf(-1.0, 3, 10.0) == 0.0
    with pytest.raises(ValidationError):
        studentized_range_cdf(2.0, 1, 10.0)
    with pytest.raises(ValidationError):
        studentized_range_cdf(2.0, 3, 0.0)


def test_probability_outputs_bounded():
    rng = np.random.default_rng(73)
    for _ in range(200):
        p = f_sf(rng.gamma(2.0), rng.uniform(1, 10), rng.uniform(2, 50))
        assert 0.0 <= p <= 1.0
        p = chi2_sf(rng.gamma(2.0) * 5, rng.uniform(1, 20))
        assert 0.0 <= p <= 1.0
