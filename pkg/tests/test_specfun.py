import math

import mpmath
import numpy as np
import pytest
import scipy.special as sc
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose
from scipy.integrate import quad

from htkernels.specfun import (
    PoleError,
    abs_gamma,
    bateman_closed_form,
    bessel_j,
    gamma_fn,
    gegenbauer_closed_form,
    hyp2f1,
    hyp2f1_pfaff,
    hyp2f1_series,
    pochhammer,
    rgamma,
)


def test_gamma_trivial_values():
    assert gamma_fn(1.0) == pytest.approx(1.0, rel=1e-15)
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)


@given(st.floats(min_value=-20.0, max_value=170.0).filter(lambda x: abs(x - round(x)) > 1e-6 or x > 0.5))
@settings(max_examples=200, deadline=None)
def test_gamma_matches_scipy(x):
    assert_allclose(gamma_fn(x), sc.gamma(x), rtol=1e-12)


@pytest.mark.parametrize("x", [0.0, -1.0, -7.0])
def test_gamma_poles(x):
    with pytest.raises(PoleError):
        gamma_fn(x)
    assert rgamma(x) == 0.0


def test_gamma_overflow_and_log_mode():
    with pytest.raises(OverflowError):
        gamma_fn(200.0)
    assert gamma_fn(200.0, log_mode=True) == pytest.approx(math.lgamma(200.0), rel=1e-14)
    with pytest.raises(ValueError):
        gamma_fn(-0.5, log_mode=True)


def test_abs_gamma_and_pochhammer():
    assert abs_gamma(-0.5) == pytest.approx(2 * math.sqrt(math.pi), rel=1e-14)
    assert pochhammer(0.5, 3) == pytest.approx(0.5 * 1.5 * 2.5)


def test_bessel_trivial():
    assert bessel_j(0.0, 0.0) == 1.0
    assert bessel_j(0.5, math.pi / 2) == pytest.approx(2 / math.pi, rel=1e-14)


def test_bessel_poisson_representation():
    nu, x = 1.3, 2.0
    # J_nu(x) = (x/2)^nu / (sqrt(pi) Gamma(nu + 1/2)) int_0^pi cos(x cos t) sin^(2 nu) t dt
    integral, _ = quad(lambda t: math.cos(x * math.cos(t)) * math.sin(t) ** (2 * nu), 0, math.pi, epsabs=0, epsrel=1e-13)
    ref = (x / 2) ** nu / (math.sqrt(math.pi) * math.gamma(nu + 0.5)) * integral
    assert bessel_j(nu, x) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.3, 4.0, 11.7, 30.0])
def test_bessel_against_scipy_grid(nu):
    x = np.concatenate([np.linspace(0.0, 5.0, 41), np.linspace(5.01, 60.0, 90), np.linspace(60.0, 200.0, 60)])
    ours = bessel_j(nu, x)
    ref = sc.jv(nu, x)
    scale = np.maximum(np.abs(ref), 1e-3 / np.sqrt(np.maximum(x, 1.0)))
    assert np.max(np.abs(ours - ref) / scale) < 1e-10


def test_bessel_small_argument_limit():
    nu, x = 2.5, 1e-8
    assert bessel_j(nu, x) == pytest.approx((x / 2) ** nu / math.gamma(nu + 1), rel=1e-12)


def test_bessel_domain():
    with pytest.raises(ValueError):
        bessel_j(-1.0, 1.0)
    with pytest.raises(ValueError):
        bessel_j(1.0, -1.0)


def test_hyp2f1_trivial_and_one_f_zero():
    assert hyp2f1(0.7, 1.2, 2.1, 0.0) == 1.0
    # c = b collapses to 1F0(a; x) = (1 - x)^(-a)
    assert hyp2f1(2.3, 1.1, 1.1, -0.5) == pytest.approx(1.5 ** -2.3, rel=1e-13)


@given(
    a=st.floats(0.1, 3.0),
    b=st.floats(0.1, 3.0),
    c=st.floats(0.3, 4.0),
    x=st.floats(-30.0, 0.95),
)
@settings(max_examples=150, deadline=None)
def test_hyp2f1_matches_mpmath(a, b, c, x):
    ref = float(mpmath.hyp2f1(a, b, c, x))
    assert hyp2f1(a, b, c, x) == pytest.approx(ref, rel=1e-9, abs=1e-13)


def test_hyp2f1_series_and_pfaff_agree_on_negative_axis():
    x = np.linspace(-0.5, -0.01, 20)
    assert_allclose(hyp2f1_pfaff(1.3, 0.4, 2.2, x), hyp2f1_series(1.3, 0.4, 2.2, x), rtol=1e-13)


def test_hyp2f1_errors():
    with pytest.raises(ValueError):
        hyp2f1(1.0, 1.0, 2.0, 1.0)
    with pytest.raises(PoleError):
        hyp2f1(1.0, 1.0, -2.0, 0.1)


@pytest.mark.parametrize("nu,mu,alpha,beta", [(0.5, 1.5, 1.0, 1.0), (1.0, 2.0, 2.0, 0.5), (2.5, 1.2, 1.0, 2.0)])
def test_gegenbauer_closed_form_against_quadrature(nu, mu, alpha, beta):
    val, _ = quad(lambda t: t ** (mu - 1) * math.exp(-alpha * t) * sc.jv(nu, beta * t), 0, np.inf, epsabs=0, epsrel=1e-13, limit=400)
    assert gegenbauer_closed_form(nu, mu, alpha, beta) == pytest.approx(val, rel=1e-9)


@pytest.mark.parametrize("c,gam,alpha,beta,a", [(0.5, 1.5, 0.3, 0.7, -2.0), (1.5, 3.0, 1.25, 1.75, -0.4)])
def test_bateman_closed_form_against_quadrature(c, gam, alpha, beta, a):
    val, _ = quad(lambda y: y ** (c - 1) * (1 - y) ** (gam - c - 1) * sc.hyp2f1(alpha, beta, c, a * y), 0, 1, epsabs=0, epsrel=1e-13, limit=200)
    assert bateman_closed_form(c, gam, alpha, beta, a) == pytest.approx(val, rel=1e-9)
