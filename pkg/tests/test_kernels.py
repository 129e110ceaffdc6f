import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from htkernels import kernels
from htkernels.group import GroupPoint, dilate, heisenberg, inverse, quaternionic
from htkernels.kernels import (
    SignedOrder,
    VerticalFiber,
    bg_kernel,
    composite_kernel,
    fiber_convolve,
    heat_fiber,
    heat_kernel,
    heat_kernel_dt,
    modified_fiber,
    modified_kernel,
    poisson_kernel_elliptic,
    poisson_kernel_parabolic,
    poisson_normalization,
    thick_kernel,
)

H1 = heisenberg(1)
QUAT = quaternionic()


def rand_point(G, rng, scale=1.0):
    return GroupPoint(scale * rng.normal(size=G.m), scale * rng.normal(size=G.k))


def scipy_heat_h1(zn, sn, t):
    # 2/(4 pi t)^2 * 2 int_0^inf cos(|sigma| lam / t) (lam / sinh lam) exp(-|z|^2/(4t) lam coth lam) d lam
    def f(lam):
        if lam == 0:
            return math.exp(-zn * zn / (4 * t))
        return lam / math.sinh(lam) * math.exp(-zn * zn / (4 * t) * lam / math.tanh(lam))

    if sn == 0:
        val, _ = quad(f, 0, 60, epsabs=0, epsrel=1e-12, limit=200)
    else:
        val, _ = quad(f, 0, 60, weight="cos", wvar=sn / t, epsabs=1e-13, epsrel=1e-12, limit=400)
    return 2 / (4 * math.pi * t) ** 2 * 2 * val


def scipy_heat_quat(zn, sn, t):
    # centre dimension 3: int_{R^3} e^{-i<w, lam>} f(|lam|) = 4 pi / rho int r sin(rho r) f(r) dr
    def f(lam):
        if lam == 0:
            return math.exp(-zn * zn / (4 * t))
        return (lam / math.sinh(lam)) ** 2 * math.exp(-zn * zn / (4 * t) * lam / math.tanh(lam))

    rho = sn / t
    val, _ = quad(lambda r: r * f(r), 0, 60, weight="sin", wvar=rho, epsabs=1e-15, epsrel=1e-12, limit=400)
    return 8 / (4 * math.pi * t) ** 5 * 4 * math.pi / rho * val


@pytest.mark.parametrize("mode", ["log_sinhc", "rcoth", "rcoth_minus_one"])
def test_elementary_functions_against_mpmath(mode):
    r = np.r_[0.0, np.geomspace(1e-8, 50, 80)]
    ours = getattr(kernels, mode)(r)
    with mpmath.workdps(40):
        ref = []
        for x in r:
            x = mpmath.mpf(float(x))
            if mode == "log_sinhc":
                ref.append(0.0 if x == 0 else float(mpmath.log(x / mpmath.sinh(x))))
            elif mode == "rcoth":
                ref.append(1.0 if x == 0 else float(x * mpmath.coth(x)))
            else:
                ref.append(0.0 if x == 0 else float(x * mpmath.coth(x) - 1))
    ref = np.array(ref)
    assert np.allclose(ours, ref, rtol=1e-13, atol=1e-300)


def test_heat_kernel_at_identity():
    assert heat_kernel(H1, H1.identity(), 1.0) == pytest.approx(1 / 16, rel=1e-12)
    assert heat_kernel(H1, H1.identity(), 2.0) == pytest.approx(1 / 64, rel=1e-12)


@pytest.mark.parametrize("zn,sn,t", [(0.5, 0.0, 1.0), (0.3, 0.7, 0.5), (1.5, 2.0, 2.0), (0.0, 1.0, 0.3)])
def test_heat_kernel_h1_against_scipy(zn, sn, t):
    ours = heat_kernel(H1, GroupPoint([zn, 0.0], [sn]), t)
    assert ours == pytest.approx(scipy_heat_h1(zn, sn, t), rel=1e-9)


@pytest.mark.parametrize("zn,sn,t", [(0.5, 0.2, 1.0), (1.2, 0.8, 0.7)])
def test_heat_kernel_quaternionic_against_scipy(zn, sn, t):
    ours = heat_kernel(QUAT, GroupPoint([zn, 0, 0, 0], [0, sn, 0]), t)
    assert ours == pytest.approx(scipy_heat_quat(zn, sn, t), rel=1e-8)


@pytest.mark.parametrize("G", [H1, QUAT], ids=["h1", "quat"])
def test_heat_kernel_homogeneity_and_symmetry(G):
    rng = np.random.default_rng(3)
    lam = 2.0
    for _ in range(5):
        g = rand_point(G, rng, 0.7)
        t = float(rng.uniform(0.3, 1.5))
        p = heat_kernel(G, g, t)
        assert heat_kernel(G, dilate(G, lam, g), lam * lam * t) == pytest.approx(lam ** -G.Q * p, rel=1e-10)
        assert heat_kernel(G, inverse(G, g), t) == pytest.approx(p, rel=1e-14)
        assert p > 0


def test_heat_kernel_time_derivative_matches_differences():
    g = GroupPoint([0.6, -0.2], [0.35])
    t, h = 0.8, 1e-4
    fd = (heat_kernel(H1, g, t + h) - heat_kernel(H1, g, t - h)) / (2 * h)
    assert heat_kernel_dt(H1, g, t) == pytest.approx(fd, rel=1e-7)


def test_modified_kernel_at_order_one_is_heat_kernel():
    rng = np.random.default_rng(4)
    for _ in range(20):
        g = rand_point(H1, rng)
        t = float(rng.uniform(0.2, 3.0))
        assert modified_kernel(H1, 1.0, g, t) == pytest.approx(heat_kernel(H1, g, t), rel=1e-12)


def test_modified_kernel_at_identity():
    integral, _ = quad(lambda r: (r / math.sinh(r)) ** 1.5 if r else 1.0, 0, 80, epsabs=0, epsrel=1e-13, limit=200)
    ref = 2 / (4 * math.pi) ** 2 * 2 * integral
    assert modified_kernel(H1, 0.5, H1.identity(), 1.0) == pytest.approx(ref, rel=1e-11)


def test_thick_kernel_reduces_to_modified_at_y_zero():
    g = GroupPoint([0.4, 0.1], [0.2])
    s, t = 0.4, 0.9
    thick = thick_kernel(H1, s, g, t, 0.0)
    assert thick == pytest.approx((4 * math.pi * t) ** -(1 - s) * modified_kernel(H1, s, g, t), rel=1e-13)


def test_thick_kernel_depends_on_z_and_y_through_sum_of_squares():
    s, t = -0.3, 0.7
    a = thick_kernel(H1, s, GroupPoint([0.6, 0.0], [0.3]), t, 0.8)
    b = thick_kernel(H1, s, GroupPoint([0.0, 0.8], [0.3]), t, 0.6)
    assert a == pytest.approx(b, rel=1e-13)


def test_bg_kernel_reduces_to_heat_kernel_on_h1():
    # with pole at the origin the Baouendi-Grushin kernel in n = 2 is the H1 heat kernel
    w, sg = np.array([0.3, -0.5]), np.array([0.4])
    val = bg_kernel(2, 1, w, sg, np.zeros(2), np.zeros(1), 0.9)
    assert val == pytest.approx(heat_kernel(H1, GroupPoint(w, sg), 0.9), rel=1e-12)


@given(
    w=st.lists(st.floats(-1, 1), min_size=3, max_size=3),
    w2=st.lists(st.floats(-1, 1), min_size=3, max_size=3),
    s1=st.floats(-1, 1),
    s2=st.floats(-1, 1),
)
@settings(max_examples=20, deadline=None)
def test_bg_kernel_pole_symmetry(w, w2, s1, s2):
    a = bg_kernel(3, 1, w, [s1], w2, [s2], 0.8)
    b = bg_kernel(3, 1, w2, [s2], w, [s1], 0.8)
    assert a == pytest.approx(b, rel=1e-13, abs=1e-300)


def test_fiber_convolution_semigroup():
    rng = np.random.default_rng(5)
    for _ in range(5):
        zn, sn = rng.uniform(0, 1.5, size=2)
        t1, t2 = rng.uniform(0.2, 1.2, size=2)
        conv = fiber_convolve(heat_fiber(2, 1, t1), heat_fiber(2, 1, t2), zn, sn)
        direct = heat_fiber(2, 1, t1 + t2).evaluate(zn, sn).value
        assert conv == pytest.approx(direct, rel=1e-9)


def test_fiber_convolution_approximate_identity():
    f2 = modified_fiber(2, 1, -0.5, 1.0)
    point_mass = modified_fiber(2, 1, 0.5, 1e-5)
    assert fiber_convolve(point_mass, f2, 0.7, 0.3) == pytest.approx(f2.evaluate(0.7, 0.3).value, rel=1e-4)


def test_fiber_convolution_errors():
    with pytest.raises(ValueError):
        fiber_convolve(heat_fiber(2, 1, 1.0), heat_fiber(4, 3, 1.0), 0.1, 0.1)
    thick = kernels.thick_fiber(2, 1, 0.5, 1.0, 0.3)
    with pytest.raises(ValueError):
        fiber_convolve(thick, heat_fiber(2, 1, 1.0), 0.1, 0.1)


def test_composite_kernel_matches_fiber_convolution():
    s, tau, t = 0.5, 0.4, 0.9
    g = GroupPoint([0.5, 0.2], [0.3])
    direct = fiber_convolve(modified_fiber(2, 1, -s, tau), modified_fiber(2, 1, s, t), g.z_norm, g.sigma_norm)
    assert composite_kernel(H1, s, g, tau, t) == pytest.approx(direct, rel=1e-12)
    with pytest.raises(ValueError):
        composite_kernel(H1, s, g, 1e-8, t)
    with pytest.raises(ValueError):
        composite_kernel(H1, -s, g, tau, t)


@pytest.mark.parametrize("bad", [0.0, 1.5, -1.0])
def test_signed_order_domain(bad):
    with pytest.raises(ValueError):
        SignedOrder(bad)
    assert float(SignedOrder(-0.5)) == -0.5


def test_fiber_validation():
    with pytest.raises(ValueError):
        VerticalFiber(0.0, 1.0, 1.0, 2, 1)
    with pytest.raises(ValueError, match="t must be positive"):
        heat_kernel(H1, H1.identity(), -1.0)
    with pytest.raises(ValueError):
        heat_kernel(H1, GroupPoint([0.0, 0.0, 0.0], [0.0]), 1.0)


def test_poisson_normalizations():
    s = 0.5
    assert poisson_normalization(s) == pytest.approx(poisson_normalization(s, "gamma_one_minus_s"))
    assert poisson_normalization(0.3) == pytest.approx(4 * math.pi**1.3 / math.gamma(0.3))
    with pytest.raises(ValueError):
        poisson_normalization(0.3, "other")


def test_poisson_parabolic_structure():
    g = GroupPoint([0.4, 0.2], [0.1])
    s, t, y = 0.3, 0.8, 0.6
    expected = (
        4 * math.pi**1.3 / math.gamma(0.3) * y**0.6 * (4 * math.pi * t) ** -1.3
        * math.exp(-y * y / (4 * t)) * heat_kernel(H1, g, t)
    )
    assert poisson_kernel_parabolic(H1, s, g, t, y) == pytest.approx(expected, rel=1e-13)
    with pytest.raises(ValueError):
        poisson_kernel_parabolic(H1, 1.0, g, t, y)


def test_conformal_poisson_closed_form_against_time_integral():
    g = GroupPoint([0.5, 0.1], [0.2])
    closed = poisson_kernel_elliptic(H1, 0.5, g, 0.7, variant="conformal")
    integral = poisson_kernel_elliptic(H1, 0.5, g, 0.7, variant="conformal", method="direct_integral")
    assert closed == pytest.approx(integral, rel=1e-8)
