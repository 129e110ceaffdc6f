"""Real special functions: gamma, Bessel J of real order, Gauss 2F1.

Everything here is written from scratch in double precision so that the
kernel code does not depend on an external special-function library.
The test-suite compares against independent references.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "PoleError",
    "gamma_fn",
    "rgamma",
    "abs_gamma",
    "bessel_j",
    "hyp2f1",
    "hyp2f1_series",
    "hyp2f1_pfaff",
    "pochhammer",
    "gegenbauer_closed_form",
    "bateman_closed_form",
]


class PoleError(ValueError):
    """Raised when a function is evaluated at one of its poles."""


# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_GAMMA_OVERFLOW = 171.62


def _lanczos_sum(x: float) -> float:
    # x is the shifted argument (Gamma(x + 1) form)
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (x + i)
    return acc


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def _sin_pi(x: float) -> float:
    # sin(pi x) with exact argument reduction; odd symmetry keeps small
    # negative arguments exact
    if x < 0:
        return -_sin_pi(-x)
    r = math.fmod(x, 2.0)
    if r == 0.0 or r == 1.0:
        return 0.0
    if r > 1.0:
        return -_sin_pi(r - 1.0)
    if r > 0.5:
        r = 1.0 - r
    return math.sin(math.pi * r)


def _gamma_positive(x: float) -> float:
    if x >= 10.0:
        return _gamma_stirling(x)
    xm = x - 1.0
    t = xm + _LANCZOS_G + 0.5
    # split the power to avoid overflow near the top of the range
    half = t ** (0.5 * (xm + 0.5))
    return _SQRT_2PI * half * (half * math.exp(-t)) * _lanczos_sum(xm)


_STIRLING = (1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680, 1.0 / 1188, -691.0 / 360360)


def _stirling_correction(x: float) -> float:
    inv2 = 1.0 / (x * x)
    acc = 0.0
    for c in reversed(_STIRLING):
        acc = acc * inv2 + c
    return acc / x


def _gamma_stirling(x: float) -> float:
    # x^(x - 1/2) e^(-x) sqrt(2 pi) exp(correction); power split against overflow
    half = x ** (0.5 * (x - 0.5))
    return _SQRT_2PI * half * (half * math.exp(-x)) * math.exp(_stirling_correction(x))


def _lgamma_positive(x: float) -> float:
    if x >= 10.0:
        return 0.5 * math.log(2.0 * math.pi) + (x - 0.5) * math.log(x) - x + _stirling_correction(x)
    if x < 0.5:
        return _lgamma_positive(x + 1.0) - math.log(x)
    xm = x - 1.0
    t = xm + _LANCZOS_G + 0.5
    return 0.5 * math.log(2.0 * math.pi) + (xm + 0.5) * math.log(t) - t + math.log(_lanczos_sum(xm))


def gamma_fn(x: float, log_mode: bool = False) -> float:
    """Euler gamma function, or its logarithm when ``log_mode`` is set.

    Plain mode accepts any real argument except the poles 0, -1, -2, ...
    and raises ``OverflowError`` above ~171.6. Log mode requires ``x > 0``.
    """
    x = float(x)
    if log_mode:
        if not x > 0.0:
            raise ValueError("log-gamma requires x > 0")
        return _lgamma_positive(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma has a pole at x = {x:g}")
    if x > _GAMMA_OVERFLOW:
        raise OverflowError("gamma overflows for x > 171.6")
    if x < 0.5:
        # reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        return math.pi / (_sin_pi(x) * _gamma_positive(1.0 - x))
    return _gamma_positive(x)


def rgamma(x: float) -> float:
    """Reciprocal gamma, zero at the poles."""
    if _is_nonpositive_integer(float(x)):
        return 0.0
    return 1.0 / gamma_fn(x)


def abs_gamma(x: float) -> float:
    """|Gamma(x)|, used for the negative-order constants."""
    return abs(gamma_fn(x))


def pochhammer(a: float, n: int) -> float:
    """Rising factorial (a)_n."""
    out = 1.0
    for j in range(n):
        out *= a + j
    return out


# ---------------------------------------------------------------------------
# Bessel J
# ---------------------------------------------------------------------------

_BESSEL_SERIES_MAX_X = 5.0


def _bessel_series(nu: float, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    pos = x > 0
    if not np.any(pos):
        out[~pos] = 1.0 if nu == 0 else 0.0
        return out
    xp = x[pos]
    half = 0.5 * xp
    term = np.exp(nu * np.log(half) - _lgamma_positive(nu + 1.0))
    total = term.copy()
    q = -(half * half)
    for j in range(1, 400):
        term = term * q / (j * (j + nu))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    out[pos] = total
    out[~pos] = 1.0 if nu == 0 else 0.0
    return out


def _bessel_hankel(nu: float, x: np.ndarray) -> np.ndarray:
    mu = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    prev = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 80):
        new = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        mag = np.abs(new)
        # asymptotic series: stop at the smallest term
        active &= (mag < prev) & (mag > 1e-17 * np.abs(p))
        if not np.any(active):
            break
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            q = np.where(active, q + sign * new, q)
        else:
            p = np.where(active, p + sign * new, p)
        prev = np.where(active, mag, prev)
        term = new
    chi = x - (0.5 * nu + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _bessel_miller(nu: float, x: np.ndarray) -> np.ndarray:
    """Miller's backward recurrence with Neumann-sum normalisation.

    Uses sum_k c_k J_{b+2k}(x) = (x/2)^b with c_0 = Gamma(b+1) and
    c_k = (b+2k) Gamma(b+k) / k!, where b is the fractional part of nu.
    """
    base = nu - math.floor(nu)
    top = int(math.floor(nu))
    n_start = int(math.ceil(max(float(np.max(x)), nu))) + 60
    n_start += n_start % 2
    # g_k = Gamma(b + k) / k!, built upward so c_k is available on the way down
    kmax = n_start // 2
    if base == 0.0:
        # integer order: J_0 + 2 (J_2 + J_4 + ...) = 1
        coef = np.full(kmax + 1, 2.0)
    else:
        g = np.empty(kmax + 1)
        g[0] = gamma_fn(base)
        for k in range(kmax):
            g[k + 1] = g[k] * (base + k) / (k + 1.0)
        coef = (base + 2.0 * np.arange(kmax + 1)) * g
    coef[0] = gamma_fn(base + 1.0)
    f_next = np.zeros_like(x)
    f_cur = np.ones_like(x)
    f_top = np.zeros_like(x)
    acc = np.zeros_like(x)
    for n in range(n_start, -1, -1):
        # f_cur holds the unnormalised order base + n
        if n == top:
            f_top = f_cur.copy()
        if n % 2 == 0:
            acc += coef[n // 2] * f_cur
        if n == 0:
            break
        f_prev = (2.0 * (base + n) / x) * f_cur - f_next
        f_next, f_cur = f_cur, f_prev
        big = np.abs(f_cur) > 1e200
        if np.any(big):
            scale = np.where(big, 1e-200, 1.0)
            f_cur = f_cur * scale
            f_next = f_next * scale
            f_top = f_top * scale
            acc = acc * scale
    return f_top * (0.5 * x) ** base / acc


def bessel_j(nu: float, x):
    """Bessel function of the first kind J_nu(x) for nu >= 0, x >= 0.

    Power series for small arguments, Hankel's asymptotic expansion for
    large ones, and Miller's backward recurrence in between.
    """
    nu = float(nu)
    if nu < 0:
        raise ValueError("bessel_j requires nu >= 0")
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    xa = np.atleast_1d(arr).astype(float)
    if np.any(xa < 0):
        raise ValueError("bessel_j requires x >= 0")
    out = np.empty_like(xa)
    small = xa <= _BESSEL_SERIES_MAX_X
    if np.any(small):
        out[small] = _bessel_series(nu, xa[small])
    direct = (~small) & (xa >= 20.0 + 0.5 * nu * nu)
    if np.any(direct):
        out[direct] = _bessel_hankel(nu, xa[direct])
    middle = ~(small | direct)
    if np.any(middle):
        out[middle] = _bessel_miller(nu, xa[middle])
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Gauss hypergeometric 2F1
# ---------------------------------------------------------------------------

_SERIES_MAX_X = 0.6
_SERIES_TOL = 1e-16
_SERIES_CAP = 10_000


def hyp2f1_series(a: float, b: float, c: float, x):
    """Raw Maclaurin series of 2F1, for |x| < 1."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    total = np.ones_like(xa)
    term = np.ones_like(xa)
    for n in range(_SERIES_CAP):
        term = term * ((a + n) * (b + n) / ((c + n) * (n + 1.0))) * xa
        total = total + term
        if np.all(np.abs(term) <= _SERIES_TOL * np.abs(total)):
            break
    return total


def _connection(a: float, b: float, c: float, x: np.ndarray, w: np.ndarray) -> np.ndarray:
    # continuation around x = 1 (w = 1 - x), valid when c - a - b is not an integer
    d = c - a - b
    gc = gamma_fn(c)
    c1 = gc * gamma_fn(d) * rgamma(c - a) * rgamma(c - b)
    c2 = gc * gamma_fn(-d) * rgamma(a) * rgamma(b)
    out = np.zeros_like(x)
    if c1 != 0.0:
        out += c1 * hyp2f1_series(a, b, 1.0 - d, w)
    if c2 != 0.0:
        out += c2 * w**d * hyp2f1_series(c - a, c - b, 1.0 + d, w)
    return out


def _hyp2f1_unit(a: float, b: float, c: float, x: np.ndarray, w: np.ndarray | None = None) -> np.ndarray:
    # 0 <= x < 1; w = 1 - x may be supplied when known more accurately
    if w is None:
        w = 1.0 - x
    out = np.empty_like(x)
    low = x <= _SERIES_MAX_X
    if np.any(low):
        out[low] = hyp2f1_series(a, b, c, x[low])
    if np.any(~low):
        d = c - a - b
        if d == math.floor(d):
            out[~low] = hyp2f1_series(a, b, c, x[~low])
        else:
            out[~low] = _connection(a, b, c, x[~low], w[~low])
    return out


def hyp2f1_pfaff(a: float, b: float, c: float, x):
    """2F1 for x < 0 through the Pfaff transformation to x/(x-1) in (0, 1)."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    one_minus_w = 1.0 / (1.0 - xa)
    w = -xa * one_minus_w
    return (1.0 - xa) ** (-a) * _hyp2f1_unit(a, c - b, c, w, one_minus_w)


def hyp2f1(a: float, b: float, c: float, x):
    """Gauss hypergeometric function F(a, b; c; x) for real x < 1."""
    if _is_nonpositive_integer(float(c)):
        raise PoleError("2F1 undefined: gamma is a non-positive integer")
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    xa = np.atleast_1d(arr).astype(float)
    if np.any(xa >= 1.0):
        raise ValueError("hyp2f1 requires x < 1")
    out = np.empty_like(xa)
    neg = xa < 0
    if np.any(neg):
        out[neg] = hyp2f1_pfaff(a, b, c, xa[neg])
    if np.any(~neg):
        out[~neg] = _hyp2f1_unit(a, b, c, xa[~neg])
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Closed forms of classical integrals (used as oracles)
# ---------------------------------------------------------------------------


def gegenbauer_closed_form(nu: float, mu: float, alpha: float, beta: float) -> float:
    """Closed form of int_0^inf t^(mu-1) exp(-alpha t) J_nu(beta t) dt."""
    r2 = alpha * alpha + beta * beta
    pref = (
        2.0 ** (-nu)
        * beta**nu
        * gamma_fn(nu + mu)
        / (gamma_fn(nu + 1.0) * r2 ** (0.5 * (nu + mu)))
    )
    return pref * hyp2f1(0.5 * (nu + mu), 0.5 * (1.0 - mu + nu), nu + 1.0, beta * beta / r2)


def bateman_closed_form(c: float, gam: float, alpha: float, beta: float, a: float) -> float:
    """Closed form of int_0^1 y^(c-1) (1-y)^(gam-c-1) F(alpha, beta; c; a y) dy."""
    return gamma_fn(c) * gamma_fn(gam - c) / gamma_fn(gam) * hyp2f1(alpha, beta, gam, a)
