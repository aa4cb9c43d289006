"""Scalar special functions that parametrize the spectral theory.

Everything here is a pure function of ``alpha = 2 - 2H`` (and a point ``t``
or ``z``).  ``alpha = 1`` is admitted everywhere and yields the classical
Wiener limits (``theta0 == 0``, ``X0 == 1``, ``h0 == 0``).

Half-line integrals of ``theta0`` are split at ``T`` and the tail is mapped
by ``t = T * v**(-q)`` with ``q = 1/(r - 1)``, ``r = 3 - alpha``.  With that
choice ``theta0(t) dt/dv`` is bounded and tends to a constant at ``v = 0``,
so no overflow-prone evaluations at huge ``t`` are needed.
"""

import math
import warnings

import numpy as np
from scipy import integrate

from ._validation import ConvergenceError, check_alpha, check_positive

_QUAD_OPTS = dict(epsabs=1e-14, epsrel=1e-13, limit=400)


def c_alpha(alpha):
    """(1 - alpha/2)(1 - alpha)/Gamma(alpha); zero at alpha = 1."""
    alpha = check_alpha(alpha)
    return (1.0 - alpha / 2.0) * (1.0 - alpha) / math.gamma(alpha)


def b_alpha(alpha):
    """cot(pi/(3 - alpha)); the 1/z coefficient of X0 at infinity."""
    alpha = check_alpha(alpha)
    x = math.pi / (3.0 - alpha)
    return math.cos(x) / math.sin(x)


def _angle(alpha):
    return math.pi * (1.0 - alpha) / 2.0


def theta0(t, alpha):
    """Phase of the boundary value of the symbol, rescaled by nu.

    ``arctan(sin(a) / (cos(a) + t**(3 - alpha)))`` with ``a = pi(1-alpha)/2``.
    Accepts scalars or arrays, ``t > 0``.
    """
    alpha = check_alpha(alpha)
    a = _angle(alpha)
    t = np.asarray(t, dtype=float)
    # cos(a) > 0 on the whole admissible range, so arctan2 is the plain arctan
    out = np.arctan2(math.sin(a), math.cos(a) + t ** (3.0 - alpha))
    return out if out.ndim else float(out)


def theta0_prime(t, alpha):
    """Analytic derivative of :func:`theta0` in ``t``."""
    alpha = check_alpha(alpha)
    a = _angle(alpha)
    r = 3.0 - alpha
    t = np.asarray(t, dtype=float)
    tr = t ** r
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -math.sin(a) * r * t ** (r - 1.0) / ((math.cos(a) + tr) ** 2 + math.sin(a) ** 2)
    out = np.where(np.isfinite(out), out, 0.0)
    return out if out.ndim else float(out)


def _tail_exponent(alpha):
    return 1.0 / (2.0 - alpha)  # 1/(r - 1)


def _theta0_tail(v, T, alpha):
    """theta0(t) * |dt/dv| for t = T v**(-q); bounded on (0, 1]."""
    a = _angle(alpha)
    r = 3.0 - alpha
    q = _tail_exponent(alpha)
    u = T ** (-r) * v ** (q * r)  # t**(-r)
    w = math.sin(a) * u / (1.0 + math.cos(a) * u)
    atanc = np.arctan(w) / w if w != 0.0 else 1.0
    # q*r - q - 1 == 0, so the powers of v cancel exactly
    return T ** (1.0 - r) * q * math.sin(a) * atanc / (1.0 + math.cos(a) * u)


def _tail_point(v, T, alpha):
    return T * v ** (-_tail_exponent(alpha))


def _quad(f, a, b, **kw):
    opts = dict(_QUAD_OPTS)
    opts.update(kw)
    # roundoff warnings are expected near machine precision; callers check err
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, **opts)
    return val, err


def _edges(lo, hi, *points):
    """Breakpoints covering [lo, hi]: the given points plus a geometric ladder.

    theta0 carries its mass on s ~ 1, so long intervals are cut by factors of 4
    to keep the adaptive rule from stepping over it.
    """
    pts = {lo, hi}
    pts.update(p for p in points if lo < p < hi)
    x = max(lo, 0.25)
    while x < hi:
        if x > lo:
            pts.add(x)
        x *= 4.0
    return sorted(pts)


def theta0_integral(alpha, tol=1e-9):
    """Return ``(value, abserr)`` of the integral of theta0 over (0, inf).

    The exact value is ``pi * b_alpha(alpha)``; this routine does not use it.
    """
    alpha = check_alpha(alpha)
    if alpha == 1.0:
        return 0.0, 0.0
    T = 1.0
    head, e1 = _quad(lambda t: theta0(t, alpha), 0.0, T)
    tail, e2 = _quad(lambda v: _theta0_tail(v, T, alpha), 0.0, 1.0)
    err = e1 + e2
    if err > tol:
        raise ConvergenceError(f"theta0 integral: error estimate {err:.2e} exceeds {tol:.0e}")
    return head + tail, err


def _cauchy_integral(z, alpha):
    """(1/pi) * integral of theta0(s)/(s - z) over (0, inf), z off the cut."""
    zr, zi = z.real, z.imag
    T = max(4.0, 4.0 * abs(z))

    def re_part(s):
        d = s - zr
        return theta0(s, alpha) * d / (d * d + zi * zi)

    def im_part(s):
        d = s - zr
        return theta0(s, alpha) * zi / (d * d + zi * zi)

    def tail(v, part):
        s = _tail_point(v, T, alpha)
        w = _theta0_tail(v, T, alpha)
        # 1/(s - z) written without forming s*s for huge s
        x = 1.0 / s
        denom = (1.0 - zr * x) ** 2 + (zi * x) ** 2
        return w * x * ((1.0 - zr * x) if part == "re" else zi * x) / denom

    re = im = 0.0
    err = 0.0
    edges = _edges(0.0, T, zr, abs(z))
    for lo, hi in zip(edges[:-1], edges[1:]):
        v1, e1 = _quad(re_part, lo, hi)
        v2, e2 = _quad(im_part, lo, hi)
        re += v1
        im += v2
        err += e1 + e2
    v1, e1 = _quad(lambda v: tail(v, "re"), 0.0, 1.0)
    v2, e2 = _quad(lambda v: tail(v, "im"), 0.0, 1.0)
    re += v1
    im += v2
    err += e1 + e2
    return complex(re, im) / math.pi, err / math.pi


def x0(z, alpha):
    """Sectionally analytic X0(z) with the cut on [0, inf).

    ``exp((1/pi) * int_0^inf theta0(s)/(s - z) ds)`` by adaptive quadrature.
    """
    alpha = check_alpha(alpha)
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("z must be finite")
    if z.imag == 0.0 and z.real >= 0.0:
        raise ValueError(f"z = {z} lies on the cut [0, inf)")
    if alpha == 1.0:
        return complex(1.0, 0.0)
    val, _ = _cauchy_integral(z, alpha)
    return complex(np.exp(val))


def x0_boundary(t, alpha):
    """Boundary value X0^+(t) = lim X0(t + i0) for t > 0.

    Uses the Cauchy-weighted principal value of the theta0 integral, which is
    independent of the log-kernel route taken by :func:`h0`.
    """
    alpha = check_alpha(alpha)
    t = check_positive(t, "t")
    if alpha == 1.0:
        return complex(1.0, 0.0)
    th = lambda s: theta0(s, alpha)
    pv, _ = _quad(th, 0.0, 2.0 * t, weight="cauchy", wvar=t, limit=800)
    T = max(4.0, 4.0 * t)
    edges = _edges(2.0 * t, T)
    reg = sum(_quad(lambda s: th(s) / (s - t), lo, hi)[0]
              for lo, hi in zip(edges[:-1], edges[1:]))

    def tail(v):
        s = _tail_point(v, T, alpha)
        return _theta0_tail(v, T, alpha) / s / (1.0 - t / s)

    tl, _ = _quad(tail, 0.0, 1.0)
    log_mod = (pv + reg + tl) / math.pi
    return complex(np.exp(complex(log_mod, theta0(t, alpha))))


def _h0_exponent(t, alpha):
    """(1/pi) * int theta0'(s) log|(s+t)/(s-t)| ds, split at s = t."""
    dth = lambda s: theta0_prime(s, alpha)
    total = 0.0
    # [0, t]: log(s+t) is smooth, -log(t-s) is handled by the algebraic-log weight
    v, _ = _quad(lambda s: dth(s) * math.log(s + t), 0.0, t)
    total += v
    v, _ = _quad(dth, 0.0, t, weight="alg-logb", wvar=(0.0, 0.0))
    total -= v
    # [t, 2t]
    v, _ = _quad(lambda s: dth(s) * math.log(s + t), t, 2.0 * t)
    total += v
    v, _ = _quad(dth, t, 2.0 * t, weight="alg-loga", wvar=(0.0, 0.0))
    total -= v
    # [2t, T], regular; log((s+t)/(s-t)) = 2 atanh(t/s)
    T = max(4.0, 4.0 * t)
    edges = _edges(2.0 * t, T)
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, _ = _quad(lambda s: dth(s) * 2.0 * math.atanh(t / s), lo, hi)
        total += v

    a = _angle(alpha)
    r = 3.0 - alpha
    q = _tail_exponent(alpha)

    def tail(v):
        # theta0'(s) |ds/dv| with s = T v**(-q), u = s**(-r)
        u = T ** (-r) * v ** (q * r)
        dens = (1.0 + math.cos(a) * u) ** 2 + (math.sin(a) * u) ** 2
        weight = -math.sin(a) * r * q * T ** (-r) * v ** (q * r - 1.0) / dens
        return weight * 2.0 * math.atanh((t / T) * v ** q)

    v, _ = _quad(tail, 0.0, 1.0)
    total += v
    return total / math.pi


def h0(t, alpha):
    """Real kernel factor of the contraction operator.

    ``sin(theta0(t)) * exp(-(1/pi) * int theta0'(s) log|(s+t)/(s-t)| ds)``,
    with the log-kernel integral split at ``s = t`` and theta0' analytic.
    Vectorized over ``t``.
    """
    alpha = check_alpha(alpha)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr <= 0):
        raise ValueError("h0 requires t > 0")
    if alpha == 1.0:
        out = np.zeros_like(t_arr)
    else:
        out = np.array([math.sin(theta0(ti, alpha)) * math.exp(-_h0_exponent(ti, alpha))
                        for ti in t_arr])
    return out if np.ndim(t) else float(out[0])


def spectral_scale(alpha):
    """Scale ``sin(pi alpha/2) Gamma(3 - alpha)`` in lambda = scale * nu**(alpha-3).

    Asserts agreement with the form ``c_alpha * pi / cos(pi alpha/2)`` obtained
    from the zeros of the symbol (not defined at alpha = 1, where both sides
    have the limit 1).
    """
    alpha = check_alpha(alpha)
    scale = math.sin(math.pi * alpha / 2.0) * math.gamma(3.0 - alpha)
    if alpha != 1.0:
        other = c_alpha(alpha) * math.pi / math.cos(math.pi * alpha / 2.0)
        if not math.isclose(scale, other, rel_tol=1e-12, abs_tol=0.0):
            raise AssertionError(
                f"spectral scale mismatch at alpha={alpha}: {scale!r} vs {other!r}")
    return scale


def lambda_of_nu(nu, alpha):
    """Eigenvalue lambda corresponding to the root nu (vectorized)."""
    scale = spectral_scale(alpha)
    nu = np.asarray(nu, dtype=float)
    if np.any(nu <= 0) or not np.all(np.isfinite(nu)):
        raise ValueError("nu must be positive and finite")
    out = scale * nu ** (alpha - 3.0)
    return out if out.ndim else float(out)


def nu_of_lambda(lam, alpha):
    """Inverse of :func:`lambda_of_nu`."""
    scale = spectral_scale(alpha)
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0) or not np.all(np.isfinite(lam)):
        raise ValueError("lambda must be positive and finite")
    out = (lam / scale) ** (1.0 / (alpha - 3.0))
    return out if out.ndim else float(out)
