"""
Integral and high-temperature representations of the thermal Rabi sum

    h2(t) = sum_n p_n cos(2 sqrt(n + 1/2) gt),   p_n = 2 sinh(k) exp(-k(2n+1)).

Applying the Abel-Plana formula for half-integer arguments to
F(x) = exp(-2 k x) cos(2 gt sqrt(x)) gives

    h2 = 2 sinh(k) [ 1/(2k) int_0^inf exp(-y) cos(sqrt(2) T sqrt(y)) dy
                     - int_0^inf B(x) / (exp(pi x) + 1) dx ],

    B(x) = sin(k x) cos(u) cosh(u) + cos(k x) sin(u) sinh(u),   u = gt sqrt(x),

with k = hbar Omega / 2kT and T = gt / sqrt(k) the time in units of
tau0 = sqrt(k)/g.  The first integral equals 1 - sqrt(2) T D(T/sqrt(2)),
D being Dawson's function, which yields the hot-field approximation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import InvalidParameterError, NumericalError
from .qcore import kappa_from_nbar, nbar_from_kappa  # noqa: F401  (re-exported)

_SQRT2 = math.sqrt(2.0)
_LOG_CUTOFF = 38.0  # envelope below exp(-38) ~ 3e-17 is dropped
_QUAD_EPSABS = 1e-12
_QUAD_FAIL = 1e-8


@dataclass(frozen=True)
class AsymptoticParams:
    kappa: float
    t_tilde: float
    tau0: float

    @classmethod
    def from_time(cls, kappa: float, gt: float, g: float = 1.0) -> "AsymptoticParams":
        _check_kappa(kappa)
        return cls(kappa, gt / math.sqrt(kappa), tau0(kappa, g))

    @property
    def gt(self) -> float:
        return self.t_tilde * math.sqrt(self.kappa)


def _check_kappa(kappa):
    if not (kappa > 0) or math.isinf(kappa):
        raise InvalidParameterError(f"kappa must be finite and > 0, got {kappa}")


def tau0(kappa: float, g: float) -> float:
    """Natural time unit sqrt(kappa)/g."""
    _check_kappa(kappa)
    if not g > 0:
        raise InvalidParameterError("g must be > 0")
    return math.sqrt(kappa) / g


# --------------------------------------------------------------------------
# Dawson's function
# --------------------------------------------------------------------------

_SERIES_LIMIT = 0.5


def _dawson_series(x: float) -> float:
    # D(x) = sum_k (-1)^k 2^k x^(2k+1) / (2k+1)!!
    term = x
    total = x
    x2 = x * x
    k = 0
    while abs(term) > 1e-17 * abs(total):
        k += 1
        term *= -2.0 * x2 / (2 * k + 1)
        total += term
    return total


def _dawson_cf(x: float) -> float:
    # D(x) = x / (1 + 2x^2 - 4x^2/(3 + 2x^2 - 8x^2/(5 + 2x^2 - ...))),
    # evaluated with the modified Lentz algorithm.
    tiny = 1e-300
    x2 = x * x
    f = 1.0 + 2.0 * x2
    c = f
    d = 0.0
    for k in range(1, 1000):
        a = -4.0 * k * x2
        b = 2 * k + 1 + 2.0 * x2
        d = b + a * d
        d = 1.0 / (d if d != 0.0 else tiny)
        c = b + a / c
        if c == 0.0:
            c = tiny
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            return x / f
    raise NumericalError("Dawson continued fraction did not converge", achieved=abs(delta - 1.0))


def dawson(x):
    """Dawson's integral D(x) = exp(-x^2) int_0^x exp(u^2) du.

    Odd in x; accepts scalars or arrays.
    """
    arr = np.asarray(x, dtype=float)
    flat = arr.ravel()
    out = np.empty_like(flat)
    for i, v in enumerate(flat):
        a = abs(v)
        if a == 0.0:
            out[i] = 0.0
        elif a < _SERIES_LIMIT:
            out[i] = math.copysign(_dawson_series(a), v)
        elif a > 1e8:
            out[i] = 0.5 / v
        else:
            out[i] = math.copysign(_dawson_cf(a), v)
    out = out.reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# h2 representations
# --------------------------------------------------------------------------

def _gaussian_cos_integral(a: float) -> tuple[float, float]:
    """int_0^inf exp(-y) cos(a sqrt(y)) dy, via y = s^2, by quadrature."""
    s_max = math.sqrt(_LOG_CUTOFF + 2.0)
    pieces = max(1, min(200, int(a * s_max / math.pi) + 1))
    edges = np.linspace(0.0, s_max, pieces + 1)
    total = err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = integrate.quad(lambda s: 2.0 * s * math.exp(-s * s) * math.cos(a * s),
                              lo, hi, epsabs=_QUAD_EPSABS / pieces, epsrel=1e-12, limit=200)
        total += v
        err += e
    return total, err


def _boundary_integral(kappa: float, gt: float) -> tuple[float, float]:
    """int_0^inf B(x)/(exp(pi x)+1) dx, combined in log space."""
    if gt == 0.0:
        x_max = _LOG_CUTOFF / math.pi
    else:
        r = (gt + math.sqrt(gt * gt + 4.0 * math.pi * _LOG_CUTOFF)) / (2.0 * math.pi)
        x_max = r * r

    def integrand(x):
        if x == 0.0:
            return 0.0
        u = gt * math.sqrt(x)
        lf = -math.log1p(math.exp(-math.pi * x))  # log of 1/(1 + e^{-pi x})
        ep = math.exp(u - math.pi * x + lf)
        em = math.exp(-u - math.pi * x + lf)
        ch = 0.5 * (ep + em)
        sh = 0.5 * (ep - em)
        return math.sin(kappa * x) * math.cos(u) * ch + math.cos(kappa * x) * math.sin(u) * sh

    # the envelope exp(u - pi x) peaks at exp(gt^2 / 4 pi); cancellation
    # makes an absolute target below ~1e-14 of that peak unreachable
    tol = _QUAD_EPSABS * max(1.0, math.exp(gt * gt / (4.0 * math.pi)))
    n_split = max(1, int(gt * math.sqrt(x_max) / math.pi) + int(kappa * x_max / math.pi))
    edges = np.linspace(0.0, x_max, min(n_split, 200) + 1)
    total = 0.0
    err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = integrate.quad(integrand, lo, hi, epsabs=tol / len(edges),
                              epsrel=1e-12, limit=200)
        total += v
        err += e
    return total, err


def h2_integral(kappa: float, gt: float) -> float:
    """h2 from its Abel-Plana integral representation (adaptive quadrature).

    The boundary integral cancels between terms of size exp(gt^2 / 4 pi), so
    the attainable accuracy degrades for gt beyond about 15; NumericalError
    is raised when the quadrature estimate exceeds 1e-8.
    """
    _check_kappa(kappa)
    if gt < 0:
        raise InvalidParameterError("gt must be >= 0")
    t_tilde = gt / math.sqrt(kappa)
    first, e1 = _gaussian_cos_integral(_SQRT2 * t_tilde)
    second, e2 = _boundary_integral(kappa, gt)
    pref = 2.0 * math.sinh(kappa)
    achieved = pref * (e1 / (2 * kappa) + e2)
    if achieved > _QUAD_FAIL:
        raise NumericalError(
            f"h2 quadrature reached only {achieved:.2e}", achieved=achieved)
    return pref * (first / (2.0 * kappa) - second)


def h2_components(kappa: float, gt: float) -> tuple[float, float]:
    """(bulk, boundary) contributions to h2; their sum is ``h2_integral``."""
    _check_kappa(kappa)
    t_tilde = gt / math.sqrt(kappa)
    first, _ = _gaussian_cos_integral(_SQRT2 * t_tilde)
    second, _ = _boundary_integral(kappa, gt)
    pref = 2.0 * math.sinh(kappa)
    return pref * first / (2.0 * kappa), -pref * second


def h2_hot(kappa: float, gt: float) -> float:
    """Hot-field approximation: the bulk integral alone,
    (sinh k / k) (1 - sqrt(2) T D(T / sqrt(2))), T = gt/sqrt(k)."""
    _check_kappa(kappa)
    t_tilde = gt / math.sqrt(kappa)
    a = _SQRT2 * t_tilde
    return math.sinh(kappa) / kappa * (1.0 - a * dawson(a / 2.0))
