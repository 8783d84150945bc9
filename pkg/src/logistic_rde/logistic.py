"""Standard logistic distribution: closed forms and the identities the rest
of the library leans on.

Everything here is exact arithmetic on the standard logistic law

    cdf(x) = 1 / (1 + e^(-x)),    tail(x) = e^(-x) / (1 + e^(-x)).

Three identities get used everywhere downstream:

  1. density = cdf * tail (differentiate the cdf),
  2. cdf(-x) = tail(x) (symmetry),
  3. tail(x) = exp(-integral of tail over (-x, infinity)), which pins the
     logistic tail as the fixed point of the min-type operators in
     :mod:`logistic_rde.operators`.

The antiderivative of ``tail`` is ``-log(1 + e^(-s))``, so right tail
integrals have the closed form ``tail_integral``.
"""

from __future__ import annotations

import numbers

import numpy as np
from scipy.special import expit


def _as_finite_array(x, name: str):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, got {x!r}")
    return arr


def _scalar_like(x, result: np.ndarray):
    if isinstance(x, numbers.Number) or np.ndim(x) == 0:
        return float(result)
    return result


def cdf(x):
    """P(X <= x) = 1/(1+e^(-x)), stable for large |x| via expit."""
    arr = _as_finite_array(x, "x")
    return _scalar_like(x, expit(arr))


def tail(x):
    """P(X > x) = e^(-x)/(1+e^(-x)); strictly decreasing, never exactly 0."""
    arr = _as_finite_array(x, "x")
    return _scalar_like(x, expit(-arr))


def density(x):
    """Logistic density, computed as cdf(x)*tail(x)."""
    arr = _as_finite_array(x, "x")
    return _scalar_like(x, expit(arr) * expit(-arr))


def log_tail(x):
    """log tail(x) = -log(1+e^x), stable at both ends."""
    arr = _as_finite_array(x, "x")
    return _scalar_like(x, -np.logaddexp(0.0, arr))


def quantile(p):
    """Inverse cdf, log(p/(1-p)). Rejects p outside the open interval (0,1)."""
    arr = np.asarray(p, dtype=float)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise ValueError(f"quantile requires 0 < p < 1, got {p!r}")
    return _scalar_like(p, np.log(arr) - np.log1p(-arr))


def sample(randomness, size=None):
    """Draw logistic variates by inverse cdf from a uniform source.

    ``randomness`` is either a numpy Generator or a callable returning
    uniforms in (0,1) when passed ``size``.
    """
    if hasattr(randomness, "random"):
        u = randomness.random(size)
    else:
        u = randomness(size)
    u = np.asarray(u, dtype=float)
    if not np.all((u > 0.0) & (u < 1.0)):
        raise ValueError("uniform source must yield values strictly inside (0,1)")
    out = np.log(u) - np.log1p(-u)
    return float(out) if size is None and out.ndim == 0 else out


def tail_integral(a):
    """Closed form of the right tail mass: integral of tail(s) over [a, inf).

    The antiderivative of tail is -log(1+e^(-s)), so the integral equals
    log(1+e^(-a)). At a = 0 this is log 2.
    """
    arr = _as_finite_array(a, "a")
    return _scalar_like(a, np.logaddexp(0.0, -arr))


def tail_squared_integral(a):
    """Integral of tail(s)^2 over [a, inf), closed form.

    tail^2 = tail - cdf*tail and cdf*tail integrates to cdf, hence
    the value log(1+e^(-a)) - tail(a).
    """
    arr = _as_finite_array(a, "a")
    return _scalar_like(a, np.logaddexp(0.0, -arr) - expit(-arr))


def fixed_point_residual(x):
    """Residual of tail(x) - exp(-tail_integral(-x)), zero in exact arithmetic.

    The exponent uses the closed-form antiderivative, so the residual
    measures only floating point error, not quadrature error.
    """
    arr = _as_finite_array(x, "x")
    res = expit(-arr) - np.exp(-np.logaddexp(0.0, arr))
    return _scalar_like(x, res)


VARIANCE = np.pi ** 2 / 3.0
