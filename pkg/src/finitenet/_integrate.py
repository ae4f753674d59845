"""Thin wrappers around scipy's adaptive quadrature that raise on failure."""

import warnings

import numpy as np
from scipy import integrate

from .errors import QuadratureError


def quad(func, a, b, *, epsabs=1e-12, epsrel=1e-10, points=None, limit=200):
    """Integrate a scalar function on [a, b] with QUADPACK.

    Raises QuadratureError when QUADPACK flags a problem and the reported
    error is above ten times the requested tolerance. Smaller shortfalls are
    accepted: QUADPACK often flags roundoff on integrals that are fine.
    """
    if b <= a:
        return 0.0
    if points is not None:
        points = [p for p in points if a < p < b] or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(func, a, b, epsabs=epsabs, epsrel=epsrel,
                             points=points, limit=limit, full_output=1)
    value, abserr, info = out[0], out[1], out[2]
    requested = max(epsabs, epsrel * abs(value))
    if len(out) > 3 and abserr > 10 * requested:
        raise QuadratureError(f"quad on [{a:.6g}, {b:.6g}]: {out[3]}",
                              achieved=abserr, requested=requested)
    if not np.isfinite(value):
        raise QuadratureError(f"non-finite integral on [{a:.6g}, {b:.6g}]",
                              achieved=np.inf, requested=requested)
    return value


def quad_vec(func, a, b, *, epsabs=1e-8, epsrel=1e-8, points=None, limit=4000):
    """Adaptive quadrature of a vector-valued integrand on [a, b]."""
    if points is not None:
        points = sorted(p for p in points if a < p < b) or None
    value, err, info = integrate.quad_vec(func, a, b, epsabs=epsabs, epsrel=epsrel,
                                          points=points, limit=limit, full_output=True,
                                          norm="max")
    if not info.success:
        requested = max(epsabs, epsrel * float(np.max(np.abs(value))))
        if err > 10 * requested:
            raise QuadratureError(f"quad_vec on [{a:.6g}, {b:.6g}]: {info.message}",
                                  achieved=err, requested=requested)
    return value
