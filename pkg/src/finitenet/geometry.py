"""Distance laws for uniformly placed APs inside a disk.

A user sits at an evaluation point a distance ``d`` from the center of a
disk of radius ``R``. Each AP is uniform on the disk, so the distance from
the user to one AP has the lens-area CDF computed by
:func:`arbitrary_ap_cdf`. Everything else here (nearest-AP law, the law of an
interferer given the nearest distance, and inverse-power moments of that
law) is built on top of it.

All functions accept scalars or numpy arrays for the distance argument and
return an array of matching shape (0-d arrays are returned as floats).
Internally the disk is normalized to unit radius.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy import optimize

from . import _integrate
from .errors import DomainError

__all__ = [
    "DiskGeometry",
    "EvalPoint",
    "arbitrary_ap_cdf",
    "arbitrary_ap_pdf",
    "nearest_ap_cdf",
    "nearest_ap_pdf",
    "nearest_ap_quantile",
    "interferer_conditional_cdf",
    "conditional_inverse_power_moment",
]

# Tolerances for the moment integrals. Tighter than strictly needed so that
# differences of moments (used by the small-offset analysis) stay clean.
MOMENT_EPSABS = 1e-13
MOMENT_EPSREL = 1e-11


@dataclass(frozen=True)
class DiskGeometry:
    """Circular service area of radius ``radius_km``."""

    radius_km: float

    def __post_init__(self):
        if not (self.radius_km > 0 and math.isfinite(self.radius_km)):
            raise DomainError(f"radius_km must be positive and finite, got {self.radius_km}")

    @property
    def area_km2(self):
        return math.pi * self.radius_km ** 2


@dataclass(frozen=True)
class EvalPoint:
    """Evaluation location, given by its distance from the disk center."""

    d_km: float

    def __post_init__(self):
        if not (self.d_km >= 0 and math.isfinite(self.d_km)):
            raise DomainError(f"d_km must be finite and non-negative, got {self.d_km}")


def _offset(point, disk):
    """Normalized offset d/R, validated."""
    dn = point.d_km / disk.radius_km
    if dn > 1.0 + 1e-12:
        raise DomainError(f"evaluation point d={point.d_km} km lies outside radius {disk.radius_km} km")
    return min(dn, 1.0)


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _lens_area(r, dn, sqrt, atan2):
    """Area of the unit disk within distance r of a point at offset dn, for 1 - dn < r < 1 + dn.

    The arccos arguments are near +-1 close to the branch ends, so each
    arccos is taken as ``2 atan2(sqrt(1 - c), sqrt(1 + c))`` with ``1 -+ c``
    formed as products of the (exact) linear factors.
    """
    p, q = 1.0 - dn, 1.0 + dn
    lo, hi = r - p, q - r                      # both positive on the lens branch
    s1, s2 = r + p, q + r
    # c1 = (dn^2 - r^2 + 1) / (2 dn), c2 = (dn^2 + r^2 - 1) / (2 dn r)
    one_m_c1, one_p_c1 = lo * s1 / (2.0 * dn), hi * s2 / (2.0 * dn)
    one_m_c2, one_p_c2 = hi * s1 / (2.0 * dn * r), lo * s2 / (2.0 * dn * r)
    th1 = 2.0 * atan2(sqrt(abs(one_m_c1)), sqrt(abs(one_p_c1)))
    th2 = 2.0 * atan2(sqrt(abs(one_m_c2)), sqrt(abs(one_p_c2)))
    kite = sqrt(abs(lo * hi * s1 * s2))
    return th1 + r * r * th2 - 0.5 * kite


def _cdf_unit(x, dn):
    """Single-AP distance CDF on the unit disk, point at offset dn."""
    x = np.asarray(x, dtype=float)
    if dn == 0.0:
        return np.minimum(x * x, 1.0)
    out = np.where(x <= 1.0 - dn, x * x, 1.0)
    mid = (x > 1.0 - dn) & (x < 1.0 + dn) & (x > 0)
    if np.any(mid):
        r = x[mid] if x.ndim else x
        val = _lens_area(r, dn, np.sqrt, np.arctan2) / math.pi
        val = np.clip(val, 0.0, 1.0)
        if x.ndim:
            out[mid] = val
        else:
            out = val
    return out


def _cdf_scalar(r, dn):
    """Scalar, pure-math version of :func:`_cdf_unit` for quadrature integrands."""
    if r <= 1.0 - dn:
        return min(r * r, 1.0)
    if r >= 1.0 + dn:
        return 1.0
    val = _lens_area(r, dn, math.sqrt, math.atan2) / math.pi
    return min(max(val, 0.0), 1.0)


def _cdf_deriv_unit(x, dn):
    """d/dx of :func:`_cdf_unit`: arc length of the circle of radius x inside the disk over pi."""
    x = np.asarray(x, dtype=float)
    inner = np.where((x >= 0) & (x <= 1.0 - dn), 2.0 * x, 0.0)
    if dn == 0.0:
        return inner
    mid = (x > 1.0 - dn) & (x < 1.0 + dn) & (x > 0)
    safe = np.where(mid, x, 1.0)
    arg = np.clip((dn * dn + safe * safe - 1.0) / (2.0 * dn * safe), -1.0, 1.0)
    return np.where(mid, 2.0 * safe * np.arccos(arg) / math.pi, inner)


def _check_r(r, name="r"):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(np.isnan(r)):
        raise DomainError(f"{name} must be non-negative")
    return r


def arbitrary_ap_cdf(r, point, disk):
    """CDF of the distance from ``point`` to one uniformly placed AP.

    Piecewise: ``r**2 / R**2`` up to ``R - d``, the lens-area expression up
    to ``R + d``, and 1 beyond.
    """
    r = _check_r(r)
    dn = _offset(point, disk)
    return _out(_cdf_unit(r / disk.radius_km, dn))


def arbitrary_ap_pdf(r, point, disk):
    """Density of the distance to one AP (analytic derivative of the CDF)."""
    r = _check_r(r)
    dn = _offset(point, disk)
    return _out(_cdf_deriv_unit(r / disk.radius_km, dn) / disk.radius_km)


def _check_n(n_aps):
    if int(n_aps) != n_aps or n_aps < 1:
        raise DomainError(f"n_aps must be a positive integer, got {n_aps}")
    return int(n_aps)


def nearest_ap_cdf(r1, n_aps, point, disk):
    """CDF of the distance to the nearest of ``n_aps`` APs: ``1 - (1 - F)**N``."""
    n = _check_n(n_aps)
    F = np.asarray(arbitrary_ap_cdf(r1, point, disk))
    with np.errstate(divide="ignore"):
        val = -np.expm1(n * np.log1p(-np.minimum(F, 1.0)))
    return _out(np.where(F >= 1.0, 1.0, val))


def nearest_ap_pdf(r1, n_aps, point, disk):
    """Density of the nearest-AP distance; zero outside ``[0, R + d]``.

    At the center this is ``(2 N r1 / R**2) (1 - r1**2 / R**2)**(N-1)``.
    """
    n = _check_n(n_aps)
    r1 = _check_r(r1, "r1")
    R = disk.radius_km
    dn = _offset(point, disk)
    x = r1 / R
    if dn == 0.0:
        xc = np.minimum(x, 1.0)
        val = np.where(x <= 1.0, 2.0 * n * xc * (1.0 - xc * xc) ** (n - 1), 0.0) / R
        return _out(val)
    F = _cdf_unit(x, dn)
    dF = _cdf_deriv_unit(x, dn)
    return _out(n * (1.0 - F) ** (n - 1) * dF / R)


def _inverse_cdf_unit(p, dn):
    """Inverse of the single-AP distance CDF on the unit disk."""
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return 1.0 + dn
    if p <= (1.0 - dn) ** 2:
        return math.sqrt(p)
    lo, hi = 1.0 - dn, 1.0 + dn
    return optimize.brentq(lambda x: _cdf_scalar(x, dn) - p, lo, hi, xtol=1e-14, rtol=1e-14)


def nearest_ap_quantile(q, n_aps, point, disk):
    """Inverse of :func:`nearest_ap_cdf` for probabilities in [0, 1]."""
    n = _check_n(n_aps)
    dn = _offset(point, disk)
    qs = np.atleast_1d(np.asarray(q, dtype=float))
    if np.any((qs < 0) | (qs > 1)):
        raise DomainError("quantile levels must lie in [0, 1]")
    # F = 1 - (1 - q)^(1/N)
    with np.errstate(divide="ignore"):
        F = -np.expm1(np.log1p(-np.minimum(qs, 1.0)) / n)
    F = np.where(qs >= 1.0, 1.0, F)
    out = np.array([_inverse_cdf_unit(f, dn) for f in F]) * disk.radius_km
    return _out(out.reshape(np.shape(q)))


def interferer_conditional_cdf(rj, r1, point, disk):
    """CDF of an interferer's distance given the nearest-AP distance ``r1``."""
    rj = _check_r(rj, "rj")
    _check_r(r1, "r1")
    dn = _offset(point, disk)
    R = disk.radius_km
    F1 = float(_cdf_unit(r1 / R, dn))
    if F1 >= 1.0:
        raise DomainError(f"r1={r1} leaves no room for interferers (F_R(r1) = 1)")
    Fj = _cdf_unit(rj / R, dn)
    val = np.where(rj <= r1, 0.0, np.clip((Fj - F1) / (1.0 - F1), 0.0, 1.0))
    return _out(val)


def _center_moment_unit(a, x):
    """E[r^-a | r1 = x] at the center of the unit disk (closed form, a > 2)."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        lx = np.log(x)
        num = 2.0 * np.expm1((2.0 - a) * lx)
        den = (a - 2.0) * -np.expm1(2.0 * lx)
        val = num / den
    return np.where(x >= 1.0, 1.0, np.where(x <= 0.0, np.inf, val))


def _inner_weight_integral(a, lo, hi):
    """Integral of a r^(1-a) over [lo, hi] (the r^2 branch of F against a r^(-a-1))."""
    if a == 2.0:
        return 2.0 * np.log(hi / lo)
    return a / (a - 2.0) * (lo ** (2.0 - a) - hi ** (2.0 - a))


@lru_cache(maxsize=4096)
def _middle_branch_integral(a, dn):
    """Integral of F(r) a r^(-a-1) over the lens branch [1 - dn, 1 + dn].

    Integrated in log-distance, t = ln r, so the range stays well scaled
    even when the lower limit approaches zero.
    """
    lo, hi = 1.0 - dn, 1.0 + dn
    if lo <= 0.0:
        raise DomainError("middle-branch constant undefined at the disk edge")

    def integrand(t):
        r = math.exp(t)
        return _cdf_scalar(r, dn) * a * math.exp(-a * t)

    return _integrate.quad(integrand, math.log(lo), math.log(hi),
                           epsabs=MOMENT_EPSABS, epsrel=MOMENT_EPSREL)


def _g_integral_unit(a, x, dn, upper=None, lower=None):
    """Integral of G(r) a r^(-a-1) over [lower, upper], G the conditional CDF given r1 = x.

    The range defaults to [x, 1 + dn].
    """
    upper = 1.0 + dn if upper is None else upper
    lower = x if lower is None else lower
    F1 = float(_cdf_unit(x, dn))
    if F1 >= 1.0:
        raise DomainError("degenerate conditioning: F_R(r1) = 1")
    brk = [math.log(1.0 - dn)] if 0 < 1.0 - dn else None

    def integrand(t):
        r = math.exp(t)
        g = (_cdf_scalar(r, dn) - F1) / (1.0 - F1)
        return g * a * math.exp(-a * t)

    return _integrate.quad(integrand, math.log(lower), math.log(upper), points=brk,
                           epsabs=MOMENT_EPSABS * x ** -a, epsrel=MOMENT_EPSREL)


def _general_moment_unit(a, x, dn):
    """E[r^-a | r1 = x] on the unit disk for any offset (scalar x)."""
    tail = (1.0 + dn) ** -a
    if x < 1.0 - dn:
        # r^2 branch in closed form, lens branch as a cached constant.
        F1 = x * x
        inner = _inner_weight_integral(a, x, 1.0 - dn)
        middle = _middle_branch_integral(a, dn) if dn > 0 else 0.0
        return tail + (inner + middle - F1 * (x ** -a - tail)) / (1.0 - F1)
    return tail + _g_integral_unit(a, x, dn)


def _lens_moments_batch(a, xs, dn, nodes=16):
    """E[r^-a | r1 = x] for many x on the lens branch ``x >= 1 - dn`` at once.

    The points are sorted, a log-spaced grid is merged in, and every gap is
    integrated with a fixed Gauss-Legendre rule in ``t = ln r``. A reverse
    cumulative sum then gives the integral of F a r^(-a-1) from each x to
    ``1 + dn``.
    """
    xs = np.asarray(xs, dtype=float)
    top = 1.0 + dn
    grid = np.unique(np.concatenate([np.log(xs), np.linspace(np.log(xs.min()), np.log(top), 65)]))
    g, w = np.polynomial.legendre.leggauss(nodes)
    lo, hi = grid[:-1, None], grid[1:, None]
    t = 0.5 * (hi - lo) * g + 0.5 * (hi + lo)
    seg = (0.5 * (hi - lo) * w * _cdf_unit(np.exp(t), dn) * a * np.exp(-a * t)).sum(axis=1)
    from_x = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    upper = from_x[np.searchsorted(grid, np.log(xs))]
    tail = top ** -a
    F1 = _cdf_unit(xs, dn)
    return tail + (upper - F1 * (xs ** -a - tail)) / (1.0 - F1)


def _quad_moment_unit(a, x, dn):
    """E[r^-a | r1 = x] by direct quadrature of the conditional CDF (no closed forms)."""
    return (1.0 + dn) ** -a + _g_integral_unit(a, x, dn)


def conditional_inverse_power_moment(exponent, r1, point, disk, method="auto"):
    """E[r_j^(-exponent) | r1] for an interferer beyond the nearest distance ``r1``.

    Parameters
    ----------
    exponent : float
        Positive power (``alpha`` for the first interference moment,
        ``2 alpha`` for the second).
    r1 : float or array_like
        Nearest-AP distance(s) in km, ``0 < r1 < R + d``.
    method : {"auto", "closed", "split", "quad"}
        ``"closed"`` is the center-only closed form (needs exponent > 2).
        ``"split"`` integrates the r**2 branch of the CDF analytically and the
        lens branch numerically. ``"quad"`` integrates the conditional CDF
        directly over the whole range and exists as a cross-check.
        ``"auto"`` picks ``"closed"`` at the center and ``"split"`` elsewhere.
    """
    a = float(exponent)
    if not a > 0:
        raise DomainError(f"exponent must be positive, got {exponent}")
    r1 = _check_r(r1, "r1")
    R = disk.radius_km
    dn = _offset(point, disk)
    x = r1 / R
    if np.any(x <= 0):
        raise DomainError("r1 must be strictly positive")
    if np.any(x >= 1.0 + dn):
        raise DomainError("r1 must be below R + d")
    if method == "auto":
        method = "closed" if dn == 0.0 and a > 2.0 else "split"
    if method == "closed":
        if dn != 0.0:
            raise DomainError("closed-form moment applies only at the disk center")
        if a <= 2.0:
            raise DomainError(f"closed-form moment needs exponent > 2, got {a}")
        val = _center_moment_unit(a, x)
    elif method == "split":
        flat = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        val = np.empty_like(flat)
        inner = flat < 1.0 - dn
        if np.any(inner):
            # r^2 branch in closed form for every inner point at once.
            xi = flat[inner]
            tail = (1.0 + dn) ** -a
            middle = _middle_branch_integral(a, dn) if dn > 0 else 0.0
            F1 = xi * xi
            val[inner] = tail + (_inner_weight_integral(a, xi, 1.0 - dn) + middle
                                 - F1 * (xi ** -a - tail)) / (1.0 - F1)
        outer = np.flatnonzero(~inner)
        if outer.size > 1:
            val[outer] = _lens_moments_batch(a, flat[outer], dn)
        elif outer.size == 1:
            val[outer[0]] = _general_moment_unit(a, float(flat[outer[0]]), dn)
        val = val.reshape(np.shape(x))
    elif method == "quad":
        flat = np.atleast_1d(x).ravel()
        val = np.array([_quad_moment_unit(a, float(xi), dn) for xi in flat]).reshape(np.shape(x))
    else:
        raise ValueError(f"unknown method {method!r}")
    return _out(val * R ** -a)
