"""How fast performance approaches the centre (worst case) for small offsets.

The metric is the placement-averaged SIR in dB,

    SIR_avg(d) = (10 / ln 10) int (mu_SIR(r1) + sigma_SIR(r1)^2 / 2) f_R1(r1) dr1,

i.e. the dB value of the conditional mean SIR averaged over the nearest-AP
distance. Its change from the centre, ``delta(d) = SIR_avg(d) - SIR_avg(0)``,
is computed as an exact difference of two evaluations and can be summarised
by a low-order polynomial in ``d``. A second-order Taylor expansion of the
interference moments in ``d`` is provided to check the small-offset algebra.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np

from . import _integrate
from .errors import DomainError
from .geometry import (
    EvalPoint,
    _cdf_unit,
    _g_integral_unit,
    _inverse_cdf_unit,
    _offset,
    conditional_inverse_power_moment,
)
from .mma import sir_params

__all__ = [
    "PolyFit",
    "TaylorCorrection",
    "sir_avg_db",
    "delta_sir_avg_db",
    "delta_profile",
    "taylor_correction_terms",
    "fit_delta_poly",
]

DB_PER_NEPER = 10.0 / math.log(10.0)
AVG_EPSABS = 1e-10
_U_BREAKS = (1e-8, 1e-6, 1e-4, 1e-3, 0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999)


@dataclass(frozen=True)
class PolyFit:
    """Least-squares polynomial, coefficients highest degree first (``np.polyval`` order)."""

    coefficients: np.ndarray
    degree: int
    residual_rms: float

    def __post_init__(self):
        if self.degree < 1:
            raise DomainError("degree must be at least 1")
        if not np.all(np.isfinite(self.coefficients)):
            raise DomainError("non-finite polynomial coefficients")

    def __call__(self, d):
        return np.polyval(self.coefficients, d)


@dataclass(frozen=True)
class TaylorCorrection:
    d_m1: float
    d_m2: float
    d_mu_denom: float
    d_sigma2_denom: float


def _check_sir_model(model, min_aps=3):
    if not model.interference_limited:
        raise DomainError("the averaged-SIR analysis is for interference-limited models")
    if model.n_aps < min_aps:
        raise DomainError(f"averaged SIR needs at least {min_aps} APs")


def _r1_of_u(u, dn, model):
    F = -math.expm1(math.log1p(-u) / model.n_aps)
    return _inverse_cdf_unit(F, dn) * model.disk.radius_km


def _mean_log_sir(r1, point, model):
    p = sir_params(r1, point, model)
    return p.mu + 0.5 * p.sigma_sq


def _as_point(point):
    return point if isinstance(point, EvalPoint) else EvalPoint(float(point))


def sir_avg_db(point, model):
    """Placement-averaged SIR in dB at distance ``d`` from the centre.

    The outer integral runs over ``u = F_R1(r1)`` in (0, 1); the integrand
    has only a logarithmic singularity at ``u = 0``.
    """
    _check_sir_model(model)
    point = _as_point(point)
    dn = _offset(point, model.disk)

    def integrand(u):
        return float(_mean_log_sir(_r1_of_u(u, dn, model), point, model))

    val = _integrate.quad(integrand, 0.0, 1.0, points=_U_BREAKS, epsabs=AVG_EPSABS,
                          epsrel=1e-10, limit=500)
    return DB_PER_NEPER * val


def _r1_of_tail(v, dn, model):
    """Nearest-AP distance whose upper-tail probability ``1 - F_R1`` is ``v``."""
    F = -math.expm1(math.log(v) / model.n_aps)
    return _inverse_cdf_unit(F, dn) * model.disk.radius_km


def _delta(point, model):
    dn = _offset(point, model.disk)
    if dn == 0.0:
        return 0.0
    centre = EvalPoint(0.0)
    # Split at the probability level where r1 = R - d. The head is
    # parametrised by u and the tail by v = 1 - u so neither end loses
    # precision near 0 or 1.
    v0 = math.exp(model.n_aps * math.log1p(-float(_cdf_unit(1.0 - dn, dn))))
    u0 = 1.0 - v0

    def diff(r_d, r_0):
        return float(_mean_log_sir(r_d, point, model) - _mean_log_sir(r_0, centre, model))

    def head(u):
        return diff(_r1_of_u(u, dn, model), _r1_of_u(u, 0.0, model))

    def tail(v):
        return diff(_r1_of_tail(v, dn, model), _r1_of_tail(v, 0.0, model))

    val = 0.0
    if u0 > 0.0:
        breaks = [b for b in _U_BREAKS if b < u0]
        val += _integrate.quad(head, 0.0, u0, points=breaks or None, epsabs=1e-13,
                               epsrel=1e-10, limit=500)
    breaks = [v0 * t for t in (1e-6, 1e-4, 0.01, 0.1, 0.5, 0.9, 0.99)]
    val += _integrate.quad(tail, 0.0, v0, points=breaks, epsabs=1e-13 * max(v0, 1e-3),
                           epsrel=1e-10, limit=500)
    return DB_PER_NEPER * val


def delta_sir_avg_db(point, model):
    """Change of the averaged SIR (dB) between offset ``d`` and the centre.

    Evaluated as one integral of the difference of the two integrands over
    the shared probability domain, so the result is not the small difference
    of two large numbers. Exactly 0 at ``d = 0``. Offsets beyond 0.5 R are
    rejected and those beyond 0.2 R warn, since the quantity is meant for
    small offsets.
    """
    _check_sir_model(model)
    point = _as_point(point)
    R = model.disk.radius_km
    if point.d_km > 0.5 * R:
        raise DomainError("delta_sir_avg_db is limited to d <= 0.5 R")
    if point.d_km > 0.2 * R:
        warnings.warn("offset beyond 0.2 R; the small-offset regime no longer holds",
                      RuntimeWarning, stacklevel=2)
    return _delta(point, model)


def delta_profile(model, grid=None):
    """``(d, delta)`` pairs on ``grid`` (default 11 points on [0, 0.5 R])."""
    _check_sir_model(model)
    R = model.disk.radius_km
    grid = np.linspace(0.0, 0.5 * R, 11) if grid is None else np.asarray(grid, dtype=float)
    if np.any(grid < 0) or np.any(grid > 0.5 * R):
        raise DomainError("profile offsets must lie in [0, 0.5 R]")
    return [(float(d), _delta(EvalPoint(float(d)), model)) for d in grid]


def taylor_correction_terms(d, r1, model):
    """Second-order small-offset corrections to the interference moments.

    The boundary terms ``(R + d)^-a`` are expanded to second order in ``d``,
    the distance CDF inside ``r <= R`` is taken equal to its centre value,
    and the sliver ``R < r < R + d`` is integrated exactly. With
    ``delta_k = -k d R^(-k-1) + k(k+1)/2 d^2 R^(-k-2) + int_R^{R+d} G k r^(-k-1) dr``:

        dM1 = (N-1) P e^{s/2} delta_a
        dM2 = 2 (N-1) P^2 e^{2s} delta_2a
              + (N-1)(N-2) P^2 e^{s} (delta_a^2 + 2 E0[r^-a] delta_a)

    The log-domain corrections follow from ``mu = 2 ln M1 - ln(M2) / 2`` and
    ``sigma^2 = ln M2 - 2 ln M1``.
    """
    R = model.disk.radius_km
    if d < 0 or d > 0.2 * R:
        raise DomainError("Taylor corrections need 0 <= d <= 0.2 R")
    if model.n_aps < 2:
        raise DomainError("interference moments need at least 2 APs")
    if not 0 < r1 < R:
        raise DomainError("r1 must lie in (0, R)")
    n, P, s, a = model.n_aps, model.tx_power_mw, model.sigma_z_sq, model.alpha
    x, dn = r1 / R, d / R

    def delta(k):
        taylor = -k * d * R ** (-k - 1) + 0.5 * k * (k + 1) * d * d * R ** (-k - 2)
        sliver = R ** -k * _g_integral_unit(k, x, dn, lower=1.0)
        return taylor + sliver

    centre = EvalPoint(0.0)
    e1 = conditional_inverse_power_moment(a, r1, centre, model.disk)
    e2 = conditional_inverse_power_moment(2.0 * a, r1, centre, model.disk)
    c1 = (n - 1) * P * math.exp(s / 2.0)
    c2 = 2.0 * (n - 1) * P * P * math.exp(2.0 * s)
    c3 = (n - 1) * (n - 2) * P * P * math.exp(s)
    m1, m2 = c1 * e1, c2 * e2 + c3 * e1 * e1
    da, d2a = delta(a), delta(2.0 * a)
    dm1 = c1 * da
    dm2 = c2 * d2a + c3 * (da * da + 2.0 * e1 * da)
    l1, l2 = math.log1p(dm1 / m1), math.log1p(dm2 / m2)
    return TaylorCorrection(dm1, dm2, 2.0 * l1 - 0.5 * l2, -2.0 * l1 + l2)


def fit_delta_poly(samples, degree=3):
    """Least-squares polynomial fit of ``(d, delta)`` samples.

    Raises DomainError when there are fewer than ``degree + 1`` distinct
    offsets or the design matrix is rank deficient.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 2:
        raise DomainError("samples must be (d, delta) pairs")
    if degree < 1:
        raise DomainError("degree must be at least 1")
    d, y = samples[:, 0], samples[:, 1]
    if np.unique(d).size < degree + 1:
        raise DomainError(f"need at least {degree + 1} distinct offsets for degree {degree}")
    scale = max(float(np.max(np.abs(d))), 1e-300)
    V = np.vander(d / scale, degree + 1)
    coef, _, rank, _ = np.linalg.lstsq(V, y, rcond=None)
    if rank < degree + 1:
        raise DomainError(f"rank-deficient fit (rank {rank} < {degree + 1})")
    coef = coef / scale ** np.arange(degree, -1, -1)
    resid = y - np.polyval(coef, d)
    return PolyFit(coef, int(degree), float(np.sqrt(np.mean(resid ** 2))))
