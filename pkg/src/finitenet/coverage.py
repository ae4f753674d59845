"""Analytic SIR/SINR coverage, capacity coverage and ergodic capacity.

Coverage at a point averages the conditional lognormal tail over the
nearest-AP distance:

    CP(T) = int_0^{R+d} Q((ln T - mu(r1)) / sigma(r1)) f_R1(r1) dr1.

The integral is taken in the probability domain ``u = F_R1(r1)``, which
turns it into ``int_0^1 Q(...)(r1(u)) du``. The integrand is then bounded
and does not pile up near ``r1 = 0`` when N is large. The breakpoints at
``u = 0.01, ..., 0.99`` are the quantiles of the nearest-AP distance.
"""

from dataclasses import dataclass
from functools import cached_property
import math

import numpy as np
from scipy import integrate, special

from . import _integrate
from .errors import DomainError
from .geometry import EvalPoint, nearest_ap_quantile, _offset, _inverse_cdf_unit
from .mma import link_params

__all__ = [
    "CoverageQuery",
    "ErgodicResult",
    "q_function",
    "conditional_coverage",
    "coverage_probability",
    "capacity_coverage",
    "capacity_threshold",
    "ergodic_capacity",
    "RadialRule",
]

COVERAGE_EPSABS = 1e-7
ERGODIC_TRUNCATION = 1e-6
_QUANTILE_BREAKS = tuple(np.round(np.arange(0.01, 1.0, 0.01), 2))


@dataclass(frozen=True)
class CoverageQuery:
    """Coverage question: ``SINR > T`` (linear T) or ``capacity > C0`` (b/s/Hz)."""

    threshold_kind: str
    threshold_value: float

    def __post_init__(self):
        if self.threshold_kind == "sir_sinr_linear":
            if not self.threshold_value > 0:
                raise DomainError("SIR/SINR threshold must be positive")
        elif self.threshold_kind == "capacity_bps_hz":
            if not self.threshold_value >= 0:
                raise DomainError("capacity threshold must be non-negative")
        else:
            raise DomainError(f"unknown threshold kind {self.threshold_kind!r}")

    @classmethod
    def sinr(cls, threshold_linear):
        return cls("sir_sinr_linear", float(threshold_linear))

    @classmethod
    def sinr_db(cls, threshold_db):
        return cls("sir_sinr_linear", 10.0 ** (threshold_db / 10.0))

    @classmethod
    def capacity(cls, c0):
        return cls("capacity_bps_hz", float(c0))

    def sinr_threshold(self, n_aps):
        """Equivalent linear SINR threshold for a model with ``n_aps`` APs."""
        if self.threshold_kind == "sir_sinr_linear":
            return self.threshold_value
        return capacity_threshold(self.threshold_value, n_aps)


def capacity_threshold(c0, n_aps):
    """SINR threshold ``2^(C0/N) - 1`` equivalent to per-user capacity ``C0``."""
    return np.expm1(np.asarray(c0, dtype=float) * math.log(2.0) / n_aps)


def q_function(x):
    """Standard normal tail probability ``Q(x) = erfc(x / sqrt 2) / 2``."""
    out = 0.5 * special.erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(out) if np.ndim(out) == 0 else out


def _log_threshold(T):
    T = np.asarray(T, dtype=float)
    if np.any(T < 0):
        raise DomainError("threshold must be non-negative")
    with np.errstate(divide="ignore"):
        return np.log(T)


def _tail(log_t, mu, sigma):
    """Q((log_t - mu) / sigma) with sigma = 0 read as a step at exp(mu)."""
    log_t, mu, sigma = np.broadcast_arrays(np.asarray(log_t, float), np.asarray(mu, float),
                                           np.asarray(sigma, float))
    with np.errstate(divide="ignore", invalid="ignore"):
        z = (log_t - mu) / sigma
    step = np.where(log_t < mu, 1.0, 0.0)
    return np.where(sigma > 0, 0.5 * special.erfc(z / math.sqrt(2.0)), step)


def conditional_coverage(T, params):
    """P(X > T) for a lognormal ``X`` with the given parameters."""
    out = _tail(_log_threshold(T), params.mu, params.sigma)
    return float(out) if out.ndim == 0 else out


def _as_point(point):
    return point if isinstance(point, EvalPoint) else EvalPoint(float(point))


def _check_model(model):
    if model.n_aps < 2 and model.interference_limited:
        raise DomainError("interference-limited coverage needs at least 2 APs")


def _thresholds(query, model):
    if isinstance(query, CoverageQuery):
        return query.sinr_threshold(model.n_aps)
    return query


def _r1_of_u(u, point, model):
    """Nearest-AP distance at probability level u (scalar)."""
    dn = _offset(point, model.disk)
    F = -math.expm1(math.log1p(-u) / model.n_aps)
    return _inverse_cdf_unit(F, dn) * model.disk.radius_km


def coverage_probability(query, point, model, epsabs=COVERAGE_EPSABS):
    """Coverage probability ``P(SINR > T)`` averaged over AP placements.

    ``query`` is a :class:`CoverageQuery` or a linear threshold (scalar or
    array; an array returns one probability per threshold). Models without
    noise give SIR coverage.
    """
    _check_model(model)
    point = _as_point(point)
    T = _thresholds(query, model)
    log_t = np.atleast_1d(_log_threshold(T))

    def integrand(u):
        r1 = _r1_of_u(u, point, model)
        p = link_params(r1, point, model)
        return _tail(log_t, p.mu, p.sigma)

    val = _integrate.quad_vec(integrand, 0.0, 1.0, epsabs=epsabs, epsrel=0.0,
                              points=_QUANTILE_BREAKS)
    val = np.clip(val, 0.0, 1.0)
    return float(val[0]) if np.ndim(T) == 0 else val.reshape(np.shape(T))


def capacity_coverage(c0, point, model, epsabs=COVERAGE_EPSABS):
    """P(N log2(1 + SINR) > C0); the same integral at ``T = 2^(C0/N) - 1``."""
    if isinstance(c0, CoverageQuery):
        if c0.threshold_kind != "capacity_bps_hz":
            raise DomainError("capacity_coverage needs a capacity query")
        c0 = c0.threshold_value
    c0 = np.asarray(c0, dtype=float)
    if np.any(c0 < 0):
        raise DomainError("C0 must be non-negative")
    return coverage_probability(capacity_threshold(c0, model.n_aps), point, model, epsabs=epsabs)


class RadialRule:
    """Fixed quadrature rule over the nearest-AP distance for one (point, model).

    Composite Gauss-Legendre in the probability domain, with panels refined
    toward both ends. Link parameters are computed once at the nodes, after
    which coverage at any batch of thresholds is a weighted sum. Used where
    coverage is needed at hundreds of thresholds (ergodic capacity).
    """

    def __init__(self, point, model, nodes_per_panel=12):
        _check_model(model)
        self.point = _as_point(point)
        self.model = model
        edges = np.unique(np.concatenate([
            [0.0, 1e-6, 1e-5, 1e-4, 1e-3, 0.005], np.arange(0.01, 1.0, 0.01),
            [0.995, 0.999, 1 - 1e-4, 1 - 1e-5, 1 - 1e-6, 1.0]]))
        x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
        lo, hi = edges[:-1, None], edges[1:, None]
        self.u = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
        self.weights = (0.5 * (hi - lo) * w).ravel()

    @cached_property
    def r1(self):
        if _offset(self.point, self.model.disk) == 0.0:
            return np.asarray(nearest_ap_quantile(self.u, self.model.n_aps, self.point,
                                                  self.model.disk))
        return np.array([_r1_of_u(u, self.point, self.model) for u in self.u])

    @cached_property
    def params(self):
        return link_params(self.r1, self.point, self.model)

    def coverage(self, T):
        """Coverage at linear threshold(s) ``T``."""
        log_t = np.atleast_1d(_log_threshold(T))
        p = self.params
        tails = _tail(log_t[:, None], np.asarray(p.mu)[None, :], np.asarray(p.sigma)[None, :])
        out = np.clip(tails @ self.weights, 0.0, 1.0)
        return float(out[0]) if np.ndim(T) == 0 else out.reshape(np.shape(T))

    def capacity_coverage(self, c0):
        return self.coverage(capacity_threshold(c0, self.model.n_aps))


@dataclass(frozen=True)
class ErgodicResult:
    value: float
    upper_limit: float
    abserr: float


def _ergodic_upper_limit(rule, tol):
    c = float(rule.model.n_aps)
    while rule.capacity_coverage(c) >= tol:
        c *= 2.0
        if c > 1e7:
            raise DomainError("capacity coverage does not decay; cannot truncate")
    return c


def ergodic_capacity(point, model, full_output=False, rule=None):
    """Ergodic per-user capacity (b/s/Hz) as the integral of capacity coverage over C0.

    The C0 range is cut where the coverage falls below 1e-6, found by
    doubling from C0 = N. With ``full_output`` an :class:`ErgodicResult`
    carrying the truncation point and integration error is returned.
    """
    rule = rule or RadialRule(point, model)
    upper = _ergodic_upper_limit(rule, ERGODIC_TRUNCATION)
    value, abserr = integrate.quad(lambda c: rule.capacity_coverage(c), 0.0, upper,
                                   epsabs=1e-7, epsrel=1e-9, limit=400)
    value = max(value, 0.0)
    if full_output:
        return ErgodicResult(value, upper, abserr)
    return value


def ergodic_capacity_trapezoid(point, model, n_grid=20001, rule=None):
    """Same integral as :func:`ergodic_capacity` on a uniform C0 grid (cross-check)."""
    rule = rule or RadialRule(point, model)
    upper = _ergodic_upper_limit(rule, ERGODIC_TRUNCATION)
    grid = np.linspace(0.0, upper, n_grid)
    cp = np.concatenate([rule.capacity_coverage(chunk) for chunk in np.array_split(grid, 20)])
    return float(np.trapezoid(cp, grid))
