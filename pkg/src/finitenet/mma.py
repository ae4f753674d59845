"""Lognormal moment matching for the conditional SIR/SINR.

Given the nearest-AP distance ``r1``, the interference is a sum of ``N - 1``
exchangeable terms ``P |h_j|^2 r_j^-alpha z_j``. Its first two moments
(``M1``, ``M2``) are matched to a lognormal, the desired-signal term is
matched the same way, and the SIR is then lognormal with

    mu_SIR = mu_num - mu_den,    sigma_SIR^2 = sigma_num^2 + sigma_den^2.

Noise enters as a second (degenerate) lognormal added to the interference
before the final match.
"""

from dataclasses import dataclass, replace
import math
from typing import Optional

import numpy as np

from .errors import DomainError
from .geometry import DiskGeometry, EvalPoint, conditional_inverse_power_moment

__all__ = [
    "NetworkModel",
    "LognormalParams",
    "dbm_to_mw",
    "n_aps_from_density",
    "match_sum_to_lognormal",
    "interference_moments",
    "numerator_params",
    "sir_params",
    "sinr_params",
    "link_params",
]

SHADOW_DB_TO_NEPER = 0.1 * math.log(10.0)


def dbm_to_mw(dbm):
    return 10.0 ** (dbm / 10.0)


def n_aps_from_density(density_per_km2, radius_km):
    """AP count for a density on a disk, ``round(pi R^2 lambda)`` with ties to even."""
    if density_per_km2 <= 0:
        raise DomainError(f"density must be positive, got {density_per_km2}")
    return max(1, round(math.pi * radius_km ** 2 * density_per_km2))


@dataclass(frozen=True)
class NetworkModel:
    """Scenario parameters.

    ``tx_power_dbm`` and ``noise_power_dbm`` are converted to mW once here.
    ``noise_power_dbm=None`` means interference-limited. Path loss is
    ``(r / pathloss_ref_km)^-alpha``; with the default 1 km reference the
    distances in km enter the path loss directly. A 1 m reference
    (``pathloss_ref_km=1e-3``) matches transmit SNRs quoted around 100 dB.
    """

    disk: DiskGeometry
    n_aps: int
    alpha: float
    shadow_std_db: float = 0.0
    tx_power_dbm: float = 20.0
    noise_power_dbm: Optional[float] = None
    pathloss_ref_km: float = 1.0

    def __post_init__(self):
        if int(self.n_aps) != self.n_aps or self.n_aps < 1:
            raise DomainError(f"n_aps must be a positive integer, got {self.n_aps}")
        if not self.alpha > 2:
            raise DomainError(f"alpha must exceed 2, got {self.alpha}")
        if not self.shadow_std_db >= 0:
            raise DomainError(f"shadow_std_db must be non-negative, got {self.shadow_std_db}")
        if not self.pathloss_ref_km > 0:
            raise DomainError("pathloss_ref_km must be positive")
        object.__setattr__(self, "n_aps", int(self.n_aps))

    @classmethod
    def from_density(cls, disk, density_per_km2, alpha, **kwargs):
        return cls(disk, n_aps_from_density(density_per_km2, disk.radius_km), alpha, **kwargs)

    def with_n(self, n_aps):
        return replace(self, n_aps=int(n_aps))

    @property
    def tx_power_mw(self):
        return dbm_to_mw(self.tx_power_dbm)

    @property
    def noise_power_mw(self):
        return 0.0 if self.noise_power_dbm is None else dbm_to_mw(self.noise_power_dbm)

    @property
    def noise_mw_effective(self):
        """Noise power in the frame where path loss is ``r_km^-alpha``."""
        return self.noise_power_mw * self.pathloss_ref_km ** -self.alpha

    @property
    def interference_limited(self):
        return self.noise_power_dbm is None or self.noise_power_mw == 0.0

    @property
    def sigma_z(self):
        return SHADOW_DB_TO_NEPER * self.shadow_std_db

    @property
    def sigma_z_sq(self):
        return self.sigma_z ** 2

    @property
    def density_per_km2(self):
        return self.n_aps / self.disk.area_km2


@dataclass(frozen=True)
class LognormalParams:
    """``X = exp(mu + sigma Z)`` with ``Z`` standard normal. Fields may be arrays."""

    mu: object
    sigma: object

    def __post_init__(self):
        if np.any(np.asarray(self.sigma) < 0):
            raise DomainError("sigma must be non-negative")

    @property
    def sigma_sq(self):
        return np.asarray(self.sigma) ** 2

    @property
    def mean(self):
        return np.exp(self.mu + 0.5 * self.sigma_sq)

    @property
    def second_moment(self):
        return np.exp(2.0 * self.mu + 2.0 * self.sigma_sq)


def _scalar(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _params_from_logs(log_m1, log_m2):
    var = log_m2 - 2.0 * log_m1
    # m2 == m1^2 up to rounding is a point mass
    var = np.where((var < 0) & (var > -1e-12 * np.maximum(1.0, np.abs(log_m2))), 0.0, var)
    if np.any(var < 0):
        raise DomainError("second moment is below the squared first moment")
    return LognormalParams(_scalar(2.0 * log_m1 - 0.5 * log_m2), _scalar(np.sqrt(var)))


def match_sum_to_lognormal(m1, m2):
    """Lognormal with first moment ``m1`` and second moment ``m2``.

    ``mu = 2 ln m1 - ln(m2) / 2`` and ``sigma^2 = ln m2 - 2 ln m1``.
    """
    m1 = np.asarray(m1, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    if np.any(m1 <= 0) or np.any(m2 <= 0):
        raise DomainError("moments must be positive")
    return _params_from_logs(np.log(m1), np.log(m2))


def _check_interference(model):
    if model.n_aps < 2:
        raise DomainError("interference moments need at least 2 APs")


def interference_moments(r1, point, model, cross_term_factor=1.0):
    """First and second moments of the interference given ``r1``.

    ``M1 = (N-1) P e^{s/2} E[r^-a]`` and
    ``M2 = 2 (N-1) P^2 e^{2s} E[r^-2a] + (N-1)(N-2) P^2 e^{s} E[r^-a]^2``
    with ``s = sigma_z^2``. The second term counts ordered pairs of distinct
    interferers. ``cross_term_factor`` scales that term and is only there so
    tests can show that other coefficients disagree with simulation.
    """
    _check_interference(model)
    n, P, s = model.n_aps, model.tx_power_mw, model.sigma_z_sq
    e1 = np.asarray(conditional_inverse_power_moment(model.alpha, r1, point, model.disk))
    e2 = np.asarray(conditional_inverse_power_moment(2.0 * model.alpha, r1, point, model.disk))
    m1 = (n - 1) * P * math.exp(s / 2.0) * e1
    m2 = (2.0 * (n - 1) * P * P * math.exp(2.0 * s) * e2
          + cross_term_factor * (n - 1) * (n - 2) * P * P * math.exp(s) * e1 * e1)
    return _scalar(m1), _scalar(m2)


def numerator_params(r1, model):
    """Lognormal match of the desired signal ``P |h|^2 r1^-alpha z``.

    The exponential fading power has moments 1 and 2, so
    ``mu = ln(P / sqrt 2) - alpha ln r1`` and ``sigma^2 = ln 2 + sigma_z^2``.
    """
    r1 = np.asarray(r1, dtype=float)
    if np.any(r1 <= 0):
        raise DomainError("r1 must be strictly positive")
    mu = math.log(model.tx_power_mw / math.sqrt(2.0)) - model.alpha * np.log(r1)
    sigma = math.sqrt(math.log(2.0) + model.sigma_z_sq)
    return LognormalParams(_scalar(mu), _scalar(np.full_like(r1, sigma)))


def _compose(num, den):
    return LognormalParams(_scalar(np.asarray(num.mu) - np.asarray(den.mu)),
                           _scalar(np.sqrt(num.sigma_sq + den.sigma_sq)))


def _interference_params(r1, point, model):
    m1, m2 = interference_moments(r1, point, model)
    return _params_from_logs(np.log(m1), np.log(m2))


def sir_params(r1, point, model):
    """Lognormal parameters of the SIR conditioned on ``r1`` (noise ignored)."""
    return _compose(numerator_params(r1, model), _interference_params(r1, point, model))


def noisy_denominator_params(interference, noise_mw):
    """Match ``noise + I`` to a lognormal, ``I`` lognormal and noise constant."""
    mu_i = np.asarray(interference.mu)
    s2_i = interference.sigma_sq
    mean_i = np.exp(mu_i + s2_i / 2.0)
    m1 = noise_mw + mean_i
    m2 = noise_mw ** 2 + np.exp(2.0 * mu_i + 2.0 * s2_i) + 2.0 * noise_mw * mean_i
    return match_sum_to_lognormal(m1, m2)


def sinr_params(r1, point, model):
    """Lognormal parameters of the SINR conditioned on ``r1``.

    With a single AP there is no interference and the denominator is the
    noise alone (a point mass).
    """
    noise = model.noise_mw_effective
    num = numerator_params(r1, model)
    if model.n_aps == 1:
        if noise <= 0:
            raise DomainError("a single AP without noise has unbounded SINR")
        shape = np.shape(num.mu)
        den = LognormalParams(_scalar(np.full(shape, math.log(noise))), _scalar(np.zeros(shape)))
        return _compose(num, den)
    inter = _interference_params(r1, point, model)
    if noise <= 0:
        return _compose(num, inter)
    return _compose(num, noisy_denominator_params(inter, noise))


def link_params(r1, point, model):
    """SIR parameters for interference-limited models, SINR parameters otherwise."""
    if model.interference_limited:
        return sir_params(r1, point, model)
    return sinr_params(r1, point, model)
