"""Network dimensioning and parameter sweeps.

``required_aps`` finds the smallest AP count meeting a capacity-coverage or
ergodic-capacity target at the worst-case location. Coverage is observed,
not proven, to grow with N at a fixed per-user capacity target (the
pre-log factor outweighs the extra interference), so the solver checks
monotonicity on its search path and falls back to a linear scan when the
check fails.
"""

from dataclasses import dataclass, field, replace
import logging
from typing import Optional

from .coverage import capacity_coverage, coverage_probability, ergodic_capacity
from .errors import DomainError, InfeasibleDesignError
from .geometry import DiskGeometry, EvalPoint
from .mma import NetworkModel, n_aps_from_density

__all__ = [
    "Scenario",
    "DesignSpec",
    "DesignResult",
    "required_aps",
    "solve_required_aps",
    "radial_profile",
    "density_sweep",
    "snr_sweep",
]

log = logging.getLogger(__name__)

N_MIN = 3


@dataclass(frozen=True)
class Scenario:
    """Everything in a :class:`NetworkModel` except the AP count."""

    radius_km: float
    alpha: float
    shadow_std_db: float = 0.0
    tx_power_dbm: float = 20.0
    noise_power_dbm: Optional[float] = None
    pathloss_ref_km: float = 1.0

    def model(self, n_aps):
        return NetworkModel(DiskGeometry(self.radius_km), int(n_aps), self.alpha,
                            shadow_std_db=self.shadow_std_db, tx_power_dbm=self.tx_power_dbm,
                            noise_power_dbm=self.noise_power_dbm,
                            pathloss_ref_km=self.pathloss_ref_km)

    def n_for_density(self, density_per_km2):
        return n_aps_from_density(density_per_km2, self.radius_km)


@dataclass(frozen=True)
class DesignSpec:
    """Target for :func:`required_aps`.

    ``target_kind`` is ``"capacity_coverage"`` (P(capacity > c0) >=
    ``min_probability``) or ``"ergodic_capacity"`` (ergodic capacity >= c0).
    """

    target_kind: str
    c0: float
    scenario: Scenario
    min_probability: float = 0.5
    n_max: int = 10_000

    def __post_init__(self):
        if self.target_kind not in ("capacity_coverage", "ergodic_capacity"):
            raise DomainError(f"unknown target_kind {self.target_kind!r}")
        if not self.c0 > 0:
            raise DomainError("c0 must be positive")
        if self.target_kind == "capacity_coverage" and not 0 < self.min_probability < 1:
            raise DomainError("min_probability must lie in (0, 1)")
        if self.n_max < N_MIN:
            raise DomainError(f"n_max must be at least {N_MIN}")


@dataclass(frozen=True)
class DesignResult:
    n_aps: int
    value: float
    previous_value: Optional[float]
    evaluations: dict = field(default_factory=dict, repr=False)
    linear_scan: bool = False


def _worst_points(model):
    """Centre only when interference-limited; centre and edge otherwise."""
    if model.interference_limited:
        return (EvalPoint(0.0),)
    return (EvalPoint(0.0), EvalPoint(model.disk.radius_km))


def _objective(spec, n):
    model = spec.scenario.model(n)
    vals = []
    for point in _worst_points(model):
        if spec.target_kind == "capacity_coverage":
            vals.append(capacity_coverage(spec.c0, point, model))
        else:
            vals.append(ergodic_capacity(point, model))
    return min(vals)


def _threshold(spec):
    return spec.min_probability if spec.target_kind == "capacity_coverage" else spec.c0


def solve_required_aps(spec):
    """Smallest ``N >= 3`` meeting the target, with the evaluations made on the way.

    Doubling from N = 3 brackets the answer, binary search narrows it, and
    every evaluated pair is checked for monotonicity. A violation triggers a
    linear scan from N = 3. Raises :class:`InfeasibleDesignError` when no
    ``N <= n_max`` meets the target.
    """
    target = _threshold(spec)
    cache = {}

    def f(n):
        if n not in cache:
            cache[n] = _objective(spec, n)
        return cache[n]

    def monotone():
        ns = sorted(cache)
        return all(cache[a] <= cache[b] + 1e-9 for a, b in zip(ns, ns[1:]))

    def linear_scan():
        log.warning("objective not monotone in N on the search path; scanning linearly")
        for n in range(N_MIN, spec.n_max + 1):
            if f(n) >= target:
                return n
        best = max(cache, key=cache.get)
        raise InfeasibleDesignError(f"no N <= {spec.n_max} meets the target",
                                    best_value=cache[best], best_n=best)

    lo, hi = None, N_MIN
    while f(hi) < target:
        if not monotone():
            n = linear_scan()
            return DesignResult(n, f(n), f(n - 1) if n > N_MIN else None, dict(cache), True)
        if hi >= spec.n_max:
            best = max(cache, key=cache.get)
            raise InfeasibleDesignError(f"no N <= {spec.n_max} meets the target",
                                        best_value=cache[best], best_n=best)
        lo, hi = hi, min(2 * hi, spec.n_max)
    if lo is not None:
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if f(mid) >= target:
                hi = mid
            else:
                lo = mid
    if not monotone():
        n = linear_scan()
        return DesignResult(n, f(n), f(n - 1) if n > N_MIN else None, dict(cache), True)
    prev = f(hi - 1) if hi > N_MIN else None
    return DesignResult(hi, f(hi), prev, dict(cache), False)


def required_aps(spec):
    """Minimum AP count meeting ``spec`` at the worst-case point."""
    return solve_required_aps(spec).n_aps


def radial_profile(model, query, grid):
    """Coverage at each offset in ``grid``, as ``(d_km, coverage)`` rows in input order."""
    return [(float(d), float(coverage_probability(query, EvalPoint(float(d)), model)))
            for d in grid]


def density_sweep(scenario, densities, query, d_km=0.0):
    """Coverage versus AP density; rows ``(density, n_aps, coverage)``.

    Densities map to integer AP counts with ties-to-even rounding.
    """
    rows = []
    for lam in densities:
        n = scenario.n_for_density(lam)
        model = scenario.model(n)
        rows.append((float(lam), n, float(coverage_probability(query, EvalPoint(d_km), model))))
    return rows


def snr_sweep(scenario, snr_t_values_db, query, n_aps, d_km=0.0):
    """Coverage versus transmit SNR ``P / sigma_n^2`` (dB); rows ``(snr_db, coverage)``.

    The transmit power is held and the noise power set to
    ``tx_power_dbm - snr_db``.
    """
    rows = []
    for snr in snr_t_values_db:
        sc = replace(scenario, noise_power_dbm=scenario.tx_power_dbm - float(snr))
        model = sc.model(n_aps)
        rows.append((float(snr), float(coverage_probability(query, EvalPoint(d_km), model))))
    return rows
