"""Closed-form worst-case ergodic capacity for path-loss exponent 4.

At the disk centre with ``alpha = 4`` and no noise, the ergodic per-user
capacity admits the approximation

    C ~ N / ln 2 * ( gamma + 1/(2N) + ln(N sqrt(N-2) / (N-1)^(3/2))
                     + ln((N-2)/(N-1)) / 2 + ln(1 + b) / 2
                     + ((1 + b)^N - 1) (ln[(1 + 1.5 e^{-s} (N-2)) / (N-1)] - 1/(2(N-1))) )

with ``b = 2 e^s / (3 (N-2))`` and ``s = sigma_z^2``. The disk radius drops
out. The approximation is derived for ``s <= ln(3/2)``.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np

from .errors import DomainError
from .mma import SHADOW_DB_TO_NEPER

__all__ = [
    "EULER_GAMMA",
    "ClosedFormInputs",
    "harmonic_number",
    "harmonic_number_approx",
    "worst_ergodic_alpha4",
]

EULER_GAMMA = float(np.euler_gamma)
SIGMA_Z_SQ_LIMIT = math.log(1.5)


@dataclass(frozen=True)
class ClosedFormInputs:
    n_aps: int
    sigma_z_sq: float
    euler_gamma: float = EULER_GAMMA

    def __post_init__(self):
        if int(self.n_aps) != self.n_aps or self.n_aps < 3:
            raise DomainError(f"the closed form needs n_aps >= 3, got {self.n_aps}")
        if not self.sigma_z_sq >= 0:
            raise DomainError("sigma_z_sq must be non-negative")

    @classmethod
    def from_shadowing(cls, n_aps, shadow_std_db):
        if not shadow_std_db >= 0:
            raise DomainError("shadow_std_db must be non-negative")
        return cls(n_aps, (SHADOW_DB_TO_NEPER * shadow_std_db) ** 2)

    @property
    def b_bar(self):
        return 2.0 * math.exp(self.sigma_z_sq) / (3.0 * (self.n_aps - 2))


def harmonic_number(n):
    """Exact ``H_n = sum_{k<=n} 1/k``."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    return math.fsum(1.0 / k for k in range(1, int(n) + 1))


def harmonic_number_approx(n):
    """Three-term expansion ``ln n + gamma + 1/(2n)``."""
    if not n >= 1:
        raise DomainError(f"n must be at least 1, got {n}")
    return math.log(n) + EULER_GAMMA + 0.5 / n


def worst_ergodic_alpha4(n_aps, shadow_std_db=0.0):
    """Approximate worst-case (centre) ergodic capacity in b/s/Hz for ``alpha = 4``.

    Interference-limited only. Warns when ``sigma_z^2`` exceeds ``ln(3/2)``,
    the range where the series step behind the ``(1 + b)^N`` factor holds,
    but still evaluates.
    """
    inp = ClosedFormInputs.from_shadowing(n_aps, shadow_std_db)
    n, s, b = inp.n_aps, inp.sigma_z_sq, inp.b_bar
    if s > SIGMA_Z_SQ_LIMIT:
        warnings.warn(f"sigma_z^2 = {s:.4g} exceeds ln(3/2); the closed form may be inaccurate",
                      RuntimeWarning, stacklevel=2)
    bracket = (inp.euler_gamma + 0.5 / n
               + math.log(n) + 0.5 * math.log(n - 2) - 1.5 * math.log(n - 1)
               + 0.5 * math.log((n - 2) / (n - 1))
               + 0.5 * math.log1p(b)
               + math.expm1(n * math.log1p(b))
               * (math.log((1.0 + 1.5 * math.exp(-s) * (n - 2)) / (n - 1)) - 0.5 / (n - 1)))
    return n / math.log(2.0) * bracket
