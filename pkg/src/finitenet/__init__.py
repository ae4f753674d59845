"""Coverage and capacity of a finite disk network with a fixed number of access points.

N access points are dropped uniformly in a disk; a user at distance ``d``
from the centre is served by the nearest one. Coverage is computed by
matching the conditional SIR/SINR to a lognormal and averaging over the
nearest-AP distance, and checked against a Monte-Carlo simulator.
"""

__version__ = "0.1.0"

from .errors import DomainError, InfeasibleDesignError, QuadratureError
from .geometry import (
    DiskGeometry,
    EvalPoint,
    arbitrary_ap_cdf,
    arbitrary_ap_pdf,
    conditional_inverse_power_moment,
    interferer_conditional_cdf,
    nearest_ap_cdf,
    nearest_ap_pdf,
    nearest_ap_quantile,
)
from .mma import (
    LognormalParams,
    NetworkModel,
    interference_moments,
    match_sum_to_lognormal,
    n_aps_from_density,
    numerator_params,
    sinr_params,
    sir_params,
)
from .coverage import (
    CoverageQuery,
    RadialRule,
    capacity_coverage,
    conditional_coverage,
    coverage_probability,
    ergodic_capacity,
    q_function,
)
from .closedform import harmonic_number, harmonic_number_approx, worst_ergodic_alpha4
from .perturb import (
    PolyFit,
    delta_profile,
    delta_sir_avg_db,
    fit_delta_poly,
    sir_avg_db,
    taylor_correction_terms,
)
from .montecarlo import (
    ChannelDraw,
    SimConfig,
    SimEstimate,
    estimate_coverage,
    estimate_ergodic,
    realize_sinr,
    sample_ap_positions,
    simulate_sinr,
)
from .design import DesignSpec, Scenario, density_sweep, radial_profile, required_aps, snr_sweep
