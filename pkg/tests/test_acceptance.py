"""End-to-end acceptance checks, one test per criterion.

Each test records a single PASS/FAIL line (printed in the terminal summary)
and then asserts, so a failing criterion shows up both in the summary and as
a failed test.
"""

import math
import time
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st
from scipy import stats

from conftest import record
from finitenet import (
    CoverageQuery,
    DesignSpec,
    DiskGeometry,
    EvalPoint,
    NetworkModel,
    RadialRule,
    Scenario,
    SimConfig,
    conditional_inverse_power_moment,
    coverage_probability,
    delta_profile,
    delta_sir_avg_db,
    ergodic_capacity,
    estimate_coverage,
    estimate_ergodic,
    fit_delta_poly,
    interference_moments,
    interferer_conditional_cdf,
    nearest_ap_cdf,
    q_function,
    required_aps,
    sample_ap_positions,
    simulate_sinr,
    taylor_correction_terms,
    worst_ergodic_alpha4,
)
from finitenet.montecarlo import estimate_interference_moments, substream

pytestmark = pytest.mark.acceptance

DISK = DiskGeometry(1.0)
CENTRE = EvalPoint(0.0)


def density_model(lam, alpha, shadow_db=0.0):
    return NetworkModel.from_density(DISK, lam, alpha, shadow_std_db=shadow_db)


def gap_readings(lam_sparse, lam_dense, alpha, shadow_db):
    """Centre coverage at T = 1 for two densities: (sparse, dense, points, relative %)."""
    hi = coverage_probability(1.0, CENTRE, density_model(lam_sparse, alpha, shadow_db))
    lo = coverage_probability(1.0, CENTRE, density_model(lam_dense, alpha, shadow_db))
    return hi, lo, 100.0 * (hi - lo), 100.0 * (hi - lo) / lo


# 1. analytic coverage against simulation along the radius

SCENARIOS_1 = [(a, s, lam) for lam in (1, 30) for a in (3.0, 3.87) for s in (0.0, 6.0)]
RESULTS_1 = {}


@pytest.mark.parametrize("alpha,shadow_db,lam", SCENARIOS_1)
def test_c1_scenario(alpha, shadow_db, lam):
    m = density_model(lam, alpha, shadow_db)
    start = time.perf_counter()
    mad = []
    for d in np.round(np.arange(0.0, 1.0, 0.1), 1):
        cp = coverage_probability(1.0, EvalPoint(d), m)
        mc = estimate_coverage(1.0, EvalPoint(d), m, SimConfig(100_000, seed=7))
        mad.append(abs(cp - mc.value))
    elapsed = time.perf_counter() - start
    bound = 0.05 if lam == 1 else 0.095
    RESULTS_1[(alpha, shadow_db, lam)] = (float(np.mean(mad)), bound, elapsed)
    assert np.mean(mad) <= bound
    assert elapsed < 120.0


def test_c1_summary():
    if len(RESULTS_1) < len(SCENARIOS_1):
        pytest.skip("scenario runs missing")
    ok = all(v[0] <= v[1] and v[2] < 120.0 for v in RESULTS_1.values())
    worst = max(RESULTS_1.items(), key=lambda kv: kv[1][0] / kv[1][1])
    slowest = max(v[2] for v in RESULTS_1.values())
    (a, s, lam), (mad, bound, _) = worst
    record(1, ok, f"worst MAD {100 * mad:.2f} pts (bound {100 * bound:.1f}) at alpha={a}, "
                  f"sigma={s:g} dB, lambda={lam}; slowest scenario {slowest:.0f} s")
    assert ok


# 2. sparse-versus-dense gap at the centre

def test_c2_density_gap():
    hi, lo, pts, rel = gap_readings(1, 30, 3.87, 0.0)
    ok = 23.0 <= pts <= 33.0 or 23.0 <= rel <= 33.0
    record(2, ok, f"CP(1)={hi:.4f} CP(30)={lo:.4f}: absolute {pts:.1f} pts, relative {rel:.1f}% "
                  f"(accept 23-33 either way)")
    assert ok


# 3. shadowed gaps

def test_c3_shadowed_gaps():
    parts, ok = [], True
    for alpha, target in ((3.87, 34.0), (3.0, 63.0)):
        _, _, pts, rel = gap_readings(1, 30, alpha, 6.0)
        hit = abs(pts - target) <= 7.0 or abs(rel - target) <= 7.0
        ok &= hit
        parts.append(f"alpha={alpha}: abs {pts:.1f} / rel {rel:.1f} vs {target:g}+-7")
    record(3, ok, "; ".join(parts))
    assert ok


# 4. design example

def test_c4_design_example():
    shadowed = required_aps(DesignSpec("capacity_coverage", 5.0,
                                       Scenario(1.0, 3.87, shadow_std_db=6.0), min_probability=0.6))
    plain = required_aps(DesignSpec("capacity_coverage", 5.0, Scenario(1.0, 3.87),
                                    min_probability=0.6))
    sc = Scenario(1.0, 3.87, shadow_std_db=6.0)
    cp5 = coverage_probability(CoverageQuery.capacity(5.0), CENTRE, sc.model(5))
    ok = shadowed == 5 and plain == 4
    record(4, ok, f"sigma=6 dB -> N={shadowed} (expected 5; CP at N=5 is {cp5:.4f}); "
                  f"sigma=0 -> N={plain} (expected 4)")
    assert ok


# 5. closed-form worst-case ergodic capacity

def test_c5_closed_form():
    ok, parts = True, []
    for shadow_db in (0.0, 6.0):
        worst_int, worst_mc = (0.0, None), (0.0, None)
        for n in range(3, 31):
            m = NetworkModel(DISK, n, 4.0, shadow_std_db=shadow_db)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                cf = worst_ergodic_alpha4(n, shadow_db)
            integral = ergodic_capacity(CENTRE, m)
            mc = estimate_ergodic(CENTRE, m, SimConfig(100_000, seed=500 + n))
            e_int = abs(cf - integral) / integral
            e_mc = max(abs(cf - mc.value) - 3 * mc.std_error, 0.0) / mc.value
            ok &= e_int <= 0.10 and e_mc <= 0.10
            if e_int >= worst_int[0]:
                worst_int = (e_int, (n, cf, integral))
            if e_mc >= worst_mc[0]:
                worst_mc = (e_mc, (n, cf, mc.value))
        (ei, (n1, c1, v1)), (em, (n2, _, v2)) = worst_int, worst_mc
        parts.append(f"sigma={shadow_db:g}: worst {100 * ei:.0f}% vs integral (N={n1}: {c1:.2f} vs "
                     f"{v1:.2f}), {100 * em:.0f}% vs MC (N={n2}: MC {v2:.2f})")
    record(5, ok, "; ".join(parts))
    assert ok


# 6. moment matching against simulated interference

def test_c6_moment_oracle():
    grid = [(n, r1, s) for n in (3, 10, 30) for r1 in (0.2, 0.5, 0.9) for s in (0.0, 3.0, 6.0)]
    point = EvalPoint(0.5)
    worst, printed_misses = 0.0, 0
    for k, (n, r1, s) in enumerate(grid):
        m = NetworkModel(DISK, n, 3.87, shadow_std_db=s, tx_power_dbm=0.0)
        e1, e2 = estimate_interference_moments(r1, point, m, 200_000, seed=1000 + k)
        a1, a2 = interference_moments(r1, point, m)
        _, p2 = interference_moments(r1, point, m, cross_term_factor=4.0)
        worst = max(worst, abs(e1.value - a1) / e1.std_error, abs(e2.value - a2) / e2.std_error)
        printed_misses += abs(e2.value - p2) > 3 * e2.std_error

    fixture = NetworkModel(DISK, 3, 4.0, tx_power_dbm=0.0)
    _, f2 = estimate_interference_moments(0.5, CENTRE, fixture, 1_000_000, seed=66)
    _, ours = interference_moments(0.5, CENTRE, fixture)
    _, printed = interference_moments(0.5, CENTRE, fixture, cross_term_factor=4.0)
    z_ours = abs(f2.value - ours) / f2.std_error
    z_printed = abs(f2.value - printed) / f2.std_error
    ok = worst <= 3.0 and z_ours <= 3.0 and z_printed > 10.0
    record(6, ok, f"grid max |z| {worst:.2f} over 27 points (printed coefficient misses {printed_misses}/27); "
                  f"fixture M2 {f2.value:.1f}: z={z_ours:.2f} vs {ours:.0f}, z={z_printed:.0f} vs {printed:.0f}")
    assert ok


# 7. distance laws

def test_c7_distance_laws():
    pvals = {}
    for k, (n, d) in enumerate((n, d) for n in (1, 3, 10, 30) for d in (0.0, 0.5)):
        point = EvalPoint(d)
        rng = substream(70 + k, 0, 0)
        pos = sample_ap_positions(n, DISK, rng, size=20_000)
        dist = np.hypot(pos[..., 0] - d, pos[..., 1])
        nearest = dist.min(axis=1)
        pvals[(n, d, "nearest")] = stats.kstest(
            nearest, lambda x: nearest_ap_cdf(x, n, point, DISK)).pvalue
        if n > 1:
            # one non-serving AP per placement, mapped through its conditional CDF
            first = dist.argmin(axis=1)
            pick = (first + 1 + rng.integers(n - 1, size=first.size)) % n
            rj = dist[np.arange(first.size), pick]
            pit = np.fromiter((interferer_conditional_cdf(a, b, point, DISK)
                               for a, b in zip(rj, nearest)), float, rj.size)
            pvals[(n, d, "interferer")] = stats.kstest(pit, "uniform").pvalue
    lowest = min(pvals, key=pvals.get)
    ok = min(pvals.values()) > 0.01
    record(7, ok, f"{len(pvals)} KS tests, min p={pvals[lowest]:.3f} at N={lowest[0]}, "
                  f"d={lowest[1]:g}, {lowest[2]} law")
    assert ok


# 8. worst-case location on the radial profile

D_GRID_8 = np.round(np.arange(0.0, 1.0001, 0.05), 2)


def _mc_profile_ok(m, seed):
    """Paired comparison of per-trial coverage indicators under common random numbers."""
    ind = np.array([simulate_sinr(EvalPoint(d), m, SimConfig(100_000, seed=seed)) > 1.0
                    for d in D_GRID_8], dtype=float)
    diff = ind - ind[0]
    se = diff.std(axis=1, ddof=1) / math.sqrt(ind.shape[1])
    cp = ind.mean(axis=1)
    min_ok = bool(np.all(diff[1:].mean(axis=1) > -3 * se[1:]))
    inner = 1 + int(np.argmax(cp[1:-1]))
    tail = ind[inner] - ind[-1]
    tail_se = tail.std(ddof=1) / math.sqrt(tail.size)
    max_ok = cp[inner] > cp[0] and tail.mean() > -3 * tail_se
    return min_ok and max_ok, int(np.argmax(cp))


def test_c8_worst_case_location():
    notes, ok = [], True
    for alpha in (3.0, 3.87):
        for lam in (1, 2, 10):
            m = density_model(lam, alpha)
            cp = np.array([RadialRule(EvalPoint(d), m).coverage(1.0) for d in D_GRID_8])
            i_max = int(np.argmax(cp))
            spot = max(abs(coverage_probability(1.0, EvalPoint(D_GRID_8[i]), m) - cp[i])
                       for i in (0, i_max))
            a_ok = int(np.argmin(cp)) == 0 and 0 < i_max < len(D_GRID_8) - 1 and spot < 1e-6
            mc_ok, mc_max = _mc_profile_ok(m, seed=800 + lam)
            ok &= a_ok and mc_ok
            notes.append(f"a={alpha:g},l={lam}: max@{D_GRID_8[i_max]:g}/{D_GRID_8[mc_max]:g}"
                         f"{'' if a_ok and mc_ok else ' (!)'}")
    record(8, ok, "analytic/MC argmax " + "; ".join(notes))
    assert ok


# 9. offset correction of the averaged SIR

TABLE = {1: [3.91e-8, 1.13e-5, 3.31e-4, -4.38e-4],
         2: [1.06e-7, -5.94e-6, 2.31e-4, -7.77e-5],
         10: [0.0, 1.21e-8, 9.41e-5, -6.73e-4]}


def _same_shape(ours, ref):
    """Same sign and within one decade; a zero reference needs a negligible coefficient."""
    out = []
    for a, b in zip(ours, ref):
        if b == 0.0:
            out.append(abs(a) <= 1e-8)
        else:
            out.append(a * b > 0 and abs(math.log10(abs(a) / abs(b))) <= 1.0)
    return out


def test_c9_offset_correction():
    fig = {lam: NetworkModel.from_density(DISK, lam, 3.87, shadow_std_db=6.0) for lam in (1, 2, 10)}
    zero_ok = delta_sir_avg_db(CENTRE, fig[1]) == 0.0

    taylor_err, diff_ratio = 0.0, []
    for lam in (1, 10):
        m = fig[lam]
        for r1 in (0.1, 0.3, 0.5, 0.75):
            b1, b2 = interference_moments(r1, CENTRE, m)
            for d in (0.005, 0.01, 0.02):
                x1, x2 = interference_moments(r1, EvalPoint(d), m)
                t = taylor_correction_terms(d, r1, m)
                taylor_err = max(taylor_err, abs(t.d_m1 - (x1 - b1)) / b1,
                                 abs(t.d_m2 - (x2 - b2)) / b2)
                diff_ratio.append(t.d_m1 / (x1 - b1))
    taylor_ok = taylor_err <= 1e-3

    grid = np.round(np.arange(0.0, 0.5001, 0.05), 2)
    shape_ok, resid_ok, peaks, fits = True, True, {}, []
    for lam, m in fig.items():
        rows = np.array(delta_profile(m, grid))
        peaks[lam] = float(np.max(np.abs(rows[:, 1])))
        km = fit_delta_poly(rows)
        metres = fit_delta_poly(np.column_stack([1000 * rows[:, 0], rows[:, 1]]))
        resid_ok &= km.residual_rms < 0.05 * peaks[lam]
        match = max(sum(_same_shape(f.coefficients, TABLE[lam])) for f in (km, metres))
        shape_ok &= match == 4
        fits.append(f"l={lam} {match}/4")
    lams = sorted(peaks)
    decreasing = all(peaks[a] > peaks[b] for a, b in zip(lams, lams[1:]))

    ok = zero_ok and taylor_ok and shape_ok and resid_ok and decreasing
    record(9, ok, f"delta(0)=0 {zero_ok}; Taylor max rel err {taylor_err:.1e} (captures "
                  f"{min(diff_ratio):.2f}-{max(diff_ratio):.2f} of the exact change); "
                  f"table coefficients matched {', '.join(fits)}; residual<5% {resid_ok}; "
                  f"max|delta| {peaks[1]:.2f}>{peaks[2]:.2f}>{peaks[10]:.2f} dB {decreasing}")
    assert ok


# 10. numerical hygiene

scenarios_10 = st.builds(
    dict,
    n=st.integers(1, 60),
    alpha=st.floats(2.2, 6.0),
    shadow_db=st.floats(0.0, 10.0),
    radius=st.floats(0.2, 5.0),
    frac=st.floats(0.0, 1.0),
    noise_dbm=st.one_of(st.none(), st.floats(-40.0, 10.0)),
)


def _model_10(sc):
    noise = sc["noise_dbm"] if sc["n"] > 1 else (sc["noise_dbm"] if sc["noise_dbm"] is not None
                                                 else 0.0)
    return (NetworkModel(DiskGeometry(sc["radius"]), sc["n"], sc["alpha"],
                         shadow_std_db=sc["shadow_db"], noise_power_dbm=noise),
            EvalPoint(sc["frac"] * sc["radius"]))


def _probability_checks(cp_t, cp_c, tol):
    bounded = np.all((cp_t >= 0) & (cp_t <= 1)) and np.all((cp_c >= 0) & (cp_c <= 1))
    return bool(bounded and np.all(np.diff(cp_t) <= tol) and np.all(np.diff(cp_c) <= tol))


THRESHOLDS_10 = 10.0 ** (np.arange(-20.0, 31.0, 5.0) / 10.0)
C0_10 = np.array([0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0])


def test_c10_numerical_hygiene():
    moment_err = 0.0
    for a in (2.5, 3.0, 3.87, 4.0, 7.74):
        for r1 in (0.05, 0.2, 0.5, 0.8, 0.95):
            closed = conditional_inverse_power_moment(a, r1, CENTRE, DISK, method="closed")
            quad = conditional_inverse_power_moment(a, r1, CENTRE, DISK, method="quad")
            moment_err = max(moment_err, abs(closed - quad) / closed)

    xs = np.concatenate([np.linspace(-10, 10, 401), [-37.0, 0.1234, 15.0, 30.0]])
    q_err = max(abs(q_function(x) - float(mpmath.erfc(x / mpmath.sqrt(2)) / 2)) for x in xs)

    failures = []

    @settings(max_examples=1000, deadline=None, database=None, derandomize=True,
              suppress_health_check=[HealthCheck.too_slow])
    @given(scenarios_10)
    def fixed_rule(sc):
        m, p = _model_10(sc)
        rule = RadialRule(p, m)
        if not _probability_checks(rule.coverage(THRESHOLDS_10), rule.capacity_coverage(C0_10), 1e-12):
            failures.append(("rule", sc))

    @settings(max_examples=25, deadline=None, database=None, derandomize=True,
              suppress_health_check=[HealthCheck.too_slow])
    @given(scenarios_10)
    def adaptive(sc):
        m, p = _model_10(sc)
        cp_t = coverage_probability(THRESHOLDS_10, p, m)
        cp_c = coverage_probability(
            np.array([CoverageQuery.capacity(c).sinr_threshold(m.n_aps) for c in C0_10]), p, m)
        if not _probability_checks(cp_t, cp_c, 2e-7):
            failures.append(("adaptive", sc))

    fixed_rule()
    adaptive()
    ok = moment_err <= 1e-6 and q_err <= 1e-10 and not failures
    record(10, ok, f"closed vs quad moments {moment_err:.1e}; Q error {q_err:.1e}; "
                   f"{len(failures)} property failures over 1000 fixed-rule + 25 adaptive scenarios")
    assert ok, failures[:3]
