"""AP-count dimensioning and sweeps."""

import numpy as np
import pytest

from finitenet import (
    DesignSpec,
    DomainError,
    EvalPoint,
    InfeasibleDesignError,
    Scenario,
    coverage_probability,
    density_sweep,
    ergodic_capacity,
    radial_profile,
    required_aps,
    snr_sweep,
)
from finitenet import design
from finitenet.design import _worst_points, solve_required_aps

BASE = Scenario(radius_km=1.0, alpha=3.87)
SHADOWED = Scenario(radius_km=1.0, alpha=3.87, shadow_std_db=6.0)


class TestRequiredAps:
    def test_unshadowed_design_example(self):
        assert required_aps(DesignSpec("capacity_coverage", 5.0, BASE, min_probability=0.6)) == 4

    @pytest.mark.xfail(strict=True, reason="solver returns 6 (coverage 0.597 at N=5); see ledger")
    def test_shadowed_design_example(self):
        assert required_aps(DesignSpec("capacity_coverage", 5.0, SHADOWED, min_probability=0.6)) == 5

    def test_result_brackets_target(self):
        res = solve_required_aps(DesignSpec("capacity_coverage", 5.0, SHADOWED, min_probability=0.6))
        assert res.value >= 0.6 > res.previous_value
        assert not res.linear_scan
        assert res.n_aps in res.evaluations

    def test_ergodic_target(self):
        sc = Scenario(radius_km=1.0, alpha=4.0)
        res = solve_required_aps(DesignSpec("ergodic_capacity", 20.0, sc))
        centre = EvalPoint(0.0)
        assert ergodic_capacity(centre, sc.model(res.n_aps)) >= 20.0
        assert ergodic_capacity(centre, sc.model(res.n_aps - 1)) < 20.0

    def test_infeasible(self):
        spec = DesignSpec("capacity_coverage", 5.0, SHADOWED, min_probability=0.99, n_max=8)
        with pytest.raises(InfeasibleDesignError) as info:
            required_aps(spec)
        assert 3 <= info.value.best_n <= 8
        assert info.value.best_value < 0.99

    def test_linear_scan_on_non_monotone_objective(self, monkeypatch):
        # doubling visits 3 then 6 and sees a drop; the scan finds N = 4
        table = {3: 0.5, 4: 0.85, 5: 0.4, 6: 0.2}
        monkeypatch.setattr(design, "_objective", lambda spec, n: table.get(n, 0.99))
        res = solve_required_aps(DesignSpec("capacity_coverage", 1.0, BASE, min_probability=0.8))
        assert res.linear_scan
        assert res.n_aps == 4

    @pytest.mark.parametrize("kw", [dict(target_kind="nope"), dict(c0=0.0),
                                    dict(min_probability=1.0), dict(n_max=2)])
    def test_spec_validation(self, kw):
        args = dict(target_kind="capacity_coverage", c0=5.0, scenario=BASE)
        args.update(kw)
        with pytest.raises(DomainError):
            DesignSpec(**args)

    def test_worst_points(self):
        assert [p.d_km for p in _worst_points(BASE.model(5))] == [0.0]
        noisy = Scenario(radius_km=2.0, alpha=3.87, noise_power_dbm=-10.0)
        assert [p.d_km for p in _worst_points(noisy.model(5))] == [0.0, 2.0]


class TestSweeps:
    def test_radial_profile(self):
        m = SHADOWED.model(3)
        grid = [0.5, 0.0, 0.9]
        rows = radial_profile(m, 1.0, grid)
        assert [d for d, _ in rows] == grid
        assert rows[1][1] == pytest.approx(coverage_probability(1.0, EvalPoint(0.0), m))

    def test_density_sweep(self):
        rows = density_sweep(BASE, [1.0, 30.0], 1.0)
        assert [(lam, n) for lam, n, _ in rows] == [(1.0, 3), (30.0, 94)]
        assert rows[0][2] > rows[1][2]

    def test_snr_sweep_increases(self):
        sc = Scenario(radius_km=1.0, alpha=3.87, pathloss_ref_km=1e-3)
        rows = snr_sweep(sc, [80.0, 100.0, 120.0], 1.0, n_aps=3)
        cps = [cp for _, cp in rows]
        assert np.all(np.diff(cps) > 0)
        limit = coverage_probability(1.0, EvalPoint(0.0), BASE.model(3))
        assert cps[-1] <= limit + 1e-9
