"""How many APs does a 1 km disk need for 5 b/s/Hz with probability 0.6?

The target is checked at the worst point (the centre). Shadowing makes the
requirement stricter. Run: ``python demos/design_example.py``.
"""

from finitenet import DesignSpec, EvalPoint, Scenario, capacity_coverage
from finitenet.design import solve_required_aps

for shadow_db in (0.0, 6.0):
    sc = Scenario(radius_km=1.0, alpha=3.87, shadow_std_db=shadow_db)
    res = solve_required_aps(DesignSpec("capacity_coverage", 5.0, sc, min_probability=0.6))
    print(f"sigma={shadow_db:g} dB: N = {res.n_aps} "
          f"(CP {res.value:.4f}; with one AP fewer {res.previous_value:.4f})")
    for n in range(3, res.n_aps + 2):
        cp = capacity_coverage(5.0, EvalPoint(0.0), sc.model(n))
        print(f"    N={n:2d}  P(C > 5) = {cp:.4f}")
