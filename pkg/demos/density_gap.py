"""Sparse versus dense: coverage at the disk centre for 1 and 30 APs per km^2.

In a finite disk the user at the centre sees interferers from every
direction, so packing in more APs raises interference about as fast as it
shortens the serving link. Run: ``python demos/density_gap.py``.
"""

from finitenet import DiskGeometry, EvalPoint, NetworkModel, coverage_probability

disk = DiskGeometry(1.0)
centre = EvalPoint(0.0)

for alpha, shadow_db in [(3.87, 0.0), (3.87, 6.0), (3.0, 6.0)]:
    cp = {lam: coverage_probability(1.0, centre, NetworkModel.from_density(disk, lam, alpha,
                                                                           shadow_std_db=shadow_db))
          for lam in (1, 30)}
    gap = cp[1] - cp[30]
    print(f"alpha={alpha:<4} sigma={shadow_db:>3} dB  CP(1)={cp[1]:.3f}  CP(30)={cp[30]:.3f}  "
          f"gap {100 * gap:.1f} pts ({100 * gap / cp[30]:.1f}% relative)")
