"""Tour of the half-ball gradient symbols and their uniform spectral bounds.

Builds symbol tables for a few kernels and orientations, prints the
coercivity floor and the upper envelope |lambda|/|xi|, and shows the
small-horizon limit lambda -> i xi mode by mode.
"""

import numpy as np

from nlspectral import normalize, build_table, verify_bounds, lambda_radial
from nlspectral.symbols import Orientation

print("=== symbol tables over the lattice |xi|_inf <= 16 ===")
for family, kwargs in [("constant", {}), ("fractional", {"beta": 1.5})]:
    for delta in (0.1, 0.02):
        kernel = normalize(family, 2, horizon=delta, **kwargs)
        tab = build_table(kernel, Orientation.from_angle(0.7), 16)
        rep = verify_bounds(tab)
        print(f"{family:10s} delta={delta:5.2f}  min|lambda|={rep['min_abs']:.6f} "
              f"(at xi={rep['argmin']})  max|lambda|/|xi|={rep['max_ratio']:.6f} "
              f"<= 2*sqrt(2) = {2*np.sqrt(2):.6f}")

print()
print("=== the orientation only enters the real part ===")
kernel = normalize("constant", 2, horizon=0.1)
for angle in (0.0, 1.0, 2.5):
    tab = build_table(kernel, Orientation.from_angle(angle), 4)
    lam = tab.lam_at((3, 4))
    print(f"n at angle {angle:3.1f}: Re lambda = {lam.real}, Im lambda = {lam.imag}")
print("Im lambda is Lambda(|xi|) xi/|xi| with Lambda(5) =",
      lambda_radial(kernel, 5.0))

print()
print("=== vanishing horizon recovers the local gradient symbol i xi ===")
for delta in (0.1, 0.01, 0.001):
    kernel = normalize("constant", 2, horizon=delta)
    tab = build_table(kernel, Orientation.from_angle(0.7), 2)
    lam = tab.lam_at((1, 0))
    print(f"delta={delta:6.3f}  |lambda - i xi| = {np.linalg.norm(lam - 1j*np.array([1,0])):.2e}")
