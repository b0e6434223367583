"""Locate the chaos onsets of the scalar factor map x -> x exp(rho - x).

A period-3 orbit of this map certifies scrambled-set chaos for the full
system and a snap-back repeller certifies chaos in Marotto's sense.  The
scans below locate the smallest growth rate at which each detector
fires and compare it against the reference constants 3.13 and 2.89.
"""

import numpy as np

from qpd import analyze_xi, threshold_scan, xi

# one growth rate in detail
analysis = analyze_xi(3.2)
print(f"rho = {analysis.rho}: fixed point {analysis.fixed_point}, "
      f"multiplier {analysis.multiplier:+.2f}")
print("period-3 cycle:", analysis.period3)
print("cycle closes after three steps:",
      [float(xi(xi(xi(p, 3.2), 3.2), 3.2)) for p in analysis.period3])
w = analysis.snap_back
print(f"snap-back witness: x0 = {w.x0:.6f} returns to the fixed point in "
      f"{w.steps} steps (derivative product {w.derivative_product:.3g})")

# threshold scans with refinement
print()
for kind in ("period3", "snapback"):
    result = threshold_scan(kind, 2.5, 3.5, 0.01)
    print(f"{kind:>8}: first detection at rho = {result.threshold:.4f} "
          f"(resolution {result.resolution:g}, reference {result.reference})")

# detection map on a coarse grid
print()
print("rho    period3  snapback")
for rho in np.arange(2.6, 3.45, 0.1):
    a = analyze_xi(float(rho))
    print(f"{rho:.2f}   {'yes' if a.period3 is not None else 'no ':>3}"
          f"      {'yes' if a.snap_back is not None else 'no'}")
