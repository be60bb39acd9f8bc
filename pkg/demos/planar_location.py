"""
Planar location: Weber point and covering polyellipses
======================================================

Minimise the weighted sum of distances with Weiszfeld's method, then pick a
few demand points as foci of the smallest polyellipse covering them all.
"""

import numpy as np

from locbench import generate
from locbench.instances import PlanarDemandSet
from locbench.planar import (bounding_box, contour_grid, covering_radius, select_foci,
                             weiszfeld)

pts = generate("planar", seed=2, k=12)
res = weiszfeld(pts)
print(f"Weber point {res.x.round(4)} with distsum {res.objective:.4f} "
      f"({res.iterations} iterations, stop: {res.reason})")

# The objective history never goes up.
h = np.array(res.history)
print("largest increase along the run:", float(np.max(np.diff(h), initial=0.0)))

# A heavy enough point is itself optimal; the iteration stops on it.
heavy = PlanarDemandSet([[0, 0], [1, 0], [0, 1]], [5.0, 1.0, 1.0])
print("heavy point case:", weiszfeld(heavy, x0=[0, 0]).reason)

# Covering radius of fixed foci is just the largest distsum over demand points.
foci = PlanarDemandSet.unit(pts.points[:2])
cov = covering_radius(foci, pts)
print(f"\ntwo fixed foci cover everything at r = {cov.radius:.3f} (tight at point {cov.attaining})")

exact = select_foci(pts, 3, "exact")
swap = select_foci(pts, 3, "swap")
print(f"best 3 foci {exact.foci_index}: r = {exact.radius:.4f}")
print(f"swap heuristic {swap.foci_index}: r = {swap.radius:.4f}")

# Contour data for an external plotting tool.
grid = contour_grid(pts, bounding_box(pts), 30, 20)
r, c = np.unravel_index(np.argmin(grid.values), grid.values.shape)
print(f"\ncoarse grid minimum near ({grid.x[c]:.2f}, {grid.y[r]:.2f})")
