"""The Neil parabola z^3 = w^2 as a distinguished variety.

Over each z on the unit circle both roots w = +-z^(3/2) have modulus one,
so the curve leaves the bidisk only through the torus.  Inside, every fiber
has two points except over z = 0, where the cusp sits.
"""

import numpy as np

from varpick.variety import SamplePlan, certify_distinguished, fiber, neil_spec, reflect_point, sample_points

spec = neil_spec()
print("bidegree:", spec.bidegree)

rep = certify_distinguished(spec, circle_samples=256)
print(f"circle fibers on the torus: {rep.passed} (worst | |w| - 1 | = {rep.worst_deviation:.1e})")

# fibers over a few interior z
for z in (0.25, 0.0, 0.5j):
    fb = fiber(spec, z)
    print(f"z = {z}: roots {np.round(fb.roots, 6)}  multiplicities {fb.multiplicities}")

# random interior points and their partners on the exterior sheet
pts = sample_points(spec, SamplePlan(5, seed=7))
for p in pts:
    r = reflect_point(spec, p)
    print(f"({p.z:.3f}, {p.w:.3f}) -> ({r.z:.3f}, {r.w:.3f}),  |z^3 - w^2| = {abs(r.z**3 - r.w**2):.1e}")
