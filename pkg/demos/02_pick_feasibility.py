"""Pick matrices on the Neil parabola.

A target set that comes from a contractive polynomial passes the Pick test
for every admissible kernel.  The data f(0, 0) = 0.9, f(1/4, 1/8) = 0 do not:
any interpolant pulled back to the disk has zero derivative at the origin,
and the Schwarz lemma for that class forbids such a steep drop.
"""

import numpy as np

from varpick.bipoly import BivariatePolynomial
from varpick.pick import (
    PickProblem,
    builtin_neil_family,
    classical_pick,
    compression_closure,
    dprs_family_check,
    family_feasibility,
    torus_sup,
)
from varpick.variety import SamplePlan, neil_spec, sample_points

spec = neil_spec()
family = builtin_neil_family(64)
print(f"builtin family: {len(family)} kernels")

# genuine multiplier values
rng = np.random.default_rng(3)
nodes = sample_points(spec, SamplePlan(5, seed=11))
q = BivariatePolynomial(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
f = q.scale(0.95 / torus_sup(q))
prob = PickProblem(nodes, [f(p.z, p.w) for p in nodes])
closed = compression_closure(family, nodes, depth=1)
rep = family_feasibility(prob, closed)
print(f"polynomial targets over {len(closed)} kernels: {rep.verdict}, min eig {rep.min_eig:.2e}")

# Schwarz-type violation
nodes = [spec.point(t ** 2, t ** 3) for t in (0.0, 0.5)]
rep = family_feasibility(PickProblem(nodes, [0.9, 0.0]), family)
print(f"targets (0.9, 0): {rep.verdict}, witness {rep.witness}")

# the disk picture: nodes {0, 1/2}, targets {0, lam}
for lam in (0.49, 0.5, 0.51):
    print(f"classical Pick, lam = {lam}: {classical_pick([0, 0.5], [0, lam]).passed}")

# constrained disk kernels versus their pullbacks
for targets in ([0.09, 0.25], [0.3, 0.5]):
    r = dprs_family_check([0.3, 0.5], targets)
    print(f"s = (0.3, 0.5), targets {targets}: disk {r.dprs_pass}, pullback {r.pullback_pass}, agree {r.agree}")
