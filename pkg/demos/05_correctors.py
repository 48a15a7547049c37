"""Functions that are close to 1 inside the disk but vanish at a boundary point.

g_n peaks at 1 on compact subsets as n grows while g_n(1) = 0.  Composing
with a Blaschke product b that equals 1 at beta and vanishes at chosen
interior points moves the zero to beta and keeps the interior behaviour
fixed to the order of the zeros of b.
"""

import numpy as np

from varpick.correctors import (
    build_inner_corrector,
    composed_corrector,
    corrector_vanishing_check,
    disk_deviation,
    eval_gn,
    h_norm,
)

for n in (10, 100, 1000):
    print(f"n = {n:4d}: g_n(1) = {abs(eval_gn(n, 1.0)):.1e}, ||h_n|| = {h_norm(n):.10f}, "
          f"max_(|z|<=0.9) |g_n - 1| = {disk_deviation(n):.4f}")

beta = np.exp(1j)
zeros = [0.3 + 0.2j, -0.5j]
b = build_inner_corrector(zeros, 2, beta)
print(f"Blaschke: | |b| - 1 | on the circle {b.modulus_defect():.1e}, b(beta) = {b(beta):.6f}")

G = composed_corrector(100, b, 2)
rep = corrector_vanishing_check(G, [beta], zeros, order=2)
print("G = (g_100 o b)^2:", rep.to_json())
