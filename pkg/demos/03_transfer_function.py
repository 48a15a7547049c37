"""A matrix inner function whose eigenvalues trace out the variety.

From an admissible pair the kernel identity is rearranged into an isometry
between two families of vectors.  Completing it to a unitary gives a
colligation, and its transfer function Phi satisfies det(w - Phi(z)) = 0
exactly on the Neil parabola.
"""

import numpy as np

from varpick.kernels import neil_standard_pairs
from varpick.realization import TransferFunction, build_colligation, eigen_relation_check
from varpick.variety import SamplePlan, fiber, neil_spec, sample_points

spec = neil_spec()
pairs = neil_standard_pairs(spec)
gens = sample_points(spec, SamplePlan(10, seed=1))

for name, pr in pairs.items():
    col = build_colligation(pr, gens)
    tf = TransferFunction(col)
    print(f"{name}: U is {col.U.shape[0]}x{col.U.shape[0]}, ||U*U - I|| = {col.unitarity_residual:.1e}")
    res, _ = eigen_relation_check(tf, pr, sample_points(spec, SamplePlan(20, seed=2)))
    print(f"  Phi(z)^* Q^* = conj(w) Q^* on the variety: residual {res:.1e}")
    for z in (0.25, 0.6 - 0.3j):
        ev = np.sort_complex(np.linalg.eigvals(tf(z)))
        print(f"  z = {z}: eig Phi = {np.round(ev, 6)}, fiber = {np.round(np.sort_complex(fiber(spec, z).roots), 6)}")
    z = np.exp(0.4j)
    phi = tf(z)
    print(f"  on the circle: ||Phi^* Phi - I|| = {np.linalg.norm(phi.conj().T @ phi - np.eye(2)):.1e}")
