"""Kernel identities behind the bundle shift and its unitary dilation.

M_z and M_w on H^2(K) are isometries because K - QQ^* = z conj(zeta) K and
K - PP^* = w conj(eta) K.  The maps Sigma and Gamma from the exterior-sheet
space are partial isometries, and the dilations commute because
(z conj(zeta) - 1) PP^* = (w conj(eta) - 1) QQ^* for an interior point
paired with an exterior one.
"""

from varpick.kernels import KernelHandle, neil_standard_pairs
from varpick.operators import (
    DilationModel,
    commutation_identity_check,
    cross_samples,
    defect_rank,
    dilation_spectrum_note,
    isometry_identity_check,
    purity_decay,
)
from varpick.variety import SamplePlan, find_generic_column, neil_spec, sample_points

spec = neil_spec()
pts = sample_points(spec, SamplePlan(30, seed=4))
cross = cross_samples(spec, 50, seed=5)

for name, pr in neil_standard_pairs(spec).items():
    h = KernelHandle(pr)
    print(name)
    print("  shift identities:", {k: f"{v:.1e}" for k, v in isometry_identity_check(h, pts).items()})
    print("  section norms under S^*:", [round(v, 4) for v in purity_decay(h, pts[0], 4)], f"|z| = {abs(pts[0].z):.4f}")
    col = find_generic_column(spec, pr, seed=1)
    print(f"  dim ker S^* = {defect_rank(pr, col).rank}")
    model = DilationModel.build(pr, pts[:10], [y for _, y in cross[:10]])
    note = dilation_spectrum_note(model)
    print(f"  Sigma {note['sigmaResidual']:.1e}, Gamma {note['gammaResidual']:.1e}, "
          f"p-check {note['pCheckResidual']:.1e}")
    print(f"  commutation over 50 cross pairs: {commutation_identity_check(pr, cross):.1e}")
