"""Finite-sample checks of the shift and dilation structure on H^2(K).

Everything is verified as an identity between kernel values: the sections
K(., x) gamma span a dense subspace, the adjoints of M_z and M_w act on them
diagonally, and all inner products come from Gram entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import OriginReflection
from .kernels import (
    AdmissiblePair,
    GramBlock,
    KernelHandle,
    _outer_blocks,
    blocks_to_matrix,
    coords,
    gram,
    kernel_forms,
)
from .variety import (
    GenericColumn,
    SamplePlan,
    VarietyPoint,
    VarietySpec,
    reflect_point,
    sample_points,
    stacked_q_adjoint,
)


@dataclass
class KernelSectionBasis:
    """Sections K(., x_i) e_k for the given points and all basis directions."""

    handle: KernelHandle
    points: list
    gram: GramBlock = field(init=False)

    def __post_init__(self):
        self.points = list(self.points)
        self.gram = gram(self.handle, self.points) if self.points else GramBlock([], np.zeros((0, 0)), 0.0)

    @property
    def size(self) -> int:
        return len(self.points) * self.handle.alpha

    def norm(self, coeffs) -> float:
        c = np.asarray(coeffs, dtype=complex)
        return float(np.sqrt(max(np.vdot(c, self.gram.matrix @ c).real, 0.0)))


@dataclass
class ShiftModel:
    """Adjoints of M_z, M_w on a section basis: K(., x) gamma -> conj(z_x) K(., x) gamma."""

    basis: KernelSectionBasis

    def _diag(self, which: str) -> np.ndarray:
        z, w = coords(self.basis.points)
        v = z if which == "z" else w
        return np.repeat(np.conj(v), self.basis.handle.alpha)

    def adjoint_z(self, coeffs) -> np.ndarray:
        return self._diag("z") * np.asarray(coeffs, dtype=complex)

    def adjoint_w(self, coeffs) -> np.ndarray:
        return self._diag("w") * np.asarray(coeffs, dtype=complex)


def annihilation_check(handle: KernelHandle, samples: Sequence[VarietyPoint]) -> float:
    """max |p| over the section points; M_p^* kills K(., x) exactly when p(x) = 0."""
    if not samples:
        return 0.0
    z, w = coords(samples)
    return float(np.abs(handle.pair.spec.p(z, w)).max())


def isometry_identity_check(handle: KernelHandle, xs: Sequence[VarietyPoint],
                            ys: Sequence[VarietyPoint] | None = None) -> dict:
    """Residuals of K - QQ^* - z conj(zeta) K = 0 and K - PP^* - w conj(eta) K = 0.

    Each identity uses the opposite form of K (P-form for the z identity,
    Q-form for the w identity), so neither holds by algebra alone.  On the
    reflected side the identities read (z conj(zeta) - 1) K = QQ^* and the
    analogue in w.  Residuals are relative to the kernel scale.
    """
    ys = xs if ys is None else ys
    kq, kp, scale = kernel_forms(handle.pair, xs, ys, handle.side)
    zx, wx = coords(xs)
    zy, wy = coords(ys)
    zz = np.outer(zx, zy.conj())[:, :, None, None]
    ww = np.outer(wx, wy.conj())[:, :, None, None]
    QQ = _outer_blocks(handle.pair.Q(zx, wx), handle.pair.Q(zy, wy))
    PP = _outer_blocks(handle.pair.P(zx, wx), handle.pair.P(zy, wy))
    sign = 1.0 if handle.side == "interior" else -1.0
    rz = kp - sign * QQ - zz * kp
    rw = kq - sign * PP - ww * kq
    two_form = np.abs(kq - kp).max(axis=(2, 3)) / scale
    zres = np.abs(rz).max(axis=(2, 3)) / (scale * (1 + np.abs(zz[:, :, 0, 0])))
    wres = np.abs(rw).max(axis=(2, 3)) / (scale * (1 + np.abs(ww[:, :, 0, 0])))
    return {"twoForm": float(two_form.max()), "shiftZ": float(zres.max()), "shiftW": float(wres.max())}


def purity_decay(handle: KernelHandle, point: VarietyPoint, j_max: int = 10, gamma=None) -> list[float]:
    """Norms ||S^{*j} s|| / ||s|| for the section s = K(., x) gamma, j = 0..j_max.

    The action is diagonal so the ratios are |z|^j; a departure from exact
    geometric decay beyond 1e-14 raises AssertionError.
    """
    a = handle.alpha
    g = np.ones(a, dtype=complex) / np.sqrt(a) if gamma is None else np.asarray(gamma, dtype=complex)
    basis = KernelSectionBasis(handle, [point])
    model = ShiftModel(basis)
    c = g.copy()
    base = basis.norm(c)
    if base == 0:
        raise ValueError("section K(., x) gamma is zero")
    out = []
    for _ in range(j_max + 1):
        out.append(basis.norm(c) / base)
        c = model.adjoint_z(c)
    r = abs(point.z)
    expected = r ** np.arange(j_max + 1)
    if np.abs(np.array(out) - expected).max() > 1e-14:
        raise AssertionError("section norms are not geometric in |z|")
    return out


@dataclass
class DefectReport:
    rank: int
    sigma_min: float
    gram: np.ndarray
    crosscheck: float

    def to_json(self) -> dict:
        return {"defectRank": self.rank, "sigmaMin": self.sigma_min, "crosscheck": self.crosscheck}


def defect_rank(pair: AdmissiblePair, column: GenericColumn, rank_tol: float = 1e-8) -> DefectReport:
    """Rank of the Gram of Q(.) Q(lam, mu_j)^* e_k, via <Q Q(x')^* g', Q Q(x)^* g> = g^* Q(x) Q(x')^* g'.

    The same Gram equals (1 - |lam|^2) times the K-Gram at the points
    (lam, mu_j); that comparison (with K in P-form) is the cross-check.
    """
    lam = complex(column.lam)
    mus = np.asarray(column.mus, dtype=complex)
    Z = stacked_q_adjoint(pair.Q, lam, mus)
    G = Z.conj().T @ Z
    s = np.linalg.svd(Z, compute_uv=False)
    rank = int(np.sum(s > rank_tol * max(s[0], 1.0)))
    pts = [VarietyPoint(lam, complex(mu)) for mu in mus]
    if len(set((p.z, p.w) for p in pts)) == len(pts):
        _, kp, _ = kernel_forms(pair, pts, pts)
        other = (1 - abs(lam) ** 2) * blocks_to_matrix(kp)
        cross = float(np.abs(G - other).max() / max(np.abs(G).max(), 1.0))
    else:
        cross = float("nan")  # repeated fiber point: the P-form Gram is singular, nothing to compare
    return DefectReport(rank, float(s[-1]), G, cross)


def cross_samples(spec: VarietySpec, count: int, seed: int = 0, min_modulus: float = 0.2):
    """(interior, reflected) pairs; each reflected point comes from an independent draw."""
    pool = [p for p in sample_points(spec, SamplePlan(8 * count + 16, seed=seed))
            if min(abs(p.z), abs(p.w)) >= min_modulus]
    if len(pool) < 2 * count:
        raise ValueError("not enough samples away from the coordinate axes")
    return [(pool[i], reflect_point(spec, pool[count + i])) for i in range(count)]


def reflected_samples(spec: VarietySpec, count: int, seed: int = 0, min_modulus: float = 0.2) -> list[VarietyPoint]:
    return [y for _, y in cross_samples(spec, count, seed, min_modulus)]


@dataclass
class DilationModel:
    pair: AdmissiblePair
    interior: KernelSectionBasis
    reflected: KernelSectionBasis

    @classmethod
    def build(cls, pair: AdmissiblePair, interior_points, reflected_points) -> "DilationModel":
        for p in interior_points:
            if p.region != "interior":
                raise ValueError(f"interior basis contains a {p.region} point")
        for p in reflected_points:
            if p.region != "exterior":
                raise ValueError(f"reflected basis contains a {p.region} point")
            if abs(p.z) <= 1e-12 or abs(p.w) <= 1e-12:
                raise OriginReflection("reflected point with a vanishing coordinate")
        return cls(pair, KernelSectionBasis(KernelHandle(pair), interior_points),
                   KernelSectionBasis(KernelHandle(pair, "reflected"), reflected_points))

    def _pi_grams(self, which: str):
        """Gram of the images under Sigma (which='z') or Gamma (which='w') and the projected K~ Gram."""
        pts = self.reflected.points
        z, w = coords(pts)
        v = z if which == "z" else w
        M = self.pair.Q if which == "z" else self.pair.P
        A = M(z, w)
        inv = 1 / v
        images = inv[:, None, None, None] * np.conj(inv)[None, :, None, None] * _outer_blocks(A, A)
        # K~ in the opposite form so the comparison is not a tautology
        kq, kp, _ = kernel_forms(self.pair, pts, pts, "reflected")
        kt = kp if which == "z" else kq
        proj = (1 - 1 / np.outer(v, np.conj(v)))[:, :, None, None] * kt
        return blocks_to_matrix(images), blocks_to_matrix(proj)

    def sigma_check(self) -> float:
        """Sigma^* Sigma = projection onto the Q~ space, as a relative Gram difference."""
        return self._rel(*self._pi_grams("z"))

    def gamma_check(self) -> float:
        return self._rel(*self._pi_grams("w"))

    @staticmethod
    def _rel(a: np.ndarray, b: np.ndarray) -> float:
        if a.size == 0:
            return 0.0
        return float(np.linalg.norm(a - b, 2) / max(np.linalg.norm(a, 2), 1.0))


def sigma_partial_isometry_check(model: DilationModel) -> float:
    return model.sigma_check()


def gamma_partial_isometry_check(model: DilationModel) -> float:
    return model.gamma_check()


def commutation_identity_check(pair: AdmissiblePair, pairs) -> float:
    """max over (interior x, reflected y) of the matrix-element form of the commutation relation.

    ((z conj(zeta) - 1) P(x) P(y)^* - (w conj(eta) - 1) Q(x) Q(y)^*) / conj(zeta eta),
    relative to the size of the two terms.
    """
    worst = 0.0
    for x, y in pairs:
        if x.region != "interior" or y.region != "exterior":
            raise ValueError("cross samples must pair an interior point with an exterior point")
        if abs(y.z) <= 1e-12 or abs(y.w) <= 1e-12:
            raise OriginReflection("reflected point with a vanishing coordinate")
        d = np.conj(y.z * y.w)
        Px, Py = pair.P(x.z, x.w), pair.P(y.z, y.w)
        Qx, Qy = pair.Q(x.z, x.w), pair.Q(y.z, y.w)
        a = (x.z * np.conj(y.z) - 1) * Px @ Py.conj().T / d
        b = (x.w * np.conj(y.w) - 1) * Qx @ Qy.conj().T / d
        scale = 1 + np.abs(a).max() + np.abs(b).max()
        worst = max(worst, float(np.abs(a - b).max() / scale))
    return worst


def dilation_spectrum_note(model: DilationModel) -> dict:
    """Sub-identities checked at the reflected basis points; the spectral claim itself is not verified."""
    pts = model.reflected.points
    if not pts:
        return {}
    z, w = coords(pts)
    pcheck = model.pair.spec.p.conj_coeffs()
    res = float(np.abs(pcheck(1 / z, 1 / w)).max())
    return {
        "pCheckResidual": res,
        "reflectedPoints": len(pts),
        "sigmaResidual": model.sigma_check(),
        "gammaResidual": model.gamma_check(),
        "spectralMeasure": "not verified (joint spectral measure on the boundary is out of scope)",
    }
