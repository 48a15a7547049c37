"""Admissible pairs (P, Q), the kernels they generate, and kernel constructions.

For a rank-alpha pair on Z_p of bidegree (n, m), Q is alpha x m*alpha and P is
alpha x n*alpha, and on Z_p x Z_p

    Q(z,w) Q(zeta,eta)^* / (1 - z conj(zeta)) = P(z,w) P(zeta,eta)^* / (1 - w conj(eta)).

Either side defines the kernel K on V x V; with (z conj(zeta) - 1) and
(w conj(eta) - 1) denominators it defines the reflected kernel on the
exterior component.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .bipoly import ONE, BivariatePolynomial, MatrixPolynomial, W, Z
from .errors import (
    CoincidentNodes,
    DenominatorBlowup,
    FactorizationMismatch,
    FormDisagreement,
    IdentityViolation,
    NotNormalized,
    PSDViolation,
    RankDeficientEverywhere,
    ShapeMismatch,
    ZeroDirection,
)
from .variety import SamplePlan, VarietyPoint, VarietySpec, neil_spec, sample_points

Side = Literal["interior", "reflected"]

ID_TOL = 1e-9
RANK_TOL = 1e-8
DENOM_TOL = 1e-10


@dataclass(frozen=True)
class AdmissiblePair:
    alpha: int
    Q: MatrixPolynomial
    P: MatrixPolynomial
    spec: VarietySpec
    name: str = "pair"

    def check_shapes(self) -> None:
        n, m = self.spec.bidegree
        a = self.alpha
        if self.Q.shape != (a, m * a):
            raise ShapeMismatch(f"Q has shape {self.Q.shape}, expected {(a, m * a)}")
        if self.P.shape != (a, n * a):
            raise ShapeMismatch(f"P has shape {self.P.shape}, expected {(a, n * a)}")

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "Q": self.Q.to_json(), "P": self.P.to_json()}

    def direct_sum(self, other: "AdmissiblePair") -> "AdmissiblePair":
        """Block-diagonal pair whose kernel is K_self (+) K_other."""
        return AdmissiblePair(self.alpha + other.alpha, self.Q.block_diag(other.Q), self.P.block_diag(other.P),
                              self.spec, f"{self.name}+{other.name}")


def coords(points: Sequence[VarietyPoint]) -> tuple[np.ndarray, np.ndarray]:
    z = np.array([p.z for p in points], dtype=complex)
    w = np.array([p.w for p in points], dtype=complex)
    return z, w


def _outer_blocks(Ax: np.ndarray, Ay: np.ndarray) -> np.ndarray:
    """(Nx, Ny, a, a) array of A(x_i) A(y_j)^*."""
    return np.einsum("iab,jcb->ijac", Ax, Ay.conj())


def kernel_forms(pair: AdmissiblePair, xs, ys, side: Side = "interior"):
    """Q-form and P-form kernel blocks plus an error scale, each (Nx, Ny, a, a)."""
    zx, wx = coords(xs)
    zy, wy = coords(ys)
    Qx, Qy = pair.Q(zx, wx), pair.Q(zy, wy)
    Px, Py = pair.P(zx, wx), pair.P(zy, wy)
    dz = 1 - np.outer(zx, zy.conj())
    dw = 1 - np.outer(wx, wy.conj())
    if side == "reflected":
        dz, dw = -dz, -dw
    if np.min(np.abs(dz), initial=np.inf) <= DENOM_TOL or np.min(np.abs(dw), initial=np.inf) <= DENOM_TOL:
        raise DenominatorBlowup("kernel denominator within 1e-10 of zero")
    kq = _outer_blocks(Qx, Qy) / dz[:, :, None, None]
    kp = _outer_blocks(Px, Py) / dw[:, :, None, None]
    nq = np.linalg.norm(Qx, axis=(1, 2))[:, None] * np.linalg.norm(Qy, axis=(1, 2))[None, :]
    nP = np.linalg.norm(Px, axis=(1, 2))[:, None] * np.linalg.norm(Py, axis=(1, 2))[None, :]
    scale = 1.0 + nq / np.abs(dz) + nP / np.abs(dw)
    return kq, kp, scale


def blocks_to_matrix(blocks: np.ndarray) -> np.ndarray:
    nx, ny, a, b = blocks.shape
    return blocks.transpose(0, 2, 1, 3).reshape(nx * a, ny * b)


@dataclass(frozen=True)
class KernelHandle:
    pair: AdmissiblePair
    side: Side = "interior"
    id_tol: float = ID_TOL

    @property
    def alpha(self) -> int:
        return self.pair.alpha

    def _check_region(self, points):
        want = "interior" if self.side == "interior" else "exterior"
        for p in points:
            if p.region != want:
                raise ValueError(f"{self.side} kernel evaluated at a {p.region} point")

    def blocks(self, xs, ys, check: bool = True) -> np.ndarray:
        """Kernel values K(x_i, y_j) as an (Nx, Ny, alpha, alpha) array (Q-form)."""
        self._check_region(xs)
        self._check_region(ys)
        kq, kp, scale = kernel_forms(self.pair, xs, ys, self.side)
        if check:
            err = np.max(np.abs(kq - kp), axis=(2, 3)) / scale
            if err.size and err.max() > self.id_tol:
                i, j = np.unravel_index(np.argmax(err), err.shape)
                raise FormDisagreement(
                    f"Q-form and P-form differ by {err.max():.3g} (relative) at points {i}, {j}")
        return kq

    def eval(self, x: VarietyPoint, y: VarietyPoint, check: bool = True) -> np.ndarray:
        return self.blocks([x], [y], check)[0, 0]

    def matrix(self, points, check: bool = True) -> np.ndarray:
        """Hermitian block Gram matrix (K(x_i, x_j))_{ij}."""
        m = blocks_to_matrix(self.blocks(points, points, check))
        return (m + m.conj().T) / 2


@dataclass
class GramBlock:
    points: list
    matrix: np.ndarray
    min_eig: float


def gram(handle: KernelHandle, points: Sequence[VarietyPoint], psd_tol: float = 1e-9) -> GramBlock:
    """Finite Gram block of kernel sections; PSDViolation below -psd_tol (relative)."""
    _require_distinct(points)
    m = handle.matrix(points)
    ev = np.linalg.eigvalsh(m)
    scale = max(np.abs(ev).max(), 1.0)
    if ev[0] < -psd_tol * scale:
        raise PSDViolation(f"Gram minimum eigenvalue {ev[0]:.3g}", ev[0])
    return GramBlock(list(points), m, float(ev[0]))


def _require_distinct(points, tol: float = 1e-12):
    for i in range(len(points)):
        for j in range(i):
            if abs(points[i].z - points[j].z) <= tol and abs(points[i].w - points[j].w) <= tol:
                raise ValueError(f"points {j} and {i} coincide")


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    name: str
    samples: int
    identity_residual: float
    witness: tuple[int, int]
    rank_fraction_q: float
    rank_fraction_p: float

    @property
    def passed(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {
            "pair": self.name,
            "samples": self.samples,
            "identityResidual": self.identity_residual,
            "witness": list(self.witness),
            "rankFractionQ": self.rank_fraction_q,
            "rankFractionP": self.rank_fraction_p,
            "pass": True,
        }


def validate_pair(pair: AdmissiblePair, samples: Sequence[VarietyPoint], id_tol: float = ID_TOL,
                  rank_tol: float = RANK_TOL) -> ValidationReport:
    """Check shapes, generic full rank, and the kernel identity over all sample pairs."""
    if len(samples) < 10:
        raise ValueError("validate_pair needs at least 10 sample points")
    _require_distinct(samples)
    pair.check_shapes()
    z, w = coords(samples)
    fractions = []
    for name, M in (("Q", pair.Q), ("P", pair.P)):
        smin = np.linalg.svd(M(z, w), compute_uv=False)[:, -1]
        frac = float(np.mean(smin > rank_tol))
        if frac < 0.9:
            raise RankDeficientEverywhere(f"{name} has rank alpha at only {frac:.0%} of samples")
        fractions.append(frac)
    side: Side = "interior" if all(s.region == "interior" for s in samples) else "reflected"
    kq, kp, scale = kernel_forms(pair, samples, samples, side)
    err = np.max(np.abs(kq - kp), axis=(2, 3)) / scale
    i, j = np.unravel_index(np.argmax(err), err.shape)
    worst = float(err[i, j])
    if worst > id_tol:
        raise IdentityViolation(
            f"kernel identity fails for {pair.name}: residual {worst:.3g} at samples ({i}, {j})",
            witness=(samples[i], samples[j]), residual=worst)
    return ValidationReport(pair.name, len(samples), worst, (int(i), int(j)), fractions[0], fractions[1])


# ---------------------------------------------------------------------------
# Neil parabola families


def _row(*entries) -> MatrixPolynomial:
    return MatrixPolynomial.from_entries([list(entries)])


def neil_standard_pairs(spec: VarietySpec | None = None) -> dict[str, AdmissiblePair]:
    """The pairs Q=(1, w), P=(1, z, z^2) and Q=(z, w), P=(w, z, z^2) on z^3 = w^2."""
    spec = spec or neil_spec()
    return {
        "neil-1": AdmissiblePair(1, _row(ONE, W), _row(ONE, Z, Z * Z), spec, "neil-1"),
        "neil-2": AdmissiblePair(1, _row(Z, W), _row(W, Z, Z * Z), spec, "neil-2"),
    }


def neil_pair_ab(a, b, spec: VarietySpec | None = None) -> AdmissiblePair:
    """Q = (az + bw, conj(b) z^2 - conj(a) zw), P = (az + bw, conj(b) zw - conj(a) w^2, z^2)."""
    a, b = complex(a), complex(b)
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > 1e-12:
        raise NotNormalized(f"|a|^2 + |b|^2 = {abs(a) ** 2 + abs(b) ** 2!r}, expected 1")
    spec = spec or neil_spec()
    lead = Z.scale(a) + W.scale(b)
    Q = _row(lead, (Z * Z).scale(b.conjugate()) - (Z * W).scale(a.conjugate()))
    P = _row(lead, (Z * W).scale(b.conjugate()) - (W * W).scale(a.conjugate()), Z * Z)
    return AdmissiblePair(1, Q, P, spec, f"neil-ab({a:.4g},{b:.4g})")


def ab_grid(size: int = 64) -> list[tuple[complex, complex]]:
    """(cos t, e^{i phi} sin t) over a g x g lattice, g = ceil(sqrt(size)).

    t is cell-centred in (0, pi/2) so no two lattice points give the same pair.
    """
    g = int(np.ceil(np.sqrt(size)))
    thetas = (np.arange(g) + 0.5) * (np.pi / 2) / g
    phis = 2 * np.pi * np.arange(g) / g
    return [(complex(np.cos(t)), complex(np.exp(1j * f) * np.sin(t))) for t in thetas for f in phis]


def dprs_kernel(a, b, s, t):
    """k_ab(s, t) = (a + bs) conj(a + bt) + s^2 conj(t)^2 / (1 - s conj(t))."""
    s = np.asarray(s, dtype=complex)
    t = np.asarray(t, dtype=complex)
    st = s * np.conj(t)
    out = (a + b * s) * np.conj(a + b * t) + st ** 2 / (1 - st)
    return complex(out) if out.ndim == 0 else out


def psi(t) -> tuple[complex, complex]:
    """Parametrisation t -> (t^2, t^3) of the Neil parabola."""
    return complex(t) ** 2, complex(t) ** 3


def pullback_kernel(pair: AdmissiblePair, s, t) -> np.ndarray:
    """Q(psi(s)) Q(psi(t))^* / (1 - s^2 conj(t)^2) as an (Ns, Nt, a, a) array."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    Qs = pair.Q(s ** 2, s ** 3)
    Qt = pair.Q(t ** 2, t ** 3)
    d = 1 - np.outer(s ** 2, np.conj(t) ** 2)
    return _outer_blocks(Qs, Qt) / d[:, :, None, None]


def pullback_conjugacy_check(a, b, points) -> float:
    """max |K(s,t) - s^2 k_ab(s,t) conj(t)^2| over all pairs of disk points."""
    pts = np.asarray(points, dtype=complex)
    lhs = pullback_kernel(neil_pair_ab(a, b), pts, pts)[:, :, 0, 0]
    rhs = pts[:, None] ** 2 * dprs_kernel(a, b, pts[:, None], pts[None, :]) * np.conj(pts[None, :]) ** 2
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# compression


@dataclass
class CompressionResult:
    new_pair: AdmissiblePair
    center: VarietyPoint
    gamma: np.ndarray
    delta_q: np.ndarray
    delta_p: np.ndarray
    residual: float


def _mobius_twist(delta: np.ndarray, c: complex, var: str) -> MatrixPolynomial:
    """(1 - v conj(c)) (I - P_d) + (v - c) P_d, the polynomial form of (1 - v conj(c)) B(v)."""
    k = delta.size
    proj = np.outer(delta, delta.conj()) / np.vdot(delta, delta).real
    perp = np.eye(k) - proj
    const = perp - c * proj
    lin = -np.conj(c) * perp + proj
    if var == "z":
        coeffs = np.stack([const, lin], axis=-1)[:, :, :, None]
    else:
        coeffs = np.stack([const, lin], axis=-1)[:, :, None, :]
    return MatrixPolynomial(coeffs)


def compressed_kernel_blocks(pair: AdmissiblePair, u: VarietyPoint, gamma, xs, ys) -> np.ndarray:
    """K'(x, y) = (gamma^* K(u,u) gamma) K(x,y) - K(x,u) gamma gamma^* K(u,y)."""
    h = KernelHandle(pair)
    g = np.asarray(gamma, dtype=complex).reshape(-1)
    kuu = h.eval(u, u, check=False)
    kxy = h.blocks(xs, ys, check=False)
    kxu = h.blocks(xs, [u], check=False)[:, 0]  # (Nx, a, a)
    kuy = h.blocks([u], ys, check=False)[0]  # (Ny, a, a)
    left = kxu @ g
    right = kuy.conj().transpose(0, 2, 1) @ g  # rows: (K(u, y)^* g) = K(y, u) g
    return np.vdot(g, kuu @ g).real * kxy - np.einsum("ia,jb->ijab", left, right.conj())


def compress(pair: AdmissiblePair, u: VarietyPoint, gamma, samples: Sequence[VarietyPoint] | None = None,
             tol: float = ID_TOL, seed: int = 0) -> CompressionResult:
    """Factor the one-point compression K' of K through a new admissible pair (P', Q').

    With x, y the coordinates of u and delta = Q(x,y)^* gamma,

        Q'(z,w) = (1 - w conj(y)) |delta| / sqrt(1 - |x|^2) Q(z,w) [(1 - z conj(x)) B(z)]

    where B(z) = P_delta^perp + phi_x(z) P_delta; P' is built the same way from
    P(x,y)^* gamma with the roles of z and w exchanged.  The identity

        (1 - w conj(y))(1 - y conj(eta))(1 - z conj(x))(1 - x conj(zeta)) K' = Q' Q'^* / (1 - z conj(zeta))

    (and its P-form) is verified on ``samples``.
    """
    g = np.asarray(gamma, dtype=complex).reshape(-1)
    if g.size != pair.alpha:
        raise ShapeMismatch(f"direction has length {g.size}, expected alpha={pair.alpha}")
    x, y = u.z, u.w
    h = KernelHandle(pair)
    if np.linalg.norm(h.eval(u, u, check=False) @ g) <= 1e-10:
        raise ZeroDirection("K(u, u) gamma vanishes")
    dq = pair.Q(x, y).conj().T @ g
    dp = pair.P(x, y).conj().T @ g
    scale_q = np.linalg.norm(dq) / np.sqrt(1 - abs(x) ** 2)
    scale_p = np.linalg.norm(dp) / np.sqrt(1 - abs(y) ** 2)
    one_minus_wy = ONE - W.scale(np.conj(y))
    one_minus_zx = ONE - Z.scale(np.conj(x))
    Qn = pair.Q.matmul(_mobius_twist(dq, x, "z")).scale(one_minus_wy).scale(scale_q)
    Pn = pair.P.matmul(_mobius_twist(dp, y, "w")).scale(one_minus_zx).scale(scale_p)
    new = AdmissiblePair(pair.alpha, Qn, Pn, pair.spec, f"{pair.name}|c({x:.3g},{y:.3g})")

    if samples is None:
        samples = sample_points(pair.spec, SamplePlan(8, seed=seed))
    kprime = compressed_kernel_blocks(pair, u, g, samples, samples)
    zs, ws = coords(samples)
    factor = ((1 - ws * np.conj(y))[:, None] * (1 - y * np.conj(ws))[None, :]
              * (1 - zs * np.conj(x))[:, None] * (1 - x * np.conj(zs))[None, :])
    lhs = factor[:, :, None, None] * kprime
    kq, kp, scale = kernel_forms(new, samples, samples)
    res = max(np.max(np.abs(lhs - kq), axis=(2, 3)).max(), np.max(np.abs(lhs - kp), axis=(2, 3)).max())
    rel = float(res / scale.max())
    if rel > tol:
        raise FactorizationMismatch(f"compression factorization residual {rel:.3g} exceeds {tol:g}")
    return CompressionResult(new, u, g, dq, dp, rel)


# ---------------------------------------------------------------------------
# separating polynomial


def separating_polynomial(points: Sequence[VarietyPoint], values, tol: float = 1e-10) -> BivariatePolynomial:
    """Polynomial q with q(z_k, w_k) = values_k, from products of affine factors.

    Each excluded node contributes one factor, in whichever coordinate
    separates it from the target node the most.
    """
    values = list(values)
    if len(values) != len(points):
        raise ValueError("one value per node required")
    n = len(points)
    q = BivariatePolynomial.constant(0)
    for j in range(n):
        basis = BivariatePolynomial.constant(1)
        zj, wj = points[j].z, points[j].w
        for k in range(n):
            if k == j:
                continue
            zk, wk = points[k].z, points[k].w
            dz, dw = abs(zj - zk), abs(wj - wk)
            if max(dz, dw) <= 1e-12:
                raise CoincidentNodes(f"nodes {j} and {k} coincide")
            if dz >= dw:
                basis = basis * (Z - zk).scale(1 / (zj - zk))
            else:
                basis = basis * (W - wk).scale(1 / (wj - wk))
        q = q + basis.scale(values[j])
    for k, pt in enumerate(points):
        if abs(q(pt.z, pt.w) - values[k]) > tol * (1 + abs(values[k])):
            raise CoincidentNodes(f"interpolation residual too large at node {k} (nodes nearly coincide)")
    return q
