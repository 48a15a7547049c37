"""Lurking-isometry colligations and their transfer functions.

Rearranging the kernel identity of an admissible pair gives

    Q Q^* + z conj(zeta) P P^* = w conj(eta) Q Q^* + P P^*,

so the map [Q^* g; conj(zeta) P^* g] -> [conj(eta) Q^* g; P^* g] is isometric on
the span of those vectors and extends to a unitary U = [[A, B], [C, D]].
Then Phi(z) = A^* + z C^* (I - z D^*)^{-1} B^* satisfies
Phi(z)^* Q(z,w)^* = conj(w) Q(z,w)^* on the variety.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import polar
from scipy.optimize import linear_sum_assignment

from .errors import AllCoordinatesVanish, CompletionDegenerate, InconsistentGenerators, ResolventSingular
from .kernels import AdmissiblePair, coords
from .variety import DegenerateFiber, VarietyPoint, VarietySpec, fiber

RANK_RCOND = 1e-10


@dataclass(frozen=True)
class UnitaryColligation:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    @property
    def U(self) -> np.ndarray:
        return np.block([[self.A, self.B], [self.C, self.D]])

    @property
    def unitarity_residual(self) -> float:
        U = self.U
        eye = np.eye(U.shape[0])
        return float(max(np.linalg.norm(U.conj().T @ U - eye, 2), np.linalg.norm(U @ U.conj().T - eye, 2)))

    def to_json(self) -> dict:
        def enc(M):
            return [[[float(v.real), float(v.imag)] for v in row] for row in M]
        return {"A": enc(self.A), "B": enc(self.B), "C": enc(self.C), "D": enc(self.D),
                "unitarityResidual": self.unitarity_residual}

    @classmethod
    def from_json(cls, obj) -> "UnitaryColligation":
        def dec(rows):
            return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
        return cls(dec(obj["A"]), dec(obj["B"]), dec(obj["C"]), dec(obj["D"]))


def generator_vectors(pair: AdmissiblePair, points: Sequence[VarietyPoint], directions: np.ndarray):
    """Columns e = [Q^* g; conj(zeta) P^* g] and f = [conj(eta) Q^* g; P^* g]."""
    z, w = coords(points)
    Qs = pair.Q(z, w).conj().transpose(0, 2, 1)  # (N, m*a, a)
    Ps = pair.P(z, w).conj().transpose(0, 2, 1)  # (N, n*a, a)
    qg = np.einsum("nka,na->kn", Qs, directions)
    pg = np.einsum("nka,na->kn", Ps, directions)
    E = np.vstack([qg, np.conj(z)[None, :] * pg])
    F = np.vstack([np.conj(w)[None, :] * qg, pg])
    return E, F


def build_colligation(pair: AdmissiblePair, points: Sequence[VarietyPoint], directions=None,
                      seed: int = 0, gram_tol: float = 1e-9, map_tol: float = 1e-9) -> UnitaryColligation:
    """Unitary U with U e_k = f_k for every generator, completed by identity pairing.

    ``directions`` is an (N, alpha) array; random unit vectors by default.
    With fewer than (m + n) alpha generators the isometry is only fixed on
    their span and the completion is one of many; Phi then need not satisfy
    the eigen-relation off the generators.
    """
    n, m = pair.spec.bidegree
    a = pair.alpha
    if not points:
        raise ValueError("need at least one generator point")
    if directions is None:
        rng = np.random.default_rng(seed)
        directions = rng.standard_normal((len(points), a)) + 1j * rng.standard_normal((len(points), a))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    directions = np.asarray(directions, dtype=complex).reshape(len(points), a)
    E, F = generator_vectors(pair, points, directions)

    GE, GF = E.conj().T @ E, F.conj().T @ F
    mismatch = np.abs(GE - GF).max() / max(np.abs(GE).max(), 1.0)
    if mismatch > gram_tol:
        raise InconsistentGenerators(f"generator Gram mismatch {mismatch:.3g}: the pair is not admissible")

    UE, s, Vh = np.linalg.svd(E)
    r = int(np.sum(s > RANK_RCOND * s[0]))
    if r == 0:
        raise CompletionDegenerate("generators span the zero space")
    range_f = F @ Vh[:r].conj().T / s[:r]
    # orthonormal complement of range(F), in the order produced by a full SVD
    UF, sf, _ = np.linalg.svd(range_f)
    if sf[-1] < 0.5:
        raise CompletionDegenerate("image of the generator span is not orthonormal")
    U0 = range_f @ UE[:, :r].conj().T + UF[:, r:] @ UE[:, r:].conj().T
    U, _ = polar(U0)
    col = UnitaryColligation(U[:m * a, :m * a], U[:m * a, m * a:], U[m * a:, :m * a], U[m * a:, m * a:])

    scale = 1.0 + np.linalg.norm(E, axis=0)
    worst = float((np.linalg.norm(U @ E - F, axis=0) / scale).max())
    if worst > map_tol:
        raise InconsistentGenerators(f"generator mapping residual {worst:.3g} exceeds {map_tol:g}")
    return col


@dataclass(frozen=True)
class TransferFunction:
    colligation: UnitaryColligation

    @property
    def size(self) -> int:
        return self.colligation.A.shape[0]

    def __call__(self, z) -> np.ndarray:
        """Phi(z) = A^* + z C^* (I - z D^*)^{-1} B^*."""
        c = self.colligation
        z = complex(z)
        k = c.D.shape[0]
        if k == 0:
            return c.A.conj().T.copy()
        R = np.eye(k) - z * c.D.conj().T
        if np.linalg.cond(R) > 1e12:
            raise ResolventSingular(f"I - z D^* is singular at z={z}")
        return c.A.conj().T + z * c.C.conj().T @ np.linalg.solve(R, c.B.conj().T)

    def defect(self, z) -> np.ndarray:
        """(1 - |z|^2) B (I - conj(z) D)^{-1} (I - z D^*)^{-1} B^*, which equals I - Phi^* Phi."""
        c = self.colligation
        z = complex(z)
        k = c.D.shape[0]
        X = np.linalg.solve(np.eye(k) - z * c.D.conj().T, c.B.conj().T)
        return (1 - abs(z) ** 2) * X.conj().T @ X


def eval_transfer(tf: TransferFunction, z) -> np.ndarray:
    return tf(z)


def synthesize(pair: AdmissiblePair, points: Sequence[VarietyPoint], seed: int = 0) -> TransferFunction:
    return TransferFunction(build_colligation(pair, points, seed=seed))


def eigen_relation_check(tf: TransferFunction, pair: AdmissiblePair, samples: Sequence[VarietyPoint]):
    """max ||Phi(z)^* Q^* - conj(w) Q^*|| / (1 + ||Q||); returns (residual, skipped points)."""
    worst = 0.0
    skipped = []
    for pt in samples:
        try:
            phi = tf(pt.z)
        except ResolventSingular:
            skipped.append(pt)
            continue
        Qs = pair.Q(pt.z, pt.w).conj().T
        r = np.linalg.norm(phi.conj().T @ Qs - np.conj(pt.w) * Qs) / (1 + np.linalg.norm(Qs))
        worst = max(worst, float(r))
    return worst, skipped


def match_eigenvalues(ev: np.ndarray, target: np.ndarray) -> float:
    """Largest distance after optimal one-to-one matching."""
    cost = np.abs(ev[:, None] - target[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


def det_check(tf: TransferFunction, spec: VarietySpec, samples: Sequence[VarietyPoint], alpha: int = 1,
              z_probes=None, seed: int = 0) -> dict:
    """det(wI - Phi(z)) on variety samples and eigenvalue/fiber agreement at probe z."""
    worst_det = 0.0
    for pt in samples:
        phi = tf(pt.z)
        ev = np.linalg.eigvals(phi)
        d = abs(np.linalg.det(pt.w * np.eye(phi.shape[0]) - phi)) / np.prod(1 + np.abs(ev))
        worst_det = max(worst_det, float(d))
    if z_probes is None:
        rng = np.random.default_rng(seed)
        z_probes = 0.9 * np.sqrt(rng.random(10)) * np.exp(2j * np.pi * rng.random(10))
    worst_match = 0.0
    per_probe = []
    for z in z_probes:
        try:
            roots = fiber(spec, z).all_roots
        except DegenerateFiber:
            continue
        ev = np.linalg.eigvals(tf(z))
        d = match_eigenvalues(ev, np.repeat(roots, alpha))
        per_probe.append((complex(z), d))
        worst_match = max(worst_match, d)
    return {"detResidual": worst_det, "fiberMatch": worst_match, "probes": per_probe}


def multiplier_realization_check(F: Callable, pair: AdmissiblePair, f: Callable,
                                 samples: Sequence[VarietyPoint], coord_tol: float = 1e-6) -> dict:
    """Residuals of F(z)^* Q^* = conj(f) Q^* and of f = (Q F)_{kj} / Q_{kj}."""
    eig_res = 0.0
    rec_res = 0.0
    for pt in samples:
        Fz = np.atleast_2d(F(pt.z))
        fz = complex(f(pt.z, pt.w))
        Q = pair.Q(pt.z, pt.w)
        eig_res = max(eig_res, float(np.linalg.norm(Fz.conj().T @ Q.conj().T - np.conj(fz) * Q.conj().T)))
        k, j = np.unravel_index(np.argmax(np.abs(Q)), Q.shape)
        if abs(Q[k, j]) <= coord_tol:
            raise AllCoordinatesVanish(f"every coordinate of Q vanishes at ({pt.z}, {pt.w})")
        rec = (Q @ Fz)[k, j] / Q[k, j]
        rec_res = max(rec_res, abs(rec - fz))
    return {"eigenResidual": eig_res, "reconstructionResidual": float(rec_res)}
