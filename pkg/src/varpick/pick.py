"""Pick matrices, PSD sweeps over kernel families, and multiplier-norm bounds.

A finite sweep can only refute solvability: if some admissible kernel gives
a Pick matrix with a negative eigenvalue the data admit no interpolant of
norm <= rho.  A sweep in which every member passes is reported as
``necessary-pass``; it does not certify an interpolant.
"""

from __future__ import annotations

import functools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .bipoly import BivariatePolynomial
from .errors import NotHermitian, OriginNode, ZeroDirection
from .kernels import (
    AdmissiblePair,
    KernelHandle,
    ab_grid,
    blocks_to_matrix,
    compress,
    dprs_kernel,
    neil_pair_ab,
    neil_standard_pairs,
    pullback_kernel,
    validate_pair,
)
from .variety import SamplePlan, VarietyPoint, neil_spec, sample_points

PSD_TOL = 1e-9


@dataclass(frozen=True)
class PickProblem:
    nodes: tuple
    targets: tuple
    rho: float = 1.0

    def __init__(self, nodes: Sequence[VarietyPoint], targets, rho: float = 1.0):
        nodes = tuple(nodes)
        targets = tuple(complex(t) for t in targets)
        if len(nodes) != len(targets):
            raise ValueError("one target per node required")
        if not nodes:
            raise ValueError("a Pick problem needs at least one node")
        for i in range(len(nodes)):
            for j in range(i):
                if abs(nodes[i].z - nodes[j].z) <= 1e-12 and abs(nodes[i].w - nodes[j].w) <= 1e-12:
                    raise ValueError(f"nodes {j} and {i} coincide")
        for k, t in enumerate(targets):
            if abs(t) > rho:
                raise ValueError(f"target {k} has modulus {abs(t):.6g} > rho={rho}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "rho", float(rho))

    def weights(self) -> np.ndarray:
        lam = np.array(self.targets)
        return self.rho ** 2 - np.outer(lam, lam.conj())


@dataclass
class PSDResult:
    passed: bool
    min_eig: float


def is_psd(matrix: np.ndarray, psd_tol: float = PSD_TOL) -> PSDResult:
    """Hermitian eigen-solve; pass iff the smallest eigenvalue >= -psd_tol * max|eig|."""
    M = np.asarray(matrix, dtype=complex)
    scale = max(np.abs(M).max(), 1e-300)
    if np.abs(M - M.conj().T).max() > 1e-12 * max(scale, 1.0):
        raise NotHermitian("matrix is not Hermitian to 1e-12")
    ev = np.linalg.eigvalsh((M + M.conj().T) / 2)
    top = np.abs(ev).max()
    return PSDResult(bool(ev[0] >= -psd_tol * top), float(ev[0]))


def pick_matrix(handle: KernelHandle, problem: PickProblem, check: bool = True) -> np.ndarray:
    """Block matrix ((rho^2 - lam_j conj(lam_l)) K(x_j, x_l))."""
    blocks = handle.blocks(problem.nodes, problem.nodes, check)
    M = blocks_to_matrix(problem.weights()[:, :, None, None] * blocks)
    return (M + M.conj().T) / 2


# ---------------------------------------------------------------------------
# kernel families


@dataclass
class KernelFamily:
    members: list = field(default_factory=list)  # (id, KernelHandle)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def add(self, ident: str, handle: KernelHandle) -> None:
        self.members.append((ident, handle))

    def extended(self, other: "KernelFamily") -> "KernelFamily":
        return KernelFamily(self.members + other.members)

    def ids(self) -> list[str]:
        return [i for i, _ in self.members]


@functools.lru_cache(maxsize=8)
def _validated_neil_pairs(grid: int, include_standard: bool, samples: int, seed: int):
    spec = neil_spec()
    pts = sample_points(spec, SamplePlan(samples, seed=seed))
    pairs = []
    if include_standard:
        pairs.extend(neil_standard_pairs(spec).items())
    for k, (a, b) in enumerate(ab_grid(grid)):
        pairs.append((f"ab[{k}]", neil_pair_ab(a, b, spec)))
    for _, pr in pairs:
        validate_pair(pr, pts)
    return tuple(pairs)


def builtin_neil_family(grid: int = 64, include_standard: bool = True, validate_samples: int = 50,
                        seed: int = 1) -> KernelFamily:
    """The (a, b) lattice pairs plus the two standard pairs, each validated once."""
    pairs = _validated_neil_pairs(grid, include_standard, validate_samples, seed)
    return KernelFamily([(ident, KernelHandle(pr)) for ident, pr in pairs])


def family_from_pairs(pairs: dict[str, AdmissiblePair], samples: Sequence[VarietyPoint] | None = None) -> KernelFamily:
    fam = KernelFamily()
    for ident, pr in pairs.items():
        if samples is not None:
            validate_pair(pr, samples)
        fam.add(ident, KernelHandle(pr))
    return fam


def compression_closure(family: KernelFamily, centers: Sequence[VarietyPoint], depth: int = 1,
                        seed: int = 0) -> KernelFamily:
    """Family plus every compression of its members at ``centers`` along basis directions.

    Each round compresses the kernels produced by the previous round, so the
    size grows like (1 + len(centers) * alpha) ** depth.
    """
    spec = None
    out = KernelFamily(list(family.members))
    frontier = list(family.members)
    check_pts = None
    for _ in range(depth):
        new = []
        for ident, h in frontier:
            pr = h.pair
            if spec is not pr.spec:
                spec = pr.spec
                check_pts = sample_points(spec, SamplePlan(8, seed=seed + 7919))
            for ci, u in enumerate(centers):
                for k in range(pr.alpha):
                    g = np.zeros(pr.alpha, dtype=complex)
                    g[k] = 1
                    try:
                        res = compress(pr, u, g, samples=check_pts)
                    except ZeroDirection:
                        continue
                    new.append((f"{ident}|c{ci}e{k}", KernelHandle(res.new_pair)))
        out.members.extend(new)
        frontier = new
    return out


@dataclass
class FeasibilityReport:
    per_kernel_min_eig: list
    verdict: str  # "necessary-pass" or "fail"
    witness: str | None
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.verdict == "necessary-pass"

    @property
    def min_eig(self) -> float:
        return min(e for _, e in self.per_kernel_min_eig)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": self.witness,
            "tolerance": self.tolerance,
            "minEig": self.min_eig,
            "perKernelMinEig": [[i, e] for i, e in self.per_kernel_min_eig],
        }


def family_feasibility(problem: PickProblem, family: KernelFamily, psd_tol: float = PSD_TOL,
                       parallel: int = 1) -> FeasibilityReport:
    """Pick-matrix PSD test for every member; the first failing member is the witness.

    With ``parallel`` > 1 the members are evaluated on a thread pool; the
    report is assembled in family order either way.
    """
    if len(family) == 0:
        raise ValueError("kernel family is empty")

    def run(member):
        return is_psd(pick_matrix(member[1], problem), psd_tol)

    if parallel > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(run, family.members))
    else:
        results = [run(m) for m in family.members]
    per = []
    witness = None
    for (ident, _), res in zip(family.members, results):
        per.append((ident, res.min_eig))
        if not res.passed and witness is None:
            witness = ident
    return FeasibilityReport(per, "fail" if witness else "necessary-pass", witness, psd_tol)


# ---------------------------------------------------------------------------
# disk baselines


def classical_pick(nodes, targets, rho: float = 1.0, psd_tol: float = PSD_TOL) -> PSDResult:
    """PSD test of ((rho^2 - lam_i conj(lam_j)) / (1 - z_i conj(z_j)))."""
    z = np.asarray(nodes, dtype=complex)
    lam = np.asarray(targets, dtype=complex)
    if np.any(np.abs(z) >= 1):
        raise ValueError("classical Pick nodes must lie in the open disk")
    M = (rho ** 2 - np.outer(lam, lam.conj())) / (1 - np.outer(z, z.conj()))
    return is_psd((M + M.conj().T) / 2, psd_tol)


@dataclass
class DPRSReport:
    dprs_min_eigs: list
    pullback_min_eigs: list
    dprs_pass: bool
    pullback_pass: bool
    agree: bool | None  # None when an origin node makes the comparison meaningless
    origin_node: bool

    def to_json(self) -> dict:
        return {"dprsPass": self.dprs_pass, "pullbackPass": self.pullback_pass, "agree": self.agree,
                "originNode": self.origin_node, "dprsMinEig": min(self.dprs_min_eigs),
                "pullbackMinEig": min(self.pullback_min_eigs)}


def dprs_family_check(disk_nodes, targets, grid=64, rho: float = 1.0, psd_tol: float = PSD_TOL,
                      strict: bool = False) -> DPRSReport:
    """Sweep the constrained-disk kernels k_ab and their Neil pullbacks on the same data.

    ``grid`` is a size for :func:`ab_grid` or an explicit list of (a, b).
    The two Pick matrices are congruent through diag(s_j^2), so verdicts must
    agree whenever no node is 0.
    """
    s = np.asarray(disk_nodes, dtype=complex)
    lam = np.asarray(targets, dtype=complex)
    weights = rho ** 2 - np.outer(lam, lam.conj())
    abs_ = ab_grid(grid) if isinstance(grid, int) else list(grid)
    origin = bool(np.any(np.abs(s) <= 1e-12))
    if origin and strict:
        raise OriginNode("a node at s = 0 makes the pullback congruence singular")
    d_eigs, p_eigs = [], []
    d_ok = p_ok = True
    for a, b in abs_:
        M = weights * dprs_kernel(a, b, s[:, None], s[None, :])
        r = is_psd((M + M.conj().T) / 2, psd_tol)
        d_eigs.append(r.min_eig)
        d_ok &= r.passed
        N = weights * pullback_kernel(neil_pair_ab(a, b), s, s)[:, :, 0, 0]
        r = is_psd((N + N.conj().T) / 2, psd_tol)
        p_eigs.append(r.min_eig)
        p_ok &= r.passed
    agree = None if origin else (d_ok == p_ok)
    return DPRSReport(d_eigs, p_eigs, bool(d_ok), bool(p_ok), agree, origin)


# ---------------------------------------------------------------------------
# multiplier norms


@dataclass
class NormBound:
    value: float
    dropped: int = 0  # Gram eigen-directions below rcond * max eigenvalue left out
    ridge: float = 0.0  # only used with rcond = 0 when the Gram is singular


NORM_RCOND = 1e-7


def multiplier_norm_lower_bound(f_values, handle: KernelHandle, points: Sequence[VarietyPoint],
                                rcond: float = NORM_RCOND) -> NormBound:
    """Smallest M with (M^2 - f(x) conj(f(y))) K(x, y) PSD on ``points``.

    M^2 is the top eigenvalue of the pencil (f-weighted Gram, Gram), which
    bounds ||f||^2 as a multiplier of H^2(K) from below.  Rounding in the
    Gram perturbs that eigenvalue by about eps * cond(Gram), enough to push
    the bound past the true norm on a few dozen points.  The pencil is
    therefore restricted to the Gram eigenvectors with eigenvalue at least
    ``rcond`` times the largest; a restriction can only lower the bound.
    With ``rcond=0`` the full pencil is solved, regularising a singular Gram
    with a 1e-12 relative ridge.
    """
    if len(points) < 2:
        raise ValueError("need at least 2 points")
    f = np.asarray(f_values, dtype=complex)
    G = handle.matrix(points)
    fa = np.repeat(f, handle.alpha)
    H = np.outer(fa, fa.conj()) * G
    H = (H + H.conj().T) / 2
    if rcond > 0:
        ev, V = np.linalg.eigh(G)
        keep = ev > rcond * ev[-1]
        B = V[:, keep] / np.sqrt(ev[keep])
        C = B.conj().T @ H @ B
        top = np.linalg.eigvalsh((C + C.conj().T) / 2)[-1]
        return NormBound(float(np.sqrt(max(top, 0.0))), int((~keep).sum()))
    ridge = 0.0
    try:
        top = scipy.linalg.eigh(H, G, eigvals_only=True)[-1]
    except np.linalg.LinAlgError:
        ridge = 1e-12 * max(np.abs(G).max(), 1.0)
        top = scipy.linalg.eigh(H, G + ridge * np.eye(G.shape[0]), eigvals_only=True)[-1]
    return NormBound(float(np.sqrt(max(top, 0.0))), 0, ridge)


def torus_sup(q: BivariatePolynomial, grid: int = 128) -> float:
    """max |q| over a grid x grid lattice on the torus (the max over the closed bidisk)."""
    t = np.exp(2j * np.pi * np.arange(grid) / grid)
    return float(np.abs(q(t[:, None], t[None, :])).max())


def ando_bound_check(q: BivariatePolynomial, handle: KernelHandle, points: Sequence[VarietyPoint],
                     grid: int = 128, tol: float = 1e-8) -> dict:
    """Lower bound for ||q||_V against the bidisk sup of |q| (von Neumann / Ando)."""
    z = np.array([p.z for p in points])
    w = np.array([p.w for p in points])
    lb = multiplier_norm_lower_bound(q(z, w), handle, points).value
    bound = torus_sup(q, grid)
    return {"lowerBound": lb, "andoBound": bound, "pass": lb <= bound + tol}
