"""The zero set Z_p, its bidisk part V, fibers over z, and point sampling."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .bipoly import BivariatePolynomial
from .errors import (
    DegenerateFiber,
    ExhaustedSampling,
    GenericSearchFailed,
    MixedRegion,
    NotOnVariety,
    OriginReflection,
    SquareFreeViolation,
)

Region = Literal["interior", "boundary", "exterior"]

CLUSTER_TOL = 1e-7


@dataclass(frozen=True)
class VarietySpec:
    p: BivariatePolynomial
    membership_tol: float = 1e-9
    boundary_tol: float = 1e-8

    def __post_init__(self):
        n, m = self.p.bidegree
        if n < 1 or m < 1:
            raise ValueError(f"bidegree must be at least (1, 1), got {(n, m)}")
        if self.membership_tol <= 0 or self.boundary_tol <= 0:
            raise ValueError("tolerances must be positive")

    @property
    def bidegree(self) -> tuple[int, int]:
        return self.p.bidegree

    @property
    def n(self) -> int:
        return self.p.zdeg

    @property
    def m(self) -> int:
        return self.p.wdeg

    def residual(self, z, w) -> float:
        """|p(z, w)| relative to the term magnitudes at (z, w)."""
        return abs(self.p(z, w)) / (1.0 + self.p.magnitude(z, w))

    def classify(self, z, w) -> Region:
        az, aw = abs(z), abs(w)
        tol = self.boundary_tol
        if max(az, aw) < 1 - tol:
            return "interior"
        if abs(az - 1) <= tol and abs(aw - 1) <= tol:
            return "boundary"
        if min(az, aw) > 1 + tol:
            return "exterior"
        raise MixedRegion(f"point ({z}, {w}) has mixed moduli ({az:.6g}, {aw:.6g})")

    def point(self, z, w) -> "VarietyPoint":
        """Validated VarietyPoint; raises NotOnVariety / MixedRegion."""
        z, w = complex(z), complex(w)
        if self.residual(z, w) > self.membership_tol:
            raise NotOnVariety(f"|p({z}, {w})| residual {self.residual(z, w):.3g} exceeds tolerance")
        return VarietyPoint(z, w, self.classify(z, w))


@dataclass(frozen=True)
class VarietyPoint:
    z: complex
    w: complex
    region: Region = "interior"

    def as_tuple(self) -> tuple[complex, complex]:
        return self.z, self.w


@dataclass(frozen=True)
class SamplePlan:
    count: int
    seed: int = 0
    radial_bias: float = 0.05

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("SamplePlan.count must be >= 1")
        if not 0 <= self.radial_bias < 1:
            raise ValueError("radial_bias must lie in [0, 1)")


@dataclass(frozen=True)
class Fiber:
    z: complex
    roots: np.ndarray  # distinct cluster centres
    multiplicities: np.ndarray

    @property
    def all_roots(self) -> np.ndarray:
        return np.repeat(self.roots, self.multiplicities)


@dataclass
class CertificationReport:
    passed: bool
    worst_deviation: float
    degenerate_fibers: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "worstDeviation": self.worst_deviation,
            "degenerateFibers": [[z.real, z.imag] for z in self.degenerate_fibers],
        }


def cluster_roots(roots, tol: float = CLUSTER_TOL) -> tuple[np.ndarray, np.ndarray]:
    roots = np.asarray(roots, dtype=complex)
    centres: list[list[complex]] = []
    for r in roots:
        for group in centres:
            if abs(np.mean(group) - r) <= tol:
                group.append(r)
                break
        else:
            centres.append([r])
    return (np.array([np.mean(g) for g in centres], dtype=complex),
            np.array([len(g) for g in centres], dtype=int))


def fiber(spec: VarietySpec, z) -> Fiber:
    """Roots w of p(z, .) with multiplicities; DegenerateFiber on a degree drop."""
    z = complex(z)
    roots = np.linalg.eigvals(spec.p.w_companion(z))
    centres, mult = cluster_roots(roots)
    return Fiber(z, centres, mult)


def certify_distinguished(spec: VarietySpec, circle_samples: int = 256,
                          check_square_free: bool = True) -> CertificationReport:
    """Check that every fiber over the unit circle lies on the unit circle.

    Degenerate fibers are recorded in the report (they are isolated points
    of the circle); the verdict is taken over the remaining samples.
    """
    if circle_samples < 8:
        raise ValueError("circle_samples must be >= 8")
    if check_square_free:
        square_free_check(spec)
    worst = 0.0
    degenerate = []
    for theta in 2 * np.pi * np.arange(circle_samples) / circle_samples:
        z = np.exp(1j * theta)
        try:
            roots = np.linalg.eigvals(spec.p.w_companion(z))
        except DegenerateFiber:
            degenerate.append(z)
            continue
        worst = max(worst, float(np.max(np.abs(np.abs(roots) - 1.0))))
    return CertificationReport(worst <= spec.boundary_tol, worst, degenerate)


def square_free_check(spec: VarietySpec, samples: int = 200, seed: int = 12345) -> float:
    """Heuristic check that p and dp/dw share no curve of common zeros.

    Returns the fraction of sampled fibers carrying a repeated root; raises
    SquareFreeViolation when that fraction exceeds one half (a repeated
    factor repeats roots over every z, a square-free p only over finitely many).
    """
    rng = np.random.default_rng(seed)
    dp = spec.p.d_dw()
    repeated = 0
    used = 0
    for _ in range(samples):
        z = 0.9 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        try:
            fb = fiber(spec, z)
        except DegenerateFiber:
            continue
        used += 1
        hit = np.any(fb.multiplicities > 1)
        if not hit:
            scale = 1.0 + dp.magnitude(z, fb.roots)
            hit = bool(np.any(np.abs(dp(z, fb.roots)) <= 1e-10 * scale))
        repeated += int(hit)
    frac = repeated / max(used, 1)
    if used == 0 or frac > 0.5:
        raise SquareFreeViolation(
            f"p and dp/dw appear to share a common factor ({repeated}/{used} fibers with repeated roots)")
    return frac


def sample_points(spec: VarietySpec, plan: SamplePlan) -> list[VarietyPoint]:
    """Deterministic interior samples: z uniform in a shrunken disk, one fiber root per draw."""
    rng = np.random.default_rng(plan.seed)
    radius = 1.0 - plan.radial_bias
    out: list[VarietyPoint] = []
    limit = 1 - spec.boundary_tol
    for _ in range(100 * plan.count):
        z = radius * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        try:
            roots = np.linalg.eigvals(spec.p.w_companion(z))
        except DegenerateFiber:
            continue
        w = roots[rng.integers(len(roots))]
        if abs(w) >= limit or abs(z) >= limit:
            continue
        if spec.residual(z, w) > spec.membership_tol:
            continue
        out.append(VarietyPoint(complex(z), complex(w), "interior"))
        if len(out) == plan.count:
            return out
    raise ExhaustedSampling(f"found {len(out)} of {plan.count} interior points after {100 * plan.count} draws")


def reflect_point(spec: VarietySpec, pt: VarietyPoint) -> VarietyPoint:
    """(z, w) -> (1/conj z, 1/conj w), the matching point of the exterior component."""
    if pt.region != "interior":
        raise ValueError("reflect_point expects an interior point")
    if abs(pt.z) <= 1e-12 or abs(pt.w) <= 1e-12:
        raise OriginReflection(f"cannot reflect ({pt.z}, {pt.w}): a coordinate vanishes")
    z, w = 1 / np.conj(pt.z), 1 / np.conj(pt.w)
    # p(1/conj z, 1/conj w) = conj(reflect(p)(z, w)) / conj(z^n w^m)
    pr = spec.p.reflect()
    if abs(pr(pt.z, pt.w)) > spec.membership_tol * (1.0 + pr.magnitude(pt.z, pt.w)):
        raise NotOnVariety("reflected point is not on Z_p (p lacks the reflection symmetry?)")
    return VarietyPoint(complex(z), complex(w), "exterior")


@dataclass(frozen=True)
class GenericColumn:
    lam: complex
    mus: np.ndarray
    stacked: np.ndarray  # (Q(lam, mu_1)^* ... Q(lam, mu_m)^*), size m*alpha square
    sigma_min: float
    sigma_min_reflected: float


def stacked_q_adjoint(Q, z, ws) -> np.ndarray:
    """Horizontal stack of Q(z, w_j)^* over the fiber points w_j."""
    return np.hstack([Q(z, w).conj().T for w in ws])


def find_generic_column(spec: VarietySpec, pair, tries: int = 50, seed: int = 0,
                        lam=None, sigma_tol: float = 1e-8) -> GenericColumn:
    """Find lam in D with m distinct nonzero fiber points and invertible stacked Q^*.

    With ``lam`` given only that value is tried.
    """
    rng = np.random.default_rng(seed)
    m = spec.m
    candidates = [complex(lam)] if lam is not None else (
        0.9 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random()) for _ in range(tries))
    reason = "no candidates"
    for cand in candidates:
        try:
            fb = fiber(spec, cand)
        except DegenerateFiber:
            reason = f"degenerate fiber at {cand}"
            continue
        mus = fb.roots
        if len(mus) != m or np.any(fb.multiplicities > 1):
            reason = f"repeated fiber roots at lambda={cand}"
            continue
        if np.any(np.abs(mus) <= 1e-8) or np.any(np.abs(mus) >= 1 - spec.boundary_tol):
            reason = f"fiber root at 0 or outside D at lambda={cand}"
            continue
        if abs(cand) <= 1e-8:
            reason = "lambda = 0 cannot be reflected"
            continue
        Z = stacked_q_adjoint(pair.Q, cand, mus)
        s = np.linalg.svd(Z, compute_uv=False).min()
        Zr = stacked_q_adjoint(pair.Q, 1 / np.conj(cand), 1 / np.conj(mus))
        sr = np.linalg.svd(Zr, compute_uv=False).min()
        if s > sigma_tol and sr > sigma_tol:
            return GenericColumn(complex(cand), mus, Z, float(s), float(sr))
        reason = f"stacked Q^* near singular at lambda={cand} (sigma_min={s:.3g}, reflected {sr:.3g})"
    raise GenericSearchFailed(reason)


def neil_spec(**kwargs) -> VarietySpec:
    """The Neil parabola z^3 = w^2."""
    return VarietySpec(BivariatePolynomial.from_terms({(3, 0): 1, (0, 2): -1}), **kwargs)
