"""One-variable corrector functions: the peaking sequence g_n and finite Blaschke products."""

from __future__ import annotations

import functools
from math import comb, factorial
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ZeroOnBoundary

GRID = 4096


def _circle(grid: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(grid) / grid)


def c_n(n: int) -> float:
    return 1.0 - n ** -2.0


def h_n(n: int, z):
    """exp(-(1/n)(1 + c z)/(1 - c z)) - exp(-(1/n)(1 + c)/(1 - c)) with c = c_n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    c = c_n(n)
    z = np.asarray(z, dtype=complex)
    out = np.exp(-(1 + c * z) / (n * (1 - c * z))) - np.exp(-(1 + c) / (n * (1 - c)))
    return complex(out) if out.ndim == 0 else out


@functools.lru_cache(maxsize=64)
def h_norm(n: int, grid: int = GRID) -> float:
    """max |h_n| over a circle grid."""
    return float(np.abs(h_n(n, _circle(grid))).max())


@dataclass(frozen=True)
class CorrectorSequenceElement:
    n: int
    grid: int = GRID

    @property
    def c(self) -> float:
        return c_n(self.n)

    @property
    def norm(self) -> float:
        return h_norm(self.n, self.grid)

    def __call__(self, z):
        return eval_gn(self.n, z, self.grid)


def eval_gn(n: int, z, grid: int = GRID):
    """g_n = h_n / ||h_n||, the sup norm taken on a ``grid``-point circle."""
    return h_n(n, z) / h_norm(n, grid)


def disk_deviation(n: int, radius: float = 0.9, grid: int = GRID) -> float:
    """max |g_n - 1| over |z| <= radius (maximum principle: evaluate on the circle of that radius)."""
    return float(np.abs(eval_gn(n, radius * _circle(grid), grid) - 1).max())


@dataclass(frozen=True)
class InnerCorrector:
    zeros: tuple
    order: int
    boundary_point: complex
    rotation: complex

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.rotation, dtype=complex)
        for a in self.zeros:
            out = out * ((z - a) / (1 - np.conj(a) * z)) ** self.order
        return complex(out) if out.ndim == 0 else out

    def modulus_defect(self, grid: int = GRID) -> float:
        return float(np.abs(np.abs(self(_circle(grid))) - 1).max())


def build_inner_corrector(zeros: Sequence[complex], N: int, boundary_point=1.0) -> InnerCorrector:
    """Blaschke product c * prod ((z - a)/(1 - conj(a) z))^N with c making b(beta) = 1.

    Only one boundary point is supported; pass a list of several and a
    ValueError is raised.
    """
    if N < 1:
        raise ValueError("order N must be >= 1")
    if np.ndim(boundary_point) > 0:
        pts = list(np.atleast_1d(boundary_point))
        if len(pts) != 1:
            raise ValueError("only a single boundary point is supported")
        boundary_point = pts[0]
    beta = complex(boundary_point)
    if abs(abs(beta) - 1) > 1e-12:
        raise ValueError("boundary point must lie on the unit circle")
    zs = tuple(complex(a) for a in zeros)
    for a in zs:
        if abs(a) >= 1 - 1e-12:
            raise ZeroOnBoundary(f"zero {a} is not strictly inside the disk")
    raw = InnerCorrector(zs, N, beta, 1.0 + 0j)(beta)
    return InnerCorrector(zs, N, beta, complex(1 / raw))


def taylor_coefficients(f: Callable, center, order: int, radius: float = 1e-2, nodes: int = 64) -> np.ndarray:
    """First ``order`` + 1 Taylor coefficients of f at ``center`` from an FFT over a small circle."""
    t = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    vals = np.asarray(f(center + radius * t), dtype=complex)
    coef = np.fft.fft(vals) / nodes
    return coef[: order + 1] / radius ** np.arange(order + 1)


def derivatives(f: Callable, center, order: int, radius: float = 1e-2, nodes: int = 64) -> np.ndarray:
    """f^{(k)}(center), k = 0..order."""
    c = taylor_coefficients(f, center, order, radius, nodes)
    return c * np.array([factorial(k) for k in range(order + 1)])


def composed_corrector(n: int, b: InnerCorrector, N: int) -> Callable:
    """G = (g_n o b)^N."""
    def G(z):
        return eval_gn(n, b(z)) ** N
    G.feature_scale = 1 - c_n(n)  # distance from 1 to the singularity of g_n
    return G


@dataclass
class VanishingReport:
    boundary: list  # per boundary point: |G^(k)(beta)|, k = 0..order-1
    interior: list  # per interior zero: |G^(k)(a)|, k = 1..order-1
    passed: bool

    def to_json(self) -> dict:
        return {"boundary": self.boundary, "interior": self.interior, "pass": self.passed}


def corrector_vanishing_check(G: Callable, boundary_points=(), interior_points=(), order: int = 1,
                              deriv_tol: float = 1e-6, value_tol: float = 1e-8, h: float | None = None) -> VanishingReport:
    """Check that G vanishes to ``order`` at boundary points and is flat to ``order`` at interior zeros.

    At a boundary point beta, G and its first order-1 derivatives must vanish
    (one-sided radial finite differences from inside the disk).  At an
    interior zero a of b, G - G(a) must vanish to order ``order``: the
    derivatives 1..order-1, from a Cauchy contour, must be below value_tol.
    The default step is 1% of ``G.feature_scale`` when G carries one.
    """
    if h is None:
        h = 1e-2 * getattr(G, "feature_scale", 1e-3)
    bnd = []
    ok = True
    for beta in boundary_points:
        beta = complex(beta)
        ds = [float(abs(_radial_derivative(G, beta, k, h))) for k in range(order)]
        ok &= all(d <= (value_tol if k == 0 else deriv_tol) for k, d in enumerate(ds))
        bnd.append(ds)
    inner = []
    for a in interior_points:
        a = complex(a)
        radius = min(1e-2, (1 - abs(a)) / 2)
        ds = [float(abs(d)) for d in derivatives(G, a, max(order - 1, 0), radius)[1:]]
        ok &= all(d <= value_tol for d in ds)
        inner.append(ds)
    return VanishingReport(bnd, inner, bool(ok))


def _radial_derivative(G: Callable, beta: complex, k: int, h: float) -> complex:
    """k-th derivative along the inward normal at beta by backward differences (in the direction beta)."""
    if k == 0:
        return complex(G(beta))
    acc = 0j
    for j in range(k + 1):
        acc += (-1) ** j * comb(k, j) * G(beta * (1 - j * h))
    # step in z is -h*beta per index; rescale by (h * beta)^k
    return acc / (h * beta) ** k
