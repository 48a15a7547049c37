"""Dense complex bivariate polynomials and matrix polynomials.

A polynomial ``p(z, w) = sum_ij c[i, j] z**i w**j`` is stored as a dense
``(n+1, m+1)`` complex grid, row index = power of z, column index = power of w.
Degrees are kept tight: trailing all-zero rows/columns are trimmed on
construction.  Matrix polynomials use a 4-D grid ``(rows, cols, n+1, m+1)``.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateFiber, SchemaError

TRIM_TOL = 1e-14


def _trim(c: np.ndarray, tol: float = TRIM_TOL) -> np.ndarray:
    # trailing axes are (z-power, w-power); keep at least one of each
    mag = np.abs(c)
    lead = tuple(range(c.ndim - 2))
    rows = mag.max(axis=lead + (c.ndim - 1,)) if lead else mag.max(axis=1)
    cols = mag.max(axis=lead + (c.ndim - 2,)) if lead else mag.max(axis=0)
    nz_r = np.nonzero(rows > tol)[0]
    nz_c = np.nonzero(cols > tol)[0]
    n = nz_r[-1] + 1 if nz_r.size else 1
    m = nz_c[-1] + 1 if nz_c.size else 1
    return c[..., :n, :m]


def _powers(x: np.ndarray, deg: int) -> np.ndarray:
    return x[..., None] ** np.arange(deg + 1)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.flags.writeable = False
    return a


def _conv2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n1, m1 = a.shape
    n2, m2 = b.shape
    out = np.zeros((n1 + n2 - 1, m1 + m2 - 1), dtype=complex)
    for i in range(n1):
        for j in range(m1):
            if a[i, j] != 0:
                out[i:i + n2, j:j + m2] += a[i, j] * b
    return out


def _pad_to(c: np.ndarray, n: int, m: int) -> np.ndarray:
    pad = [(0, 0)] * (c.ndim - 2) + [(0, n - c.shape[-2]), (0, m - c.shape[-1])]
    return np.pad(c, pad)


def _json_complex(x: complex) -> list[float]:
    return [float(np.real(x)), float(np.imag(x))]


def _parse_complex(item, path: str) -> complex:
    if isinstance(item, (int, float)) and not isinstance(item, bool):
        return complex(item)
    if (
        isinstance(item, (list, tuple))
        and len(item) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in item)
    ):
        val = complex(item[0], item[1])
        if not np.isfinite(val):
            raise SchemaError("non-finite coefficient", path)
        return val
    raise SchemaError("expected [re, im] pair", path)


class BivariatePolynomial:
    """Immutable complex polynomial in (z, w) with tight bidegree."""

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        c = np.atleast_2d(np.asarray(coeffs, dtype=complex))
        if c.ndim != 2:
            raise ValueError("coefficient grid must be 2-D")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        self._c = _frozen(_trim(c))

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_terms(cls, terms: dict) -> "BivariatePolynomial":
        """Build from ``{(i, j): coefficient}``."""
        if not terms:
            return cls.constant(0)
        n = max(i for i, _ in terms) + 1
        m = max(j for _, j in terms) + 1
        c = np.zeros((n, m), dtype=complex)
        for (i, j), v in terms.items():
            c[i, j] += v
        return cls(c)

    @classmethod
    def constant(cls, value) -> "BivariatePolynomial":
        return cls([[value]])

    @classmethod
    def monomial(cls, i: int, j: int, coeff=1.0) -> "BivariatePolynomial":
        return cls.from_terms({(i, j): coeff})

    # -- properties -------------------------------------------------------
    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def zdeg(self) -> int:
        return self._c.shape[0] - 1

    @property
    def wdeg(self) -> int:
        return self._c.shape[1] - 1

    @property
    def bidegree(self) -> tuple[int, int]:
        return self.zdeg, self.wdeg

    def norm(self) -> float:
        return float(np.linalg.norm(self._c))

    def is_zero(self) -> bool:
        return bool(np.all(np.abs(self._c) <= TRIM_TOL))

    # -- evaluation -------------------------------------------------------
    def __call__(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        zp = _powers(z, self.zdeg)
        wp = _powers(w, self.wdeg)
        out = np.einsum("...i,ij,...j->...", zp, self._c, wp)
        return complex(out) if out.ndim == 0 else out

    def eval(self, z, w):
        return self(z, w)

    def magnitude(self, z, w):
        """sum_ij |c_ij| |z|^i |w|^j, the natural scale of a residual p(z, w)."""
        z = np.abs(np.asarray(z, dtype=complex))
        w = np.abs(np.asarray(w, dtype=complex))
        out = np.einsum("...i,ij,...j->...", _powers(z, self.zdeg), np.abs(self._c), _powers(w, self.wdeg))
        return float(out) if out.ndim == 0 else out

    def w_coefficients(self, z) -> np.ndarray:
        """Coefficients a_0..a_m of w -> p(z, w), lowest power first."""
        return _powers(np.asarray(z, dtype=complex), self.zdeg) @ self._c

    # -- structure --------------------------------------------------------
    def reflect(self) -> "BivariatePolynomial":
        """z^n w^m conj(p(1/conj z, 1/conj w)): reverse both axes and conjugate."""
        return BivariatePolynomial(np.conj(self._c[::-1, ::-1]))

    def conj_coeffs(self) -> "BivariatePolynomial":
        """The polynomial conj(p(conj z, conj w)) (coefficients conjugated)."""
        return BivariatePolynomial(np.conj(self._c))

    def symmetry_defect(self, tol: float = 1e-10) -> complex | None:
        """Unimodular c with reflect(p) == c * p, or None if no such c exists."""
        if self.is_zero():
            raise ValueError("symmetry defect of the zero polynomial is undefined")
        r = self.reflect()
        if r.bidegree != self.bidegree:
            return None
        k = np.unravel_index(np.argmax(np.abs(self._c)), self._c.shape)
        c = r.coeffs[k] / self._c[k]
        if abs(abs(c) - 1.0) > tol:
            return None
        if np.max(np.abs(r.coeffs - c * self._c)) > tol * max(1.0, np.abs(self._c).max()):
            return None
        return complex(c)

    def d_dw(self) -> "BivariatePolynomial":
        if self.wdeg == 0:
            return BivariatePolynomial.constant(0)
        return BivariatePolynomial(self._c[:, 1:] * np.arange(1, self.wdeg + 1))

    def d_dz(self) -> "BivariatePolynomial":
        if self.zdeg == 0:
            return BivariatePolynomial.constant(0)
        return BivariatePolynomial(self._c[1:, :] * np.arange(1, self.zdeg + 1)[:, None])

    def w_companion(self, z, tol: float = 1e-12) -> np.ndarray:
        """Companion matrix whose eigenvalues are the roots of w -> p(z, w).

        Raises DegenerateFiber when the leading w-coefficient at this z is
        below ``tol`` relative to the largest coefficient (degree drop).
        """
        a = self.w_coefficients(z)
        m = self.wdeg
        scale = max(np.abs(a).max(), 1e-300)
        if m == 0 or abs(a[m]) <= tol * scale:
            raise DegenerateFiber(z)
        comp = np.zeros((m, m), dtype=complex)
        if m > 1:
            comp[1:, :-1] = np.eye(m - 1)
        comp[:, -1] = -a[:m] / a[m]
        return comp

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "BivariatePolynomial":
        if isinstance(other, BivariatePolynomial):
            return other
        if np.isscalar(other):
            return BivariatePolynomial.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(self.zdeg, other.zdeg) + 1
        m = max(self.wdeg, other.wdeg) + 1
        return BivariatePolynomial(_pad_to(self._c, n, m) + _pad_to(other.coeffs, n, m))

    __radd__ = __add__

    def __neg__(self):
        return BivariatePolynomial(-self._c)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return self.scale(other)
        if not isinstance(other, BivariatePolynomial):
            return NotImplemented
        return BivariatePolynomial(_conv2(self._c, other.coeffs))

    def __rmul__(self, other):
        if np.isscalar(other):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        out = BivariatePolynomial.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, s) -> "BivariatePolynomial":
        return BivariatePolynomial(complex(s) * self._c)

    def __eq__(self, other):
        if not isinstance(other, BivariatePolynomial):
            return NotImplemented
        return self.bidegree == other.bidegree and bool(np.array_equal(self._c, other.coeffs))

    def allclose(self, other: "BivariatePolynomial", atol: float = 1e-12) -> bool:
        n = max(self.zdeg, other.zdeg) + 1
        m = max(self.wdeg, other.wdeg) + 1
        return bool(np.allclose(_pad_to(self._c, n, m), _pad_to(other.coeffs, n, m), atol=atol, rtol=0))

    def __hash__(self):
        return hash((self._c.shape, self._c.tobytes()))

    def __repr__(self):
        terms = []
        for (i, j), c in np.ndenumerate(self._c):
            if c != 0:
                terms.append(f"({c:g})z^{i}w^{j}")
        return "BivariatePolynomial(" + (" + ".join(terms) or "0") + ")"

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "zdeg": self.zdeg,
            "wdeg": self.wdeg,
            "coeffs": [[_json_complex(c) for c in row] for row in self._c],
        }

    @classmethod
    def from_json(cls, obj, path: str = "") -> "BivariatePolynomial":
        if not isinstance(obj, dict):
            raise SchemaError("polynomial must be an object", path)
        for key in ("zdeg", "wdeg", "coeffs"):
            if key not in obj:
                raise SchemaError(f"missing key {key!r}", path)
        n, m, rows = obj["zdeg"], obj["wdeg"], obj["coeffs"]
        if not isinstance(n, int) or not isinstance(m, int) or n < 0 or m < 0:
            raise SchemaError("degrees must be non-negative integers", path)
        if not isinstance(rows, list) or len(rows) != n + 1:
            raise SchemaError(f"expected {n + 1} coefficient rows", f"{path}/coeffs")
        grid = np.zeros((n + 1, m + 1), dtype=complex)
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != m + 1:
                raise SchemaError(f"ragged row: expected {m + 1} entries", f"{path}/coeffs/{i}")
            for j, item in enumerate(row):
                grid[i, j] = _parse_complex(item, f"{path}/coeffs/{i}/{j}")
        p = cls(grid)
        if p.bidegree != (n, m) and not p.is_zero():
            raise SchemaError(f"declared bidegree ({n},{m}) is not tight; actual {p.bidegree}", path)
        return p


Z = BivariatePolynomial.monomial(1, 0)
W = BivariatePolynomial.monomial(0, 1)
ONE = BivariatePolynomial.constant(1)


class MatrixPolynomial:
    """Immutable rows x cols matrix whose entries are bivariate polynomials."""

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        c = np.asarray(coeffs, dtype=complex)
        if c.ndim != 4:
            raise ValueError("matrix polynomial grid must be 4-D (rows, cols, zpow, wpow)")
        if c.shape[0] * c.shape[1] < 1:
            raise ValueError("matrix polynomial must have at least one entry")
        self._c = _frozen(_trim(c))

    @classmethod
    def from_entries(cls, entries) -> "MatrixPolynomial":
        """Build from a nested list of BivariatePolynomial (or scalars)."""
        rows = [[e if isinstance(e, BivariatePolynomial) else BivariatePolynomial.constant(e) for e in row]
                for row in entries]
        r, k = len(rows), len(rows[0])
        if any(len(row) != k for row in rows):
            raise ValueError("ragged entry list")
        n = max(e.zdeg for row in rows for e in row) + 1
        m = max(e.wdeg for row in rows for e in row) + 1
        c = np.zeros((r, k, n, m), dtype=complex)
        for i, row in enumerate(rows):
            for j, e in enumerate(row):
                c[i, j] = _pad_to(e.coeffs, n, m)
        return cls(c)

    @classmethod
    def constant(cls, mat) -> "MatrixPolynomial":
        mat = np.atleast_2d(np.asarray(mat, dtype=complex))
        return cls(mat[:, :, None, None])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "MatrixPolynomial":
        return cls(np.zeros((rows, cols, 1, 1)))

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def shape(self) -> tuple[int, int]:
        return self._c.shape[0], self._c.shape[1]

    @property
    def rows(self) -> int:
        return self._c.shape[0]

    @property
    def cols(self) -> int:
        return self._c.shape[1]

    @property
    def bidegree(self) -> tuple[int, int]:
        return self._c.shape[2] - 1, self._c.shape[3] - 1

    def entry(self, i: int, j: int) -> BivariatePolynomial:
        return BivariatePolynomial(self._c[i, j])

    def __call__(self, z, w) -> np.ndarray:
        """Evaluate; array inputs of shape S give output of shape S + (rows, cols)."""
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        n, m = self.bidegree
        return np.einsum("...i,rcij,...j->...rc", _powers(z, n), self._c, _powers(w, m))

    def eval(self, z, w) -> np.ndarray:
        return self(z, w)

    def __add__(self, other):
        if not isinstance(other, MatrixPolynomial):
            return NotImplemented
        if other.shape != self.shape:
            raise ValueError("shape mismatch in matrix polynomial addition")
        n = max(self.bidegree[0], other.bidegree[0]) + 1
        m = max(self.bidegree[1], other.bidegree[1]) + 1
        return MatrixPolynomial(_pad_to(self._c, n, m) + _pad_to(other.coeffs, n, m))

    def __neg__(self):
        return MatrixPolynomial(-self._c)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "MatrixPolynomial":
        """Multiply by a scalar or by a scalar polynomial."""
        if isinstance(s, BivariatePolynomial):
            r, k = self.shape
            out = None
            sc = s.coeffs
            n, m = self.bidegree
            out = np.zeros((r, k, n + sc.shape[0], m + sc.shape[1]), dtype=complex)
            for i in range(sc.shape[0]):
                for j in range(sc.shape[1]):
                    if sc[i, j] != 0:
                        out[:, :, i:i + n + 1, j:j + m + 1] += sc[i, j] * self._c
            return MatrixPolynomial(out)
        return MatrixPolynomial(complex(s) * self._c)

    def matmul(self, other) -> "MatrixPolynomial":
        """Matrix product with another MatrixPolynomial or a constant matrix."""
        if not isinstance(other, MatrixPolynomial):
            other = MatrixPolynomial.constant(other)
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        a, b = self._c, other.coeffs
        n1, m1 = a.shape[2:]
        n2, m2 = b.shape[2:]
        out = np.zeros((self.rows, other.cols, n1 + n2 - 1, m1 + m2 - 1), dtype=complex)
        for i in range(n1):
            for j in range(m1):
                blk = a[:, :, i, j]
                if np.any(blk):
                    out[:, :, i:i + n2, j:j + m2] += np.einsum("rk,kcij->rcij", blk, b)
        return MatrixPolynomial(out)

    __matmul__ = matmul

    def hstack(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        n = max(self.bidegree[0], other.bidegree[0]) + 1
        m = max(self.bidegree[1], other.bidegree[1]) + 1
        return MatrixPolynomial(np.concatenate([_pad_to(self._c, n, m), _pad_to(other.coeffs, n, m)], axis=1))

    def block_diag(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        n = max(self.bidegree[0], other.bidegree[0]) + 1
        m = max(self.bidegree[1], other.bidegree[1]) + 1
        r1, c1 = self.shape
        r2, c2 = other.shape
        out = np.zeros((r1 + r2, c1 + c2, n, m), dtype=complex)
        out[:r1, :c1] = _pad_to(self._c, n, m)
        out[r1:, c1:] = _pad_to(other.coeffs, n, m)
        return MatrixPolynomial(out)

    def allclose(self, other: "MatrixPolynomial", atol: float = 1e-12) -> bool:
        if self.shape != other.shape:
            return False
        n = max(self.bidegree[0], other.bidegree[0]) + 1
        m = max(self.bidegree[1], other.bidegree[1]) + 1
        return bool(np.allclose(_pad_to(self._c, n, m), _pad_to(other.coeffs, n, m), atol=atol, rtol=0))

    def __repr__(self):
        return f"MatrixPolynomial(shape={self.shape}, bidegree={self.bidegree})"

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[self.entry(i, j).to_json() for j in range(self.cols)] for i in range(self.rows)],
        }

    @classmethod
    def from_json(cls, obj, path: str = "") -> "MatrixPolynomial":
        if not isinstance(obj, dict):
            raise SchemaError("matrix polynomial must be an object", path)
        for key in ("rows", "cols", "entries"):
            if key not in obj:
                raise SchemaError(f"missing key {key!r}", path)
        r, k, ent = obj["rows"], obj["cols"], obj["entries"]
        if not isinstance(r, int) or not isinstance(k, int) or r < 1 or k < 1:
            raise SchemaError("rows and cols must be positive integers", path)
        if not isinstance(ent, list) or len(ent) != r:
            raise SchemaError(f"expected {r} entry rows", f"{path}/entries")
        rows = []
        for i, row in enumerate(ent):
            if not isinstance(row, list) or len(row) != k:
                raise SchemaError(f"ragged row: expected {k} entries", f"{path}/entries/{i}")
            rows.append([BivariatePolynomial.from_json(e, f"{path}/entries/{i}/{j}") for j, e in enumerate(row)])
        return cls.from_entries(rows)
