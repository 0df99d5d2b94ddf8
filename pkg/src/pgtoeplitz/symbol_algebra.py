"""Matrix-valued Laurent polynomials on the 2-torus.

A :class:`LaurentMatrix` stores a finitely supported map
``(m, n) -> C_{m,n}`` of dense complex ``d x d`` matrices and represents the
Bloch symbol

.. math::

    U(k_x, k_y) = \\sum_{(m, n)} C_{m,n} e^{i(m k_x + n k_y)}.

The coefficient ``C_{m,n}`` is the hopping amplitude across ``(m, n)`` unit
cells.  All operations act on coefficients, so algebraic identities between
symbols can be checked exactly instead of on a sampling grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "DROP_TOL",
    "TorusPoint",
    "LaurentMatrix",
    "identity",
    "zeros",
    "scalar",
    "monomial",
    "u_x",
    "u_y",
    "constant",
    "from_blocks",
    "direct_sum",
    "eval_symbol",
    "multiply",
    "adjoint",
    "flip_ky",
    "is_unitary",
    "torus_grid",
]

#: coefficients whose max-abs entry falls below this are dropped
DROP_TOL = 1e-14

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TorusPoint:
    """A point ``(k_x, k_y)`` of the Brillouin torus, angles reduced mod 2π."""

    k_x: float
    k_y: float

    def __post_init__(self):
        object.__setattr__(self, "k_x", float(self.k_x) % TWO_PI)
        object.__setattr__(self, "k_y", float(self.k_y) % TWO_PI)


def _as_point(k) -> tuple[float, float]:
    if isinstance(k, TorusPoint):
        return k.k_x, k.k_y
    kx, ky = k
    return float(kx), float(ky)


class LaurentMatrix:
    """Immutable matrix Laurent polynomial in ``u_x = e^{ik_x}``, ``u_y = e^{ik_y}``.

    Parameters
    ----------
    dim : int
        Matrix size ``d``.
    coeffs : mapping
        ``{(m, n): d x d array}``.  Coefficients with max-abs entry below
        :data:`DROP_TOL` are discarded, so the stored support is canonical.
    """

    __slots__ = ("_dim", "_coeffs")

    def __init__(self, dim: int, coeffs: Mapping[tuple[int, int], np.ndarray] | None = None):
        dim = int(dim)
        if dim < 1:
            raise ValueError(f"dim must be positive, got {dim}")
        clean = {}
        for key, mat in (coeffs or {}).items():
            m, n = (int(key[0]), int(key[1]))
            arr = np.array(mat, dtype=complex)
            if arr.shape != (dim, dim):
                raise ValueError(f"coefficient {key} has shape {arr.shape}, expected {(dim, dim)}")
            if (m, n) in clean:
                arr = arr + clean[(m, n)]
            if np.max(np.abs(arr)) < DROP_TOL:
                clean.pop((m, n), None)
                continue
            arr.setflags(write=False)
            clean[(m, n)] = arr
        self._dim = dim
        self._coeffs = dict(sorted(clean.items()))

    # -- basic accessors -------------------------------------------------
    @property
    def dim(self) -> int:
        return self._dim

    @property
    def coeffs(self) -> dict[tuple[int, int], np.ndarray]:
        return dict(self._coeffs)

    @property
    def support(self) -> list[tuple[int, int]]:
        return list(self._coeffs)

    def coeff(self, m: int, n: int) -> np.ndarray:
        c = self._coeffs.get((m, n))
        if c is None:
            return np.zeros((self._dim, self._dim), dtype=complex)
        return c

    @property
    def x_degree(self) -> int:
        return max((abs(m) for m, _ in self._coeffs), default=0)

    @property
    def y_degree(self) -> int:
        return max((abs(n) for _, n in self._coeffs), default=0)

    @property
    def y_range(self) -> tuple[int, int]:
        """Smallest and largest ``n`` in the support, ``(0, 0)`` if empty."""
        ns = [n for _, n in self._coeffs]
        return (min(ns), max(ns)) if ns else (0, 0)

    def is_zero(self) -> bool:
        return not self._coeffs

    def max_norm(self) -> float:
        """Largest absolute value of any coefficient entry."""
        return max((float(np.max(np.abs(c))) for c in self._coeffs.values()), default=0.0)

    def lipschitz_bound(self) -> float:
        """``sum ||C_{m,n}||_2 (|m| + |n|)``, a bound on the gradient of ``U(k)``."""
        return float(
            sum(np.linalg.norm(c, 2) * (abs(m) + abs(n)) for (m, n), c in self._coeffs.items())
        )

    def entry(self, i: int, j: int) -> "LaurentMatrix":
        """The scalar symbol sitting at matrix position ``(i, j)``."""
        return LaurentMatrix(1, {k: c[i : i + 1, j : j + 1] for k, c in self._coeffs.items()})

    def block(self, rows: slice, cols: slice) -> "LaurentMatrix":
        sub = {k: c[rows, cols] for k, c in self._coeffs.items()}
        size = len(range(*rows.indices(self._dim)))
        if size != len(range(*cols.indices(self._dim))):
            raise ValueError("only square blocks are LaurentMatrix values")
        return LaurentMatrix(size, sub)

    # -- evaluation ------------------------------------------------------
    def __call__(self, k_x, k_y) -> np.ndarray:
        """Evaluate on scalars or broadcastable arrays; output shape ``(..., d, d)``."""
        kx = np.asarray(k_x, dtype=float)
        ky = np.asarray(k_y, dtype=float)
        shape = np.broadcast(kx, ky).shape
        out = np.zeros(shape + (self._dim, self._dim), dtype=complex)
        for (m, n), c in self._coeffs.items():
            phase = np.exp(1j * (m * kx + n * ky))
            out += np.asarray(phase)[..., None, None] * c
        return out

    def fourier_y(self, k_x: float) -> dict[int, np.ndarray]:
        """Coefficients in ``u_y`` of the one-variable symbol ``k_y -> U(k_x, k_y)``."""
        out: dict[int, np.ndarray] = {}
        for (m, n), c in self._coeffs.items():
            out[n] = out.get(n, 0) + np.exp(1j * m * k_x) * c
        return dict(sorted(out.items()))

    def fourier_x(self, k_y: float) -> dict[int, np.ndarray]:
        """Coefficients in ``u_x`` of the one-variable symbol ``k_x -> U(k_x, k_y)``."""
        out: dict[int, np.ndarray] = {}
        for (m, n), c in self._coeffs.items():
            out[m] = out.get(m, 0) + np.exp(1j * n * k_y) * c
        return dict(sorted(out.items()))

    # -- algebra ---------------------------------------------------------
    def _check_dim(self, other: "LaurentMatrix") -> None:
        if not isinstance(other, LaurentMatrix):
            raise TypeError(f"expected LaurentMatrix, got {type(other).__name__}")
        if other.dim != self._dim:
            raise ValueError(f"dimension mismatch: {self._dim} vs {other.dim}")

    def __add__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        self._check_dim(other)
        out = dict(self._coeffs)
        for k, c in other._coeffs.items():
            out[k] = out[k] + c if k in out else c
        return LaurentMatrix(self._dim, out)

    def __neg__(self) -> "LaurentMatrix":
        return LaurentMatrix(self._dim, {k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        return self + (-other)

    def __mul__(self, factor) -> "LaurentMatrix":
        if isinstance(factor, LaurentMatrix):
            return NotImplemented
        return LaurentMatrix(self._dim, {k: factor * c for k, c in self._coeffs.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        return multiply(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentMatrix) or other.dim != self._dim:
            return False
        if self._coeffs.keys() != other._coeffs.keys():
            return False
        return all(np.array_equal(c, other._coeffs[k]) for k, c in self._coeffs.items())

    __hash__ = None  # type: ignore[assignment]

    def allclose(self, other: "LaurentMatrix", tol: float = 1e-12) -> bool:
        """Exact comparison first, then coefficient max-norm within ``tol``."""
        if self == other:
            return True
        self._check_dim(other)
        return (self - other).max_norm() <= tol

    def swap_axes(self) -> "LaurentMatrix":
        """Exchange the roles of ``k_x`` and ``k_y``."""
        return LaurentMatrix(self._dim, {(n, m): c for (m, n), c in self._coeffs.items()})

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "dim": self._dim,
            "terms": [
                {"m": m, "n": n, "re": c.real.tolist(), "im": c.imag.tolist()}
                for (m, n), c in self._coeffs.items()
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "LaurentMatrix":
        extra = set(data) - {"dim", "terms"}
        if extra:
            raise ValueError(f"unknown LaurentMatrix fields: {sorted(extra)}")
        dim = int(data["dim"])
        coeffs = {}
        for term in data.get("terms", []):
            re = np.asarray(term["re"], dtype=float)
            im = np.asarray(term["im"], dtype=float)
            coeffs[(int(term["m"]), int(term["n"]))] = re + 1j * im
        return cls(dim, coeffs)

    def __repr__(self) -> str:
        return f"LaurentMatrix(dim={self._dim}, support={self.support})"


# -- constructors -----------------------------------------------------------
def zeros(dim: int) -> LaurentMatrix:
    return LaurentMatrix(dim)


def identity(dim: int) -> LaurentMatrix:
    return LaurentMatrix(dim, {(0, 0): np.eye(dim)})


def constant(mat) -> LaurentMatrix:
    mat = np.atleast_2d(np.asarray(mat, dtype=complex))
    return LaurentMatrix(mat.shape[0], {(0, 0): mat})


def monomial(m: int, n: int, mat=None, dim: int = 1) -> LaurentMatrix:
    """``mat * u_x^m u_y^n`` (``mat`` defaults to the identity of size ``dim``)."""
    mat = np.eye(dim) if mat is None else np.atleast_2d(np.asarray(mat, dtype=complex))
    return LaurentMatrix(mat.shape[0], {(m, n): mat})


def scalar(terms: Mapping[tuple[int, int], complex] | complex) -> LaurentMatrix:
    """Scalar (``dim = 1``) symbol from ``{(m, n): value}`` or a constant."""
    if not isinstance(terms, Mapping):
        terms = {(0, 0): terms}
    return LaurentMatrix(1, {k: np.array([[v]], dtype=complex) for k, v in terms.items()})


def u_x(power: int = 1, dim: int = 1) -> LaurentMatrix:
    return monomial(power, 0, dim=dim)


def u_y(power: int = 1, dim: int = 1) -> LaurentMatrix:
    return monomial(0, power, dim=dim)


def from_blocks(blocks: Iterable[Iterable[LaurentMatrix | None]]) -> LaurentMatrix:
    """Assemble a block matrix; ``None`` entries are zero blocks.

    All blocks in a block row share a row size; sizes are read from the
    non-``None`` entries, and the result must be square.
    """
    rows = [list(r) for r in blocks]
    nr, nc = len(rows), len(rows[0])
    row_sizes = [None] * nr
    col_sizes = [None] * nc
    for i, r in enumerate(rows):
        if len(r) != nc:
            raise ValueError("ragged block layout")
        for j, b in enumerate(r):
            if b is not None:
                row_sizes[i] = row_sizes[i] or b.dim
                col_sizes[j] = col_sizes[j] or b.dim
                if row_sizes[i] != b.dim or col_sizes[j] != b.dim:
                    raise ValueError("inconsistent block sizes")
    if None in row_sizes or None in col_sizes:
        raise ValueError("every block row and column needs one explicit block")
    dim = sum(row_sizes)
    if dim != sum(col_sizes):
        raise ValueError("block matrix is not square")
    r_off = np.concatenate([[0], np.cumsum(row_sizes)])
    c_off = np.concatenate([[0], np.cumsum(col_sizes)])
    out: dict[tuple[int, int], np.ndarray] = {}
    for i, r in enumerate(rows):
        for j, b in enumerate(r):
            if b is None:
                continue
            for k, c in b._coeffs.items():
                if k not in out:
                    out[k] = np.zeros((dim, dim), dtype=complex)
                out[k][r_off[i] : r_off[i + 1], c_off[j] : c_off[j + 1]] = c
    return LaurentMatrix(dim, out)


def direct_sum(*mats: LaurentMatrix) -> LaurentMatrix:
    """Block-diagonal sum ``A ⊕ B ⊕ ...``."""
    dim = sum(a.dim for a in mats)
    out: dict[tuple[int, int], np.ndarray] = {}
    off = 0
    for a in mats:
        for k, c in a._coeffs.items():
            if k not in out:
                out[k] = np.zeros((dim, dim), dtype=complex)
            out[k][off : off + a.dim, off : off + a.dim] = c
        off += a.dim
    return LaurentMatrix(dim, out)


# -- named operations ------------------------------------------------------
def eval_symbol(L: LaurentMatrix, k) -> np.ndarray:
    """Evaluate ``L`` at a :class:`TorusPoint` or ``(k_x, k_y)`` pair."""
    kx, ky = _as_point(k)
    return L(kx, ky)


def multiply(A: LaurentMatrix, B: LaurentMatrix) -> LaurentMatrix:
    """Coefficient convolution; support lies in the Minkowski sum of supports."""
    A._check_dim(B)
    out: dict[tuple[int, int], np.ndarray] = {}
    for (m1, n1), c1 in A._coeffs.items():
        for (m2, n2), c2 in B._coeffs.items():
            key = (m1 + m2, n1 + n2)
            prod = c1 @ c2
            out[key] = out[key] + prod if key in out else prod
    return LaurentMatrix(A.dim, out)


def adjoint(A: LaurentMatrix) -> LaurentMatrix:
    """Pointwise conjugate transpose: ``C_{m,n} -> C_{-m,-n}^†``."""
    return LaurentMatrix(A.dim, {(-m, -n): c.conj().T for (m, n), c in A._coeffs.items()})


def flip_ky(A: LaurentMatrix) -> LaurentMatrix:
    """Substitute ``k_y -> -k_y``."""
    return LaurentMatrix(A.dim, {(m, -n): c for (m, n), c in A._coeffs.items()})


def torus_grid(size: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform ``size x size`` grid on ``[0, 2π)^2`` as two meshgrid arrays."""
    ks = TWO_PI * np.arange(size) / size
    return np.meshgrid(ks, ks, indexing="ij")


def is_unitary(A: LaurentMatrix, grid_size: int = 64, tol: float = 1e-12) -> tuple[bool, float]:
    """Max operator-norm of ``A(k)A(k)^† - I`` over a uniform torus grid."""
    if grid_size < 1:
        raise ValueError("grid_size must be >= 1")
    kx, ky = torus_grid(grid_size)
    vals = A(kx, ky)
    defect = vals @ np.conj(np.swapaxes(vals, -1, -2)) - np.eye(A.dim)
    residual = float(np.max(np.linalg.norm(defect, ord=2, axis=(-2, -1))))
    return residual <= tol, residual
