"""Finite sections of Toeplitz operators in the ``k_y`` direction.

At fixed ``k_x`` the symbol ``U(k_x, .)`` is a Laurent polynomial in
``u_y`` with coefficients ``C_n(k_x) = sum_m C_{m,n} e^{i m k_x}``.  Its
multiplication operator acts on mode sequences ``(c_l)`` by
``(M c)_{l'} = sum_l C_{l'-l} c_l``.

Three truncations are provided:

``toeplitz_upper``
    compression to modes ``l >= 0``.  The section keeps columns
    ``0..N-1`` and every row they reach, ``0..N+D-1``, so a vector in
    its kernel is an exact kernel vector of the half-infinite operator.
``toeplitz_lower``
    the same for modes ``l <= -1``, indexed by the distance ``j = -l-1``
    from the wall.
``circulant``
    the full multiplication operator on ``2N`` cyclic modes
    ``l = -N..N-1``; exactly unitary when ``U`` is.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Literal, Sequence

import numpy as np

from . import symbol_algebra as sa
from .errors import (
    AmbiguousKernelError,
    CutoffTooSmallError,
    Mod2InconsistencyError,
    NonUnitaryError,
    NotStabilizedError,
)
from .models import PgModel, SshModel
from .symbol_algebra import LaurentMatrix

__all__ = [
    "FiniteSection",
    "KernelDim",
    "KernelReport",
    "KaroubiReport",
    "CompactnessReport",
    "KERNEL_TOL",
    "GAP_RATIO",
    "y_symbol",
    "build_section",
    "kernel_dim",
    "kernel_basis",
    "fredholm_index",
    "family_mod2_index",
    "karoubi_check",
    "compactness_decay",
    "singular_value_profile",
    "profile_csv",
    "CrossingReport",
    "flatten_y",
    "crossing_mod2_index",
]

KERNEL_TOL = 1e-8
GAP_RATIO = 1e-3

Kind = Literal["toeplitz_upper", "toeplitz_lower", "circulant"]
KINDS = ("toeplitz_upper", "toeplitz_lower", "circulant")


def y_symbol(obj) -> LaurentMatrix:
    """The symbol whose ``u_y`` dependence is sectioned.

    SSH chains live in ``u_x``; their axes are swapped so the chain runs
    along ``y``.
    """
    if isinstance(obj, PgModel):
        return obj.U
    if isinstance(obj, SshModel):
        return obj.U.swap_axes()
    if isinstance(obj, LaurentMatrix):
        return obj
    raise TypeError(f"cannot take a Toeplitz section of {type(obj).__name__}")


@dataclass(frozen=True)
class FiniteSection:
    """A block Toeplitz or block circulant truncation at fixed ``k_x``.

    ``matrix`` has ``(N + D) d`` rows and ``N d`` columns for the two
    Toeplitz kinds and is ``2 N d`` square for the circulant kind.
    """

    kind: str
    k_x: float
    N: int
    d: int
    D: int
    matrix: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def build_section(m, k_x: float, N: int, kind: Kind = "toeplitz_upper") -> FiniteSection:
    """Finite section of the ``u_y`` multiplication operator at ``k_x``.

    Raises
    ------
    CutoffTooSmallError
        ``N <= 2 D`` with ``D`` the ``u_y`` degree.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    U = y_symbol(m)
    d, D = U.dim, U.y_degree
    if N <= 2 * D:
        raise CutoffTooSmallError(f"cutoff N={N} must exceed 2*D={2 * D}")
    coeffs = U.fourier_y(k_x)
    if kind == "circulant":
        size = 2 * N
        mat = np.zeros((size * d, size * d), dtype=complex)
        for p in range(size):
            for n, c in coeffs.items():
                q = (p + n) % size
                mat[q * d : (q + 1) * d, p * d : (p + 1) * d] += c
        return FiniteSection(kind, k_x, N, d, D, mat)
    rows = N + D
    mat = np.zeros((rows * d, N * d), dtype=complex)
    sign = 1 if kind == "toeplitz_upper" else -1
    for col in range(N):
        for n, c in coeffs.items():
            # upper: row l' = l + n; lower (distance index): j' = j - n
            row = col + sign * n
            if 0 <= row < rows:
                mat[row * d : (row + 1) * d, col * d : (col + 1) * d] = c
    return FiniteSection(kind, k_x, N, d, D, mat)


@dataclass(frozen=True)
class KernelDim:
    """Kernel count with the separation of its singular values."""

    dim: int
    gap_ratio: float
    tol: float
    sigma: np.ndarray = field(repr=False)

    @property
    def trusted(self) -> bool:
        return self.gap_ratio < GAP_RATIO


def _count_below(sigma: np.ndarray, tol: float, what: str, strict: bool) -> KernelDim:
    below = sigma[sigma < tol]
    above = sigma[sigma >= tol]
    hi = float(np.max(below)) if below.size else tol
    lo = float(np.min(above)) if above.size else math.inf
    ratio = hi / lo if lo > 0 else math.inf
    out = KernelDim(int(below.size), ratio, tol, sigma)
    if strict and not out.trusted:
        raise AmbiguousKernelError(
            f"{what}: singular values near tol={tol:g} are not separated (gap ratio {ratio:.2e})"
        )
    return out


def kernel_dim(s: FiniteSection | np.ndarray, tol: float = KERNEL_TOL, strict: bool = True) -> KernelDim:
    """Number of singular values below ``tol``.

    Raises
    ------
    AmbiguousKernelError
        The gap ratio is not below 1e-3 (only when ``strict``).
    """
    mat = s.matrix if isinstance(s, FiniteSection) else np.asarray(s)
    sigma = np.linalg.svd(mat, compute_uv=False)
    if mat.shape[1] > mat.shape[0]:
        sigma = np.concatenate([sigma, np.zeros(mat.shape[1] - mat.shape[0])])
    return _count_below(sigma, tol, "kernel_dim", strict)


def kernel_basis(mat: np.ndarray, tol: float = KERNEL_TOL) -> np.ndarray:
    """Orthonormal kernel basis (columns), guarded like :func:`kernel_dim`."""
    _, sigma, vh = np.linalg.svd(mat)
    sig = np.zeros(mat.shape[1])
    sig[: sigma.size] = sigma
    kd = _count_below(sig, tol, "kernel_basis", True)
    idx = np.flatnonzero(sig < tol)
    return vh[idx].conj().T if kd.dim else np.zeros((mat.shape[1], 0), dtype=complex)


def _upper_dim(U: LaurentMatrix, k_x: float, N: int, tol: float, kind: Kind = "toeplitz_upper") -> int:
    return kernel_dim(build_section(U, k_x, N, kind), tol).dim


def fredholm_index(m, k_x: float = 0.0, N: int = 32, tol: float = KERNEL_TOL) -> int:
    """``dim Ker T_U - dim Ker T_{U^†}`` from finite sections at ``N`` and ``N + 2``.

    Raises
    ------
    NotStabilizedError
        The two cutoffs disagree.
    """
    U = y_symbol(m)
    Ud = sa.adjoint(U)
    vals = []
    for cut in (N, N + 2):
        vals.append((_upper_dim(U, k_x, cut, tol), _upper_dim(Ud, k_x, cut, tol)))
    if vals[0] != vals[1]:
        raise NotStabilizedError(f"kernel/cokernel dims {vals[0]} at N={N} vs {vals[1]} at N={N + 2}")
    ker, coker = vals[0]
    return ker - coker


@dataclass
class KernelReport:
    """Kernel dimensions of the upper and lower sections over a ``k_x`` grid."""

    kx_grid: list
    dims_upper: list
    dims_lower: list
    stabilized: bool
    mod2: int
    tol: float
    N: int
    gap_ratio_max: float
    sides_agree: bool

    def to_dict(self) -> dict:
        return asdict(self)


def family_mod2_index(m, grid: int = 16, N: int = 16, tol: float = KERNEL_TOL) -> KernelReport:
    """Parity of ``dim Ker T_U(k_x)`` over a uniform ``k_x`` grid.

    The parity must be constant in ``k_x`` and identical for the upper and
    lower sections.

    Raises
    ------
    Mod2InconsistencyError
        Parity varies, or the two sides disagree mod 2.
    AmbiguousKernelError
    """
    U = y_symbol(m)
    kxs = [2 * math.pi * i / grid for i in range(grid)]
    up, lo, stable, worst = [], [], True, 0.0
    for kx in kxs:
        per_side = []
        for kind in ("toeplitz_upper", "toeplitz_lower"):
            a = kernel_dim(build_section(U, kx, N, kind), tol)
            b = kernel_dim(build_section(U, kx, N + 2, kind), tol)
            stable &= a.dim == b.dim
            worst = max(worst, a.gap_ratio, b.gap_ratio)
            per_side.append(a.dim)
        up.append(per_side[0])
        lo.append(per_side[1])
    parities = {d % 2 for d in up}
    if len(parities) != 1:
        raise Mod2InconsistencyError(f"kernel parity varies with k_x: dims {up}")
    agree = all((u - l) % 2 == 0 for u, l in zip(up, lo))
    if not agree:
        raise Mod2InconsistencyError(f"upper {up} and lower {lo} kernel dims differ mod 2")
    return KernelReport(kxs, up, lo, bool(stable), parities.pop(), tol, N, worst, agree)


# -- Karoubi grading identities on the cyclic model ---------------------------
@dataclass
class KaroubiReport:
    """Residuals and kernel dimensions from :func:`karoubi_check`.

    ``*_total`` dimensions are over the whole ring, which has a second
    wall between modes ``N-1`` and ``-N``; ``*_near`` count only the part
    localized at the wall between ``-1`` and ``0``.
    """

    k_x: float
    N: int
    residuals: dict
    intersection_upper_total: int
    intersection_lower_total: int
    compression_upper_total: int
    compression_lower_total: int
    intersection_upper_near: int
    intersection_lower_near: int
    toeplitz_upper: int
    toeplitz_lower: int
    eta_equals_eps: bool

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    @property
    def dims_match(self) -> bool:
        return (
            self.intersection_upper_total == self.compression_upper_total
            and self.intersection_lower_total == self.compression_lower_total
            and self.intersection_upper_total == self.intersection_lower_total
            and self.intersection_upper_near == self.toeplitz_upper
            and self.intersection_lower_near == self.toeplitz_lower
            and self.intersection_upper_near == self.intersection_lower_near
        )

    def to_dict(self) -> dict:
        out = asdict(self)
        out["max_residual"] = self.max_residual
        out["dims_match"] = self.dims_match
        return out


def _near_wall_count(basis: np.ndarray, N: int, d: int) -> int:
    """Dimension of the part of ``span(basis)`` living in modes ``[-N/2, N/2)``."""
    if basis.shape[1] == 0:
        return 0
    lo, hi = N - N // 2, N + N // 2
    window = basis[lo * d : hi * d]
    ev = np.linalg.eigvalsh(window.conj().T @ window)
    if np.any((ev > 0.1) & (ev < 0.9)):
        raise AmbiguousKernelError(f"kernel vectors not separated between walls: Gram eigenvalues {ev}")
    return int(np.sum(ev > 0.5))


def karoubi_check(m: PgModel, k_x: float, N: int = 16, tol: float = KERNEL_TOL) -> KaroubiReport:
    """Grading identities and kernel intersections on the ``2N``-mode ring.

    Builds the mode grading ``eps`` (``+1`` on ``l >= 0``), the twisted glide
    ``(Vt c)_l = V(k_x) c_{-l-1}``, the circulant ``M`` and
    ``eta = M^† eps M``.

    Raises
    ------
    NonUnitaryError
        ``U`` is not unitary (``eta`` would not be an involution).
    """
    ok, res = sa.is_unitary(m.U, 32, 1e-12)
    if not ok:
        raise NonUnitaryError(f"karoubi_check needs a unitary symbol (residual {res:.2e})")
    d = m.dim
    size = 2 * N
    M = build_section(m, k_x, N, "circulant").matrix
    eps_diag = np.repeat(np.where(np.arange(size) >= N, 1.0, -1.0), d)
    eps = np.diag(eps_diag)
    Vk = m.V(k_x, 0.0)
    Vt = np.zeros_like(M)
    for p in range(size):
        l = p - N
        q = (-l - 1) + N
        Vt[p * d : (p + 1) * d, q * d : (q + 1) * d] = Vk
    eta = M.conj().T @ eps @ M
    eye = np.eye(size * d)
    ph = np.exp(1j * k_x)

    def nrm(x):
        return float(np.max(np.abs(x))) if x.size else 0.0

    residuals = {
        "Vt_eps_anticommute": nrm(Vt @ eps + eps @ Vt),
        "Vt_square": nrm(Vt @ Vt - ph * eye),
        "eta_square": nrm(eta @ eta - eye),
        "Vt_eta_anticommute": nrm(Vt @ eta + eta @ Vt),
        "Vt_M_commute": nrm(Vt @ M - M @ Vt),
        "M_unitary": nrm(M.conj().T @ M - eye),
    }
    upper = np.flatnonzero(eps_diag > 0)
    lower = np.flatnonzero(eps_diag < 0)
    P_up = eye[:, upper]
    P_lo = eye[:, lower]
    int_up = kernel_basis((eye + eta) @ P_up, tol)
    int_lo = kernel_basis((eye - eta) @ P_lo, tol)
    comp_up = kernel_dim(M[np.ix_(upper, upper)], tol).dim
    comp_lo = kernel_dim(M[np.ix_(lower, lower)], tol).dim
    near_up = _near_wall_count(P_up @ int_up, N, d)
    near_lo = _near_wall_count(P_lo @ int_lo, N, d)
    t_up = _upper_dim(m.U, k_x, N, tol, "toeplitz_upper")
    t_lo = _upper_dim(m.U, k_x, N, tol, "toeplitz_lower")
    return KaroubiReport(
        k_x=k_x,
        N=N,
        residuals=residuals,
        intersection_upper_total=int_up.shape[1],
        intersection_lower_total=int_lo.shape[1],
        compression_upper_total=comp_up,
        compression_lower_total=comp_lo,
        intersection_upper_near=near_up,
        intersection_lower_near=near_lo,
        toeplitz_upper=t_up,
        toeplitz_lower=t_lo,
        eta_equals_eps=bool(np.allclose(eta, eps, atol=1e-12)),
    )


# -- finite rank of the off-corner blocks -------------------------------------
@dataclass
class CompactnessReport:
    """Ranks of the corner blocks ``P_+ M P_-^†`` and ``P_- M P_+^†``."""

    k_x: float
    N_list: list
    rank_upper_lower: list
    rank_lower_upper: list
    bound: int

    @property
    def constant(self) -> bool:
        return len(set(self.rank_upper_lower)) == 1 and len(set(self.rank_lower_upper)) == 1

    @property
    def within_bound(self) -> bool:
        return max(self.rank_upper_lower + self.rank_lower_upper) <= self.bound

    def to_dict(self) -> dict:
        out = asdict(self)
        out.update(constant=self.constant, within_bound=self.within_bound)
        return out


def _rank(mat: np.ndarray, tol: float = 1e-10) -> int:
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def compactness_decay(m, k_x: float, N_list: Sequence[int]) -> CompactnessReport:
    """Corner-block ranks of the bi-infinite operator on the window ``[-N, N)``.

    The window is wide enough that no band is cut, so the ranks are exact
    and bounded by ``d * D``.
    """
    U = y_symbol(m)
    d, D = U.dim, U.y_degree
    coeffs = U.fourier_y(k_x)
    ul, lu = [], []
    for N in N_list:
        if N <= D:
            raise CutoffTooSmallError(f"window half-width {N} must exceed D={D}")
        size = 2 * N
        mat = np.zeros((size * d, size * d), dtype=complex)
        for p in range(size):
            for n, c in coeffs.items():
                q = p + n
                if 0 <= q < size:
                    mat[q * d : (q + 1) * d, p * d : (p + 1) * d] = c
        up = slice(N * d, size * d)
        lo = slice(0, N * d)
        ul.append(_rank(mat[up, lo]))
        lu.append(_rank(mat[lo, up]))
    return CompactnessReport(k_x, list(N_list), ul, lu, d * D)


# -- singular value profiles -------------------------------------------------
def singular_value_profile(m, grid: int = 16, N: int = 16, kind: Kind = "toeplitz_upper") -> list[tuple]:
    """Rows ``(k_x, index, sigma)`` with singular values sorted ascending."""
    rows = []
    for i in range(grid):
        kx = 2 * math.pi * i / grid
        sig = np.sort(np.linalg.svd(build_section(m, kx, N, kind).matrix, compute_uv=False))
        rows.extend((kx, j, float(s)) for j, s in enumerate(sig))
    return rows


def profile_csv(rows: list[tuple]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k_x", "index", "sigma"])
    for kx, j, s in rows:
        w.writerow([repr(kx), j, repr(s)])
    return buf.getvalue()


# -- crossing parity of the flattened family ----------------------------------
@dataclass
class CrossingReport:
    """Kernel crossings of ``T_W(k_x)`` for the flattened symbol ``W = U |U|^{-1}``.

    ``mod2 = (generic_dim + len(crossings)) mod 2``: the kernel dimension
    at a generic momentum plus the number of isolated momenta where one
    more singular value touches zero.
    """

    generic_dim: int
    crossings: list
    near_misses: list
    mod2: int
    grid: int
    N: int
    zero_tol: float

    def to_dict(self) -> dict:
        return asdict(self)


def flatten_y(U: LaurentMatrix, k_x: float, samples: int = 256, tol: float = 1e-13) -> LaurentMatrix:
    """``u_y`` coefficients of the polar factor of ``U(k_x, .)``.

    The polar factor is generally not a Laurent polynomial; its Fourier
    series is truncated at ``samples // 4`` and coefficients below ``tol``.
    """
    ky = 2 * math.pi * np.arange(samples) / samples
    u, _, vh = np.linalg.svd(U(k_x, ky))
    C = np.fft.fft(u @ vh, axis=0) / samples
    top = samples // 4
    terms = {}
    for n in range(-top, top + 1):
        c = C[n % samples]
        if np.max(np.abs(c)) > tol:
            terms[(0, n)] = c
    return LaurentMatrix(U.dim, terms)


def crossing_mod2_index(
    m,
    grid: int = 128,
    N: int = 64,
    tol: float = KERNEL_TOL,
    zero_tol: float = 1e-6,
    miss_tol: float = 1e-4,
    refine_below: float = 0.25,
) -> CrossingReport:
    """Mod-2 count of Toeplitz kernel states over the whole ``k_x`` circle.

    Pointwise kernel parity is not stable once the kernel can pair off
    with the cokernel at fixed ``k_x``; what survives is the parity of the
    kernel count at a generic ``k_x`` plus the number of momenta at which
    a further singular value of the flattened section touches zero.  Local
    minima of that singular value are refined with a bounded scalar
    minimizer; minima whose grid value exceeds ``refine_below`` are taken
    as misses, which assumes the singular value moves by less than
    ``refine_below`` per grid step.

    Raises
    ------
    AmbiguousKernelError
        A refined minimum lies between ``zero_tol`` and ``miss_tol``.
    """
    from scipy.optimize import minimize_scalar

    U = y_symbol(m)

    def sigmas(kx):
        sec = build_section(flatten_y(U, kx), 0.0, N)
        return np.sort(np.linalg.svd(sec.matrix, compute_uv=False))

    ks = 2 * math.pi * np.arange(grid) / grid
    sig = [sigmas(k) for k in ks]
    dims = [int(np.sum(s < tol)) for s in sig]
    generic = int(np.bincount(dims).argmax())
    probe = np.array([s[generic] for s in sig])
    step = 2 * math.pi / grid
    crossings, misses = [], []
    for i in range(grid):
        if probe[i] <= probe[i - 1] and probe[i] <= probe[(i + 1) % grid]:
            if probe[i] >= refine_below:
                misses.append((float(ks[i]), float(probe[i])))
                continue
            res = minimize_scalar(
                lambda k: sigmas(k)[generic],
                bounds=(ks[i] - step, ks[i] + step),
                method="bounded",
                options={"xatol": 1e-12},
            )
            k0, val = float(res.x) % (2 * math.pi), float(min(res.fun, probe[i]))
            if 2 * math.pi - k0 < 1e-9:
                k0 = 0.0
            if val < zero_tol:
                crossings.append(k0)
            elif val < miss_tol:
                raise AmbiguousKernelError(f"singular value minimum {val:.2e} at k_x={k0:.4f} is unresolved")
            else:
                misses.append((k0, val))
    # a crossing sitting between two equal grid values can be found twice
    dedup = []
    for k in sorted(crossings):
        if not dedup or min(abs(k - dedup[-1]), 2 * math.pi - abs(k - dedup[-1])) > step:
            dedup.append(k)
    if len(dedup) > 1 and 2 * math.pi - (dedup[-1] - dedup[0]) <= step:
        dedup.pop()
    return CrossingReport(generic, dedup, misses, (generic + len(dedup)) % 2, grid, N, zero_tol)
