"""Real-space truncations of chiral Hamiltonians and their edge zero modes.

Lattices are strips of ``M`` complete unit cells at a fixed conserved
momentum.  Every hopping from inside the strip to a cell outside it is
dropped.  Each cell carries ``2d`` sites: ``d`` black sites (grading
``S = +1``) followed by ``d`` brown sites (``S = -1``).

The strip has a near edge (the one under study) and a far edge (a
truncation artefact).  Zero modes are split by sublattice and by the edge
they live on; only near-edge modes enter the counts.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from . import symbol_algebra as sa
from .errors import AmbiguousKernelError, CutoffTooSmallError, ConfigError
from .invariants import vertical_edge_integer_index
from .models import PgModel, chiral_hamiltonian
from .symbol_algebra import LaurentMatrix
from .toeplitz import GAP_RATIO, KERNEL_TOL, build_section, family_mod2_index, kernel_dim

__all__ = [
    "EdgeLattice",
    "ZeroModeReport",
    "CorrespondenceReport",
    "build_glide_edge",
    "build_vertical_edge",
    "zero_modes",
    "ssh_chain",
    "correspondence_check",
    "spectrum_csv",
    "mode_profile_csv",
]

BLACK, BROWN = "black", "brown"


@dataclass(frozen=True)
class EdgeLattice:
    """Hermitian strip Hamiltonian with site metadata.

    Attributes
    ----------
    momentum : float
        Conserved momentum (``k_x`` for glide edges, ``k_y`` for vertical ones).
    kind : str
        ``glide_upper``, ``glide_lower``, ``vertical`` or ``ssh``.
    cells : int
    d : int
        Sites per sublattice per cell.
    matrix : ndarray
    labels : list of (cell, sublattice, intra)
    distance : ndarray
        Distance (in cells) of each cell from the near edge, indexed like the
        cell order in ``matrix``.
    cut_bonds : int
        Nonzero hoppings crossing the near edge that were removed.
    """

    momentum: float
    kind: str
    cells: int
    d: int
    matrix: np.ndarray
    labels: list
    distance: np.ndarray
    cut_bonds: int

    @property
    def grading(self) -> np.ndarray:
        return np.array([1.0 if lab[1] == BLACK else -1.0 for lab in self.labels])

    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def _strip(coeffs: dict[int, np.ndarray], cells: list[int], d: int) -> np.ndarray:
    """Block ``(c', c) = H_{c' - c}`` restricted to the listed cells."""
    size = 2 * d
    pos = {c: i for i, c in enumerate(cells)}
    mat = np.zeros((len(cells) * size, len(cells) * size), dtype=complex)
    for c in cells:
        for n, h in coeffs.items():
            target = c + n
            if target in pos:
                i, j = pos[target], pos[c]
                mat[i * size : (i + 1) * size, j * size : (j + 1) * size] = h
    return mat


def _cut_bonds(coeffs: dict[int, np.ndarray], cells: list[int], outside) -> int:
    count = 0
    for c in cells:
        for n, h in coeffs.items():
            if n and outside(c + n):
                count += int(np.count_nonzero(np.abs(h) > 1e-14))
    # only the inside-to-outside direction is visited, so each bond counts once
    return count


def _labels(cells: list[int], d: int) -> list:
    out = []
    for c in cells:
        out.extend((c, BLACK, i) for i in range(d))
        out.extend((c, BROWN, i) for i in range(d))
    return out


def _lattice(H: LaurentMatrix, coeffs, momentum, kind, cells, distance, outside) -> EdgeLattice:
    d = H.dim // 2
    mat = _strip(coeffs, cells, d)
    return EdgeLattice(
        momentum=float(momentum),
        kind=kind,
        cells=len(cells),
        d=d,
        matrix=mat,
        labels=_labels(cells, d),
        distance=np.asarray(distance),
        cut_bonds=_cut_bonds(coeffs, cells, outside),
    )


def build_glide_edge(m: PgModel, k_x: float, M: int = 32, side: Literal["upper", "lower"] = "upper") -> EdgeLattice:
    """Strip along ``y`` ending at the glide axis ``l = 0``.

    ``upper`` keeps cells ``0..M-1``, ``lower`` keeps ``-M..-1``; the near
    edge is the glide axis in both cases.

    Raises
    ------
    CutoffTooSmallError
        ``M <= 4 D`` with ``D`` the ``u_y`` degree.
    """
    D = m.U.y_degree
    if M <= 4 * D:
        raise CutoffTooSmallError(f"M={M} must exceed 4*D={4 * D}")
    H = chiral_hamiltonian(m.U)
    coeffs = H.fourier_y(k_x)
    if side == "upper":
        cells = list(range(M))
        return _lattice(H, coeffs, k_x, "glide_upper", cells, cells, lambda c: c < 0)
    if side == "lower":
        cells = list(range(-M, 0))
        return _lattice(H, coeffs, k_x, "glide_lower", cells, [-c - 1 for c in cells], lambda c: c >= 0)
    raise ConfigError(f"side must be 'upper' or 'lower', got {side!r}")


def build_vertical_edge(m, k_y: float, M: int = 32) -> EdgeLattice:
    """Strip along ``x`` (cells ``0..M-1``) at fixed ``k_y``."""
    U = m.U if isinstance(m, PgModel) else m
    D = U.x_degree
    if M <= 4 * D:
        raise CutoffTooSmallError(f"M={M} must exceed 4*D={4 * D}")
    H = chiral_hamiltonian(U)
    coeffs = H.fourier_x(k_y)
    cells = list(range(M))
    return _lattice(H, coeffs, k_y, "vertical", cells, cells, lambda c: c < 0)


_SSH = {
    "blue": lambda: sa.scalar(1.0),
    "red": lambda: sa.u_x(),
    "green": lambda: sa.u_x(-1),
    "red_plus_green": lambda: sa.direct_sum(sa.u_x(), sa.u_x(-1)),
}


def ssh_chain(pattern: str, cells: int = 32, a: complex = 0.0) -> EdgeLattice:
    """Half-line dimerised chain of complete unit cells.

    Site ``A`` is black and ``B`` brown.  ``red_plus_green`` stacks the two
    chains (intra index 0 red, 1 green) and couples ``A_red`` and
    ``B_green`` in cell 0 with amplitude ``a``.
    """
    if pattern not in _SSH:
        raise ConfigError(f"pattern must be one of {sorted(_SSH)}")
    if cells < 4:
        raise CutoffTooSmallError("cells must be >= 4")
    U = _SSH[pattern]()
    H = chiral_hamiltonian(U)
    coeffs = H.fourier_x(0.0)
    cell_list = list(range(cells))
    lat = _lattice(H, coeffs, 0.0, "ssh", cell_list, cell_list, lambda c: c < 0)
    if pattern == "red_plus_green" and a != 0:
        mat = lat.matrix.copy()
        i = lat.labels.index((0, BLACK, 0))
        j = lat.labels.index((0, BROWN, 1))
        mat[i, j] += a
        mat[j, i] += np.conj(a)
        lat = EdgeLattice(lat.momentum, lat.kind, lat.cells, lat.d, mat, lat.labels, lat.distance, lat.cut_bonds)
    return lat


@dataclass
class ZeroModeReport:
    """Near-edge zero modes of an :class:`EdgeLattice`.

    ``count`` includes only edge-localized near-edge modes (localization
    length below ``M/4``).  ``energies`` lists every eigenvalue with
    ``|E| < tol``, far edge included.
    """

    count: int
    black: int
    brown: int
    far_edge: int
    flagged: int
    energies: list
    localization_lengths: list
    sublattice_weights: list
    gap_ratio: float
    tol: float
    cells: int

    def to_dict(self) -> dict:
        return asdict(self)


def _split(Z: np.ndarray, op: np.ndarray, what: str, lo: float, hi: float):
    """Split ``span(Z)`` by the eigenvalues of ``Z^† op Z`` (``op`` diagonal)."""
    if Z.shape[1] == 0:
        return Z, Z
    G = Z.conj().T @ (op[:, None] * Z)
    ev, vec = np.linalg.eigh(G)
    if np.any((ev > lo) & (ev < hi)):
        raise AmbiguousKernelError(f"{what}: zero modes do not separate (eigenvalues {np.round(ev, 3)})")
    plus = Z @ vec[:, ev >= hi]
    minus = Z @ vec[:, ev <= lo]
    return plus, minus


def _cell_amplitudes(vec: np.ndarray, lat: EdgeLattice) -> np.ndarray:
    w = np.abs(vec.reshape(lat.cells, 2 * lat.d)) ** 2
    amp = np.sqrt(w.sum(axis=1))
    order = np.argsort(lat.distance)
    return amp[order]


def _loc_length(amp: np.ndarray, window: int) -> float:
    """Inverse decay rate of ``amp`` (ordered by distance) over ``window`` cells."""
    a = amp[:window]
    keep = np.flatnonzero(a > 1e-12 * np.max(amp))
    if keep.size <= 1:
        return 0.0
    slope = np.polyfit(keep.astype(float), np.log(a[keep]), 1)[0]
    return math.inf if slope >= 0 else float(-1.0 / slope)


def zero_modes(lat: EdgeLattice, tol: float = KERNEL_TOL) -> ZeroModeReport:
    """Count and characterise zero modes at the near edge.

    Raises
    ------
    AmbiguousKernelError
        Eigenvalues near ``tol`` are not separated (ratio guard 1e-3), or the
        zero space does not split cleanly by sublattice or by edge.
    """
    E, vecs = np.linalg.eigh(lat.matrix)
    absE = np.abs(E)
    small = absE < tol
    hi = float(np.max(absE[small])) if small.any() else tol
    rest = absE[~small]
    lo = float(np.min(rest)) if rest.size else math.inf
    ratio = hi / lo if lo > 0 else math.inf
    if ratio >= GAP_RATIO:
        raise AmbiguousKernelError(f"zero_modes: eigenvalues near tol={tol:g} not separated (ratio {ratio:.2e})")
    Z = vecs[:, small]
    S = lat.grading
    black, brown = _split(Z, S, "sublattice split", -0.9, 0.9)
    near_op = np.repeat(lat.distance < lat.cells / 2, 2 * lat.d).astype(float)
    counts = {}
    lengths, weights, flagged, far = [], [], 0, 0
    for name, sub in ((BLACK, black), (BROWN, brown)):
        near, far_modes = _split(sub, near_op, "edge split", 0.1, 0.9)
        far += far_modes.shape[1]
        kept = 0
        for j in range(near.shape[1]):
            v = near[:, j]
            xi = _loc_length(_cell_amplitudes(v, lat), max(2, lat.cells // 2))
            bw = float(np.sum(np.abs(v[S > 0]) ** 2))
            if xi < lat.cells / 4:
                kept += 1
                lengths.append(xi)
                weights.append(bw)
            else:
                flagged += 1
        counts[name] = kept
    return ZeroModeReport(
        count=counts[BLACK] + counts[BROWN],
        black=counts[BLACK],
        brown=counts[BROWN],
        far_edge=far,
        flagged=flagged,
        energies=sorted(float(e) for e in E[small]),
        localization_lengths=lengths,
        sublattice_weights=weights,
        gap_ratio=ratio,
        tol=tol,
        cells=lat.cells,
    )


@dataclass
class CorrespondenceReport:
    """Analytic versus real-space edge counts over a momentum grid."""

    edge: str
    agree: bool
    analytic: dict
    momenta: list
    rows: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def correspondence_check(
    m: PgModel,
    edge: Literal["glide", "vertical"] = "glide",
    grid: int = 8,
    M: int = 32,
    N: int = 16,
    tol: float = KERNEL_TOL,
) -> CorrespondenceReport:
    """Compare edge zero modes with Toeplitz kernels or the x-winding.

    ``glide``: at each ``k_x`` the brown near-edge count above (below) the
    axis equals ``dim Ker T_U`` (``dim Ker T'_U``), the black count above
    equals ``dim Ker T_{U^†}``, and the brown parity equals the family
    mod-2 index.

    ``vertical``: at each ``k_y`` the near-edge ``black - brown`` equals the
    x-winding of ``det U`` and the count equals its absolute value.
    """
    momenta = [2 * math.pi * i / grid for i in range(grid)]
    rows, agree = [], True
    if edge == "glide":
        fam = family_mod2_index(m, grid, N, tol)
        Ud = sa.adjoint(m.U)
        for kx in momenta:
            up = zero_modes(build_glide_edge(m, kx, M, "upper"), tol)
            lo = zero_modes(build_glide_edge(m, kx, M, "lower"), tol)
            t_up = kernel_dim(build_section(m.U, kx, N, "toeplitz_upper"), tol).dim
            t_lo = kernel_dim(build_section(m.U, kx, N, "toeplitz_lower"), tol).dim
            t_co = kernel_dim(build_section(Ud, kx, N, "toeplitz_upper"), tol).dim
            ok = (
                up.brown == t_up
                and lo.brown == t_lo
                and up.black == t_co
                and up.brown % 2 == fam.mod2
                and lo.brown % 2 == fam.mod2
            )
            agree &= ok
            rows.append(
                {
                    "k_x": kx,
                    "upper": {"count": up.count, "black": up.black, "brown": up.brown},
                    "lower": {"count": lo.count, "black": lo.black, "brown": lo.brown},
                    "toeplitz_upper": t_up,
                    "toeplitz_lower": t_lo,
                    "toeplitz_adjoint_upper": t_co,
                    "agree": ok,
                }
            )
        analytic = {"family_mod2": fam.mod2}
    elif edge == "vertical":
        w = vertical_edge_integer_index(m)
        for ky in momenta:
            rep = zero_modes(build_vertical_edge(m, ky, M), tol)
            ok = rep.black - rep.brown == w and rep.count == abs(w)
            agree &= ok
            rows.append({"k_y": ky, "count": rep.count, "black": rep.black, "brown": rep.brown, "agree": ok})
        analytic = {"wind_x": w, "abs_index": abs(w)}
    else:
        raise ConfigError(f"edge must be 'glide' or 'vertical', got {edge!r}")
    return CorrespondenceReport(edge, bool(agree), analytic, momenta, rows)


def spectrum_csv(lattices: list[EdgeLattice]) -> str:
    """Rows ``(momentum, eigenvalue)`` for spectral plots."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["momentum", "energy"])
    for lat in lattices:
        for e in lat.spectrum():
            w.writerow([repr(lat.momentum), repr(float(e))])
    return buf.getvalue()


def mode_profile_csv(lat: EdgeLattice, tol: float = KERNEL_TOL) -> str:
    """Rows ``(mode, cell, |amplitude|^2)`` for every zero mode of ``lat``."""
    E, vecs = np.linalg.eigh(lat.matrix)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mode", "cell", "weight"])
    cells = [lab[0] for lab in lat.labels[:: 2 * lat.d]]
    for j in np.flatnonzero(np.abs(E) < tol):
        wts = (np.abs(vecs[:, j].reshape(lat.cells, 2 * lat.d)) ** 2).sum(axis=1)
        for c, x in zip(cells, wts):
            w.writerow([int(j), c, repr(float(x))])
    return buf.getvalue()
