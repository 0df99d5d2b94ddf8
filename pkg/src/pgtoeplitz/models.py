"""Chiral SSH chains and glide-symmetric (pg) models as exact Laurent symbols.

A pg model is a pair ``(V, U)``: ``V(k_x)`` is the glide block acting on
the ``2n`` internal degrees of freedom, ``U(k_x, k_y)`` the off-diagonal
block of the chiral Hamiltonian ``H = [[0, U], [U^†, 0]]``.  Compatibility
with the glide means

* ``V V = u_x``,
* ``V U = flip_ky(U) V``,

both of which are checked here as exact coefficient identities.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from . import symbol_algebra as sa
from .errors import ConfigError, EquivarianceError, GapClosedError
from .symbol_algebra import LaurentMatrix

__all__ = [
    "SshModel",
    "PgModel",
    "EdgeSymbol",
    "CompatibilityReport",
    "GapCertificate",
    "build_glide_V",
    "build_dimer_symbols",
    "build_general_U",
    "check_pg_compatibility",
    "chiral_hamiltonian",
    "sublattice_grading",
    "build_edge_symbol",
    "random_edge_symbol",
    "random_gapped_perturbation",
    "certify_gap",
    "glide_permutation",
    "permute_model",
    "edge_glide_symbol",
    "edge_gauge_intertwiner",
    "PRESETS",
    "preset",
    "load_model_config",
    "model_from_config",
]

log = logging.getLogger(__name__)

#: default grid for gap certification and the largest grid refinement tried
GAP_GRID = 64
GAP_GRID_MAX = 1024


# -- gap certification -------------------------------------------------------
@dataclass(frozen=True)
class GapCertificate:
    """Lower bound on ``min_k sigma_min(U(k))`` from a grid plus a Lipschitz term.

    Attributes
    ----------
    grid : int
        Side length of the uniform torus grid that was sampled.
    min_sigma : float
        Smallest singular value observed on the grid.
    lipschitz : float
        ``sum ||C_{m,n}|| (|m| + |n|)``.
    bound : float
        ``min_sigma - (2π / grid) * lipschitz``; positive means certified.
    """

    grid: int
    min_sigma: float
    lipschitz: float
    bound: float

    @property
    def certified(self) -> bool:
        return self.bound > 0


def _min_sigma(U: LaurentMatrix, grid: int) -> float:
    kx, ky = sa.torus_grid(grid)
    vals = U(kx, ky)
    return float(np.min(np.linalg.svd(vals, compute_uv=False)))


def certify_gap(U: LaurentMatrix, grid: int = GAP_GRID, max_grid: int = GAP_GRID_MAX) -> GapCertificate:
    """Certify invertibility of ``U`` on the torus.

    The grid is doubled (up to ``max_grid``) while the Lipschitz term is too
    large for the observed singular values.
    """
    lip = U.lipschitz_bound()
    while True:
        smin = _min_sigma(U, grid)
        cert = GapCertificate(grid, smin, lip, smin - (2 * math.pi / grid) * lip)
        if cert.certified or grid >= max_grid or smin < 1e-10:
            return cert
        grid *= 2


# -- model types --------------------------------------------------------------
@dataclass(frozen=True)
class SshModel:
    """One-dimensional chiral chain with off-diagonal symbol ``U(k_x)``."""

    U: LaurentMatrix
    label: str = ""
    gapped: bool = True

    def __post_init__(self):
        if self.U.y_degree != 0:
            raise ConfigError("SSH symbols must not depend on u_y")
        if self.gapped:
            ks = 2 * math.pi * np.arange(256) / 256
            smin = np.min(np.linalg.svd(self.U(ks, 0.0), compute_uv=False))
            if smin <= 0 or not np.isfinite(smin) or smin < 1e-12:
                raise GapClosedError(f"SSH symbol {self.label!r} is not invertible on the k grid")


@dataclass(frozen=True)
class PgModel:
    """Glide-compatible chiral model.

    Parameters
    ----------
    V : LaurentMatrix
        Glide block of size ``2n`` depending on ``u_x`` only.
    U : LaurentMatrix
        Off-diagonal Hamiltonian block of size ``2n``.
    n : int
        Half the internal dimension.
    label : str
        Free-form description.
    gap_bound : float or None
        Certified lower bound on the smallest singular value of ``U``,
        ``None`` if the model is not flagged as gapped.
    """

    V: LaurentMatrix
    U: LaurentMatrix
    n: int
    label: str = ""
    gap_bound: float | None = None

    def __post_init__(self):
        if self.V.dim != 2 * self.n or self.U.dim != 2 * self.n:
            raise ConfigError(f"V and U must have dim 2n = {2 * self.n}")
        if self.V.y_degree != 0:
            raise ConfigError("the glide block V must not depend on u_y")

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def gapped(self) -> bool:
        return self.gap_bound is not None and self.gap_bound > 0

    def direct_sum(self, other: "PgModel") -> "PgModel":
        """Block sum; the glide acts block-diagonally."""
        V = sa.direct_sum(self.V, other.V)
        U = sa.direct_sum(self.U, other.U)
        bound = None
        if self.gapped and other.gapped:
            bound = min(self.gap_bound, other.gap_bound)
        return PgModel(V, U, self.n + other.n, f"{self.label}+{other.label}", bound)

    def __add__(self, other: "PgModel") -> "PgModel":
        return self.direct_sum(other)

    def with_gap(self) -> "PgModel":
        """Re-certify the gap and store the bound; raises if it closes."""
        cert = certify_gap(self.U)
        if not cert.certified:
            raise GapClosedError(
                f"model {self.label!r} not certifiably gapped "
                f"(min sigma {cert.min_sigma:.3e}, bound {cert.bound:.3e})"
            )
        return PgModel(self.V, self.U, self.n, self.label, cert.bound)


@dataclass(frozen=True)
class EdgeSymbol:
    """Glide-chiral edge Hamiltonian ``H(k_x) = [[a, conj(b)], [b, -a]]``.

    ``a`` is real valued and ``b`` obeys ``conj(b_{-n-1}) = -b_n``.
    """

    a: LaurentMatrix
    b: LaurentMatrix
    label: str = ""

    def hamiltonian(self, k_x) -> np.ndarray:
        av = self.a(k_x, 0.0)[..., 0, 0]
        bv = self.b(k_x, 0.0)[..., 0, 0]
        out = np.empty(np.shape(av) + (2, 2), dtype=complex)
        out[..., 0, 0] = av
        out[..., 0, 1] = np.conj(bv)
        out[..., 1, 0] = bv
        out[..., 1, 1] = -av
        return out

    def negate_a(self) -> "EdgeSymbol":
        return EdgeSymbol(-self.a, self.b, f"-({self.label})" if self.label else "")


# -- constructors -------------------------------------------------------------
def build_glide_V(n: int) -> LaurentMatrix:
    """``[[0, u_x I_n], [I_n, 0]]``."""
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    return sa.from_blocks([[None, sa.u_x(1, n)], [sa.identity(n), None]])


def build_general_U(a: LaurentMatrix, b: LaurentMatrix, label: str = "") -> PgModel:
    """The general compatible symbol ``[[a, u_x flip(b)], [b, flip(a)]]``.

    ``a`` and ``b`` may be ``n x n`` blocks; the glide is then
    :func:`build_glide_V` ``(n)``.  Compatibility holds identically.
    """
    if a.dim != b.dim:
        raise ConfigError("a and b must have the same dimension")
    n = a.dim
    ux = sa.u_x(1, n)
    U = sa.from_blocks([[a, ux @ sa.flip_ky(b)], [b, sa.flip_ky(a)]])
    return PgModel(build_glide_V(n), U, n, label)


def build_dimer_symbols() -> dict[str, PgModel]:
    """The four dimerised unitary models ``r, g, p, b``, gap certified."""
    one, zero = sa.scalar(1.0), sa.zeros(1)
    r = build_general_U(zero, one, "Ur")
    p = build_general_U(sa.u_y(), zero, "Up")
    b = build_general_U(one, zero, "Ub")
    g = PgModel(build_glide_V(1), sa.adjoint(r.U), 1, "Ug")
    return {name: m.with_gap() for name, m in (("r", r), ("g", g), ("p", p), ("b", b))}


@dataclass(frozen=True)
class CompatibilityReport:
    """Coefficient max-norms of ``V U - flip(U) V`` and ``V V - u_x``."""

    glide_residual: float
    square_residual: float

    @property
    def passes(self) -> bool:
        return self.glide_residual == 0.0 and self.square_residual == 0.0

    def max_residual(self) -> float:
        return max(self.glide_residual, self.square_residual)


def check_pg_compatibility(m: PgModel) -> CompatibilityReport:
    V, U = m.V, m.U
    glide = (V @ U - sa.flip_ky(U) @ V).max_norm()
    square = (V @ V - sa.u_x(1, V.dim)).max_norm()
    return CompatibilityReport(glide, square)


def sublattice_grading(d: int) -> np.ndarray:
    """``S = diag(I_d, -I_d)``; the first ``d`` sites are black, the rest brown."""
    return np.diag(np.concatenate([np.ones(d), -np.ones(d)]))


def chiral_hamiltonian(U: LaurentMatrix) -> LaurentMatrix:
    """``[[0, U], [U^†, 0]]``."""
    return sa.from_blocks([[None, U], [sa.adjoint(U), None]])


# -- edge symbols -------------------------------------------------------------
def _y_free_scalar(L: LaurentMatrix, name: str) -> None:
    if L.dim != 1 or L.y_degree != 0:
        raise ConfigError(f"{name} must be a scalar symbol in u_x only")


def build_edge_symbol(a: LaurentMatrix, b: LaurentMatrix, label: str = "", tol: float = 1e-12) -> EdgeSymbol:
    """Validate and wrap an edge symbol.

    Raises
    ------
    EquivarianceError
        ``a`` is not real valued or ``b`` breaks ``conj(b_{-n-1}) = -b_n``.
    GapClosedError
        ``a^2 + |b|^2`` vanishes on a 256-point grid.
    """
    _y_free_scalar(a, "a")
    _y_free_scalar(b, "b")
    if not a.allclose(sa.adjoint(a), tol):
        raise EquivarianceError("a(k_x) must be real valued")
    twisted = LaurentMatrix(1, {(-m - 1, 0): -np.conj(c) for (m, _), c in b.coeffs.items()})
    if not b.allclose(twisted, tol):
        raise EquivarianceError("b violates conj(b_{-n-1}) = -b_n")
    ks = 2 * math.pi * np.arange(256) / 256
    gap = np.abs(a(ks, 0.0)[:, 0, 0]) ** 2 + np.abs(b(ks, 0.0)[:, 0, 0]) ** 2
    if np.min(gap) <= 1e-12:
        raise GapClosedError("edge symbol is gapless: a^2 + |b|^2 vanishes")
    return EdgeSymbol(a, b, label)


def random_edge_symbol(rng: np.random.Generator, degree: int = 2, label: str = "") -> EdgeSymbol:
    """Random valid edge symbol; retries until gapped."""
    while True:
        a_terms = {(0, 0): rng.normal()}
        for m in range(1, degree + 1):
            c = complex(rng.normal(), rng.normal()) / (m + 1)
            a_terms[(m, 0)] = c
            a_terms[(-m, 0)] = np.conj(c)
        b_terms = {}
        for m in range(degree):
            c = complex(rng.normal(), rng.normal()) / (m + 1)
            b_terms[(m, 0)] = c
            b_terms[(-m - 1, 0)] = -np.conj(c)
        try:
            return build_edge_symbol(sa.scalar(a_terms), sa.scalar(b_terms), label)
        except GapClosedError:
            continue


# -- perturbations ------------------------------------------------------------
def _random_block(rng: np.random.Generator, n: int, amplitude: float) -> LaurentMatrix:
    keys = [(m, k) for m in (-1, 0, 1) for k in (-1, 0, 1)]
    raw = rng.normal(size=(len(keys), n, n)) + 1j * rng.normal(size=(len(keys), n, n))
    total = sum(np.linalg.norm(c, 2) for c in raw)
    return LaurentMatrix(n, {key: amplitude * c / total for key, c in zip(keys, raw)})


def _split_general(m: PgModel) -> tuple[LaurentMatrix, LaurentMatrix]:
    n = m.n
    a = m.U.block(slice(0, n), slice(0, n))
    b = m.U.block(slice(n, 2 * n), slice(0, n))
    return a, b


def random_gapped_perturbation(m: PgModel, amplitude: float, seed: int) -> PgModel:
    """Perturb the ``(a, b)`` blocks of a general-form model and re-certify its gap.

    The perturbations of ``a`` and ``b`` are supported on ``|m|, |n| <= 1``
    and each has total coefficient operator-norm ``amplitude``, so the
    compatibility relations hold exactly.  The result is invertible but in
    general not unitary.

    Raises
    ------
    GapClosedError
        The perturbed symbol cannot be certified invertible.
    """
    if amplitude < 0:
        raise ConfigError("amplitude must be >= 0")
    if amplitude == 0:
        return m
    perm = glide_permutation(m.V)
    std = permute_model(m, perm)
    a, b = _split_general(std)
    rng = np.random.default_rng(seed)
    a2 = a + _random_block(rng, m.n, amplitude)
    b2 = b + _random_block(rng, m.n, amplitude)
    out = build_general_U(a2, b2, f"{m.label}~{seed}")
    if not (std.U - build_general_U(a, b).U).is_zero():
        raise ConfigError("input model is not in the general compatible form")
    return permute_model(out, np.argsort(perm)).with_gap()


def glide_permutation(V: LaurentMatrix) -> np.ndarray:
    """Index order ``perm`` with ``V[perm][:, perm] == build_glide_V(n)``.

    Works for any glide block that is a relabelling of the standard one,
    e.g. direct sums of standard glides.

    Raises
    ------
    ConfigError
        ``V`` is not a relabelled standard glide.
    """
    dim = V.dim
    if dim % 2 or set(V.support) - {(0, 0), (1, 0)}:
        raise ConfigError("V is not a relabelled standard glide")
    c0, c1 = np.asarray(V.coeff(0, 0)), np.asarray(V.coeff(1, 0))
    first, second = [], []
    for col in range(dim):
        rows = np.flatnonzero(c0[:, col])
        if rows.size == 1 and c0[rows[0], col] == 1:
            first.append(col)
            second.append(int(rows[0]))
    perm = np.array(first + second)
    if perm.size != dim or len(set(perm.tolist())) != dim:
        raise ConfigError("V is not a relabelled standard glide")
    if V.coeffs.keys() and not _permute(V, perm) == build_glide_V(dim // 2):
        raise ConfigError("V is not a relabelled standard glide")
    return perm


def _permute(L: LaurentMatrix, perm) -> LaurentMatrix:
    idx = np.asarray(perm)
    return LaurentMatrix(L.dim, {k: c[np.ix_(idx, idx)] for k, c in L.coeffs.items()})


def permute_model(m: PgModel, perm) -> PgModel:
    """Relabel the internal basis by ``perm`` (new index ``i`` is old ``perm[i]``)."""
    return PgModel(_permute(m.V, perm), _permute(m.U, perm), m.n, m.label, m.gap_bound)


# -- edge-axis glide ----------------------------------------------------------
def edge_glide_symbol(n: int = 1) -> LaurentMatrix:
    """Symbol ``ū_y V`` of the glide whose axis is the ``l = 0`` edge."""
    return sa.u_y(-1, 2 * n) @ build_glide_V(n)


def edge_gauge_intertwiner() -> LaurentMatrix:
    """``G = [[0, u_x], [ū_y, 0]]`` with ``G V = ū_y V flip(G)``.

    Conjugating by ``G`` trades the bulk glide convention for the one
    centred on the edge axis; it is exposed as a gauge transform only.
    """
    return sa.from_blocks([[None, sa.u_x()], [sa.u_y(-1), None]])


# -- presets and config -------------------------------------------------------
def _ssh(U: LaurentMatrix, label: str) -> SshModel:
    return SshModel(U, label)


PRESETS = ("Ur", "Ug", "Up", "Ub", "ssh_red", "ssh_blue", "ssh_green")


def preset(name: str):
    """Return the model for a preset name."""
    if name in ("Ur", "Ug", "Up", "Ub"):
        dimers = build_dimer_symbols()
        return dimers[name[1]]
    if name == "ssh_red":
        return _ssh(sa.u_x(), "ssh_red")
    if name == "ssh_blue":
        return _ssh(sa.scalar(1.0), "ssh_blue")
    if name == "ssh_green":
        return _ssh(sa.u_x(-1), "ssh_green")
    raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


_CONFIG_FIELDS = {
    "pg": {"type", "n", "a", "b", "label"},
    "ssh": {"type", "U", "label"},
    "edge": {"type", "a", "b", "label"},
}


def _laurent(data, key: str) -> LaurentMatrix:
    if key not in data:
        raise ConfigError(f"missing field {key!r}")
    try:
        return LaurentMatrix.from_dict(data[key])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad LaurentMatrix in field {key!r}: {exc}") from exc


def model_from_config(data: Mapping):
    """Build a model from a parsed config mapping; unknown fields are rejected."""
    if not isinstance(data, Mapping):
        raise ConfigError("config must be a mapping")
    if "preset" in data:
        if set(data) != {"preset"}:
            raise ConfigError("a preset config takes no other fields")
        return preset(data["preset"])
    kind = data.get("type")
    if kind not in _CONFIG_FIELDS:
        raise ConfigError(f"config type must be one of {sorted(_CONFIG_FIELDS)}, got {kind!r}")
    extra = set(data) - _CONFIG_FIELDS[kind]
    if extra:
        raise ConfigError(f"unknown config fields: {sorted(extra)}")
    label = str(data.get("label", ""))
    try:
        if kind == "ssh":
            return SshModel(_laurent(data, "U"), label)
        a, b = _laurent(data, "a"), _laurent(data, "b")
        if kind == "edge":
            return build_edge_symbol(a, b, label)
        n = int(data.get("n", a.dim))
        if a.dim != n or b.dim != n:
            raise ConfigError(f"a and b must have dim n = {n}")
        return build_general_U(a, b, label).with_gap()
    except (EquivarianceError, GapClosedError) as exc:
        raise ConfigError(str(exc)) from exc


def load_model_config(path: str | Path):
    """Read a JSON config file and build its model."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return model_from_config(data)
