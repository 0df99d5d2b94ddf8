"""Scalar topological invariants of Bloch symbols.

* integer windings of ``det U`` along either torus axis,
* the degree constraint on glide-square-root symbols,
* the Clifford-action obstruction for the regular glide bundle,
* the mod-2 local invariant ``mu`` of a glide-chiral edge Hamiltonian.

Orientation: ``k -> e^{ik}`` has winding ``+1``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from . import symbol_algebra as sa
from .errors import (
    EquivarianceError,
    GapClosedError,
    GaplessLoopError,
    NonIntegerError,
    UnwrapError,
)
from .models import EdgeSymbol, PgModel, build_glide_V
from .symbol_algebra import LaurentMatrix

__all__ = [
    "WindingSpec",
    "Mod2Report",
    "InvariantReport",
    "CliffordResult",
    "winding_det",
    "winding",
    "w_degree_constraint",
    "clifford_obstruction",
    "mod2_mu",
    "vertical_edge_integer_index",
]

MAX_SAMPLES = 2**14
DET_FLOOR = 1e-10
MAX_STEP = math.pi / 2


def _next_pow2(x: int) -> int:
    return 1 << max(0, int(x - 1).bit_length())


@dataclass(frozen=True)
class WindingSpec:
    """A loop on the torus: ``axis`` varies, the other momentum is ``fixed_value``.

    ``samples`` is raised to at least ``4 * degree + 4`` (rounded up to a
    power of two) when the winding is computed.
    """

    axis: Literal["x", "y"] = "x"
    fixed_value: float = 0.0
    samples: int = 64

    def __post_init__(self):
        if self.axis not in ("x", "y"):
            raise ValueError(f"axis must be 'x' or 'y', got {self.axis!r}")
        if self.samples < 2:
            raise ValueError("samples must be >= 2")


@dataclass
class InvariantReport:
    """Named invariant together with the numerics that produced it."""

    name: str
    value: int | float | list | dict
    grid: int | None = None
    tolerance: float | None = None
    residuals: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _det_on_loop(L: LaurentMatrix, spec: WindingSpec, samples: int) -> np.ndarray:
    ks = 2 * math.pi * np.arange(samples) / samples
    if spec.axis == "x":
        vals = L(ks, spec.fixed_value)
    else:
        vals = L(spec.fixed_value, ks)
    return np.linalg.det(vals)


def winding_det(L: LaurentMatrix, spec: WindingSpec) -> int:
    """Winding number of ``det L`` along the loop described by ``spec``.

    Raises
    ------
    GaplessLoopError
        ``|det L|`` drops below 1e-10 on the sampled loop.
    UnwrapError
        Phase steps stay above π/2 even at 2**14 samples.
    """
    degree = L.x_degree if spec.axis == "x" else L.y_degree
    samples = _next_pow2(max(spec.samples, 4 * L.dim * degree + 4))
    while True:
        det = _det_on_loop(L, spec, samples)
        if np.min(np.abs(det)) < DET_FLOOR:
            raise GaplessLoopError(
                f"det vanishes on the {spec.axis}-loop at fixed momentum {spec.fixed_value:g}"
            )
        steps = np.angle(np.roll(det, -1) / det)
        if np.max(np.abs(steps)) <= MAX_STEP:
            total = float(np.sum(steps)) / (2 * math.pi)
            w = round(total)
            if abs(total - w) > 1e-8:
                raise NonIntegerError(f"winding {total} is not an integer")
            return int(w)
        if samples >= MAX_SAMPLES:
            raise UnwrapError(f"phase steps exceed pi/2 at {samples} samples")
        samples *= 2


def winding(L: LaurentMatrix, axis: str = "x", fixed_value: float = 0.0, samples: int = 64) -> int:
    """Shorthand for :func:`winding_det`."""
    return winding_det(L, WindingSpec(axis, fixed_value, samples))


def w_degree_constraint(W: LaurentMatrix, samples: int = 256) -> tuple[int, int, bool]:
    """Check ``2 deg det W(., 0) = rank`` for a glide square root ``W``.

    A unitary ``W`` with ``flip(W) W = u_x`` forces ``det W(k_x, 0)^2 =
    e^{i rank k_x}``, hence the constraint.

    Returns
    -------
    deg_det, rank, passes
    """
    deg = winding_det(W, WindingSpec("x", 0.0, samples))
    rank = W.dim
    return deg, rank, 2 * deg == rank


@dataclass(frozen=True)
class CliffordResult:
    """Outcome of :func:`clifford_obstruction`.

    For constructible cases ``A`` squares to ``u_x`` and ``generator`` is an
    odd involution anticommuting with both the grading and the glide.
    """

    n: int
    constructible: bool
    A: LaurentMatrix | None = None
    generator: LaurentMatrix | None = None
    residuals: dict = field(default_factory=dict)
    witness: str = ""


def clifford_obstruction(n: int) -> CliffordResult:
    """Decide whether the rank-``2n`` glide bundle carries a compatible odd involution.

    For even ``n`` the square root ``A`` of ``u_x I_n`` is the block-diagonal
    sum of ``n/2`` copies of ``[[0, u_x], [1, 0]]``; the generator is
    ``gamma = [[0, -i A], [i A^{-1}, 0]]`` with ``A^{-1} = ū_x A``.
    For odd ``n``, ``A^2 = u_x`` would give ``2 deg det A = n``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n % 2:
        return CliffordResult(
            n,
            False,
            witness=f"A^2 = u_x I_{n} needs 2 deg det A = {n}, which has no integer solution",
        )
    block = build_glide_V(1)
    A = sa.direct_sum(*([block] * (n // 2)))
    A_inv = sa.u_x(-1, n) @ A
    gamma = sa.from_blocks([[None, -1j * A], [1j * A_inv, None]])
    eps = sa.constant(np.diag(np.concatenate([np.ones(n), -np.ones(n)])))
    V = build_glide_V(n)
    residuals = {
        "A_square": (A @ A - sa.u_x(1, n)).max_norm(),
        "A_inverse": (A @ A_inv - sa.identity(n)).max_norm(),
        "gamma_square": (gamma @ gamma - sa.identity(2 * n)).max_norm(),
        "gamma_grading": (gamma @ eps + eps @ gamma).max_norm(),
        "gamma_glide": (gamma @ V + V @ gamma).max_norm(),
    }
    ok = all(r == 0.0 for r in residuals.values())
    return CliffordResult(n, ok, A, gamma, residuals, "" if ok else "construction residual nonzero")


@dataclass
class Mod2Report:
    """Result of the local mod-2 formula.

    Attributes
    ----------
    mu : int
        ``m mod 2``.
    m : int
        ``(1/π) ∫ f``, rounded.
    zeta_samples : ndarray
        Unit-modulus samples of ``zeta`` on the uniform ``ell`` grid.
    f_integral : float
        ``∫_0^{2π} f(ell) d ell``.
    winding_of_zeta : int
    samples : int
    equivariance_residual : float
    """

    mu: int
    m: int
    zeta_samples: np.ndarray
    f_integral: float
    winding_of_zeta: int
    samples: int
    equivariance_residual: float

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "m": self.m,
            "f_integral": self.f_integral,
            "winding_of_zeta": self.winding_of_zeta,
            "samples": self.samples,
            "equivariance_residual": self.equivariance_residual,
        }


def mod2_mu(e: EdgeSymbol, samples: int = 512, tol: float = 1e-6) -> Mod2Report:
    """Local mod-2 invariant of a glide-chiral edge symbol.

    ``zeta(ell) = (a(2 ell) + e^{i ell} b(2 ell)) / |.|`` satisfies
    ``zeta(ell + π) = conj(zeta(ell))`` and has winding zero.  With ``f``
    the continuous lift of ``zeta = exp(2πi f)`` starting in ``(-1/2, 1/2]``,
    ``m = (1/π) ∫ f`` is an integer and ``mu = m mod 2``.

    Raises
    ------
    ValueError
        ``samples`` is below 256 or odd.
    GapClosedError, EquivarianceError, NonIntegerError
    """
    if samples < 256 or samples % 2:
        raise ValueError("samples must be an even integer >= 256")
    ell = 2 * math.pi * np.arange(samples) / samples
    a = e.a(2 * ell, 0.0)[:, 0, 0]
    b = e.b(2 * ell, 0.0)[:, 0, 0]
    raw = a + np.exp(1j * ell) * b
    mod = np.abs(raw)
    if np.min(mod) < 1e-10:
        raise GapClosedError("edge symbol gapless on the ell grid")
    zeta = raw / mod
    half = samples // 2
    eq = float(np.max(np.abs(np.roll(zeta, -half) - np.conj(zeta))))
    if eq > 1e-10:
        raise EquivarianceError(f"zeta(ell + pi) != conj(zeta(ell)), residual {eq:.2e}")
    steps = np.angle(np.roll(zeta, -1) / zeta)
    if np.max(np.abs(steps)) > MAX_STEP:
        raise NonIntegerError("zeta sampled too coarsely for a continuous lift")
    wind = round(float(np.sum(steps)) / (2 * math.pi))
    if wind != 0:
        raise EquivarianceError(f"zeta has winding {wind}, expected 0")
    phase = np.angle(zeta[0]) + np.concatenate([[0.0], np.cumsum(steps[:-1])])
    f = phase / (2 * math.pi)
    # periodic trapezoid rule
    integral = float(np.sum(f) * (2 * math.pi / samples))
    m_real = integral / math.pi
    m = round(m_real)
    if abs(m_real - m) > tol:
        raise NonIntegerError(f"(1/pi) int f = {m_real} is not an integer within {tol}")
    return Mod2Report(int(m) % 2, int(m), zeta, integral, int(wind), samples, eq)


def vertical_edge_integer_index(m: PgModel, samples: int = 64) -> int:
    """``Wind_x det U``, checked to agree at ``k_y = 0`` and ``k_y = π``."""
    w0 = winding_det(m.U, WindingSpec("x", 0.0, samples))
    wpi = winding_det(m.U, WindingSpec("x", math.pi, samples))
    if w0 != wpi:
        raise GapClosedError(f"x-winding differs between k_y=0 ({w0}) and k_y=pi ({wpi})")
    return w0
