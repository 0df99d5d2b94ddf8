"""Sampled symmetry-preserving homotopies between Bloch symbols.

Two closed-form paths are provided:

* :func:`double_up_path` trivializes ``U_p ⊕ U_p`` through glide-compatible
  unitaries,
* :func:`rotation_path` realizes ``U ⊕ W ~ UW ⊕ 1`` by rotating the second
  factor into the first block.

:func:`verify_path` checks compatibility, gap, continuity, endpoints and
index constancy at every sample.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import symbol_algebra as sa
from .errors import GapClosedError, GaplessLoopError, PgToeplitzError
from .invariants import WindingSpec, winding_det
from .models import PgModel, build_dimer_symbols, build_glide_V, certify_gap
from .symbol_algebra import LaurentMatrix
from .toeplitz import family_mod2_index

__all__ = [
    "SymbolPath",
    "PathReport",
    "double_up_path",
    "rotation_path",
    "linear_path",
    "verify_path",
    "certify_path_gap",
    "CHECKS",
]

CHECKS = ("compatibility", "gap", "unitary", "continuity", "endpoints", "index_invariance")
GAP_FLOOR = 0.1
CONTINUITY_BOUND = 0.2


@dataclass(frozen=True)
class SymbolPath:
    """Uniformly sampled path of symbols.

    Attributes
    ----------
    t_samples : ndarray
    symbols : tuple of LaurentMatrix
    V : LaurentMatrix or None
        Glide block of the path's dimension; ``None`` for paths without a
        glide (plain winding checks only).
    start, end : LaurentMatrix
        Declared endpoints.
    label : str
    """

    t_samples: np.ndarray
    symbols: tuple
    V: LaurentMatrix | None
    start: LaurentMatrix
    end: LaurentMatrix
    label: str = ""

    def __len__(self) -> int:
        return len(self.symbols)

    def model(self, i: int) -> PgModel:
        if self.V is None:
            raise ValueError("path has no glide block")
        return PgModel(self.V, self.symbols[i], self.V.dim // 2, f"{self.label}[{i}]")


def _t_grid(t_count: int, t_max: float) -> np.ndarray:
    if t_count < 3 or t_count % 2 == 0:
        raise ValueError("t_count must be an odd integer >= 3")
    return np.linspace(0.0, t_max, t_count)


def _rotation(t: float, A: LaurentMatrix, B: LaurentMatrix) -> LaurentMatrix:
    """``[[cos t, -A sin t], [B sin t, cos t]]``."""
    n = A.dim
    c, s = math.cos(t), math.sin(t)
    return sa.from_blocks([[c * sa.identity(n), -s * A], [s * B, c * sa.identity(n)]])


def double_up_path(t_count: int = 33, literal: bool = False) -> SymbolPath:
    """Path from ``U_p ⊕ U_p`` to the identity, for ``t`` in ``[0, π/2]``.

    ``(U_p ⊕ 1) R(t) (1 ⊕ U_p) R(t)^†`` with the unitary
    ``R = [[cos, -V sin], [V^† sin, cos]]``.  ``R`` commutes with the
    doubled glide ``V ⊕ V`` and at ``t = π/2`` the product is
    ``U_p V U_p V^† ⊕ 1 = 1``.

    ``literal=True`` uses ``[[cos, -V sin], [V sin, cos]]`` followed by
    ``[[cos, V^† sin], [-V^† sin, cos]]`` instead.  Those factors are not
    unitary and the product is singular at ``t = π/4``, ``k_x = π``; the
    variant exists so the verifier can show the failure.
    """
    Up = build_dimer_symbols()["p"].U
    V = build_glide_V(1)
    Vd = sa.adjoint(V)
    one = sa.identity(2)
    left = sa.direct_sum(Up, one)
    right = sa.direct_sum(one, Up)
    ts = _t_grid(t_count, math.pi / 2)
    if literal:
        syms = tuple(left @ _rotation(t, V, V) @ right @ _rotation(t, -Vd, -Vd) for t in ts)
    else:
        syms = tuple(left @ _rotation(t, V, Vd) @ right @ _rotation(-t, V, Vd) for t in ts)
    label = "double_up_literal" if literal else "double_up"
    return SymbolPath(ts, syms, sa.direct_sum(V, V), sa.direct_sum(Up, Up), sa.identity(4), label)


def rotation_path(U: LaurentMatrix, W: LaurentMatrix, t_count: int = 33, V: LaurentMatrix | None = None) -> SymbolPath:
    """``(U ⊕ 1) R(t) (1 ⊕ W) R(t)^{-1}`` from ``U ⊕ W`` to ``UW ⊕ 1``.

    ``R(t)`` is the plain rotation ``[[cos, -sin], [sin, cos]] ⊗ I``, which
    commutes with any block-diagonal glide ``V ⊕ V``.
    """
    if U.dim != W.dim:
        raise ValueError(f"dimension mismatch: {U.dim} vs {W.dim}")
    n = U.dim
    one = sa.identity(n)
    left = sa.direct_sum(U, one)
    right = sa.direct_sum(one, W)
    ts = _t_grid(t_count, math.pi / 2)
    syms = tuple(left @ _rotation(t, one, one) @ right @ _rotation(-t, one, one) for t in ts)
    glide = sa.direct_sum(V, V) if V is not None else None
    return SymbolPath(ts, syms, glide, sa.direct_sum(U, W), sa.direct_sum(U @ W, one), "rotation")


def linear_path(A: LaurentMatrix, B: LaurentMatrix, t_count: int = 33, V: LaurentMatrix | None = None) -> SymbolPath:
    """Straight line ``(1 - t) A + t B`` for ``t`` in ``[0, 1]``; generally not gapped."""
    ts = _t_grid(t_count, 1.0)
    syms = tuple((1 - t) * A + t * B for t in ts)
    return SymbolPath(ts, syms, V, A, B, "linear")


@dataclass
class PathReport:
    """Per-check outcomes of :func:`verify_path`.

    ``failures`` lists ``(check, t, detail)`` for every failing sample.
    """

    label: str
    checks: list
    passed: bool
    failures: list = field(default_factory=list)
    compatibility_max: float | None = None
    min_sigma: float | None = None
    unitary_max: float | None = None
    continuity_max: float | None = None
    endpoint_residuals: dict = field(default_factory=dict)
    index_samples: list = field(default_factory=list)
    per_sample: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _index_points(n: int) -> list[int]:
    return sorted({0, n // 4, n // 2, (3 * n) // 4, n - 1})


def verify_path(
    p: SymbolPath,
    checks=("compatibility", "gap", "continuity", "endpoints", "index_invariance"),
    grid: int = 64,
    mod2_grid: int = 8,
    mod2_N: int = 16,
) -> PathReport:
    """Run the selected checks at every sample and itemize failures."""
    checks = list(checks)
    unknown = set(checks) - set(CHECKS)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    rep = PathReport(p.label, checks, True)
    fail = rep.failures
    samples = [{"t": float(t)} for t in p.t_samples]

    if "compatibility" in checks:
        if p.V is None:
            fail.append(("compatibility", None, "path has no glide block"))
        else:
            worst = 0.0
            Vsq = (p.V @ p.V - sa.u_x(1, p.V.dim)).max_norm()
            for t, U, row in zip(p.t_samples, p.symbols, samples):
                r = max((p.V @ U - sa.flip_ky(U) @ p.V).max_norm(), Vsq)
                row["compatibility"] = r
                worst = max(worst, r)
                if r != 0.0:
                    fail.append(("compatibility", float(t), f"residual {r:.3e}"))
            rep.compatibility_max = worst

    if "gap" in checks:
        kx, ky = sa.torus_grid(grid)
        worst = math.inf
        for t, U, row in zip(p.t_samples, p.symbols, samples):
            smin = float(np.min(np.linalg.svd(U(kx, ky), compute_uv=False)))
            row["min_sigma"] = smin
            worst = min(worst, smin)
            if smin <= GAP_FLOOR:
                fail.append(("gap", float(t), f"min singular value {smin:.3e} <= {GAP_FLOOR}"))
        rep.min_sigma = worst

    if "unitary" in checks:
        worst = 0.0
        for t, U, row in zip(p.t_samples, p.symbols, samples):
            ok, r = sa.is_unitary(U, grid, 1e-12)
            row["unitary"] = r
            worst = max(worst, r)
            if not ok:
                fail.append(("unitary", float(t), f"residual {r:.3e}"))
        rep.unitary_max = worst

    if "continuity" in checks:
        worst = 0.0
        for i in range(1, len(p)):
            step = (p.symbols[i] - p.symbols[i - 1]).max_norm()
            worst = max(worst, step)
            if step >= CONTINUITY_BOUND:
                fail.append(("continuity", float(p.t_samples[i]), f"step {step:.3e}"))
        rep.continuity_max = worst

    if "endpoints" in checks:
        r0 = (p.symbols[0] - p.start).max_norm()
        r1 = (p.symbols[-1] - p.end).max_norm()
        rep.endpoint_residuals = {"start": r0, "end": r1}
        if r0 > 1e-12:
            fail.append(("endpoints", float(p.t_samples[0]), f"start residual {r0:.3e}"))
        if r1 > 1e-12:
            fail.append(("endpoints", float(p.t_samples[-1]), f"end residual {r1:.3e}"))

    if "index_invariance" in checks:
        seen = []
        for i in _index_points(len(p)):
            U = p.symbols[i]
            entry = {"t": float(p.t_samples[i])}
            try:
                entry["wind_x"] = winding_det(U, WindingSpec("x", 0.0))
                entry["wind_y"] = winding_det(U, WindingSpec("y", 0.0))
                if p.V is not None:
                    entry["mod2"] = family_mod2_index(p.model(i), mod2_grid, mod2_N).mod2
            except (GaplessLoopError, GapClosedError, PgToeplitzError) as exc:
                fail.append(("index_invariance", entry["t"], f"{type(exc).__name__}: {exc}"))
            seen.append(entry)
        rep.index_samples = seen
        for key in ("wind_x", "wind_y", "mod2"):
            vals = {e[key] for e in seen if key in e}
            if len(vals) > 1:
                fail.append(("index_invariance", None, f"{key} varies along the path: {sorted(vals)}"))

    rep.per_sample = samples
    rep.passed = not fail
    return rep


def certify_path_gap(p: SymbolPath) -> float:
    """Smallest certified gap bound over all samples (see :func:`certify_gap`)."""
    return min(certify_gap(U).bound for U in p.symbols)
