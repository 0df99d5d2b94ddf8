"""Command-line entry point.

Every report is JSON with ``"schema": 1`` and sorted keys, and records the
grids, cutoffs and tolerances it was computed with.  Exit codes: 0 success,
1 computation error or failed verification, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import symbol_algebra as sa
from .errors import ConfigError, PgToeplitzError
from .models import (
    PRESETS,
    EdgeSymbol,
    PgModel,
    SshModel,
    build_dimer_symbols,
    build_glide_V,
    load_model_config,
    preset,
    random_gapped_perturbation,
)

SCHEMA = 1
PATHS = ("double_up", "double_up_literal", "rotation_rg")
SSH_PATTERNS = ("blue", "red", "green", "red_plus_green")

# inclusive ranges for numeric knobs
RANGES = {
    "grid": (4, 1024),
    "cells": (8, 512),
    "cutoff": (4, 256),
    "samples": (256, 16384),
    "t_count": (3, 1025),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    return x


def _dump(report: dict) -> str:
    return json.dumps(_jsonable({"schema": SCHEMA, **report}), sort_keys=True, indent=2) + "\n"


def _rows_csv(header: list[str], rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _check_ranges(args) -> None:
    for key, (lo, hi) in RANGES.items():
        v = getattr(args, key, None)
        if v is not None and not lo <= v <= hi:
            raise ConfigError(f"--{key.replace('_', '-')} must lie in [{lo}, {hi}], got {v}")
    if getattr(args, "samples", None) is not None and args.samples % 2:
        raise ConfigError("--samples must be even")
    if getattr(args, "t_count", None) is not None and args.t_count % 2 == 0:
        raise ConfigError("--t-count must be odd")
    if getattr(args, "tol", None) is not None and not 0 < args.tol <= 1e-2:
        raise ConfigError("--tol must lie in (0, 1e-2]")
    if getattr(args, "amplitude", None) is not None and not 0 <= args.amplitude <= 1:
        raise ConfigError("--perturb must lie in [0, 1]")


def _load(args):
    if args.preset and args.config:
        raise ConfigError("give either --preset or --config, not both")
    if args.config:
        m = load_model_config(args.config)
    elif args.preset:
        m = preset(args.preset)
    else:
        raise ConfigError("a model is required: --preset NAME or --config PATH")
    if getattr(args, "amplitude", None):
        if not isinstance(m, PgModel):
            raise ConfigError("--perturb applies to glide-compatible models only")
        m = random_gapped_perturbation(m, args.amplitude, args.seed)
    return m


def _label(args) -> str:
    return args.preset or str(args.config)


# -- subcommands --------------------------------------------------------------
def cmd_invariants(args) -> int:
    from .invariants import WindingSpec, mod2_mu, vertical_edge_integer_index, winding_det
    from .toeplitz import crossing_mod2_index, family_mod2_index, fredholm_index

    m = _load(args)
    rep = {"command": "invariants", "model": _label(args), "seed": args.seed, "perturb": args.amplitude}
    if isinstance(m, EdgeSymbol):
        mu = mod2_mu(m, args.samples)
        rep.update(kind="edge", mu=mu.mu, m=mu.m, samples=args.samples, details=mu.to_dict())
    elif isinstance(m, SshModel):
        rep.update(
            kind="ssh",
            wind_x=winding_det(m.U, WindingSpec("x", 0.0)),
            fredholm_index=fredholm_index(m, 0.0, args.cutoff, args.tol),
            N=args.cutoff,
            tol=args.tol,
        )
    else:
        fam = family_mod2_index(m, args.grid, args.cutoff, args.tol)
        rep.update(
            kind="pg",
            wind_x=winding_det(m.U, WindingSpec("x", 0.0)),
            wind_y=winding_det(m.U, WindingSpec("y", 0.0)),
            vertical_index=vertical_edge_integer_index(m),
            mod2=fam.mod2,
            family=fam.to_dict(),
            grid=args.grid,
            N=args.cutoff,
            tol=args.tol,
        )
        if args.crossing:
            rep["crossing"] = crossing_mod2_index(m).to_dict()
    if args.format == "csv":
        keys = sorted(k for k, v in rep.items() if isinstance(v, (int, float, str)) and v is not None)
        _emit(_rows_csv(["key", "value"], [[k, rep[k]] for k in keys]), args.out)
    else:
        _emit(_dump(rep), args.out)
    return 0


def cmd_edge(args) -> int:
    from .realspace import build_glide_edge, build_vertical_edge, correspondence_check, spectrum_csv

    m = _load(args)
    if not isinstance(m, PgModel):
        raise ConfigError("edge needs a glide-compatible model")
    if args.format == "csv":
        ks = [2 * math.pi * i / args.grid for i in range(args.grid)]
        build = build_glide_edge if args.edge == "glide" else build_vertical_edge
        _emit(spectrum_csv([build(m, k, args.cells) for k in ks]), args.out)
        return 0
    corr = correspondence_check(m, args.edge, args.grid, args.cells, args.cutoff, args.tol)
    rep = {
        "command": "edge",
        "model": _label(args),
        "edge": args.edge,
        "grid": args.grid,
        "M": args.cells,
        "N": args.cutoff,
        "tol": args.tol,
        "seed": args.seed,
        "perturb": args.amplitude,
        **corr.to_dict(),
    }
    _emit(_dump(rep), args.out)
    return 0 if corr.agree else 1


def cmd_toeplitz(args) -> int:
    from .toeplitz import family_mod2_index, fredholm_index, karoubi_check, profile_csv, singular_value_profile

    m = _load(args)
    if args.format == "csv":
        _emit(profile_csv(singular_value_profile(m, args.grid, args.cutoff)), args.out)
        return 0
    rep = {
        "command": "toeplitz",
        "model": _label(args),
        "grid": args.grid,
        "N": args.cutoff,
        "tol": args.tol,
        "seed": args.seed,
        "perturb": args.amplitude,
        "fredholm_index": fredholm_index(m, 0.0, args.cutoff, args.tol),
    }
    if not isinstance(m, EdgeSymbol):
        rep["kernels"] = family_mod2_index(m, args.grid, args.cutoff, args.tol).to_dict()
    if args.karoubi:
        if not isinstance(m, PgModel):
            raise ConfigError("--karoubi needs a glide-compatible model")
        ks = [2 * math.pi * i / 4 for i in range(4)]
        rep["karoubi"] = [karoubi_check(m, k, args.cutoff, args.tol).to_dict() for k in ks]
    _emit(_dump(rep), args.out)
    return 0


def cmd_homotopy(args) -> int:
    from .homotopy import CHECKS, double_up_path, rotation_path, verify_path

    if args.path == "rotation_rg":
        d = build_dimer_symbols()
        path = rotation_path(d["r"].U, d["g"].U, args.t_count, build_glide_V(1))
    else:
        path = double_up_path(args.t_count, literal=args.path == "double_up_literal")
    rep = verify_path(path, CHECKS, args.grid)
    out = {"command": "homotopy", "path": args.path, "t_count": args.t_count, "grid": args.grid, **rep.to_dict()}
    if args.format == "csv":
        keys = sorted({k for row in rep.per_sample for k in row})
        _emit(_rows_csv(keys, [[row.get(k, "") for k in keys] for row in rep.per_sample]), args.out)
    else:
        _emit(_dump(out), args.out)
    return 0 if rep.passed else 1


def cmd_ssh(args) -> int:
    from .realspace import mode_profile_csv, ssh_chain, zero_modes

    lat = ssh_chain(args.pattern, args.cells, args.a)
    if args.format == "csv":
        _emit(mode_profile_csv(lat, args.tol), args.out)
        return 0
    zm = zero_modes(lat, args.tol)
    E = lat.spectrum()
    rep = {
        "command": "ssh",
        "pattern": args.pattern,
        "a": args.a,
        "cells": args.cells,
        "tol": args.tol,
        "zero_modes": zm.count,
        "black": zm.black,
        "brown": zm.brown,
        "far_edge": zm.far_edge,
        "lowest_abs_energies": sorted(float(abs(e)) for e in E)[:4],
        "details": zm.to_dict(),
    }
    if args.a:
        rep["pair_residual"] = float(max(min(abs(E - abs(args.a))), min(abs(E + abs(args.a)))))
    _emit(_dump(rep), args.out)
    return 0


def cmd_accept(args) -> int:
    from .acceptance import CRITERIA, format_line, run_all

    numbers = args.only or sorted(CRITERIA)
    bad = set(numbers) - set(CRITERIA)
    if bad:
        raise ConfigError(f"unknown criteria {sorted(bad)}")
    results = run_all(numbers)
    for r in results:
        print(format_line(r), file=sys.stderr)
    if args.out:
        rows = [{k: v for k, v in r.to_dict().items() if k != "seconds"} for r in results]
        Path(args.out).write_text(_dump({"command": "accept", "criteria": rows}))
    return 0 if all(r.passed for r in results) else 1


# -- parser -------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pgtoeplitz", description="Glide-symmetric Toeplitz index computations.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, model=True):
        if model:
            sp.add_argument("--preset", choices=PRESETS)
            sp.add_argument("--config", metavar="PATH")
            sp.add_argument("--perturb", dest="amplitude", type=float, default=0.0, help="random gapped perturbation amplitude")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--grid", type=int, default=16)
        sp.add_argument("--cutoff", type=int, default=16, help="finite-section size N")
        sp.add_argument("--cells", type=int, default=32, help="real-space cells M")
        sp.add_argument("--tol", type=float, default=1e-8)
        sp.add_argument("--samples", type=int, default=512)
        sp.add_argument("--out", metavar="PATH")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = sub.add_parser("invariants", help="windings, mod-2 family index, mu")
    common(sp)
    sp.add_argument("--crossing", action="store_true", help="also report the crossing parity")
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("edge", help="real-space edge spectra and zero modes")
    common(sp)
    sp.add_argument("--edge", choices=("glide", "vertical"), default="glide")
    sp.set_defaults(func=cmd_edge)

    sp = sub.add_parser("toeplitz", help="kernel reports and Karoubi check")
    common(sp)
    sp.add_argument("--karoubi", action="store_true")
    sp.set_defaults(func=cmd_toeplitz)

    sp = sub.add_parser("homotopy", help="verify a shipped homotopy")
    common(sp, model=False)
    sp.add_argument("--path", choices=PATHS, default="double_up")
    sp.add_argument("--t-count", dest="t_count", type=int, default=33)
    sp.set_defaults(func=cmd_homotopy, grid=64)

    sp = sub.add_parser("ssh", help="half-line SSH chain scenarios")
    common(sp, model=False)
    sp.add_argument("--pattern", choices=SSH_PATTERNS, default="red")
    sp.add_argument("--a", type=float, default=0.0, help="coupling between the red and green chains")
    sp.set_defaults(func=cmd_ssh)

    sp = sub.add_parser("accept", help="run the acceptance suite")
    sp.add_argument("--only", type=int, nargs="+", metavar="K")
    sp.add_argument("--out", metavar="PATH")
    sp.set_defaults(func=cmd_accept)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _check_ranges(args)
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (PgToeplitzError, np.linalg.LinAlgError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
