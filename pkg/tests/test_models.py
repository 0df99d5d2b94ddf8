import json
import math

import numpy as np
import pytest

from pgtoeplitz import symbol_algebra as sa
from pgtoeplitz.errors import ConfigError, EquivarianceError, GapClosedError
from pgtoeplitz.models import (
    PRESETS,
    EdgeSymbol,
    PgModel,
    SshModel,
    build_edge_symbol,
    build_general_U,
    build_glide_V,
    certify_gap,
    check_pg_compatibility,
    chiral_hamiltonian,
    edge_gauge_intertwiner,
    glide_permutation,
    load_model_config,
    model_from_config,
    permute_model,
    preset,
    random_edge_symbol,
    random_gapped_perturbation,
    sublattice_grading,
)

from conftest import random_laurent


@pytest.mark.parametrize("n", [1, 2, 3])
def test_glide_squares_to_ux(n):
    V = build_glide_V(n)
    assert V @ V == sa.u_x(1, 2 * n)


@pytest.mark.parametrize("name", ["r", "g", "p", "b"])
def test_dimers_compatible_unitary_gapped(dimers, name):
    m = dimers[name]
    rep = check_pg_compatibility(m)
    assert rep.passes and rep.max_residual() == 0.0
    assert sa.is_unitary(m.U)[0]
    assert m.gap_bound > 0.5


def test_dimer_closed_forms(dimers):
    assert dimers["r"].U == sa.from_blocks([[None, sa.u_x()], [sa.identity(1), None]])
    assert dimers["p"].U == sa.direct_sum(sa.u_y(), sa.u_y(-1))
    assert dimers["b"].U == sa.identity(2)
    assert dimers["g"].U == sa.adjoint(dimers["r"].U)


def test_general_form_is_compatible_for_random_blocks(rng):
    for n in (1, 2):
        m = build_general_U(random_laurent(rng, n), random_laurent(rng, n))
        assert check_pg_compatibility(m).passes


def test_incompatible_symbol_is_detected():
    m = PgModel(build_glide_V(1), sa.direct_sum(sa.u_y(), sa.u_y()), 1)
    assert not check_pg_compatibility(m).passes


def test_direct_sum_keeps_compatibility(dimers):
    m = dimers["p"] + dimers["r"]
    assert m.dim == 4 and check_pg_compatibility(m).passes


def test_gap_certificate_matches_dense_grid(dimers):
    cert = certify_gap(dimers["p"].U)
    kx, ky = sa.torus_grid(256)
    dense = np.min(np.linalg.svd(dimers["p"].U(kx, ky), compute_uv=False))
    assert cert.certified and 0 < cert.bound <= dense + 1e-12


def test_singular_symbol_fails_gap():
    m = build_general_U(sa.scalar({(0, 0): 1.0, (1, 0): 1.0}), sa.zeros(1))
    with pytest.raises(GapClosedError):
        m.with_gap()


def test_chiral_hamiltonian_anticommutes_with_grading(dimers):
    H = chiral_hamiltonian(dimers["r"].U)
    S = sa.constant(sublattice_grading(2))
    assert (H @ S + S @ H).is_zero()
    assert H == sa.adjoint(H)


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("base", ["p", "r"])
def test_random_perturbation_stays_compatible(dimers, seed, base):
    m = random_gapped_perturbation(dimers[base], 0.3, seed)
    assert check_pg_compatibility(m).passes
    assert m.gap_bound > 0
    assert (m.U - dimers[base].U).max_norm() <= 0.3 + 1e-12


def test_perturbation_of_direct_sum(dimers):
    m = random_gapped_perturbation(dimers["p"] + dimers["p"], 0.2, 0)
    assert check_pg_compatibility(m).passes


def test_glide_permutation_roundtrip(dimers):
    m = dimers["p"] + dimers["r"]
    perm = glide_permutation(m.V)
    std = permute_model(m, perm)
    assert std.V == build_glide_V(2)
    assert permute_model(std, np.argsort(perm)).U == m.U


def test_edge_gauge_intertwiner():
    G, V = edge_gauge_intertwiner(), build_glide_V(1)
    assert G @ V == sa.u_y(-1, 2) @ V @ sa.flip_ky(G)


def test_edge_symbol_validation():
    with pytest.raises(EquivarianceError):
        build_edge_symbol(sa.scalar(1.0), sa.scalar(1.0))
    with pytest.raises(EquivarianceError):
        build_edge_symbol(sa.scalar(1j), sa.zeros(1))
    with pytest.raises(GapClosedError):
        build_edge_symbol(sa.zeros(1), sa.zeros(1))


def test_edge_hamiltonian_is_hermitian_and_squares_to_scalar(rng):
    e = random_edge_symbol(rng)
    H = e.hamiltonian(np.linspace(0, 2 * np.pi, 7))
    np.testing.assert_allclose(H, np.conj(np.swapaxes(H, -1, -2)), atol=1e-12)
    sq = H @ H
    np.testing.assert_allclose(sq[..., 0, 1], 0, atol=1e-12)


@pytest.mark.parametrize("name", PRESETS)
def test_presets_load(name):
    assert isinstance(preset(name), (PgModel, SshModel))


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset("nope")


def test_config_round_trip(tmp_path):
    cfg = {"type": "pg", "a": sa.u_y().to_dict(), "b": sa.zeros(1).to_dict(), "label": "x"}
    path = tmp_path / "m.json"
    path.write_text(json.dumps(cfg))
    m = load_model_config(path)
    assert m.U == preset("Up").U


@pytest.mark.parametrize(
    "cfg",
    [
        {"type": "pg", "a": {"dim": 1, "terms": []}, "b": {"dim": 1, "terms": []}, "bogus": 1},
        {"type": "mystery"},
        {"preset": "Up", "label": "x"},
        {"type": "ssh"},
        {"type": "pg", "a": {"dim": 1, "terms": []}, "b": {"dim": 1, "terms": []}},
    ],
)
def test_bad_configs_rejected(cfg):
    with pytest.raises(ConfigError):
        model_from_config(cfg)


def test_edge_config():
    cfg = {"type": "edge", "a": sa.scalar(-1.0).to_dict(), "b": sa.zeros(1).to_dict()}
    assert isinstance(model_from_config(cfg), EdgeSymbol)


def test_ssh_rejects_y_dependence():
    with pytest.raises(ConfigError):
        SshModel(sa.u_y())
