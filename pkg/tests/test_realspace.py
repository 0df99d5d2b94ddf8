import math

import numpy as np
import pytest

from pgtoeplitz import symbol_algebra as sa
from pgtoeplitz.errors import ConfigError, CutoffTooSmallError
from pgtoeplitz.models import chiral_hamiltonian
from pgtoeplitz.realspace import (
    build_glide_edge,
    build_vertical_edge,
    correspondence_check,
    mode_profile_csv,
    spectrum_csv,
    ssh_chain,
    zero_modes,
)

KX8 = [2 * math.pi * i / 8 for i in range(8)]


@pytest.mark.parametrize("pattern,black,brown", [("red", 1, 0), ("green", 0, 1), ("blue", 0, 0)])
def test_ssh_patterns(pattern, black, brown):
    rep = zero_modes(ssh_chain(pattern, 32))
    assert (rep.black, rep.brown) == (black, brown)
    assert all(x > 0.99 for x in rep.sublattice_weights[:black])


def test_red_mode_is_a_single_site():
    rep = zero_modes(ssh_chain("red", 16))
    assert rep.localization_lengths == [0.0]


@pytest.mark.parametrize("a", [0.5, 0.2, 1.0])
def test_red_plus_green_coupling_gaps_pair(a):
    lat = ssh_chain("red_plus_green", 32, a)
    E = lat.spectrum()
    assert zero_modes(lat).count == 0
    assert np.min(np.abs(E - a)) < 1e-10 and np.min(np.abs(E + a)) < 1e-10


def test_red_plus_green_uncoupled_has_two_modes():
    rep = zero_modes(ssh_chain("red_plus_green", 32, 0.0))
    assert (rep.black, rep.brown) == (1, 1)


def test_ssh_bad_pattern():
    with pytest.raises(ConfigError):
        ssh_chain("purple")


def test_lattice_is_hermitian_and_chiral(dimers):
    lat = build_glide_edge(dimers["p"], 0.9, 12)
    H = lat.matrix
    np.testing.assert_allclose(H, H.conj().T, atol=1e-14)
    S = np.diag(lat.grading)
    np.testing.assert_allclose(S @ H + H @ S, 0, atol=1e-14)


def test_bulk_strip_matches_symbol(dimers):
    # oracle: eigenvalues of a periodic strip are the Bloch energies
    lat = build_vertical_edge(dimers["r"], 0.4, 16)
    H = chiral_hamiltonian(dimers["r"].U)
    bloch = np.sort(np.concatenate([np.linalg.eigvalsh(H(2 * math.pi * j / 16, 0.4)) for j in range(16)]))
    # open strip and periodic spectra share the bulk band edges
    assert np.max(np.abs(lat.spectrum())) == pytest.approx(np.max(np.abs(bloch)), abs=1e-12)


@pytest.mark.parametrize("kx", KX8)
def test_glide_edge_Up(dimers, kx):
    for side in ("upper", "lower"):
        rep = zero_modes(build_glide_edge(dimers["p"], kx, 32, side))
        assert (rep.black, rep.brown) == (1, 1)
        assert rep.brown % 2 == 1


@pytest.mark.parametrize("name", ["r", "g", "b"])
def test_glide_edge_trivial(dimers, name):
    for kx in KX8[:3]:
        for side in ("upper", "lower"):
            assert zero_modes(build_glide_edge(dimers[name], kx, 32, side)).count == 0


@pytest.mark.parametrize("name,black,brown", [("r", 1, 0), ("g", 0, 1), ("p", 0, 0), ("b", 0, 0)])
def test_vertical_edge(dimers, name, black, brown):
    rep = zero_modes(build_vertical_edge(dimers[name], 0.7, 32))
    assert (rep.black, rep.brown) == (black, brown)


@pytest.mark.parametrize("name", ["p", "r", "g", "b"])
@pytest.mark.parametrize("edge", ["glide", "vertical"])
def test_correspondence(dimers, name, edge):
    assert correspondence_check(dimers[name], edge, 4, 24).agree


def test_correspondence_for_direct_sum(dimers):
    assert correspondence_check(dimers["p"] + dimers["r"], "glide", 4, 24).agree


def test_cells_too_small(dimers):
    with pytest.raises(CutoffTooSmallError):
        build_glide_edge(dimers["p"], 0.0, 2)


def test_bad_side(dimers):
    with pytest.raises(ConfigError):
        build_glide_edge(dimers["p"], 0.0, 16, "left")


def test_csv_outputs(dimers):
    lats = [build_glide_edge(dimers["p"], k, 8) for k in KX8[:2]]
    assert spectrum_csv(lats).splitlines()[0] == "momentum,energy"
    rows = mode_profile_csv(ssh_chain("red", 8)).splitlines()
    assert rows[0] == "mode,cell,weight" and len(rows) > 1
