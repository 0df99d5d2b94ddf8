import math

import numpy as np
import pytest

from pgtoeplitz import symbol_algebra as sa
from pgtoeplitz.errors import CutoffTooSmallError, NonUnitaryError
from pgtoeplitz.models import PgModel, SshModel, build_glide_V, random_gapped_perturbation
from pgtoeplitz.toeplitz import (
    build_section,
    compactness_decay,
    crossing_mod2_index,
    family_mod2_index,
    flatten_y,
    fredholm_index,
    karoubi_check,
    kernel_basis,
    kernel_dim,
    profile_csv,
    singular_value_profile,
)


def _dense_toeplitz(U, kx, rows, cols):
    # oracle: block (l', l) = C_{l'-l}(k_x), straight from the coefficient table
    C = U.fourier_y(kx)
    d = U.dim
    T = np.zeros((rows * d, cols * d), dtype=complex)
    for i in range(rows):
        for j in range(cols):
            if i - j in C:
                T[i * d : (i + 1) * d, j * d : (j + 1) * d] = C[i - j]
    return T


@pytest.mark.parametrize("w", range(-3, 4))
def test_gohberg_krein_sweep(w):
    assert fredholm_index(sa.u_y(w), 0.0, 32) == -w


@pytest.mark.parametrize("inside,outside", [(0, 1), (1, 0), (2, 1), (1, 2)])
def test_index_of_scalar_polynomial_matches_root_count(inside, outside):
    p = sa.scalar(1.0)
    for j in range(inside):
        p = p @ (sa.u_y() - sa.scalar(0.4 * np.exp(1j * j)))
    for j in range(outside):
        p = p @ (sa.u_y() - sa.scalar(2.5 * np.exp(2j * j)))
    assert fredholm_index(p, 0.3, 32) == -inside


def test_upper_section_matches_dense_oracle(dimers, rng):
    from conftest import random_laurent

    U = random_laurent(rng, 2, 2)
    s = build_section(U, 0.8, 10)
    D = U.y_degree
    np.testing.assert_allclose(s.matrix, _dense_toeplitz(U, 0.8, 10 + D, 10)[: s.matrix.shape[0]], atol=1e-12)


def test_lower_section_is_reflected(dimers):
    # on l <= -1 the Toeplitz operator of u_y is the backward shift
    s = build_section(sa.u_y(), 0.0, 8, "toeplitz_lower")
    assert kernel_dim(s).dim == 1
    assert kernel_dim(build_section(sa.u_y(), 0.0, 8)).dim == 0


def test_circulant_is_unitary_for_unitary_symbol(dimers):
    M = build_section(dimers["p"], 0.3, 12, "circulant").matrix
    np.testing.assert_allclose(M.conj().T @ M, np.eye(M.shape[0]), atol=1e-12)


def test_cutoff_too_small():
    with pytest.raises(CutoffTooSmallError):
        build_section(sa.u_y(3), 0.0, 6)


@pytest.mark.parametrize("kx", np.linspace(0, 2 * math.pi, 16, endpoint=False))
def test_twisted_kernels(dimers, kx):
    kp = kernel_dim(build_section(dimers["p"].U, kx, 16))
    kr = kernel_dim(build_section(dimers["r"].U, kx, 16))
    assert (kp.dim, kr.dim) == (1, 0)
    assert kp.trusted and kr.trusted


def test_kernel_basis_is_annihilated(dimers):
    mat = build_section(dimers["p"].U, 1.1, 16).matrix
    B = kernel_basis(mat)
    assert B.shape[1] == 1
    assert np.max(np.abs(mat @ B)) < 1e-12


@pytest.mark.parametrize(
    "combo,expect",
    [(("p",), 1), (("r",), 0), (("g",), 0), (("b",), 0), (("p", "p"), 0), (("p", "r"), 1), (("p", "p", "p"), 1)],
)
def test_family_mod2(dimers, combo, expect):
    m = dimers[combo[0]]
    for name in combo[1:]:
        m = m + dimers[name]
    rep = family_mod2_index(m)
    assert rep.mod2 == expect
    assert rep.stabilized and rep.sides_agree


def test_ssh_uses_x_symbol():
    assert fredholm_index(SshModel(sa.u_x()), 0.0, 16) == -1
    assert fredholm_index(SshModel(sa.u_x(-1)), 0.0, 16) == 1


@pytest.mark.parametrize("name", ["p", "r", "b"])
@pytest.mark.parametrize("kx", [0.0, math.pi / 2, math.pi, 3 * math.pi / 2])
def test_karoubi_identities(dimers, name, kx):
    rep = karoubi_check(dimers[name], kx, 16)
    assert rep.max_residual < 1e-12
    assert rep.dims_match


def test_karoubi_needs_unitary(dimers):
    m = random_gapped_perturbation(dimers["p"], 0.2, 0)
    with pytest.raises(NonUnitaryError):
        karoubi_check(m, 0.0)


def test_compactness_ranks_constant(dimers):
    rep = compactness_decay(dimers["p"], 0.4, [8, 12, 16])
    assert rep.constant and rep.within_bound


def test_singular_value_profile_csv(dimers):
    rows = singular_value_profile(dimers["p"], 4, 8)
    text = profile_csv(rows)
    assert text.splitlines()[0] == "k_x,index,sigma"
    assert len(text.splitlines()) == len(rows) + 1


def test_flatten_y_of_unitary_is_itself(dimers):
    U = dimers["p"].U
    W = flatten_y(U, 0.7)
    at_kx = sa.LaurentMatrix(2, {(0, n): c for n, c in U.fourier_y(0.7).items()})
    assert W.allclose(at_kx, 1e-10)


def test_pointwise_parity_is_not_a_deformation_invariant(dimers):
    # U_p + t U_g has det 1 - t^2 ū_x, gapped for |t| < 1, but no Toeplitz kernel
    m = PgModel(build_glide_V(1), dimers["p"].U + 0.1 * dimers["g"].U, 1, "Up+0.1Ug").with_gap()
    rep = family_mod2_index(m)
    assert rep.mod2 == 0 and set(rep.dims_upper) == {0}
    cross = crossing_mod2_index(m, grid=64, N=48)
    assert cross.mod2 == 1
    assert len(cross.crossings) == 1 and cross.crossings[0] == pytest.approx(0.0, abs=1e-4)


@pytest.mark.parametrize("combo,expect", [(("p",), 1), (("r",), 0), (("p", "r"), 1)])
def test_crossing_parity_of_dimers(dimers, combo, expect):
    m = dimers[combo[0]]
    for name in combo[1:]:
        m = m + dimers[name]
    assert crossing_mod2_index(m, grid=32, N=32).mod2 == expect


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(3))
def test_crossing_parity_survives_perturbation(dimers, seed):
    m = random_gapped_perturbation(dimers["p"], 0.3, seed)
    assert crossing_mod2_index(m).mod2 == 1
