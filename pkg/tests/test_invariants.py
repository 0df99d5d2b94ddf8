import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pgtoeplitz import symbol_algebra as sa
from pgtoeplitz.acceptance import random_winding_block
from pgtoeplitz.errors import GaplessLoopError, GapClosedError
from pgtoeplitz.invariants import (
    WindingSpec,
    clifford_obstruction,
    mod2_mu,
    vertical_edge_integer_index,
    w_degree_constraint,
    winding,
    winding_det,
)
from pgtoeplitz.models import EdgeSymbol, build_edge_symbol, build_glide_V, random_edge_symbol

roots = st.lists(
    st.tuples(st.one_of(st.floats(0.05, 0.8), st.floats(1.25, 4.0)), st.floats(0, 2 * math.pi)),
    min_size=1,
    max_size=6,
)


@given(roots, st.integers(-3, 3))
def test_winding_matches_root_count(rs, shift):
    # oracle: argument principle, roots inside the unit disc
    p = sa.u_x(shift)
    for r, phi in rs:
        p = p @ (sa.u_x() - sa.scalar(r * np.exp(1j * phi)))
    coeffs = [complex(p.coeff(m, 0)[0, 0]) for m in range(p.support[-1][0], p.support[0][0] - 1, -1)]
    inside = int(np.sum(np.abs(np.roots(coeffs)) < 1)) + p.support[0][0]
    assert winding(p, "x") == inside


@pytest.mark.parametrize("w", range(-3, 4))
def test_monomial_winding_both_axes(w):
    assert winding(sa.u_x(w), "x") == w
    assert winding(sa.u_y(w), "y") == w
    assert winding(sa.u_y(w), "x") == 0


def test_gapless_loop_raises():
    with pytest.raises(GaplessLoopError):
        winding(sa.scalar({(0, 0): 1.0, (1, 0): 1.0}), "x")


def test_winding_spec_validation():
    with pytest.raises(ValueError):
        WindingSpec("z")


def test_winding_additivity_on_random_blocks():
    rng = np.random.default_rng(7)
    for _ in range(10):
        A, wa = random_winding_block(rng, 2)
        B, wb = random_winding_block(rng, 2)
        spec = WindingSpec("x", 0.4)
        assert winding_det(A, spec) == wa
        assert winding_det(A @ B, spec) == wa + wb
        assert winding_det(sa.direct_sum(A, B), spec) == wa + wb


@pytest.mark.parametrize("name,expect", [("r", 1), ("g", -1), ("p", 0), ("b", 0)])
def test_dimer_x_windings(dimers, name, expect):
    assert winding(dimers[name].U, "x") == expect
    assert vertical_edge_integer_index(dimers[name]) == expect
    assert winding(dimers[name].U, "y") == 0


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_degree_constraint(n):
    deg, rank, ok = w_degree_constraint(build_glide_V(n))
    assert (deg, rank, ok) == (n, 2 * n, True)


def test_degree_constraint_fails_for_non_root():
    assert not w_degree_constraint(sa.identity(2))[2]


@pytest.mark.parametrize("n", range(1, 7))
def test_clifford_obstruction(n):
    res = clifford_obstruction(n)
    assert res.constructible == (n % 2 == 0)
    if res.constructible:
        assert all(v == 0.0 for v in res.residuals.values())
        assert res.A @ res.A == sa.u_x(1, n)
    else:
        assert "no integer solution" in res.witness


ONE, ZERO = sa.scalar(1.0), sa.zeros(1)
STEP = sa.scalar({(0, 0): 1.0, (-1, 0): -1.0})


@pytest.mark.parametrize(
    "a,b,mu",
    [(ONE, ZERO, 0), (-ONE, ZERO, 1), (-ONE, STEP, 1), (ONE, STEP, 0)],
)
def test_mu_closed_forms(a, b, mu):
    rep = mod2_mu(build_edge_symbol(a, b), 512)
    assert rep.mu == mu
    assert rep.winding_of_zeta == 0
    assert rep.equivariance_residual < 1e-12


def test_mu_for_constant_a_by_hand():
    # zeta = sign(a) constant: f = 0 for a > 0 and f = 1/2 for a < 0
    assert mod2_mu(build_edge_symbol(-ONE, ZERO)).f_integral == pytest.approx(math.pi)
    assert mod2_mu(build_edge_symbol(ONE, ZERO)).f_integral == pytest.approx(0.0)


@pytest.mark.parametrize("seed", range(20))
def test_relative_flip(seed):
    e = random_edge_symbol(np.random.default_rng(seed))
    assert (mod2_mu(e).mu + mod2_mu(e.negate_a()).mu) % 2 == 1


@pytest.mark.parametrize("samples", [256, 512, 2048])
def test_mu_is_sample_independent(samples):
    e = random_edge_symbol(np.random.default_rng(3))
    assert mod2_mu(e, samples).mu == mod2_mu(e, 4096).mu


def test_mu_rejects_bad_sample_counts():
    with pytest.raises(ValueError):
        mod2_mu(build_edge_symbol(ONE, ZERO), 100)


def test_mu_gapless_raises():
    # a = 1 - cos k and b = 1 - e^{-ik} both vanish at k = 0
    a = sa.scalar({(0, 0): 1.0, (1, 0): -0.5, (-1, 0): -0.5})
    with pytest.raises(GapClosedError):
        build_edge_symbol(a, STEP)
    e = EdgeSymbol(a, STEP)
    with pytest.raises(GapClosedError):
        mod2_mu(e, 512)
