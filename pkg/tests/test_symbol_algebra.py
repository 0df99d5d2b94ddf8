import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pgtoeplitz import symbol_algebra as sa
from pgtoeplitz.symbol_algebra import LaurentMatrix, TorusPoint

from conftest import random_laurent

small_complex = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@st.composite
def laurent(draw, dim=2):
    keys = draw(st.lists(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), max_size=4, unique=True))
    terms = {}
    for k in keys:
        vals = draw(st.lists(small_complex, min_size=dim * dim, max_size=dim * dim))
        terms[k] = np.array(vals).reshape(dim, dim)
    return LaurentMatrix(dim, terms)


def _brute(L, kx, ky):
    # direct sum over coefficients, independent of the vectorised evaluator
    out = np.zeros((L.dim, L.dim), dtype=complex)
    for (m, n), c in L.coeffs.items():
        out += c * np.exp(1j * (m * kx + n * ky))
    return out


@given(laurent(), laurent(), laurent())
def test_ring_laws(A, B, C):
    assert (A + B) == (B + A)
    assert ((A @ B) @ C).allclose(A @ (B @ C), 1e-9)
    assert (A @ (B + C)).allclose(A @ B + A @ C, 1e-9)
    assert (A - A).is_zero()
    assert A @ sa.identity(2) == A


@given(laurent(), laurent(), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_evaluation_is_a_homomorphism(A, B, kx, ky):
    np.testing.assert_allclose((A @ B)(kx, ky), A(kx, ky) @ B(kx, ky), atol=1e-9)
    np.testing.assert_allclose(A(kx, ky), _brute(A, kx, ky), atol=1e-9)


@given(laurent(), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_adjoint_and_flip_pointwise(A, kx, ky):
    np.testing.assert_allclose(sa.adjoint(A)(kx, ky), A(kx, ky).conj().T, atol=1e-9)
    np.testing.assert_allclose(sa.flip_ky(A)(kx, ky), A(kx, -ky), atol=1e-9)


@given(laurent(), laurent())
def test_adjoint_reverses_products(A, B):
    assert sa.adjoint(A @ B).allclose(sa.adjoint(B) @ sa.adjoint(A), 1e-9)


@given(laurent())
def test_serialization_round_trip(A):
    assert LaurentMatrix.from_dict(A.to_dict()) == A


def test_from_dict_rejects_unknown_fields():
    with pytest.raises(ValueError):
        LaurentMatrix.from_dict({"dim": 1, "terms": [], "extra": 0})


def test_canonical_form_drops_tiny_coefficients():
    L = LaurentMatrix(1, {(0, 0): np.array([[1e-16]]), (1, 0): np.array([[2.0]])})
    assert L.support == [(1, 0)]
    assert L == sa.u_x() * 2.0


def test_coefficients_are_read_only():
    L = sa.u_x()
    with pytest.raises(ValueError):
        L.coeff(1, 0)[0, 0] = 5


@pytest.mark.parametrize("p,q", [(1, 1), (2, -3), (-1, 0)])
def test_monomials_multiply_by_adding_exponents(p, q):
    assert sa.u_x(p) @ sa.u_y(q) == sa.monomial(p, q)
    assert sa.u_x(p) @ sa.u_x(-p) == sa.identity(1)


def test_degrees_and_ranges(rng):
    L = sa.u_x(2) + sa.u_y(-3)
    assert (L.x_degree, L.y_degree, L.y_range) == (2, 3, (-3, 0))


def test_blocks_and_direct_sum():
    A, B = sa.u_x(), sa.u_y()
    S = sa.direct_sum(A, B)
    assert S.block(slice(0, 1), slice(0, 1)) == A
    assert S.block(slice(1, 2), slice(1, 2)) == B
    assert S.block(slice(0, 1), slice(1, 2)).is_zero()
    assert sa.from_blocks([[A, None], [None, B]]) == S


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError):
        sa.identity(1) + sa.identity(2)


def test_fourier_slices_reassemble(rng):
    L = random_laurent(rng)
    kx, ky = 0.7, -1.9
    total = sum(c * np.exp(1j * n * ky) for n, c in L.fourier_y(kx).items())
    np.testing.assert_allclose(total, L(kx, ky), atol=1e-12)
    total = sum(c * np.exp(1j * m * kx) for m, c in L.fourier_x(ky).items())
    np.testing.assert_allclose(total, L(kx, ky), atol=1e-12)


def test_broadcast_evaluation_shape(rng):
    L = random_laurent(rng, 3)
    kx, ky = sa.torus_grid(8)
    assert L(kx, ky).shape == kx.shape + (3, 3)


def test_swap_axes():
    assert sa.u_x().swap_axes() == sa.u_y()


@pytest.mark.parametrize(
    "L,unitary",
    [(sa.u_x(), True), (sa.identity(3), True), (sa.scalar({(0, 0): 1, (1, 0): 0.5}), False)],
)
def test_is_unitary(L, unitary):
    assert sa.is_unitary(L)[0] is unitary


def test_torus_point_reduces():
    p = TorusPoint(2 * math.pi + 0.5, -0.5)
    assert p.k_x == pytest.approx(0.5)
    assert p.k_y == pytest.approx(2 * math.pi - 0.5)
    np.testing.assert_allclose(sa.eval_symbol(sa.u_x(), p), [[np.exp(0.5j)]])
