import itertools

import numpy as np
import pytest

from octolat.octonion import (
    STRUCTURE,
    TRIPLES,
    associator,
    basis,
    basis_product,
    basis_sign,
    conjugate,
    index_sum,
    left_matrix,
    multiply,
    norm,
    right_matrix,
    sign_law,
)


def test_unit_and_squares():
    one = basis(0)
    for i in range(8):
        e = basis(i)
        assert np.array_equal(multiply(one, e), e)
        assert np.array_equal(multiply(e, one), e)
        if i:
            assert np.array_equal(multiply(e, e), -one)


@pytest.mark.parametrize("i,j,k", TRIPLES)
def test_cyclic_triples(i, j, k):
    for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
        assert basis_product(a, b) == (1, c)
        assert basis_product(b, a) == (-1, c)


def test_worked_products():
    assert basis_product(1, 6) == (-1, 7)
    assert basis_product(3, 5) == (-1, 6)


def test_index_sum_is_xor():
    for i, j in itertools.product(range(8), repeat=2):
        assert index_sum(i, j) == i ^ j


def test_structure_is_signed_permutation():
    assert np.all(np.abs(STRUCTURE).sum(axis=2) == 1)


def test_sign_law_on_all_triples():
    for t in itertools.product(range(8), repeat=3):
        assert basis_sign(*t) == sign_law(*t)


def test_basis_sign_rejects_bad_index():
    with pytest.raises(IndexError):
        basis_sign(0, 8, 1)


def test_associator_alternating():
    rng = np.random.default_rng(3)
    a, b, c = rng.normal(size=(3, 8))
    x = associator(a, b, c)
    assert np.linalg.norm(x) > 1e-3
    assert np.allclose(associator(b, a, c), -x)
    assert np.allclose(associator(a, c, b), -x)


def test_matrices_and_norm():
    rng = np.random.default_rng(4)
    a, b = rng.normal(size=(2, 8))
    assert np.allclose(left_matrix(a) @ b, multiply(a, b))
    assert np.allclose(right_matrix(b) @ a, multiply(a, b))
    assert np.isclose(norm(multiply(a, b)), norm(a) * norm(b))
    assert np.allclose(multiply(a, conjugate(a)), norm(a) ** 2 * basis(0))


def test_multiply_broadcasts():
    rng = np.random.default_rng(5)
    a = rng.normal(size=(4, 3, 8))
    b = rng.normal(size=(8,))
    out = multiply(a, b)
    assert out.shape == (4, 3, 8)
    assert np.allclose(out[2, 1], multiply(a[2, 1], b))
