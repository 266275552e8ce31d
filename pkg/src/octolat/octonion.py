"""
Octonion composition algebra on arrays of shape (..., 8).

Octonions are plain float64 numpy arrays whose last axis holds the
coefficients over the standard basis e0 (= 1), e1, ..., e7.  All functions
broadcast over leading axes, so a field of N octonions is just an (N, 8)
array.

The multiplication table is generated once from the seven positive
structure triples

    123, 145, 176, 246, 257, 347, 365

and e_i e_j = -delta_ij + eps_ijk e_k for i, j >= 1.
"""

import numpy as np

TRIPLES = ((1, 2, 3), (1, 4, 5), (1, 7, 6), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 6, 5))


def _build_table():
    index = np.zeros((8, 8), dtype=np.int64)
    sign = np.zeros((8, 8), dtype=np.int64)
    for i in range(8):
        index[0, i] = index[i, 0] = i
        sign[0, i] = sign[i, 0] = 1
    for i in range(1, 8):
        index[i, i] = 0
        sign[i, i] = -1
    for a, b, c in TRIPLES:
        for i, j, k in ((a, b, c), (b, c, a), (c, a, b)):
            index[i, j], sign[i, j] = k, 1
            index[j, i], sign[j, i] = k, -1
    if np.any(sign == 0):
        raise RuntimeError("incomplete octonion table")
    return index, sign


#: PRODUCT_INDEX[i, j] = k and PRODUCT_SIGN[i, j] = s  <=>  e_i e_j = s e_k
PRODUCT_INDEX, PRODUCT_SIGN = _build_table()
PRODUCT_INDEX.setflags(write=False)
PRODUCT_SIGN.setflags(write=False)

# structure constants: (ab)_k = sum_ij a_i b_j STRUCTURE[i, j, k]
STRUCTURE = np.zeros((8, 8, 8))
for _i in range(8):
    for _j in range(8):
        STRUCTURE[_i, _j, PRODUCT_INDEX[_i, _j]] = PRODUCT_SIGN[_i, _j]
STRUCTURE.setflags(write=False)
_STRUCTURE_FLAT = STRUCTURE.reshape(64, 8)

_CONJ = np.array([1.0, -1, -1, -1, -1, -1, -1, -1])


def basis(i, dtype=float):
    """Return the basis octonion e_i."""
    if not 0 <= i < 8:
        raise IndexError(f"basis index {i} out of range 0..7")
    e = np.zeros(8, dtype=dtype)
    e[i] = 1
    return e


def index_sum(i, j):
    """Index composition i (+) j, i.e. the k with e_i e_j = +-e_k.

    For this labelling of the Fano plane it coincides with bitwise xor.
    """
    return int(PRODUCT_INDEX[i, j])


def multiply(a, b):
    """Octonion product ab, broadcasting over leading axes of shape (..., 8)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    outer = a[..., :, None] * b[..., None, :]
    return outer.reshape(outer.shape[:-2] + (64,)) @ _STRUCTURE_FLAT


def conjugate(a):
    return np.asarray(a, dtype=float) * _CONJ


def norm(a):
    return np.sqrt(np.sum(np.square(a), axis=-1))


def associator(a, b, c):
    """[a, b, c] = (ab)c - a(bc)."""
    return multiply(multiply(a, b), c) - multiply(a, multiply(b, c))


def left_matrix(a):
    """Real 8x8 matrix L with L @ x == multiply(a, x)."""
    return np.einsum("i,ijk->kj", np.asarray(a, dtype=float), STRUCTURE)


def right_matrix(b):
    """Real 8x8 matrix R with R @ x == multiply(x, b)."""
    return np.einsum("j,ijk->ki", np.asarray(b, dtype=float), STRUCTURE)


def basis_product(i, j):
    """Integer product of basis elements as (sign, k)."""
    return int(PRODUCT_SIGN[i, j]), int(PRODUCT_INDEX[i, j])


def _triple_product(i, j, k, left_first):
    # exact integer evaluation of (e_i e_j) e_k or e_i (e_j e_k)
    if left_first:
        s1, m = basis_product(i, j)
        s2, r = basis_product(m, k)
    else:
        s1, m = basis_product(j, k)
        s2, r = basis_product(i, m)
    return s1 * s2, r


def basis_sign(i, j, k):
    """Return +1 if (e_i e_j) e_k == e_i (e_j e_k), else -1.

    Computed in integer arithmetic from the product table.
    """
    for n in (i, j, k):
        if not 0 <= n < 8:
            raise IndexError(f"basis index {n} out of range 0..7")
    sl, rl = _triple_product(i, j, k, True)
    sr, rr = _triple_product(i, j, k, False)
    if rl != rr:
        raise RuntimeError("basis products disagree on the result index")
    return 1 if sl == sr else -1


def sign_law(i, j, k):
    """Predicted associativity sign for basis triples.

    +1 when k is 0, i, j or i (+) j, -1 otherwise.  Triples with i = 0,
    j = 0 or i = j always associate (unit element and alternativity), so the
    prediction is +1 there as well.
    """
    if i == 0 or j == 0 or i == j:
        return 1
    return 1 if k in (0, i, j, index_sum(i, j)) else -1
