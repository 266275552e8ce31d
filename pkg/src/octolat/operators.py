"""
Difference operators on lattice fields: translation, forward / backward /
central differences, the discrete Dirac (Cauchy-Fueter) operator, its
conjugate and the discrete Laplacian.

Every operator returns a new Field.  By default it lives on the largest set
where all shifted values it reads are defined; pass ``at=`` to evaluate on a
chosen domain instead and ``zero_extend=True`` to read zeros off the field's
domain.  Zero extension is never applied silently.
"""

from enum import Enum

import numpy as np

from .lattice import AXIS_STEP, DIM, Field, LatticeDomain, shift_keys
from .octonion import basis, conjugate, left_matrix, right_matrix

# (e_l v) = v @ LEFT_BASIS[l].T, likewise for the conjugate basis
LEFT_BASIS = np.stack([left_matrix(basis(l)) for l in range(DIM)])
LEFT_CONJ_BASIS = np.stack([left_matrix(conjugate(basis(l))) for l in range(DIM)])


class DiffMode(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    CENTRAL = "central"


def translate(f, y):
    """(tau_y f)(x) = f(x - y); the domain moves by +y (lattice units)."""
    y = np.asarray(y, dtype=np.int64)
    return Field(f.domain.shifted(y), f.values.copy())


def _valid(f, offsets, zero_extend):
    # largest domain on which every f(x + o) is available (or any, if zero-extending)
    keys = f.domain.keys
    cand = np.unique(np.concatenate([shift_keys(keys, -np.asarray(o)) for o in offsets]))
    if not zero_extend:
        ok = np.ones(len(cand), dtype=bool)
        for o in offsets:
            ok &= f.domain.contains_keys(shift_keys(cand, o))
        cand = cand[ok]
    return LatticeDomain.from_keys(cand, f.h)


def _shifted_values(f, keys, offset, zero_extend):
    return f.at_keys(shift_keys(keys, offset), zero_extend)


def _e(l, k=1):
    e = np.zeros(DIM, dtype=np.int64)
    e[l] = k
    return e


def diff(f, l, mode=DiffMode.CENTRAL, *, at=None, zero_extend=False):
    """Difference of f along axis l with mesh width f.h."""
    mode = DiffMode(mode)
    offsets = {
        DiffMode.FORWARD: [_e(l), _e(l, 0)],
        DiffMode.BACKWARD: [_e(l, 0), _e(l, -1)],
        DiffMode.CENTRAL: [_e(l), _e(l, -1)],
    }[mode]
    dom = at if at is not None else _valid(f, offsets, zero_extend)
    up = _shifted_values(f, dom.keys, offsets[0], zero_extend)
    down = _shifted_values(f, dom.keys, offsets[1], zero_extend)
    scale = 2 * f.h if mode is DiffMode.CENTRAL else f.h
    return Field(dom, (up - down) / scale)


def _dirac_like(f, mats, at, zero_extend):
    offsets = [_e(l, s) for l in range(DIM) for s in (1, -1)]
    dom = at if at is not None else _valid(f, offsets, zero_extend)
    out = np.zeros((len(dom), 8))
    for l in range(DIM):
        up = f.at_keys(dom.keys + AXIS_STEP[l], zero_extend)
        down = f.at_keys(dom.keys - AXIS_STEP[l], zero_extend)
        out += (up - down) @ mats[l].T
    return Field(dom, out / (2 * f.h))


def dirac(f, *, at=None, zero_extend=False):
    """D^h f = sum_l e_l (d_l^h f), basis element multiplied from the left."""
    return _dirac_like(f, LEFT_BASIS, at, zero_extend)


def conj_dirac(f, *, at=None, zero_extend=False):
    """Conjugate operator sum_l conj(e_l) (d_l^h f)."""
    return _dirac_like(f, LEFT_CONJ_BASIS, at, zero_extend)


def right_dirac(f, *, at=None, zero_extend=False):
    """f D^h = sum_l (d_l^h f) e_l."""
    mats = np.stack([right_matrix(basis(l)) for l in range(DIM)])
    return _dirac_like(f, mats, at, zero_extend)


def laplacian(f, *, at=None, zero_extend=False):
    """Delta^h f = sum_l d_l^h d_l^h f (central differences twice)."""
    offsets = [_e(l, s) for l in range(DIM) for s in (2, -2)]
    dom = at if at is not None else _valid(f, offsets + [_e(0, 0)], zero_extend)
    center = f.at_keys(dom.keys, zero_extend)
    out = np.zeros((len(dom), 8))
    for l in range(DIM):
        two = AXIS_STEP[l] * np.uint64(2)
        out += f.at_keys(dom.keys + two, zero_extend) + f.at_keys(dom.keys - two, zero_extend) - 2 * center
    return Field(dom, out / (4 * f.h**2))
