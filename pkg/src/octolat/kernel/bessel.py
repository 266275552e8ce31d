"""Exponentially scaled modified Bessel functions e^{-z} I_m(z) of integer order."""

import math

import numpy as np
from scipy import special


def scaled_bessel(m, z):
    """e^{-z} I_m(z), broadcasting over integer orders m and arguments z >= 0."""
    return special.ive(np.asarray(m, dtype=float), np.asarray(z, dtype=float))


def scaled_bessel_series(m, z, terms=80):
    """Power-series evaluation of e^{-z} I_m(z), accurate for small z.

    Independent of :func:`scaled_bessel`; used to cross-check it.
    """
    z = np.asarray(z, dtype=float)
    half = z / 2
    term = half**m / math.factorial(m)
    total = np.array(term, copy=True)
    for k in range(1, terms):
        term = term * half * half / (k * (k + m))
        total = total + term
    return total * np.exp(-z)


def bessel_table(max_order, z):
    """Rows m = 0..max_order of e^{-z} I_m(z) at the points z."""
    orders = np.arange(max_order + 1, dtype=float)[:, None]
    return special.ive(orders, np.asarray(z, dtype=float)[None, :])
