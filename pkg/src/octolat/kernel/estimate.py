"""Continuous Cauchy kernel, the lattice weight omega, and empirical checks of
the discrete kernel against both."""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ..octonion import basis, conjugate, left_matrix

# 1 / omega_7 with omega_7 = 2 pi^4 / Gamma(4) the area of the unit 7-sphere
KERNEL_CONSTANT = 3.0 / np.pi**4
# cell volume of the even sublattice 2Z^8 that carries F^1
PARITY_WEIGHT = 256.0

_LEFT = np.stack([left_matrix(basis(l)) for l in range(8)])


def continuous_e(x):
    """E(x) = (3 / pi^4) conj(x) / |x|^8, broadcasting over (..., 8)."""
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1, keepdims=True)
    if np.any(r2 == 0):
        raise ValueError("the continuous kernel is singular at x = 0")
    return KERNEL_CONSTANT * conjugate(x) / r2**4


def weight_omega(n):
    """omega(n) = prod_l (1 + 2 cos(pi n_l)) = 3^#even * (-1)^#odd."""
    n = np.asarray(n, dtype=np.int64)
    odd = np.sum(n % 2 != 0, axis=-1)
    return 3.0 ** (n.shape[-1] - odd) * np.where(odd % 2, -1.0, 1.0)


def parity_weighted_e(n):
    """Sublattice approximant of E^1: 256 E_m(n) conj-basis part on points with
    exactly one odd coordinate m, zero elsewhere."""
    n = np.asarray(n, dtype=np.int64)
    odd = n % 2 != 0
    single = odd.sum(axis=-1) == 1
    out = np.zeros(n.shape[:-1] + (8,))
    if np.any(single):
        e = continuous_e(n[single])
        keep = odd[single]
        out[single] = PARITY_WEIGHT * np.where(keep, e, 0.0)
    return out


def scan_points(radius):
    """One representative (sorted, nonnegative) of every signed-permutation
    orbit with 0 < |x|_inf <= radius.

    |E^1(x) - w(x) E(x)| is constant on these orbits for both weights used
    here, so scanning representatives is exhaustive.
    """
    pts = np.array(list(itertools.combinations_with_replacement(range(radius + 1), 8)), dtype=np.int64)
    return pts[pts.max(axis=1) > 0]


@dataclass
class EstimateScan:
    """Result of :func:`kernel_estimate_scan`."""

    radius: int
    constant_omega: float
    constant_parity: float
    shells: list = field(default_factory=list)

    def as_dict(self):
        return {
            "radius": self.radius,
            "constant_omega": self.constant_omega,
            "constant_parity": self.constant_parity,
            "shells": self.shells,
        }


def kernel_estimate_scan(table, radius):
    """Empirical constants for |E^1(x) - w(x) E(x)| (|x|^8 + 1) over 0 < |x|_inf <= radius.

    Two weights are scanned: ``omega`` and the parity weight of
    :func:`parity_weighted_e`.  Each shell entry carries the per-shell maxima
    and the shell's contribution to sum |E^1|^2 over its full orbits.
    """
    table.check_coverage(np.full((1, 8), radius), "E^1")
    pts = scan_points(radius)
    e1 = table.e1(pts)
    cont = continuous_e(pts)
    r8 = np.sum(pts.astype(float) ** 2, axis=1) ** 4
    dev_omega = np.linalg.norm(e1 - weight_omega(pts)[:, None] * cont, axis=1) * (r8 + 1)
    dev_parity = np.linalg.norm(e1 - parity_weighted_e(pts), axis=1) * (r8 + 1)
    if not (np.all(np.isfinite(dev_omega)) and np.all(np.isfinite(dev_parity))):
        raise FloatingPointError("kernel estimate scan produced a non-finite value")
    orbit = np.array([_orbit_size(p) for p in pts], dtype=float)
    sq = np.sum(e1**2, axis=1) * orbit
    shell = pts.max(axis=1)
    shells = []
    for r in range(1, radius + 1):
        sel = shell == r
        shells.append({
            "shell": r,
            "max_omega": float(dev_omega[sel].max()),
            "max_parity": float(dev_parity[sel].max()),
            "l2_increment": float(sq[sel].sum()),
        })
    return EstimateScan(radius, float(dev_omega.max()), float(dev_parity.max()), shells)


def _orbit_size(p):
    # number of signed-permutation images of a sorted nonnegative point
    _, counts = np.unique(p, return_counts=True)
    size = math.factorial(8)
    for c in counts:
        size //= math.factorial(int(c))
    return size * 2 ** int(np.count_nonzero(p))


def _laplacian_f1(table, x):
    # Delta^1 F^1(x) = 1/4 sum_l (F(x + 2e_l) + F(x - 2e_l) - 2F(x))
    x = np.asarray(x, dtype=np.int64)
    centre = table.f1(x)
    out = np.zeros(len(x))
    for l in range(8):
        step = np.zeros(8, dtype=np.int64)
        step[l] = 2
        out += table.f1(x + step) + table.f1(x - step) - 2 * centre
    return out / 4


def _dirac_e1(table, x):
    # D^1 E^1(x) = sum_l e_l (E^1(x + e_l) - E^1(x - e_l)) / 2
    x = np.asarray(x, dtype=np.int64)
    out = np.zeros((len(x), 8))
    for l in range(8):
        step = np.zeros(8, dtype=np.int64)
        step[l] = 1
        diff = table.e1(x + step) - table.e1(x - step)
        out += diff @ _LEFT[l].T / 2
    return out


def defining_identities(table, samples=10, seed=0):
    """Residuals of the identities that define F^1 and E^1.

    Sample points are drawn with ``seed``: nonzero even points for the
    Laplacian identity, and nonzero points with zero or two odd coordinates
    for the Dirac identity (elsewhere every E^1 in the stencil vanishes
    identically).  All stencil values lie inside the table.

    Returns a dict of maximal absolute residuals.
    """
    rng = np.random.default_rng(seed)
    even_reach = (table.max_even - 2) // 2
    if even_reach < 1 or table.range < 4:
        raise ValueError("kernel table range too small for the identity checks")
    even = _nonzero_draw(rng, even_reach, samples) * 2
    anywhere = _nonzero_draw(rng, (table.range - 2) // 2, samples) * 2
    # flip parity of two distinct coordinates on every other sample
    pairs = np.argsort(rng.random((samples, 8)), axis=1)[:, :2]
    flip = np.arange(samples) % 2 == 1
    rows = np.nonzero(flip)[0]
    anywhere[rows, pairs[flip, 0]] += 1
    anywhere[rows, pairs[flip, 1]] += 1
    origin = np.zeros((1, 8), dtype=np.int64)
    e0 = np.zeros(8)
    e0[0] = 1.0
    shift = np.zeros((1, 8), dtype=np.int64)
    shift[0, 0] = 2
    return {
        "laplace_origin": float(abs(_laplacian_f1(table, origin)[0] - 1.0)),
        "laplace_off_origin": float(np.abs(_laplacian_f1(table, even)).max()),
        "dirac_origin": float(np.linalg.norm(_dirac_e1(table, origin)[0] - e0)),
        "dirac_off_origin": float(np.linalg.norm(_dirac_e1(table, anywhere), axis=1).max()),
        "step_relation": float(abs(table.f1(shift)[0] - table.f1(origin)[0] - 0.25)),
    }


def _nonzero_draw(rng, reach, count):
    out = np.empty((0, 8), dtype=np.int64)
    while len(out) < count:
        draw = rng.integers(-reach, reach + 1, size=(count, 8))
        out = np.concatenate([out, draw[np.any(draw != 0, axis=1)]])
    return out[:count]
