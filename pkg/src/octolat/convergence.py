"""
Scaling limits: discretize continuous domains, measure how the discrete
domains approach them, and compare a continuous regular function with the
discrete Cauchy integrals of its boundary values.
"""

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import norm as normal_dist
from scipy.stats import qmc

from .boundary_ops import cauchy_bitsadze, cauchy_sources
from .kernel.estimate import continuous_e
from .lattice import DIM, LatticeDomain, ball_points
from .operators import LEFT_BASIS

DEFAULT_SURFACE_SAMPLES = 10_000


def _sobol(dim, count, seed):
    # Sobol balance needs a power of two, so round the count up
    m = max(0, int(np.ceil(np.log2(max(count, 1)))))
    return qmc.Sobol(dim, scramble=True, seed=seed).random_base2(m)


@dataclass(frozen=True)
class ContinuousDomain:
    """A ball (center, radius) or an axis-aligned box (corner, side) in R^8."""

    shape: str
    center: tuple = (0.0,) * DIM
    radius: float = 1.0
    corner: tuple = (0.0,) * DIM
    side: float = 1.0

    @classmethod
    def ball(cls, radius, center=None):
        c = tuple(float(v) for v in (np.zeros(DIM) if center is None else center))
        return cls("ball", center=c, radius=float(radius))

    @classmethod
    def box(cls, corner, side):
        c = tuple(float(v) for v in np.broadcast_to(corner, (DIM,)))
        return cls("box", corner=c, side=float(side))

    def __post_init__(self):
        if self.shape not in ("ball", "box"):
            raise ValueError(f"unknown continuous shape {self.shape!r}")

    def contains(self, x):
        """Closed-set membership of physical points (..., 8)."""
        x = np.asarray(x, dtype=float)
        if self.shape == "ball":
            return np.sum((x - np.array(self.center)) ** 2, axis=-1) <= self.radius**2
        lo = np.array(self.corner)
        return np.all((x >= lo) & (x <= lo + self.side), axis=-1)

    def distance_to_boundary(self, x):
        """Exact Euclidean distance from physical points to the boundary surface."""
        x = np.asarray(x, dtype=float)
        if self.shape == "ball":
            return np.abs(np.linalg.norm(x - np.array(self.center), axis=-1) - self.radius)
        lo = np.array(self.corner)
        hi = lo + self.side
        outside = np.linalg.norm(np.maximum(np.maximum(lo - x, x - hi), 0.0), axis=-1)
        inside = np.min(np.minimum(x - lo, hi - x), axis=-1)
        return np.where(self.contains(x), inside, outside)

    def distance_to_closure(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(self.contains(x), 0.0, self.distance_to_boundary(x))

    def lattice_points(self, h):
        """Integer n with h n in the closed set."""
        if self.shape == "ball":
            return ball_points(np.array(self.center), self.radius, h)
        lo = np.ceil(np.array(self.corner) / h - 1e-12).astype(np.int64)
        hi = np.floor((np.array(self.corner) + self.side) / h + 1e-12).astype(np.int64)
        axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
        grid = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grid], axis=1)

    def surface_samples(self, count, seed):
        """Deterministic low-discrepancy points on the boundary surface.

        Scrambled Sobol points are mapped through the normal quantile and
        projected to the sphere (ball), or pushed onto a face chosen by the
        first coordinate (box).  ``count`` is rounded up to a power of two.
        """
        sob = _sobol(DIM, count, seed)
        count = len(sob)
        if self.shape == "ball":
            g = normal_dist.ppf(np.clip(sob, 1e-12, 1 - 1e-12))
            g /= np.linalg.norm(g, axis=1, keepdims=True)
            return np.array(self.center) + self.radius * g
        pts = np.array(self.corner) + self.side * sob
        face = np.minimum((sob[:, 0] * 2 * DIM).astype(int), 2 * DIM - 1)
        axis, top = face // 2, face % 2
        pts[np.arange(count), axis] = np.array(self.corner)[axis] + self.side * top
        return pts

    def volume_samples(self, count, seed):
        """Low-discrepancy points filling the closed set (count rounded up to a power of two)."""
        if self.shape == "box":
            return np.array(self.corner) + self.side * _sobol(DIM, count, seed)
        sob = _sobol(DIM + 1, count, seed)
        g = normal_dist.ppf(np.clip(sob[:, :DIM], 1e-12, 1 - 1e-12))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        # uniform in volume: r^8 is uniform on [0, radius^8]
        r = self.radius * sob[:, DIM] ** (1.0 / DIM)
        return np.array(self.center) + r[:, None] * g


def discretize(domain, h):
    """B^h: the discrete interior of the lattice points of hZ^8 inside B."""
    return LatticeDomain(domain.lattice_points(h), h).discrete_interior()


def vol_excess(domain, bh):
    """V^h(B^h minus B) = h^8 times the number of points of B^h outside B."""
    return float(np.count_nonzero(~domain.contains(bh.physical)) * bh.h**DIM)


def domain_metrics(domain, bh, samples=DEFAULT_SURFACE_SAMPLES, seed=0):
    """The four max-min distances between B and B^h.

    1. max over the surface of B of the distance to the boundary of B^h;
    2. max over the boundary of B^h of the distance to the surface of B;
    3. max over the closure of B of the distance to B^h;
    4. max over B^h of the distance to the closure of B.

    Maxima over continuous sets use ``samples`` Sobol points (rounded up to
    a power of two) on the surface for metrics 1 and 3, plus as many in the
    volume for metric 3; the others are exact.
    """
    if len(bh) == 0:
        raise ValueError("the discrete domain is empty")
    surf = domain.surface_samples(samples, seed)
    vol = domain.volume_samples(samples, seed + 1)
    bd_phys = bh.boundary.physical
    m1 = cKDTree(bd_phys).query(surf)[0].max()
    m2 = domain.distance_to_boundary(bd_phys).max()
    m3 = cKDTree(bh.physical).query(np.concatenate([surf, vol]))[0].max()
    m4 = domain.distance_to_closure(bh.physical).max()
    return float(m1), float(m2), float(m3), float(m4)


# -- test functions -----------------------------------------------------------


def constant_function(value):
    value = np.asarray(value, dtype=float)
    return lambda x: np.tile(value, (len(x), 1))


def kernel_shift_function(pole):
    """x -> E(x - a), the continuous Cauchy kernel centred at ``pole``."""
    pole = np.asarray(pole, dtype=float)
    return lambda x: continuous_e(np.asarray(x, dtype=float) - pole)


def nonregular_function():
    """x -> x_0 e_1, for which D f = e_0 e_1 = e_1 never vanishes."""

    def f(x):
        out = np.zeros((len(x), 8))
        out[:, 1] = np.asarray(x, dtype=float)[:, 0]
        return out

    return f


def build_f_h(table, f_cont, bh, targets):
    """f^h = C^h of f on the boundary of B^h, at lattice points ``targets``."""
    values = f_cont(bh.boundary.physical)
    return cauchy_bitsadze(table, bh, values, targets)


def required_range(bh, targets):
    """Table range needed for the Cauchy sum of B^h evaluated at ``targets``."""
    n = len(bh.boundary)
    src = cauchy_sources(bh, np.zeros((n, 8)))
    targets = np.asarray(targets, dtype=np.int64)
    span = np.maximum(targets.max(axis=0) - src.points.min(axis=0), src.points.max(axis=0) - targets.min(axis=0))
    return int(span.max())


def dirac_of_continuous(f_cont, points, h):
    """Central-difference D^h of a continuous function at physical points."""
    points = np.asarray(points, dtype=float)
    out = np.zeros((len(points), 8))
    for l in range(DIM):
        step = np.zeros(DIM)
        step[l] = h
        out += (f_cont(points + step) - f_cont(points - step)) @ LEFT_BASIS[l].T
    return out / (2 * h)


@dataclass
class ConvergenceRow:
    h: float
    metric1: float
    metric2: float
    metric3: float
    metric4: float
    vol_excess: float
    sup_error: float
    dhf_max: float
    points: int = field(default=0)
    samples: int = field(default=0)


@dataclass
class ConvergenceReport:
    rows: list

    CSV_COLUMNS = ("h", "metric1", "metric2", "metric3", "metric4", "vol_excess", "sup_error", "dhf_max")

    def to_csv(self):
        lines = [",".join(self.CSV_COLUMNS)]
        for r in self.rows:
            d = asdict(r)
            lines.append(",".join(repr(float(d[c])) for c in self.CSV_COLUMNS))
        return "\n".join(lines) + "\n"

    def ratios(self, column):
        """Successive ratios value(h_{k+1}) / value(h_k)."""
        vals = [getattr(r, column) for r in self.rows]
        return [b / a if a else float("inf") for a, b in zip(vals, vals[1:])]

    def as_dict(self):
        return {"rows": [asdict(r) for r in self.rows]}


def common_samples(domain, hs, count, seed):
    """Seeded physical points lying in B^h for every h in ``hs``.

    Candidates come from the coarsest grid, whose points belong to every
    finer dyadic grid, so all mesh widths are compared at the same places.
    """
    coarse = max(hs)
    candidates = discretize(domain, coarse).physical
    for h in hs:
        bh = discretize(domain, h)
        keep = bh.contains(np.rint(candidates / h).astype(np.int64))
        candidates = candidates[keep]
    rng = np.random.default_rng(seed)
    pick = np.sort(rng.choice(len(candidates), min(count, len(candidates)), replace=False))
    return candidates[pick]


def scaling_error(table_for, f_cont, domain, hs, samples=20, seed=0, surface_samples=DEFAULT_SURFACE_SAMPLES):
    """Compare f with its discrete approximants f^h over a sequence of mesh widths.

    ``table_for(range_)`` must return a KernelTable covering ``range_``.
    The sup-error and the diagnostic max |D^h f| are taken over one seeded
    set of physical points common to every B^h; the four domain metrics use
    the full discrete domains.
    """
    hs = [float(h) for h in hs]
    pts = common_samples(domain, hs, samples, seed)
    if len(pts) == 0:
        raise ValueError("no sample points are shared by all discrete domains")
    rows = []
    for h in hs:
        bh = discretize(domain, h)
        targets = np.rint(pts / h).astype(np.int64)
        table = table_for(required_range(bh, targets))
        approx = build_f_h(table, f_cont, bh, targets)
        err = np.linalg.norm(f_cont(pts) - approx, axis=1).max()
        dhf = np.linalg.norm(dirac_of_continuous(f_cont, pts, h), axis=1).max()
        metrics = domain_metrics(domain, bh, surface_samples, seed)
        rows.append(ConvergenceRow(h, *metrics, vol_excess(domain, bh), float(err), float(dhf), len(bh), len(pts)))
    return ConvergenceReport(rows)
