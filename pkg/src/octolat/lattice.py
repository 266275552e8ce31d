"""
Bounded point sets in the scaled lattice hZ^8, their two-layer boundaries,
discrete outward normals, boundary measure and lattice integrals.

Points are stored in lattice units (integer 8-vectors n, physical point h*n).
Internally every point is packed into a uint64 key, one byte per coordinate,
so a domain is a sorted key array and set algebra reduces to numpy set
routines.  A unit shift along axis l is a constant added to the key.
"""

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

DIM = 8
_OFFSET = 128
COORD_LIMIT = 127
# domains keep a margin so that a few unit shifts never overflow a key byte
DOMAIN_LIMIT = 100
AXIS_STEP = np.array([1 << (8 * l) for l in range(DIM)], dtype=np.uint64)
_SHIFTS = np.arange(0, 64, 8, dtype=np.uint64)


class DomainError(ValueError):
    pass


def encode(points):
    """Pack integer points of shape (N, 8) into sorted-comparable uint64 keys."""
    pts = np.asarray(points, dtype=np.int64).reshape(-1, DIM)
    if pts.size and np.abs(pts).max() > COORD_LIMIT:
        raise DomainError(f"lattice coordinates must lie in [-{COORD_LIMIT}, {COORD_LIMIT}]")
    biased = (pts + _OFFSET).astype(np.uint64)
    return np.bitwise_or.reduce(biased << _SHIFTS, axis=1) if len(pts) else np.zeros(0, np.uint64)


def decode(keys):
    keys = np.asarray(keys, dtype=np.uint64).reshape(-1)
    out = (keys[:, None] >> _SHIFTS) & np.uint64(0xFF)
    return out.astype(np.int64) - _OFFSET


def shift_keys(keys, offset):
    """Keys of the points n + offset (offset in lattice units)."""
    off = np.asarray(offset, dtype=np.int64)
    delta = int(np.sum(off * (1 << (8 * np.arange(DIM, dtype=np.int64)))))
    if delta >= 0:
        return keys + np.uint64(delta)
    return keys - np.uint64(-delta)


def unit(l, k=1):
    e = np.zeros(DIM, dtype=np.int64)
    e[l] = k
    return e


def neighborhood(x):
    """The 17-point neighbourhood {x, x +- e_l} of a lattice point."""
    x = np.asarray(x, dtype=np.int64)
    eye = np.eye(DIM, dtype=np.int64)
    return np.vstack([x[None, :], x + eye, x - eye])


def _member(sorted_keys, keys):
    if len(sorted_keys) == 0:
        return np.zeros(np.shape(keys), dtype=bool)
    idx = np.searchsorted(sorted_keys, keys)
    idx = np.minimum(idx, len(sorted_keys) - 1)
    return sorted_keys[idx] == keys


class LatticeDomain:
    """A finite set B of points of hZ^8.

    Parameters
    ----------
    points : array_like, shape (N, 8)
        Integer lattice coordinates; duplicates are dropped.
    h : float
        Mesh width.
    """

    def __init__(self, points=(), h=1.0, *, _keys=None):
        if h <= 0:
            raise DomainError("mesh width h must be positive")
        self.h = float(h)
        if _keys is None:
            pts = np.asarray(points, dtype=np.int64).reshape(-1, DIM)
            if pts.size and np.abs(pts).max() > DOMAIN_LIMIT:
                raise DomainError(f"domain coordinates must lie in [-{DOMAIN_LIMIT}, {DOMAIN_LIMIT}]")
            _keys = np.unique(encode(pts))
        self.keys = _keys
        self.keys.setflags(write=False)

    @classmethod
    def from_keys(cls, keys, h=1.0):
        return cls(h=h, _keys=np.unique(np.asarray(keys, dtype=np.uint64)))

    @classmethod
    def box(cls, corner, side, h=1.0):
        """The box {corner + k : 0 <= k_i < side}."""
        corner = np.broadcast_to(np.asarray(corner, dtype=np.int64), (DIM,))
        side = int(side)
        if side <= 0:
            return cls(h=h)
        grids = np.meshgrid(*[np.arange(side)] * DIM, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1) + corner
        return cls(pts, h)

    @classmethod
    def ball(cls, center, radius, h=1.0):
        """Lattice points x = h*n with |x - center| <= radius (physical units)."""
        center = np.broadcast_to(np.asarray(center, dtype=float), (DIM,))
        return cls(ball_points(center, radius, h), h)

    @classmethod
    def from_json(cls, desc):
        """Build a domain from a JSON description (dict, JSON string or path)."""
        if isinstance(desc, str):
            s = desc.lstrip()
            if s.startswith("{"):
                desc = json.loads(s)
            else:
                with open(desc, encoding="utf-8") as fh:
                    desc = json.load(fh)
        try:
            h = float(desc.get("h", 1.0))
            shape = desc["shape"]
            if shape == "box":
                return cls.box(desc.get("corner", [0] * DIM), desc["side"], h)
            if shape == "ball":
                return cls.ball(desc.get("center", [0.0] * DIM), desc["radius"], h)
            if shape == "explicit":
                pts = np.asarray(desc["points"], dtype=np.int64)
                if pts.size and (pts.ndim != 2 or pts.shape[1] != DIM):
                    raise DomainError("explicit points must be arrays of 8 integers")
                return cls(pts.reshape(-1, DIM), h)
        except KeyError as exc:
            raise DomainError(f"domain description is missing {exc}") from None
        raise DomainError(f"unknown domain shape {shape!r}")

    # -- set algebra ----------------------------------------------------------

    def __len__(self):
        return len(self.keys)

    def __iter__(self):
        return iter(map(tuple, self.points.tolist()))

    def __contains__(self, x):
        return bool(self.contains(np.asarray(x)[None, :])[0])

    def __eq__(self, other):
        if not isinstance(other, LatticeDomain):
            return NotImplemented
        return self.h == other.h and np.array_equal(self.keys, other.keys)

    __hash__ = None

    def __repr__(self):
        return f"LatticeDomain(n={len(self)}, h={self.h})"

    @cached_property
    def points(self):
        pts = decode(self.keys)
        pts.setflags(write=False)
        return pts

    @property
    def physical(self):
        return self.points * self.h

    def contains(self, points):
        """Indicator chi_B evaluated on an (N, 8) array of lattice points."""
        return _member(self.keys, encode(points))

    def contains_keys(self, keys):
        return _member(self.keys, keys)

    def index_of(self, points):
        """Row index of each point in self.points, -1 if absent."""
        return self.index_of_keys(encode(points))

    def index_of_keys(self, keys):
        keys = np.asarray(keys, dtype=np.uint64)
        if len(self.keys) == 0:
            return np.full(keys.shape, -1, dtype=np.int64)
        idx = np.minimum(np.searchsorted(self.keys, keys), len(self.keys) - 1)
        return np.where(self.keys[idx] == keys, idx, -1)

    def _same(self, keys):
        return LatticeDomain.from_keys(keys, self.h)

    def union(self, other):
        return self._same(np.union1d(self.keys, other.keys))

    def intersection(self, other):
        return self._same(np.intersect1d(self.keys, other.keys, assume_unique=True))

    def difference(self, other):
        return self._same(np.setdiff1d(self.keys, other.keys, assume_unique=True))

    def shifted(self, offset):
        return self._same(shift_keys(self.keys, offset))

    def dilated(self, steps=1):
        """Union with all axis neighbours, repeated `steps` times."""
        keys = self.keys
        for _ in range(steps):
            parts = [keys]
            for l in range(DIM):
                parts.append(keys + AXIS_STEP[l])
                parts.append(keys - AXIS_STEP[l])
            keys = np.unique(np.concatenate(parts))
        return self._same(keys)

    def discrete_interior(self):
        """Points whose whole 17-point neighbourhood lies in the set."""
        keep = np.ones(len(self.keys), dtype=bool)
        for l in range(DIM):
            keep &= self.contains_keys(self.keys + AXIS_STEP[l])
            keep &= self.contains_keys(self.keys - AXIS_STEP[l])
        return self._same(self.keys[keep])

    # -- boundary structure ---------------------------------------------------

    @cached_property
    def decomposition(self):
        return boundary_decompose(self)

    @property
    def boundary(self):
        return self.decomposition.boundary

    @property
    def inner_boundary(self):
        return self.decomposition.inner

    @property
    def outer_boundary(self):
        return self.decomposition.outer

    @property
    def interior(self):
        return self.decomposition.interior

    @property
    def closure(self):
        return self.decomposition.closure

    @cached_property
    def geometry(self):
        return boundary_geometry(self)


def ball_points(center, radius, h=1.0):
    """Enumerate integer n with |h n - center| <= radius, coordinate by coordinate."""
    r2 = float(radius) ** 2
    partial = np.zeros((1, 0), dtype=np.int64)
    used = np.zeros(1)
    for i in range(DIM):
        lo = int(np.ceil((center[i] - radius) / h))
        hi = int(np.floor((center[i] + radius) / h))
        vals = np.arange(lo, hi + 1, dtype=np.int64)
        cost = (vals * h - center[i]) ** 2
        tot = used[:, None] + cost[None, :]
        ok = tot <= r2 * (1 + 1e-14)
        rows, cols = np.nonzero(ok)
        partial = np.hstack([partial[rows], vals[cols][:, None]])
        used = tot[rows, cols]
    return partial


@dataclass(frozen=True)
class Decomposition:
    boundary: LatticeDomain
    inner: LatticeDomain
    outer: LatticeDomain
    interior: LatticeDomain
    closure: LatticeDomain


def boundary_decompose(domain):
    """Split a domain into its two-layer boundary, interior and closure.

    A point is on the boundary when its neighbourhood meets both B and the
    complement of B.  Every point outside B with a neighbour inside B is
    therefore an outer boundary point, and a point of B is an inner boundary
    point as soon as one axis neighbour is missing.
    """
    keys = domain.keys
    h = domain.h
    inner_mask = ~domain.discrete_interior().contains_keys(keys) if len(keys) else np.zeros(0, bool)
    inner = keys[inner_mask]
    shifted = [keys + AXIS_STEP[l] for l in range(DIM)] + [keys - AXIS_STEP[l] for l in range(DIM)]
    ring = np.unique(np.concatenate(shifted)) if len(keys) else np.zeros(0, np.uint64)
    outer = np.setdiff1d(ring, keys, assume_unique=True)
    mk = lambda k: LatticeDomain.from_keys(k, h)  # noqa: E731
    return Decomposition(
        boundary=mk(np.union1d(inner, outer)),
        inner=mk(inner),
        outer=mk(outer),
        interior=mk(keys[~inner_mask]),
        closure=mk(np.union1d(keys, outer)),
    )


@dataclass(frozen=True)
class BoundaryGeometry:
    """Discrete normals and boundary measure on the boundary of a domain.

    Rows follow ``domain.boundary.points``.  ``n_plus[:, l]`` and
    ``n_minus[:, l]`` are the components n_l^+ and n_l^-, ``s`` the measure
    weight and ``n_oct`` the octonionic normal sum_l (n_l^+ + n_l^-)/2 e_l.
    The integer chi-differences are kept for exact Gauss checks.
    """

    boundary: LatticeDomain
    h: float
    d_plus: np.ndarray
    d_minus: np.ndarray
    n_plus: np.ndarray
    n_minus: np.ndarray
    s: np.ndarray
    n_oct: np.ndarray = field(repr=False)

    def _rows(self, points):
        return self.boundary.index_of(points)

    def _extend(self, arr, points):
        rows = self._rows(points)
        out = np.zeros((len(rows),) + arr.shape[1:])
        hit = rows >= 0
        out[hit] = arr[rows[hit]]
        return out

    def normal_plus(self, points):
        """n^+ zero-extended to arbitrary lattice points."""
        return self._extend(self.n_plus, points)

    def normal_minus(self, points):
        return self._extend(self.n_minus, points)

    def measure(self, points):
        return self._extend(self.s, points)

    def octonion_normal(self, points):
        return self._extend(self.n_oct, points)


def chi_differences(domain, points):
    """Integer forward/backward differences of chi_B (without the 1/h)."""
    keys = encode(points)
    chi = domain.contains_keys(keys).astype(np.int64)
    d_plus = np.empty((len(keys), DIM), dtype=np.int64)
    d_minus = np.empty((len(keys), DIM), dtype=np.int64)
    for l in range(DIM):
        d_plus[:, l] = domain.contains_keys(keys + AXIS_STEP[l]) - chi
        d_minus[:, l] = chi - domain.contains_keys(keys - AXIS_STEP[l])
    return d_plus, d_minus


def boundary_geometry(domain):
    h = domain.h
    bd = domain.decomposition.boundary
    d_plus, d_minus = chi_differences(domain, bd.points)
    # sum_l (d+ chi)^2 + (d- chi)^2 with the 1/h of the differences factored out
    total = np.sum(d_plus**2 + d_minus**2, axis=1).astype(float)
    root = np.sqrt(total)
    with np.errstate(invalid="ignore", divide="ignore"):
        n_plus = np.where(root[:, None] > 0, -2.0 * d_plus / root[:, None], 0.0)
        n_minus = np.where(root[:, None] > 0, -2.0 * d_minus / root[:, None], 0.0)
    s = 0.5 * h**7 * root
    n_oct = 0.5 * (n_plus + n_minus)
    for arr in (d_plus, d_minus, n_plus, n_minus, s, n_oct):
        arr.setflags(write=False)
    return BoundaryGeometry(bd, h, d_plus, d_minus, n_plus, n_minus, s, n_oct)


class Field:
    """Octonion-valued function on a lattice domain (an element of M(B, O)).

    ``values[i]`` is the value at ``domain.points[i]``.  Lookups outside the
    domain raise unless ``zero_extend=True`` is passed explicitly.
    """

    def __init__(self, domain, values):
        values = np.asarray(values, dtype=float)
        if values.shape != (len(domain), 8):
            raise ValueError(f"values must have shape ({len(domain)}, 8), got {values.shape}")
        self.domain = domain
        self.values = values

    @classmethod
    def from_function(cls, domain, func):
        """Sample ``func(physical_points) -> (N, 8)`` on the domain."""
        return cls(domain, np.asarray(func(domain.physical), dtype=float).reshape(len(domain), 8))

    @classmethod
    def constant(cls, domain, c):
        return cls(domain, np.tile(np.asarray(c, dtype=float), (len(domain), 1)))

    @property
    def h(self):
        return self.domain.h

    def __repr__(self):
        return f"Field(n={len(self.domain)}, h={self.h})"

    def at_keys(self, keys, zero_extend=False):
        rows = self.domain.index_of_keys(keys)
        missing = rows < 0
        if missing.any() and not zero_extend:
            bad = decode(np.asarray(keys).reshape(-1)[missing.reshape(-1)][:1])[0]
            raise DomainError(f"field is undefined at lattice point {tuple(bad.tolist())}")
        out = np.zeros(np.shape(keys) + (8,))
        out[~missing] = self.values[rows[~missing]]
        return out

    def at(self, points, zero_extend=False):
        return self.at_keys(encode(points), zero_extend)

    def restrict(self, domain):
        return Field(domain, self.at_keys(domain.keys))

    def zero_extended(self, domain):
        """The zero extension of this field, viewed on a (larger) domain."""
        return Field(domain, self.at_keys(domain.keys, zero_extend=True))

    def _binary(self, other, op):
        if isinstance(other, Field):
            if other.domain != self.domain:
                other = other.restrict(self.domain)
            return Field(self.domain, op(self.values, other.values))
        return Field(self.domain, op(self.values, np.asarray(other, dtype=float)))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __neg__(self):
        return Field(self.domain, -self.values)

    def scale(self, c):
        return Field(self.domain, self.values * c)

    def product(self, other):
        """Pointwise octonion product (self * other)."""
        from .octonion import multiply

        other = other.restrict(self.domain)
        return Field(self.domain, multiply(self.values, other.values))


def volume_integral(f, domain):
    """sum_{x in B} f(x) h^8."""
    vals = f.at_keys(domain.keys)
    return np.sum(vals, axis=0) * domain.h**8


def surface_integral(f, domain):
    """sum_{x in dB} f(x) s(x) with the discrete boundary measure s."""
    geom = domain.geometry
    vals = f.at_keys(geom.boundary.keys)
    return np.sum(vals * geom.s[:, None], axis=0)


def surface_measure(domain):
    return float(np.sum(domain.geometry.s))
