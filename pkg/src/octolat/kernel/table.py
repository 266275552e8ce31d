"""
Fundamental solutions of the discrete Laplacian and Dirac operator on Z^8.

F^1, the fundamental solution of Delta^1, is the torus integral

    F^1(x) = -(2 pi)^-8 int_{[-pi, pi]^8} e^{i u.x} / sum_l sin^2 u_l du.

Writing 1/s = int_0^inf e^{-st} dt and integrating each coordinate with
(1/2pi) int e^{-t sin^2 u} cos(n u) du = e^{-t/2} I_{n/2}(t/2) (n even, zero
for n odd) leaves a one-dimensional integral of a product of eight scaled
Bessel functions,

    F^1(x) = -int_0^inf prod_l e^{-t/2} I_{x_l/2}(t/2) dt,

which is evaluated by adaptive Gauss-Legendre panels on [0, T] plus the
leading asymptotic tail.  F^1 vanishes unless every coordinate is even and
is invariant under signed permutations, so it is tabulated once per sorted
tuple of absolute coordinates.  E^1 = conj(D^1) F^1 is derived on demand.
"""

import hashlib
import io
import itertools
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bessel import bessel_table
from .quadrature import adaptive_gauss_legendre

MAGIC = b"OCTK"
VERSION = 1
DEFAULT_TOL = 1e-10
# tail cut where the integrand bound (pi t)^-4 reaches 1e-16
TAIL_CUT = 1e4 / np.pi
_EDGES = np.concatenate([[0.0], 2.0 ** np.arange(-1, 12), [TAIL_CUT]])
_CHUNK = 256
_HEADER = struct.Struct("<4sIdII")
_RECORD = np.dtype([("coords", "<u2", (8,)), ("value", "<f8")])
_DENSE_LIMIT = 1 << 24


class CoverageError(ValueError):
    """A kernel value was requested outside the range of a KernelTable."""


def _f1_batch(halves, tol):
    # halves: (M, 8) Bessel orders x_l / 2
    halves = np.asarray(halves, dtype=np.int64)
    top = int(halves.max()) if halves.size else 0

    def integrand(t):
        tab = bessel_table(top, 0.5 * t)
        vals = tab[halves[:, 0]]
        for l in range(1, 8):
            vals = vals * tab[halves[:, l]]
        return vals

    body, _err = adaptive_gauss_legendre(integrand, _EDGES, rtol=tol)
    # prod_l (pi t)^-1/2 (1 - (4 m_l^2 - 1) / (4 t)) integrated over [T, inf)
    spread = np.sum(4.0 * halves**2 - 1.0, axis=1)
    T = TAIL_CUT
    tail = (1.0 / (3 * T**3) - spread / (16 * T**4)) / np.pi**4
    return -(body + tail)


def canonical_class(x):
    """Sorted absolute coordinates: the signed-permutation orbit label of x."""
    return np.sort(np.abs(np.asarray(x, dtype=np.int64)), axis=-1)


def f1_value(x, tol=DEFAULT_TOL):
    """F^1(x) for a single lattice point (0 whenever a coordinate is odd)."""
    x = np.asarray(x, dtype=np.int64)
    if np.any(x % 2):
        return 0.0
    cls = canonical_class(x)[None, :] // 2
    return float(_f1_batch(cls, tol)[0])


def even_classes(max_even):
    """All sorted 8-tuples over {0, 2, ..., max_even}, lexicographic order."""
    vals = range(0, max_even + 1, 2)
    return np.array(list(itertools.combinations_with_replacement(vals, 8)), dtype=np.int64).reshape(-1, 8)


def _max_even(rng):
    top = rng + 1
    return top - (top % 2)


@dataclass
class KernelTable:
    """Symmetry-reduced cache of F^1 values.

    Covers every lattice point with Chebyshev norm <= ``range + 1`` for F^1,
    hence every point with Chebyshev norm <= ``range`` for E^1.
    """

    range: int
    tol: float
    classes: np.ndarray
    values: np.ndarray
    _dense: np.ndarray = field(default=None, init=False, repr=False, compare=False)
    _codes: np.ndarray = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.classes = np.asarray(self.classes, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=float)
        self.max_even = _max_even(self.range)
        self.radix = self.max_even // 2 + 1

    def __len__(self):
        return len(self.values)

    @property
    def entries(self):
        return {tuple(c): v for c, v in zip(self.classes.tolist(), self.values.tolist())}

    # -- lookups ---------------------------------------------------------------

    def _class_codes(self, halves_sorted):
        powers = self.radix ** np.arange(7, -1, -1, dtype=np.int64)
        return halves_sorted @ powers

    def _ensure_index(self):
        if self._codes is not None:
            return
        self._codes = self._class_codes(self.classes // 2)
        if np.any(np.diff(self._codes) <= 0):
            raise ValueError("kernel table classes are not in canonical order")
        if self.radix**8 <= _DENSE_LIMIT:
            grid = np.indices((self.radix,) * 8).reshape(8, -1).T
            codes = self._class_codes(np.sort(grid, axis=1))
            self._dense = self.values[np.searchsorted(self._codes, codes)]

    def check_coverage(self, points, what="F^1"):
        pts = np.asarray(points, dtype=np.int64)
        limit = self.max_even if what == "F^1" else self.range
        if pts.size and np.abs(pts).max() > limit:
            raise CoverageError(
                f"{what} needed at Chebyshev radius {int(np.abs(pts).max())}, "
                f"table range {self.range} covers {limit}"
            )

    def f1_even(self, points):
        """F^1 at points whose coordinates are all even (no parity test)."""
        pts = np.asarray(points, dtype=np.int64)
        self.check_coverage(pts)
        self._ensure_index()
        halves = np.abs(pts) // 2
        if self._dense is not None:
            powers = self.radix ** np.arange(7, -1, -1, dtype=np.int64)
            return self._dense[halves @ powers]
        codes = self._class_codes(np.sort(halves, axis=-1))
        return self.values[np.searchsorted(self._codes, codes)]

    def f1(self, points):
        """F^1 at arbitrary lattice points, shape (..., 8) -> (...)."""
        pts = np.asarray(points, dtype=np.int64)
        odd = np.any(pts % 2 != 0, axis=-1)
        out = np.zeros(pts.shape[:-1])
        even = ~odd
        if np.any(even):
            out[even] = self.f1_even(pts[even])
        return out

    def e1_scalar(self, points):
        """E^1 in the form g * conj(e_m).

        Returns (g, m) with m = -1 (and g = 0) where E^1 vanishes, i.e. unless
        exactly one coordinate is odd.
        """
        pts = np.asarray(points, dtype=np.int64)
        self.check_coverage(pts, "E^1")
        odd = (pts % 2 != 0)
        single = odd.sum(axis=-1) == 1
        m = np.where(single, np.argmax(odd, axis=-1), -1)
        g = np.zeros(pts.shape[:-1])
        if np.any(single):
            sel = pts[single]
            ms = m[single]
            up = sel.copy()
            down = sel.copy()
            rows = np.arange(len(sel))
            up[rows, ms] += 1
            down[rows, ms] -= 1
            g[single] = 0.5 * (self.f1_even(up) - self.f1_even(down))
        return g, m

    def e1_axis(self, points, m):
        """Scalar g with E^1 = g conj(e_m), for points whose only odd coordinate is m.

        The parity is trusted, not checked; this is the hot path of the
        boundary sums.
        """
        pts = np.array(points, dtype=np.int64)
        pts[..., m] += 1
        up = self.f1_even(pts)
        pts[..., m] -= 2
        return 0.5 * (up - self.f1_even(pts))

    def e1(self, points):
        """E^1 = sum_l conj(e_l) (F^1(x + e_l) - F^1(x - e_l)) / 2 as octonions."""
        g, m = self.e1_scalar(points)
        out = np.zeros(np.shape(g) + (8,))
        hit = m >= 0
        signs = np.where(m[hit] == 0, 1.0, -1.0)
        out[hit, m[hit]] = signs * g[hit]
        return out

    def eh(self, x, h):
        """E^h(x) = h^-7 E^1(x / h) for physical points x on hZ^8."""
        n = np.asarray(x, dtype=float) / h
        rounded = np.rint(n)
        if np.any(np.abs(n - rounded) > 1e-9):
            raise ValueError("E^h is only defined on the lattice hZ^8")
        return self.e1(rounded.astype(np.int64)) / h**7

    # -- persistence -----------------------------------------------------------

    def to_bytes(self):
        rec = np.zeros(len(self.values), dtype=_RECORD)
        rec["coords"] = self.classes
        rec["value"] = self.values
        header = _HEADER.pack(MAGIC, VERSION, float(self.tol), int(self.range), len(self.values))
        return header + rec.tobytes()

    @classmethod
    def from_bytes(cls, data):
        if len(data) < _HEADER.size:
            raise ValueError("kernel file is truncated")
        magic, version, tol, rng, count = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise ValueError("not a kernel file (bad magic bytes)")
        if version != VERSION:
            raise ValueError(f"unsupported kernel file version {version}")
        body = data[_HEADER.size :]
        if len(body) != count * _RECORD.itemsize:
            raise ValueError("kernel file length does not match its class count")
        rec = np.frombuffer(body, dtype=_RECORD, count=count)
        table = cls(rng, tol, rec["coords"].astype(np.int64), rec["value"].copy())
        if len(table) != len(even_classes(table.max_even)):
            raise ValueError("kernel file does not list every canonical class of its range")
        return table

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())

    def sha256(self):
        return hashlib.sha256(self.to_bytes()).hexdigest()

    def to_csv(self):
        buf = io.StringIO()
        buf.write(",".join([f"x{i}" for i in range(8)] + ["f1"]) + "\n")
        for c, v in zip(self.classes.tolist(), self.values.tolist()):
            buf.write(",".join(map(str, c)) + f",{v!r}\n")
        return buf.getvalue()


def build_kernel_table(range_, tol=DEFAULT_TOL, workers=1):
    """Tabulate F^1 on every canonical class with even coordinates <= range_ + 1.

    Classes are integrated in fixed chunks, so the values do not depend on
    ``workers``.
    """
    if range_ < 1:
        raise ValueError("kernel table range must be >= 1")
    if not tol > 0:
        raise ValueError("quadrature tolerance must be positive")
    classes = even_classes(_max_even(range_))
    chunks = [classes[i : i + _CHUNK] // 2 for i in range(0, len(classes), _CHUNK)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _f1_batch(c, tol), chunks))
    else:
        parts = [_f1_batch(c, tol) for c in chunks]
    return KernelTable(int(range_), float(tol), classes, np.concatenate(parts))


