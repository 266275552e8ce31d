"""
Verification suites for the algebra and the discrete calculus.

Each suite returns a list of CheckResult records (name, residual,
tolerance, pass flag) so the CLI and the tests share a single definition of
every identity and its budget.
"""

import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np

from .lattice import DIM, Field, LatticeDomain
from .octonion import (
    associator,
    basis,
    basis_sign,
    conjugate,
    multiply,
    norm,
    sign_law,
)
from .operators import DiffMode, conj_dirac, diff, dirac, laplacian, right_dirac


@dataclass
class CheckResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self):
        return bool(np.isfinite(self.residual) and self.residual <= self.tolerance)

    def as_dict(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _max(x):
    x = np.asarray(x, dtype=float)
    return float(np.abs(x).max()) if x.size else 0.0


# -- algebra ------------------------------------------------------------------


def sign_law_mismatches():
    """Basis triples (i, j, k) where the sign law disagrees with the table."""
    return [t for t in itertools.product(range(8), repeat=3) if basis_sign(*t) != sign_law(*t)]


def algebra_suite(seed=0, count=10_000, tol=1e-12):
    """Sign law on all 512 basis triples plus identities on random octonions.

    Coefficients are uniform on [-1, 1].
    """
    rng = np.random.default_rng(seed)
    a, b, c = rng.uniform(-1, 1, size=(3, count, 8))
    ab = multiply(a, b)
    aba = multiply(ab, a)
    results = [
        CheckResult("sign_law_mismatches", float(len(sign_law_mismatches())), 0.0),
        CheckResult("composition", _max(norm(ab) - norm(a) * norm(b)), tol),
        CheckResult("alternativity_left", _max(associator(a, a, b)), tol),
        CheckResult("alternativity_right", _max(associator(b, a, a)), tol),
        CheckResult("flexibility", _max(associator(a, b, a)), tol),
        CheckResult("moufang_left", _max(multiply(aba, c) - multiply(a, multiply(b, multiply(a, c)))), tol),
        CheckResult("moufang_right", _max(multiply(c, aba) - multiply(multiply(multiply(c, a), b), a)), tol),
        CheckResult(
            "moufang_middle",
            _max(multiply(multiply(a, multiply(b, c)), a) - multiply(ab, multiply(c, a))),
            tol,
        ),
        CheckResult("conjugate_involution", _max(conjugate(conjugate(a)) - a), 0.0),
        CheckResult(
            "conjugate_norm",
            _max(multiply(a, conjugate(a)) - (norm(a) ** 2)[:, None] * basis(0)),
            tol,
        ),
    ]
    f = c[:64]
    anti, sym = 0.0, 0.0
    for l, t in itertools.product(range(8), repeat=2):
        el, et = basis(l), basis(t)
        anti = max(anti, _max(associator(conjugate(el), et, f) + associator(conjugate(et), el, f)))
        lhs = multiply(el, multiply(conjugate(et), f)) + multiply(et, multiply(conjugate(el), f))
        sym = max(sym, _max(lhs - 2.0 * (l == t) * f))
    results.append(CheckResult("associator_antisymmetry", anti, tol))
    results.append(CheckResult("left_symmetrization", sym, tol))
    return results


# -- calculus -----------------------------------------------------------------


def random_field(domain, rng):
    return Field(domain, rng.uniform(-1, 1, size=(len(domain), 8)))


def _unit(l, k=1):
    e = np.zeros(DIM, dtype=np.int64)
    e[l] = k
    return e


class _Grid:
    """Zero-extended point evaluation of fields on a fixed set of points."""

    def __init__(self, points, h):
        self.points = points
        self.h = h

    def val(self, f, offset=None):
        pts = self.points if offset is None else self.points + offset
        return f.at(pts, zero_extend=True)

    def fwd(self, f, l, shift=None):
        # forward difference of tau_shift f at the grid points
        base = np.zeros(DIM, dtype=np.int64) if shift is None else -np.asarray(shift)
        return (self.val(f, base + _unit(l)) - self.val(f, base)) / self.h

    def bwd(self, f, l, shift=None):
        base = np.zeros(DIM, dtype=np.int64) if shift is None else -np.asarray(shift)
        return (self.val(f, base) - self.val(f, base - _unit(l))) / self.h


def leibniz_residuals(f, g, points):
    """Max residual of each of the eight Leibniz identities over all axes.

    tau_y f(x) = f(x - y), so tau_{-h e_l} f(x) = f(x + h e_l).
    """
    grid = _Grid(points, f.h)
    out = {}
    for l in range(DIM):
        e = _unit(l)
        prod = lambda off: multiply(grid.val(f, off), grid.val(g, off))  # noqa: E731
        zero = np.zeros(DIM, dtype=np.int64)
        dplus_fg = (prod(e) - prod(zero)) / f.h
        dminus_fg = (prod(zero) - prod(-e)) / f.h
        F, G = grid.val(f), grid.val(g)
        dpf, dpg = grid.fwd(f, l), grid.fwd(g, l)
        dmf, dmg = grid.bwd(f, l), grid.bwd(g, l)
        f_up, g_up = grid.val(f, e), grid.val(g, e)  # tau_{-h e_l}
        f_dn, g_dn = grid.val(f, -e), grid.val(g, -e)  # tau_{h e_l}
        checks = {
            "leibniz_I_1": dplus_fg - (multiply(dpf, G) + multiply(f_up, dpg)),
            "leibniz_I_2": dplus_fg - (multiply(dpf, g_up) + multiply(F, dpg)),
            "leibniz_I_3": dminus_fg - (multiply(dmf, G) + multiply(f_dn, dmg)),
            "leibniz_I_4": dminus_fg - (multiply(dmf, g_dn) + multiply(F, dmg)),
            # Leibniz II: backward differences of tau_{-h e_l} and forward of tau_{h e_l}
            "leibniz_II_1": dplus_fg - (multiply(dpf, g_up) + multiply(F, grid.bwd(g, l, shift=-e))),
            "leibniz_II_2": dplus_fg - (multiply(grid.bwd(f, l, shift=-e), G) + multiply(f_up, dpg)),
            "leibniz_II_3": dminus_fg - (multiply(dmf, g_dn) + multiply(F, grid.fwd(g, l, shift=e))),
            "leibniz_II_4": dminus_fg - (multiply(grid.fwd(f, l, shift=e), G) + multiply(f_dn, dmg)),
            "shift_plus": dpf - grid.bwd(f, l, shift=-e),
            "shift_minus": dmf - grid.fwd(f, l, shift=e),
        }
        for k, v in checks.items():
            out[k] = max(out.get(k, 0.0), _max(v))
    return out


def gauss_residuals(domain):
    """Pointwise Gauss system on the boundary and its one-step neighbourhood."""
    geom = domain.geometry
    h = domain.h
    pts = domain.closure.dilated(1).points
    chi = domain.contains(pts).astype(float)
    n_plus = geom.normal_plus(pts)
    n_minus = geom.normal_minus(pts)
    s = geom.measure(pts)
    on_bd = domain.boundary.contains(pts).astype(float)
    gauss_plus = gauss_minus = 0.0
    for l in range(DIM):
        dplus = (domain.contains(pts + _unit(l)) - chi) / h
        dminus = (chi - domain.contains(pts - _unit(l))) / h
        gauss_plus = max(gauss_plus, _max(n_plus[:, l] * s + dplus * h**8))
        gauss_minus = max(gauss_minus, _max(n_minus[:, l] * s + dminus * h**8))
    squares = np.sum(n_plus**2 + n_minus**2, axis=1)
    return {
        "gauss_plus": gauss_plus,
        "gauss_minus": gauss_minus,
        "normal_squares": _max(squares - 4 * on_bd),
    }


def _gap(lhs_terms, rhs_terms):
    """|sum(lhs) - sum(rhs)| per component, as one exactly rounded sum.

    Integrals here are sums of ~10^4 terms of order one; ordinary summation
    leaves ~1e-12 of rounding that belongs to the reduction, not to the
    identity being tested.
    """
    terms = np.concatenate([lhs_terms.reshape(-1, 8), -rhs_terms.reshape(-1, 8)])
    return max(abs(math.fsum(terms[:, k])) for k in range(8))


def divergence_residuals(domain, f, g):
    """Divergence Principle, its octonionic corollaries and the four Stokes identities.

    f and g live on the closure and are zero-extended beyond it; volume
    integrals run over B.
    """
    geom = domain.geometry
    h = domain.h
    bd = geom.boundary.points
    grid = _Grid(domain.points, h)
    ds = geom.s[:, None]
    dv = h**8
    fb, gb = f.at(bd, zero_extend=True), g.at(bd, zero_extend=True)
    fgb = multiply(fb, gb)
    out = {"divergence": 0.0, "stokes_1": 0.0, "stokes_2": 0.0, "stokes_3": 0.0, "stokes_4": 0.0}
    for l in range(DIM):
        e = _unit(l)
        for n, vd in ((geom.n_plus, grid.bwd), (geom.n_minus, grid.fwd)):
            gap = _gap(fb * n[:, l : l + 1] * ds, vd(f, l) * dv)
            out["divergence"] = max(out["divergence"], gap)
        F, G = grid.val(f), grid.val(g)
        dmf, dmg, dpf, dpg = grid.bwd(f, l), grid.bwd(g, l), grid.fwd(f, l), grid.fwd(g, l)
        s_plus = fgb * geom.n_plus[:, l : l + 1] * ds
        s_minus = fgb * geom.n_minus[:, l : l + 1] * ds
        # tau_{h e_l} f(x) = f(x - h e_l), tau_{-h e_l} f(x) = f(x + h e_l)
        rhs = {
            "stokes_1": (s_plus, multiply(dmf, G) + multiply(grid.val(f, -e), dmg)),
            "stokes_2": (s_plus, multiply(dmf, grid.val(g, -e)) + multiply(F, dmg)),
            "stokes_3": (s_minus, multiply(dpf, G) + multiply(grid.val(f, e), dpg)),
            "stokes_4": (s_minus, multiply(dpf, grid.val(g, e)) + multiply(F, dpg)),
        }
        for k, (surface, volume) in rhs.items():
            out[k] = max(out[k], _gap(surface, volume * dv))
    closure_f = f.restrict(domain.closure)
    df = dirac(closure_f, at=domain).at_keys(domain.keys)
    fd = right_dirac(closure_f, at=domain).at_keys(domain.keys)
    out["normal_left"] = _gap(multiply(geom.n_oct, fb) * ds, df * dv)
    out["normal_right"] = _gap(multiply(fb, geom.n_oct) * ds, fd * dv)
    return out


def operator_residuals(f):
    """Delta = D conj(D), commuting central differences, central = mean of one-sided."""
    dom = f.domain
    inner = dom.discrete_interior().discrete_interior()
    lap = laplacian(f, at=inner)
    dd = dirac(conj_dirac(f, at=dom.discrete_interior()), at=inner)
    comm = 0.0
    central = 0.0
    inner1 = dom.discrete_interior()
    for l in range(DIM):
        c = diff(f, l, DiffMode.CENTRAL, at=inner1).values
        mean = 0.5 * (diff(f, l, DiffMode.FORWARD, at=inner1).values + diff(f, l, DiffMode.BACKWARD, at=inner1).values)
        central = max(central, _max(c - mean))
        for m in range(l):
            a = diff(diff(f, l, at=inner1), m, at=inner).values
            b = diff(diff(f, m, at=inner1), l, at=inner).values
            comm = max(comm, _max(a - b))
    return {"laplace_dirac": _max(lap.values - dd.values), "central_commute": comm, "central_mean": central}


def calculus_suite(domain=None, seed=0, tol=1e-12):
    """Leibniz rules, Gauss system, Divergence Principle and Stokes identities.

    Random fields are uniform on [-1, 1] over the closure of the domain
    (default: the side-3 box, h = 1) and zero beyond it.
    """
    if domain is None:
        domain = LatticeDomain.box(np.zeros(DIM, dtype=np.int64), 3)
    rng = np.random.default_rng(seed)
    closure = domain.closure
    f = random_field(closure, rng)
    g = random_field(closure, rng)
    results = []
    for k, v in leibniz_residuals(f, g, closure.dilated(1).points).items():
        results.append(CheckResult(k, v, tol))
    for k, v in gauss_residuals(domain).items():
        results.append(CheckResult(k, v, tol))
    for k, v in divergence_residuals(domain, f, g).items():
        results.append(CheckResult(k, v, tol))
    wide = random_field(LatticeDomain.ball(np.zeros(DIM), 3.2 * domain.h, domain.h), rng)
    for k, v in operator_residuals(wide).items():
        results.append(CheckResult(k, v, tol))
    return results


def summarize(results):
    return {"passed": all(r.passed for r in results), "checks": [r.as_dict() for r in results]}
