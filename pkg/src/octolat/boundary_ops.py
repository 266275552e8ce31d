"""
Boundary and volume integral operators on lattice domains: the star-product
surface kernel, the Cauchy-Bitsadze and Teodorescu operators, the singular
operator S, the Plemelj projections P and Q, and regular extensions.

Everything is evaluated in lattice units.  With Kh(x, y) the surface kernel,
s n_l^{-/+} = -h^7 d_l^{-/+} for the integer chi-differences d, so

    C f(y) = 1/2 sum_{x in dB} sum_l [ d_l^-(x) E^1(y - (x - e_l))
                                     + d_l^+(x) E^1(y - (x + e_l)) ] (e_l f(x))

which does not depend on h, and T f(y) = h sum_{x in B} E^1(y - x) f(x).
Both are sums sum_z w_z E^1(y - z) v_z over weighted "sources" z.  Because
E^1(d) vanishes unless exactly one coordinate of d is odd, a target y only
sees sources whose parity class differs from its own in a single bit; the
sum is organised over those eight classes.
"""

from dataclasses import dataclass

import numpy as np

from .lattice import DIM, DomainError, Field, LatticeDomain, encode
from .octonion import basis, multiply
from .operators import LEFT_BASIS, LEFT_CONJ_BASIS, dirac

# L(conj e_m) L(e_l): the map f -> conj(e_m) (e_l f) of the star grouping
STAR_PAIRS = np.einsum("mij,ljk->mlik", LEFT_CONJ_BASIS, LEFT_BASIS)
_PARITY_BITS = 1 << np.arange(DIM, dtype=np.int64)
_BLOCK = 1 << 20


def parity_class(points):
    """Integer 0..255 whose bit l is the parity of coordinate l."""
    return (np.asarray(points, dtype=np.int64) & 1) @ _PARITY_BITS


@dataclass
class Sources:
    """Weighted point sources of a kernel sum sum_z w_z E^1(y - z) v_z.

    ``axis`` records the basis element e_l applied inside the star product,
    or -1 for plain products; it is needed only for the matrix form.
    """

    points: np.ndarray
    weights: np.ndarray
    vectors: np.ndarray
    axis: np.ndarray

    def __len__(self):
        return len(self.weights)


def check_reach(table, targets, sources):
    """Raise CoverageError unless every difference y - z lies in the table."""
    if len(targets) == 0 or len(sources) == 0:
        return
    lo = np.minimum(targets.min(axis=0) - sources.points.max(axis=0), 0)
    hi = np.maximum(targets.max(axis=0) - sources.points.min(axis=0), 0)
    table.check_coverage(np.stack([lo, hi]), "E^1")


def kernel_sum(table, targets, sources, *, matrix=False):
    """Evaluate sum_z w_z E^1(y - z) v_z at every target y.

    With ``matrix=True`` also returns A[y, m, l] = sum of w_z g over sources
    with axis l reached through conj(e_m), so that applying the same sources
    to a constant c gives sum_{m,l} A[y, m, l] conj(e_m)(e_l c).
    """
    targets = np.asarray(targets, dtype=np.int64).reshape(-1, DIM)
    check_reach(table, targets, sources)
    out = np.zeros((len(targets), 8))
    coef = np.zeros((len(targets), DIM, DIM)) if matrix else None
    if len(targets) == 0 or len(sources) == 0:
        return (out, coef) if matrix else out
    spar = parity_class(sources.points)
    order = np.argsort(spar, kind="stable")
    starts = np.searchsorted(spar[order], np.arange(257))
    weighted = sources.weights[:, None] * sources.vectors
    tpar = parity_class(targets)
    for p in np.unique(tpar):
        rows = np.nonzero(tpar == p)[0]
        for m in range(DIM):
            q = p ^ (1 << m)
            sel = order[starts[q] : starts[q + 1]]
            if len(sel) == 0:
                continue
            z = sources.points[sel]
            wv = weighted[sel]
            if matrix:
                hot = np.zeros((len(sel), DIM))
                has = sources.axis[sel] >= 0
                hot[np.nonzero(has)[0], sources.axis[sel][has]] = sources.weights[sel][has]
            step = max(1, _BLOCK // len(sel))
            for i in range(0, len(rows), step):
                r = rows[i : i + step]
                g = table.e1_axis(targets[r][:, None, :] - z[None, :, :], m)
                out[r] += (g @ wv) @ LEFT_CONJ_BASIS[m].T
                if matrix:
                    coef[r, m] += g @ hot
    return (out, coef) if matrix else out


def apply_coefficients(coef, values):
    """sum_{m,l} coef[y, m, l] conj(e_m)(e_l c_y) for per-target constants c_y."""
    mats = np.einsum("tml,mlij->tij", coef, STAR_PAIRS)
    return np.einsum("tij,tj->ti", mats, values)


# -- surface kernel -----------------------------------------------------------


def cauchy_sources(domain, values):
    """Sources of C f for boundary values ``values`` (rows of domain.boundary)."""
    geom = domain.geometry
    pts = geom.boundary.points
    zs, ws, vs, ax = [], [], [], []
    for l in range(DIM):
        star = values @ LEFT_BASIS[l].T
        for diffs, sign in ((geom.d_minus, -1), (geom.d_plus, 1)):
            hit = np.nonzero(diffs[:, l])[0]
            z = pts[hit].copy()
            z[:, l] += sign
            zs.append(z)
            ws.append(0.5 * diffs[hit, l])
            vs.append(star[hit])
            ax.append(np.full(len(hit), l))
    return Sources(np.concatenate(zs), np.concatenate(ws).astype(float), np.concatenate(vs), np.concatenate(ax))


def _boundary_values(f, domain):
    if isinstance(f, Field):
        return f.at_keys(domain.boundary.keys)
    vals = np.asarray(f, dtype=float)
    if vals.shape != (len(domain.boundary), 8):
        raise ValueError("boundary data must have one octonion per boundary point")
    return vals


def star_apply(table, domain, x, y, f):
    """K^h(x, y) * f, the star product with the grouping conj-kernel (e_l f).

    Includes the measure s(x), i.e. returns the summand of C f(y) at x.
    Zero when x is not a boundary point.
    """
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    geom = domain.geometry
    row = geom.boundary.index_of(x[None])[0]
    out = np.zeros(8)
    if row < 0:
        return out
    f = np.asarray(f, dtype=float)
    for l in range(DIM):
        inner = multiply(basis(l), f)
        for diffs, sign in ((geom.d_minus, -1), (geom.d_plus, 1)):
            d = diffs[row, l]
            if d:
                z = x.copy()
                z[l] += sign
                out += 0.5 * d * multiply(table.e1(y - z), inner)
    return out


def cauchy_bitsadze(table, domain, f, targets):
    """C^h f at the lattice points ``targets`` for data f on the boundary."""
    src = cauchy_sources(domain, _boundary_values(f, domain))
    return kernel_sum(table, targets, src)


def cauchy_of_constants(table, domain, targets):
    """Coefficients A with C(c)(y) = apply_coefficients(A, c) for constants c."""
    n = len(domain.boundary)
    src = cauchy_sources(domain, np.zeros((n, 8)))
    _, coef = kernel_sum(table, targets, src, matrix=True)
    return coef


def teodorescu(table, domain, f, targets):
    """T^h_B f(y) = sum_{x in B} E^h(y - x) f(x) h^8 at the lattice points ``targets``."""
    vals = f.at_keys(domain.keys) if isinstance(f, Field) else np.asarray(f, dtype=float)
    n = len(domain)
    src = Sources(domain.points, np.full(n, domain.h), vals, np.full(n, -1))
    return kernel_sum(table, targets, src)


# -- sample sets --------------------------------------------------------------


def exterior_shell(domain, width=2):
    """Lattice points within ``width`` axis steps of the closure, outside it."""
    closure = domain.closure
    return closure.dilated(width).difference(closure)


def _filtered(domain, keep):
    if keep is None or len(domain) == 0:
        return domain
    return LatticeDomain(domain.points[np.asarray(keep(domain.points), dtype=bool)], domain.h)


def sample_points(domain, count, seed, shell=2, keep=None):
    """Seeded sample of B-bar and an exterior shell, stratified by region.

    Strata (interior, inner boundary, outer boundary, exterior shell) take
    turns, so small strata such as a one-point interior are always drawn.
    ``keep(points) -> bool mask`` optionally restricts every stratum, e.g. to
    the support of sparse data.
    """
    rng = np.random.default_rng(seed)
    strata = [domain.interior, domain.inner_boundary, domain.outer_boundary, exterior_shell(domain, shell)]
    strata = [_filtered(s, keep) for s in strata]
    pools = [rng.permutation(len(s)) for s in strata]
    picks = [[] for _ in strata]
    taken = 0
    while taken < count and any(len(p) > len(k) for p, k in zip(pools, picks)):
        for i, (pool, chosen) in enumerate(zip(pools, picks)):
            if taken < count and len(pool) > len(chosen):
                chosen.append(pool[len(chosen)])
                taken += 1
    pts = [strata[i].points[np.array(picks[i], dtype=np.int64)] for i in range(len(strata)) if picks[i]]
    out = np.concatenate(pts) if pts else np.zeros((0, DIM), dtype=np.int64)
    return out[np.argsort(encode(out), kind="stable")]


def sample_boundary(domain, count, seed, keep=None):
    """Seeded sample of boundary points, alternating inner and outer layers."""
    rng = np.random.default_rng(seed)
    inner = _filtered(domain.inner_boundary, keep)
    outer = _filtered(domain.outer_boundary, keep)
    k_in = min(len(inner), (count + 1) // 2)
    k_out = min(len(outer), count - k_in)
    k_in = min(len(inner), count - k_out)
    return np.concatenate([
        inner.points[np.sort(rng.choice(len(inner), k_in, replace=False))],
        outer.points[np.sort(rng.choice(len(outer), k_out, replace=False))],
    ])


def support_of(evaluate):
    """Mask function selecting points where ``evaluate`` is nonzero."""
    return lambda points: np.any(evaluate(points) != 0, axis=1)


def kernel_support(pole):
    """Mask function of the support of E^1(. - pole): exactly one odd coordinate.

    Needs no kernel values, so it also works beyond a table's range.
    """
    pole = np.asarray(pole, dtype=np.int64)
    return lambda points: np.sum((np.asarray(points, dtype=np.int64) - pole) % 2, axis=1) == 1


# -- identities of the Cauchy machinery ---------------------------------------


def dirac_at(evaluate, points, h):
    """D^h of a function given as ``evaluate(points) -> (N, 8)`` at ``points``."""
    points = np.asarray(points, dtype=np.int64)
    out = np.zeros((len(points), 8))
    for l in range(DIM):
        step = np.zeros(DIM, dtype=np.int64)
        step[l] = 1
        diff = evaluate(points + step) - evaluate(points - step)
        out += diff @ LEFT_BASIS[l].T
    return out / (2 * h)


def pompeiu_terms(table, domain, f, targets):
    """(chi_B f, C f, T(D f)) at the targets for a field f on the closure.

    D f is taken on B, where it only reads values on the closure; outside
    the closure f counts as zero.
    """
    closure = domain.closure
    if isinstance(f, Field):
        f = f.restrict(closure)
    else:
        f = Field(closure, f)
    df = dirac(f, at=domain)
    chi_f = f.at(targets, zero_extend=True) * domain.contains(targets)[:, None]
    return chi_f, cauchy_bitsadze(table, domain, f, targets), teodorescu(table, domain, df, targets)


def pompeiu_residual(table, domain, f, targets):
    """max_y |chi_B f(y) - C f(y) - T(D f)(y)| over the targets."""
    chi_f, cf, tdf = pompeiu_terms(table, domain, f, targets)
    return float(np.linalg.norm(chi_f - cf - tdf, axis=1).max())


def _on_boundary(domain, targets):
    rows = domain.boundary.index_of(targets)
    if np.any(rows < 0):
        raise DomainError("the singular operator is only defined on the boundary")
    return rows


def singular_s(table, domain, f, targets=None, *, return_parts=False):
    """S f(y) = 2 C(f - f(y))(y) + f(y) at boundary targets (all of dB by default).

    By linearity C(f - f(y))(y) = C f(y) - C(f(y))(y), the second term
    from the constant-data coefficients.  With ``return_parts`` also returns
    C f and those coefficients (see :func:`apply_coefficients`).
    """
    values = _boundary_values(f, domain)
    if targets is None:
        targets = domain.boundary.points
    targets = np.asarray(targets, dtype=np.int64)
    here = values[_on_boundary(domain, targets)]
    src = cauchy_sources(domain, values)
    cf, coef = kernel_sum(table, targets, src, matrix=True)
    s = 2 * (cf - apply_coefficients(coef, here)) + here
    return (s, cf, coef) if return_parts else s


def plemelj(table, domain, f, which="P", targets=None):
    """P = (I + S)/2 or Q = (I - S)/2 applied to boundary data, at the targets."""
    values = _boundary_values(f, domain)
    if targets is None:
        targets = domain.boundary.points
    here = values[_on_boundary(domain, np.asarray(targets, dtype=np.int64))]
    s = singular_s(table, domain, values, targets)
    if which == "P":
        return 0.5 * (here + s)
    if which == "Q":
        return 0.5 * (here - s)
    raise ValueError("which must be 'P' or 'Q'")


def regular_extension(table, domain, f, side="interior", targets=None):
    """Regular extension of boundary data f into B or into the exterior.

    f is zero-extended from dB to the closure.  The interior extension is
    f - T(D f) on the closure, the exterior one T(D f); their boundary values
    are P f on the inner layer and Q f on the outer layer respectively.
    ``targets`` defaults to the closure (interior) or the outer boundary
    (exterior).
    """
    values = _boundary_values(f, domain)
    closure = domain.closure
    zero_ext = Field(domain.boundary, values).zero_extended(closure)
    df = dirac(zero_ext, at=domain)
    if side == "interior":
        default = closure
    elif side == "exterior":
        default = domain.outer_boundary
    else:
        raise ValueError("side must be 'interior' or 'exterior'")
    where = default if targets is None else LatticeDomain(targets, domain.h)
    tdf = teodorescu(table, domain, df, where.points)
    if side == "interior":
        return Field(where, zero_ext.at_keys(where.keys, zero_extend=True) - tdf)
    return Field(where, tdf)


def kernel_shift(table, a, h=1.0):
    """The field y -> E^h(y - a) as an evaluator on lattice points (a in lattice units)."""
    a = np.asarray(a, dtype=np.int64)

    def evaluate(points):
        return table.e1(np.asarray(points, dtype=np.int64) - a) / h**7

    return evaluate


def exterior_cauchy_residual(table, domain, a, targets):
    """max_y |-C f(y) - chi_{exterior}(y) f(y)| for f = E^h(. - a), a in the interior."""
    a = np.asarray(a, dtype=np.int64)
    if not domain.interior.contains(a[None])[0]:
        raise DomainError("the pole must lie in the discrete interior")
    f = kernel_shift(table, a, domain.h)
    cf = cauchy_bitsadze(table, domain, f(domain.boundary.points), targets)
    outside = ~domain.contains(targets)
    return float(np.linalg.norm(-cf - f(targets) * outside[:, None], axis=1).max())
