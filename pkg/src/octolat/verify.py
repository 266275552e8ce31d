"""
Verification suites for the kernel table and the boundary operators.

Every suite returns (results, info): a list of CheckResult records judged
against their tolerances and a dict of diagnostics (sample counts, pole
positions, shell widths) that makes the report self-describing.
"""

import numpy as np

from .boundary_ops import (
    apply_coefficients,
    cauchy_bitsadze,
    cauchy_sources,
    dirac_at,
    exterior_cauchy_residual,
    exterior_shell,
    kernel_shift,
    plemelj,
    pompeiu_residual,
    regular_extension,
    sample_boundary,
    sample_points,
    singular_s,
    kernel_support,
    teodorescu,
)
from .checks import CheckResult
from .kernel.estimate import defining_identities, kernel_estimate_scan
from .lattice import DIM, Field

POMPEIU_TOL = 1e-6
REGULARITY_TOL = 1e-8
BRANCH_TOL = 1e-10
PROJECTION_TOL = 1e-8
EXTENSION_TOL = 1e-6
IDENTITY_TOL = 1e-8
STEP_TOL = 1e-9
# P f + Q f = f holds up to the rounding of two halvings
ROUNDING_TOL = 1e-14


def kernel_suite(table, samples=10, seed=0):
    """Defining identities of F^1 and E^1 plus the |x|_inf <= 5 estimate scan."""
    res = defining_identities(table, samples, seed)
    tol = {"step_relation": STEP_TOL}
    results = [CheckResult(k, v, tol.get(k, IDENTITY_TOL)) for k, v in res.items()]
    info = {"range": table.range, "tol": table.tol, "classes": len(table)}
    radius = min(5, table.range)
    scan = kernel_estimate_scan(table, radius)
    info["estimate_scan"] = scan.as_dict()
    return results, info


# -- geometry helpers ---------------------------------------------------------


def _source_box(domain):
    src = cauchy_sources(domain, np.zeros((len(domain.boundary), 8)))
    return src.points.min(axis=0), src.points.max(axis=0)


def shell_width(table, domain, margin=0, limit=2):
    """Widest exterior shell (<= limit) whose points, widened by ``margin``
    steps, stay inside the table's reach from every Cauchy source."""
    lo, hi = _source_box(domain)
    cl = domain.closure.points
    for w in range(limit, -1, -1):
        span = np.maximum(cl.max(axis=0) + w + margin - lo, hi - (cl.min(axis=0) - w - margin))
        if span.max() <= table.range:
            return w
    return -1


def interior_pole(domain):
    """The point of the discrete interior closest to the centroid of B."""
    pts = domain.interior.points
    if len(pts) == 0:
        raise ValueError("the domain has an empty discrete interior")
    centre = domain.points.mean(axis=0)
    return pts[np.argmin(np.sum((pts - centre) ** 2, axis=1))]


def exterior_pole(table, domain, distance=2):
    """A point on the -e_0 side of the closure, ``distance`` steps out if the
    table reaches that far from the closure, otherwise closer."""
    cl = domain.closure.points
    centre = np.rint(domain.points.mean(axis=0)).astype(np.int64)
    base = centre.copy()
    base[0] = cl[:, 0].min()
    for d in range(distance, 0, -1):
        a = base.copy()
        a[0] -= d
        reach = np.abs(cl - a).max()
        if reach <= table.range and not domain.closure.contains(a[None])[0]:
            return a
    raise ValueError("kernel table too small to place a pole outside the closure")


def random_quadratic(seed):
    """Octonion polynomial c + L x + x^T Q x with coefficients uniform on [-1, 1]."""
    rng = np.random.default_rng(seed)
    c = rng.uniform(-1, 1, 8)
    lin = rng.uniform(-1, 1, (8, DIM))
    quad = rng.uniform(-1, 1, (8, DIM, DIM))

    def f(x):
        x = np.asarray(x, dtype=float)
        return c + x @ lin.T + np.einsum("ni,kij,nj->nk", x, quad, x)

    return f


def _or(*masks):
    return lambda p: np.logical_or.reduce([m(p) for m in masks])


# -- suites -------------------------------------------------------------------


def within_reach(table, points, lo, hi, margin=0):
    """Mask of points whose ``margin``-neighbourhood stays in the table's
    reach from every source inside the box [lo, hi]."""
    points = np.asarray(points, dtype=np.int64)
    span = np.maximum(points - lo, hi - points).max(axis=1) + margin
    return span <= table.range


def pompeiu_suite(table, domain, samples=25, seed=0):
    """Cauchy-Pompeiu for constants, a random quadratic and a shifted kernel,
    plus regularity of C f and the Teodorescu right-inverse property."""
    rng = np.random.default_rng(seed)
    closure = domain.closure
    w = shell_width(table, domain)
    if w < 0:
        raise ValueError("kernel table does not cover the closure of the domain")
    ys = sample_points(domain, samples, seed, shell=w)
    const = Field.constant(closure, rng.uniform(-1, 1, 8))
    quad = Field.from_function(closure, random_quadratic(seed + 1))
    a = exterior_pole(table, domain)
    shift = kernel_shift(table, a, domain.h)
    kern = Field(closure, shift(closure.points))
    ys_kern = sample_points(domain, samples, seed, shell=w, keep=_or(domain.contains, kernel_support(a)))
    results = [
        CheckResult("pompeiu_constant", pompeiu_residual(table, domain, const, ys), POMPEIU_TOL),
        CheckResult("pompeiu_quadratic", pompeiu_residual(table, domain, quad, ys), POMPEIU_TOL),
        CheckResult("pompeiu_kernel_shift", pompeiu_residual(table, domain, kern, ys_kern), POMPEIU_TOL),
    ]
    # D(C f) on the interior and at covered exterior points off the closure
    data = rng.uniform(-1, 1, (len(domain.boundary), 8))
    lo, hi = _source_box(domain)
    ext = exterior_shell(domain, 2).points
    ext = ext[within_reach(table, ext, lo, hi, margin=1)]
    ext = ext[np.sort(rng.choice(len(ext), min(samples, len(ext)), replace=False))]
    regular_at = np.concatenate([domain.interior.points, ext])
    dcf = dirac_at(lambda p: cauchy_bitsadze(table, domain, data, p), regular_at, domain.h)
    results.append(CheckResult("cauchy_regularity", float(np.abs(dcf).max()), REGULARITY_TOL))
    # D(T f) = chi_B f at the sample points the table covers
    vol = Field(domain, rng.uniform(-1, 1, (len(domain), 8)))
    ys_t = ys[within_reach(table, ys, domain.points.min(axis=0), domain.points.max(axis=0), margin=1)]
    dt = dirac_at(lambda p: teodorescu(table, domain, vol, p), ys_t, domain.h)
    results.append(CheckResult(
        "teodorescu_right_inverse", float(np.abs(dt - vol.at(ys_t, zero_extend=True)).max()), REGULARITY_TOL
    ))
    info = {
        "samples": int(len(ys)),
        "kernel_shift_samples": int(len(ys_kern)),
        "shell_width": int(w),
        "exterior_pole": a.tolist(),
        "regularity_points": int(len(regular_at)),
        "exterior_regularity_points": int(len(ext)),
        "teodorescu_points": int(len(ys_t)),
    }
    return results, info


def plemelj_suite(table, domain, samples=25, seed=0):
    """Sokhotski-Plemelj branches on all of dB, C(1) = chi_B on dB, and the
    projection algebra at sampled boundary points."""
    rng = np.random.default_rng(seed)
    bd = domain.boundary
    data = rng.uniform(-1, 1, (len(bd), 8))
    s, cf, coef = singular_s(table, domain, data, return_parts=True)
    inner = domain.contains(bd.points)[:, None]
    branch = np.where(inner, cf - 0.5 * (data + s), cf - 0.5 * (-data + s))
    p_full = 0.5 * (data + s)
    q_full = 0.5 * (data - s)
    ys = sample_boundary(domain, samples, seed)
    rows = bd.index_of(ys)
    # C(e_0) from the constant-data coefficients of the same sweep
    one = np.zeros((len(bd), 8))
    one[:, 0] = 1.0
    c_one = apply_coefficients(coef, one)
    results = [
        CheckResult("plemelj_inner_branch", float(np.abs(branch[inner[:, 0]]).max()), BRANCH_TOL),
        CheckResult("plemelj_outer_branch", float(np.abs(branch[~inner[:, 0]]).max()), BRANCH_TOL),
        CheckResult("cauchy_of_one", float(np.abs(c_one - inner * one).max()), PROJECTION_TOL),
        CheckResult("p_plus_q", float(np.abs(p_full + q_full - data).max()), ROUNDING_TOL),
        CheckResult("pp_minus_p", _gap(plemelj(table, domain, p_full, "P", ys), p_full[rows]), PROJECTION_TOL),
        CheckResult("qq_minus_q", _gap(plemelj(table, domain, q_full, "Q", ys), q_full[rows]), PROJECTION_TOL),
        CheckResult("pq", _gap(plemelj(table, domain, q_full, "P", ys), 0.0), PROJECTION_TOL),
        CheckResult("qp", _gap(plemelj(table, domain, p_full, "Q", ys), 0.0), PROJECTION_TOL),
    ]
    info = {"boundary_points": int(len(bd)), "projection_samples": int(len(ys))}
    return results, info


def _gap(a, b):
    return float(np.abs(np.asarray(a) - b).max())


def extension_suite(table, domain, samples=25, seed=0):
    """Boundary-value characterisation by P and Q and the two regular extensions."""
    bd = domain.boundary
    a_out = exterior_pole(table, domain)
    a_in = interior_pole(domain)
    f_out = kernel_shift(table, a_out, domain.h)
    f_in = kernel_shift(table, a_in, domain.h)
    ys_out = sample_boundary(domain, samples, seed, keep=kernel_support(a_out))
    ys_in = sample_boundary(domain, samples, seed, keep=kernel_support(a_in))
    vals_out = f_out(bd.points)
    vals_in = f_in(bd.points)
    ones = np.zeros((len(bd), 8))
    ones[:, 0] = 1.0
    ys = sample_boundary(domain, samples, seed)
    results = [
        CheckResult("p_fixes_exterior_pole", _gap(plemelj(table, domain, vals_out, "P", ys_out), f_out(ys_out)), EXTENSION_TOL),
        CheckResult("q_fixes_interior_pole", _gap(plemelj(table, domain, vals_in, "Q", ys_in), f_in(ys_in)), EXTENSION_TOL),
        CheckResult("q_of_one", _gap(plemelj(table, domain, ones, "Q", ys), 0.0), EXTENSION_TOL),
    ]
    # regular extensions of random data: regularity inside, boundary values P f / Q f
    rng = np.random.default_rng(seed)
    data = rng.uniform(-1, 1, (len(bd), 8))
    inner_pts = domain.inner_boundary.points
    outer_pts = domain.outer_boundary.points
    k_in = inner_pts[np.sort(rng.choice(len(inner_pts), min(samples, len(inner_pts)), replace=False))]
    k_out = outer_pts[np.sort(rng.choice(len(outer_pts), min(samples, len(outer_pts)), replace=False))]
    interior_ext = regular_extension(table, domain, data, "interior")
    exterior_ext = regular_extension(table, domain, data, "exterior", targets=k_out)
    p_in = plemelj(table, domain, data, "P", k_in)
    q_out = plemelj(table, domain, data, "Q", k_out)
    results.append(CheckResult("interior_extension_values", _gap(interior_ext.at(k_in), p_in), EXTENSION_TOL))
    results.append(CheckResult("exterior_extension_values", _gap(exterior_ext.at(k_out), q_out), EXTENSION_TOL))
    if len(domain.interior):
        d_int = dirac_at(lambda p: interior_ext.at(p), domain.interior.points, domain.h)
        results.append(CheckResult("interior_extension_regular", float(np.abs(d_int).max()), REGULARITY_TOL))
    info = {
        "exterior_pole": a_out.tolist(),
        "interior_pole": a_in.tolist(),
        "samples": int(len(ys)),
        "exterior_pole_samples": int(len(ys_out)),
        "interior_pole_samples": int(len(ys_in)),
    }
    return results, info


def exterior_suite(table, domain, samples=25, seed=0):
    """Cauchy formula for functions regular outside B (pole in the interior)."""
    a = interior_pole(domain)
    shift = kernel_shift(table, a, domain.h)
    w = shell_width(table, domain)
    if w < 0:
        raise ValueError("kernel table does not cover the closure of the domain")
    ys = sample_points(domain, samples, seed, shell=w, keep=_or(domain.contains, kernel_support(a)))
    res = exterior_cauchy_residual(table, domain, a, ys)
    info = {"interior_pole": a.tolist(), "samples": int(len(ys)), "shell_width": int(w)}
    return [CheckResult("exterior_cauchy", res, EXTENSION_TOL)], info
