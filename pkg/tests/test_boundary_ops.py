import numpy as np
import pytest

from octolat.boundary_ops import (
    apply_coefficients,
    cauchy_bitsadze,
    cauchy_of_constants,
    dirac_at,
    exterior_shell,
    exterior_cauchy_residual,
    kernel_shift,
    kernel_support,
    parity_class,
    plemelj,
    pompeiu_residual,
    regular_extension,
    sample_boundary,
    sample_points,
    singular_s,
    star_apply,
    teodorescu,
)
from octolat.lattice import DIM, DomainError, Field, LatticeDomain
from octolat.verify import random_quadratic

BOX2 = LatticeDomain.box(np.zeros(DIM, dtype=np.int64), 2)


@pytest.fixture(scope="module")
def data():
    rng = np.random.default_rng(11)
    return rng.normal(size=(len(BOX2.boundary), 8))


def test_parity_class():
    assert parity_class(np.array([[1, 0, 0, 0, 0, 0, 0, 1], [2] * 8])).tolist() == [129, 0]


def test_kernel_sum_matches_reference(table5, data):
    targets = sample_points(BOX2, 6, seed=2, shell=1)
    fast = cauchy_bitsadze(table5, BOX2, data, targets)
    bpts = BOX2.boundary.points
    for y, got in zip(targets, fast):
        ref = sum(star_apply(table5, BOX2, x, y, v) for x, v in zip(bpts, data))
        assert np.allclose(got, ref, atol=1e-14)


def test_constant_coefficients(table5):
    targets = BOX2.closure.points[::37]
    coef = cauchy_of_constants(table5, BOX2, targets)
    c = np.random.default_rng(0).normal(size=8)
    direct = cauchy_bitsadze(table5, BOX2, np.tile(c, (len(BOX2.boundary), 1)), targets)
    assert np.allclose(apply_coefficients(coef, np.tile(c, (len(targets), 1))), direct, atol=1e-14)


def test_cauchy_of_one_is_indicator(table5):
    targets = BOX2.closure.points
    ones = np.tile(np.eye(8)[0], (len(BOX2.boundary), 1))
    c1 = cauchy_bitsadze(table5, BOX2, ones, targets)
    assert np.allclose(c1, BOX2.contains(targets)[:, None] * np.eye(8)[0], atol=1e-12)


def test_teodorescu_brute_force(table5):
    f = Field(BOX2, np.random.default_rng(1).normal(size=(len(BOX2), 8)))
    y = np.array([[1, 0, 1, 0, 0, 1, 2, -1]])
    from octolat.octonion import multiply

    ref = sum(multiply(table5.e1(y - x[None])[0], v) for x, v in zip(BOX2.points, f.values))
    assert np.allclose(teodorescu(table5, BOX2, f, y)[0], ref)


def test_pompeiu_quadratic(table5):
    f = Field.from_function(BOX2.closure, random_quadratic(4))
    targets = sample_points(BOX2, 20, seed=0, shell=1)
    assert pompeiu_residual(table5, BOX2, f, targets) < 1e-12


def test_cauchy_integral_is_regular(table5, data):
    # D C f is a sum of deltas at the sources, which lie in the closure
    pts = exterior_shell(BOX2, 1).points[::7]
    cf = lambda p: cauchy_bitsadze(table5, BOX2, data, p)  # noqa: E731
    assert np.abs(dirac_at(cf, pts, 1.0)).max() < 1e-12


def test_plemelj_projections(table5, data):
    p = plemelj(table5, BOX2, data, "P")
    q = plemelj(table5, BOX2, data, "Q")
    assert np.allclose(p + q, data, atol=1e-14)
    assert np.allclose(plemelj(table5, BOX2, p, "P"), p, atol=1e-10)
    assert np.allclose(plemelj(table5, BOX2, p, "Q"), 0, atol=1e-10)
    with pytest.raises(ValueError):
        plemelj(table5, BOX2, data, "R")
    with pytest.raises(DomainError):
        singular_s(table5, BOX2, data, np.full((1, DIM), 9))


def test_regular_extension_boundary_values(table5, data):
    inner = regular_extension(table5, BOX2, data, "interior")
    p = plemelj(table5, BOX2, data, "P")
    rows = BOX2.boundary.index_of(BOX2.inner_boundary.points)
    assert np.allclose(inner.at(BOX2.inner_boundary.points), p[rows], atol=1e-12)
    with pytest.raises(ValueError):
        regular_extension(table5, BOX2, data, "sideways")


def test_exterior_cauchy_needs_interior_pole(table5):
    with pytest.raises(DomainError):
        exterior_cauchy_residual(table5, BOX2, np.zeros(DIM, dtype=np.int64), BOX2.points)


def test_kernel_shift_and_support(table5):
    a = np.array([-2, 0, 0, 0, 0, 0, 0, 0])
    f = kernel_shift(table5, a)
    pts = BOX2.closure.points
    mask = kernel_support(a)(pts)
    assert np.all(np.any(f(pts) != 0, axis=1) == mask)


def test_sampling_is_seeded_and_stratified():
    a = sample_points(BOX2, 12, seed=3)
    b = sample_points(BOX2, 12, seed=3)
    assert np.array_equal(a, b) and len(a) == 12
    bd = sample_boundary(BOX2, 9, seed=1)
    assert len(bd) == 9
    assert BOX2.inner_boundary.contains(bd).sum() == 5
