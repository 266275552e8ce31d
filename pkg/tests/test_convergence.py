import numpy as np
import pytest

from octolat.convergence import (
    ContinuousDomain,
    ConvergenceReport,
    ConvergenceRow,
    common_samples,
    constant_function,
    dirac_of_continuous,
    discretize,
    domain_metrics,
    kernel_shift_function,
    nonregular_function,
    required_range,
    scaling_error,
    vol_excess,
)
from octolat.kernel import build_kernel_table
from octolat.lattice import DIM


def test_ball_geometry():
    ball = ContinuousDomain.ball(2.0)
    x = np.array([[1.0] + [0] * 7, [3.0] + [0] * 7])
    assert ball.contains(x).tolist() == [True, False]
    assert np.allclose(ball.distance_to_boundary(x), [1, 1])
    assert np.allclose(ball.distance_to_closure(x), [0, 1])
    surf = ball.surface_samples(100, seed=0)
    assert len(surf) == 128
    assert np.allclose(np.linalg.norm(surf, axis=1), 2)
    vol = ball.volume_samples(64, seed=1)
    assert np.all(np.linalg.norm(vol, axis=1) <= 2 + 1e-12)


def test_box_geometry():
    box = ContinuousDomain.box(np.zeros(DIM), 1.0)
    assert len(box.lattice_points(1.0)) == 2**8
    assert len(box.lattice_points(0.5)) == 3**8
    x = np.array([[0.5] * 8, [2.0] + [0.5] * 7])
    assert np.allclose(box.distance_to_boundary(x), [0.5, 1.0])
    surf = box.surface_samples(64, seed=0)
    assert np.all(box.distance_to_boundary(surf) < 1e-12)
    with pytest.raises(ValueError):
        ContinuousDomain("torus")


def test_small_balls():
    bh = discretize(ContinuousDomain.ball(1.5), 1.0)
    assert bh.points.tolist() == [[0] * 8]
    # the origin sits on the inner boundary of B^h, at distance 1.5 from the sphere
    assert np.isclose(domain_metrics(ContinuousDomain.ball(1.5), bh, 64)[1], 1.5)
    empty = discretize(ContinuousDomain.ball(0.5), 1.0)
    assert len(empty) == 0
    with pytest.raises(ValueError):
        domain_metrics(ContinuousDomain.ball(0.5), empty)


def test_vol_excess_inside_ball():
    ball = ContinuousDomain.ball(2.2)
    assert vol_excess(ball, discretize(ball, 0.5)) == 0


def test_test_functions():
    pts = np.array([[1.0, 2, 0, 0, 0, 0, 0, 0]])
    assert np.allclose(constant_function(np.eye(8)[2])(pts), np.eye(8)[2])
    assert np.allclose(nonregular_function()(pts)[0, 1], 1.0)
    # D of x0 e1 is e1 exactly for central differences
    assert np.allclose(dirac_of_continuous(nonregular_function(), pts, 0.5), np.eye(8)[1])
    f = kernel_shift_function(np.array([5.0] + [0] * 7))
    assert np.linalg.norm(dirac_of_continuous(f, pts, 0.5)) < 1e-3


def test_common_samples_lie_on_every_grid():
    ball = ContinuousDomain.ball(2.2)
    pts = common_samples(ball, [1.0, 0.5], 20, seed=4)
    assert len(pts) == 17
    for h in (1.0, 0.5):
        bh = discretize(ball, h)
        assert np.all(bh.contains(np.rint(pts / h).astype(np.int64)))


def test_report_csv():
    rows = [ConvergenceRow(1.0, 1, 2, 3, 4, 0, 0.5, 2.0), ConvergenceRow(0.5, 1, 2, 3, 4, 0, 0.25, 0.5)]
    report = ConvergenceReport(rows)
    lines = report.to_csv().splitlines()
    assert lines[0] == "h,metric1,metric2,metric3,metric4,vol_excess,sup_error,dhf_max"
    assert report.ratios("sup_error") == [0.5]


def test_constant_is_reproduced():
    ball = ContinuousDomain.ball(2.2)
    tables = {}

    def table_for(r):
        return tables.setdefault(r, build_kernel_table(r))

    report = scaling_error(table_for, constant_function(np.eye(8)[0]), ball, [1.0], samples=5, surface_samples=64)
    assert report.rows[0].sup_error < 1e-12
    bh = discretize(ball, 1.0)
    assert max(tables) >= required_range(bh, np.zeros((1, DIM), dtype=np.int64))
