import numpy as np
import pytest

from octolat.verify import exterior_pole, interior_pole, kernel_suite, pompeiu_suite, random_quadratic, shell_width
from octolat.kernel import build_kernel_table


def test_geometry_helpers(table5, table7, box3):
    assert shell_width(table7, box3) == 2
    assert shell_width(table5, box3) == 1
    assert interior_pole(box3).tolist() == [1] * 8
    a5 = exterior_pole(table5, box3)
    assert a5.tolist() == [-2] + [1] * 7
    assert not box3.closure.contains(exterior_pole(table7, box3)[None])[0]
    with pytest.raises(ValueError):
        exterior_pole(build_kernel_table(2), box3)


def test_random_quadratic_is_seeded():
    x = np.random.default_rng(0).normal(size=(3, 8))
    assert np.array_equal(random_quadratic(5)(x), random_quadratic(5)(x))


def test_kernel_suite_reports_scan(table5):
    results, info = kernel_suite(table5, samples=4, seed=1)
    assert all(r.passed for r in results)
    assert info["estimate_scan"]["radius"] == 5


def test_pompeiu_suite(table5, box3):
    results, info = pompeiu_suite(table5, box3, samples=10, seed=2)
    assert all(r.passed for r in results), [r.as_dict() for r in results if not r.passed]
