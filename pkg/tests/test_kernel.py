import numpy as np
import pytest

from octolat.kernel import (
    CoverageError,
    KernelTable,
    build_kernel_table,
    canonical_class,
    continuous_e,
    defining_identities,
    even_classes,
    f1_value,
    kernel_estimate_scan,
    srw_green_oracle,
    truncation_bias,
    weight_omega,
)
from octolat.kernel.bessel import bessel_table, scaled_bessel, scaled_bessel_series
from octolat.kernel.estimate import KERNEL_CONSTANT, scan_points
from octolat.kernel.quadrature import adaptive_gauss_legendre

E0 = np.eye(8, dtype=np.int64)[0]


def test_bessel_backends_agree():
    z = np.array([0.0, 0.1, 1.0, 3.0, 7.5])
    for m in range(6):
        assert np.allclose(scaled_bessel(m, z), scaled_bessel_series(m, z), rtol=1e-13, atol=1e-300)
    assert np.allclose(bessel_table(5, z)[3], scaled_bessel(3, z))


def test_quadrature_batch():
    edges = np.array([0.0, 1.0, 4.0])
    total, err = adaptive_gauss_legendre(lambda t: np.vstack([np.exp(-t), t**2]), edges)
    assert np.allclose(total, [1 - np.exp(-4), 64 / 3], rtol=1e-12)
    assert np.all(err >= 0)


def test_canonical_classes():
    assert canonical_class([-3, 0, 2, 1, 0, 0, 0, 0]).tolist() == [0, 0, 0, 0, 0, 1, 2, 3]
    assert len(even_classes(2)) == 9
    assert even_classes(4)[0].tolist() == [0] * 8


def test_exact_values(table5):
    assert abs(table5.f1(2 * E0[None])[0] - table5.f1(0 * E0[None])[0] - 0.25) < 1e-9
    assert np.allclose(table5.e1(E0[None])[0], np.eye(8)[0] / 8, atol=1e-9)
    assert table5.f1(E0[None])[0] == 0
    assert f1_value(E0) == 0.0
    assert np.isclose(f1_value(np.zeros(8)), table5.f1(np.zeros((1, 8), dtype=np.int64))[0], rtol=1e-12)


def test_symmetry(table5):
    x = np.array([[2, -4, 0, 0, 2, 0, 0, 0]])
    perm = np.array([[0, 0, 4, 2, 0, -2, 0, 0]])
    assert table5.f1(x)[0] == table5.f1(perm)[0]


def test_e1_variants(table5):
    pts = np.array([[1, 2, 0, -2, 0, 0, 4, 0], [0, 0, 3, 0, 0, 2, 0, 0]])
    g, m = table5.e1_scalar(pts)
    for k in range(2):
        assert np.isclose(table5.e1_axis(pts[k : k + 1], m[k])[0], g[k])
    # E^1 vanishes unless exactly one coordinate is odd
    assert np.all(table5.e1(np.array([[1, 1, 0, 0, 0, 0, 0, 0], [2] * 8])) == 0)


def test_scaling_law(table5):
    assert np.allclose(table5.eh(0.5 * E0[None], 0.5), 2**7 * table5.e1(E0[None]))
    with pytest.raises(ValueError):
        table5.eh(np.full((1, 8), 0.3), 0.5)


def test_coverage(table5):
    with pytest.raises(CoverageError):
        table5.f1(np.full((1, 8), 8))
    with pytest.raises(CoverageError):
        table5.e1(np.array([[7, 0, 0, 0, 0, 0, 0, 0]]))


def test_persistence(tmp_path, table5):
    path = tmp_path / "k.bin"
    table5.save(path)
    raw = path.read_bytes()
    assert raw[:4] == b"OCTK"
    assert len(raw) == 4 + 4 + 8 + 4 + 4 + len(table5) * (16 + 8)
    back = KernelTable.load(path)
    assert back.range == 5 and np.array_equal(back.values, table5.values)
    assert back.sha256() == table5.sha256()
    with pytest.raises(ValueError):
        KernelTable.from_bytes(b"XXXX" + raw[4:])
    with pytest.raises(ValueError):
        KernelTable.from_bytes(raw[:-3])
    assert table5.to_csv().splitlines()[0] == "x0,x1,x2,x3,x4,x5,x6,x7,f1"


def test_build_is_deterministic():
    a = build_kernel_table(4, workers=1)
    b = build_kernel_table(4, workers=3)
    assert a.to_bytes() == b.to_bytes()
    with pytest.raises(ValueError):
        build_kernel_table(0)


def test_defining_identities(table5):
    res = defining_identities(table5, samples=10, seed=3)
    assert max(res.values()) < 1e-8
    with pytest.raises(ValueError):
        defining_identities(build_kernel_table(2))


def test_continuous_kernel():
    assert np.allclose(continuous_e(E0.astype(float)), KERNEL_CONSTANT * np.eye(8)[0])
    assert np.isclose(np.linalg.norm(continuous_e(2.0 * E0)), np.linalg.norm(continuous_e(1.0 * E0)) / 2**7)
    with pytest.raises(ValueError):
        continuous_e(np.zeros(8))


def test_weight_omega():
    assert weight_omega(E0) == -(3**7)
    assert weight_omega(np.zeros(8, dtype=np.int64)) == 3**8


def test_estimate_scan(table5):
    scan = kernel_estimate_scan(table5, 3)
    assert len(scan.shells) == 3
    assert np.isfinite(scan.constant_omega) and np.isfinite(scan.constant_parity)
    assert scan.constant_parity < scan.constant_omega
    assert scan_points(1).shape == (8, 8)


def test_srw_oracle_small():
    a = srw_green_oracle(20_000, seed=5, steps=32, chunk=7_000)
    b = srw_green_oracle(20_000, seed=5, steps=32, chunk=7_000)
    assert a == b
    mean, err = a
    assert 1.0 <= mean < 1.2 and 0 < err < 0.01
    assert truncation_bias(128) < truncation_bias(32)
