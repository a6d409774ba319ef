import math

import numpy as np
import pytest

from nlspectral import fields as fl
from nlspectral import normalize
from nlspectral.symbols import Orientation, build_table, lattice_modes


def test_forward_transform_cosine():
    g = fl.grid_points(32, 2)
    field, mean = fl.forward_transform(np.cos(g[0]), 4)
    assert field.at((1, 0)) == pytest.approx(0.5, abs=1e-14)
    assert field.at((-1, 0)) == pytest.approx(0.5, abs=1e-14)
    assert abs(field.at((2, 1))) < 1e-14
    assert abs(mean) < 1e-14


def test_forward_transform_constant_reports_mean():
    field, mean = fl.forward_transform(np.ones((16, 16)), 4)
    assert mean == pytest.approx(1.0, abs=1e-14)
    assert fl.l2_norm(field) == 0.0


def test_forward_transform_grid_too_small():
    with pytest.raises(ValueError):
        fl.forward_transform(np.ones((8, 8)), 4)


def test_round_trip_white_noise(rng):
    samples = rng.standard_normal((33, 33))
    field, mean = fl.forward_transform(samples, 16)
    back = fl.evaluate(field, 33) + mean.real
    # band-limited projection is exact on a 33-point grid at N = 16
    np.testing.assert_allclose(back, samples, atol=1e-12)


def test_parseval_against_grid_quadrature():
    u = fl.random_field(9, 8, 1.0)
    vals = fl.evaluate(u, 64)
    grid_norm = math.sqrt(float(np.mean(np.abs(vals) ** 2)))
    assert grid_norm == pytest.approx(fl.l2_norm(u), rel=1e-10)


def test_single_mode_norms():
    u = fl.SpectralField.zeros(2, 4, real=False)
    u.set_mode((1, 0), 1.0, hermitian=False)
    assert fl.l2_norm(u) == 1.0
    k = normalize("constant", 2, horizon=0.1)
    tab = build_table(k, Orientation.from_angle(0.7), 4)
    assert fl.s_norm(u, tab) == pytest.approx(
        float(np.linalg.norm(tab.lam_at((1, 0)))), rel=1e-14)


def test_s_norm_bounded_by_h1(table2):
    u = fl.random_field(15, 8, 1.0, components=2)
    assert fl.s_norm(u, table2) <= 2.0 * math.sqrt(2.0) * fl.h1_seminorm(u) * (1 + 1e-12)


def test_norms_requires_table():
    u = fl.random_field(3, 4, 1.0)
    with pytest.raises(ValueError):
        fl.s_norm(u, None)


def test_random_field_deterministic():
    a = fl.random_field(7, 5, 2.0, components=2)
    b = fl.random_field(7, 5, 2.0, components=2)
    np.testing.assert_array_equal(a.coeffs, b.coeffs)


def test_random_field_flat_spectrum_populates_all_modes():
    u = fl.random_field(3, 8, 0.0)
    modes = lattice_modes(8, 2)
    mags = np.array([abs(u.at(m)) for m in modes])
    assert np.all(mags > 0.0)
    assert abs(u.at((0, 0))) == 0.0


def test_random_field_decay_profile():
    u = fl.random_field(5, 6, 3.0)
    grid = fl.lattice_grid(6, 2)
    k2 = np.sum(grid**2, axis=0)
    amp = np.abs(u.coeffs)
    mask = k2 > 0
    np.testing.assert_allclose(amp[mask], (1.0 + k2[mask]) ** -1.5, rtol=1e-13)


def test_random_field_real_on_grid():
    u = fl.random_field(11, 6, 1.0, components=2)
    complex_coeffs = u.coeffs.copy()
    u_complex = fl.SpectralField(6, 2, complex_coeffs, real=False)
    vals = fl.evaluate(u_complex, 25)
    assert np.max(np.abs(vals.imag)) < 1e-12


def test_zero_mode_pinned_through_arithmetic():
    a = fl.random_field(1, 4, 1.0)
    b = fl.random_field(2, 4, 1.0)
    for f in (a + b, a - b, 2.5 * a, a.multiply_modes(np.ones((9, 9)))):
        assert abs(f.at((0, 0))) == 0.0


def test_set_mode_rejects_zero_mode():
    u = fl.SpectralField.zeros(2, 4)
    with pytest.raises(ValueError):
        u.set_mode((0, 0), 1.0)


def test_component_shapes():
    s = fl.random_field(1, 3, 1.0)
    v = fl.random_field(1, 3, 1.0, components=2)
    assert s.component_shape == ()
    assert v.component_shape == (2,)


def test_evaluate_at_matches_grid():
    u = fl.random_field(13, 5, 1.0)
    x = fl.grid_points(16, 2)
    pts = np.stack([x[0].ravel(), x[1].ravel()], axis=1)
    direct = fl.evaluate_at(u, pts).reshape(16, 16)
    np.testing.assert_allclose(direct, fl.evaluate(u, 16), atol=1e-12)


def test_v_norm_through_norms(table2):
    u = fl.random_field(17, 8, 2.0, components=2)
    out = fl.norms(u, table2, lame=(1.0, 1.0))
    assert out["v"] >= out["l2"]
    assert set(out) == {"l2", "s", "v"}


def test_field_csv_snapshot(tmp_path):
    u = fl.random_field(19, 2, 1.0, components=2)
    path = tmp_path / "field.csv"
    fl.to_csv(u, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "xi1,xi2,re1,im1,re2,im2"
    assert len(lines) == 26  # 5^2 modes + header


def test_forward_transform_vector_samples():
    g = fl.grid_points(32, 2)
    samples = np.stack([np.cos(g[0]), np.sin(g[1])], axis=-1)
    field, mean = fl.forward_transform(samples, 4, dimension=2)
    assert field.component_shape == (2,)
    np.testing.assert_allclose(field.at((1, 0)), [0.5, 0.0], atol=1e-14)
    np.testing.assert_allclose(field.at((0, 1)), [0.0, -0.5j], atol=1e-14)
    np.testing.assert_allclose(mean, [0.0, 0.0], atol=1e-14)
