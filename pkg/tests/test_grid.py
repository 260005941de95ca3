import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zakai_rbf.grid import CollocationGrid, distances, radius_schedule, uniform_grid, uniform_grid_1d


@pytest.mark.parametrize("N,R_expected", [(16, 2.0159), (32, 3.5919), (64, 6.4000)])
def test_radius_schedule_table_values(N, R_expected):
    assert radius_schedule(N, 4) == pytest.approx(R_expected, abs=1e-3)


@pytest.mark.parametrize("N,expected", [(16, 0.0274), (32, 0.0221), (64, 0.0172)])
def test_fill_power_table_values(N, expected):
    g = uniform_grid_1d(N, radius_schedule(N, 4))
    assert g.fill**2.5 == pytest.approx(expected, abs=1e-3)


def test_two_point_grid():
    g = uniform_grid_1d(2, 1.0)
    np.testing.assert_allclose(g.points[:, 0], [-1 / 3, 1 / 3], rtol=0, atol=1e-15)
    assert g.sep == pytest.approx(1 / 3)
    assert g.fill == pytest.approx(2 / 3)


def test_distances_examples():
    g = uniform_grid_1d(4, 1.0)
    assert distances(g.points, 1.0) == pytest.approx((0.4, 0.2))
    assert g.fill == pytest.approx(0.4) and g.sep == pytest.approx(0.2)
    assert distances(np.array([[-0.5], [0.5]]), 1.0) == pytest.approx((0.5, 0.5))


def test_fill_matches_dense_lattice(rng):
    pts = np.sort(rng.uniform(-0.95, 0.95, size=5))
    lattice = np.linspace(-1, 1, 100_001)
    brute = np.max(np.min(np.abs(lattice[:, None] - pts[None, :]), axis=1))
    fill, _ = distances(pts[:, None], 1.0)
    assert fill == pytest.approx(brute, abs=2e-5)


def test_rejections():
    with pytest.raises(ValueError):
        uniform_grid_1d(1, 1.0)
    with pytest.raises(ValueError):
        uniform_grid_1d(4, 0.0)
    with pytest.raises(ValueError):
        radius_schedule(10, 1)
    with pytest.raises(ValueError):
        distances(np.array([[0.1], [0.1], [0.3]]), 1.0)


def test_two_dimensional_fill_is_flagged_lower_bound():
    g = uniform_grid(4, 1.0, 2)
    fill, sep, approx = distances(g.points, 1.0, return_flag=True)
    assert approx
    assert sep == pytest.approx(g.sep)
    assert fill <= g.fill + 1e-12
    assert fill > 0.9 * g.fill


def test_from_points_and_csv(tmp_path):
    g = CollocationGrid.from_points([-0.2, 0.1, 0.6], 1.0)
    assert g.N == 3 and g.d == 1 and not g.fill_approximate
    g.to_csv(tmp_path / "g.csv")
    back = np.loadtxt(tmp_path / "g.csv", delimiter=",", skiprows=1, ndmin=2)
    np.testing.assert_array_equal(back, g.points)


@given(st.integers(2, 4096), st.floats(0.1, 100.0))
def test_uniform_grid_invariants(N, R):
    g = uniform_grid_1d(N, R)
    x = g.points[:, 0]
    assert np.all(np.abs(x) < R)
    assert np.max(np.abs(x + x[::-1])) <= 1e-14 * max(1.0, R)
    assert g.sep <= g.fill
    scale = R / N
    assert 0.5 <= g.sep / scale <= 4 and 0.5 <= g.fill / scale <= 4


def test_schedule_monotone():
    vals = [radius_schedule(N, 4) for N in range(1, 2000)]
    assert np.all(np.diff(vals) > 0)
