from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import simpson

from roughstruct import (
    SampledPath,
    TestFunction,
    evaluate_test_function,
    generate_path,
    holder_seminorm,
    make_dyadic_grid,
    read_path_csv,
    write_path_csv,
)
from roughstruct.grids import fbm_covariance, profile_c1_norm, profile_integral


def test_smallest_grid():
    grid = make_dyadic_grid(1.0, 0)
    assert np.allclose(grid.nodes, [0.0, 1.0])


def test_quarter_grid():
    grid = make_dyadic_grid(1.0, 2)
    assert np.allclose(grid.nodes, [0.0, 0.25, 0.5, 0.75, 1.0])


def test_wide_grid():
    grid = make_dyadic_grid(2.0, 1)
    assert np.allclose(grid.nodes, [0.0, 1.0, 2.0])


@pytest.mark.parametrize("horizon,level", [(-1.0, 3), (0.0, 3), (1.0, -1), (1.0, 25)])
def test_grid_rejects_bad_arguments(horizon, level):
    with pytest.raises(ValueError):
        make_dyadic_grid(horizon, level)


def test_holder_linear_path_alpha_one():
    grid = make_dyadic_grid(1.0, 6)
    path = SampledPath(grid, grid.nodes)
    assert holder_seminorm(path, 1.0) == pytest.approx(1.0)


def test_holder_constant_path_is_zero():
    grid = make_dyadic_grid(1.0, 5)
    path = SampledPath(grid, np.full(grid.num_nodes, 3.3))
    assert holder_seminorm(path, 0.5) == 0.0


def test_holder_sqrt_path():
    # brute-force max over all grid pairs at J=10; the pair (0, t) attains
    # the analytic bound |sqrt(t) - sqrt(s)| <= |t-s|^(1/2) with constant 1
    grid = make_dyadic_grid(1.0, 10)
    path = SampledPath(grid, np.sqrt(grid.nodes))
    value = holder_seminorm(path, 0.5)
    assert value == pytest.approx(1.0, abs=1e-12)


def test_holder_rejects_bad_alpha():
    grid = make_dyadic_grid(1.0, 3)
    path = SampledPath(grid, grid.nodes)
    for alpha in (0.0, -0.3, 1.5):
        with pytest.raises(ValueError):
            holder_seminorm(path, alpha)


def test_holder_monotone_under_refinement():
    for level in (6, 8):
        fine = generate_path("fbm", make_dyadic_grid(1.0, level + 1), hurst=0.4, seed=5)
        coarse = fine.coarsen(level)
        assert holder_seminorm(coarse, 0.35) <= holder_seminorm(fine, 0.35) + 1e-14


def test_holder_dominates_every_pair():
    path = generate_path("fbm", make_dyadic_grid(1.0, 7), hurst=0.5, seed=2)
    alpha = 0.45
    c = holder_seminorm(path, alpha)
    t = path.grid.nodes
    for s_idx in range(0, path.grid.num_nodes, 7):
        for t_idx in range(s_idx + 1, path.grid.num_nodes, 11):
            inc = np.linalg.norm(path.increment(s_idx, t_idx))
            assert inc <= c * (t[t_idx] - t[s_idx]) ** alpha + 1e-12


def test_sin_cos_generator():
    grid = make_dyadic_grid(1.0, 3)
    path = generate_path("sin_cos", grid, dim=2)
    assert np.allclose(path.values[:, 0], np.sin(grid.nodes))
    assert np.allclose(path.values[:, 1], np.cos(grid.nodes))


def test_piecewise_linear_generator():
    grid = make_dyadic_grid(2.0, 1)
    knots = [
        (0.0, np.array([0.0, 0.0])),
        (1.0, np.array([1.0, 0.0])),
        (2.0, np.array([1.0, 1.0])),
    ]
    path = generate_path("piecewise_linear", grid, knots=knots)
    assert np.allclose(path.values, [[0, 0], [1, 0], [1, 1]])


def test_fbm_quadratic_variation_half():
    # H = 1/2 is standard Brownian covariance min(s, t): QV over [0,1] -> 1
    grid = make_dyadic_grid(1.0, 12)
    for seed in range(5):
        path = generate_path("fbm", grid, hurst=0.5, seed=seed)
        qv = float(np.sum(path.increments() ** 2))
        assert abs(qv - 1.0) < 0.15


def test_fbm_covariance_matches_min():
    t = np.array([0.25, 0.5, 0.75, 1.0])
    cov = fbm_covariance(t, 0.5)
    assert np.allclose(cov, np.minimum.outer(t, t))


def test_fbm_independent_increments_at_half():
    grid = make_dyadic_grid(1.0, 6)
    mid = grid.num_intervals // 2
    first, second = [], []
    for seed in range(200):
        path = generate_path("fbm", grid, hurst=0.5, seed=seed)
        first.append(path.values[mid, 0] - path.values[0, 0])
        second.append(path.values[-1, 0] - path.values[mid, 0])
    corr = np.corrcoef(first, second)[0, 1]
    assert abs(corr) < 0.1


def test_fbm_reproducible_from_seed():
    grid = make_dyadic_grid(1.0, 8)
    a = generate_path("fbm", grid, hurst=0.4, seed=77)
    b = generate_path("fbm", grid, hurst=0.4, seed=77)
    assert np.array_equal(a.values, b.values)


def test_generator_rejects_unknown_kind():
    with pytest.raises(ValueError):
        generate_path("brownian_bridge", make_dyadic_grid(1.0, 3))


def test_bump_value_at_center_of_half_scale():
    # localized bump, center 1, scale 0.5, evaluated at the center:
    # (1 / 0.5) * eta(0) = 2 * exp(-1)
    f = TestFunction("bump", center=1.0, scale=0.5)
    assert evaluate_test_function(f, 1.0) == pytest.approx(2.0 * math.exp(-1.0))


def test_test_function_vanishes_outside_support():
    f = TestFunction("bump", center=0.3, scale=0.2)
    assert evaluate_test_function(f, 0.3 + 0.4) == 0.0
    assert evaluate_test_function(f, -0.2) == 0.0


def test_identity_scaling():
    f = TestFunction("bump", center=0.0, scale=1.0)
    assert evaluate_test_function(f, 0.0) == pytest.approx(math.exp(-1.0))


@pytest.mark.parametrize("center,scale", [(0.0, 1.0), (0.7, 0.25), (-1.2, 0.03125)])
def test_localized_integral_invariant(center, scale):
    # composite Simpson at step scale/64: the integral never depends on
    # where or how tightly the profile is localized
    f = TestFunction("bump", center, scale)
    x = np.linspace(center - scale, center + scale, 129)
    val = simpson(f(x), x=x)
    assert val == pytest.approx(profile_integral("bump"), rel=1e-6)


def test_b1_profile_in_unit_ball():
    norm = profile_c1_norm("bump")
    assert norm > 1.0  # the raw bump is not in B_1; that is why we rescale
    f = TestFunction("bump_b1", 0.0, 1.0)
    u = np.linspace(-1, 1, 20001)
    vals = f(u)
    deriv = np.gradient(vals, u)
    assert np.max(np.abs(vals)) + np.max(np.abs(deriv)) <= 1.0 + 1e-6


def test_unit_profile_integrates_to_one():
    f = TestFunction("bump_unit", 0.5, 0.125)
    x = np.linspace(0.375, 0.625, 4097)
    assert simpson(f(x), x=x) == pytest.approx(1.0, rel=1e-6)


def test_csv_round_trip_bit_exact(tmp_path):
    grid = make_dyadic_grid(1.0, 6)
    path = generate_path("fbm", grid, dim=3, hurst=0.37, seed=123)
    fname = tmp_path / "w.csv"
    write_path_csv(path, str(fname))
    back = read_path_csv(str(fname))
    assert np.array_equal(back.values, path.values)
    assert back.grid.level == path.grid.level
    assert back.grid.horizon == path.grid.horizon


def test_csv_header_format(tmp_path):
    path = generate_path("sin_cos", make_dyadic_grid(1.0, 2), dim=2)
    fname = tmp_path / "w.csv"
    write_path_csv(path, str(fname))
    header = fname.read_text().splitlines()[0]
    assert header == "t,x1,x2"
