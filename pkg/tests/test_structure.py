from __future__ import annotations

import numpy as np
import pytest

from roughstruct import (
    ONE,
    ModelSpaceVector,
    PolynomialModel,
    PolynomialStructure,
    ReducedModel,
    RoughModel,
    RoughStructure,
    StructureGroupElement,
    W,
    Wdot,
    WWdot,
    X,
    gamma_apply,
    generate_path,
    holder_seminorm,
    lift_piecewise_smooth,
    make_dyadic_grid,
    model_bound_estimate,
    multiply,
    pi_pair,
)
from roughstruct.grids import SampledPath, TestFunction


def _coeff_err(v: ModelSpaceVector) -> float:
    return max((float(np.max(np.abs(np.asarray(c)))) for c in v.coeffs.values()), default=0.0)


def test_homogeneities():
    st = RoughStructure(0.45, 2)
    assert st.homogeneity(ONE) == 0.0
    assert st.homogeneity(W(0)) == pytest.approx(0.45)
    assert st.homogeneity(Wdot(1)) == pytest.approx(-0.55)
    assert st.homogeneity(WWdot(0, 1)) == pytest.approx(-0.1)
    ps = PolynomialStructure()
    assert ps.homogeneity(X(3)) == 3.0


def test_gamma_identity_at_zero_shift():
    st = RoughStructure(0.4, 2)
    g0 = StructureGroupElement(np.zeros(2))
    for sym in st.symbols():
        out = gamma_apply(g0, ModelSpaceVector({sym: 1.0}), st)
        assert out.coeffs[sym] == 1.0
        assert _coeff_err(out - ModelSpaceVector({sym: 1.0})) == 0.0


def test_gamma_wwdot_rule():
    # the second-order symbol picks up h^i times the matching noise symbol
    st = RoughStructure(0.45, 2)
    g = StructureGroupElement(np.array([1.0, 0.0]))
    out = gamma_apply(g, ModelSpaceVector({WWdot(0, 1): 1.0}), st)
    assert out.coeffs[WWdot(0, 1)] == 1.0
    assert out.coeffs[Wdot(1)] == 1.0
    assert set(out.support()) == {WWdot(0, 1), Wdot(1)}


def test_gamma_polynomial_binomial():
    ps = PolynomialStructure(dim=1)
    g = StructureGroupElement(np.array([0.5]))
    out = gamma_apply(g, ModelSpaceVector({X(2): 1.0}), ps)
    assert out.coeffs[X(2)] == pytest.approx(1.0)
    assert out.coeffs[X(1)] == pytest.approx(1.0)  # 2 * 0.5
    assert out.coeffs[ONE] == pytest.approx(0.25)


def test_gamma_dimension_mismatch():
    ps = PolynomialStructure(dim=2)
    g = StructureGroupElement(np.array([0.5]))
    with pytest.raises(ValueError):
        gamma_apply(g, ModelSpaceVector({X((1, 1)): 1.0}), ps)


def test_group_law_rough(rng):
    st = RoughStructure(0.42, 2)
    for _ in range(200):
        h1, h2 = rng.standard_normal(2), rng.standard_normal(2)
        for sym in st.symbols():
            v = ModelSpaceVector({sym: 1.0})
            nested = gamma_apply(
                StructureGroupElement(h1),
                gamma_apply(StructureGroupElement(h2), v, st),
                st,
            )
            direct = gamma_apply(StructureGroupElement(h1 + h2), v, st)
            assert _coeff_err(nested - direct) <= 1e-14


def test_group_law_polynomial(rng):
    ps = PolynomialStructure(dim=1)
    for _ in range(200):
        h1, h2 = rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 1)
        for sym in [ONE, X(1), X(2), X(3)]:
            v = ModelSpaceVector({sym: 1.0})
            nested = gamma_apply(
                StructureGroupElement(h1),
                gamma_apply(StructureGroupElement(h2), v, ps),
                ps,
            )
            direct = gamma_apply(StructureGroupElement(h1 + h2), v, ps)
            assert _coeff_err(nested - direct) <= 1e-14


def test_triangularity(rng):
    # Gamma tau - tau is supported strictly below tau's homogeneity
    st = RoughStructure(0.45, 2)
    g = StructureGroupElement(rng.standard_normal(2))
    for sym in st.symbols():
        hom = st.homogeneity(sym)
        moved = gamma_apply(g, ModelSpaceVector({sym: 1.0}), st)
        delta = moved - ModelSpaceVector({sym: 1.0})
        for low in delta.support():
            assert st.homogeneity(low) < hom - 1e-12


def test_product_table():
    st = RoughStructure(0.45, 2)
    assert st.product(W(0), Wdot(1)) == WWdot(0, 1)
    assert st.product(Wdot(1), W(0)) == WWdot(0, 1)
    assert st.product(ONE, Wdot(1)) == Wdot(1)
    assert st.product(W(0), ONE) == W(0)
    # blank cells of the table are zero: the sum of homogeneities leaves A
    assert st.product(W(0), W(1)) is None
    assert st.product(Wdot(0), Wdot(1)) is None
    assert st.product(WWdot(0, 1), W(0)) is None
    assert st.product(WWdot(0, 1), WWdot(1, 0)) is None


def test_product_grading():
    st = RoughStructure(0.41, 2)
    for a in st.symbols():
        for b in st.symbols():
            out = st.product(a, b)
            if out is not None:
                assert st.homogeneity(out) == pytest.approx(
                    st.homogeneity(a) + st.homogeneity(b)
                )


def test_multiply_bilinear():
    st = RoughStructure(0.45, 1)
    v = ModelSpaceVector({ONE: 2.0, W(0): 3.0})
    w = ModelSpaceVector({Wdot(0): 1.0})
    out = multiply(v, w, st)
    assert out.coeffs[Wdot(0)] == 2.0
    assert out.coeffs[WWdot(0, 0)] == 3.0


def test_polynomial_product():
    ps = PolynomialStructure(dim=1)
    out = multiply(ModelSpaceVector({X(1): 2.0}), ModelSpaceVector({X(2): 5.0}), ps)
    assert out.coeffs[X(3)] == 10.0


# ---------------------------------------------------------------------------
# models


@pytest.fixture(scope="module")
def smooth_rough_model():
    grid = make_dyadic_grid(1.0, 8)
    w = generate_path("sin_cos", grid, dim=2)
    return RoughModel(lift_piecewise_smooth(w, "sin_cos", 0.45))


def test_model_cocycle(smooth_rough_model):
    m = smooth_rough_model
    g1 = m.gamma_of(10, 100)
    g2 = m.gamma_of(100, 200)
    g12 = m.gamma_of(10, 200)
    assert np.allclose(g1.compose(g2).h, g12.h, atol=1e-15)


def test_model_algebraic_identity(smooth_rough_model):
    # Pi_s Gamma_{s,t} = Pi_t paired against a battery of localized bumps
    m = smooth_rough_model
    st = m.structure
    worst = 0.0
    for s_idx, t_idx in [(32, 128), (64, 200), (5, 250)]:
        g = m.gamma_of(s_idx, t_idx)
        for sym in st.symbols():
            v = ModelSpaceVector({sym: 1.0})
            moved = gamma_apply(g, v, st)
            for lam in (0.25, 0.125):
                probe = TestFunction("bump", 0.5, lam)
                lhs = pi_pair(m, s_idx, moved, probe)
                rhs = pi_pair(m, t_idx, v, probe)
                worst = max(worst, abs(lhs - rhs))
    assert worst <= 1e-8


def test_pi_pair_constant_symbol_unit_profile(smooth_rough_model):
    # localized probes of unit integral pair the constant symbol to ~1
    probe = TestFunction("bump_unit", 0.5, 0.125)
    val = pi_pair(smooth_rough_model, 0, ModelSpaceVector({ONE: 1.0}), probe)
    assert val == pytest.approx(1.0, abs=1e-6)


def test_pi_pair_odd_moment_vanishes():
    grid = make_dyadic_grid(1.0, 10)
    w = SampledPath(grid, grid.nodes)
    m = RoughModel(lift_piecewise_smooth(w, "linear", 0.5))
    probe = TestFunction("bump", 0.5, 0.25)
    val = pi_pair(m, grid.num_intervals // 2, ModelSpaceVector({W(0): 1.0}), probe)
    assert abs(val) < 1e-6


def test_pi_pair_lebesgue_noise_equals_constant():
    # dW = dt makes the noise pairing coincide with the constant pairing
    grid = make_dyadic_grid(1.0, 10)
    w = SampledPath(grid, grid.nodes)
    m = RoughModel(lift_piecewise_smooth(w, "linear", 0.5))
    probe = TestFunction("bump", 0.3, 0.2)
    a = pi_pair(m, 0, ModelSpaceVector({Wdot(0): 1.0}), probe)
    b = pi_pair(m, 0, ModelSpaceVector({ONE: 1.0}), probe)
    assert a == pytest.approx(b, abs=1e-9)


def test_pi_pair_missing_second_order():
    grid = make_dyadic_grid(1.0, 6)
    w = generate_path("fbm", grid, dim=1, hurst=0.5, seed=0)
    reduced = ReducedModel(w, 0.45)
    with pytest.raises(KeyError):
        pi_pair(reduced, 0, ModelSpaceVector({WWdot(0, 0): 1.0}), TestFunction())


def test_polynomial_gamma_quotient_is_one():
    grid = make_dyadic_grid(1.0, 6)
    pm = PolynomialModel(grid, max_degree=3)
    _, gamma_norm = model_bound_estimate(pm, gamma=2.0)
    assert gamma_norm == pytest.approx(1.0)


def test_rough_gamma_quotient_equals_holder_seminorm():
    # for tau = W at n = 1 the level-0 quotient is |W_{t,s}| / |t-s|^alpha:
    # maximized over all pairs it reproduces the Hölder seminorm exactly
    grid = make_dyadic_grid(1.0, 6)
    w = generate_path("fbm", grid, hurst=0.5, seed=1)
    m = RoughModel(lift_piecewise_smooth(w, "linear", 0.45))
    _, gamma_norm = model_bound_estimate(
        m, gamma=0.9, base_points=np.arange(grid.num_nodes), symbols=[W(0)]
    )
    assert gamma_norm == pytest.approx(holder_seminorm(w, 0.45), rel=1e-12)


def test_zero_path_noise_contribution_vanishes():
    grid = make_dyadic_grid(1.0, 6)
    w = SampledPath(grid, np.zeros(grid.num_nodes))
    m = RoughModel(lift_piecewise_smooth(w, "linear", 0.45))
    pi_norm, _ = model_bound_estimate(m, gamma=0.9, symbols=[Wdot(0)])
    assert pi_norm == 0.0
