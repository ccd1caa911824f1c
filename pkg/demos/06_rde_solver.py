#!/usr/bin/env python3
"""Solving dy = F(y) dW by Picard iteration in the jet space.

Each step composes F with the current jet, multiplies by the noise
symbol, integrates, and re-attaches the initial value.  Contraction holds
on short windows; the solver restarts window by window and reports the
observed contraction ratios.
"""

import numpy as np

from roughstruct import (
    SolverConfig,
    builtin_descriptor,
    generate_path,
    lift_piecewise_smooth,
    make_dyadic_grid,
    solve_rde,
)

cfg = SolverConfig(alpha=0.4, beta=0.5)

# 1. the classical sanity check: dy = y dW with W(t) = t is y' = y
grid = make_dyadic_grid(1.0, 10)
time_path = generate_path("polynomial", grid, coeffs=[[0.0, 1.0]])
rp = lift_piecewise_smooth(time_path, "linear", 0.45)
sol, diag = solve_rde(1.0, builtin_descriptor("linear"), rp, cfg)
print(f"exponential test: y(1) = {sol.y[-1, 0]:.8f}   (e = {np.e:.8f})")
for wd in diag["windows"]:
    print(
        f"  window [{wd['t0']:.2f}, {wd['t1']:.2f}]: {wd['iters']} iterations, "
        f"contraction ratio {wd['ratio']:.3f}"
    )
print(f"residual of the integral equation: {diag['residual']:.2e}")

# 2. a planar rotation driven by time
sol_rot, _ = solve_rde(np.array([1.0, 0.0]), builtin_descriptor("rotation"), rp, cfg)
print(f"\nrotation field: y(1) = {sol_rot.y[-1]},  circle point = "
      f"({np.cos(1.0):.6f}, {np.sin(1.0):.6f})")

# 3. a genuinely rough driver: tanh-saturated field over fBm
fbm = generate_path("fbm", make_dyadic_grid(1.0, 10), hurst=0.5, seed=23)
rp_rough = lift_piecewise_smooth(fbm, "linear", 0.45)
sol_r, diag_r = solve_rde(0.5, builtin_descriptor("tanh"), rp_rough, cfg)
print(f"\ntanh field over fBm: y(1) = {sol_r.y[-1, 0]:.6f}, "
      f"residual {diag_r['residual']:.2e}, "
      f"worst ratio {max(w['ratio'] for w in diag_r['windows']):.3f}")

# 4. the fixed-point identity y' = F(y) is part of the solution
gap = np.abs(sol_r.y_prime[:, 0, 0] - np.tanh(sol_r.y[:, 0])).max()
print(f"fixed-point identity |y' - F(y)|: {gap:.2e}")
