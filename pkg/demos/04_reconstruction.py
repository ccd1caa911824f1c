#!/usr/bin/env python3
"""The reconstruction operator at work.

A modelled distribution assigns each time an abstract jet; reconstruction
glues the local models into one distribution by anchoring scaling
coefficients at dyadic points.  For positive regularity counts the result
is unique; the error certificate measures how well the glued object
matches each local model at every scale.
"""

import numpy as np

from roughstruct import (
    ControlledPath,
    ModelledDistribution,
    ONE,
    PolynomialModel,
    RoughModel,
    X,
    daubechies_basis,
    generate_path,
    lift_piecewise_smooth,
    make_dyadic_grid,
    multiply_by_Wdot,
    reconstruct,
    to_modelled,
)

basis = daubechies_basis(4)
grid = make_dyadic_grid(1.0, 12)

# 1. polynomial jets: first-order Taylor data of g recovers int g
pm = PolynomialModel(grid)
g = np.sin(3 * grid.nodes)
jets = ModelledDistribution(
    2.0, {ONE: g, X(1): 3 * np.cos(3 * grid.nodes)}, grid, pm.structure, None
)
rr = reconstruct(jets, pm, basis, trunc_level=10)
exact = (1 - np.cos(3 * grid.nodes)) / 3
err = np.abs(rr.antiderivative.values[:, 0] - exact).max()
print(f"polynomial jets of sin(3t): antiderivative error {err:.2e}")

# 2. the product jet (y One + y' W) * Wdot over a smooth rough path
alpha = 0.45
w = generate_path("sin_cos", grid, dim=2)
rp = lift_piecewise_smooth(w, "sin_cos", alpha)
model = RoughModel(rp)
wv = w.values[:, 0]
yp = np.zeros((grid.num_nodes, 1, 2))
yp[:, 0, 0] = np.cos(wv)
cp = ControlledPath(np.sin(wv), yp, w)
f = multiply_by_Wdot(to_modelled(cp, alpha), 0)
print(f"\nproduct jet lives at gamma = {f.gamma:.2f} (= 3 alpha - 1 > 0: unique reconstruction)")
rr = reconstruct(f, model, basis, trunc_level=10)
print(f"levels used: base {rr.base_level}, truncation {rr.max_level}")

# 3. error certificate: |<Rf - Pi_s f(s), eta_s^lam>| / lam^gamma over the
# probe battery; boundedness across scales is the reconstruction theorem
per_lam = {}
for lam, s, ratio in rr.error_certificate():
    per_lam[lam] = max(per_lam.get(lam, 0.0), ratio)
print("\ncertificate: max ratio per scale")
for lam in sorted(per_lam, reverse=True):
    bar = "#" * max(1, int(44 + np.log2(per_lam[lam]) * 2))
    print(f"  lambda = 2^{int(np.log2(lam)):+d}: {per_lam[lam]:.3e}  {bar}")
print("(decaying ratios: smooth drivers over-satisfy the lambda^gamma bound)")
