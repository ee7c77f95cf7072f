import math

import numpy as np

from canonpair import get_model
from canonpair import verify as V

model = get_model("circle", gamma=0.9)

# Which phases e^{-i beta t} keep D(H) minus D_c inside D(H)?  Scan beta,
# measure the worst twist defect, then bisect each dip down to 1e-9
scan = V.scan_invariance_set(model, -3.0, 3.0, 0.01)
print("detected invariance set:", np.round(scan.detected_BI, 6) + 0.0)
print("eigenvalue differences: ", V.eigenvalue_differences(model, -3.0, 3.0))
print("grid points disagreeing with the integer test:", scan.analytic_mismatches)

# An invariance element shifts eigenvalues by a fixed step
for beta0 in (1.0, 0.5):
    r = V.check_ladder(model, beta0, range(-5, 6))
    print(f"ladder beta0 = {beta0}: {r.verdict} (expected {r.expected}),"
          f" eigen-residual {r.residuals['max_eigen_residual']:.2e}")

# Twisted translations leave a bump alone while it stays away from the seam
r = V.check_translation_window(model, math.pi, 1.0, [-1.0, 0.5, 3.0])
for k, v in r.residuals.items():
    print(f"  translation {k}: residual {v:.2e}")

# Translations and phases commute up to a Weyl phase exactly when beta is an integer
for beta in (0.0, 0.5, 1.0, 1.5):
    r = V.check_weyl_commutation_defect(model, 1.0, beta)
    print(f"  Weyl defect alpha = 1, beta = {beta}: {r.residuals['weyl_defect']:.2e}")
