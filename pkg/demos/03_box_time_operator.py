import numpy as np

from canonpair import get_model
from canonpair import verify as V
from canonpair.operators import apply_box_time

# The confined time-of-arrival operator is a bounded integral operator on
# [-1, 1]; its kernel has a kink on the diagonal, so each row integral is
# split at q' = q before Gauss-Legendre is applied
box = get_model("box", panels=32, order=16)
probe = V.box_probe()                       # cos(pi q) + cos(2 pi q)
Tphi = apply_box_time(probe, box.grid)
q = np.linspace(-1, 1, 5)
print("T phi at", q, "\n   ", np.round(Tphi(q), 6))

# The commutator with H = -(1/2) d^2/dq^2 needs T phi twice differentiable;
# the check compares a closed-form second derivative with a fine-grid stencil
r = V.check_ccr(box, seed=4, count=5)
print("box CCR:", r.verdict, " sign", r.detected_sign,
      " residual", r.residuals["max_residual"], " dual gap", r.residuals["dual_derivative_agreement"])

# Iterating the commutator fails: T maps the probe out of D_c
r = V.check_iterated_commutator(box, 2, phi=probe)
print("iterated commutator:", r.verdict, "(expected", r.expected + ")",
      " dc-defect of T phi", round(r.defects["T_phi_in_dc"], 4))

# The kernel form agrees with the spectral form T = -(1/2)(P^-1 q + q P^-1)
# as the Fourier truncation N grows
series = V.check_kernel_vs_spectral_T([16, 32, 64, 128])
for (panels, order, n), res in zip(series.resolutions, series.residuals):
    print(f"  N = {n:>3} ({panels} panels): {res:.2e}")
