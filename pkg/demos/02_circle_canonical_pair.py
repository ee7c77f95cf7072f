import math

from canonpair import commutator_audit, get_model, sample_dc
from canonpair import verify as V

# Time t on [0, 2 pi] paired with a twisted momentum-like generator H.
# gamma selects the self-adjoint extension through the boundary twist
model = get_model("circle", gamma=0.25)
T, H = model.operators["T"], model.operators["H"]
print(model.conventions["domH"])

# On the canonical domain D_c (psi vanishing at both ends) the commutator acts as i
psi = sample_dc(model, seed=0, count=1)[0]
audit = commutator_audit(T, H, psi, psi * 1j, model.grid)
print("D_c sample: verdict", audit.verdict, " residual", audit.pointwise_residual)

# Eigenvectors of H live in D(H) but not in D_c; T pushes them out of D(H)
phi = model.eigenbasis(2).fn
print("eigenvector dc-defect:", model.dc_defect(phi).aggregate, "=", (2 * math.pi) ** -0.5)
audit = commutator_audit(T, H, phi, phi * 1j, model.grid)
print("eigenvector audit:", audit.verdict)

# The batch check picks up the sign convention and reports it
r = V.check_ccr(model, seed=1, count=50)
print("check_ccr:", r.verdict, " sign", r.detected_sign, " max residual", r.residuals["max_residual"])

# The exponentiated relation holds on D_c for every beta...
r = V.check_weyl_like(model, [0.3, 1.0, math.sqrt(2)], seed=2, count=4)
print("Weyl-like on D_c:", r.verdict, " sign", r.detected_sign)

# ...but on the rest of D(H) the phase e^{-i beta t} only maps into D(H)
# when beta is an integer
for beta in (1, 2, 0.5, math.sqrt(2)):
    r = V.check_theorem2ii(model, beta, seed=3, count=4)
    print(f"  beta = {beta:.4f}: {r.verdict}")
