import numpy as np

from canonpair import commutator_audit, get_model
from canonpair.funcspace import constant
from canonpair.models import CE_CONST, classical_arrival_time, classical_poisson_bracket, counterexample_vector

# A bounded pair on [0, 1]: Q is multiplication by q and P an integral
# operator. Their commutator equals i only along a single line of vectors
model = get_model("counterexample")
Q, P = model.operators["Q"], model.operators["P"]
print("CE constant 2 sqrt5 / 15 =", CE_CONST)

for label, f in (("i q^2 - c - i/3", counterexample_vector()), ("constant 1", constant(1.0))):
    a = commutator_audit(Q, P, f, f * 1j, model.grid)
    print(f"{label:>16}: {a.verdict:<16} residual {a.pointwise_residual:.3e}")

# The classical picture: arrival time at the origin for a free particle,
# T_c = -q/p, is conjugate to H_c = p^2/2 wherever p stays away from zero
rng = np.random.default_rng(8)
for q, p in zip(rng.uniform(-1, 1, 3), rng.uniform(0.5, 3, 3)):
    print(f"q = {q:+.3f}, p = {p:.3f}: T_c = {classical_arrival_time(q, p):+.4f},"
          f" {{H_c, T_c}} = {classical_poisson_bracket(q, p):.10f}")
