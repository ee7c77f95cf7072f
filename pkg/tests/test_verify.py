import math

import numpy as np
import pytest

from canonpair import verify as V
from canonpair.errors import UsageError
from canonpair.funcspace import sample
from canonpair.models import (
    box_eigenfunction,
    exponential,
    get_model,
    reference_domain_minus_dc,
)
from canonpair.operators import apply_phase_multiplication


@pytest.fixture(scope="module")
def circle():
    return get_model("circle")


@pytest.fixture(scope="module")
def box():
    return get_model("box")


def twisted_two_plus_cos(gamma):
    return exponential(1j * gamma, 2.0) + exponential(1j * (gamma + 1), 0.5) + exponential(1j * (gamma - 1), 0.5)


# -- check_ccr -----------------------------------------------------------------

def test_ccr_examples():
    r = V.check_ccr("circle", 7, 5)
    assert r.verdict == "pass" and r.residuals["max_residual"] < 1e-9 and r.detected_sign == 1
    r = V.check_ccr("counterexample", 0, 1)
    assert r.verdict == "pass" and r.residuals["max_residual"] < 1e-10
    r = V.check_ccr("box", 3, 3)
    assert r.verdict == "pass" and r.residuals["max_residual"] < 1e-6
    assert r.residuals["dual_derivative_agreement"] < 1e-6


def test_box_ccr_sign_is_opposite_to_printed():
    # kernel computation gives (TH - HT) phi = -i phi on the box canonical domain
    r = V.check_ccr("box", 0, 3)
    assert r.detected_sign == -1
    assert r.residuals["max_residual_printed_sign"] > 1.0


def test_ccr_result_invariants():
    r = V.check_ccr("circle", 1, 2)
    assert r.verdict == "pass"
    assert all(v < 1e-8 for v in r.defects.values())
    assert r.as_expected


# -- exclusion ------------------------------------------------------------------

def test_lemma1_circle(circle):
    r = V.check_lemma1_exclusion(circle, range(-4, 5))
    assert r.verdict == "pass"
    for n in range(-4, 5):
        assert abs(r.defects[f"dc[n={n}]"] - 0.3989422804014327) < 1e-12
        assert abs(r.residuals[f"overlap[n={n}]"] - 1) < 1e-12


def test_lemma1_box(box):
    r = V.check_lemma1_exclusion(box, range(0, 5))
    assert r.verdict == "pass"
    assert abs(r.defects["dc[n=0]"] - math.sqrt(2)) < 1e-12  # |int phi_0| dominates the boundary value
    comps = box.dc_defect(box_eigenfunction(0)["H"].fn).components
    assert abs(comps["|phi(1)|"] - 0.7071067811865476) < 1e-14
    comps = box.dc_defect(box_eigenfunction(1)["H"].fn).components
    assert abs(comps["|int q phi|"] - 0.45015815807855303) < 1e-12


def test_lemma1_requires_eigenbasis():
    with pytest.raises(UsageError):
        V.check_lemma1_exclusion("counterexample", range(2))


# -- exponentiated relations -------------------------------------------------------

def test_weyl_like_examples(circle):
    r = V.check_weyl_like(circle, [0.3, 1.0, math.sqrt(2), 5.0], seed=0, count=3)
    assert r.verdict == "pass" and r.detected_sign == -1
    assert max(r.residuals.values()) < 1e-9
    r0 = V.check_weyl_like(circle, [0.0], seed=0, count=2)
    assert r0.residuals["beta=0.0"] == 0.0


def test_weyl_like_sign_is_convention_covariant(circle):
    minus = V.check_weyl_like(circle, [0.3, 2.0], exponent_sign=-1)
    plus = V.check_weyl_like(circle, [0.3, 2.0], exponent_sign=+1)
    assert minus.verdict == plus.verdict == "pass"
    assert minus.detected_sign == -plus.detected_sign == -1


def test_theorem2ii_examples(circle):
    phi2 = circle.eigenbasis(2).fn
    U1phi2 = apply_phase_multiplication(1.0, phi2)
    t = circle.grid.nodes
    assert np.max(np.abs(U1phi2(t) - circle.eigenbasis(1).fn(t))) < 1e-13
    H = circle.operators["H"]
    assert np.max(np.abs(sample(H(U1phi2), circle.grid) - 1.25 * U1phi2(t))) < 1e-12
    r = V.check_theorem2ii(circle, 1.0, functions=[phi2])
    assert r.verdict == "pass" and r.residuals["max_residual"] < 1e-10
    r = V.check_theorem2ii(circle, 2.0, functions=[twisted_two_plus_cos(circle.gamma)])
    assert r.verdict == "pass" and r.residuals["max_residual"] < 1e-9
    r = V.check_theorem2ii(circle, 0.5, functions=[phi2])
    assert r.verdict == r.expected == "domain-violation"
    assert abs(r.defects["U_psi_in_domH"] - 2 / math.sqrt(2 * math.pi)) < 1e-12


@pytest.mark.parametrize("beta,verdict", [(-2, "pass"), (-1, "pass"), (1, "pass"), (2, "pass"),
                                          (0.5, "domain-violation"), (math.sqrt(2), "domain-violation")])
def test_theorem2ii_on_samples(circle, beta, verdict):
    r = V.check_theorem2ii(circle, beta, seed=4, count=4)
    assert r.verdict == r.expected == verdict


def test_pauli_step_never_produces_a_contradiction(circle):
    rng = np.random.default_rng(2)
    betas = rng.uniform(-3, 3, 20)
    betas = betas[np.abs(betas - np.round(betas)) > 1e-3]
    assert betas.size == 20
    for beta in betas:
        for n in (0, 2):
            r = V.audit_pauli_step(circle, float(beta), n)
            assert r.verdict == r.expected == "domain-violation"
    assert V.audit_pauli_step(circle, 2.0).verdict == "pass"


# -- invariance set -------------------------------------------------------------

@pytest.mark.parametrize("gamma", [0.0, 0.25, 0.5, 0.9])
def test_scan_detects_integers(gamma):
    m = get_model("circle", gamma=gamma)
    s = V.scan_invariance_set(m, -3, 3, 0.01)
    assert len(s.detected_BI) == 7
    for b, n in zip(s.detected_BI, range(-3, 4)):
        assert abs(b - n) <= 1e-9
    assert s.analytic_mismatches == 0
    near = [d for b, d in zip(s.beta_grid, s.defect_curve) if abs(b - round(b)) < 1e-9]
    assert len(near) == 7 and max(near) < 1e-8
    diffs = V.eigenvalue_differences(m, -3, 3)
    assert diffs == [float(n) for n in range(-3, 4)]


def test_scan_defect_at_half(circle):
    phi2 = reference_domain_minus_dc(circle.gamma)[0]
    assert abs(V.twist_defect_after_phase(circle, 0.5, phi2) - 0.7978845608028654) < 1e-12


def test_scan_rejects_bad_step(circle):
    with pytest.raises(UsageError):
        V.scan_invariance_set(circle, -1, 1, 0.0)
    with pytest.raises(UsageError):
        V.scan_invariance_set("box")


# -- ladder ---------------------------------------------------------------------

def test_ladder_integer_steps(circle):
    r = V.check_ladder(circle, 1.0, range(-5, 6))
    assert r.verdict == r.expected == "pass" and r.detected_sign == -1
    assert r.params["eigenvalues"] == [0.25 - n for n in range(-5, 6)]
    assert r.residuals["gram_deviation"] < 1e-10
    r2 = V.check_ladder(circle, 2.0, range(-2, 3))
    assert r2.verdict == "pass"
    assert r2.params["eigenvalues"] == [0.25 - 2 * n for n in range(-2, 3)]


def test_ladder_hits_every_integer_offset(circle):
    r = V.check_ladder(circle, 1.0, range(-5, 6))
    offsets = sorted(round(lam - 0.25) for lam in r.params["eigenvalues"])
    assert offsets == list(range(-5, 6))


def test_ladder_non_integer_fails(circle):
    r = V.check_ladder(circle, 0.5, range(-5, 6))
    assert r.verdict == r.expected == "fail"
    assert r.residuals["max_eigen_residual"] > 0.1


# -- iterated commutators ----------------------------------------------------------

@pytest.mark.parametrize("n,tol", [(2, 1e-8), (3, 1e-7)])
def test_iterated_commutator_circle(circle, n, tol):
    r = V.check_iterated_commutator(circle, n, 7)
    assert r.verdict == r.expected == "pass" and r.residuals["residual"] < tol


def test_iterated_commutator_box(box):
    r = V.check_iterated_commutator(box, 2, phi=V.box_probe())
    assert r.verdict == r.expected == "fail"
    assert r.residuals["residual"] > 1e-2
    assert r.defects["T_phi_in_dc"] > 1e-2
    # T phi(+-1) = -(1/4i) int q^2 phi, and int q^2 phi = -3 / pi^2
    comps = box.dc_defect(box.operators["T"](V.box_probe())).components
    assert abs(comps["|phi(1)|"] - 3 / (4 * math.pi ** 2)) < 1e-12
    assert abs(comps["|phi(-1)|"] - 3 / (4 * math.pi ** 2)) < 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_iterated_commutator_discriminates_across_seeds(circle, box, seed):
    assert V.check_iterated_commutator(circle, 2, seed).verdict == "pass"
    assert V.check_iterated_commutator(box, 2, seed).verdict == "fail"


def test_iterated_commutator_rejects_bad_order(circle):
    with pytest.raises(UsageError):
        V.check_iterated_commutator(circle, 4)


# -- translations -----------------------------------------------------------------

def test_translation_window_examples(circle):
    r = V.check_translation_window(circle, math.pi, 1.0, [0.0, 0.5, -1.0, 1.0])
    assert r.verdict == "pass" and r.residuals["alpha=0.0"] == 0
    assert max(r.residuals.values()) < 1e-10
    for alpha in (3.0, -3.0):
        r = V.check_translation_window(circle, math.pi, 1.0, [alpha])
        assert r.verdict == r.expected == "fail"
        assert r.residuals[f"alpha={alpha!r}"] > 0.1
    with pytest.raises(UsageError):
        V.check_translation_window(circle, math.pi, 0.0)
    with pytest.raises(UsageError):
        V.check_translation_window(circle, 0.5, 1.0)


@pytest.mark.parametrize("beta", [0.0, 0.5, 1.0, 1.5, 2.0])
def test_weyl_defect_vanishes_iff_integer(circle, beta):
    r = V.check_weyl_commutation_defect(circle, 1.0, beta)
    assert r.verdict == r.expected
    if beta == int(beta):
        assert r.residuals["weyl_defect"] < 1e-10
    else:
        assert r.residuals["weyl_defect"] > 0.1


def test_weyl_defect_trivial_translation(circle):
    for beta in (0.3, 1.7):
        r = V.check_weyl_commutation_defect(circle, 0.0, beta)
        assert r.residuals["weyl_defect"] == 0 and r.verdict == "pass"


def test_weyl_defect_half_matches_wrap_amplitude(circle):
    # |1 - exp(i pi)| = 2 times the largest test-vector value on the wrapped region
    alpha = 1.0
    t = np.linspace(0, alpha, 2001)
    peak = max(np.max(np.abs(apply_phase_multiplication(0.0, f)(t - alpha + 2 * math.pi)))
               for f in V.weyl_test_set(circle.gamma))
    r = V.check_weyl_commutation_defect(circle, alpha, 0.5)
    assert r.residuals["weyl_defect"] > 0.1
    assert r.residuals["weyl_defect"] <= 2 * peak * (1 + 1e-9) + 1e-12


# -- kernel vs spectral -------------------------------------------------------------

def test_kernel_vs_spectral_decreases():
    s = V.check_kernel_vs_spectral_T([16, 32, 64, 128])
    r = s.residuals
    assert all(b < a for a, b in zip(r, r[1:]))
    assert r[-1] < 1e-3
    phi1 = box_eigenfunction(1)["H"].fn
    assert V.check_kernel_vs_spectral_T([128], f=phi1).residuals[0] < 1e-3
    with pytest.raises(UsageError):
        V.check_kernel_vs_spectral_T([32, 16])


# -- convergence -----------------------------------------------------------------

def test_convergence_examples():
    s = V.run_convergence("check_ccr", "circle", 4)
    assert len(s.resolutions) == 4 and max(s.residuals) < 1e-9
    s = V.run_convergence("check_ccr", "box", 4)
    assert s.non_increasing()
    s = V.run_convergence("check_kernel_vs_spectral_T", "box", 4)
    assert all(b < a for a, b in zip(s.residuals, s.residuals[1:]))
    with pytest.raises(UsageError):
        V.run_convergence("check_nothing", "box", 2)
    with pytest.raises(UsageError):
        V.run_convergence("check_translation_window", "circle", 2)


def test_convergence_series_length_invariant():
    with pytest.raises(ValueError):
        V.ConvergenceSeries([(1, 2, 3)], [])


def test_derived_seeds_are_stable_and_distinct():
    a = V.derive_seed(0, "check_ccr", "circle")
    assert a == V.derive_seed(0, "check_ccr", "circle")
    assert a != V.derive_seed(0, "check_ccr", "box")
    assert a != V.derive_seed(1, "check_ccr", "circle")
