import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from canonpair.errors import DomainError, UsageError
from canonpair.funcspace import constant, endpoint_values, inner_product, monomial
from canonpair.models import (
    CE_CONST,
    CIRCLE_INTERVAL,
    box_eigenfunction,
    bump,
    circle_eigenfunction,
    classical_arrival_time,
    classical_poisson_bracket,
    counterexample_vector,
    exponential,
    get_model,
    membership_defect,
    reference_domain_minus_dc,
    sample_dc,
    sample_domain_minus_dc,
    trig_series,
)
from canonpair.operators import apply_box_hamiltonian, apply_circle_hamiltonian, apply_momentum

INV_SQRT_2PI = (2 * math.pi) ** -0.5


@pytest.fixture(scope="module")
def models():
    return {m: get_model(m) for m in ("circle", "box", "counterexample")}


def test_unknown_model_rejected():
    with pytest.raises(UsageError):
        get_model("ring")
    with pytest.raises(UsageError):
        get_model("circle", gamma=1.0)


def test_circle_eigenpairs(models):
    assert circle_eigenfunction(0, 0.25).eigenvalue == 0.25
    assert circle_eigenfunction(-3, 0.25).eigenvalue == -2.75
    g = models["circle"].grid
    assert abs(inner_product(circle_eigenfunction(5).fn, circle_eigenfunction(5).fn, g) - 1) < 1e-12


def test_box_eigenpairs():
    e1 = box_eigenfunction(1)
    assert abs(e1["P"].eigenvalue - math.pi) < 1e-15
    assert abs(e1["H"].eigenvalue - 4.934802200544679) < 1e-12
    e0 = box_eigenfunction(0)
    assert e0["P"].eigenvalue == 0 and e0["H"].eigenvalue == 0
    assert box_eigenfunction(-2)["H"].eigenvalue == box_eigenfunction(2)["H"].eigenvalue
    assert abs(box_eigenfunction(2)["H"].eigenvalue - 2 * math.pi ** 2) < 1e-12


@pytest.mark.parametrize("n", range(-16, 17))
def test_eigen_residuals(models, n):
    gamma = models["circle"].gamma
    ep = circle_eigenfunction(n, gamma)
    t = models["circle"].grid.nodes
    assert np.max(np.abs(apply_circle_hamiltonian(ep.fn)(t) - ep.eigenvalue * ep.fn(t))) < 1e-10
    q = models["box"].grid.nodes
    b = box_eigenfunction(n)
    assert np.max(np.abs(apply_box_hamiltonian(b["H"].fn)(q) - b["H"].eigenvalue * b["H"].fn(q))) < 1e-10
    assert np.max(np.abs(apply_momentum(b["P"].fn)(q) - b["P"].eigenvalue * b["P"].fn(q))) < 1e-10


def test_circle_eigenfunctions_are_in_domH_but_not_dc(models):
    m = models["circle"]
    for n in range(-16, 17):
        phi = m.eigenbasis(n).fn
        assert m.domH_defect(phi).aggregate < 1e-12
        assert abs(m.dc_defect(phi).aggregate - INV_SQRT_2PI) < 1e-10


def test_membership_examples(models):
    c, b = models["circle"], models["box"]
    assert abs(membership_defect(c, "dc", c.eigenbasis(0).fn).aggregate - 0.3989422804014327) < 1e-12
    probe = trig_series(math.pi, [1.0, 1.0], [0.0, 0.0])
    assert membership_defect(b, "dc", probe).aggregate < 1e-12
    comps = membership_defect(b, "dc", box_eigenfunction(1)["H"].fn).components
    assert abs(comps["|int q phi|"] - 2 / (math.pi * math.sqrt(2))) < 1e-12
    with pytest.raises(UsageError):
        membership_defect(c, "dom", probe)


def test_box_eigenfunction_defects(models):
    b = models["box"]
    for n in range(1, 5):
        comps = b.dc_defect(box_eigenfunction(n)["H"].fn).components
        # |int q e^{i n pi q} dq| / sqrt 2 = 2 / (n pi sqrt 2)
        assert abs(comps["|int q phi|"] - 2 / (n * math.pi * math.sqrt(2))) < 1e-8
        assert abs(comps["|phi(1)|"] - 2 ** -0.5) < 1e-14
    comps = b.dc_defect(box_eigenfunction(0)["H"].fn).components
    assert abs(comps["|phi(-1)|"] - 2 ** -0.5) < 1e-14
    assert abs(comps["|int phi|"] - math.sqrt(2)) < 1e-13


@pytest.mark.parametrize("model_id", ["circle", "box", "counterexample"])
def test_samplers_pass_their_own_predicate(models, model_id):
    m = models[model_id]
    for seed in range(100):
        for f in sample_dc(m, seed, 2):
            assert m.dc_defect(f).aggregate < 1e-10


def test_sampler_determinism_and_examples(models):
    c, b, ce = models["circle"], models["box"], models["counterexample"]
    t = c.grid.nodes
    a1 = [f(t) for f in sample_dc(c, 7, 3)]
    a2 = [f(t) for f in sample_dc(c, 7, 3)]
    assert len(a1) == 3 and all(np.array_equal(x, y) for x, y in zip(a1, a2))
    comps = b.dc_defect(sample_dc(b, 1, 1)[0]).components
    assert len(comps) == 6 and max(comps.values()) < 1e-10
    v = sample_dc(ce, 5, 1)[0]
    ref = counterexample_vector()
    q = ce.grid.nodes
    ratio = v(q) / ref(q)
    assert np.max(np.abs(ratio - ratio[0])) < 1e-12
    with pytest.raises(UsageError):
        sample_dc(c, 0, 0)


def test_box_dc_samples_orthogonal_to_affine_functions(models):
    b = models["box"]
    for seed in range(20):
        f = sample_dc(b, seed, 1)[0]
        assert abs(inner_product(constant(1.0), f, b.grid)) < 1e-10
        assert abs(inner_product(monomial(1), f, b.grid)) < 1e-10


def test_counterexample_constant():
    assert CE_CONST == 2 * math.sqrt(5) / 15
    v = counterexample_vector()
    assert abs(v(np.array([0.0]))[0] - (-CE_CONST - 1j / 3)) < 1e-15


def test_domain_minus_dc_samples(models):
    c = models["circle"]
    for f in sample_domain_minus_dc(c, 3, 6):
        assert c.domH_defect(f).aggregate < 1e-10
        assert abs(endpoint_values(f, CIRCLE_INTERVAL)[0]) > 0.1
    with pytest.raises(UsageError):
        sample_domain_minus_dc(models["box"], 0, 1)


def test_reference_domain_minus_dc(models):
    c = models["circle"]
    phi2, g, mixed = reference_domain_minus_dc(c.gamma)
    assert c.domH_defect(phi2).aggregate < 1e-12
    assert abs(abs(phi2(np.array([0.0]))[0]) - 0.3989422804014327) < 1e-15
    assert c.domH_defect(g).aggregate < 1e-12 and abs(g(np.array([0.0]))[0] - 3) < 1e-14
    assert c.domH_defect(mixed).aggregate < 1e-12 and c.dc_defect(mixed).aggregate > 0.1


@pytest.mark.parametrize("gamma", [0.0, 0.25, 0.5, 0.9])
def test_twisted_exponential_in_domain(gamma):
    m = get_model("circle", gamma=gamma)
    f = exponential(1j * gamma) * 2.0
    assert m.domH_defect(f).aggregate < 1e-12
    assert m.bi_analytic(3.0) and not m.bi_analytic(0.5)


def test_bump_support():
    f = bump(math.pi, 1.0)
    t = np.linspace(0, 2 * math.pi, 1001)
    outside = (t < math.pi - 1) | (t > math.pi + 1)
    assert np.max(np.abs(f(t[outside]))) < 1e-14
    assert abs(f(np.array([math.pi]))[0] - math.exp(-1)) < 1e-15
    with pytest.raises(UsageError):
        bump(1.0, 0.0)


def test_classical_arrival_time():
    assert classical_arrival_time(0.5, 1.0) == -0.5
    assert classical_arrival_time(0.0, -3.0) == 0
    assert abs(classical_arrival_time(-0.4, 2.0) - 0.2) < 1e-15
    with pytest.raises(DomainError):
        classical_arrival_time(0.1, 0.0)


def test_classical_bracket_examples():
    assert abs(classical_poisson_bracket(0.5, 2.0, 1e-5) - 1) < 1e-8
    assert abs(classical_poisson_bracket(0.3, -1.5, 1e-5) - 1) < 1e-8
    with pytest.raises(DomainError):
        classical_poisson_bracket(0.1, 0.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(-1, 1), st.one_of(st.floats(-5, -0.1), st.floats(0.1, 5)))
def test_classical_bracket_is_one(q, p):
    assert abs(classical_poisson_bracket(q, p) - 1) < 1e-8
