"""Catalog of the three model systems.

``circle``
    T = multiplication by t and H = -i d/dt on L2[0, 2pi]; D(H) carries the
    twisted condition psi(0) = exp(i 2 pi gamma) psi(2 pi).
``box``
    Free particle on [-1, 1] with periodic momentum, H = -(1/2) d^2/dq^2 and
    the bounded time-of-arrival integral operator T.
``counterexample``
    Q = multiplication by q and a rank-two integral operator P on L2[0, 1],
    canonical on a closed one-dimensional subspace.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy.linalg import null_space

from .errors import DomainError, UsageError
from .funcspace import (
    DEFAULT_ORDER,
    DEFAULT_PANELS,
    FunctionLike,
    GridFunction,
    Interval,
    QuadratureGrid,
    SmoothFunction,
    build_quadrature,
    endpoint_values,
    inner_product,
    norm,
    sample,
)
from .operators import (
    BOX_INTERVAL,
    COUNTEREXAMPLE_INTERVAL,
    COUNTEREXAMPLE_P,
    SQRT5,
    TWO_PI,
    LinearOperatorSpec,
    MembershipDefect,
    apply_box_hamiltonian,
    apply_box_time,
    apply_circle_hamiltonian,
    apply_coordinate_multiplication,
    apply_integral_kernel,
    apply_inverse_momentum,
    apply_momentum,
    apply_phase_multiplication,
    apply_twisted_translation,
)

MODEL_IDS = ("circle", "box", "counterexample")
SUBSPACES = ("dc", "domH")
CIRCLE_INTERVAL = Interval(0.0, TWO_PI)
DEFAULT_GAMMA = 0.25
MAX_SAMPLE_MODE = 12

# spanning vector of the counterexample's canonical domain: i q^2 - 2 sqrt5/15 - i/3
CE_CONST = 2 * SQRT5 / 15


@dataclass(frozen=True)
class EigenPair:
    fn: SmoothFunction
    eigenvalue: float
    operator_tag: str


@dataclass(frozen=True, eq=False)
class ModelCatalogEntry:
    id: str
    interval: Interval
    grid: QuadratureGrid
    operators: Dict[str, object]
    dc_defect: Callable[[FunctionLike], MembershipDefect]
    domH_defect: Callable[[FunctionLike], MembershipDefect]
    gamma: Optional[float] = None
    eigenbasis: Optional[Callable[[int], EigenPair]] = None
    bi_analytic: Optional[Callable[[float], bool]] = None
    conventions: Dict[str, str] = field(default_factory=dict)


# -- function families -------------------------------------------------------

def trig_series(freq: float, cos_coef, sin_coef, const: complex = 0.0,
                name: str = "") -> SmoothFunction:
    """const + sum_k a_k cos(k w t) + b_k sin(k w t), k = 1..len(coef)."""
    a = np.asarray(cos_coef, dtype=complex)
    b = np.asarray(sin_coef, dtype=complex)
    w = freq * np.arange(1, a.size + 1)

    def make(p):
        # p-th derivative: cos -> -w sin -> -w^2 cos, sin -> w cos -> -w^2 sin
        def out(t):
            t = np.asarray(t, dtype=float)
            x = np.multiply.outer(t, w)
            c, s = np.cos(x), np.sin(x)
            if p == 0:
                return const + c @ a + s @ b
            if p == 1:
                return s @ (-w * a) + c @ (w * b)
            return c @ (-w * w * a) + s @ (-w * w * b)
        return out

    return SmoothFunction(make(0), make(1), make(2), name=name)


def exponential(rate: complex, scale: complex = 1.0, name: str = "") -> SmoothFunction:
    """scale * exp(rate * t)."""
    return SmoothFunction(
        lambda t: scale * np.exp(rate * np.asarray(t, dtype=float)),
        lambda t: scale * rate * np.exp(rate * np.asarray(t, dtype=float)),
        lambda t: scale * rate * rate * np.exp(rate * np.asarray(t, dtype=float)),
        name=name,
    )


def circle_eigenfunction(n: int, gamma: float = DEFAULT_GAMMA) -> EigenPair:
    if not 0.0 <= gamma < 1.0:
        raise UsageError("gamma must lie in [0, 1)")
    fn = exponential(1j * (n + gamma), 1.0 / math.sqrt(TWO_PI), name=f"phi_{n}")
    return EigenPair(fn, n + gamma, "H")


def box_eigenfunction(n: int) -> Dict[str, EigenPair]:
    """Common eigenvector of the box momentum ("P") and Hamiltonian ("H")."""
    fn = exponential(1j * n * math.pi, 1.0 / math.sqrt(2.0), name=f"phi_{n}")
    return {"P": EigenPair(fn, n * math.pi, "P"),
            "H": EigenPair(fn, n * n * math.pi ** 2 / 2, "H")}


def counterexample_vector(c: complex = 1.0) -> SmoothFunction:
    c = complex(c)
    return SmoothFunction(
        lambda q: c * (1j * np.asarray(q, dtype=float) ** 2 - CE_CONST - 1j / 3),
        lambda q: c * 2j * np.asarray(q, dtype=float),
        lambda q: c * 2j * np.ones(np.shape(q)),
        name="ce_dc",
    )


def bump(center: float, halfwidth: float) -> SmoothFunction:
    """exp(-1/(1-x^2)) with x = (t-center)/halfwidth, zero outside |x| < 1."""
    if not halfwidth > 0:
        raise UsageError("bump halfwidth must be positive")

    def value(t):
        x = (np.asarray(t, dtype=float) - center) / halfwidth
        inside = np.abs(x) < 1.0
        safe = np.where(inside, x, 0.0)
        return np.where(inside, np.exp(-1.0 / (1.0 - safe * safe)), 0.0) + 0j

    return SmoothFunction(value, support=Interval(center - halfwidth, center + halfwidth),
                          name="bump")


# -- membership defects ------------------------------------------------------

def _endpoint_derivatives(f: FunctionLike, interval: Interval, h: float = 1e-3) -> np.ndarray:
    if isinstance(f, SmoothFunction) and f.d1 is not None:
        return f.d1(np.array([interval.a, interval.b]))
    if isinstance(f, GridFunction):
        raise UsageError("endpoint derivatives need a pointwise evaluable function")
    # six-point one-sided differences pointing into the interval
    c = np.array([-137, 300, -300, 200, -75, 12]) / 60.0
    k = np.arange(6)
    left = np.sum(c * f(interval.a + k * h)) / h
    right = -np.sum(c * f(interval.b - k * h)) / h
    return np.array([left, right])


def circle_dc_defect(f: FunctionLike) -> MembershipDefect:
    v = endpoint_values(f, CIRCLE_INTERVAL)
    return MembershipDefect({"|psi(0)|": float(abs(v[0])), "|psi(2pi)|": float(abs(v[1]))})


def circle_domH_defect(f: FunctionLike, gamma: float) -> MembershipDefect:
    v = endpoint_values(f, CIRCLE_INTERVAL)
    # psi(2pi) = exp(i 2pi gamma) psi(0), the condition the eigenfunctions satisfy
    twist = abs(v[1] - np.exp(1j * TWO_PI * gamma) * v[0])
    return MembershipDefect({"twist": float(twist)})


def box_dc_defect(f: FunctionLike, grid: QuadratureGrid) -> MembershipDefect:
    v = endpoint_values(f, BOX_INTERVAL)
    d = _endpoint_derivatives(f, BOX_INTERVAL)
    fv = sample(f, grid)
    return MembershipDefect({
        "|int phi|": float(abs(np.sum(grid.weights * fv))),
        "|int q phi|": float(abs(np.sum(grid.weights * grid.nodes * fv))),
        "|phi(-1)|": float(abs(v[0])),
        "|phi(1)|": float(abs(v[1])),
        "|phi'(-1)|": float(abs(d[0])),
        "|phi'(1)|": float(abs(d[1])),
    })


def box_domH_defect(f: FunctionLike) -> MembershipDefect:
    v = endpoint_values(f, BOX_INTERVAL)
    d = _endpoint_derivatives(f, BOX_INTERVAL)
    return MembershipDefect({"periodic value": float(abs(v[1] - v[0])),
                             "periodic slope": float(abs(d[1] - d[0]))})


def box_domP_defect(f: FunctionLike) -> MembershipDefect:
    v = endpoint_values(f, BOX_INTERVAL)
    return MembershipDefect({"periodic value": float(abs(v[1] - v[0]))})


def counterexample_dc_defect(f: FunctionLike, grid: QuadratureGrid) -> MembershipDefect:
    u = counterexample_vector()
    un = norm(u, grid)
    c = inner_product(u, f, grid) / un ** 2
    rest = sample(f, grid) - c * sample(u, grid)
    dist = float(np.sqrt(np.sum(grid.weights * np.abs(rest) ** 2)))
    return MembershipDefect({"distance from span": dist})


# -- catalog -----------------------------------------------------------------

CONVENTIONS = {
    "gamma": f"gamma default {DEFAULT_GAMMA}",
    "U_beta": "U_beta = exp(-i beta T)",
    "domH": "D(H) circle: psi(2 pi) = exp(i 2 pi gamma) psi(0), the twist carried by exp(i(n+gamma)t)",
}


def get_model(model_id: str, gamma: float = DEFAULT_GAMMA, panels: int = DEFAULT_PANELS,
              order: int = DEFAULT_ORDER) -> ModelCatalogEntry:
    if model_id == "circle":
        return _circle(gamma, build_quadrature(CIRCLE_INTERVAL, panels, order))
    if model_id == "box":
        return _box(build_quadrature(BOX_INTERVAL, panels, order))
    if model_id == "counterexample":
        return _counterexample(build_quadrature(COUNTEREXAMPLE_INTERVAL, panels, order))
    raise UsageError(f"unknown model {model_id!r}; expected one of {MODEL_IDS}")


def _circle(gamma: float, grid: QuadratureGrid) -> ModelCatalogEntry:
    if not 0.0 <= gamma < 1.0:
        raise UsageError("gamma must lie in [0, 1)")
    domH = lambda f: circle_domH_defect(f, gamma)
    T = LinearOperatorSpec("T", apply_coordinate_multiplication)
    H = LinearOperatorSpec("H", apply_circle_hamiltonian, "circle.domH", domH, True, False)

    def U(beta, exponent_sign=-1):
        return LinearOperatorSpec(f"U({beta})", lambda f: apply_phase_multiplication(beta, f, exponent_sign))

    def V(alpha):
        return LinearOperatorSpec(f"V({alpha})", lambda f: apply_twisted_translation(alpha, gamma, f))

    return ModelCatalogEntry(
        "circle", CIRCLE_INTERVAL, grid, {"T": T, "H": H, "U": U, "V": V},
        circle_dc_defect, domH, gamma,
        eigenbasis=lambda n: circle_eigenfunction(n, gamma),
        bi_analytic=lambda beta: abs(beta - round(beta)) < 1e-9,
        conventions=dict(CONVENTIONS),
    )


def _box(grid: QuadratureGrid) -> ModelCatalogEntry:
    T = LinearOperatorSpec("T", lambda f: apply_box_time(f, grid))
    H = LinearOperatorSpec("H", apply_box_hamiltonian, "box.domH", box_domH_defect, True, False)
    P = LinearOperatorSpec("p", apply_momentum, "box.domP", box_domP_defect, True, False)

    def Pinv(N):
        return LinearOperatorSpec(f"P^-1[{N}]", lambda f: apply_inverse_momentum(f, N, grid))

    return ModelCatalogEntry(
        "box", BOX_INTERVAL, grid, {"T": T, "H": H, "p": P, "Pinv": Pinv},
        lambda f: box_dc_defect(f, grid), box_domH_defect,
        eigenbasis=lambda n: box_eigenfunction(n)["H"],
    )


def _counterexample(grid: QuadratureGrid) -> ModelCatalogEntry:
    Q = LinearOperatorSpec("Q", apply_coordinate_multiplication)
    P = LinearOperatorSpec("P", lambda f: apply_integral_kernel(COUNTEREXAMPLE_P, f, grid))
    everywhere = lambda f: MembershipDefect({})
    return ModelCatalogEntry(
        "counterexample", COUNTEREXAMPLE_INTERVAL, grid, {"Q": Q, "P": P},
        lambda f: counterexample_dc_defect(f, grid), everywhere,
    )


def membership_defect(model: ModelCatalogEntry, subspace: str, f: FunctionLike) -> MembershipDefect:
    if subspace == "dc":
        return model.dc_defect(f)
    if subspace == "domH":
        return model.domH_defect(f)
    raise UsageError(f"unknown subspace {subspace!r}; expected one of {SUBSPACES}")


# -- samplers ----------------------------------------------------------------

def _complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def _box_null_bases():
    k = np.arange(1, MAX_SAMPLE_MODE + 1)
    sign = (-1.0) ** k
    cos_constraints = sign[None, :]                       # phi(+-1) = 0
    sin_constraints = np.vstack([k * sign,                # phi'(+-1) = 0
                                 -sign / k])              # int q phi = 0
    Nc, Ns = null_space(cos_constraints), null_space(sin_constraints)
    if Nc.shape[1] != MAX_SAMPLE_MODE - 1 or Ns.shape[1] != MAX_SAMPLE_MODE - 2:
        raise RuntimeError("box D_c constraint system lost rank")
    return Nc, Ns


def _circle_dc_sample(rng) -> SmoothFunction:
    a = _complex_normal(rng, MAX_SAMPLE_MODE)
    b = _complex_normal(rng, MAX_SAMPLE_MODE)
    # sum a_k sin kt + b_k (1 - cos kt)
    return trig_series(1.0, -b, a, const=complex(np.sum(b)), name="circle_dc")


def _box_dc_sample(rng) -> SmoothFunction:
    Nc, Ns = _box_null_bases()
    a = Nc @ _complex_normal(rng, Nc.shape[1])
    b = Ns @ _complex_normal(rng, Ns.shape[1])
    return trig_series(math.pi, a, b, name="box_dc")


def sample_dc(model: ModelCatalogEntry, seed: int, count: int) -> List[SmoothFunction]:
    """Seeded random elements of the canonical domain, each verified on exit."""
    if count < 1:
        raise UsageError("count must be at least 1")
    rng = np.random.default_rng(seed)
    if model.id == "circle":
        out = [_circle_dc_sample(rng) for _ in range(count)]
    elif model.id == "box":
        out = [_box_dc_sample(rng) for _ in range(count)]
    elif model.id == "counterexample":
        out = [counterexample_vector(c) for c in _complex_normal(rng, count)]
    else:
        raise UsageError(f"unknown model {model.id!r}")
    for f in out:
        d = model.dc_defect(f).aggregate
        if not d < 1e-10:
            raise RuntimeError(f"sampler produced a vector outside D_c (defect {d:.3e})")
    return out


def _twisted_periodic(gamma: float, coef: np.ndarray) -> SmoothFunction:
    """exp(i gamma t) sum_k c_k exp(i k t), k = -K..K."""
    K = (coef.size - 1) // 2
    rates = 1j * (np.arange(-K, K + 1) + gamma)
    pieces = [exponential(r, c) for r, c in zip(rates, coef)]
    out = pieces[0]
    for p in pieces[1:]:
        out = out + p
    return SmoothFunction(out.eval, out.d1, out.d2, name="twisted_periodic")


def sample_domain_minus_dc(model: ModelCatalogEntry, seed: int, count: int) -> List[SmoothFunction]:
    """Seeded elements of D(H) that do not vanish at the endpoints (circle only)."""
    if model.id != "circle":
        raise UsageError("D(H) minus D_c sampling is available for the circle only")
    if count < 1:
        raise UsageError("count must be at least 1")
    rng = np.random.default_rng(seed)
    gamma = model.gamma
    out = []
    for _ in range(50 * count):
        if len(out) == count:
            break
        if len(out) % 2 == 0:
            n = int(rng.integers(-4, 5))
            f = circle_eigenfunction(n, gamma).fn + _circle_dc_sample(rng) * 0.1
        else:
            f = _twisted_periodic(gamma, _complex_normal(rng, 9) / 3)
        if abs(f(np.array([0.0]))[0]) > 0.1 and model.domH_defect(f).aggregate < 1e-10:
            out.append(f)
    if len(out) < count:
        raise RuntimeError("could not draw enough D(H) samples; twist convention broken?")
    return out


def reference_domain_minus_dc(gamma: float = DEFAULT_GAMMA) -> List[SmoothFunction]:
    """Fixed three-vector set used for invariance scans."""
    phi2 = circle_eigenfunction(2, gamma).fn
    g = exponential(1j * gamma, 2.0) + exponential(1j * (gamma + 1), 0.5) + exponential(1j * (gamma - 1), 0.5)
    one_minus_cos = trig_series(1.0, [-1.0], [0.0], const=1.0)
    return [phi2, g, circle_eigenfunction(0, gamma).fn + one_minus_cos]


# -- classical layer ---------------------------------------------------------

def classical_arrival_time(q: float, p: float) -> float:
    if p == 0:
        raise DomainError("arrival time is defined only for a moving particle (p != 0)")
    if abs(q) > 1:
        raise DomainError("position must lie in the box |q| <= 1")
    return -q / p


def classical_poisson_bracket(q: float, p: float, h: float = 1e-5) -> float:
    """{H_c, T_c} = dH/dq dT/dp - dH/dp dT/dq by central differences."""
    if not h > 0:
        raise UsageError("step must be positive")
    if abs(p) <= h:
        raise DomainError("momentum within one step of zero")
    H = lambda q, p: 0.5 * p * p
    T = lambda q, p: -q / p
    dH_dq = (H(q + h, p) - H(q - h, p)) / (2 * h)
    dH_dp = (H(q, p + h) - H(q, p - h)) / (2 * h)
    dT_dq = (T(q + h, p) - T(q - h, p)) / (2 * h)
    dT_dp = (T(q, p + h) - T(q, p - h)) / (2 * h)
    return dH_dq * dT_dp - dH_dp * dT_dq
