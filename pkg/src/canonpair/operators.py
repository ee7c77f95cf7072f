"""Concrete operators of the three model systems and the commutator audit.

Operator actions map :class:`~canonpair.funcspace.SmoothFunction` (or, where
meaningful, :class:`~canonpair.funcspace.GridFunction`) inputs to outputs of
the same kind. Exact derivative callbacks are propagated wherever the action
admits a closed form, so boundary values of intermediate vectors can be
checked exactly at the endpoints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from .errors import EvaluationError, UsageError
from .funcspace import (
    FINE_FD_STEP,
    FunctionLike,
    GridFunction,
    Interval,
    QuadratureGrid,
    SmoothFunction,
    cumulative_integral,
    differentiate,
    inner_product,
    norm,
    sample,
    uniform_fd_derivative,
)

VIOLATION_THRESHOLD = 1e-3
CLEAN_THRESHOLD = 1e-8
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class MembershipDefect:
    """Named violations of the conditions defining a subspace."""

    components: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for key, value in self.components.items():
            if not value >= 0.0:
                raise ValueError(f"defect component {key} is negative or NaN")

    @property
    def aggregate(self) -> float:
        return max(self.components.values(), default=0.0)


NO_DEFECT = MembershipDefect({})


@dataclass(frozen=True, eq=False)
class LinearOperatorSpec:
    name: str
    action: Callable[[FunctionLike], FunctionLike]
    domain: str = "everywhere"
    domain_defect: Optional[Callable[[FunctionLike], MembershipDefect]] = None
    hermitian: bool = True
    bounded: bool = True

    def __call__(self, f: FunctionLike) -> FunctionLike:
        return self.action(f)

    def defect(self, f: FunctionLike) -> MembershipDefect:
        if self.domain_defect is None:
            return NO_DEFECT
        return self.domain_defect(f)


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """Integral kernel; ``split_diagonal`` marks a jump across q = q'."""

    kernel: Callable[[np.ndarray, np.ndarray], np.ndarray]
    interval: Interval
    split_diagonal: bool = False


@dataclass(frozen=True)
class CommutatorAuditResult:
    defect_Bf_in_domA: MembershipDefect
    defect_Af_in_domB: MembershipDefect
    pointwise_residual: float
    verdict: str


def _zeros(t):
    return np.zeros(np.shape(t), dtype=complex)


# -- multiplication operators ------------------------------------------------

def apply_coordinate_multiplication(f: FunctionLike, interval: Optional[Interval] = None) -> FunctionLike:
    """(T f)(t) = t f(t); product rule carried into the derivative callbacks."""
    if isinstance(f, GridFunction):
        ends = None
        if f.endpoints is not None:
            iv = f.grid.interval
            ends = (iv.a * f.endpoints[0], iv.b * f.endpoints[1])
        return GridFunction(f.grid, f.grid.nodes * f.values, ends)
    d1 = d2 = None
    if f.d1 is not None:
        d1 = lambda t: f(t) + t * f.d1(t)
        if f.d2 is not None:
            d2 = lambda t: 2 * f.d1(t) + t * f.d2(t)
    return SmoothFunction(lambda t: t * f(t), d1, d2, f.support)


def apply_phase_multiplication(beta: float, f: FunctionLike, exponent_sign: int = -1) -> FunctionLike:
    """U_beta f = exp(exponent_sign * i beta t) f; the default is exp(-i beta T)."""
    k = exponent_sign * 1j * beta
    if isinstance(f, GridFunction):
        iv = f.grid.interval
        ends = None
        if f.endpoints is not None:
            ends = (np.exp(k * iv.a) * f.endpoints[0], np.exp(k * iv.b) * f.endpoints[1])
        return GridFunction(f.grid, np.exp(k * f.grid.nodes) * f.values, ends)
    if beta == 0:
        return f
    d1 = d2 = None
    if f.d1 is not None:
        d1 = lambda t: np.exp(k * t) * (k * f(t) + f.d1(t))
        if f.d2 is not None:
            d2 = lambda t: np.exp(k * t) * (k * k * f(t) + 2 * k * f.d1(t) + f.d2(t))
    return SmoothFunction(lambda t: np.exp(k * t) * f(t), d1, d2, f.support)


# -- differential operators --------------------------------------------------

def apply_momentum(f: SmoothFunction, fallback: bool = True) -> SmoothFunction:
    """-i f'. On [0, 2pi] this is the circle Hamiltonian, on [-1, 1] the box momentum."""
    if isinstance(f, GridFunction):
        raise UsageError("differential operators need a pointwise evaluable input")
    df = differentiate(f, 1, fallback=fallback)
    d1 = None if df.d1 is None else (lambda t: -1j * df.d1(t))
    return SmoothFunction(lambda t: -1j * df(t), d1, None, f.support)


apply_circle_hamiltonian = apply_momentum


def apply_box_hamiltonian(f: SmoothFunction, fallback: bool = True) -> SmoothFunction:
    """-(1/2) f''."""
    if isinstance(f, GridFunction):
        raise UsageError("differential operators need a pointwise evaluable input")
    d2 = differentiate(f, 2, fallback=fallback)
    return SmoothFunction(lambda t: -0.5 * d2(t), None, None, f.support)


# -- translations on the circle ----------------------------------------------

def apply_twisted_translation(alpha: float, gamma: float, f: SmoothFunction) -> SmoothFunction:
    """V_alpha = exp(-i alpha H) on [0, 2pi] with twist exp(i 2 pi gamma).

    alpha is first reduced into [0, 2pi) (each full turn contributes the
    global phase exp(-i 2 pi gamma)); points pushed below 0 wrap around
    once, picking up exp(-i 2 pi gamma).
    """
    turns = math.floor(alpha / TWO_PI)
    rest = alpha - TWO_PI * turns
    if rest >= TWO_PI:
        turns, rest = turns + 1, 0.0
    phase = np.exp(-1j * TWO_PI * gamma * turns)
    wrap = np.exp(-1j * TWO_PI * gamma)

    def shifted(cb):
        if cb is None:
            return None

        def out(t):
            s = np.asarray(t, dtype=float) - rest
            inside = s >= 0.0
            arg = np.where(inside, s, s + TWO_PI)
            return phase * np.where(inside, 1.0, wrap) * cb(arg)

        return out

    return SmoothFunction(shifted(f.__call__), shifted(f.d1), shifted(f.d2))


# -- integral operators ------------------------------------------------------

def box_time_kernel(q, qp):
    """(1/4i)[(q+q') sgn(q-q') - (q^2 - q'^2)], sgn(0) := 0."""
    return ((q + qp) * np.sign(q - qp) - (q * q - qp * qp)) / 4j


SQRT5 = math.sqrt(5)


def counterexample_kernel(q, qp):
    return (3 * SQRT5 / 2) * (q + qp) + 0j


BOX_INTERVAL = Interval(-1.0, 1.0)
COUNTEREXAMPLE_INTERVAL = Interval(0.0, 1.0)
BOX_TIME = KernelSpec(box_time_kernel, BOX_INTERVAL, split_diagonal=True)
COUNTEREXAMPLE_P = KernelSpec(counterexample_kernel, COUNTEREXAMPLE_INTERVAL)


def _kernel_values(k: KernelSpec, q, qp):
    out = np.asarray(k.kernel(q, qp), dtype=complex)
    if not np.all(np.isfinite(out)):
        raise EvaluationError("kernel returned a non-finite value")
    return out


def _kernel_at(k: KernelSpec, f: FunctionLike, grid: QuadratureGrid, q: np.ndarray,
               chunk: int = 256) -> np.ndarray:
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if not k.split_diagonal:
        wf = grid.weights * sample(f, grid)
        return _kernel_values(k, q[:, None], grid.nodes[None, :]) @ wf
    if isinstance(f, GridFunction):
        raise UsageError("a kernel with a diagonal jump needs a pointwise evaluable input")
    fn = f(grid.nodes)
    m = grid.order
    out = np.empty(q.size, dtype=complex)
    node_panel = np.repeat(np.arange(grid.panels), m)
    for s in range(0, q.size, chunk):
        qs = q[s:s + chunk]
        j = grid.panel_index(qs)
        # full panels through the grid nodes, the panel holding q split in two
        w = np.where(node_panel[None, :] == j[:, None], 0.0, grid.weights[None, :])
        full = np.sum(_kernel_values(k, qs[:, None], grid.nodes[None, :]) * w * fn, axis=1)
        ln, lw = grid.partial_rule(grid.edges[j], qs)
        rn, rw = grid.partial_rule(qs, grid.edges[j + 1])
        left = np.sum(_kernel_values(k, qs[:, None], ln) * lw * f(ln), axis=1)
        right = np.sum(_kernel_values(k, qs[:, None], rn) * rw * f(rn), axis=1)
        out[s:s + chunk] = full + left + right
    return out


def kernel_image(k: KernelSpec, f: FunctionLike, grid: QuadratureGrid) -> SmoothFunction:
    """Pointwise-evaluable image of ``f``; deliberately carries no derivatives."""
    return SmoothFunction(lambda q: _kernel_at(k, f, grid, np.ravel(q)).reshape(np.shape(q)))


def apply_integral_kernel(k: KernelSpec, f: FunctionLike, grid: QuadratureGrid) -> GridFunction:
    """(K f)(q) at every node of ``grid`` and at both endpoints."""
    if grid.interval != k.interval:
        raise UsageError("grid and kernel live on different intervals")
    iv = k.interval
    values = _kernel_at(k, f, grid, grid.nodes)
    ends = _kernel_at(k, f, grid, np.array([iv.a, iv.b]))
    return GridFunction(grid, values, (ends[0], ends[1]))


def apply_box_time(f: SmoothFunction, grid: QuadratureGrid) -> SmoothFunction:
    """Box time-of-arrival operator through the separable form of its kernel.

    With A(q), B(q) the running integrals of f and q f from the left end and
    M0, M1, M2 the full moments of 1, q, q^2,

        4i (T f)(q) = q (2A - M0) + 2B - M1 - q^2 M0 + M2.

    Differentiating the kernel distributionally gives the derivative
    callbacks: the jump of sgn contributes the local terms in f and f'.
    """
    if isinstance(f, GridFunction):
        raise UsageError("the box time operator needs a pointwise evaluable input")
    nodes, w = grid.nodes, grid.weights
    fn = f(nodes)
    m0, m1, m2 = (complex(np.sum(w * nodes ** p * fn)) for p in range(3))
    qf = lambda t: t * f(t)

    def value(q):
        q = np.asarray(q, dtype=float)
        flat = np.ravel(q)
        A = cumulative_integral(f, grid, flat)
        B = cumulative_integral(qf, grid, flat)
        out = flat * (2 * A - m0) + 2 * B - m1 - flat ** 2 * m0 + m2
        return (out / 4j).reshape(q.shape)

    def d1(q):
        q = np.asarray(q, dtype=float)
        flat = np.ravel(q)
        A = cumulative_integral(f, grid, flat)
        out = 2 * A - m0 - 2 * flat * m0 + 4 * flat * f(flat)
        return (out / 4j).reshape(q.shape)

    df = differentiate(f, 1)

    def d2(q):
        q = np.asarray(q, dtype=float)
        return (6 * f(q) + 4 * q * df(q) - 2 * m0) / 4j

    return SmoothFunction(value, d1, d2)


def dual_second_derivative(g: SmoothFunction, interval: Interval, step: float = FINE_FD_STEP):
    """Second derivative of ``g`` by finite differences on a fine uniform grid
    and by its analytic callback. Returns ``(points, fd, analytic)``."""
    if g.d2 is None:
        raise UsageError("no analytic second derivative to compare against")
    q, fd = uniform_fd_derivative(g, interval, 2, step)
    return q, fd, g.d2(q)


def _box_mode(n: int):
    c = 1.0 / math.sqrt(2.0)
    return lambda q: c * np.exp(1j * n * math.pi * np.asarray(q, dtype=float))


def apply_inverse_momentum(f: FunctionLike, N: int, grid: QuadratureGrid) -> GridFunction:
    """Truncated spectral P^-1 on the box: pi^-1 sum'_{0<|n|<=N} <phi_n,f> phi_n / n."""
    if N < 1:
        raise UsageError("truncation N must be at least 1")
    if grid.interval != BOX_INTERVAL:
        raise UsageError("P^-1 is defined on the box [-1, 1]")
    ns = np.concatenate([np.arange(-N, 0), np.arange(1, N + 1)])
    fv = sample(f, grid)
    modes = np.array([_box_mode(n)(grid.nodes) for n in ns])
    coef = (np.conj(modes) * grid.weights) @ fv
    scale = coef / (ns * math.pi)
    values = scale @ modes
    ends = scale @ np.array([_box_mode(n)(np.array([-1.0, 1.0])) for n in ns])
    return GridFunction(grid, values, (ends[0], ends[1]))


# -- audit -------------------------------------------------------------------

def classify(defect: float, residual: float, tol: float,
             threshold: float = VIOLATION_THRESHOLD, clean: float = CLEAN_THRESHOLD) -> str:
    if defect > threshold:
        return "domain-violation"
    if defect > clean:
        return "inconclusive"
    return "pass" if residual < tol else "fail"


def relative_residual(values: np.ndarray, reference: FunctionLike, grid: QuadratureGrid) -> float:
    scale = norm(reference, grid)
    r = float(np.sqrt(np.sum(grid.weights * np.abs(values) ** 2)))
    return r / scale if scale > 0 else r


def commutator_audit(A: LinearOperatorSpec, B: LinearOperatorSpec, f: FunctionLike,
                     target: FunctionLike, grid: QuadratureGrid, tol: float = 1e-9,
                     threshold: float = VIOLATION_THRESHOLD) -> CommutatorAuditResult:
    """Evaluate (AB - BA) f against ``target`` while tracking both intermediates.

    Bf must lie in dom(A) and Af in dom(B) for the commutator to be defined;
    the membership defects are reported alongside the pointwise residual.
    """
    g1 = B(f)
    g2 = A(f)
    d1 = A.defect(g1)
    d2 = B.defect(g2)
    diff = sample(A(g1), grid) - sample(B(g2), grid) - sample(target, grid)
    res = relative_residual(diff, f, grid)
    verdict = classify(max(d1.aggregate, d2.aggregate), res, tol, threshold)
    return CommutatorAuditResult(d1, d2, res, verdict)


def matrix_element(op: LinearOperatorSpec, m: int, n: int, basis, grid: QuadratureGrid) -> complex:
    """<phi_m | op phi_n>; ``basis(n)`` returns a function or an eigenpair."""
    def fn(k):
        b = basis(k)
        return getattr(b, "fn", b)

    return inner_product(fn(m), op(fn(n)), grid)
