"""Complex functions on an interval: quadrature, inner products, derivatives.

Two function representations are used throughout:

* :class:`SmoothFunction` wraps vectorised callbacks and can be evaluated
  anywhere, in particular exactly at the interval endpoints.
* :class:`GridFunction` holds values on the nodes of a :class:`QuadratureGrid`
  (and optionally at the two endpoints). Integral operators produce these.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import ConfigurationError, EvaluationError, UsageError

Callback = Callable[[np.ndarray], np.ndarray]

FD_STEP = 1e-4
FINE_FD_STEP = 1e-3
DEFAULT_PANELS = 32
DEFAULT_ORDER = 16


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ConfigurationError(f"empty interval [{self.a}, {self.b}]")

    @property
    def length(self) -> float:
        return self.b - self.a

    def contains(self, other: "Interval") -> bool:
        return self.a <= other.a and other.b <= self.b


def _checked(values) -> np.ndarray:
    out = np.asarray(values, dtype=complex)
    if not np.all(np.isfinite(out)):
        raise EvaluationError("callback returned a non-finite value")
    return out


@dataclass(frozen=True, eq=False)
class SmoothFunction:
    """A complex function given by an evaluation callback.

    ``d1`` and ``d2`` are optional exact derivative callbacks. ``support``
    is a hint that the function vanishes outside the given sub-interval.
    All callbacks are vectorised over numpy arrays.
    """

    eval: Callback
    d1: Optional[Callback] = None
    d2: Optional[Callback] = None
    support: Optional[Interval] = None
    name: str = ""

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return _checked(np.broadcast_to(self.eval(t), t.shape))

    def derivative_callback(self, order: int) -> Optional[Callback]:
        return {1: self.d1, 2: self.d2}.get(order)

    def _combine(self, other: "SmoothFunction", sign: float) -> "SmoothFunction":
        def pair(u, v):
            if u is None or v is None:
                return None
            return lambda t: u(t) + sign * v(t)

        return SmoothFunction(
            pair(self.eval, other.eval),
            pair(self.d1, other.d1),
            pair(self.d2, other.d2),
        )

    def __add__(self, other):
        if isinstance(other, SmoothFunction):
            return self._combine(other, 1.0)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, SmoothFunction):
            return self._combine(other, -1.0)
        return NotImplemented

    def __mul__(self, c):
        if isinstance(c, (SmoothFunction, GridFunction, np.ndarray)):
            return NotImplemented
        c = complex(c)

        def scaled(u):
            return None if u is None else (lambda t: c * u(t))

        return SmoothFunction(scaled(self.eval), scaled(self.d1), scaled(self.d2), self.support)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


def constant(c: complex) -> SmoothFunction:
    c = complex(c)
    zero = lambda t: np.zeros(np.shape(t), dtype=complex)
    return SmoothFunction(lambda t: np.full(np.shape(t), c, dtype=complex), zero, zero, name=f"{c}")


def monomial(k: int) -> SmoothFunction:
    """t -> t**k with exact derivatives."""
    def d(j):
        if k - j < 0:
            return lambda t: np.zeros(np.shape(t), dtype=complex)
        coef = float(np.prod(np.arange(k - j + 1, k + 1)))
        return lambda t: coef * np.asarray(t, dtype=complex) ** (k - j)

    return SmoothFunction(d(0), d(1), d(2), name=f"t^{k}")


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Composite Gauss-Legendre rule; all nodes are interior to their panel."""

    interval: Interval
    panels: int
    order: int
    nodes: np.ndarray
    weights: np.ndarray
    edges: np.ndarray = field(repr=False)
    ref_nodes: np.ndarray = field(repr=False)
    ref_weights: np.ndarray = field(repr=False)

    def __len__(self):
        return self.nodes.size

    def partial_rule(self, lo, hi):
        """Gauss rule of ``order`` points mapped onto each ``[lo_i, hi_i]``.

        Returns node and weight arrays of shape ``(len(lo), order)``.
        """
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        half = 0.5 * (hi - lo)[:, None]
        nodes = 0.5 * (hi + lo)[:, None] + half * self.ref_nodes[None, :]
        return nodes, half * self.ref_weights[None, :]

    def panel_index(self, x) -> np.ndarray:
        j = np.searchsorted(self.edges, x, side="right") - 1
        return np.clip(j, 0, self.panels - 1)

    def same_as(self, other: "QuadratureGrid") -> bool:
        return other is self or (
            self.interval == other.interval
            and self.panels == other.panels
            and self.order == other.order
        )


def build_quadrature(interval: Interval, panels: int = DEFAULT_PANELS,
                     order: int = DEFAULT_ORDER) -> QuadratureGrid:
    if not isinstance(panels, (int, np.integer)) or panels < 1:
        raise ConfigurationError(f"panels must be a positive integer, got {panels!r}")
    if not isinstance(order, (int, np.integer)) or not 2 <= order <= 64:
        raise ConfigurationError(f"order must lie in [2, 64], got {order!r}")
    x, w = leggauss(int(order))
    edges = np.linspace(interval.a, interval.b, int(panels) + 1)
    h = np.diff(edges)
    nodes = (edges[:-1, None] + 0.5 * h[:, None] * (x[None, :] + 1.0)).ravel()
    weights = (0.5 * h[:, None] * w[None, :]).ravel()
    return QuadratureGrid(interval, int(panels), int(order), nodes, weights, edges, x, w)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values on the nodes of ``grid``; ``endpoints`` holds (f(a), f(b)) if known."""

    grid: QuadratureGrid
    values: np.ndarray
    endpoints: Optional[tuple] = None

    def __post_init__(self):
        if np.shape(self.values) != self.grid.nodes.shape:
            raise UsageError("GridFunction needs one value per quadrature node")

    def _binary(self, other, op):
        if isinstance(other, GridFunction):
            if not self.grid.same_as(other.grid):
                raise UsageError("grid functions live on different grids")
            ends = None
            if self.endpoints is not None and other.endpoints is not None:
                ends = tuple(op(np.array(self.endpoints), np.array(other.endpoints)))
            return GridFunction(self.grid, op(self.values, other.values), ends)
        if isinstance(other, SmoothFunction):
            ends = None
            if self.endpoints is not None:
                iv = self.grid.interval
                ends = tuple(op(np.array(self.endpoints), other(np.array([iv.a, iv.b]))))
            return GridFunction(self.grid, op(self.values, other(self.grid.nodes)), ends)
        return NotImplemented

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, c):
        if isinstance(c, (SmoothFunction, GridFunction)):
            return NotImplemented
        ends = None if self.endpoints is None else tuple(complex(c) * np.array(self.endpoints))
        return GridFunction(self.grid, complex(c) * self.values, ends)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


FunctionLike = Union[SmoothFunction, GridFunction]


def sample(f: FunctionLike, grid: QuadratureGrid) -> np.ndarray:
    """Values of ``f`` at the nodes of ``grid``."""
    if isinstance(f, GridFunction):
        if not f.grid.same_as(grid):
            raise UsageError("grid function sampled on a foreign grid")
        return np.asarray(f.values, dtype=complex)
    return f(grid.nodes)


def endpoint_values(f: FunctionLike, interval: Interval) -> np.ndarray:
    """(f(a), f(b)) taken from the callback, never from quadrature nodes."""
    if isinstance(f, GridFunction):
        if f.endpoints is None:
            raise UsageError("grid function carries no endpoint values")
        return np.asarray(f.endpoints, dtype=complex)
    return f(np.array([interval.a, interval.b]))


def integrate(f: FunctionLike, grid: QuadratureGrid) -> complex:
    return complex(np.sum(grid.weights * sample(f, grid)))


def inner_product(f: FunctionLike, g: FunctionLike, grid: QuadratureGrid) -> complex:
    """<f|g> = integral of conj(f) g, antilinear in the first slot."""
    return complex(np.sum(grid.weights * np.conj(sample(f, grid)) * sample(g, grid)))


def norm(f: FunctionLike, grid: QuadratureGrid) -> float:
    return float(np.sqrt(np.sum(grid.weights * np.abs(sample(f, grid)) ** 2)))


def gram_matrix(functions, grid: QuadratureGrid) -> np.ndarray:
    V = np.array([sample(f, grid) for f in functions])
    return (np.conj(V) * grid.weights) @ V.T


def cumulative_integral(values_fn: Callback, grid: QuadratureGrid, x) -> np.ndarray:
    """Integral of ``values_fn`` from ``grid.interval.a`` up to each point of ``x``.

    Full panels below ``x`` use the grid nodes; the panel containing ``x`` is
    integrated with a Gauss rule mapped onto ``[panel start, x]``, so a kink
    at ``x`` never falls inside a quadrature panel.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    vals = _checked(values_fn(grid.nodes)).reshape(grid.panels, grid.order)
    panel_sums = np.sum(vals * grid.weights.reshape(grid.panels, grid.order), axis=1)
    prefix = np.concatenate([[0.0], np.cumsum(panel_sums)])
    j = grid.panel_index(x)
    pn, pw = grid.partial_rule(grid.edges[j], x)
    partial = np.sum(pw * _checked(values_fn(pn)), axis=1)
    return prefix[j] + partial


def _fd(f: Callback, t: np.ndarray, order: int, h: float) -> np.ndarray:
    if order == 1:
        return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h)
    return (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t) + 16 * f(t - h) - f(t - 2 * h)) / (12 * h * h)


def fd_derivative(f: Callback, t, order: int, h: float = FD_STEP) -> np.ndarray:
    """Five-point central difference with one Richardson level (steps h, 2h)."""
    t = np.asarray(t, dtype=float)
    fine = _fd(f, t, order, h)
    coarse = _fd(f, t, order, 2 * h)
    return _checked((16 * fine - coarse) / 15)


def differentiate(f: SmoothFunction, order: int, h: float = FD_STEP,
                  fallback: bool = True) -> SmoothFunction:
    """Derivative of ``f``; exact callbacks when present, else finite differences."""
    if order not in (1, 2):
        raise UsageError("only first and second derivatives are supported")
    exact = f.derivative_callback(order)
    if exact is not None:
        d1 = f.d2 if order == 1 else None
        return SmoothFunction(exact, d1, None, f.support)
    if not fallback:
        raise EvaluationError("no derivative callback and finite differences disabled")
    if order == 1:
        d1 = None
        if f.d2 is not None:
            d1 = f.d2
        return SmoothFunction(lambda t: fd_derivative(f, t, 1, h), d1, None, f.support)
    return SmoothFunction(lambda t: fd_derivative(f, t, 2, h), None, None, f.support)


def stencil_weights(offsets, order: int) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at offset 0
    from samples at integer ``offsets`` (unit spacing)."""
    offsets = np.asarray(offsets, dtype=float)
    k = np.arange(offsets.size)
    V = offsets[None, :] ** k[:, None]
    rhs = np.zeros(offsets.size)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(V, rhs)


def uniform_fd_derivative(f: Callback, interval: Interval, order: int = 2,
                          step: float = FINE_FD_STEP, edge_width: int = 9):
    """Finite-difference derivative on a uniform grid covering ``interval``.

    Interior points use five-point central stencils refined by one Richardson
    level (steps h and 2h). The four points nearest each end, where the wide
    stencil does not fit, use one-sided ``edge_width``-point stencils.
    Returns ``(points, derivative)``.
    """
    n = int(round(interval.length / step))
    if n < 2 * edge_width:
        raise ConfigurationError("fine grid too coarse for the edge stencils")
    q = np.linspace(interval.a, interval.b, n + 1)
    h = q[1] - q[0]
    v = _checked(f(q))
    out = np.empty_like(v)
    c5 = stencil_weights(np.arange(-2, 3), order)
    idx = np.arange(4, n - 3)
    fine = sum(c5[k] * v[idx + (k - 2)] for k in range(5))
    coarse = sum(c5[k] * v[idx + 2 * (k - 2)] for k in range(5)) / 2.0 ** order
    out[idx] = (16 * fine - coarse) / (15 * h ** order)
    for i in range(4):
        w = stencil_weights(np.arange(edge_width) - i, order)
        out[i] = np.dot(w, v[:edge_width]) / h ** order
        w = stencil_weights(i - np.arange(edge_width)[::-1], order)
        out[n - i] = np.dot(w, v[n + 1 - edge_width:]) / h ** order
    return q, out
