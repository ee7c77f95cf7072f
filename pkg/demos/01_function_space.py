import math

import numpy as np

from canonpair.funcspace import (
    Interval,
    SmoothFunction,
    build_quadrature,
    differentiate,
    endpoint_values,
    inner_product,
    monomial,
    norm,
)
from canonpair.models import exponential, trig_series

# A composite Gauss-Legendre grid on [0, 2 pi]; 32 panels of 16 nodes each
circle = Interval(0.0, 2 * math.pi)
grid = build_quadrature(circle)
print("nodes:", grid.nodes.size, " total weight:", grid.weights.sum(), " length:", 2 * math.pi)

# Fourier modes are orthonormal to machine precision on this grid
e = [exponential(1j * n, (2 * math.pi) ** -0.5) for n in range(-3, 4)]
gram = np.array([[inner_product(a, b, grid) for b in e] for a in e])
print("max |Gram - I|:", np.max(np.abs(gram - np.eye(len(e)))))

# Functions carry optional analytic derivatives; without them a
# Richardson-extrapolated finite difference is used instead
f = trig_series(1.0, [0.0, 1.0], [1.0, 0.0])   # sin t + cos 2t
t = np.linspace(0.5, 5.5, 5)
exact = np.cos(t) - 2 * np.sin(2 * t)
print("analytic-derivative error:", np.max(np.abs(differentiate(f, 1)(t) - exact)))

raw = SmoothFunction(lambda x: np.sin(x) + np.cos(2 * x))
print("finite-difference error:  ", np.max(np.abs(differentiate(raw, 1)(t) - exact)))

# Endpoint data is what the boundary conditions look at
print("f(0), f(2 pi):", endpoint_values(f, circle))
print("||q|| on [-1, 1]:", norm(monomial(1), build_quadrature(Interval(-1.0, 1.0))), "vs", math.sqrt(2 / 3))
