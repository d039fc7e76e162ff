"""Quadrature grids for the three Hankel domains.

Every constructor returns a :class:`Grid` whose weights integrate a function
directly, ``sum(w * f(nodes)) ~ integral of f`` over the domain's measure.
For :class:`UnitIntervalMultiplicative` that measure is ``dx/x``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special as _sp


@dataclass(frozen=True)
class HalfLine:
    truncation: float = math.inf
    floor: float = 0.0


@dataclass(frozen=True)
class UnitIntervalMultiplicative:
    floor: float = 1e-14


@dataclass(frozen=True)
class Periodic:
    period: float


Domain = Union[HalfLine, UnitIntervalMultiplicative, Periodic]


@dataclass(frozen=True, eq=False)
class Grid:
    nodes: np.ndarray
    weights: np.ndarray
    domain: Domain

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape or nodes.size < 1:
            raise ValueError("nodes and weights must be 1-d arrays of equal, non-zero length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.size

    def integrate(self, values):
        return float(np.dot(self.weights, values))


def gauss_legendre(n: int, a: float = -1.0, b: float = 1.0) -> Grid:
    if not 1 <= n <= 10_000:
        raise ValueError("n must lie in [1, 10000]")
    if not b > a:
        raise ValueError("need b > a")
    x, w = _sp.roots_legendre(n)
    half = 0.5 * (b - a)
    nodes = a + half * (x + 1.0)
    # floor/truncation double as the interval bounds when a < 0
    return Grid(nodes, half * w, HalfLine(truncation=b, floor=a))


def _scaled_laguerre(n, x):
    """Return (L_n e^{-x/2}, L_{n-1} e^{-x/2}); these stay O(1) for all x >= 0."""
    prev = np.zeros_like(x)
    cur = np.exp(-x / 2)
    for k in range(n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur, prev


def gauss_laguerre(n: int, rate: float = 1.0) -> Grid:
    """Gauss-Laguerre rule with the weight exp(-rate*x) folded into the weights.

    Folded weights use l_k = L_k e^{-x/2}, which never overflow even when the
    largest node is ~4n.  The two classical forms x/(n l_{n-1})^2 and
    x/((n+1) l_{n+1})^2 err in opposite directions under node perturbation;
    their geometric mean cancels that to first order.
    """
    if not 1 <= n <= 256:
        raise ValueError("n must lie in [1, 256]")
    if not rate > 0:
        raise ValueError("rate must be positive")
    x, _ = _sp.roots_laguerre(n)
    x = np.asarray(x, dtype=float)
    # Newton polish on L_n, using L_n' = n (L_n - L_{n-1}) / x
    for _ in range(3):
        ln, lnm1 = _scaled_laguerre(n, x)
        dln = n * (ln - lnm1) / x
        step = ln / dln
        x = x - step
        if np.max(np.abs(step) / x) < 1e-15:
            break
    lnp1, _ = _scaled_laguerre(n + 1, x)
    lnm1 = _scaled_laguerre(n - 1, x)[0] if n > 1 else np.exp(-x / 2)
    folded = x / (n * (n + 1) * np.abs(lnm1 * lnp1))
    return Grid(x / rate, folded / rate, HalfLine())


def geometric_grid(n: int, x_min: float, x_max: float) -> Grid:
    """Log-equispaced nodes with trapezoid weights in the variable log x."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 < x_min < x_max:
        raise ValueError("need 0 < x_min < x_max")
    s = np.linspace(math.log(x_min), math.log(x_max), n)
    h = s[1] - s[0]
    nodes = np.exp(s)
    nodes[0], nodes[-1] = x_min, x_max
    w = nodes * h
    w[0] *= 0.5
    w[-1] *= 0.5
    return Grid(nodes, w, HalfLine(truncation=x_max, floor=x_min))


def periodic_grid(n: int, period: float) -> Grid:
    """Equispaced cell midpoints on (0, period) with uniform weights period/n."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if not period > 0:
        raise ValueError("period must be positive")
    h = period / n
    return Grid((np.arange(n) + 0.5) * h, np.full(n, h), Periodic(period))


def uniform_grid(n: int, truncation: float) -> Grid:
    """Midpoint rule on (0, truncation); the grid used with finite differences."""
    if n < 2:
        raise ValueError("n must be at least 2")
    h = truncation / n
    return Grid((np.arange(n) + 0.5) * h, np.full(n, h), HalfLine(truncation=truncation))


def graded_grid(truncation: float, first: float = 0.01, per_panel: int = 32) -> Grid:
    """Composite Gauss-Legendre on dyadic panels [0, first], [first, 2 first], ...

    Resolves integrands with near-singularities just left of the origin
    (kernels like 1/(x + t) for small x).
    """
    edges = [0.0, first]
    while edges[-1] < truncation:
        edges.append(min(2 * edges[-1], truncation))
    x, w = _sp.roots_legendre(per_panel)
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        nodes.append(lo + half * (x + 1))
        weights.append(half * w)
    return Grid(np.concatenate(nodes), np.concatenate(weights), HalfLine(truncation=truncation))


def multiplicative_grid(n: int, floor: float = 1e-14) -> Grid:
    """Nodes on (floor, 1) for the measure dx/x: Gauss-Legendre in s = -log x."""
    if not 0 < floor < 1:
        raise ValueError("floor must lie in (0, 1)")
    s_max = -math.log(floor)
    x, w = _sp.roots_legendre(n)
    s = 0.5 * s_max * (x + 1)
    order = np.argsort(-s)
    return Grid(np.exp(-s[order]), 0.5 * s_max * w[order], UnitIntervalMultiplicative(floor))


def half_line_truncation(rate: float | None) -> float:
    """Truncation point for a kernel decaying like exp(-rate*x)."""
    if rate is None or rate <= 0:
        return 40.0
    return max(40.0, 20.0 / rate)
