"""Discretized Hankel, Sturm-Liouville and Tracy-Widom operators.

Every matrix uses the sqrt-weight convention M = D^{1/2} K D^{1/2} with
D = diag(grid weights), so a Nystrom operator becomes a symmetric matrix
with the same spectrum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special as _sp

from . import specfun as sf
from .catalogue import (
    BOUNDED_ONLY, HALF_LINE, MULTIPLICATIVE, PERIODIC, CoefficientFamily, KernelCase, PoleProximity,
)
from .quadrature import (
    Grid, HalfLine, Periodic, UnitIntervalMultiplicative, gauss_legendre, geometric_grid, graded_grid,
    multiplicative_grid, periodic_grid,
)


class DomainMismatch(ValueError):
    pass


class NonIntegrable(ValueError):
    pass


class NegativeCoefficient(ValueError):
    pass


KINDS = ("hankel", "sturm_liouville", "tw_kernel")


@dataclass(frozen=True, eq=False)
class DiscretizedOperator:
    matrix: np.ndarray
    grid: Grid
    kind: str
    symmetrization: str = "sqrt-weight"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (len(self.grid), len(self.grid)):
            raise ValueError("matrix size must match the grid")
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __len__(self):
        return self.matrix.shape[0]

    def apply(self, v):
        return self.matrix @ v

    def to_grid(self, f):
        """Samples of a function, scaled into the symmetric coordinates."""
        values = f(self.grid.nodes) if callable(f) else np.asarray(f, dtype=float)
        return np.sqrt(self.grid.weights) * values


def _kernel_fn(kc):
    """phi as a plain function of the native variable."""
    if isinstance(kc, KernelCase):
        return kc.kernel
    if callable(kc):
        return kc
    raise TypeError("expected a KernelCase or a callable kernel")


def _sqrt_weight(grid, k):
    s = np.sqrt(grid.weights)
    return s[:, None] * k * s[None, :]


def hankel_nystrom(kc, grid: Grid) -> DiscretizedOperator:
    """Gamma_phi on the half-line (or on a bounded interval for periodic kernels)."""
    if not isinstance(grid.domain, HalfLine):
        raise DomainMismatch("hankel_nystrom needs a half-line grid")
    if isinstance(kc, KernelCase) and kc.domain == MULTIPLICATIVE:
        raise DomainMismatch(f"{kc.case_id} lives on (0, 1) with dx/x; use multiplicative_hankel")
    x = grid.nodes
    k = _kernel_fn(kc)(x[:, None] + x[None, :])
    return DiscretizedOperator(_sqrt_weight(grid, k), grid, "hankel")


def multiplicative_hankel(kc, grid: Grid) -> DiscretizedOperator:
    """Gamma_rho h(x) = int_0^1 rho(xy) h(y) dy/y."""
    if not isinstance(grid.domain, UnitIntervalMultiplicative):
        raise DomainMismatch("multiplicative_hankel needs a multiplicative grid on (0, 1)")
    if isinstance(kc, KernelCase) and kc.domain != MULTIPLICATIVE:
        raise DomainMismatch(f"{kc.case_id} is not a multiplicative kernel")
    x = grid.nodes
    k = np.broadcast_to(_kernel_fn(kc)(x[:, None] * x[None, :]), (x.size, x.size))
    return DiscretizedOperator(_sqrt_weight(grid, k), grid, "hankel")


def periodic_hankel(kc, grid: Grid) -> DiscretizedOperator:
    """Gamma F(x) = int_0^P phi(x+y) F(y) dy on an equispaced periodic grid."""
    if not isinstance(grid.domain, Periodic):
        raise DomainMismatch("periodic_hankel needs a periodic grid")
    if isinstance(kc, KernelCase):
        if kc.domain != PERIODIC:
            raise DomainMismatch(f"{kc.case_id} is not a periodic kernel")
        if kc.period is not None and not math.isclose(grid.domain.period, kc.period):
            raise DomainMismatch("grid period differs from the kernel period")
    x = grid.nodes
    k = np.broadcast_to(_kernel_fn(kc)(x[:, None] + x[None, :]), (x.size, x.size))
    return DiscretizedOperator(_sqrt_weight(grid, k), grid, "hankel")


def differentiation_matrix(x):
    """Polynomial-interpolant derivative at the nodes x (barycentric form)."""
    x = np.asarray(x, dtype=float)
    d = x[:, None] - x[None, :]
    np.fill_diagonal(d, 1.0)
    # barycentric weights 1 / prod(x_j - x_k), kept in log form to avoid overflow
    logw = -np.sum(np.log(np.abs(d)), axis=1)
    sign = (-1.0) ** np.count_nonzero(d < 0, axis=1)
    lam = sign * np.exp(logw - logw.max())
    D = (lam[None, :] / lam[:, None]) / d
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def sturm_liouville_matrix(fam: CoefficientFamily, grid: Grid, method="finite-volume") -> DiscretizedOperator:
    """-(a f')' + b f in the sqrt-weight coordinates of the grid.

    "finite-volume": zero flux at the left end and f = 0 half a cell past the
    last node; cell volumes are the grid weights.
    "spectral": Galerkin form int a f' g' + b f g with the nodal polynomial basis
    and natural boundary conditions; exact stiffness on Gauss-Legendre grids.
    """
    x = grid.nodes
    n = x.size
    vol = grid.weights
    if np.any(fam.a(x) < -1e-14):
        raise NegativeCoefficient("a must be non-negative on the grid for a Sturm-Liouville operator")
    if method == "spectral":
        D = differentiation_matrix(x)
        s = D.T @ ((vol * fam.a(x))[:, None] * D)
        scale = 1 / np.sqrt(vol)
        m = scale[:, None] * s * scale[None, :] + np.diag(fam.b(x))
        return DiscretizedOperator(m, grid, "sturm_liouville")
    if method != "finite-volume":
        raise ValueError(f"unknown method {method!r}")
    faces = np.empty(n + 1)
    faces[1:-1] = 0.5 * (x[1:] + x[:-1])
    faces[0] = getattr(grid.domain, "floor", 0.0) if isinstance(grid.domain, HalfLine) else x[0] - 0.5 * vol[0]
    faces[-1] = x[-1] + 0.5 * vol[-1]
    a_face = np.maximum(fam.a(faces), 0.0)
    cond = np.zeros(n + 1)              # a(face) / distance between the nodes it separates
    cond[1:-1] = a_face[1:-1] / np.diff(x)
    cond[-1] = a_face[-1] / (faces[-1] - x[-1])
    s = np.diag(cond[:-1] + cond[1:])
    off = -cond[1:-1]
    s += np.diag(off, 1) + np.diag(off, -1)
    scale = 1 / np.sqrt(vol)
    m = scale[:, None] * s * scale[None, :] + np.diag(fam.b(x))
    return DiscretizedOperator(m, grid, "sturm_liouville")


def capital_phi(kc: KernelCase, x, y):
    """(a(y)-a(x)) phi''(x+y) + (a'(y)-a'(x)) phi'(x+y) - (b(y)-b(x)) phi(x+y)."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    u = x + y
    if kc.singular_at is not None and np.any(kc.singular_at(u) < 1e-8):
        raise PoleProximity("x + y within 1e-8 of a kernel singularity")
    fam = kc.family
    return ((fam.a(y) - fam.a(x)) * kc.additive(u, 2)
            + (fam.a(y, 1) - fam.a(x, 1)) * kc.additive(u, 1)
            - (fam.b(y) - fam.b(x)) * kc.additive(u))


def probe_grid(kc: KernelCase, n=30):
    lo, hi = kc.probe
    pts = np.linspace(lo, hi, n)
    return np.meshgrid(pts, pts, indexing="ij")


def phi_max(kc: KernelCase, n=30):
    x, y = probe_grid(kc, n)
    return float(np.max(np.abs(capital_phi(kc, x, y))))


def bump_functions(grid: Grid, count=4, width=None):
    """Smooth bumps centred inside the grid, vanishing to machine precision at both ends."""
    lo, hi = grid.nodes[0], grid.nodes[-1]
    span = hi - lo
    width = width or span / 40
    centres = lo + span * np.linspace(0.1, 0.3, count)
    return [lambda z, c=c: np.exp(-((z - c) / width) ** 2) for c in centres]


def commutator_residual(G: DiscretizedOperator, L: DiscretizedOperator, test_fns: Sequence) -> float:
    """max over f of ||(GL - LG) f|| / ||f|| in the grid norm."""
    if G.grid is not L.grid and not np.array_equal(G.grid.nodes, L.grid.nodes):
        raise DomainMismatch("operators live on different grids")
    worst = 0.0
    for f in test_fns:
        v = G.to_grid(f)
        r = G.apply(L.apply(v)) - L.apply(G.apply(v))
        worst = max(worst, float(np.linalg.norm(r) / np.linalg.norm(v)))
    return worst


# ---------------------------------------------------------------------------
# Tracy-Widom kernels

@dataclass(frozen=True)
class TracyWidomKernel:
    f: Callable
    g: Callable
    f_prime: Callable = field(repr=False)
    g_prime: Callable = field(repr=False)
    name: str = ""


def tw_kernel_eval(k: TracyWidomKernel, x, y):
    """(f(x)g(y) - f(y)g(x)) / (x - y), with the derivative limit near the diagonal."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    near = np.abs(x - y) < 1e-6
    d = np.where(near, 1.0, x - y)
    off = (k.f(x) * k.g(y) - k.f(y) * k.g(x)) / d
    m = 0.5 * (x + y)
    diag = k.f_prime(m) * k.g(m) - k.f(m) * k.g_prime(m)
    out = np.where(near, diag, off)
    return out if out.ndim else float(out)


def airy_tw_kernel(shift=0.0) -> TracyWidomKernel:
    return TracyWidomKernel(
        f=lambda x: sf.ai(x + shift),
        g=lambda x: sf.ai_prime(x + shift),
        f_prime=lambda x: sf.ai_prime(x + shift),
        g_prime=lambda x: (x + shift) * sf.ai(x + shift),
        name="airy")


def _exp_integral(x):
    # int_0^inf e^{-2t}/(x+t) dt = e^{2x} E1(2x)
    return _sp.exp1(2 * x) * np.exp(2 * x)


def exponential_tw_kernel(shift=0.0) -> TracyWidomKernel:
    """f = e^{-x}, g = e^{-x} int_0^inf e^{-2t}/(x+t) dt, both at x + shift; pairs with e^{-u}/u."""
    def f(x):
        return np.exp(-(x + shift))

    def g(x):
        return f(x) * _exp_integral(x + shift)

    def g_prime(x):
        z = x + shift
        return f(x) * (_exp_integral(z) - 1 / z)    # I' = 2I - 1/x

    return TracyWidomKernel(f=f, g=g, f_prime=lambda x: -f(x), g_prime=g_prime, name="exponential")


def bessel_tw_kernel(nu=1.0) -> TracyWidomKernel:
    """f = J_nu(2 sqrt x), g = sqrt x J_nu'(2 sqrt x); equals int_0^1 J_nu(2 sqrt(tx)) J_nu(2 sqrt(ty)) dt."""
    def f(x):
        return sf.jv(nu, 2 * np.sqrt(x))

    def g(x):
        return np.sqrt(x) * sf.jvp(nu, 2 * np.sqrt(x))

    def f_prime(x):
        return sf.jvp(nu, 2 * np.sqrt(x)) / np.sqrt(x)

    def g_prime(x):
        r = 2 * np.sqrt(x)
        jd = sf.jvp(nu, r)
        jdd = -jd / r - (1 - nu**2 / r**2) * sf.jv(nu, r)
        return jd / r + jdd

    return TracyWidomKernel(f=f, g=g, f_prime=f_prime, g_prime=g_prime, name=f"bessel nu={nu:g}")


def _factorizable(kc: KernelCase):
    return kc.integrability != BOUNDED_ONLY or kc.tail_hilbert_schmidt


def factor_integral(kc: KernelCase, x, y, n=64):
    """Right-hand side of the factorization: int phi(x+t) phi(y+t) dt, or its multiplicative analogue."""
    if not _factorizable(kc):
        raise NonIntegrable(f"{kc.case_id} is bounded-only: the factor integral does not converge")
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if kc.domain == MULTIPLICATIVE:
        # (xy)^{-1/2} int_0^1 rho(xt) rho(yt) dt/t
        grid = gauss_legendre(n, 0.0, 1.0)
        t = grid.nodes
        vals = kc.kernel(x[..., None] * t) * kc.kernel(y[..., None] * t) / t
        return vals @ grid.weights / np.sqrt(x * y)
    if kc.domain == HALF_LINE:
        grid = graded_grid(kc.truncation)
        t = grid.nodes
        vals = kc.kernel(x[..., None] + t) * kc.kernel(y[..., None] + t)
        return vals @ grid.weights
    raise DomainMismatch("factorization is defined on the half-line and multiplicative domains")


def factorization_residual(kc: KernelCase, W: TracyWidomKernel, probe) -> float:
    """max over probe points of |W(x,y) - factor_integral(x,y)|."""
    probe = np.asarray(probe, dtype=float).reshape(-1, 2)
    x, y = probe[:, 0], probe[:, 1]
    return float(np.max(np.abs(tw_kernel_eval(W, x, y) - factor_integral(kc, x, y))))


def default_probe(n=10, upper=3.0):
    """n x n cell-centred points in (0, upper)^2."""
    pts = (np.arange(n) + 0.5) * upper / n
    x, y = np.meshgrid(pts, pts, indexing="ij")
    return np.column_stack([x.ravel(), y.ravel()])


def oscillatory_factorization_residual(probe, truncation=40.0):
    """Residual of the complex identity pairing f = e^{ix} with g = e^{ix} int_0^inf e^{2it}/(x+t) dt.

    The kernel side is integrated along t = is, where the integrand decays like
    e^{-2s}.  g uses the complex exponential integral.  Returns the max residual
    of the real and of the imaginary parts separately.
    """
    probe = np.asarray(probe, dtype=float).reshape(-1, 2)
    x, y = probe[:, 0], probe[:, 1]

    def g(z):
        # int_0^inf e^{2it}/(z+t) dt = e^{-2iz} E1(-2iz)
        return np.exp(1j * z) * np.exp(-2j * z) * _sp.exp1(-2j * z)

    def f(z):
        return np.exp(1j * z)

    near = np.abs(x - y) < 1e-6
    d = np.where(near, 1.0, x - y)
    lhs = (f(x) * g(y) - f(y) * g(x)) / d
    if np.any(near):
        m = x[near]
        gp = 1j * g(m) + np.exp(1j * m) * (-2j * np.exp(-2j * m) * _sp.exp1(-2j * m) - 1 / m)
        lhs[near] = (1j * f(m)) * g(m) - f(m) * gp
    grid = graded_grid(truncation)
    s = grid.nodes
    integrand = np.exp(-2 * s) / ((x[:, None] + 1j * s) * (y[:, None] + 1j * s))
    rhs = 1j * np.exp(1j * (x + y)) * (integrand @ grid.weights)
    diff = lhs - rhs
    return float(np.max(np.abs(diff.real))), float(np.max(np.abs(diff.imag)))


def default_grid(kc: KernelCase, n=None) -> Grid:
    """The grid each domain is discretized on unless told otherwise."""
    if kc.domain == MULTIPLICATIVE:
        return multiplicative_grid(n or 200)
    if kc.domain == PERIODIC:
        return periodic_grid(n or 128, kc.period)
    if kc.decay is None and kc.integrability == BOUNDED_ONLY:
        # slowly decaying kernels need logarithmic resolution
        return geometric_grid(n or 1024, 1e-6, 1e6)
    return gauss_legendre(n or 200, 0.0, kc.truncation)


def discretize(kc: KernelCase, grid: Grid | None = None) -> DiscretizedOperator:
    grid = grid or default_grid(kc)
    if kc.domain == MULTIPLICATIVE:
        return multiplicative_hankel(kc, grid)
    if kc.domain == PERIODIC:
        return periodic_hankel(kc, grid)
    return hankel_nystrom(kc, grid)
