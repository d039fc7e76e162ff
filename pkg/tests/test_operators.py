import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commuting_hankel.catalogue import CoefficientFamily, PoleProximity, build_case
from commuting_hankel.operators import (
    DomainMismatch, NegativeCoefficient, NonIntegrable, DiscretizedOperator, airy_tw_kernel, bessel_tw_kernel,
    bump_functions, capital_phi, commutator_residual, default_probe, discretize, exponential_tw_kernel,
    factor_integral, factorization_residual, hankel_nystrom, multiplicative_hankel,
    oscillatory_factorization_residual, periodic_hankel, phi_max, sturm_liouville_matrix, tw_kernel_eval,
)
from commuting_hankel.quadrature import (
    gauss_laguerre, gauss_legendre, geometric_grid, multiplicative_grid, periodic_grid, uniform_grid,
)
from commuting_hankel.spectra import singular_values, symmetric_eigen

Q = CoefficientFamily.quadratic


# --- discretizations ----------------------------------------------------------

def test_nystrom_exponential_kernel():
    # e^{-(x+y)} is rank one with singular value int e^{-2x} dx = 1/2
    s = singular_values(hankel_nystrom(lambda z: np.exp(-z), gauss_laguerre(64, 1.0)).matrix)
    assert abs(s[0] - 0.5) < 1e-12 and s[1] < 1e-12
    kc = build_case("Q4")
    s = singular_values(discretize(kc).matrix)
    assert abs(s[0] - 0.5) < 1e-10


def test_nystrom_sqrt_weight_symmetric():
    op = hankel_nystrom(build_case("Q5_airy"), gauss_legendre(50, 0, 16))
    assert np.array_equal(op.matrix, op.matrix.T)
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 1.0


def test_periodic_examples():
    g = periodic_grid(64, 2 * math.pi)
    s = singular_values(periodic_hankel(lambda z: np.ones_like(z), g).matrix)
    assert abs(s[0] - 2 * math.pi) < 1e-12 and s[1] < 1e-12
    e = symmetric_eigen(periodic_hankel(np.sin, g).matrix).eigenvalues
    assert np.allclose(sorted(e[:2]), [-math.pi, math.pi], atol=1e-12)
    kc = build_case("C_general", {"c7": 1.0, "c8": 0.0})
    e = symmetric_eigen(discretize(kc).matrix).eigenvalues
    assert np.allclose(sorted(e[:2]), [-math.pi / 2, math.pi / 2], atol=1e-12)


def test_carleman_not_compact():
    tops = []
    for n in (256, 512, 1024):
        s = singular_values(hankel_nystrom(lambda z: 1 / z, geometric_grid(n, 1e-6, 1e6)).matrix)
        tops.append(s[0])
    assert all(b >= a - 1e-12 for a, b in zip(tops, tops[1:]))
    assert tops[-1] / math.pi > 0.9


def test_multiplicative_examples():
    g = multiplicative_grid(200)
    s = singular_values(multiplicative_hankel(lambda u: u, g).matrix)
    assert abs(s[0] - 0.5) < 1e-10
    s = singular_values(multiplicative_hankel(lambda u: np.zeros_like(u), g).matrix)
    assert np.all(s == 0)


def test_h2_minus_matches_bessel_tracy_widom():
    nu = 1.0
    kc = build_case("H2_minus", {"nu": nu})
    s = singular_values(discretize(kc).matrix)
    g = gauss_legendre(80, 0.0, 1.0)
    x = g.nodes
    k = tw_kernel_eval(bessel_tw_kernel(nu), x[:, None], x[None, :])
    sw = np.sqrt(g.weights)
    e = np.sort(np.abs(np.linalg.eigvalsh(sw[:, None] * k * sw[None, :])))[::-1]
    assert np.allclose(s[:6] ** 2, e[:6], atol=1e-6)


def test_domain_mismatch():
    with pytest.raises(DomainMismatch):
        hankel_nystrom(build_case("H2_minus"), gauss_legendre(10, 0, 1))
    with pytest.raises(DomainMismatch):
        hankel_nystrom(np.exp, multiplicative_grid(10))
    with pytest.raises(DomainMismatch):
        multiplicative_hankel(build_case("Q4"), multiplicative_grid(10))
    with pytest.raises(DomainMismatch):
        periodic_hankel(build_case("C_general"), periodic_grid(16, 2.0))
    with pytest.raises(DomainMismatch):
        periodic_hankel(np.cos, gauss_legendre(10, 0, 1))


# --- Sturm-Liouville ----------------------------------------------------------

def test_sturm_liouville_identity():
    g = uniform_grid(20, 4.0)
    # a negligible, b = 1
    fam = Q(1e-300, 0.0, 0.0, 0.0, 1.0)
    L = sturm_liouville_matrix(fam, g)
    assert np.allclose(L.matrix, np.eye(20), atol=1e-12)


def test_sturm_liouville_row_sums():
    # constant functions: flux vanishes everywhere except at the Dirichlet end
    g = uniform_grid(50, 5.0)
    fam = Q(1.0, 0.0)
    L = sturm_liouville_matrix(fam, g)
    v = L.to_grid(np.ones_like)
    r = L.apply(v) / np.sqrt(g.weights)
    assert np.allclose(r[:-1], 0.0, atol=1e-10) and r[-1] > 0


def test_sturm_liouville_second_derivative():
    # a = x, b = 0: -(x f')' for f = cos(pi x / 2 T) vanishing at T
    T = 4.0
    g = uniform_grid(800, T)
    L = sturm_liouville_matrix(Q(0.0, 1.0), g)
    k = math.pi / (2 * T)
    f = lambda z: np.cos(k * z)
    exact = k * np.sin(k * g.nodes) + g.nodes * k * k * np.cos(k * g.nodes)
    r = L.apply(L.to_grid(f)) / np.sqrt(g.weights)
    assert np.max(np.abs(r - exact)[5:-5]) < 1e-3


def test_sturm_liouville_lowest_eigenvalue_positive():
    kc = build_case("Q5_airy", {"shift": 1.0})
    g = uniform_grid(800, 40.0)
    e = np.linalg.eigvalsh(sturm_liouville_matrix(kc.family, g).matrix)
    assert e[0] > 0


def test_negative_coefficient():
    with pytest.raises(NegativeCoefficient):
        sturm_liouville_matrix(Q(-1.0, 0.0), uniform_grid(10, 2.0))


# --- commutation ----------------------------------------------------------------

def test_capital_phi_examples():
    kc = build_case("Q5_airy")
    assert phi_max(kc) < 1e-8
    assert phi_max(kc.perturbed(0.1)) > 1e-3
    kc = build_case("Q3")
    with pytest.raises(PoleProximity):
        capital_phi(kc, np.array([1e-10]), np.array([0.0]))


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), st.floats(0, 5), st.floats(0, 5))
def test_capital_phi_antisymmetric(s, x, y):
    kc = build_case("Q5_airy", {"shift": s})
    a, b = capital_phi(kc, x, y), capital_phi(kc, y, x)
    assert abs(a + b) <= 1e-12 * max(1.0, abs(a))


def test_commutator_identity_zero():
    kc = build_case("Q5_airy", {"shift": 1.0})
    g = uniform_grid(100, 16.0)
    G = hankel_nystrom(kc, g)
    eye = DiscretizedOperator(np.eye(100), g, "sturm_liouville")
    assert commutator_residual(G, eye, bump_functions(g)) == 0.0


def test_commutator_converges_for_airy():
    kc = build_case("Q5_airy", {"shift": 1.0})
    res = []
    for n in (300, 600):
        g = uniform_grid(n, 40.0)
        res.append(commutator_residual(hankel_nystrom(kc, g), sturm_liouville_matrix(kc.family, g), bump_functions(g)))
    assert res[1] < res[0] < 1e-4
    g = uniform_grid(600, 40.0)
    bad = commutator_residual(hankel_nystrom(kc, g), sturm_liouville_matrix(kc.perturbed(0.1).family, g), bump_functions(g))
    assert bad > 10 * res[1]


def test_commutator_grid_mismatch():
    kc = build_case("Q4")
    G = hankel_nystrom(kc, uniform_grid(10, 4.0))
    L = sturm_liouville_matrix(kc.family, uniform_grid(10, 5.0))
    with pytest.raises(DomainMismatch):
        commutator_residual(G, L, bump_functions(G.grid))


# --- Tracy-Widom factorization ---------------------------------------------------

def test_tw_kernel_diagonal_continuity():
    for W in (airy_tw_kernel(0.5), exponential_tw_kernel(0.3), bessel_tw_kernel(1.5)):
        x = 1.3
        on = tw_kernel_eval(W, np.array([x]), np.array([x]))[0]
        off = tw_kernel_eval(W, np.array([x]), np.array([x + 1e-5]))[0]
        assert abs(on - off) < 1e-4 * max(1.0, abs(on))


def test_airy_diagonal_value():
    x = 0.7
    ref = float(mpmath.airyai(x, 1) ** 2 - x * mpmath.airyai(x) ** 2)
    assert abs(tw_kernel_eval(airy_tw_kernel(0.0), np.array([x]), np.array([x]))[0] - ref) < 1e-14


def test_exponential_g_against_quadrature():
    # g(x) = e^{-x} int_0^inf e^{-2t}/(x+t) dt
    W = exponential_tw_kernel(0.0)
    for x in (0.1, 1.0, 4.0):
        ref = float(mpmath.exp(-x) * mpmath.quad(lambda t: mpmath.exp(-2 * t) / (x + t), [0, 1, mpmath.inf]))
        assert abs(W.g(np.array([x]))[0] - ref) < 1e-13


@pytest.mark.parametrize("cid,params,W", [
    ("Q5_airy", {"shift": 0.0}, airy_tw_kernel(0.0)),
    ("Q5_airy", {"shift": -1.0}, airy_tw_kernel(-1.0)),
    ("Q7_plus", {"shift": 0.5}, exponential_tw_kernel(0.5)),
    ("H2_minus", {"nu": 1.0}, bessel_tw_kernel(1.0)),
])
def test_factorization_identities(cid, params, W):
    kc = build_case(cid, params)
    probe = default_probe(10, 1.0 if kc.domain == "multiplicative" else 3.0)
    assert factorization_residual(kc, W, probe) <= 1e-6


def test_factorization_negative_control():
    kc = build_case("Q5_airy")
    assert factorization_residual(kc, airy_tw_kernel(0.5), default_probe()) > 1e-2


def test_factorization_bounded_only():
    with pytest.raises(NonIntegrable):
        factor_integral(build_case("Q3"), 1.0, 2.0)


def test_oscillatory_identity():
    re, im = oscillatory_factorization_residual(default_probe(6, 3.0) + 0.05)
    assert re <= 1e-6 and im <= 1e-6
