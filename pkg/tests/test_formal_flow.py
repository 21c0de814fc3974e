from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from planar_rg.beta_model import BetaModel, CouplingType
from planar_rg.flow_solver import SolverOptions, solve_full
from planar_rg.formal_flow import Jet, SingularJet, TruncatedPoly, solve_formal, solve_jets

T4, T2P, T2 = CouplingType.FOUR, CouplingType.TWO_PRIME, CouplingType.TWO
K = 3
exponents = st.tuples(st.integers(0, K), st.integers(0, K), st.integers(0, K)).filter(
    lambda e: sum(e) <= K)
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)
polys = st.dictionaries(exponents, rationals, max_size=6).map(lambda d: TruncatedPoly(d, K))


@given(polys, polys, polys)
def test_ring_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a


@given(polys)
def test_reciprocal(a):
    a = a + 1 - a.terms.get((0, 0, 0), 0)  # unit constant term
    assert a * a.reciprocal() == 1


def test_singular_poly():
    with pytest.raises(SingularJet, match="singular jet"):
        TruncatedPoly.variable(0, 3).reciprocal()


@given(polys, st.fractions(-1, 1, max_denominator=5), st.fractions(-1, 1, max_denominator=5))
def test_evaluation_is_a_homomorphism_below_truncation(a, x, y):
    # degree-one factors keep products inside the truncation window
    lin = TruncatedPoly({(0, 0, 0): x, (1, 0, 0): y}, K)
    low = a.project(K - 1, K - 1)
    assert (low * lin).evaluate(2, 3, 5) == low.evaluate(2, 3, 5) * lin.evaluate(2, 3, 5)


@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
                min_size=2, max_size=8))
def test_jet_reciprocal(coeffs):
    coeffs[0] = 1 + abs(coeffs[0])
    j = Jet(coeffs)
    one = (j * j.reciprocal()).coeffs
    assert np.allclose(one, np.eye(1, len(coeffs))[0], atol=1e-9 * max(1, np.abs(coeffs).max()) ** len(coeffs))


def test_singular_jet():
    with pytest.raises(SingularJet):
        1 / Jet.variable(4)


def catalan_oracle(n):
    # reversion of lam = x + x**2: coefficients (-1)**(n-1) C_{n-1}
    from math import comb
    return [0] + [(-1) ** (k - 1) * comb(2 * k - 2, k - 1) // k for k in range(1, n + 1)]


def test_second_order_reversion_is_catalan():
    m = BetaModel(gamma=Fraction(2), rho=1, r_max=2, amplitude=Fraction(1, 10), beta2=1,
                  cross_terms=False)
    s = solve_formal(m, 0, 6)
    assert s.v[T4][0].lambda_coefficients(6) == catalan_oracle(6)
    j = solve_jets(BetaModel(r_max=2, cross_terms=False), 0, 6)
    assert np.allclose(j[T4][0].coeffs.real, catalan_oracle(6))


def test_scale0_mass_feedback_shifts_third_order():
    # with cross terms mu_0 = -lam**2/10 + ... feeds lam_0 mu_0 into the quartic equation
    m = BetaModel(gamma=Fraction(2), rho=1, r_max=2, amplitude=Fraction(1, 10), beta2=1)
    assert solve_formal(m, 0, 3).v[T4][0].lambda_coefficients(3)[3] == Fraction(21, 10)


def test_constant_term_vanishes():
    j = solve_jets(BetaModel(), 5, 4)
    for a in (T4, T2P, T2):
        assert all(abs(v.coeffs[0]) < 1e-300 for v in j[a])


def test_exact_and_float_rings_agree():
    m_exact = BetaModel(gamma=Fraction(2), rho=1, r_max=3, amplitude=Fraction(1, 10), beta2=1)
    m_float = BetaModel(gamma=2.0, rho=1, r_max=3, amplitude=0.1, beta2=1)
    s = solve_formal(m_exact, 3, 5)
    j = solve_jets(m_float, 3, 5)
    for a in (T4, T2P, T2):
        for k in range(4):
            exact = [float(c) for c in s.v[a][k].lambda_coefficients(5)]
            assert np.allclose(j[a][k].coeffs.real, exact, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("alpha,mu", [(0, 0), (0.01, 0.02)])
def test_jets_match_contour_derivatives(alpha, mu):
    m = BetaModel()
    N, order, radius, P = 8, 5, 0.01, 32
    jets = solve_jets(m, N, order, alpha, mu)
    opts = SolverOptions(N=N, check_domains=False)
    nodes = radius * np.exp(2j * np.pi * np.arange(P) / P)
    vals = np.array([solve_full(m, z, alpha, mu, opts).seq.lam[3] for z in nodes])
    contour = np.fft.fft(vals) / P / radius ** np.arange(P)
    coeffs = jets[T4][3].coeffs
    for n in range(1, order + 1):
        assert abs(contour[n] - coeffs[n]) <= 1e-8 * abs(coeffs[n])


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 4))
def test_formal_solution_sweeps_bounded(N):
    m = BetaModel(gamma=Fraction(2), rho=1, r_max=3, amplitude=Fraction(1, 10), beta2=1)
    s = solve_formal(m, N, 4)
    assert s.sweeps <= 6
