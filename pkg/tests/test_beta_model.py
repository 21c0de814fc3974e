import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from planar_rg.beta_model import (
    ARGUMENT_TYPES,
    BetaModel,
    CouplingType,
    ScaleOrderError,
    beta_all,
    beta_bar_all,
    coefficient,
    remainder_all,
    remainder_R,
    scale0_functions,
)
from planar_rg.couplings import CouplingSequence

T4, T2P, T2, T0 = CouplingType.FOUR, CouplingType.TWO_PRIME, CouplingType.TWO, CouplingType.ZERO


def brute_force_beta(m, a, k, seq):
    """Direct sum over argument types and scales of single coefficients."""
    vals = {T4: seq.lam, T2P: seq.alpha, T2: seq.mu}
    total = 0j
    for r in range(2, m.r_max + 1):
        for types in itertools.product(ARGUMENT_TYPES, repeat=r):
            for scales in itertools.product(range(k, seq.N + 1), repeat=r):
                c = coefficient(m, a, types, k, scales)
                if c:
                    total += float(c) * np.prod([vals[t][h] for t, h in zip(types, scales)])
    return total


def random_seq(rng, N, size=0.05):
    def draw():
        return size * (rng.uniform(-1, 1, N + 1) + 1j * rng.uniform(-1, 1, N + 1))
    return CouplingSequence(N, draw(), draw(), draw())


@pytest.mark.parametrize("a", [T4, T2P, T2, T0])
@pytest.mark.parametrize("cross", [True, False])
def test_beta_matches_coefficient_sum(a, cross):
    m = BetaModel(r_max=3, cross_terms=cross, rho=0.7, amplitude=0.3)
    seq = random_seq(np.random.default_rng(1), 3)
    got = beta_all(m, a, seq)
    for k in range(seq.N + 1):
        assert got[k] == pytest.approx(brute_force_beta(m, a, k, seq), rel=1e-12, abs=1e-18)


@given(st.lists(st.sampled_from(ARGUMENT_TYPES), min_size=2, max_size=4),
       st.sampled_from([T4, T2P, T2, T0]), st.integers(0, 5))
def test_structural_zeros(types, a, k):
    m = BetaModel(r_max=4)
    c = coefficient(m, a, types, k, [k + i for i in range(len(types))])
    if sum(t is T4 for t in types) < a.min_quartic:
        assert c == 0


@given(st.integers(3, 4), st.lists(st.integers(0, 6), min_size=4, max_size=4))
def test_higher_order_weight(r, gaps):
    m = BetaModel(r_max=4, amplitude=0.2, rho=0.5)
    gaps = gaps[:r]
    c = coefficient(m, T4, [T4] * r, 1, [1 + g for g in gaps])
    assert c == pytest.approx(0.2 ** (r - 1) * 2.0 ** (-0.5 * sum(gaps)))


def test_second_order_is_local():
    m = BetaModel()
    assert coefficient(m, T4, [T4, T4], 2, [2, 3]) == 0
    assert coefficient(m, T4, [T4, T4], 2, [2, 2]) == 1.0


def test_scale_order_violation():
    with pytest.raises(ScaleOrderError, match="scale ordering violated"):
        coefficient(BetaModel(), T4, [T4, T4], 3, [2, 3])


def test_exact_mode_is_rational():
    m = BetaModel(gamma=Fraction(2), rho=1, amplitude=Fraction(1, 10), beta2=1)
    c = coefficient(m, T4, [T4, T4, T2], 0, [1, 0, 2])
    assert c == Fraction(1, 100) * Fraction(1, 8)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_remainder_inverts_quartic_step(seed):
    m = BetaModel()
    seq = random_seq(np.random.default_rng(seed), 4, 0.03)
    beta4 = beta_all(m, T4, seq)
    R = remainder_all(m, seq)
    for j in range(seq.N + 1):
        previous = seq.lam[j] + beta4[j]
        assert 1 / previous == pytest.approx(1 / seq.lam[j] - 1.0 + R[j], rel=1e-10)
        assert remainder_R(m, j, seq) == pytest.approx(R[j])


def test_no_cross_terms_no_remainder():
    m = BetaModel(cross_terms=False)
    seq = random_seq(np.random.default_rng(0), 3)
    assert np.all(remainder_all(m, seq) == 0)
    assert np.all(beta_bar_all(m, seq) == 0)
    assert np.all(beta_all(m, T2, seq) == 0)


def test_vanishing_coupling_reported():
    seq = CouplingSequence.constant(2, 0.1, 0, 0)
    seq.lam[1] = 0
    with pytest.raises(ZeroDivisionError, match="scale 1"):
        remainder_all(BetaModel(), seq)


@pytest.mark.parametrize("bad", [dict(gamma=1.0), dict(rho=0), dict(r_max=1), dict(amplitude=0)])
def test_invalid_model(bad):
    with pytest.raises(ValueError):
        BetaModel(**bad)


def test_scale0_split_identities():
    m = BetaModel()
    lam0, a0, mu0, mu = 0.02, 0.01, 0.015, 0.012
    s = scale0_functions(m, lam0, (a0, mu0), mu)
    assert s.tilde_f_4 == pytest.approx(mu / (1 + mu))
    assert s.tilde_f_2p == pytest.approx(-(mu / (1 + mu)) ** 2)
    assert s.f_2 == pytest.approx(mu0 ** 2 / (1 - mu0))
    assert s.f_4 == pytest.approx(lam0 * mu0)
