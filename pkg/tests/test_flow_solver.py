import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from planar_rg.beta_model import BetaModel
from planar_rg.domains import DomainError
from planar_rg.flow_solver import (
    SolverOptions,
    asymptotic_ratios,
    cutoff_scaling,
    diagnostics_contraction,
    flow_equation_residual,
    flow_nu,
    solve_full,
    solve_scales_ge1,
)

M = BetaModel()


def second_order_lambda0(lam, beta0=1.0):
    """Root of ``lam = lam0 + beta0 lam0**2`` continuing the identity at ``lam = 0``."""
    return (-1 + cmath.sqrt(1 + 4 * beta0 * lam)) / (2 * beta0)


def test_zero_point_is_trivial():
    r = solve_full(M, 0, 0, 0, SolverOptions(N=10))
    assert r.certified
    assert np.all(r.seq.lam == 0) and np.all(r.seq.alpha == 0) and np.all(r.seq.mu == 0)


@pytest.mark.parametrize("lam", [0.01, 0.03, 0.02 * cmath.exp(1j)])
def test_truncated_flow_closed_form(lam):
    m = BetaModel(r_max=2, cross_terms=False)
    r = solve_full(m, lam, 0, 0, SolverOptions(N=60))
    lam0 = second_order_lambda0(lam)
    k = np.arange(61)
    assert np.max(np.abs(r.seq.lam - 1 / (1 / lam0 + k))) <= 1e-14


def test_truncated_flow_mass_decays_geometrically():
    m = BetaModel(r_max=2, cross_terms=False)
    r = solve_full(m, 0, 0, 0.02, SolverOptions(N=30))
    mu0 = r.seq.mu[0]
    k = np.arange(31)
    assert np.allclose(r.seq.mu, mu0 * 4.0 ** (-k), rtol=0, atol=1e-16)


@pytest.mark.parametrize("point", [(0.02, 0, 0), (0.02, 0.01, 0.01), (0.03, -0.02, 0.03)])
def test_flow_equations_hold(point):
    r = solve_full(M, *point, SolverOptions(N=50))
    assert r.certified
    assert flow_equation_residual(M, r.seq, *point) <= 1e-11


def test_outside_watson_sector_rejected():
    with pytest.raises(DomainError, match="outside lemma domain"):
        solve_full(M, -0.02, 0, 0)


def test_scale_ge1_lemma_domain():
    with pytest.raises(DomainError):
        solve_scales_ge1(M, 0.5, (0, 0), SolverOptions(N=10))


@settings(max_examples=15, deadline=None)
@given(st.floats(0.005, 0.04), st.floats(-1.0, 1.0), st.floats(-0.04, 0.04), st.floats(-0.04, 0.04))
def test_conjugation_symmetry(r, phi, alpha, mu):
    lam = r * cmath.exp(1j * phi)
    opts = SolverOptions(N=20)
    a = solve_full(M, lam, alpha, mu, opts).seq
    b = solve_full(M, lam.conjugate(), alpha, mu, opts).seq
    assert np.allclose(a.lam, b.lam.conj(), atol=1e-14)
    assert np.allclose(a.mu, b.mu.conj(), atol=1e-14)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.005, 0.04), st.floats(-0.04, 0.04), st.floats(-0.04, 0.04))
def test_asymptotic_freedom_bounds(lam, alpha, mu):
    r = solve_full(M, lam, alpha, mu, SolverOptions(N=60))
    lam_k = np.abs(r.seq.lam)
    # quartic coupling decays like 1/k
    k = np.arange(1, 61)
    assert np.all(lam_k[1:] * (1 / lam + k) <= 3.0)
    q = asymptotic_ratios(r, 2.0)
    assert math.isfinite(q["alpha"]) and math.isfinite(q["mu"])


def test_cutoff_differences_shrink():
    d = cutoff_scaling(M, 0.02, 0, 0, Ns=(10, 20, 40), Nprime=80, opts=SolverOptions())
    diffs = [row["lambda"] for row in d["rows"]]
    assert diffs[0] > diffs[1] > diffs[2]
    assert d["slope"] < 0


def test_contraction_ratios_below_one():
    d = diagnostics_contraction(M, SolverOptions(N=20), n_samples=10, seed=3)
    assert d["ratio_Ttilde"] < 1 and d["ratio_T"] < 1


def test_contraction_sampling_deterministic():
    a = diagnostics_contraction(M, SolverOptions(N=10), n_samples=5, seed=7)
    b = diagnostics_contraction(M, SolverOptions(N=10), n_samples=5, seed=7)
    assert a["ratios_T"] == b["ratios_T"]


def test_vacuum_coupling_recursion():
    r = solve_full(M, 0.02, 0.01, 0.01, SolverOptions(N=10))
    nu = flow_nu(M, 0.003, r.seq)
    assert nu.shape == (12,)
    assert nu[0] == 0.003
