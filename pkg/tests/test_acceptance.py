"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
Each check returns ``(ok, detail)``; the pytest wrappers print the line and
assert ``ok``, so a failing criterion shows up as a failing test.
"""

from __future__ import annotations

import cmath
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.special import exp1

from planar_rg.beta_model import BetaModel, CouplingType
from planar_rg.borel import (
    borel_sum,
    check_nevanlinna_sokal,
    euler_series,
    geometric_series,
    taylor_coefficients,
)
from planar_rg.flow_solver import (
    SolverOptions,
    asymptotic_ratios,
    cutoff_scaling,
    diagnostics_contraction,
    solve_full,
    solve_scales_ge1,
)
from planar_rg.formal_flow import solve_jets
from planar_rg.gn_trees import (
    TreeValuation,
    count_trees,
    enumerate_trees,
    gamma_sum_inequality,
    loglinear_fit,
    n_nontrivial_2p4,
    order,
    order4,
    parse_tree,
    verify_n_factorial_bound,
)
from planar_rg.remainder_extraction import (
    ExtractionContext,
    TreeSum,
    certify_remainder_bound,
    default_extraction_model,
    run_extraction,
)

sys.path.insert(0, str(Path(__file__).resolve().parent))
from test_gn_trees import _canon, _to_oracle, brute_force_forms  # noqa: E402

T4, T2P, T2 = CouplingType.FOUR, CouplingType.TWO_PRIME, CouplingType.TWO


def second_order_lambda0(lam, beta=1.0):
    return (-1 + cmath.sqrt(1 + 4 * beta * lam)) / (2 * beta)


def euler_oracle(z):
    return math.exp(1 / z) * exp1(1 / z) / z


# ------------------------------------------------------------------ checks

def check_1():
    """Truncated second-order flow against ``1/(1/lambda_0 + k beta)``."""
    t0 = time.perf_counter()
    m = BetaModel(r_max=2, cross_terms=False)
    k = np.arange(101)
    err = 0.0
    for lam in (0.02, 0.04, 0.02 * cmath.exp(0.8j)):
        r = solve_full(m, lam, 0, 0, SolverOptions(N=100))
        exact = 1 / (1 / second_order_lambda0(lam, m.beta2) + k * m.beta2)
        err = max(err, float(np.max(np.abs(r.seq.lam - exact))))
    dt = time.perf_counter() - t0
    return err <= 1e-12 and dt < 1, f"max error {err:.2e}, {dt:.2f} s"


def check_2():
    """Cold outer iteration at ``lambda = 0.02``: >= 10 contracting steps."""
    t0 = time.perf_counter()
    m = BetaModel()
    res = solve_full(m, 0.02, 0, 0)
    seq, diag = solve_scales_ge1(m, res.lam0, (res.alpha0, res.mu0))
    d = [x for x in diag["outer_distances"] if x > 0]
    ratios = [b / a for a, b in zip(d, d[1:])]
    decaying = sum(1 for r in ratios if r < 1)
    dt = time.perf_counter() - t0
    ok = decaying >= 10 and all(r < 1 for r in ratios) and diag["residual"] <= 1e-12 \
        and res.residual <= 1e-12 and dt < 5
    return ok, (f"{len(d)} outer iterates, {decaying} contracting steps "
                f"(ratios {', '.join(f'{r:.1e}' for r in ratios)}), "
                f"residual {diag['residual']:.1e}, {dt:.2f} s")


def check_3():
    t0 = time.perf_counter()
    d = diagnostics_contraction(BetaModel(), SolverOptions(), n_samples=100, seed=0)
    dt = time.perf_counter() - t0
    ok = d["ratio_Ttilde"] < 1 and d["ratio_T"] < 1 and dt < 30
    return ok, f"Ttilde {d['ratio_Ttilde']:.3f}, T {d['ratio_T']:.3f}, {dt:.1f} s"


def check_4():
    """One constant ``c`` fitted on the grid bounds both asymptotic ratios, also off-grid."""
    t0 = time.perf_counter()
    m = BetaModel()
    lams = [0.01, 0.02, 0.04, 0.02 * cmath.exp(0.6j), 0.02 * cmath.exp(-0.6j)]
    xs = np.linspace(-0.04, 0.04, 5)
    c = 0.0
    for lam in lams:
        for a in xs:
            for u in xs:
                r = asymptotic_ratios(solve_full(m, lam, a, u, SolverOptions(N=100)), m.gamma)
                c = max(c, r["alpha"], r["mu"])
    rng = np.random.default_rng(0)
    held = 0.0
    for _ in range(20):
        lam = rng.uniform(0.005, 0.04) * cmath.exp(1j * rng.uniform(-0.6, 0.6))
        a, u = rng.uniform(-0.04, 0.04, 2)
        r = asymptotic_ratios(solve_full(m, lam, a, u, SolverOptions(N=100)), m.gamma)
        held = max(held, r["alpha"], r["mu"])
    dt = time.perf_counter() - t0
    ok = math.isfinite(c) and held <= c and dt < 120
    return ok, f"fitted c {c:.3f}, held-out max {held:.3f}, {dt:.1f} s"


def check_5():
    t0 = time.perf_counter()
    m = BetaModel()
    slopes = []
    for pt in [(0.02, 0, 0), (0.02, 0.01, 0.01), (0.04, 0, 0)]:
        r = cutoff_scaling(m, *pt, Ns=(20, 40, 80), Nprime=160)
        diffs = [row["lambda"] for row in r["rows"]]
        slopes.append((r["slope"], all(b < a for a, b in zip(diffs, diffs[1:]))))
    dt = time.perf_counter() - t0
    ok = all(s <= -0.8 and dec for s, dec in slopes) and dt < 60
    return ok, f"slopes {', '.join(f'{s:.2f}' for s, _ in slopes)}, {dt:.1f} s"


def check_6():
    t0 = time.perf_counter()
    match = True
    for n in range(1, 5):
        forms = [_canon(_to_oracle(t.child)) for t in enumerate_trees(n, -1, 3)]
        match &= len(forms) == len(set(forms)) and set(forms) == brute_force_forms(n, -1, 3)
        match &= count_trees(n, -1, 3) == len(forms)
    counts = [count_trees(n, -1, 3) for n in range(1, 7)]
    _, r2 = loglinear_fit(counts)
    dt = time.perf_counter() - t0
    return match and r2 >= 0.99 and dt < 60, f"counts {counts}, R^2 {r2:.4f}, {dt:.1f} s"


def check_7():
    """Single ``C`` fitted on ``m <= 2`` must bound ``m <= 5``; gamma-sum inequality."""
    t0 = time.perf_counter()
    m = BetaModel()
    seq = solve_full(m, 0.02, 0.01, 0.01, SolverOptions(N=10)).seq
    v = TreeValuation(renormalized=(0.02, 0.01, 0.01, 0))
    out = verify_n_factorial_bound(5, v, seq, n_max=2, fit_m=2, max_scale=3)
    over = {k: round(r, 2) for k, r in sorted(out["ratios"].items()) if r > out["C"] * (1 + 1e-12)}
    ineq = all(lhs <= rhs * (1 + 1e-12)
               for p in (2, 4) for b in (0.5, 1.0, 3.0)
               for k in range(21) for f in range(7)
               for lhs, rhs in [gamma_sum_inequality(k, f, b, power=p)])
    dt = time.perf_counter() - t0
    ok = out["pass"] and ineq and dt < 120
    return ok, (f"fitted C {out['C']:.2f}, exceeded at (n, m) {over or 'none'}, "
                f"gamma-sum inequality {'holds' if ineq else 'fails'}, {dt:.1f} s")


def check_8():
    t0 = time.perf_counter()
    model = default_extraction_model()
    types = (T4, T2P, T2)
    inputs = [t for k in (1, 2, 3) for t in enumerate_trees(k, -1, 2, types=types)]
    runs, max_steps, ok = 0, 0, True
    for N in (1, 2):
        for n, M in [(0, 0), (1, 1), (1, 2), (2, 2), (2, 3), (0, 3), (1, 3)]:
            ctx = ExtractionContext(model, N, M + 1)
            for t in inputs:
                if order(t) > 3:
                    continue
                st = run_extraction([(t, 1)], n, M, ctx)
                total = st.F.value(ctx) + st.R1.value(ctx) + st.R2.value(ctx)
                ok &= total == TreeSum([(t, 1)]).value(ctx)
                ok &= st.step <= M + 1
                ok &= all(order4(x) > n for x, _ in st.R1)
                ok &= all(n_nontrivial_2p4(x) <= n for x in st.all_trees())
                max_steps = max(max_steps, st.step)
                runs += 1
    dt = time.perf_counter() - t0
    return ok and dt < 120, f"{runs} exact runs, max macro-steps {max_steps}, {dt:.1f} s"


def check_9():
    """``(|R1| / (n! lambda**(n+1)))**(1/n)``: ``C`` from ``n <= 2`` bounds ``n = 3``."""
    t0 = time.perf_counter()
    model = default_extraction_model()
    tree = parse_tree("(root scale=1 (ep fat 4 2))")
    roots = []
    for n in range(4):
        ctx = ExtractionContext(model, 2, n + 2)
        st = run_extraction([(tree, 1)], n, n + 1, ctx)
        roots.append(certify_remainder_bound(st, ctx, lam=0.02)["root1"])
    C = max(roots[:3])
    dt = time.perf_counter() - t0
    ok = roots[3] <= C and all(math.isfinite(r) for r in roots) and dt < 120
    return ok, f"roots {', '.join(f'{r:.2f}' for r in roots)}, C {C:.2f}, {dt:.1f} s"


def check_10():
    t0 = time.perf_counter()
    geo = borel_sum(geometric_series(60), 0.5)
    geo_err = abs(geo.value - 2.0)
    zs = [0.05, 0.1, 0.2]
    eul = euler_series(20)
    eul_err = max(abs(borel_sum(eul, z).value - euler_oracle(z)) for z in zs)
    ns_geo = check_nevanlinna_sokal(geometric_series(14), {0.3 + 0j: 1 / 0.7}, [0.3], 12).ns_pass
    ns_eul = check_nevanlinna_sokal(euler_series(14), {complex(z): euler_oracle(z) for z in zs},
                                    zs, 12).ns_pass
    m = BetaModel()
    N, scale = 10, 3
    jet = taylor_coefficients(m, 12, ("lambda", scale), N=N)
    opts = SolverOptions(N=N, check_domains=False)
    zf = [0.01, 0.02, 0.03, 0.02 * cmath.exp(0.5j), 0.02 * cmath.exp(-0.5j)]
    fv = {complex(z): solve_full(m, z, 0, 0, opts).seq.lam[scale] for z in zf}
    ns_flow = check_nevanlinna_sokal(jet, fv, zf, 10, floor=1e-14).ns_pass
    radius, P = 0.01, 32
    nodes = radius * np.exp(2j * np.pi * np.arange(P) / P)
    vals = np.array([solve_full(m, z, 0, 0, opts).seq.lam[scale] for z in nodes])
    contour = np.fft.fft(vals) / P / radius ** np.arange(P)
    jets = solve_jets(m, N, 4)[T4][scale].coeffs
    deriv_err = max(abs(contour[n] - jets[n]) / abs(jets[n]) for n in range(1, 5))
    dt = time.perf_counter() - t0
    ok = (geo_err <= 1e-10 and eul_err <= 1e-8 and ns_geo and ns_eul and ns_flow
          and deriv_err <= 1e-6 and dt < 60)
    return ok, (f"geometric error {geo_err:.1e}, Euler error {eul_err:.1e}, "
                f"NS geometric/Euler/flow {ns_geo}/{ns_eul}/{ns_flow}, "
                f"jet vs contour {deriv_err:.1e}, {dt:.1f} s")


CHECKS = {i: globals()[f"check_{i}"] for i in range(1, 11)}


def _line(i, ok, detail):
    return f"criterion {i}: {'PASS' if ok else 'FAIL'} ({detail})"


def _run(i, capsys):
    ok, detail = CHECKS[i]()
    with capsys.disabled():
        print("\n" + _line(i, ok, detail))
    assert ok, detail


def test_criterion_1_exact_truncated_flow(capsys):
    _run(1, capsys)


def test_criterion_2_outer_iteration_decay(capsys):
    _run(2, capsys)


def test_criterion_3_contraction(capsys):
    _run(3, capsys)


def test_criterion_4_asymptotics(capsys):
    _run(4, capsys)


def test_criterion_5_cutoff_stability(capsys):
    _run(5, capsys)


def test_criterion_6_tree_enumeration(capsys):
    _run(6, capsys)


def test_criterion_7_factorial_bound(capsys):
    _run(7, capsys)


def test_criterion_8_extraction_exactness(capsys):
    _run(8, capsys)


def test_criterion_9_remainder_bound(capsys):
    _run(9, capsys)


def test_criterion_10_borel(capsys):
    _run(10, capsys)


if __name__ == "__main__":
    failed = 0
    for i, fn in CHECKS.items():
        ok, detail = fn()
        failed += not ok
        print(_line(i, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
