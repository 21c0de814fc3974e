"""Nested fixed-point construction of the running couplings.

Scales ``k >= 1`` are obtained from the scale-0 couplings by alternating two
maps. For fixed ``x = (lambda_1..lambda_N)`` the map ``T~`` acting on
``y = (alpha_k, mu_k)_{k>=1}`` is

    alpha_k = alpha_0 - sum_{j<=k} beta_{2',j}(x, y),
    mu_k    = gamma**(-2k) mu_0 - sum_{j<=k} gamma**(2(j-k)) beta_{2,j}(x, y),

and for fixed ``y`` the map ``T`` acting on ``x`` is

    (T x)_k = 1 / (1/lambda_0 + sum_{j<=k} beta_j - sum_{j<=k} R_j(x, y)).

The outer iteration is ``y <- lim T~^n y`` followed by ``x <- T x``, started
from ``alpha_k = mu_k = eta_bar`` and ``x_k = 1/(1/lambda_0 + sum beta_j)``.
Scale 0 is then matched to the renormalised couplings ``(lambda, alpha, mu)``
by two further contractions (one for ``(alpha_0, mu_0)``, one for
``lambda_0``), each evaluation re-solving the scales above.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .beta_model import (
    BetaModel,
    CouplingType,
    FlowSingularity,
    beta_all,
    f2_scale0,
    f2p_scale0,
    f4_scale0,
    remainder_all,
    scale0_functions,
)
from .couplings import CouplingSequence
from .domains import ComplexDomain, DomainError, contains

__all__ = [
    "SolverOptions",
    "FlowResult",
    "ContractionFailure",
    "InvariantSetViolation",
    "CouplingSequence",
    "map_T",
    "map_Ttilde",
    "solve_scales_ge1",
    "solve_scale0",
    "solve_full",
    "flow_nu",
    "flow_equation_residual",
    "membership_t",
    "sample_S",
    "diagnostics_contraction",
    "diagnostics_cutoff",
    "cutoff_scaling",
    "asymptotic_ratios",
    "decay_constant",
]


class ContractionFailure(RuntimeError):
    """Successive outer distances failed to shrink."""


class InvariantSetViolation(DomainError):
    """A scale-0 iterate left its invariant set."""


@dataclass(frozen=True)
class SolverOptions:
    """Solver tolerances and domain parameters.

    Attributes
    ----------
    epsilon_bar, eta_bar : float
        Domain radii for ``lambda`` and for ``(alpha, mu)``.
    theta : float
        Watson aperture.
    N : int
        Ultraviolet cutoff.
    tol_inner, tol_outer : float
        Stopping thresholds on successive sup-distances.
    max_iter_inner, max_iter : int
        Iteration caps of the inner and outer loops.
    check_domains : bool
        Enforce the lemma domains and scale-0 invariant sets. Disabling it lets
        the finite-cutoff solution be continued analytically outside them.
    """

    epsilon_bar: float = 0.05
    eta_bar: float = 0.05
    theta: float = math.pi / 2
    N: int = 100
    tol_inner: float = 1e-14
    tol_outer: float = 1e-12
    max_iter_inner: int = 200
    max_iter: int = 500
    check_domains: bool = True

    def with_(self, **kw) -> "SolverOptions":
        return replace(self, **kw)


@dataclass
class FlowResult:
    """Certified solution of the flow for one renormalised point."""

    seq: CouplingSequence
    lam0: complex
    alpha0: complex
    mu0: complex
    renormalized: tuple[complex, complex, complex]
    iterations_inner: int
    iterations_outer: int
    residual: float
    certified: bool
    diagnostics: dict = field(default_factory=dict)


def _sup(a) -> float:
    a = np.asarray(a)
    return float(np.abs(a).max()) if a.size else 0.0


def _assemble(N: int, lam0, alpha0, mu0, x, ya, ym) -> CouplingSequence:
    lam = np.empty(N + 1, dtype=complex)
    alpha = np.empty(N + 1, dtype=complex)
    mu = np.empty(N + 1, dtype=complex)
    lam[0], alpha[0], mu[0] = lam0, alpha0, mu0
    lam[1:], alpha[1:], mu[1:] = x, ya, ym
    return CouplingSequence(N, lam, alpha, mu)


def map_T(m: BetaModel, lam0: complex, alpha: np.ndarray, mu: np.ndarray,
          x: np.ndarray) -> np.ndarray:
    """Apply the quartic map ``T`` to ``x = (x_1..x_N)``.

    Parameters
    ----------
    m : BetaModel
    lam0 : complex
        Scale-0 quartic coupling, non-zero.
    alpha, mu : ndarray
        Couplings ``(alpha_k, mu_k)`` for ``k = 1..N``.
    x : ndarray
        Trial quartic couplings ``x_k`` for ``k = 1..N``.

    Returns
    -------
    ndarray
        ``(T x)_k`` for ``k = 1..N``.

    Raises
    ------
    FlowSingularity
        "flow singularity at scale k" if a denominator vanishes.
    """
    x = np.asarray(x, dtype=complex)
    N = len(x)
    seq = _assemble(N, lam0, 0, 0, x, alpha, mu)
    beta = m.beta_k_array(N)[1:]
    R = remainder_all(m, seq)[1:]
    den = 1.0 / lam0 + np.cumsum(beta - R)
    if np.any(den == 0):
        k = int(np.flatnonzero(den == 0)[0]) + 1
        raise FlowSingularity(f"flow singularity at scale {k}")
    return 1.0 / den


def _mu_flow(gamma2: float, mu0: complex, b2: np.ndarray) -> np.ndarray:
    out = np.empty(len(b2), dtype=complex)
    prev = mu0
    for i, b in enumerate(b2):
        prev = prev / gamma2 - b
        out[i] = prev
    return out


def map_Ttilde(m: BetaModel, xi0: tuple[complex, complex], x: np.ndarray,
               alpha: np.ndarray, mu: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Apply the map ``T~`` to ``y = (alpha_k, mu_k)_{k=1..N}`` at fixed ``x``.

    Examples
    --------
    >>> import numpy as np
    >>> a, u = map_Ttilde(BetaModel(), (0.0, 0.1), np.zeros(3), np.zeros(3), np.zeros(3))
    >>> bool(abs(u[2] - 0.1 / 64) < 1e-15)
    True
    """
    x = np.asarray(x, dtype=complex)
    N = len(x)
    seq = _assemble(N, 0, 0, 0, x, alpha, mu)
    b2p = beta_all(m, CouplingType.TWO_PRIME, seq)[1:]
    b2 = beta_all(m, CouplingType.TWO, seq)[1:]
    alpha_new = xi0[0] - np.cumsum(b2p)
    mu_new = _mu_flow(float(m.gamma) ** 2, complex(xi0[1]), b2)
    return alpha_new, mu_new


def _check_lemma_domain(lam0, xi0, opts: SolverOptions) -> None:
    if not opts.check_domains:
        return
    w = ComplexDomain.watson(2 * opts.epsilon_bar, opts.theta / 2)
    b = ComplexDomain.ball(2 * opts.eta_bar)
    if not (contains(w, lam0) and contains(b, xi0[0]) and contains(b, xi0[1])):
        raise DomainError("outside lemma domain")


def _inner(m, xi0, x, ya, ym, opts):
    for n in range(1, opts.max_iter_inner + 1):
        na, nm = map_Ttilde(m, xi0, x, ya, ym)
        d = max(_sup(na - ya), _sup(nm - ym))
        ya, ym = na, nm
        if d <= opts.tol_inner:
            break
    return ya, ym, n


def initial_lambda(m: BetaModel, lam0: complex, N: int) -> np.ndarray:
    """Second-order data ``x_k = 1/(1/lambda_0 + sum_{j<=k} beta_j)``."""
    beta = m.beta_k_array(N)[1:]
    return 1.0 / (1.0 / lam0 + np.cumsum(beta))


def solve_scales_ge1(m: BetaModel, lam0: complex, xi0: tuple[complex, complex],
                     opts: SolverOptions = SolverOptions(),
                     warm: CouplingSequence | None = None) -> tuple[CouplingSequence, dict]:
    """Running couplings on scales ``1..N`` as functions of the scale-0 ones.

    Parameters
    ----------
    m : BetaModel
    lam0 : complex
        Scale-0 quartic coupling.
    xi0 : (complex, complex)
        ``(alpha_0, mu_0)``.
    opts : SolverOptions
    warm : CouplingSequence, optional
        Starting point replacing the second-order initial data.

    Returns
    -------
    seq : CouplingSequence
        Fixed point, with the scale-0 entries set to the inputs.
    diagnostics : dict
        ``outer_distances`` (sup-distance of successive quartic iterates),
        ``iterations_outer``, ``iterations_inner`` (total), ``residual``.

    Raises
    ------
    DomainError
        "outside lemma domain" when ``(lambda_0, alpha_0, mu_0)`` is not in
        ``W_{2 eps, theta/2} x B_{2 eta} x B_{2 eta}``.
    ContractionFailure
        When the outer distance ratio is ``>= 1`` for five consecutive steps.
    """
    lam0 = complex(lam0)
    xi0 = (complex(xi0[0]), complex(xi0[1]))
    _check_lemma_domain(lam0, xi0, opts)
    N = opts.N
    if lam0 == 0:
        x = np.zeros(N, dtype=complex)
        ya, ym, n_in = _inner(m, xi0, x, np.zeros(N, complex), np.zeros(N, complex), opts)
        seq = _assemble(N, 0, xi0[0], xi0[1], x, ya, ym)
        return seq, {"outer_distances": [], "iterations_outer": 0,
                     "iterations_inner": n_in, "residual": 0.0}
    if warm is not None and warm.N == N:
        x, ya, ym = warm.lam[1:].copy(), warm.alpha[1:].copy(), warm.mu[1:].copy()
    else:
        x = initial_lambda(m, lam0, N)
        ya = np.full(N, opts.eta_bar, dtype=complex)
        ym = np.full(N, opts.eta_bar, dtype=complex)
    dists: list[float] = []
    total_inner = 0
    bad = 0
    it = 0
    for it in range(1, opts.max_iter + 1):
        ya, ym, n_in = _inner(m, xi0, x, ya, ym, opts)
        total_inner += n_in
        x_new = map_T(m, lam0, ya, ym, x)
        d = _sup(x_new - x)
        x = x_new
        if dists and dists[-1] > 0 and d / dists[-1] >= 1.0 and d > opts.tol_outer:
            bad += 1
            if bad >= 5:
                raise ContractionFailure("contraction failure")
        else:
            bad = 0
        dists.append(d)
        if d <= opts.tol_outer:
            break
    ya, ym, n_in = _inner(m, xi0, x, ya, ym, opts)
    total_inner += n_in
    ra, rm = map_Ttilde(m, xi0, x, ya, ym)
    rx = map_T(m, lam0, ya, ym, x)
    residual = max(_sup(rx - x), _sup(ra - ya), _sup(rm - ym))
    seq = _assemble(N, lam0, xi0[0], xi0[1], x, ya, ym)
    return seq, {"outer_distances": dists, "iterations_outer": it,
                 "iterations_inner": total_inner, "residual": residual}


def _check_renormalized(lam, alpha, mu, opts: SolverOptions) -> None:
    if not opts.check_domains:
        return
    w = ComplexDomain.watson(opts.epsilon_bar, opts.theta)
    b = ComplexDomain.ball(opts.eta_bar)
    if not (contains(w, lam) and contains(b, alpha) and contains(b, mu)):
        raise DomainError("outside lemma domain")


def solve_scale0(m: BetaModel, lam: complex, alpha: complex, mu: complex,
                 opts: SolverOptions = SolverOptions()):
    """Scale-0 couplings ``(lambda_0, alpha_0, mu_0)`` from the renormalised ones.

    First ``(alpha_0, mu_0)`` is found as the fixed point of
    ``mu_0 = mu/(1+mu) + g_2``, ``alpha_0 = alpha + tilde_f_2p(mu) + g_2p`` at the
    current ``lambda_0``; then ``lambda_0`` is updated by
    ``M x = lambda~ + (-beta_0 x**2 + h(x)) / (1 + tilde_f_4(mu))`` with
    ``lambda~ = lambda / (1 + tilde_f_4(mu))``. Every evaluation of ``g`` and ``h``
    re-solves the scales ``>= 1``.

    Returns
    -------
    (lam0, alpha0, mu0, seq, diagnostics)

    Raises
    ------
    InvariantSetViolation
        "invariant-set violation" when an iterate leaves
        ``W_{3 eps/2, 2 theta/3}`` or ``B_{3 eta/2}``.
    """
    lam, alpha, mu = complex(lam), complex(alpha), complex(mu)
    _check_renormalized(lam, alpha, mu, opts)
    wat = ComplexDomain.watson(1.5 * opts.epsilon_bar, 2 * opts.theta / 3)
    ball = ComplexDomain.ball(1.5 * opts.eta_bar)
    tf4 = mu / (1 + mu)
    lam_t = lam / (1 + tf4)
    beta0 = float(m.beta_k(0))
    lam0 = 0j if lam == 0 else lam_t
    xi = (alpha, mu / (1 + mu))
    seq = None
    diag = {"scale0_outer": 0, "scale0_inner": 0, "outer_distances": [],
            "iterations_outer": 0, "iterations_inner": 0, "residual": 0.0}

    def resolve(l0, x0, warm):
        s, d = solve_scales_ge1(m, l0, x0, opts, warm)
        diag["iterations_inner"] += d["iterations_inner"]
        diag["iterations_outer"] += d["iterations_outer"]
        return s, d

    def check(l0, x0):
        if not opts.check_domains:
            return
        if not (contains(ball, x0[0]) and contains(ball, x0[1])):
            raise InvariantSetViolation("invariant-set violation")
        if l0 != 0 and not contains(wat, l0):
            raise InvariantSetViolation("invariant-set violation")

    last = None
    for outer in range(1, opts.max_iter + 1):
        diag["scale0_outer"] = outer
        for _ in range(opts.max_iter):
            diag["scale0_inner"] += 1
            seq, last = resolve(lam0, xi, seq)
            s0 = scale0_functions(m, lam0, xi, mu, seq)
            new = (alpha + s0.tilde_f_2p + s0.g_2p, mu / (1 + mu) + s0.g_2)
            check(lam0, new)
            d = max(abs(new[0] - xi[0]), abs(new[1] - xi[1]))
            xi = new
            if d <= opts.tol_outer:
                break
        if lam == 0:
            break
        seq, last = resolve(lam0, xi, seq)
        s0 = scale0_functions(m, lam0, xi, mu, seq)
        new_lam0 = lam_t + (-beta0 * lam0 ** 2 + s0.h) / (1 + s0.tilde_f_4)
        check(new_lam0, xi)
        d = abs(new_lam0 - lam0)
        lam0 = new_lam0
        if d <= opts.tol_outer:
            break
    seq, last = resolve(lam0, xi, seq)
    s0 = scale0_functions(m, lam0, xi, mu, seq)
    res0 = max(abs(alpha + s0.tilde_f_2p + s0.g_2p - xi[0]),
               abs(mu / (1 + mu) + s0.g_2 - xi[1]))
    if lam != 0:
        res0 = max(res0, abs(lam_t + (-beta0 * lam0 ** 2 + s0.h) / (1 + s0.tilde_f_4) - lam0))
    diag["outer_distances"] = last["outer_distances"]
    diag["residual"] = max(res0, last["residual"])
    diag["scale0_residual"] = res0
    return lam0, xi[0], xi[1], seq, diag


def membership_t(m: BetaModel, seq: CouplingSequence) -> np.ndarray:
    """``t_k = 1/lambda_k - 1/lambda_0 - sum_{1<=j<=k} beta_j`` for ``k = 1..N``."""
    beta = m.beta_k_array(seq.N)[1:]
    return 1.0 / seq.lam[1:] - 1.0 / seq.lam[0] - np.cumsum(beta)


def solve_full(m: BetaModel, lam: complex, alpha: complex, mu: complex,
               opts: SolverOptions = SolverOptions()) -> FlowResult:
    """Running couplings on scales ``0..N`` from the renormalised ``(lambda, alpha, mu)``.

    The result is certified when the fixed-point residual is below
    ``tol_outer``, every ``|t_k| <= sqrt(eps + eta) k`` and every
    ``|alpha_k|, |mu_k| <= 4 eta`` for ``k >= 1``.

    Examples
    --------
    >>> r = solve_full(BetaModel(), 0, 0, 0, SolverOptions(N=5))
    >>> r.certified, float(abs(r.seq.lam).max())
    (True, 0.0)
    """
    lam, alpha, mu = complex(lam), complex(alpha), complex(mu)
    _check_renormalized(lam, alpha, mu, opts)
    N = opts.N
    if lam == 0 and alpha == 0 and mu == 0:
        return FlowResult(CouplingSequence.zeros(N), 0j, 0j, 0j, (lam, alpha, mu), 0, 0, 0.0,
                          True, {"outer_distances": []})
    lam0, a0, m0, seq, diag = solve_scale0(m, lam, alpha, mu, opts)
    residual = float(diag["residual"])
    certified = residual <= opts.tol_outer
    if lam != 0:
        t = membership_t(m, seq)
        ks = np.arange(1, N + 1)
        in_S = bool(np.all(np.abs(t) <= math.sqrt(opts.epsilon_bar + opts.eta_bar) * ks))
        diag["t"] = t
    else:
        in_S = True
    in_St = bool(np.all(np.abs(seq.alpha[1:]) <= 4 * opts.eta_bar)
                 and np.all(np.abs(seq.mu[1:]) <= 4 * opts.eta_bar))
    diag["in_S"], diag["in_S_tilde"] = in_S, in_St
    certified = certified and in_S and in_St
    return FlowResult(seq, lam0, a0, m0, (lam, alpha, mu), diag["iterations_inner"],
                      diag["iterations_outer"], residual, certified, diag)


def flow_equation_residual(m: BetaModel, seq: CouplingSequence, lam: complex,
                           alpha: complex, mu: complex) -> float:
    """Largest violation of the original (non-inverted) flow equations.

    Checks ``lambda_k = lambda_{k+1} + beta_{4,k+1}``,
    ``alpha_k = alpha_{k-1} - beta_{2',k}``,
    ``mu_k = gamma**-2 mu_{k-1} - beta_{2,k}`` for ``k >= 1`` and the scale-0
    relations with the correction functions. For a model without cross terms the
    quartic relation is the inverse one ``1/lambda_k = 1/lambda_{k+1} - beta_{k+1}``.
    """
    b4 = beta_all(m, CouplingType.FOUR, seq)
    b2p = beta_all(m, CouplingType.TWO_PRIME, seq)
    b2 = beta_all(m, CouplingType.TWO, seq)
    g2 = float(m.gamma) ** 2
    l, a, u = seq.lam, seq.alpha, seq.mu
    res = []
    if m.cross_terms:
        res.append(_sup(l[:-1] - l[1:] - b4[1:]))
    elif np.all(l != 0):
        beta = m.beta_k_array(seq.N)
        res.append(_sup(l[:-1] * l[1:] * (1 / l[:-1] - 1 / l[1:] + beta[1:])))
    res.append(_sup(a[1:] - a[:-1] + b2p[1:]))
    res.append(_sup(u[1:] - u[:-1] / g2 + b2[1:]))
    res.append(abs(lam - l[0] - f4_scale0(l[0], u[0]) - b4[0]))
    res.append(abs(a[0] - alpha + f2p_scale0(l[0], u[0]) + b2p[0]))
    res.append(abs(u[0] - mu + f2_scale0(u[0]) + b2[0]))
    return float(max(res))


def flow_nu(m: BetaModel, nu_renorm: complex, seq: CouplingSequence) -> np.ndarray:
    """Vacuum coupling ``nu_k`` for ``k = -1..N`` (index ``k + 1``).

    ``nu_k = gamma**-4 nu_{k-1} - beta_{0,k}``, equivalently
    ``nu_k = gamma**(-4(k+1)) nu_{-1} - sum_{j<=k} gamma**(4(j-k)) beta_{0,j}``.
    """
    b0 = beta_all(m, CouplingType.ZERO, seq)
    g4 = float(m.gamma) ** 4
    out = np.empty(seq.N + 2, dtype=complex)
    out[0] = nu_renorm
    for k in range(seq.N + 1):
        out[k + 1] = out[k] / g4 - b0[k]
    return out


def sample_S(m: BetaModel, lam0: complex, N: int, delta: float, rng: np.random.Generator):
    """Random element of ``S_{lambda_0, delta}``: ``|t_k| <= sqrt(delta) k``."""
    ks = np.arange(1, N + 1)
    r = rng.uniform(0, 1, N) * math.sqrt(delta) * ks
    t = r * np.exp(1j * rng.uniform(-math.pi, math.pi, N))
    beta = m.beta_k_array(N)[1:]
    return 1.0 / (1.0 / lam0 + np.cumsum(beta) + t)


def _sample_watson(rng, radius, theta):
    r = radius * math.sqrt(rng.uniform(0.01, 0.99))
    phi = rng.uniform(-(math.pi - theta), math.pi - theta) * 0.999
    return r * cmath.exp(1j * phi)


def _sample_ball(rng, radius, size=None):
    r = radius * np.sqrt(rng.uniform(0, 0.999, size))
    return r * np.exp(1j * rng.uniform(-math.pi, math.pi, size))


def diagnostics_contraction(m: BetaModel, opts: SolverOptions = SolverOptions(),
                            n_samples: int = 100, seed: int = 0,
                            holder_rho: float = 0.5) -> dict:
    """Empirical Lipschitz ratios of ``T~`` and ``T`` on random pairs.

    Each sample draws ``lambda_0`` in ``W_{2 eps, theta/2}``, ``(alpha_0, mu_0)`` in
    ``B_{2 eta}``, ``x, x'`` in ``S_{lambda_0, eps+eta}`` and ``y, y'`` in
    ``S~_{4 eta}``. The ``T`` ratio compares ``T_{y(x)} x`` with ``T_{y(x')} x'``
    where ``y(x)`` is the fixed point of ``T~`` at ``x``.

    Returns
    -------
    dict
        ``ratio_Ttilde``, ``ratio_T`` (maxima), ``holder`` (max of
        ``|y(x)-y(x')| / |x-x'|**holder_rho``) and the per-sample arrays.
    """
    rng = np.random.default_rng(seed)
    N = opts.N
    delta = opts.epsilon_bar + opts.eta_bar
    rt, rT, hol = [], [], []
    for _ in range(n_samples):
        lam0 = _sample_watson(rng, 2 * opts.epsilon_bar, opts.theta / 2)
        xi0 = tuple(_sample_ball(rng, 2 * opts.eta_bar, 2))
        x = sample_S(m, lam0, N, delta, rng)
        x2 = sample_S(m, lam0, N, delta, rng)
        ya, ym = _sample_ball(rng, 4 * opts.eta_bar, N), _sample_ball(rng, 4 * opts.eta_bar, N)
        yb, yn = _sample_ball(rng, 4 * opts.eta_bar, N), _sample_ball(rng, 4 * opts.eta_bar, N)
        a1, u1 = map_Ttilde(m, xi0, x, ya, ym)
        a2, u2 = map_Ttilde(m, xi0, x, yb, yn)
        dy = max(_sup(ya - yb), _sup(ym - yn))
        rt.append(max(_sup(a1 - a2), _sup(u1 - u2)) / dy)
        init = np.full(N, opts.eta_bar, dtype=complex)
        fa, fm, _ = _inner(m, xi0, x, init, init, opts)
        ga, gm, _ = _inner(m, xi0, x2, init, init, opts)
        dx = _sup(x - x2)
        tx = map_T(m, lam0, fa, fm, x)
        tx2 = map_T(m, lam0, ga, gm, x2)
        rT.append(_sup(tx - tx2) / dx)
        hol.append(max(_sup(fa - ga), _sup(fm - gm)) / dx ** holder_rho)
    return {"ratio_Ttilde": float(max(rt)), "ratio_T": float(max(rT)),
            "holder": float(max(hol)), "ratios_Ttilde": rt, "ratios_T": rT,
            "holder_values": hol}


def diagnostics_cutoff(m: BetaModel, lam: complex, alpha: complex, mu: complex, N: int,
                       Nprime: int, opts: SolverOptions = SolverOptions()) -> dict:
    """Sup-differences over ``k <= N`` between solutions with cutoffs ``N`` and ``N'``."""
    if Nprime < N:
        raise ValueError("N' must not be smaller than N")
    r1 = solve_full(m, lam, alpha, mu, opts.with_(N=N))
    r2 = r1 if Nprime == N else solve_full(m, lam, alpha, mu, opts.with_(N=Nprime))
    s1, s2 = r1.seq, r2.seq
    return {"N": N, "Nprime": Nprime,
            "lambda": _sup(s1.lam - s2.lam[:N + 1]),
            "alpha": _sup(s1.alpha - s2.alpha[:N + 1]),
            "mu": _sup(s1.mu - s2.mu[:N + 1])}


def cutoff_scaling(m: BetaModel, lam: complex, alpha: complex, mu: complex,
                   Ns=(20, 40, 80), Nprime: int = 160,
                   opts: SolverOptions = SolverOptions()) -> dict:
    """Log-log slope of the quartic cutoff difference against ``1/|lambda| + N``.

    A slope near ``-1`` reflects differences of size ``C / (1/eps + N)`` with
    ``eps = |lambda|``.
    """
    ref = solve_full(m, lam, alpha, mu, opts.with_(N=Nprime)).seq
    rows = []
    for N in Ns:
        s = solve_full(m, lam, alpha, mu, opts.with_(N=N)).seq
        rows.append({"N": N, "lambda": _sup(s.lam - ref.lam[:N + 1]),
                     "alpha": _sup(s.alpha - ref.alpha[:N + 1]),
                     "mu": _sup(s.mu - ref.mu[:N + 1])})
    xs = np.log(1.0 / abs(lam) + np.asarray(Ns, dtype=float))
    ys = np.log([r["lambda"] for r in rows])
    slope = float(np.polyfit(xs, ys, 1)[0])
    C = float(max(r["lambda"] * (1.0 / abs(lam) + r["N"]) for r in rows))
    return {"rows": rows, "slope": slope, "C": C}


def asymptotic_ratios(res: FlowResult, gamma: float, kmax: int | None = None) -> dict:
    """Ratios whose boundedness expresses the large-scale behaviour of ``alpha_k, mu_k``.

    ``|alpha_k - alpha| / (|lambda| + |mu|**2)`` and
    ``|mu_k - gamma**(-2k) mu| / (gamma**(-2k)|mu|**2 + (|lambda| + |xi|)|lambda_k|)``
    with ``|xi| = max(|alpha|, |mu|)``; the maxima over ``k <= kmax`` are returned.
    """
    lam, alpha, mu = res.renormalized
    seq = res.seq
    kmax = seq.N if kmax is None else min(kmax, seq.N)
    ks = np.arange(0, kmax + 1)
    xi = max(abs(alpha), abs(mu))
    da = np.abs(seq.alpha[ks] - alpha)
    den_a = abs(lam) + abs(mu) ** 2
    gk = float(gamma) ** (-2.0 * ks)
    du = np.abs(seq.mu[ks] - gk * mu)
    den_u = gk * abs(mu) ** 2 + (abs(lam) + xi) * np.abs(seq.lam[ks])
    with np.errstate(divide="ignore", invalid="ignore"):
        ra = np.where(den_a > 0, da / den_a, np.where(da > 0, np.inf, 0.0))
        ru = np.where(den_u > 0, du / den_u, np.where(du > 0, np.inf, 0.0))
    return {"alpha": float(ra.max()), "mu": float(ru.max())}


def decay_constant(seq: CouplingSequence) -> float:
    """Smallest ``C`` with ``|lambda_k| <= C/(1/|lambda_0| + k)`` and ``|lambda_k/lambda_h| <= C``, ``k >= h``."""
    lam = seq.lam
    ks = np.arange(seq.N + 1)
    c1 = float(np.max(np.abs(lam) * (1.0 / abs(lam[0]) + ks)))
    a = np.abs(lam)
    # max over k >= h of |lambda_k| / |lambda_h|: suffix maxima divided pointwise
    suffix = np.maximum.accumulate(a[::-1])[::-1]
    c2 = float(np.max(suffix / a))
    return max(c1, c2)
