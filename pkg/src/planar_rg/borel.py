"""Borel transform, Pade continuation, Laplace resummation and the remainder test.

For a series ``sum a_n z**n`` the Borel transform is ``B(t) = sum a_n t**n / n!``
and the Borel sum is ``f(z) = integral_0^inf exp(-u) B(z u) du``. ``B`` is
continued beyond its disk of convergence by a diagonal Pade approximant; when
the approximant does not reproduce the supplied coefficients (an entire
transform such as ``exp(t)`` is poorly captured by low-order rationals) the
truncated Taylor polynomial of ``B`` is integrated instead.

The remainder test checks ``|f(z) - sum_{n<M} a_n z**n| <= C**M M! |z|**M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .beta_model import BetaModel, CouplingType
from .domains import ComplexDomain, DomainError, contains
from .formal_flow import Jet, solve_jets

__all__ = [
    "PowerSeries",
    "BorelReport",
    "ContinuationObstruction",
    "borel_transform",
    "pade",
    "borel_sum",
    "taylor_coefficients",
    "check_nevanlinna_sokal",
    "read_series",
    "write_series",
    "geometric_series",
    "euler_series",
    "gauss_laguerre",
]


class ContinuationObstruction(ArithmeticError):
    """A Pade pole lies on the integration ray."""


@dataclass
class PowerSeries:
    """Coefficients ``a_0..a_K`` of a (possibly divergent) power series."""

    coeffs: np.ndarray
    exact: bool = False
    rational: list | None = None

    def __post_init__(self):
        if self.rational is None and any(isinstance(c, Fraction) for c in self.coeffs):
            self.rational = [Fraction(c) for c in self.coeffs]
            self.exact = True
        self.coeffs = np.asarray([complex(c) for c in self.coeffs], dtype=complex)
        if self.coeffs.size == 0:
            raise ValueError("a series needs at least one coefficient")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("coefficients must be finite")

    @property
    def K(self) -> int:
        return len(self.coeffs) - 1

    def partial_sum(self, z: complex, M: int) -> complex:
        """``sum_{n<M} a_n z**n``."""
        return complex(np.polyval(self.coeffs[:M][::-1], z)) if M > 0 else 0j

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        n = min(self.K, other.K) + 1
        return PowerSeries(self.coeffs[:n] + other.coeffs[:n])

    def scale(self, c: complex) -> "PowerSeries":
        return PowerSeries(self.coeffs * c)


def geometric_series(K: int) -> PowerSeries:
    return PowerSeries([Fraction(1)] * (K + 1))


def euler_series(K: int) -> PowerSeries:
    """``a_n = (-1)**n n!``."""
    return PowerSeries([Fraction((-1) ** n * math.factorial(n)) for n in range(K + 1)])


def borel_transform(s: PowerSeries) -> PowerSeries:
    """Coefficients ``a_n / n!``.

    Examples
    --------
    >>> borel_transform(euler_series(4)).coeffs.real.tolist()
    [1.0, -1.0, 1.0, -1.0, 1.0]
    """
    if s.rational is not None:
        return PowerSeries([c / math.factorial(n) for n, c in enumerate(s.rational)])
    fact = np.array([math.factorial(n) for n in range(s.K + 1)], dtype=float)
    return PowerSeries(s.coeffs / fact)


@dataclass
class PadeApproximant:
    """``P(t)/Q(t)`` in the scaled variable ``t / scale``."""

    p: np.ndarray
    q: np.ndarray
    scale: float
    cond: float

    @property
    def orders(self) -> tuple[int, int]:
        return len(self.p) - 1, len(self.q) - 1

    def __call__(self, t):
        s = np.asarray(t) / self.scale
        return np.polyval(self.p[::-1], s) / np.polyval(self.q[::-1], s)

    def poles(self) -> np.ndarray:
        q = np.trim_zeros(self.q, "b")
        if len(q) <= 1:
            return np.array([], dtype=complex)
        return np.roots(q[::-1]) * self.scale

    def taylor(self, n_terms: int) -> np.ndarray:
        """Taylor coefficients of ``P/Q`` in the original variable."""
        out = np.zeros(n_terms, dtype=complex)
        p = np.zeros(n_terms, dtype=complex)
        p[: min(n_terms, len(self.p))] = self.p[:n_terms]
        for n in range(n_terms):
            acc = p[n]
            for j in range(1, min(n, len(self.q) - 1) + 1):
                acc -= self.q[j] * out[n - j]
            out[n] = acc / self.q[0]
        return out / self.scale ** np.arange(n_terms)


def _pade_once(b: np.ndarray, m: int, max_cond: float):
    if m == 0:
        return b[:1].copy(), np.ones(1, dtype=complex), 1.0
    A = np.array([[b[m + i - j] if m + i - j >= 0 else 0 for j in range(1, m + 1)]
                  for i in range(1, m + 1)], dtype=complex)
    rhs = -np.array([b[m + i] for i in range(1, m + 1)], dtype=complex)
    cond = float(np.linalg.cond(A))
    if not cond <= max_cond:
        return None, None, cond
    q = np.concatenate([[1.0], np.linalg.solve(A, rhs)])
    p = np.array([sum(q[j] * b[i - j] for j in range(0, min(i, m) + 1)) for i in range(m + 1)])
    return p, q, cond


def pade(b: Sequence[complex], max_cond: float = 1e10) -> PadeApproximant:
    """Diagonal Pade approximant of largest order with a well-conditioned system.

    The order ``m`` satisfies ``2m + 1 < len(b)`` so at least one coefficient is
    left over to validate the approximant. The variable is rescaled so the
    coefficients are of comparable size.

    Examples
    --------
    >>> r = pade([1, -1, 1, -1, 1, -1, 1, -1])
    >>> r.orders, bool(abs(r(0.5) - 1 / 1.5) < 1e-12)
    ((1, 1), True)
    """
    b = np.asarray(b, dtype=complex)
    nz = [abs(c) ** (1.0 / n) for n, c in enumerate(b) if n > 0 and c != 0]
    with np.errstate(over="ignore", divide="ignore"):
        scale = 1.0 / max(nz) if nz else 1.0
    if not math.isfinite(scale):
        scale = 1.0
    bs = b * scale ** np.arange(len(b))
    # keep at least one coefficient outside the fit to validate the approximant
    for m in range(max(len(b) - 2, 0) // 2, -1, -1):
        p, q, cond = _pade_once(bs, m, max_cond)
        if p is not None:
            return PadeApproximant(p, q, scale, cond)
    raise ArithmeticError("no stable Pade approximant")


@lru_cache(maxsize=None)
def gauss_laguerre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``int_0^inf exp(-u) g(u) du`` (Golub-Welsch).

    The symmetric Jacobi matrix of the Laguerre recurrence has diagonal
    ``2i + 1`` and off-diagonal ``i + 1``; its eigenvalues are the nodes and the
    squared first eigenvector components the weights. Unlike the
    three-term-recurrence construction this stays finite for hundreds of nodes,
    the far weights simply underflow to zero.

    Examples
    --------
    >>> x, w = gauss_laguerre(8)
    >>> round(float(w @ x**3), 10)
    6.0
    """
    i = np.arange(n, dtype=float)
    off = i[1:]
    J = np.diag(2 * i + 1) + np.diag(off, 1) + np.diag(off, -1)
    x, vecs = np.linalg.eigh(J)
    return x, vecs[0] ** 2


@dataclass
class BorelSumResult:
    value: complex
    error: float
    nodes: int
    method: str
    pade_orders: tuple

    def __iter__(self):
        yield self.value
        yield self.error


def _continuation(b: PowerSeries, rtol: float):
    """Return ``(callable, method, orders, poles)`` representing the Borel transform."""
    approx = pade(b.coeffs)
    mp, mq = approx.orders
    used = mp + mq + 1
    ok = True
    if used < len(b.coeffs):
        t = approx.taylor(len(b.coeffs))
        scale = np.abs(b.coeffs) * approx.scale ** -np.arange(len(b.coeffs))
        ref = b.coeffs
        err = np.abs(t[used:] - ref[used:])
        tol = rtol * np.maximum(np.abs(ref[used:]), 1e-300)
        ok = bool(np.all(err <= tol)) and bool(np.all(np.isfinite(scale)))
    if ok and mq > 0:
        return approx, "pade", (mp, mq), approx.poles()
    coeffs = b.coeffs

    def poly(t):
        return np.polyval(coeffs[::-1], t)
    return poly, "taylor", (b.K, 0), np.array([], dtype=complex)


def borel_sum(s: PowerSeries, z: complex, tol: float = 1e-10, max_nodes: int = 512,
              domain: ComplexDomain | None = None, rtol_pade: float = 1e-8) -> BorelSumResult:
    """Laplace integral of the continued Borel transform along ``arg t = arg z``.

    Parameters
    ----------
    s : PowerSeries
    z : complex
        Evaluation point; checked against ``domain`` when given.
    tol : float
        Agreement required between successive Gauss-Laguerre rules
        (16, 32, ... nodes, at most ``max_nodes``).

    Raises
    ------
    DomainError
        If ``z`` lies outside ``domain``.
    ContinuationObstruction
        If a Pade pole lies on the ray ``{z u : u > 0}`` within the node span.

    Examples
    --------
    >>> r = borel_sum(geometric_series(60), 0.5)
    >>> abs(r.value - 2) < 1e-10
    True
    """
    z = complex(z)
    if domain is not None and not contains(domain, z):
        raise DomainError("outside lemma domain")
    if z == 0:
        return BorelSumResult(complex(s.coeffs[0]), 0.0, 0, "trivial", (0, 0))
    b = borel_transform(s)
    fn, method, orders, poles = _continuation(b, rtol_pade)
    x_all, w_all = gauss_laguerre(max_nodes)
    span = float(np.max(x_all[w_all > 0]))
    for p in poles:
        u = p / z
        if abs(u.imag) <= 1e-8 * max(1.0, abs(u)) and 0 < u.real <= span:
            raise ContinuationObstruction("continuation obstruction")
    prev = None
    n = 16
    while True:
        x, w = gauss_laguerre(n)
        with np.errstate(over="ignore", invalid="ignore"):
            vals = fn(z * x)
        # far nodes with vanishing weight may overflow a polynomial continuation
        vals = np.where(w > 0, vals, 0)
        val = complex(np.sum(w * vals))
        if prev is not None:
            err = abs(val - prev)
            if err <= tol * max(1.0, abs(val)) or n >= max_nodes:
                return BorelSumResult(val, err, n, method, orders)
        prev = val
        n *= 2


# --------------------------------------------------------------- flow series

def taylor_coefficients(m: BetaModel, n_max: int, observable: Callable | tuple = ("lambda", 2),
                        N: int = 10, alpha: complex = 0, mu: complex = 0) -> PowerSeries:
    """Coefficients in ``lambda`` (at fixed ``alpha, mu``) of a flow observable.

    Parameters
    ----------
    observable : (name, scale) or callable
        ``("lambda" | "alpha" | "mu", k)`` selects a running coupling on scale
        ``k``; a callable receives the jets ``v[type][k]`` and returns a
        :class:`~planar_rg.formal_flow.Jet`.

    Examples
    --------
    >>> c = taylor_coefficients(BetaModel(r_max=2, cross_terms=False), 4, ("lambda", 0), N=0)
    >>> c.coeffs.real.round(12).tolist()
    [0.0, 1.0, -1.0, 2.0, -5.0]
    """
    v = solve_jets(m, N, n_max, alpha, mu)
    if callable(observable):
        jet = observable(v)
    else:
        name, k = observable
        key = {"lambda": CouplingType.FOUR, "alpha": CouplingType.TWO_PRIME,
               "mu": CouplingType.TWO}[name]
        jet = v[key][k]
    if not isinstance(jet, Jet):
        raise TypeError("observable must return a Jet")
    return PowerSeries(jet.coeffs.copy())


@dataclass
class BorelReport:
    borel_coeffs: np.ndarray
    pade_orders: tuple
    quadrature: dict
    sums: dict
    ns_constant: float
    ns_pass: bool
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["z_re,z_im,M,remainder,ratio"]
        for z, M, rem, ratio in self.rows:
            lines.append(f"{z.real:.17g},{z.imag:.17g},{M},{rem:.17g},{ratio:.17g}")
        return "\n".join(lines) + "\n"


def _log_slope(points):
    Ms = np.array([M for M, _ in points], dtype=float)
    return float(np.polyfit(Ms, np.log([r for _, r in points]), 1)[0])


def check_nevanlinna_sokal(s: PowerSeries, f_values: dict, z_set: Sequence[complex],
                           M_max: int, margin: float = 0.5, floor: float = 0.0,
                           quadrature: dict | None = None) -> BorelReport:
    """Remainder ratios ``|f(z) - sum_{n<M} a_n z**n| / (M! |z|**M)``.

    ``C`` (``ns_constant``) is the supremum over ``(z, M)`` of the ``M``-th roots
    of the ratios. Growth is judged per ``z``: coefficients of size ``C**n n!``
    make ``log ratio`` at most linear in ``M``. The bound is an upper bound, so
    the ratios are replaced by their running maximum (dips from cancellations
    carry no information) and the least-squares slope over the upper half of the informative orders must not exceed the slope over the
    lower half by more than ``margin``. Super-factorial coefficients make
    ``log ratio`` convex and fail this test. Remainders at or below ``floor``
    (the accuracy of ``f``) carry no information and are skipped.

    Parameters
    ----------
    s : PowerSeries
    f_values : dict
        ``z -> f(z)`` computed independently of ``s``.
    z_set : sequence of complex
    M_max : int
        Largest order tested (capped by ``s.K + 1``).
    """
    rows = []
    roots = []
    growth_ok = True
    for z in z_set:
        z = complex(z)
        f = complex(f_values[z])
        usable = []
        for M in range(1, min(M_max, s.K + 1) + 1):
            rem = abs(f - s.partial_sum(z, M))
            ratio = rem / (math.factorial(M) * abs(z) ** M)
            rows.append((z, M, rem, ratio))
            if rem > floor and ratio > 0:
                roots.append(ratio ** (1.0 / M))
                usable.append((M, ratio))
        usable = [(M, r) for (M, _), r in
                  zip(usable, np.maximum.accumulate([r for _, r in usable]))]
        half = (len(usable) + 1) // 2
        low, high = usable[:half], usable[half:]
        if len(high) >= 2:
            if len(low) >= 2:
                base = _log_slope(low)
            else:
                base = max(math.log(r) / M for M, r in low)
            if _log_slope(high) > base + margin:
                growth_ok = False
    C = max(roots, default=0.0)
    try:
        _, _, orders, _ = _continuation(borel_transform(s), 1e-8)
    except ArithmeticError:
        orders = (0, 0)
    sums = {complex(z): complex(f_values[complex(z)]) for z in z_set}
    return BorelReport(borel_transform(s).coeffs, orders,
                       quadrature or {"rule": "gauss-laguerre"}, sums, C,
                       bool(np.isfinite(C)) and growth_ok, rows)


# -------------------------------------------------------------------- I/O

def read_series(text: str) -> PowerSeries:
    """One coefficient per line: ``re im`` or an exact ``p/q`` rational."""
    vals = []
    rational = True
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) == 1:
            vals.append(Fraction(parts[0]))
        elif len(parts) == 2 and "/" not in line:
            vals.append(complex(float(parts[0]), float(parts[1])))
            rational = False
        elif len(parts) == 2:
            re, im = Fraction(parts[0]), Fraction(parts[1])
            if im != 0:
                rational = False
                vals.append(complex(re, im))
            else:
                vals.append(re)
        else:
            raise ValueError(f"bad coefficient line: {line!r}")
    if rational:
        return PowerSeries(vals)
    return PowerSeries([complex(v) for v in vals])


def write_series(s: PowerSeries) -> str:
    if s.rational is not None:
        return "".join(f"{c}\n" for c in s.rational)
    return "".join(f"{c.real:.17g} {c.imag:.17g}\n" for c in s.coeffs)
