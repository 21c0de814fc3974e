"""Perturbative solution of the flow as truncated power series.

Two ring types carry the same recursion:

* :class:`TruncatedPoly`, multivariate polynomials in the renormalised
  couplings ``(lambda, alpha, mu)`` truncated above a total degree, with exact
  ``Fraction`` coefficients when the model is exact;
* :class:`Jet`, univariate truncated series in ``lambda`` with complex
  coefficients, at fixed numerical ``alpha`` and ``mu``.

In both rings the running couplings solve

    v_k = thin_a(k) - gamma**(-c_a k) f_{a,0}(v_0) - sum_{j<=k} gamma**(c_a (j-k)) beta_{a,j}(v)

with ``thin = (lambda, alpha, gamma**(-2k) mu)`` and ``c = (0, 0, 2)`` for the
types ``(4, 2', 2)``. Every correction is at least quadratic, so plain
iteration stabilises one degree per sweep.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np

from .beta_model import (
    ARGUMENT_TYPES,
    BetaModel,
    CouplingType,
    beta_from_couplings,
    f2_scale0,
    f2p_scale0,
    f4_scale0,
    tail_sums,
)

__all__ = [
    "SingularJet",
    "TruncatedPoly",
    "Jet",
    "FormalSolution",
    "solve_formal",
    "solve_jets",
    "thin_value",
    "empty_value",
    "square_value",
    "beta_series",
]

_FOUR, _TWOP, _TWO = CouplingType.FOUR, CouplingType.TWO_PRIME, CouplingType.TWO


class SingularJet(ZeroDivisionError):
    """Division by a series whose constant term vanishes."""


def _is_scalar(x) -> bool:
    return isinstance(x, (int, float, complex, Fraction, np.number))


class TruncatedPoly:
    """Polynomial in ``(lambda, alpha, mu)`` modulo monomials of total degree ``> K``.

    Parameters
    ----------
    terms : dict
        Map ``(i, j, l) -> coefficient`` for ``lambda**i alpha**j mu**l``.
    K : int
        Truncation degree.

    Examples
    --------
    >>> lam = TruncatedPoly.variable(0, 2)
    >>> (1 + lam) ** 3
    TruncatedPoly({(0, 0, 0): 1, (1, 0, 0): 3, (2, 0, 0): 3}, K=2)
    """

    __slots__ = ("terms", "K")

    def __init__(self, terms: dict | None = None, K: int = 4):
        self.K = int(K)
        self.terms = {e: c for e, c in (terms or {}).items() if c != 0 and sum(e) <= self.K}

    @classmethod
    def variable(cls, index: int, K: int, coef=1) -> "TruncatedPoly":
        e = [0, 0, 0]
        e[index] = 1
        return cls({tuple(e): coef}, K)

    @classmethod
    def constant(cls, c, K: int) -> "TruncatedPoly":
        return cls({(0, 0, 0): c}, K)

    def __repr__(self) -> str:
        return f"TruncatedPoly({dict(sorted(self.terms.items()))}, K={self.K})"

    def _coerce(self, other) -> "TruncatedPoly":
        if isinstance(other, TruncatedPoly):
            return other
        if _is_scalar(other):
            return TruncatedPoly.constant(other, self.K)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return TruncatedPoly(out, min(self.K, other.K))

    __radd__ = __add__

    def __neg__(self):
        return TruncatedPoly({e: -c for e, c in self.terms.items()}, self.K)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            return TruncatedPoly({e: c * other for e, c in self.terms.items()}, self.K)
        if not isinstance(other, TruncatedPoly):
            return NotImplemented
        K = min(self.K, other.K)
        out: dict = {}
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, c2 in other.terms.items():
                if d1 + sum(e2) > K:
                    continue
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                out[e] = out.get(e, 0) + c1 * c2
        return TruncatedPoly(out, K)

    __rmul__ = __mul__

    def __pow__(self, p: int):
        out = TruncatedPoly.constant(1, self.K)
        for _ in range(int(p)):
            out = out * self
        return out

    def reciprocal(self) -> "TruncatedPoly":
        c = self.terms.get((0, 0, 0), 0)
        if c == 0:
            raise SingularJet("singular jet")
        inv = Fraction(1) / c if isinstance(c, (int, Fraction)) else 1.0 / c
        rest = (self - c) * inv
        out = TruncatedPoly.constant(1, self.K)
        power = TruncatedPoly.constant(1, self.K)
        for _ in range(self.K):
            power = power * (-rest)
            out = out + power
        return out * inv

    def __truediv__(self, other):
        if _is_scalar(other):
            inv = Fraction(1) / other if isinstance(other, (int, Fraction)) else 1.0 / other
            return self * inv
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return (self - other).terms == {}

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def min_degree(self) -> int | None:
        return min((sum(e) for e in self.terms), default=None)

    def min_lambda_degree(self) -> int | None:
        return min((e[0] for e in self.terms), default=None)

    def project(self, max_lambda: int, max_total: int) -> "TruncatedPoly":
        """Keep monomials with ``lambda``-degree ``<= max_lambda`` and total ``<= max_total``."""
        return TruncatedPoly({e: c for e, c in self.terms.items()
                              if e[0] <= max_lambda and sum(e) <= max_total}, self.K)

    def evaluate(self, lam=0, alpha=0, mu=0):
        total = 0
        for (i, j, l), c in self.terms.items():
            total = total + c * lam ** i * alpha ** j * mu ** l
        return total

    def lambda_coefficients(self, n_max: int) -> list:
        """Coefficients of ``lambda**n`` at ``alpha = mu = 0`` for ``n = 0..n_max``."""
        return [self.terms.get((n, 0, 0), 0) for n in range(n_max + 1)]


class Jet:
    """Truncated series ``sum_{n<=K} c_n lambda**n`` with complex coefficients.

    Examples
    --------
    >>> x = Jet.variable(3)
    >>> (1 / (1 - x)).coeffs.real.tolist()
    [1.0, 1.0, 1.0, 1.0]
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=complex)

    @property
    def K(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def variable(cls, K: int) -> "Jet":
        c = np.zeros(K + 1, dtype=complex)
        if K >= 1:
            c[1] = 1
        return cls(c)

    @classmethod
    def constant(cls, value, K: int) -> "Jet":
        c = np.zeros(K + 1, dtype=complex)
        c[0] = value
        return cls(c)

    def __repr__(self) -> str:
        return f"Jet({self.coeffs.tolist()})"

    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        if _is_scalar(other):
            return Jet.constant(complex(other), self.K)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Jet(self.coeffs + other.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            return Jet(self.coeffs * complex(other))
        if not isinstance(other, Jet):
            return NotImplemented
        return Jet(np.convolve(self.coeffs, other.coeffs)[: self.K + 1])

    __rmul__ = __mul__

    def __pow__(self, p: int):
        out = Jet.constant(1, self.K)
        for _ in range(int(p)):
            out = out * self
        return out

    def reciprocal(self) -> "Jet":
        a = self.coeffs
        if a[0] == 0:
            raise SingularJet("singular jet")
        b = np.zeros_like(a)
        b[0] = 1 / a[0]
        for n in range(1, len(a)):
            b[n] = -np.dot(a[1:n + 1], b[n - 1::-1][:n]) / a[0]
        return Jet(b)

    def __truediv__(self, other):
        if _is_scalar(other):
            return Jet(self.coeffs / complex(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other


def thin_value(m: BetaModel, a: CouplingType, k: int, renorm: tuple):
    """Renormalised-coupling term of type ``a`` at scale ``k``."""
    lam, alpha, mu = renorm
    if a is _FOUR:
        return lam
    if a is _TWOP:
        return alpha
    return mu * m.gamma_power(-2 * k)


def _f_scale0(a: CouplingType, lam0, mu0):
    if a is _FOUR:
        return f4_scale0(lam0, mu0)
    if a is _TWOP:
        return f2p_scale0(lam0, mu0)
    return f2_scale0(mu0)


def empty_value(m: BetaModel, a: CouplingType, k: int, v: dict):
    """``-gamma**(-c_a k) f_{a,0}(v_0)``."""
    c = CouplingType(a).scaling_exponent
    return -(m.gamma_power(-c * k) * _f_scale0(a, v[_FOUR][0], v[_TWO][0]))


def beta_series(m: BetaModel, a: CouplingType, v: dict) -> list:
    """``beta_{a,j}(v)`` for ``j = 0..N`` in the ring of ``v``."""
    N = len(v[_FOUR]) - 1
    decay = m.decay
    w4 = tail_sums(v[_FOUR], decay)
    other = [v[_TWOP][h] + v[_TWO][h] for h in range(N + 1)]
    wo = tail_sums(other, decay)
    return [beta_from_couplings(m, a, j, v[_FOUR][j], v[_TWOP][j], v[_TWO][j], w4[j], wo[j])
            for j in range(N + 1)]


def square_value(m: BetaModel, a: CouplingType, k: int, v: dict, betas: dict | None = None):
    """``-sum_{j<=k} gamma**(c_a (j-k)) beta_{a,j}(v)``."""
    c = CouplingType(a).scaling_exponent
    b = betas[a] if betas is not None else beta_series(m, a, v)
    acc = 0
    for j in range(k + 1):
        acc = acc + m.gamma_power(c * (j - k)) * b[j]
    return -acc


def _sweep(m: BetaModel, v: dict, renorm: tuple) -> dict:
    N = len(v[_FOUR]) - 1
    betas = {a: beta_series(m, a, v) for a in ARGUMENT_TYPES}
    new = {}
    for a in ARGUMENT_TYPES:
        c = a.scaling_exponent
        f0 = _f_scale0(a, v[_FOUR][0], v[_TWO][0])
        row = []
        acc = 0
        for k in range(N + 1):
            # running sum of gamma**(c(j-k)) beta_j rescaled by one step per scale
            acc = acc * m.gamma_power(-c) + betas[a][k]
            row.append(thin_value(m, a, k, renorm) - m.gamma_power(-c * k) * f0 - acc)
        new[a] = row
    return new


class FormalSolution:
    """Running couplings as truncated polynomials, with cached endpoint values.

    Attributes
    ----------
    model : BetaModel
    N, K : int
        Cutoff and truncation degree.
    v : dict
        ``v[a][k]`` for the argument types and ``k = 0..N``.
    sweeps : int
        Number of iterations until the series stopped changing.
    """

    def __init__(self, model: BetaModel, N: int, K: int, v: dict, sweeps: int):
        self.model, self.N, self.K, self.v, self.sweeps = model, N, K, v, sweeps
        self._betas = None
        self._cache: dict = {}
        lam, al, mu = (TruncatedPoly.variable(i, K) for i in range(3))
        self.renorm = (lam, al, mu)

    @property
    def betas(self) -> dict:
        if self._betas is None:
            self._betas = {a: beta_series(self.model, a, self.v) for a in ARGUMENT_TYPES}
        return self._betas

    def endpoint(self, kind: str, a: CouplingType, scale: int) -> TruncatedPoly:
        """Value of an endpoint drawn at ``scale``; it refers to coupling scale ``scale - 1``."""
        key = (kind, a, scale)
        if key not in self._cache:
            k = scale - 1
            if kind == "fat":
                # scale 0 carries the renormalised coupling itself
                val = thin_value(self.model, a, 0, self.renorm) if k < 0 else self.v[a][k]
            elif kind == "thin":
                val = thin_value(self.model, a, max(k, 0), self.renorm)
            elif kind == "empty":
                val = empty_value(self.model, a, k, self.v)
            elif kind == "square":
                val = square_value(self.model, a, k, self.v, self.betas)
            else:
                raise ValueError(f"unknown endpoint kind {kind!r}")
            if not isinstance(val, TruncatedPoly):
                val = TruncatedPoly.constant(val, self.K)
            self._cache[key] = val
        return self._cache[key]


def solve_formal(m: BetaModel, N: int, K: int) -> FormalSolution:
    """Formal running couplings on scales ``0..N`` modulo total degree ``> K``.

    Examples
    --------
    >>> from fractions import Fraction
    >>> m = BetaModel(gamma=Fraction(2), rho=1, r_max=2, amplitude=Fraction(1, 10), beta2=1,
    ...               cross_terms=False)
    >>> s = solve_formal(m, 0, 4)
    >>> s.v[CouplingType.FOUR][0].lambda_coefficients(4)
    [0, 1, -1, 2, -5]
    """
    lam, al, mu = (TruncatedPoly.variable(i, K) for i in range(3))
    renorm = (lam, al, mu)
    v = {a: [thin_value(m, a, k, renorm) for k in range(N + 1)] for a in ARGUMENT_TYPES}
    sweeps = 0
    for sweeps in range(1, K + 3):
        new = _sweep(m, v, renorm)
        same = all(new[a][k] == v[a][k] for a in ARGUMENT_TYPES for k in range(N + 1))
        v = new
        if same:
            break
    return FormalSolution(m, N, K, v, sweeps)


def solve_jets(m: BetaModel, N: int, n_max: int, alpha: complex = 0, mu: complex = 0,
               tol: float = 1e-15, max_iter: int = 500) -> dict:
    """Running couplings as ``lambda``-jets of order ``n_max`` at fixed ``alpha, mu``.

    Returns
    -------
    dict
        ``v[a][k]`` as :class:`Jet`, plus ``"sweeps"``.
    """
    lam = Jet.variable(n_max)
    renorm = (lam, Jet.constant(alpha, n_max), Jet.constant(mu, n_max))
    v = {a: [thin_value(m, a, k, renorm) for k in range(N + 1)] for a in ARGUMENT_TYPES}
    sweeps = 0
    for sweeps in range(1, max_iter + 1):
        new = _sweep(m, v, renorm)
        d = max(float(np.abs(new[a][k].coeffs - v[a][k].coeffs).max())
                for a in ARGUMENT_TYPES for k in range(N + 1))
        v = new
        if d <= tol:
            break
    v["sweeps"] = sweeps
    return v


def monomials(K: int):
    """All exponent triples of total degree ``<= K``."""
    return [e for e in product(range(K + 1), repeat=3) if sum(e) <= K]

