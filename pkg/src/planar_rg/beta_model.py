"""Reference beta-function coefficients and the quantities derived from them.

The beta function at scale ``k`` is a power series in the running couplings on
scales ``h >= k``,

    (B v)^{(a)}_k = sum_{r >= 2} sum_{h_i >= k} sum_{a_i}
                    beta^{(a)}_{a_1..a_r}(k; h_1..h_r) prod_i v^{(a_i)}_{h_i},

with coupling types ``a`` in ``{4, 2', 2, 0}`` (``lambda, alpha, mu, nu``);
only ``4, 2', 2`` appear as arguments. The reference model used here:

* second order (``r = 2``) is local: only ``h_1 = h_2 = k`` contributes. The
  quartic self-coupling ``beta^{(4)}_{4,4}(k; k, k) = beta2(k)`` and every other
  admissible pair has weight ``amplitude``;
* for ``r >= 3`` the weight is ``amplitude**(r - 1) * gamma**(-rho * sum(h_i - k))``;
* structural zeros, with ``rbar`` the number of quartic arguments: type 4 and
  type 2' need ``rbar >= 2``, type 2 needs ``rbar >= 1``, type 0 has none.

Because the non-local weights factorise over arguments, scale sums reduce to
geometric tail sums ``W_j = sum_{h >= j} gamma**(-rho (h - j)) v_h``.

Examples
--------
>>> m = BetaModel()
>>> coefficient(m, CouplingType.FOUR, [CouplingType.FOUR, CouplingType.TWO], 3, [3, 4])
0.0
>>> coefficient(m, CouplingType.FOUR, [CouplingType.FOUR, CouplingType.FOUR], 2, [2, 2])
1.0
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb
from typing import Callable, Sequence

import numpy as np

from .couplings import CouplingSequence

__all__ = [
    "CouplingType",
    "BetaModel",
    "FlowSingularity",
    "ScaleOrderError",
    "Scale0Functions",
    "coefficient",
    "tail_sums",
    "beta_from_couplings",
    "beta_a",
    "beta_all",
    "beta_bar_all",
    "remainder_R",
    "remainder_all",
    "scale0_functions",
    "f4_scale0",
    "f2p_scale0",
    "f2_scale0",
]


class CouplingType(str, Enum):
    """Coupling type label with its per-scale rescaling exponent."""

    FOUR = "4"
    TWO_PRIME = "2'"
    TWO = "2"
    ZERO = "0"

    @property
    def scaling_exponent(self) -> int:
        """Exponent ``c`` such that one scale step rescales the coupling by ``gamma**-c``."""
        return {"4": 0, "2'": 0, "2": 2, "0": 4}[self.value]

    @property
    def min_quartic(self) -> int:
        """Minimal number of quartic arguments for a non-vanishing coefficient."""
        return {"4": 2, "2'": 2, "2": 1, "0": 0}[self.value]

    @classmethod
    def parse(cls, text: str) -> "CouplingType":
        text = str(text).strip().replace("p", "'")
        return cls(text)


ARGUMENT_TYPES = (CouplingType.FOUR, CouplingType.TWO_PRIME, CouplingType.TWO)


class FlowSingularity(ArithmeticError):
    """A denominator of the flow map vanished."""


class ScaleOrderError(ValueError):
    """Argument scales of a coefficient lie below the coefficient scale."""


@dataclass(frozen=True)
class BetaModel:
    """Immutable reference model of the beta-function coefficients.

    Parameters
    ----------
    gamma : float or Fraction
        Scale ratio, ``> 1``.
    rho : float
        Short-memory exponent in ``(0, 1]``.
    r_max : int
        Highest order kept in the ``r`` sum, ``>= 2``.
    beta2 : float or callable
        Second-order quartic coefficient ``beta_k``; a constant or ``k -> beta_k``.
    amplitude : float or Fraction
        Size of the remaining coefficients.
    cross_terms : bool
        When false only the local ``lambda_k**2`` term survives and the
        ``lambda`` flow is the second-order truncation
        ``1/lambda_k = 1/lambda_{k+1} - beta_{k+1}`` (no remainder ``R``).

    Notes
    -----
    Passing ``gamma`` and ``amplitude`` as ``Fraction`` with an integer ``rho``
    makes every coefficient an exact rational.
    """

    gamma: float | Fraction = 2.0
    rho: float = 0.5
    r_max: int = 3
    beta2: float | Fraction | Callable[[int], float] = 1.0
    amplitude: float | Fraction = 0.1
    cross_terms: bool = True

    def __post_init__(self) -> None:
        if not self.gamma > 1:
            raise ValueError("gamma must exceed 1")
        if not 0 < self.rho <= 1:
            raise ValueError("rho must lie in (0, 1]")
        if int(self.r_max) != self.r_max or self.r_max < 2:
            raise ValueError("r_max must be an integer >= 2")
        if not self.amplitude > 0:
            raise ValueError("amplitude must be positive")

    @property
    def exact(self) -> bool:
        return isinstance(self.gamma, Fraction) and float(self.rho).is_integer()

    @property
    def decay(self):
        """Per-scale suppression ``gamma**(-rho)``."""
        if self.exact:
            return self.gamma ** (-int(self.rho))
        return float(self.gamma) ** (-float(self.rho))

    def gamma_power(self, p: int):
        if isinstance(self.gamma, Fraction):
            return self.gamma ** p
        return float(self.gamma) ** p

    def beta_k(self, k: int):
        """Second-order coefficient ``beta_k > 0``."""
        value = self.beta2(k) if callable(self.beta2) else self.beta2
        if not value > 0:
            raise ValueError(f"beta_k must be positive, got {value} at k={k}")
        return value

    def beta_k_array(self, N: int) -> np.ndarray:
        return np.array([float(self.beta_k(k)) for k in range(N + 1)])

    def local_weight(self, a: CouplingType, pair: Sequence[CouplingType], k: int):
        """Weight of the local second-order term ``h_1 = h_2 = k``."""
        a = CouplingType(a)
        nq = sum(1 for t in pair if CouplingType(t) is CouplingType.FOUR)
        if nq < a.min_quartic:
            return 0
        if a is CouplingType.FOUR:
            return self.beta_k(k)
        if not self.cross_terms:
            return 0
        return self.amplitude

    def summability_constant(self) -> float:
        """Smallest ``K`` with ``sum_h |beta(k; h)| <= K**r`` for every coefficient family."""
        bound = max(float(self.beta_k(0)), float(self.beta_k(1)), float(self.amplitude)) ** 0.5
        tail = 1.0 / (1.0 - float(self.decay))
        for r in range(3, self.r_max + 1):
            bound = max(bound, (float(self.amplitude) ** (r - 1) * tail ** r) ** (1.0 / r))
        return bound

    def to_dict(self) -> dict:
        return {"gamma": float(self.gamma), "rho": float(self.rho), "r_max": int(self.r_max),
                "amplitude": float(self.amplitude),
                "beta2": float(self.beta_k(1)), "cross_terms": bool(self.cross_terms)}


def coefficient(m: BetaModel, a: CouplingType, a_vec: Sequence[CouplingType], k: int,
                h_vec: Sequence[int]):
    """Single coefficient ``beta^{(a)}_{a_vec}(k; h_vec)`` of the reference model.

    Parameters
    ----------
    m : BetaModel
    a : CouplingType
        Type of the coupling being renormalised.
    a_vec : sequence of CouplingType
        Argument types, ``2 <= len(a_vec) <= r_max``; type 0 never appears.
    k : int
        Scale of the coefficient.
    h_vec : sequence of int
        Argument scales, each ``>= k``.

    Returns
    -------
    float or Fraction
        Zero whenever a structural zero applies.

    Raises
    ------
    ScaleOrderError
        If some ``h_i < k`` ("scale ordering violated").
    """
    a = CouplingType(a)
    a_vec = [CouplingType(t) for t in a_vec]
    r = len(a_vec)
    if r != len(h_vec):
        raise ValueError("a_vec and h_vec must have equal length")
    if not 2 <= r <= m.r_max:
        raise ValueError(f"order r={r} outside [2, {m.r_max}]")
    if any(h < k for h in h_vec):
        raise ScaleOrderError("scale ordering violated")
    if any(t is CouplingType.ZERO for t in a_vec):
        raise ValueError("the vacuum coupling never enters the beta function")
    zero = Fraction(0) if m.exact else 0.0
    nq = sum(1 for t in a_vec if t is CouplingType.FOUR)
    if nq < a.min_quartic:
        return zero
    if r == 2:
        if h_vec[0] != k or h_vec[1] != k:
            return zero
        w = m.local_weight(a, a_vec, k)
        return Fraction(w) if m.exact else float(w)
    if not m.cross_terms:
        return zero
    gap = sum(h - k for h in h_vec)
    return m.amplitude ** (r - 1) * m.decay ** gap


def tail_sums(values: Sequence, decay) -> list:
    """``W_j = sum_{h >= j} decay**(h - j) values[h]`` for every ``j``."""
    n = len(values)
    out = [None] * n
    acc = None
    for j in range(n - 1, -1, -1):
        acc = values[j] if acc is None else values[j] + decay * acc
        out[j] = acc
    return out


def beta_from_couplings(m: BetaModel, a: CouplingType, k: int, lam, alpha, mu,
                        w_four, w_other):
    """Beta function of type ``a`` at scale ``k`` from local values and tail sums.

    Works for any ring-like operands (numbers, numpy arrays, truncated series)
    supporting ``+``, ``*`` and scalar multiplication. ``w_other`` is the tail
    sum of ``alpha + mu``.
    """
    a = CouplingType(a)
    if a is CouplingType.FOUR:
        local = m.beta_k(k) * (lam * lam)
    elif not m.cross_terms:
        return 0 * lam
    elif a is CouplingType.TWO_PRIME:
        local = m.amplitude * (lam * lam)
    elif a is CouplingType.TWO:
        local = m.amplitude * (lam * lam + 2 * (lam * (alpha + mu)))
    else:
        s = lam + alpha + mu
        local = m.amplitude * (s * s)
    total = local
    if not m.cross_terms:
        return total
    for r in range(3, m.r_max + 1):
        acc = None
        for nq in range(a.min_quartic, r + 1):
            term = comb(r, nq) * (_power(w_four, nq) * _power(w_other, r - nq))
            acc = term if acc is None else acc + term
        total = total + (m.amplitude ** (r - 1)) * acc
    return total


def _power(x, p: int):
    if p == 0:
        return 1
    out = x
    for _ in range(p - 1):
        out = out * x
    return out


def beta_all(m: BetaModel, a: CouplingType, seq: CouplingSequence) -> np.ndarray:
    """``beta_{a,j}`` for every scale ``j = 0..N`` (vectorised over scales)."""
    d = float(m.decay)
    w4 = np.array(tail_sums(seq.lam, d), dtype=complex)
    wx = np.array(tail_sums(seq.alpha + seq.mu, d), dtype=complex)
    a = CouplingType(a)
    if a is CouplingType.FOUR:
        out = m.beta_k_array(seq.N) * seq.lam ** 2
        if not m.cross_terms:
            return out
        for r in range(3, m.r_max + 1):
            acc = sum(comb(r, nq) * w4 ** nq * wx ** (r - nq) for nq in range(2, r + 1))
            out = out + float(m.amplitude) ** (r - 1) * acc
        return out
    # beta_k enters only the quartic local term, so scale 0 stands in for all k
    out = beta_from_couplings(m, a, 0, seq.lam, seq.alpha, seq.mu, w4, wx)
    return np.asarray(out, dtype=complex) * np.ones(seq.N + 1)


def beta_a(m: BetaModel, a: CouplingType, j: int, seq: CouplingSequence) -> complex:
    """Beta function ``beta_{a,j}`` evaluated on a coupling sequence.

    Examples
    --------
    >>> import numpy as np
    >>> from planar_rg.couplings import CouplingSequence
    >>> seq = CouplingSequence(2, np.array([0.1, 0.1, 0.1]), np.zeros(3), np.zeros(3))
    >>> m = BetaModel(r_max=2)
    >>> complex(beta_a(m, CouplingType.FOUR, 1, seq)).real
    0.010000000000000002
    """
    if not 0 <= j <= seq.N:
        raise ValueError(f"scale {j} outside 0..{seq.N}")
    return complex(beta_all(m, a, seq)[j])


def beta_bar_all(m: BetaModel, seq: CouplingSequence) -> np.ndarray:
    """Order-three-and-higher part ``beta_{4,j} - beta_j lambda_j**2``."""
    if not m.cross_terms:
        return np.zeros(seq.N + 1, dtype=complex)
    d = float(m.decay)
    w4 = np.array(tail_sums(seq.lam, d), dtype=complex)
    wx = np.array(tail_sums(seq.alpha + seq.mu, d), dtype=complex)
    out = np.zeros(seq.N + 1, dtype=complex)
    for r in range(3, m.r_max + 1):
        acc = sum(comb(r, nq) * w4 ** nq * wx ** (r - nq) for nq in range(2, r + 1))
        out = out + float(m.amplitude) ** (r - 1) * acc
    return out


def _remainder_formula(lam, beta, beta_bar):
    inv = 1.0 / lam
    num = lam * beta ** 2 + inv * beta * beta_bar - inv ** 2 * beta_bar
    den = 1.0 + beta * lam + inv * beta_bar
    return num, den


def remainder_R(m: BetaModel, j: int, seq: CouplingSequence) -> complex:
    """Remainder ``R_j`` in ``1/lambda_{j-1} = 1/lambda_j - beta_j + R_j``.

    ``R_j = (lambda_j beta_j**2 + beta_j betabar_j / lambda_j - betabar_j / lambda_j**2)
    / (1 + beta_j lambda_j + betabar_j / lambda_j)``; identically zero for a
    model without cross terms.

    Raises
    ------
    ZeroDivisionError
        "vanishing coupling at scale j" when ``lambda_j = 0``.
    FlowSingularity
        When the denominator vanishes.
    """
    lam = complex(seq.lam[j])
    if lam == 0:
        raise ZeroDivisionError(f"vanishing coupling at scale {j}")
    if not m.cross_terms:
        return 0j
    beta = float(m.beta_k(j))
    bbar = complex(beta_bar_all(m, seq)[j])
    num, den = _remainder_formula(lam, beta, bbar)
    if den == 0:
        raise FlowSingularity(f"flow singularity at scale {j}")
    return num / den


def remainder_all(m: BetaModel, seq: CouplingSequence) -> np.ndarray:
    """``R_j`` for every scale ``j = 0..N`` (vectorised)."""
    lam = seq.lam
    if np.any(lam == 0):
        j = int(np.flatnonzero(lam == 0)[0])
        raise ZeroDivisionError(f"vanishing coupling at scale {j}")
    if not m.cross_terms:
        return np.zeros(seq.N + 1, dtype=complex)
    beta = m.beta_k_array(seq.N)
    num, den = _remainder_formula(lam, beta, beta_bar_all(m, seq))
    if np.any(den == 0):
        j = int(np.flatnonzero(den == 0)[0])
        raise FlowSingularity(f"flow singularity at scale {j}")
    return num / den


def f4_scale0(lam0, mu0):
    """Scale-0 quartic correction, linear in ``lambda_0``."""
    return lam0 * mu0


def f2p_scale0(lam0, mu0):
    """Scale-0 wave-function correction, at most linear in ``lambda_0``."""
    return lam0 * mu0 + mu0 * mu0


def f2_scale0(mu0):
    """Scale-0 mass correction ``sum_{r >= 2} mu0**r = mu0**2 / (1 - mu0)``."""
    return mu0 * mu0 / (1 - mu0)


@dataclass(frozen=True)
class Scale0Functions:
    """Values of the scale-0 functions at one point."""

    f_4: complex
    f_2p: complex
    f_2: complex
    g_2p: complex
    g_2: complex
    h: complex
    tilde_f_4: complex
    tilde_f_2: complex
    tilde_f_2p: complex


def scale0_functions(m: BetaModel, lam0: complex, xi0: tuple[complex, complex], mu: complex,
                     seq: CouplingSequence | None = None) -> Scale0Functions:
    """Split of the scale-0 flow equations into explicit and small parts.

    With ``mu0 = mu/(1+mu) + g_2``, ``alpha0 = alpha + tilde_f_2p(mu) + g_2p`` and
    ``lambda0 = lambda - lambda0 tilde_f_4(mu) - beta_0 lambda0**2 + h``:

    * ``tilde_f_4 = mu/(1+mu)``, ``tilde_f_2 = -mu**2/(1+mu)``,
      ``tilde_f_2p = -(mu/(1+mu))**2``;
    * ``g_2 = -(1 - mu0) beta_{2,0} / (1 + mu)``;
    * ``g_2p = -f_{2',0}(lambda0, mu0) - beta_{2',0} - tilde_f_2p``;
    * ``h = lambda0 tilde_f_4 - f_{4,0}(lambda0, mu0) - betabar_{4,0}``.

    Parameters
    ----------
    m : BetaModel
    lam0 : complex
        Quartic coupling on scale 0.
    xi0 : (complex, complex)
        ``(alpha0, mu0)``.
    mu : complex
        Renormalised mass coupling.
    seq : CouplingSequence, optional
        Couplings on scales ``>= 1`` entering the scale-0 beta sums. Its scale-0
        entries are overwritten by ``lam0, xi0``. Without it the beta sums are
        restricted to scale 0.
    """
    alpha0, mu0 = complex(xi0[0]), complex(xi0[1])
    lam0 = complex(lam0)
    mu = complex(mu)
    if seq is None:
        seq = CouplingSequence(0, np.array([lam0]), np.array([alpha0]), np.array([mu0]))
    else:
        seq = seq.copy()
        seq.lam[0], seq.alpha[0], seq.mu[0] = lam0, alpha0, mu0
    b2p = complex(beta_all(m, CouplingType.TWO_PRIME, seq)[0])
    b2 = complex(beta_all(m, CouplingType.TWO, seq)[0])
    bbar = complex(beta_bar_all(m, seq)[0])
    tf4 = mu / (1 + mu)
    tf2 = -mu * mu / (1 + mu)
    tf2p = -(mu / (1 + mu)) ** 2
    f4 = f4_scale0(lam0, mu0)
    f2p = f2p_scale0(lam0, mu0)
    f2 = f2_scale0(mu0)
    g2 = -(1 - mu0) * b2 / (1 + mu)
    g2p = -f2p - b2p - tf2p
    h = lam0 * tf4 - f4 - bbar
    return Scale0Functions(f4, f2p, f2, g2p, g2, h, tf4, tf2, tf2p)
