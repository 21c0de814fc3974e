"""Running coupling sequences over scales ``0..N``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["CouplingSequence"]


@dataclass
class CouplingSequence:
    """Running couplings ``lambda_k``, ``alpha_k``, ``mu_k`` for ``k = 0..N``.

    Parameters
    ----------
    N : int
        Ultraviolet cutoff scale.
    lam, alpha, mu : ndarray of complex, shape ``(N + 1,)``
        Quartic, wave-function and mass couplings; index ``k`` is scale ``k``.
    nu : ndarray of complex, shape ``(N + 2,)``, optional
        Vacuum coupling over ``k = -1..N`` (index ``k + 1``).
    """

    N: int
    lam: np.ndarray
    alpha: np.ndarray
    mu: np.ndarray
    nu: np.ndarray | None = field(default=None)

    def __post_init__(self) -> None:
        if self.N < 0:
            raise ValueError("cutoff N must be non-negative")
        for name in ("lam", "alpha", "mu"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.shape != (self.N + 1,):
                raise ValueError(f"{name} must have shape ({self.N + 1},), got {arr.shape}")
            setattr(self, name, arr)
        if self.nu is not None:
            nu = np.asarray(self.nu, dtype=complex)
            if nu.shape != (self.N + 2,):
                raise ValueError(f"nu must have shape ({self.N + 2},)")
            self.nu = nu

    @classmethod
    def zeros(cls, N: int) -> "CouplingSequence":
        z = np.zeros(N + 1, dtype=complex)
        return cls(N, z.copy(), z.copy(), z.copy())

    @classmethod
    def constant(cls, N: int, lam: complex, alpha: complex, mu: complex) -> "CouplingSequence":
        one = np.ones(N + 1, dtype=complex)
        return cls(N, lam * one, alpha * one, mu * one)

    def copy(self) -> "CouplingSequence":
        return CouplingSequence(self.N, self.lam.copy(), self.alpha.copy(), self.mu.copy(),
                                None if self.nu is None else self.nu.copy())

    def conj(self) -> "CouplingSequence":
        return CouplingSequence(self.N, self.lam.conj(), self.alpha.conj(), self.mu.conj(),
                                None if self.nu is None else self.nu.conj())

    def delta(self) -> float:
        """``max_k max(|lambda_k|, |alpha_k|, |mu_k|)``."""
        return float(max(np.abs(self.lam).max(), np.abs(self.alpha).max(), np.abs(self.mu).max()))
