"""Complex parameter domains: balls, Cauchy disks and Watson sectors.

The three families are

* ``Ball(delta)``: ``|z| < delta``;
* ``CauchyDisk(delta)``: ``Re(1/z) > 1/delta`` (the open disk of radius
  ``delta/2`` centred at ``delta/2``; ``z = 0`` is excluded);
* ``Watson(delta, theta)``: ``|z| < delta`` and ``|arg z| < pi - theta``
  with the principal argument in ``(-pi, pi]``.

Examples
--------
>>> import math
>>> w = ComplexDomain.watson(0.1, math.pi / 4)
>>> contains(w, 0.05), contains(w, -0.05)
(True, False)
>>> contains(ComplexDomain.cauchy_disk(0.2), 0.1)
True
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "DomainError",
    "DomainKind",
    "ComplexDomain",
    "contains",
    "boundary_distance_watson",
    "segment_distance",
]


class DomainError(ValueError):
    """Raised when a point or a parameter lies outside an admissible domain."""


class DomainKind(str, Enum):
    BALL = "Ball"
    CAUCHY_DISK = "CauchyDisk"
    WATSON = "Watson"


@dataclass(frozen=True)
class ComplexDomain:
    """One of the three domain families.

    Parameters
    ----------
    kind : DomainKind
        Domain family.
    delta : float
        Radius parameter, strictly positive.
    theta : float
        Watson aperture in ``(0, pi/2]``; ignored for the other kinds.
    """

    kind: DomainKind
    delta: float
    theta: float = math.pi / 2

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", DomainKind(self.kind))
        if not self.delta > 0:
            raise DomainError(f"delta must be positive, got {self.delta}")
        if self.kind is DomainKind.WATSON and not (0 < self.theta <= math.pi / 2):
            raise DomainError(f"Watson aperture must lie in (0, pi/2], got {self.theta}")

    @classmethod
    def ball(cls, delta: float) -> "ComplexDomain":
        return cls(DomainKind.BALL, delta)

    @classmethod
    def cauchy_disk(cls, delta: float) -> "ComplexDomain":
        return cls(DomainKind.CAUCHY_DISK, delta)

    @classmethod
    def watson(cls, delta: float, theta: float) -> "ComplexDomain":
        return cls(DomainKind.WATSON, delta, theta)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "delta": self.delta, "theta": self.theta}

    @classmethod
    def from_dict(cls, data: dict) -> "ComplexDomain":
        return cls(DomainKind(data["kind"]), float(data["delta"]),
                   float(data.get("theta", math.pi / 2)))

    def __contains__(self, z: complex) -> bool:
        return contains(self, z)


def contains(d: ComplexDomain, z: complex) -> bool:
    """Membership test with strict inequalities.

    ``z = 0`` belongs to balls and Watson sectors but never to a Cauchy disk.
    """
    z = complex(z)
    if d.kind is DomainKind.BALL:
        return abs(z) < d.delta
    if d.kind is DomainKind.CAUCHY_DISK:
        if z == 0:
            return False
        return (1.0 / z).real > 1.0 / d.delta
    if abs(z) >= d.delta:
        return False
    if z == 0:
        return True
    return abs(cmath.phase(z)) < math.pi - d.theta


def segment_distance(z: complex, a: complex, b: complex) -> float:
    """Euclidean distance from ``z`` to the closed segment ``[a, b]``."""
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0:
        return abs(z - a)
    s = ((z - a) * ab.conjugate()).real / denom
    s = min(1.0, max(0.0, s))
    return abs(z - (a + s * ab))


def boundary_distance_watson(d: ComplexDomain, z: complex, outer: ComplexDomain) -> float:
    """Exact distance from ``z`` in the inner sector ``d`` to the boundary of ``outer``.

    The boundary of a Watson sector consists of the circular arc
    ``|w| = delta, |arg w| <= pi - theta`` and the two segments from the
    origin along the rays ``arg w = +-(pi - theta)``.

    Parameters
    ----------
    d : ComplexDomain
        Inner Watson sector; ``z`` must belong to it.
    z : complex
        Query point.
    outer : ComplexDomain
        Enclosing Watson sector.

    Returns
    -------
    float
        ``min`` of the distance to the arc and to both segments.

    Raises
    ------
    DomainError
        If ``z`` is not in the inner domain ("not in inner domain").
    """
    if d.kind is not DomainKind.WATSON or outer.kind is not DomainKind.WATSON:
        raise DomainError("boundary distance is defined for Watson sectors only")
    z = complex(z)
    if not contains(d, z):
        raise DomainError("not in inner domain")
    phi = math.pi - outer.theta
    # nearest point of the full circle is radial; it lies on the arc whenever
    # |arg z| <= phi, which holds for points of the outer sector
    if z == 0 or abs(cmath.phase(z)) <= phi:
        arc = outer.delta - abs(z)
    else:
        arc = min(abs(z - outer.delta * cmath.exp(1j * phi)),
                  abs(z - outer.delta * cmath.exp(-1j * phi)))
    upper = segment_distance(z, 0j, outer.delta * cmath.exp(1j * phi))
    lower = segment_distance(z, 0j, outer.delta * cmath.exp(-1j * phi))
    return min(arc, upper, lower)
