"""Scale-labelled trees, their enumeration, frames and model valuations.

A tree has a root on scale ``h_r`` with a single child. Internal vertices carry
a scale and have at least two children; an endpoint or dotted line hanging
from a vertex on scale ``h`` sits on scale ``h + 1``. Outside frames the scale
strictly increases away from the root. A frame is a mark on a vertex: it
encloses the subtree of that vertex and carries a type label. Vertices created
by expanding a square or empty endpoint open a new frame whose scale is the
scale of the beta function term, so inside a frame the ordering restarts.

Trees are immutable and stored in a canonical form (children sorted by
height, endpoint-type multiset and recursive key), so equal trees compare and
hash equal.

Text form::

    (root scale=-1 (vertex scale=0 R=false frame=4 (ep fat 4 1) (ep thin 2' 1)))
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, product
from typing import Iterator, Sequence

import numpy as np

from .beta_model import CouplingType, BetaModel, beta_all, f2_scale0, f2p_scale0, f4_scale0
from .couplings import CouplingSequence

__all__ = [
    "Endpoint",
    "Dot",
    "Vertex",
    "GNTree",
    "EnumerationTooLarge",
    "FrameNestingError",
    "KINDS",
    "enumerate_trees",
    "count_trees",
    "order",
    "order4",
    "classify_frames",
    "n_nontrivial_2p4",
    "TreeValuation",
    "valuate",
    "parse_tree",
    "with_frames",
    "graft",
    "pinned_sum",
    "verify_n_factorial_bound",
    "gamma_sum_inequality",
    "ENUMERATION_CAP",
    "tree_counts",
    "loglinear_fit",
    "framed_tree_sums",
    "endpoint_value",
]

KINDS = ("fat", "thin", "empty", "square")
ENUMERATION_CAP = 8
SCALE_CAP = 12
_T4, _T2P, _T2, _T0 = (CouplingType.FOUR, CouplingType.TWO_PRIME, CouplingType.TWO,
                       CouplingType.ZERO)
ALL_TYPES = (_T4, _T2P, _T2, _T0)


class EnumerationTooLarge(ValueError):
    """Requested enumeration exceeds the configured cap."""


class FrameNestingError(ValueError):
    """Frame marks that do not form nested subtrees."""


@dataclass(frozen=True)
class Endpoint:
    kind: str
    type: CouplingType
    scale: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown endpoint kind {self.kind!r}")
        object.__setattr__(self, "type", CouplingType(self.type))

    @property
    def key(self) -> str:
        return f"(ep {self.kind} {self.type.value} {self.scale})"

    height = 0


@dataclass(frozen=True)
class Dot:
    """External-field line."""

    scale: int

    @property
    def key(self) -> str:
        return f"(dot {self.scale})"

    height = 0


def _types_of(node) -> tuple:
    if isinstance(node, Endpoint):
        return (node.type.value,)
    if isinstance(node, Dot):
        return ()
    return node.type_multiset


def _sort_key(node):
    return (node.height, _types_of(node), node.key)


@dataclass(frozen=True)
class Vertex:
    """Internal vertex; children are kept sorted so equal subtrees are identical."""

    scale: int
    children: tuple
    frame: CouplingType | None = None
    key: str = field(init=False, repr=False, compare=False)
    height: int = field(init=False, repr=False, compare=False)
    type_multiset: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("an internal vertex needs at least two children")
        if self.frame is not None:
            object.__setattr__(self, "frame", CouplingType(self.frame))
        kids = tuple(sorted(self.children, key=_sort_key))
        object.__setattr__(self, "children", kids)
        object.__setattr__(self, "height", 1 + max(c.height for c in kids))
        object.__setattr__(self, "type_multiset",
                           tuple(sorted(t for c in kids for t in _types_of(c))))
        fr = f" frame={self.frame.value}" if self.frame is not None else ""
        body = " ".join(c.key for c in kids)
        object.__setattr__(self, "key", f"(vertex scale={self.scale}{fr} {body})")

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, other):
        return isinstance(other, Vertex) and self.key == other.key


@dataclass(frozen=True)
class GNTree:
    """Tree with root scale ``root_scale`` and a single child below the root."""

    root_scale: int
    child: object

    def __post_init__(self):
        if self.root_scale < -1:
            raise ValueError("root scale must be >= -1")

    @property
    def key(self) -> str:
        return f"(root scale={self.root_scale} {self.child.key})"

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, other):
        return isinstance(other, GNTree) and self.key == other.key

    def __lt__(self, other):
        return self.key < other.key

    def __str__(self) -> str:
        return self.serialize()

    # traversal helpers
    def leaves(self) -> list:
        out: list = []

        def walk(node):
            if isinstance(node, Vertex):
                for c in node.children:
                    walk(c)
            else:
                out.append(node)
        walk(self.child)
        return out

    def endpoints(self) -> list:
        return [x for x in self.leaves() if isinstance(x, Endpoint)]

    def vertices(self) -> list:
        """Vertices in preorder with their parent scale."""
        out: list = []

        def walk(node, parent_scale):
            if isinstance(node, Vertex):
                out.append((node, parent_scale))
                for c in node.children:
                    walk(c, node.scale)
        walk(self.child, self.root_scale)
        return out

    @property
    def n_endpoints(self) -> int:
        return len(self.endpoints())

    @property
    def dotted_count(self) -> int:
        return sum(1 for x in self.leaves() if isinstance(x, Dot))

    def frames(self) -> list:
        return [v for v, _ in self.vertices() if v.frame is not None]

    def r_flags(self) -> list:
        """``R`` flag of each vertex in preorder.

        A vertex carries ``R`` unless it is the first vertex, is framed, or lies
        on the path from a dotted line to the root.
        """
        flags: list = []

        def has_dot(node) -> bool:
            if isinstance(node, Dot):
                return True
            if isinstance(node, Vertex):
                return any(has_dot(c) for c in node.children)
            return False

        def walk(node, first):
            if isinstance(node, Vertex):
                flags.append(not first and node.frame is None and not has_dot(node))
                for c in node.children:
                    walk(c, False)
        walk(self.child, True)
        return flags

    def serialize(self) -> str:
        flags = iter(self.r_flags())

        def ser(node) -> str:
            if not isinstance(node, Vertex):
                return node.key
            r = "true" if next(flags) else "false"
            fr = f" frame={node.frame.value}" if node.frame is not None else ""
            return (f"(vertex scale={node.scale} R={r}{fr} "
                    + " ".join(ser(c) for c in node.children) + ")")
        return f"(root scale={self.root_scale} {ser(self.child)})"

    def validate(self) -> None:
        """Check scale ordering outside frames and endpoint attachment."""
        def walk(node, parent_scale, inside):
            if isinstance(node, Vertex):
                framed = inside or node.frame is not None
                if node.frame is None and not inside and node.scale <= parent_scale:
                    raise ValueError("scales must increase away from the root")
                for c in node.children:
                    walk(c, node.scale, framed)
            elif not inside and node.scale != parent_scale + 1:
                raise ValueError("a leaf sits one scale above its vertex")
        walk(self.child, self.root_scale, False)


# --------------------------------------------------------------------- parsing

def _tokenize(text: str) -> list:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def parse_tree(text: str) -> GNTree:
    """Inverse of :meth:`GNTree.serialize` (the ``R`` flags are recomputed).

    Examples
    --------
    >>> t = parse_tree("(root scale=-1 (vertex scale=0 R=false (ep fat 4 1) (ep thin 2' 1)))")
    >>> parse_tree(t.serialize()) == t
    True
    """
    tokens = _tokenize(text)
    pos = 0

    def expect(tok):
        nonlocal pos
        if tokens[pos] != tok:
            raise ValueError(f"expected {tok!r} at token {pos}, got {tokens[pos]!r}")
        pos += 1

    def node():
        nonlocal pos
        expect("(")
        head = tokens[pos]
        pos += 1
        if head == "ep":
            kind, typ, scale = tokens[pos:pos + 3]
            pos += 3
            expect(")")
            return Endpoint(kind, CouplingType.parse(typ), int(scale))
        if head == "dot":
            scale = int(tokens[pos])
            pos += 1
            expect(")")
            return Dot(scale)
        if head != "vertex":
            raise ValueError(f"unknown node {head!r}")
        attrs = {}
        while tokens[pos] != "(" and tokens[pos] != ")":
            k, v = tokens[pos].split("=", 1)
            attrs[k] = v
            pos += 1
        kids = []
        while tokens[pos] == "(":
            kids.append(node())
        expect(")")
        frame = CouplingType.parse(attrs["frame"]) if "frame" in attrs else None
        return Vertex(int(attrs["scale"]), tuple(kids), frame)

    expect("(")
    expect("root")
    k, v = tokens[pos].split("=", 1)
    pos += 1
    if k != "scale":
        raise ValueError("root needs a scale")
    child = node()
    expect(")")
    return GNTree(int(v), child)


# ----------------------------------------------------------------- enumeration

def _check_caps(n: int, max_scale: int) -> None:
    if n < 1:
        raise ValueError("at least one endpoint is required")
    if n > ENUMERATION_CAP or max_scale > SCALE_CAP:
        raise EnumerationTooLarge("enumeration too large")


def _count_partitions(n_ep: int, n_dot: int):
    """Multisets of at least two non-empty (endpoints, dots) parts summing to the totals."""
    parts = [(e, d) for e in range(n_ep + 1) for d in range(n_dot + 1) if e + d > 0 and e >= 0]
    parts.sort()

    def rec(remaining, start, acc):
        if remaining == (0, 0):
            if len(acc) >= 2:
                yield tuple(acc)
            return
        for i in range(start, len(parts)):
            e, d = parts[i]
            if e <= remaining[0] and d <= remaining[1]:
                acc.append(parts[i])
                yield from rec((remaining[0] - e, remaining[1] - d), i, acc)
                acc.pop()
    yield from rec((n_ep, n_dot), 0, [])


def enumerate_trees(n_endpoints: int, root_scale: int = -1, max_scale: int = 3, t: int = 0,
                    kind: str = "fat", types: Sequence = ALL_TYPES) -> Iterator[GNTree]:
    """Yield every distinct tree once.

    Parameters
    ----------
    n_endpoints : int
        Number of endpoints, ``1 <= n <= 8``.
    root_scale, max_scale : int
        Scale window; every leaf sits on a scale ``<= max_scale``.
    t : int
        Number of dotted lines.
    kind : str
        Endpoint kind used for every endpoint.
    types : sequence of CouplingType
        Admissible endpoint types.

    Raises
    ------
    EnumerationTooLarge
        "enumeration too large" beyond 8 endpoints or scale 12.
    """
    _check_caps(n_endpoints, max_scale)
    types = tuple(CouplingType(x) for x in types)

    @lru_cache(maxsize=None)
    def subtrees(n_ep: int, n_dot: int, parent: int) -> tuple:
        out = []
        if n_ep + n_dot == 1:
            if parent + 1 <= max_scale:
                if n_ep == 1:
                    out.extend(Endpoint(kind, a, parent + 1) for a in types)
                else:
                    out.append(Dot(parent + 1))
            return tuple(out)
        for h in range(parent + 1, max_scale):
            for parts in _count_partitions(n_ep, n_dot):
                groups = Counter(parts)
                options = []
                for (e, d), mult in sorted(groups.items()):
                    pool = subtrees(e, d, h)
                    options.append(list(combinations_with_replacement(pool, mult)))
                for choice in product(*options):
                    kids = tuple(x for grp in choice for x in grp)
                    out.append(Vertex(h, kids))
        return tuple(out)

    for node in subtrees(n_endpoints, t, root_scale):
        yield GNTree(root_scale, node)


def count_trees(n_endpoints: int, root_scale: int = -1, max_scale: int = 3, t: int = 0,
                n_types: int = 4) -> int:
    """Number of distinct trees, by multiset counting without enumeration."""
    _check_caps(n_endpoints, max_scale)

    @lru_cache(maxsize=None)
    def count(n_ep: int, n_dot: int, parent: int) -> int:
        if n_ep + n_dot == 1:
            if parent + 1 > max_scale:
                return 0
            return n_types if n_ep == 1 else 1
        total = 0
        for h in range(parent + 1, max_scale):
            for parts in _count_partitions(n_ep, n_dot):
                prod_ = 1
                for (e, d), mult in Counter(parts).items():
                    c = count(e, d, h)
                    prod_ *= math.comb(c + mult - 1, mult)
                total += prod_
        return total

    return count(n_endpoints, t, root_scale)


# ------------------------------------------------------------------- orders

_ORDER = {"fat": 1, "thin": 1, "empty": 2}


def _endpoint_order(e: Endpoint) -> int:
    if e.kind == "square":
        return 2 if e.type is _T2 else 1
    return _ORDER[e.kind]


def _endpoint_order4(e: Endpoint) -> int:
    if e.kind == "square":
        return 1
    return 1 if e.type is _T4 else 0


def order(t: GNTree) -> int:
    """Sum of endpoint orders."""
    return sum(_endpoint_order(e) for e in t.endpoints())


def order4(t: GNTree) -> int:
    """Sum of endpoint 4-orders."""
    return sum(_endpoint_order4(e) for e in t.endpoints())


# ------------------------------------------------------------------- frames

def _pruned_type4_count(v: Vertex) -> int:
    total = 0
    for c in v.children:
        if isinstance(c, Endpoint):
            total += c.type is _T4
        elif isinstance(c, Vertex):
            if c.frame is not None:
                total += c.frame is _T4
            else:
                total += _pruned_type4_count(c)
    return total


def _frame_trivial(v: Vertex) -> bool:
    n4 = _pruned_type4_count(v)
    if v.frame in (_T2, _T0):
        return n4 == 0
    return n4 <= 1


def classify_frames(t: GNTree) -> tuple[int, list]:
    """Triviality of every frame and the number of nontrivial ``(2', 4)``-frames.

    Each frame is reduced by replacing its maximal inner frames with fat
    endpoints of their type. A ``2``- or ``0``-frame is trivial when the
    reduction has no type-4 endpoint; a ``2'``- or ``4``-frame when it has at
    most one.

    Returns
    -------
    (n_2p4, flags)
        ``flags`` lists ``(frame type, trivial)`` in preorder.
    """
    flags = [(v.frame, _frame_trivial(v)) for v in t.frames()]
    n = sum(1 for a, triv in flags if not triv and a in (_T4, _T2P))
    return n, flags


def n_nontrivial_2p4(t: GNTree) -> int:
    return classify_frames(t)[0]


def with_frames(t: GNTree, marks: dict) -> GNTree:
    """Attach frames given as ``{frozenset(leaf indices): type}``.

    Leaf indices refer to :meth:`GNTree.leaves` order. Each set must be exactly
    the leaf set of some vertex; the sets must be nested or disjoint.

    Raises
    ------
    FrameNestingError
        "frame nesting violated".
    """
    sets = [frozenset(s) for s in marks]
    for a in sets:
        for b in sets:
            if a is not b and a & b and not (a <= b or b <= a):
                raise FrameNestingError("frame nesting violated")
    counter = [0]
    matched = set()

    def rebuild(node):
        if not isinstance(node, Vertex):
            idx = counter[0]
            counter[0] += 1
            return node, frozenset([idx])
        kids, leaves = [], frozenset()
        for c in node.children:
            nk, lv = rebuild(c)
            kids.append(nk)
            leaves |= lv
        frame = node.frame
        if leaves in marks:
            frame = CouplingType(marks[leaves])
            matched.add(leaves)
        return Vertex(node.scale, tuple(kids), frame), leaves

    new_child, _ = rebuild(t.child)
    if len(matched) != len(sets):
        raise FrameNestingError("frame nesting violated")
    return GNTree(t.root_scale, new_child)


def graft(t: GNTree, index: int, sub) -> GNTree:
    """Replace the endpoint with leaf index ``index`` by the node ``sub``."""
    counter = [0]

    def rebuild(node):
        if isinstance(node, Vertex):
            return Vertex(node.scale, tuple(rebuild(c) for c in node.children), node.frame)
        i = counter[0]
        counter[0] += 1
        return sub if i == index else node
    return GNTree(t.root_scale, rebuild(t.child))


# ------------------------------------------------------------------ valuation

@dataclass(frozen=True)
class TreeValuation:
    """Parameters of the model tree weight.

    The weight is ``C_m**m * prod(endpoint values) * prod_v gamma**(-rho (h_v - h_v'))
    * gamma**(h_r (4 - external_lines))``; framed vertices carry no decay factor.

    Attributes
    ----------
    gamma, rho : float or Fraction / int
        Scale ratio and short-memory exponent. Exact weights need a rational
        ``gamma**(-rho)``.
    C_m : float or Fraction
        Per-endpoint constant.
    external_lines : int
        ``m`` in the prefactor; 4 makes it trivial.
    renormalized : tuple
        ``(lambda, alpha, mu, nu)`` used for thin endpoints and scale ``-1``.
    """

    gamma: float | Fraction = 2.0
    rho: float = 0.5
    C_m: float | Fraction = 1
    external_lines: int = 4
    renormalized: tuple = (0, 0, 0, 0)

    @property
    def exact(self) -> bool:
        return isinstance(self.gamma, Fraction) and float(self.rho).is_integer()

    def gpow(self, p):
        if self.exact:
            return self.gamma ** int(p)
        return float(self.gamma) ** float(p)


_TYPE_INDEX = {_T4: 0, _T2P: 1, _T2: 2, _T0: 3}


def _coupling(seq: CouplingSequence, renorm: tuple, a: CouplingType, k: int):
    if k < 0:
        return renorm[_TYPE_INDEX[a]]
    k = min(k, seq.N)
    if a is _T4:
        return seq.lam[k]
    if a is _T2P:
        return seq.alpha[k]
    if a is _T2:
        return seq.mu[k]
    return 0 if seq.nu is None else seq.nu[k + 1]


def endpoint_value(e: Endpoint, v: TreeValuation, couplings, model: BetaModel | None = None):
    """Value of a single endpoint on coupling scale ``e.scale - 1``.

    ``couplings`` is either a :class:`CouplingSequence` or a mapping
    ``type -> value`` (scale-independent symbols).
    """
    k = e.scale - 1
    if not isinstance(couplings, CouplingSequence):
        return couplings[e.type]
    if e.kind == "fat":
        return _coupling(couplings, v.renormalized, e.type, k)
    c = e.type.scaling_exponent
    if e.kind == "thin":
        return v.renormalized[_TYPE_INDEX[e.type]] * v.gpow(-c * max(k, 0))
    if model is None:
        raise ValueError("empty and square endpoints need a beta model")
    if e.kind == "empty":
        lam0, mu0 = couplings.lam[0], couplings.mu[0]
        f = {_T4: f4_scale0(lam0, mu0), _T2P: f2p_scale0(lam0, mu0),
             _T2: f2_scale0(mu0)}.get(e.type, 0)
        return -v.gpow(-c * k) * f
    b = beta_all(model, e.type, couplings)
    kk = min(k, couplings.N)
    return -sum(v.gpow(c * (j - k)) * b[j] for j in range(kk + 1))


def valuate(t: GNTree, v: TreeValuation, couplings, model: BetaModel | None = None):
    """Model weight of a tree.

    Examples
    --------
    >>> from fractions import Fraction
    >>> t = GNTree(-1, Vertex(1, (Endpoint("fat", "4", 2), Endpoint("fat", "4", 2))))
    >>> vv = TreeValuation(gamma=Fraction(2), rho=1)
    >>> valuate(t, vv, {CouplingType.FOUR: Fraction(1, 3)})
    Fraction(1, 36)
    """
    w = v.C_m ** t.n_endpoints if v.C_m != 1 else 1
    for e in t.endpoints():
        w = w * endpoint_value(e, v, couplings, model)
    for node, parent in t.vertices():
        if node.frame is None:
            w = w * v.gpow(-v.rho * (node.scale - parent) if not v.exact
                           else -int(v.rho) * (node.scale - parent))
    pre = t.root_scale * (4 - v.external_lines)
    if pre:
        w = w * v.gpow(pre)
    return w


def pinned_sum(n_endpoints: int, root_scale: int, max_scale: int, depth: int,
               v: TreeValuation, couplings, types: Sequence = (_T4, _T2P, _T2)) -> float:
    """Sum of ``|weight|`` over trees having a vertex on a scale ``>= depth``."""
    total = 0.0
    for t in enumerate_trees(n_endpoints, root_scale, max_scale, types=types):
        if any(node.scale >= depth for node, _ in t.vertices()):
            total += abs(complex(valuate(t, v, couplings)))
    return total


def _framings(t: GNTree, frame_types: Sequence) -> Iterator[GNTree]:
    verts = [node for node, _ in t.vertices()]
    options = [(None,) + tuple(frame_types)] * len(verts)
    for labels in product(*options):
        it = iter(labels)

        def rebuild(node):
            if isinstance(node, Vertex):
                lab = next(it)
                return Vertex(node.scale, tuple(rebuild(c) for c in node.children), lab)
            return node
        # children order inside Vertex is canonical, matching vertices() preorder
        yield GNTree(t.root_scale, rebuild(t.child))


def framed_tree_sums(m_max: int, v: TreeValuation, couplings, root_scale: int = -1,
                     max_scale: int = 2, n_max: int = 2,
                     types: Sequence = (_T4, _T2P, _T2),
                     frame_types: Sequence = (_T4, _T2P, _T2)) -> dict:
    """Normalised sums ``S[(n, m)]`` over framed trees.

    ``S[(n, m)] = sum |weight| / prod_a (max_k |v_k^(a)|)**m_a`` over trees with
    ``m`` endpoints and exactly ``n`` nontrivial ``(2', 4)``-frames.
    """
    maxima = {}
    for a in types:
        if isinstance(couplings, CouplingSequence):
            vals = [abs(complex(_coupling(couplings, v.renormalized, a, k)))
                    for k in range(-1, couplings.N + 1)]
        else:
            vals = [abs(complex(couplings[a]))]
        maxima[a] = max(vals)
    out: dict = {}
    for m in range(1, m_max + 1):
        seen = set()
        for base in enumerate_trees(m, root_scale, max_scale, types=types):
            for t in _framings(base, frame_types):
                if t.key in seen:
                    continue
                seen.add(t.key)
                n = n_nontrivial_2p4(t)
                if n > n_max:
                    continue
                norm = 1.0
                for e in t.endpoints():
                    norm *= maxima[e.type]
                w = abs(complex(valuate(t, v, couplings))) / norm if norm else 0.0
                out[(n, m)] = out.get((n, m), 0.0) + w
    return out


def verify_n_factorial_bound(m_max: int, v: TreeValuation, couplings, n_max: int = 2,
                             fit_m: int = 2, **kw) -> dict:
    """Check ``S[(n, m)] <= C**m n!`` with ``C`` fitted on ``m <= fit_m``.

    Returns
    -------
    dict
        ``sums``, ``C`` (fitted), ``ratios`` ``(S/n!)**(1/m)`` per ``(n, m)`` and
        ``pass`` (every ratio ``<= C``).
    """
    sums = framed_tree_sums(m_max, v, couplings, n_max=n_max, **kw)
    ratios = {key: (s / math.factorial(key[0])) ** (1.0 / key[1]) for key, s in sums.items()
              if s > 0}
    fit = [r for (n, m), r in ratios.items() if m <= fit_m]
    C = max(fit) if fit else 0.0
    ok = all(r <= C * (1 + 1e-12) for r in ratios.values())
    return {"sums": sums, "C": C, "ratios": ratios, "pass": ok}


def gamma_sum_inequality(k: int, f: int, b: float, gamma: float = 2.0,
                         power: int = 2) -> tuple[float, float]:
    """Both sides of the frame scale-sum estimate.

    ``sum_{h<=k} sum_{r<=f} gamma**(p h) (b h)**r / r!`` against
    ``gamma**(p k) / (1 - gamma**-p) * sum_{r<=f} (b k)**r / r!`` with ``p = power``
    (2 for mass frames, 4 for vacuum frames).
    """
    lhs = sum(gamma ** (power * h) * (b * h) ** r / math.factorial(r)
              for h in range(k + 1) for r in range(f + 1))
    rhs = gamma ** (power * k) / (1 - gamma ** -power) * sum(
        (b * k) ** r / math.factorial(r) for r in range(f + 1))
    return lhs, rhs


def tree_counts(n_max: int, root_scale: int = -1, max_scale: int = 3) -> list:
    return [count_trees(n, root_scale, max_scale) for n in range(1, n_max + 1)]


def loglinear_fit(counts: Sequence[int]) -> tuple[float, float]:
    """Slope and ``R**2`` of ``log(count)`` against ``n = 1, 2, ...``."""
    n = np.arange(1, len(counts) + 1, dtype=float)
    y = np.log(np.asarray(counts, dtype=float))
    slope, icpt = np.polyfit(n, y, 1)
    pred = slope * n + icpt
    ss_res = float(((y - pred) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    return float(slope), 1.0 - ss_res / ss_tot if ss_tot else 1.0
