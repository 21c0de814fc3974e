"""Partition of a tree sum into a low-order Taylor part and two remainders.

Starting from trees with fat (running-coupling) endpoints, the rewrite loop
repeatedly replaces fat endpoints by thin, empty and square ones and expands
squares and empties into framed trees whose endpoints are fat again. Each round
performs seven sub-steps in a fixed order:

1. fat 2-endpoints of ``F`` are substituted;
2. fat 2'-endpoints are substituted; trees with
   ``n_{2',4} + n_sq^{(2')} > n - 1 + [n_{2',4} = 0]`` are sent to ``R1``;
3. square 2'- and 2-endpoints are expanded;
4. fat 4-endpoints are substituted; trees with
   ``n_{2',4} + n_sq^{(4)} > n - 1 + [n_{2',4} = 0]`` get ``n - n_{2',4}`` of
   their square 4-endpoints expanded (none if ``n_{2',4} = 0``) and go to ``R1``;
5. the remaining square 4-endpoints are expanded;
6. empty endpoints are expanded;
7. what is left with ``O_4 <= n`` and ``O <= M`` forms the next ``F``.

After every sub-step trees with ``O_4 > n`` go to ``R1`` and trees with
``O_4 <= n < M < O`` to ``R2``. The loop stops once ``F`` holds thin endpoints
only, which happens within ``M + 1`` rounds.

Tree values are exact truncated polynomials in ``(lambda, alpha, mu)``
computed from a :class:`~planar_rg.formal_flow.FormalSolution`: a tree is worth
its rational multiplicity times the product of its endpoint values. The scale
factors of the beta coefficients are carried by the multiplicities generated
when a square endpoint is expanded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable

from .beta_model import ARGUMENT_TYPES, BetaModel, CouplingType, coefficient
from .formal_flow import FormalSolution, TruncatedPoly, solve_formal
from .gn_trees import Endpoint, GNTree, Vertex, n_nontrivial_2p4, order, order4

__all__ = [
    "ExpansionCapExceeded",
    "TerminationViolated",
    "ExtractionContext",
    "TreeSum",
    "RewriteState",
    "expand_fat",
    "expand_square",
    "expand_empty",
    "run_extraction",
    "certify_remainder_bound",
    "default_extraction_model",
    "search_M",
]

_T4, _T2P, _T2 = CouplingType.FOUR, CouplingType.TWO_PRIME, CouplingType.TWO


class ExpansionCapExceeded(RuntimeError):
    """A square expansion generated more trees than allowed."""


class TerminationViolated(RuntimeError):
    """The rewrite loop ran for more than ``M + 1`` rounds."""


def default_extraction_model() -> BetaModel:
    """Exact model with ``gamma = 2``, ``gamma**-rho = 1/2`` and amplitude ``1/10``."""
    return BetaModel(gamma=Fraction(2), rho=1, r_max=3, beta2=1, amplitude=Fraction(1, 10))


@dataclass
class ExtractionContext:
    """Model, cutoff and formal solution shared by the expansions.

    Parameters
    ----------
    model : BetaModel
        Exact model (rational ``gamma`` and integer ``rho``).
    N : int
        Cutoff; fat endpoints live on scales ``1..N+1``.
    K : int
        Truncation degree of tree values; trees whose smallest possible degree
        exceeds ``K`` are dropped since their truncated value vanishes.
    cap : int
        Largest number of trees a single square expansion may produce.
    """

    model: BetaModel
    N: int
    K: int
    cap: int = 200_000
    solution: FormalSolution | None = None

    def __post_init__(self):
        if not self.model.exact:
            raise ValueError("extraction needs an exact model")
        if self.solution is None:
            self.solution = solve_formal(self.model, self.N, self.K)


def min_degree(t: GNTree) -> int:
    """Smallest total degree a tree value can have (fat/thin 1, empty/square 2)."""
    return sum(1 if e.kind in ("fat", "thin") else 2 for e in t.endpoints())


class TreeSum:
    """Multiset of canonical trees with rational multiplicities."""

    def __init__(self, items: Iterable | None = None):
        self.items: dict = {}
        for t, c in items or ():
            self.add(t, c)

    def add(self, t: GNTree, c) -> None:
        c = self.items.get(t, 0) + c
        if c == 0:
            self.items.pop(t, None)
        else:
            self.items[t] = c

    def merge(self, other: "TreeSum") -> None:
        for t, c in other.items.items():
            self.add(t, c)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items.items())

    def value(self, ctx: ExtractionContext) -> TruncatedPoly:
        total = TruncatedPoly({}, ctx.K)
        for t, c in self.items.items():
            total = total + tree_value(t, ctx) * c
        return total


def tree_value(t: GNTree, ctx: ExtractionContext) -> TruncatedPoly:
    val = TruncatedPoly.constant(1, ctx.K)
    for e in t.endpoints():
        val = val * ctx.solution.endpoint(e.kind, e.type, e.scale)
    return val


# ------------------------------------------------------------------ rewriting

def _rebuild(t: GNTree, replace: dict) -> GNTree:
    """Replace leaves by index with nodes given in ``replace``."""
    counter = [0]

    def walk(node):
        if isinstance(node, Vertex):
            return Vertex(node.scale, tuple(walk(c) for c in node.children), node.frame)
        i = counter[0]
        counter[0] += 1
        return replace.get(i, node)
    return GNTree(t.root_scale, walk(t.child))


def _leaf_indices(t: GNTree, kind: str, types: tuple) -> list:
    return [i for i, x in enumerate(t.leaves())
            if isinstance(x, Endpoint) and x.kind == kind and x.type in types]


def expand_fat(t: GNTree, which_type: CouplingType) -> list:
    """Substitute every fat endpoint of ``which_type`` by thin, empty and square.

    Returns the ``3**p`` trees, each with multiplicity one; a fat endpoint on
    scale 0 only becomes thin.
    """
    which_type = CouplingType(which_type)
    leaves = t.leaves()
    idx = _leaf_indices(t, "fat", (which_type,))
    if not idx:
        return [t]
    # on scale 0 the running coupling is the renormalised one
    options = [("thin",) if leaves[i].scale <= 0 else ("thin", "empty", "square") for i in idx]
    out = []
    for kinds in product(*options):
        rep = {i: Endpoint(k, leaves[i].type, leaves[i].scale) for i, k in zip(idx, kinds)}
        out.append(_rebuild(t, rep))
    return out


def square_expansion(ctx: ExtractionContext, a: CouplingType, scale: int) -> list:
    """Framed subtrees and multiplicities summing to a square endpoint's value."""
    m = ctx.model
    k = scale - 1
    c = a.scaling_exponent
    out: dict = {}
    for j in range(k + 1):
        for r in range(2, m.r_max + 1):
            for a_vec in product(ARGUMENT_TYPES, repeat=r):
                for h_vec in product(range(j, ctx.N + 1), repeat=r):
                    coef = coefficient(m, a, a_vec, j, h_vec)
                    if coef == 0:
                        continue
                    kids = tuple(Endpoint("fat", ai, hi + 1) for ai, hi in zip(a_vec, h_vec))
                    node = Vertex(j, kids, a)
                    out[node] = out.get(node, 0) - m.gamma_power(c * (j - k)) * coef
                    if len(out) > ctx.cap:
                        raise ExpansionCapExceeded("expansion cap")
    return [(node, w) for node, w in out.items() if w != 0]


def empty_expansion(ctx: ExtractionContext, a: CouplingType, scale: int) -> list:
    """Trivial frames on scale 0 with fat endpoints on scale 1."""
    k = scale - 1
    pre = -ctx.model.gamma_power(-a.scaling_exponent * k)
    lam0, mu0 = Endpoint("fat", _T4, 1), Endpoint("fat", _T2, 1)
    if a is _T4:
        terms = [((lam0, mu0), 1)]
    elif a is _T2P:
        terms = [((lam0, mu0), 1), ((mu0, mu0), 1)]
    else:
        terms = [((mu0,) * p, 1) for p in range(2, ctx.K + 1)]
    return [(Vertex(0, kids, a), pre * w) for kids, w in terms]


def _expand_leaves(t: GNTree, c, ctx: ExtractionContext, idx: list, kind: str) -> list:
    """Expand the listed square or empty leaves of ``t`` (product of expansions)."""
    if not idx:
        return [(t, c)]
    leaves = t.leaves()
    base = min_degree(t) - 2 * len(idx)
    choices = []
    for i in idx:
        e = leaves[i]
        if kind == "square":
            choices.append(_cached(ctx, "square", e.type, e.scale))
        else:
            choices.append(_cached(ctx, "empty", e.type, e.scale))
    out = []
    for combo in product(*choices):
        deg = base + sum(len(node.children) for node, _ in combo)
        if deg > ctx.K:
            continue
        w = c
        rep = {}
        for i, (node, mult) in zip(idx, combo):
            rep[i] = node
            w = w * mult
        out.append((_rebuild(t, rep), w))
    return out


def _cached(ctx: ExtractionContext, kind: str, a: CouplingType, scale: int) -> list:
    store = ctx.__dict__.setdefault("_expansions", {})
    key = (kind, a, scale)
    if key not in store:
        raw = (square_expansion if kind == "square" else empty_expansion)(ctx, a, scale)
        # subtrees too large for any tree are dropped up front
        store[key] = [(node, w) for node, w in raw if len(node.children) <= ctx.K]
    return store[key]


def expand_square(t: GNTree, index: int, ctx: ExtractionContext) -> list:
    """Replace the square endpoint with leaf index ``index`` by its framed trees.

    Returns ``(tree, multiplicity)`` pairs.

    Raises
    ------
    ExpansionCapExceeded
        "expansion cap" when the expansion exceeds ``ctx.cap`` trees.
    """
    e = t.leaves()[index]
    if not (isinstance(e, Endpoint) and e.kind == "square"):
        raise ValueError("leaf is not a square endpoint")
    return _expand_leaves(t, Fraction(1), ctx, [index], "square")


def expand_empty(t: GNTree, index: int, ctx: ExtractionContext) -> list:
    """Replace the empty endpoint with leaf index ``index`` by its trivial frames."""
    e = t.leaves()[index]
    if not (isinstance(e, Endpoint) and e.kind == "empty"):
        raise ValueError("leaf is not an empty endpoint")
    return _expand_leaves(t, Fraction(1), ctx, [index], "empty")


# ---------------------------------------------------------------- main loop

@dataclass
class RewriteState:
    """Final or intermediate partition ``F + R1 + R2``."""

    n: int
    M: int
    F: TreeSum = field(default_factory=TreeSum)
    R1: TreeSum = field(default_factory=TreeSum)
    R2: TreeSum = field(default_factory=TreeSum)
    step: int = 0
    history: list = field(default_factory=list)
    max_n2p4: int = 0
    routing_violations: list = field(default_factory=list)

    def all_trees(self):
        for part in (self.F, self.R1, self.R2):
            yield from part.items


def _count(t: GNTree, kind: str, a: CouplingType) -> int:
    return sum(1 for e in t.endpoints() if e.kind == kind and e.type is a)


def _has_fat(t: GNTree) -> bool:
    return any(e.kind == "fat" for e in t.endpoints())


def run_extraction(S: TreeSum | Iterable, n: int, M: int, ctx: ExtractionContext,
                   max_rounds: int | None = None) -> RewriteState:
    """Run the seven-step rewrite loop until ``F`` holds thin endpoints only.

    Parameters
    ----------
    S : TreeSum or iterable of (tree, multiplicity)
        Input trees with fat and thin endpoints.
    n, M : int
        4-order and total-order caps, ``M >= n >= 0``.
    ctx : ExtractionContext
        Needs ``ctx.K >= M + 1`` for exact conservation of every kept degree.

    Raises
    ------
    TerminationViolated
        "termination violated" if fat endpoints survive ``M + 1`` rounds.
    """
    if M < n or n < 0:
        raise ValueError("need M >= n >= 0")
    S = S if isinstance(S, TreeSum) else TreeSum(S)
    state = RewriteState(n, M)

    def route(t, c, keep: TreeSum):
        n24 = n_nontrivial_2p4(t)
        state.max_n2p4 = max(state.max_n2p4, n24)
        if order4(t) > n:
            state.R1.add(t, c)
        elif order(t) > M:
            state.R2.add(t, c)
        else:
            keep.add(t, c)

    def cond(t, square_type) -> tuple[bool, int]:
        n24 = n_nontrivial_2p4(t)
        state.max_n2p4 = max(state.max_n2p4, n24)
        lhs = n24 + _count(t, "square", square_type)
        return lhs <= n - 1 + (1 if n24 == 0 else 0), n24

    def to_r1(t, c, label):
        if order4(t) <= n:
            state.routing_violations.append((label, t.key))
        state.R1.add(t, c)

    F = TreeSum()
    for t, c in S:
        route(t, c, F)
    limit = M + 1 if max_rounds is None else max_rounds
    r = 0
    while any(_has_fat(t) for t, _ in F):
        if r >= limit:
            raise TerminationViolated("termination violated")
        r += 1
        # step 1
        A1 = TreeSum()
        for t, c in F:
            for t2 in expand_fat(t, _T2):
                route(t2, c, A1)
        # step 2
        A3 = TreeSum()
        for t, c in A1:
            for t2 in expand_fat(t, _T2P):
                ok, _ = cond(t2, _T2P)
                if not ok:
                    to_r1(t2, c, "step2")
                elif order(t2) > M:
                    state.R2.add(t2, c)
                else:
                    A3.add(t2, c)
        # step 3
        A5 = TreeSum()
        for t, c in A3:
            idx = _leaf_indices(t, "square", (_T2P, _T2))
            for t2, c2 in _expand_leaves(t, c, ctx, idx, "square"):
                route(t2, c2, A5)
        # step 4
        A7 = TreeSum()
        for t, c in A5:
            for t2 in expand_fat(t, _T4):
                ok, n24 = cond(t2, _T4)
                if not ok:
                    extra = n - n24 if n24 > 0 else 0
                    idx = _leaf_indices(t2, "square", (_T4,))[:extra]
                    for t3, c3 in _expand_leaves(t2, c, ctx, idx, "square"):
                        state.max_n2p4 = max(state.max_n2p4, n_nontrivial_2p4(t3))
                        to_r1(t3, c3, "step4")
                elif order(t2) > M:
                    state.R2.add(t2, c)
                else:
                    A7.add(t2, c)
        # step 5
        A9 = TreeSum()
        for t, c in A7:
            idx = _leaf_indices(t, "square", (_T4,))
            for t2, c2 in _expand_leaves(t, c, ctx, idx, "square"):
                route(t2, c2, A9)
        # step 6
        F = TreeSum()
        for t, c in A9:
            idx = [i for i, x in enumerate(t.leaves())
                   if isinstance(x, Endpoint) and x.kind == "empty"]
            for t2, c2 in _expand_leaves(t, c, ctx, idx, "empty"):
                route(t2, c2, F)
        state.history.append({"round": r, "F": len(F), "R1": len(state.R1),
                              "R2": len(state.R2)})
    state.F = F
    state.step = r
    return state


# ------------------------------------------------------------- certification

def certify_remainder_bound(state: RewriteState, ctx: ExtractionContext, lam: complex = 0.02,
                            alpha: complex = 0, mu: complex = 0) -> dict:
    """Sizes of both remainders at a numerical point, normalised by their bounds.

    ``ratio1 = |R1| / (n! |lambda|**(n+1))`` and
    ``ratio2 = |R2| / (n! delta**(M+1))`` with ``delta`` the largest running
    coupling evaluated from the formal solution. ``root1`` is ``ratio1**(1/n)``
    (``ratio1`` itself for ``n = 0``).
    """
    n, M = state.n, state.M
    r1 = complex(state.R1.value(ctx).evaluate(lam, alpha, mu))
    r2 = complex(state.R2.value(ctx).evaluate(lam, alpha, mu))
    sol = ctx.solution
    delta = max(abs(lam), abs(alpha), abs(mu))
    for a in ARGUMENT_TYPES:
        for v in sol.v[a]:
            delta = max(delta, abs(complex(v.evaluate(lam, alpha, mu))))
    ratio1 = abs(r1) / (math.factorial(n) * abs(lam) ** (n + 1)) if lam != 0 else 0.0
    ratio2 = abs(r2) / (math.factorial(n) * delta ** (M + 1)) if delta else 0.0
    root1 = ratio1 ** (1.0 / n) if n > 0 else ratio1
    return {"n": n, "M": M, "R1": abs(r1), "R2": abs(r2), "delta": delta,
            "ratio1": ratio1, "ratio2": ratio2, "root1": root1}


def search_M(S, n: int, model: BetaModel, N: int, lam: complex = 0.02,
             tol: float = 1e-12, M_max: int = 8) -> dict:
    """Smallest ``M`` (by doubling from ``n``) whose ``F`` changes by ``<= tol`` at ``lam``."""
    prev = None
    M = max(n, 1)
    while M <= M_max:
        ctx = ExtractionContext(model, N, M + 1)
        st = run_extraction(S, n, M, ctx)
        val = complex(st.F.value(ctx).evaluate(lam))
        if prev is not None and abs(val - prev[1]) <= tol:
            return {"M": prev[0], "value": prev[1]}
        prev = (M, val)
        M *= 2
    return {"M": prev[0], "value": prev[1], "converged": False}
