import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from planar_rg.beta_model import CouplingType
from planar_rg.gn_trees import (
    Dot,
    Endpoint,
    EnumerationTooLarge,
    FrameNestingError,
    GNTree,
    TreeValuation,
    Vertex,
    classify_frames,
    count_trees,
    enumerate_trees,
    gamma_sum_inequality,
    graft,
    loglinear_fit,
    n_nontrivial_2p4,
    order,
    order4,
    parse_tree,
    valuate,
    with_frames,
)

T4, T2P, T2, T0 = CouplingType.FOUR, CouplingType.TWO_PRIME, CouplingType.TWO, CouplingType.ZERO
TYPES = ("4", "2'", "2", "0")


# ---------------------------------------------------------------- oracle

def _ordered_parts(total):
    """Ordered sequences of >= 2 non-empty (endpoints, dots) blocks summing to ``total``."""
    e_tot, d_tot = total
    blocks = [(e, d) for e in range(e_tot + 1) for d in range(d_tot + 1) if e + d]

    def rec(rem):
        if rem == (0, 0):
            yield []
            return
        for b in blocks:
            if b[0] <= rem[0] and b[1] <= rem[1]:
                for tail in rec((rem[0] - b[0], rem[1] - b[1])):
                    yield [b] + tail
    return [p for p in rec(total) if len(p) >= 2]


def _plane_trees(n_ep, n_dot, parent, max_scale):
    """Every plane (ordered) tree as nested tuples; no canonicalisation here."""
    if n_ep + n_dot == 1:
        if parent + 1 > max_scale:
            return []
        if n_ep:
            return [("ep", a, parent + 1) for a in TYPES]
        return [("dot", parent + 1)]
    out = []
    for h in range(parent + 1, max_scale + 1):
        for parts in _ordered_parts((n_ep, n_dot)):
            pools = [_plane_trees(e, d, h, max_scale) for e, d in parts]
            for kids in itertools.product(*pools):
                out.append(("v", h, kids))
    return out


def _canon(node):
    """Independent canonical string: children sorted lexicographically by their own strings."""
    if node[0] == "ep":
        return f"E{node[1]}@{node[2]}"
    if node[0] == "dot":
        return f"D@{node[1]}"
    return f"V{node[1]}[" + ",".join(sorted(_canon(c) for c in node[2])) + "]"


def _to_oracle(node):
    if isinstance(node, Endpoint):
        return ("ep", node.type.value, node.scale)
    if isinstance(node, Dot):
        return ("dot", node.scale)
    return ("v", node.scale, tuple(_to_oracle(c) for c in node.children))


def brute_force_forms(n, root, max_scale, dots=0):
    return {_canon(t) for t in _plane_trees(n, dots, root, max_scale)}


# ---------------------------------------------------------------- tests

WINDOWS = [(n, 3, -1, 0) for n in range(1, 5)] + [(n, 2, -1, 0) for n in range(1, 5)] \
    + [(n, 3, 0, 0) for n in range(1, 5)] + [(n, 2, -1, 1) for n in range(1, 4)]


@pytest.mark.parametrize("n,max_scale,root,dots", WINDOWS)
def test_enumeration_matches_brute_force(n, max_scale, root, dots):
    trees = list(enumerate_trees(n, root, max_scale, t=dots))
    forms = [_canon(_to_oracle(t.child)) for t in trees]
    assert len(forms) == len(set(forms))
    assert set(forms) == brute_force_forms(n, root, max_scale, dots)
    assert count_trees(n, root, max_scale, t=dots) == len(trees)


def test_known_small_counts():
    assert [count_trees(n) for n in range(1, 5)] == [4, 30, 180, 1070]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_enumerated_trees_are_valid(n):
    for t in enumerate_trees(n, -1, 3):
        t.validate()
        assert t.n_endpoints == n
        assert all(e.scale <= 3 for e in t.endpoints())


def test_enumeration_cap():
    with pytest.raises(EnumerationTooLarge, match="enumeration too large"):
        list(enumerate_trees(9))
    with pytest.raises(EnumerationTooLarge):
        count_trees(2, max_scale=13)


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_serialisation_round_trip(data):
    pool = list(enumerate_trees(3, -1, 3, t=1))
    t = data.draw(st.sampled_from(pool))
    assert parse_tree(t.serialize()) == t
    assert parse_tree(t.serialize()).serialize() == t.serialize()


@given(st.permutations([Endpoint("fat", "4", 2), Endpoint("thin", "2", 2), Dot(2),
                        Endpoint("fat", "2'", 2)]))
def test_child_order_is_irrelevant(kids):
    ref = Vertex(1, (Endpoint("fat", "4", 2), Endpoint("thin", "2", 2), Dot(2),
                     Endpoint("fat", "2'", 2)))
    assert Vertex(1, tuple(kids)) == ref
    assert hash(Vertex(1, tuple(kids))) == hash(ref)


def test_r_flags():
    t = parse_tree("(root scale=-1 (vertex scale=0 (vertex scale=1 (ep fat 4 2) (ep fat 4 2))"
                   " (vertex scale=2 (dot 3) (ep fat 2 3))))")
    flags = dict(zip((v.key for v, _ in t.vertices()), t.r_flags()))
    assert flags[t.child.key] is False
    by_scale = {v.scale: flags[v.key] for v, _ in t.vertices()}
    # the undotted inner vertex carries the flag, the dotted one does not
    assert by_scale == {0: False, 1: True, 2: False}


def test_orders():
    t = parse_tree("(root scale=-1 (vertex scale=0 (ep fat 4 1) (ep empty 2 1) (ep square 2 1)"
                   " (ep square 4 1)))")
    assert order(t) == 1 + 2 + 2 + 1
    assert order4(t) == 1 + 0 + 1 + 1


def test_frame_triviality():
    base = parse_tree("(root scale=-1 (vertex scale=0 (vertex scale=1 (ep fat 4 2) (ep fat 4 2))"
                      " (ep fat 2 1)))")
    leaves = base.leaves()
    inner = frozenset(i for i, e in enumerate(leaves) if e.scale == 2)
    everything = frozenset(range(len(leaves)))
    t = with_frames(base, {inner: "4"})
    assert classify_frames(t) == (1, [(T4, False)])
    # outer 2-frame sees the inner 4-frame as one type-4 endpoint: nontrivial
    t2 = with_frames(base, {inner: "4", everything: "2"})
    n, flags = classify_frames(t2)
    assert flags == [(T2, False), (T4, False)] and n == 1
    # an outer 2'-frame with a single type-4 endpoint after pruning is trivial
    t3 = with_frames(base, {inner: "2", everything: "2'"})
    assert classify_frames(t3) == (0, [(T2P, True), (T2, False)])
    assert n_nontrivial_2p4(t3) == 0


def test_frame_nesting_violation():
    base = parse_tree("(root scale=-1 (vertex scale=0 (vertex scale=1 (ep fat 4 2) (ep fat 4 2))"
                      " (ep fat 2 1)))")
    outer = next(i for i, e in enumerate(base.leaves()) if e.scale == 1)
    inner = next(i for i, e in enumerate(base.leaves()) if e.scale == 2)
    with pytest.raises(FrameNestingError, match="frame nesting violated"):
        with_frames(base, {frozenset({outer, inner}): "4"})


def test_graft_replaces_endpoint():
    base = parse_tree("(root scale=-1 (vertex scale=0 (ep fat 4 1) (ep fat 2 1)))")
    sub = Vertex(1, (Endpoint("fat", "4", 2), Endpoint("fat", "4", 2)))
    t = graft(base, 0, sub)
    assert t.n_endpoints == 3


def test_exact_valuation():
    t = GNTree(-1, Vertex(1, (Endpoint("fat", "4", 2), Endpoint("fat", "2", 2))))
    v = TreeValuation(gamma=Fraction(2), rho=1, C_m=Fraction(3))
    w = valuate(t, v, {T4: Fraction(1, 5), T2: Fraction(1, 7)})
    # C_m**2 * couplings * gamma**(-(1 - (-1)))
    assert w == Fraction(9) * Fraction(1, 35) * Fraction(1, 4)


@pytest.mark.parametrize("power", [2, 4])
@pytest.mark.parametrize("b", [0.5, 1.0, 3.0])
def test_gamma_sum_inequality(power, b):
    for k in range(0, 21):
        for f in range(0, 7):
            lhs, rhs = gamma_sum_inequality(k, f, b, power=power)
            assert lhs <= rhs * (1 + 1e-12)


def test_loglinear_fit_exact():
    slope, r2 = loglinear_fit([3 ** n for n in range(1, 7)])
    assert slope == pytest.approx(math.log(3))
    assert r2 == pytest.approx(1.0)
