import json
import random

import pytest

from zerosum import (
    Digraph,
    GroupSpec,
    LabelingPrecondition,
    MultipartiteSpec,
    RootedTree,
    antimagic_3tree_labeling,
    digraph_irregular_labeling,
    distance_magic_labeling,
)
from zerosum.graphs import (
    GraphFormatError,
    parse_graph,
    realize_component_weights,
    verify_antimagic,
    verify_distance_magic,
    verify_irregular,
)

from helpers import partitions, random_3tree, random_classes, random_digraph

GROUPS = {16: [(4, 4), (4, 2, 2), (2, 2, 2, 2), (8, 2)], 32: [(8, 4), (4, 4, 2), (16, 2), (2,) * 5, (4, 2, 2, 2)],
          64: [(8, 8), (4, 4, 4), (2,) * 6, (8, 2, 2, 2)]}


def tadd(x, y, moduli):
    return tuple((a + b) % m for a, b, m in zip(x, y, moduli))


def tneg(x, moduli):
    return tuple(-a % m for a, m in zip(x, moduli))


# -- distance magic --------------------------------------------------------------------


@pytest.mark.parametrize("k", range(50))
def test_distance_magic_random(k):
    rng = random.Random(100 + k)
    order = rng.choice([16, 32, 64])
    g = GroupSpec(rng.choice(GROUPS[order]))
    spec = MultipartiteSpec(tuple(random_classes(order, rng)))
    lab = distance_magic_labeling(g, spec)
    ok, weights = verify_distance_magic(g, spec, lab)
    assert ok and weights == {0}
    # independent check: every vertex sees all labels outside its class
    els = [g.decode(c) for c in lab.labels]
    assert len(set(els)) == g.order
    start = 0
    for n in spec.sizes:
        acc = g.zero
        for j, x in enumerate(els):
            if not start <= j < start + n:
                acc = tadd(acc, x, g.moduli)
        assert acc == g.zero
        start += n


def test_distance_magic_example():
    g = GroupSpec((2, 2, 2))
    lab = distance_magic_labeling(g, MultipartiteSpec((3, 5)))
    assert verify_distance_magic(g, MultipartiteSpec((3, 5)), lab) == (True, {0})


@pytest.mark.parametrize(
    "moduli, sizes, condition",
    [
        ((16,), (4, 12), "Γ ≇ Z_{2^n}"),
        ((3, 4), (4, 8), "|Γ| = 2^n"),
        ((4, 2), (3, 4), "|Γ| = n_1 + ... + n_t"),
        ((4, 2, 2), (2, 4, 10), "n_i ≥ 3 for all i"),
        ((2, 2, 2), (4, 4), None),
        ((2, 2, 2, 2), (3, 3, 3, 3, 4), None),
        ((2,) * 4, (3, 3, 3, 3, 3, 1), "n_i ≥ 3 for all i"),
    ],
)
def test_distance_magic_preconditions(moduli, sizes, condition):
    g = GroupSpec(moduli)
    spec = MultipartiteSpec(sizes)
    if condition is None:
        lab = distance_magic_labeling(g, spec)
        assert verify_distance_magic(g, spec, lab)[0]
        return
    with pytest.raises(LabelingPrecondition) as info:
        distance_magic_labeling(g, spec)
    assert info.value.condition == condition


def test_largest_class_rule_follows_from_the_others():
    # classes of size >= 3 summing to 2^n cannot all have size 3
    for n in range(2, 6):
        for sizes in partitions(2**n, minpart=3):
            assert max(sizes) >= 4


# -- antimagic 3-trees -------------------------------------------------------------------


@pytest.mark.parametrize("k", range(50))
def test_antimagic_random(k):
    rng = random.Random(200 + k)
    order = rng.choice([16, 32])
    g = GroupSpec(rng.choice(GROUPS[order]))
    tree = random_3tree(order, rng)
    assert tree.is_3tree()
    lab = antimagic_3tree_labeling(g, tree)
    ok, weights = verify_antimagic(g, tree, lab)
    assert ok
    assert weights[tree.root] == 0
    # independent weights from residue tuples
    w = {v: g.zero for v in range(order)}
    for (u, v), x in zip(lab.edges, lab.labels):
        e = g.decode(x)
        w[u] = tadd(w[u], e, g.moduli)
        w[v] = tadd(w[v], e, g.moduli)
    assert len(set(w.values())) == order
    assert sorted(lab.labels) == list(range(1, order))


def test_antimagic_preconditions():
    g = GroupSpec((2, 2, 2))
    star = RootedTree([None] + [0] * 7)
    assert verify_antimagic(g, star, antimagic_3tree_labeling(g, star))[0]
    with pytest.raises(LabelingPrecondition) as info:
        antimagic_3tree_labeling(GroupSpec((8,)), star)
    assert info.value.condition == "Γ ≇ Z_{2^n}"
    with pytest.raises(LabelingPrecondition) as info:
        antimagic_3tree_labeling(GroupSpec((4, 4)), star)
    assert info.value.condition == "|T| = |Γ|"
    path_like = RootedTree([None, 0, 0, 0, 1, 1, 2, 2])
    with pytest.raises(LabelingPrecondition) as info:
        antimagic_3tree_labeling(g, path_like)
    assert info.value.condition == "3-tree"


# -- irregular digraphs ------------------------------------------------------------------


@pytest.mark.parametrize("k", range(50))
def test_irregular_random(k):
    rng = random.Random(300 + k)
    order = rng.choice([16, 32, 64])
    g = GroupSpec(rng.choice(GROUPS[order]))
    d = random_digraph(order, rng)
    lab = digraph_irregular_labeling(g, d)
    ok, _ = verify_irregular(g, d, lab)
    assert ok
    w = [g.zero] * d.n
    for (u, v), x in zip(d.arcs, lab.labels):
        e = g.decode(x)
        w[v] = tadd(w[v], e, g.moduli)
        w[u] = tadd(w[u], tneg(e, g.moduli), g.moduli)
    assert len(set(w)) == d.n


@pytest.mark.parametrize(
    "moduli, n, arcs, condition",
    [
        ((3, 3), 3, [(0, 1), (1, 2)], "|Γ| = 2^m"),
        ((8,), 3, [(0, 1), (1, 2)], "|I(Γ)| > 1"),
        ((4, 2), 5, [(0, 1), (1, 2), (3, 4)], "no component of order less than 3"),
        ((2, 2), 4, [(0, 1), (1, 2), (2, 3)], "|Γ| > n"),
        ((4, 2), 6, [(0, 1), (1, 2), (3, 4), (4, 5)], "|Γ| ∉ {n+2, n+3}"),
        ((4, 2), 5, [(0, 1), (1, 2), (2, 3), (3, 4)], "|Γ| ∉ {n+2, n+3}"),
    ],
)
def test_irregular_preconditions(moduli, n, arcs, condition):
    with pytest.raises(LabelingPrecondition) as info:
        digraph_irregular_labeling(GroupSpec(moduli), Digraph(n, arcs))
    assert info.value.condition == condition
    assert condition in str(info.value)


@pytest.mark.parametrize("n", [3, 4, 7])
def test_irregular_edge_orders(n):
    # |Γ| = n + 1 (no filler) and |Γ| >= n + 4 (with filler)
    g = GroupSpec((2, 2, 2))
    d = Digraph(n, [(i, i + 1) for i in range(n - 1)])
    assert verify_irregular(g, d, digraph_irregular_labeling(g, d))[0]


def test_component_weights_need_zero_total():
    g = GroupSpec((2, 2))
    with pytest.raises(LabelingPrecondition):
        realize_component_weights(g, [0, 1, 2], [(0, 1), (1, 2)], {0: 1, 1: 2, 2: 1})


# -- graph files ------------------------------------------------------------------------


def test_parse_graph_kinds():
    assert parse_graph("classes 3 5\n").sizes == (3, 5)
    t = parse_graph("tree 4\n1 0\n2 0\n3 0  # star\n")
    assert t.root == 0 and t.is_3tree()
    d = parse_graph("digraph 3\n0 1\n1 2\n")
    assert d.arcs == [(0, 1), (1, 2)]


@pytest.mark.parametrize(
    "text",
    ["", "forest 3\n", "digraph 3\n0 1 2\n", "digraph 3\n0 5\n", "tree 3\n1 0\n1 2\n", "tree 3\n1 2\n2 1\n",
     "digraph x\n", "classes 3\n1 2\n", "digraph 2\n1 1\n"],
)
def test_parse_graph_rejects(text):
    with pytest.raises(GraphFormatError):
        parse_graph(text)


def test_labeling_serialization():
    g = GroupSpec((2, 2, 2))
    lab = distance_magic_labeling(g, MultipartiteSpec((3, 5)))
    doc = json.loads(lab.to_json())
    assert doc
    assert len(lab.to_text().splitlines()) == 8
