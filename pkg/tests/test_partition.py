import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerosum import GroupSpec, SizeMultiset, SubsetFamily, format_annex, parse_annex, verify_family
from zerosum.groups import SubgroupFrame
from zerosum.partition import (
    AnnexFormatError,
    ExplicitGround,
    FrameStar,
    GroupStar,
    ProductOfStars,
    SizeError,
    family_from_json,
    family_to_json,
    parse_ground,
    reassemble,
    reduce_sizes,
    split_size,
)

from helpers import oracle_check

Z4Z2 = GroupSpec((4, 2))
# Z4 x Z2: a zero-sum split of G* into a 3-set and a 4-set
GOOD = [[(0, 1), (1, 0), (3, 1)], [(1, 1), (2, 0), (2, 1), (3, 0)]]


def fam(sets, g=Z4Z2, ground=None):
    return SubsetFamily.from_elements(g, sets, ground)


def test_good_family_passes():
    assert oracle_check((4, 2), GOOD)
    rep = verify_family(Z4Z2, fam(GOOD), expected_sizes=[3, 4])
    assert rep.ok, rep.summary()


@pytest.mark.parametrize(
    "sets, kind",
    [
        ([[(0, 1), (1, 0), (3, 0)], [(1, 1), (2, 0), (2, 1), (3, 1)]], "sum"),
        ([[(0, 1), (1, 0), (3, 1)], [(1, 1), (2, 0), (2, 1), (3, 0), (0, 1)]], "overlap"),
        ([[(0, 1), (0, 1), (1, 0), (3, 1)], [(1, 1), (2, 0), (2, 1), (3, 0)]], "duplicate"),
        ([[(0, 1), (1, 0), (3, 1)], [(2, 0), (2, 1), (3, 0)]], "incomplete-cover"),
        ([[(0, 0), (0, 1), (1, 0), (3, 1)], [(1, 1), (2, 0), (2, 1), (3, 0)]], "outside-ground"),
    ],
)
def test_each_failure_kind_is_reported(sets, kind):
    rep = verify_family(Z4Z2, fam(sets))
    assert kind in rep.kinds()
    assert not rep.ok


def test_size_mismatch():
    rep = verify_family(Z4Z2, fam(GOOD), expected_sizes=[7])
    assert rep.kinds() == {"size-mismatch"}


def test_target_sum():
    # {1, 7}, {2, 6}, {3, 5}, {4} in Z8 sum to 0, 0, 0, 4
    g = GroupSpec((8,))
    f = fam([[(1,), (7,)], [(2,), (6,)], [(3,), (5,)], [(4,)]], g)
    assert verify_family(g, f).kinds() == {"sum"}
    assert not verify_family(g, f, target=(4,)).ok


def test_size_multiset():
    s = SizeMultiset.parse("3, 5,4 3")
    assert s.sizes == (5, 4, 3, 3)
    assert s.triple == (2, 1, 1)
    assert s.total == 15 and s.is_reduced()
    assert SizeMultiset.from_triple(1, 2, 3).sizes == (5, 5, 5, 4, 4, 3)
    with pytest.raises(SizeError):
        SizeMultiset((3, 0))


@given(st.integers(3, 400))
def test_split_size(q):
    parts = split_size(q)
    assert sum(parts) == q
    assert all(p in (3, 4, 5) for p in parts)
    assert sum(1 for p in parts if p != 3) <= 1


def test_split_size_rejects_small():
    with pytest.raises(SizeError):
        split_size(2)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(3, 20), min_size=1, max_size=6))
def test_reduce_and_reassemble(sizes):
    reduced, plan = reduce_sizes(sizes)
    assert reduced.is_reduced() and reduced.total == sum(sizes)
    # stand-in family: consecutive codes in a big cyclic group
    g = GroupSpec((1024,))
    sets, nxt = [], 1
    for q in reduced.sizes:
        sets.append(tuple(range(nxt, nxt + q)))
        nxt += q
    out = reassemble(SubsetFamily(g, sets), plan)
    assert [len(s) for s in out.sets] == list(sizes)
    assert sorted(c for s in out.sets for c in s) == list(range(1, nxt))


def test_annex_roundtrip():
    text = format_annex([fam(GOOD)])
    assert text.splitlines()[-1] == "A partition for sets of sizes:  1*3  1*4  0*5"
    blocks = parse_annex(text)
    assert len(blocks) == 1
    assert blocks[0].triple == (1, 1, 0)
    assert blocks[0].sets == [[tuple(x) for x in s] for s in GOOD]
    assert verify_family(Z4Z2, blocks[0].family(Z4Z2)).ok


@pytest.mark.parametrize(
    "text",
    [
        "(0, 1), (1, 0)\n",
        "(0, 1) junk\nA partition for sets of sizes: 1*3\n",
        "(0, x), (1, 0)\nA partition for sets of sizes: 1*3\n",
        "(0, 1)\nA partition for sets of sizes: 1-3\n",
    ],
)
def test_annex_rejects_malformed(text):
    with pytest.raises(AnnexFormatError):
        parse_annex(text)


def test_json_roundtrip():
    f = fam(GOOD)
    doc = family_to_json(f, note="x")
    back = family_from_json(json.dumps(doc))
    assert back.group == Z4Z2 and back.sets == f.sets and doc["note"] == "x"


def test_json_roundtrip_explicit_ground():
    g = GroupSpec((2, 2, 2))
    ground = ExplicitGround(g, (1, 2, 3))
    f = SubsetFamily(g, [(1, 2, 3)], ground)
    back = family_from_json(family_to_json(f))
    assert back.ground == ground
    assert verify_family(g, back).ok


def test_grounds():
    g = GroupSpec((4, 2, 2))
    assert GroupStar(g).size == 15 and len(GroupStar(g).codes()) == 15
    fs = FrameStar(SubgroupFrame(g, (2, 1, 1)))
    assert fs.size == 7
    assert all(GroupSpec.decode(g, int(c))[0] % 2 == 0 for c in fs.codes())
    ps = ProductOfStars(GroupSpec((2, 2)), GroupSpec((2, 2)))
    assert ps.size == 9 and len(set(ps.codes().tolist())) == 9
    for gr in (GroupStar(g), fs, ps):
        again = parse_ground(gr.descriptor())
        assert again.descriptor() == gr.descriptor()
        assert np.array_equal(again.codes(), gr.codes())


def test_product_of_stars_keeps_written_order():
    gr = parse_ground("(Z4xZ2^2)*+(Z2^2)*")
    assert gr.left.moduli == (4, 2, 2)
    gr2 = parse_ground("(Z2xZ4)*+(Z2)*")
    assert gr2.left.moduli == (2, 4)
