import json
import random

import pytest

from zerosum import (
    GroupSpec,
    NoZeroSumPartition,
    NotATwoGroup,
    SizePrecondition,
    Trace,
    UnsupportedGroup,
    case1_realize,
    case2_realize,
    elementary_realize,
    realize_triple,
    verify_family,
    z224_realize,
    zero_sum_partition,
)
from zerosum.search import enumerate_triples

from helpers import oracle_check, shapes


def random_sizes(total, rng, lo=3, hi=12):
    out = []
    while total:
        if total < 2 * lo:
            out.append(total)
            break
        q = rng.randint(lo, min(hi, total - lo))
        out.append(q)
        total -= q
    return out


@pytest.mark.parametrize("n", [8, 9, 10])
def test_every_rank3_shape_samples(n):
    rng = random.Random(n)
    for moduli in shapes(n):
        if len(moduli) < 3:
            continue
        g = GroupSpec(moduli)
        triples = enumerate_triples(g.order - 1)
        for t in [triples[0], triples[-1]] + rng.sample(triples, 3):
            fam = realize_triple(g, t)
            assert verify_family(g, fam, expected_sizes=[3] * t[0] + [4] * t[1] + [5] * t[2]).ok, (moduli, t)


@pytest.mark.parametrize("moduli", [(4, 4, 2, 2), (8, 2, 2, 2, 2), (4, 2, 2, 2, 2, 2), (2,) * 8])
def test_tuple_oracle_on_order_256(moduli):
    g = GroupSpec(moduli)
    sizes = random_sizes(g.order - 1, random.Random(1))
    fam = zero_sum_partition(g, sizes)
    assert sorted(len(s) for s in fam.sets) == sorted(sizes)
    assert oracle_check(moduli, fam.element_sets())


@pytest.mark.parametrize("moduli", [(2, 4, 2), (2, 2, 8, 2, 4), (2, 4, 2, 2, 2, 2, 2)])
def test_noncanonical_factor_order(moduli):
    g = GroupSpec(moduli)
    fam = zero_sum_partition(g, random_sizes(g.order - 1, random.Random(2)))
    assert fam.group.moduli == moduli
    assert oracle_check(moduli, fam.element_sets())


def test_large_parts():
    g = GroupSpec((4, 2, 2, 2, 2, 2))
    fam = zero_sum_partition(g, [124, 3])
    assert sorted(len(s) for s in fam.sets) == [3, 124]
    assert oracle_check(g.moduli, fam.element_sets())
    fam = zero_sum_partition(g, [127])
    assert oracle_check(g.moduli, fam.element_sets())


@pytest.mark.parametrize("moduli, t", [((16, 16), (5, 60, 0)), ((32, 8), (0, 0, 51))])
def test_rank2_search_range(moduli, t):
    g = GroupSpec(moduli)
    fam = realize_triple(g, t)
    assert verify_family(g, fam).ok


def test_rank2_above_cap_is_unsupported():
    with pytest.raises(UnsupportedGroup):
        realize_triple(GroupSpec((64, 32)), enumerate_triples(2047)[0])


@pytest.mark.parametrize("moduli", [(2,), (8,), (64,)])
def test_cyclic_has_no_partition(moduli):
    g = GroupSpec(moduli)
    sizes = [g.order - 1] if g.order > 4 else [1]
    with pytest.raises((NoZeroSumPartition, SizePrecondition)):
        zero_sum_partition(g, sizes)


def test_cyclic_rejected_before_size_checks():
    with pytest.raises(NoZeroSumPartition):
        zero_sum_partition(GroupSpec((16,)), [3, 3, 4, 5])


def test_precondition_errors():
    with pytest.raises(NotATwoGroup):
        zero_sum_partition(GroupSpec((3, 3)), [8])
    with pytest.raises(SizePrecondition):
        zero_sum_partition(GroupSpec((4, 2)), [2, 5])
    with pytest.raises(SizePrecondition):
        zero_sum_partition(GroupSpec((4, 2)), [3, 3])
    with pytest.raises(SizePrecondition):
        realize_triple(GroupSpec((4, 2)), (1, 0, 1))


def test_trace_records_recursion():
    tr = Trace()
    elementary_realize(GroupSpec((2,) * 9), (137, 0, 20), trace=tr)
    kinds = [n["node"] for n in tr.nodes]
    assert kinds[0] == "elementary"
    assert "table" in kinds
    assert json.loads(tr.to_json()) == tr.nodes
    assert all(n["depth"] >= 0 for n in tr.nodes)


def test_peel_branch():
    tr = Trace()
    g = GroupSpec((2,) * 8)
    fam = elementary_realize(g, (1, 63, 0), trace=tr)
    assert tr.nodes[0]["node"] == "peel"
    assert verify_family(g, fam).ok


@pytest.mark.parametrize(
    "fn, moduli",
    [
        (elementary_realize, (4, 2, 2, 2, 2, 2, 2)),
        (elementary_realize, (2,) * 6),
        (z224_realize, (2,) * 8),
        (case1_realize, (4, 4, 4, 4)),
        (case1_realize, (8, 2, 2)),
        (case2_realize, (8, 4, 2, 2, 2)),
    ],
)
def test_drivers_reject_other_shapes(fn, moduli):
    g = GroupSpec(moduli)
    with pytest.raises(UnsupportedGroup):
        fn(g, enumerate_triples(g.order - 1)[0])


@pytest.mark.parametrize(
    "fn, moduli",
    [
        (elementary_realize, (2,) * 10),
        (z224_realize, (4,) + (2,) * 7),
        (case1_realize, (8, 4, 2, 2, 2)),
        (case1_realize, (16, 2, 2, 2, 2)),
        (case2_realize, (4, 4, 4, 2, 2)),
    ],
)
def test_drivers_at_order_512_plus(fn, moduli):
    g = GroupSpec(moduli)
    rng = random.Random(3)
    for t in rng.sample(enumerate_triples(g.order - 1), 4):
        fam = fn(g, t)
        assert verify_family(g, fam).ok


def test_deterministic_output():
    g = GroupSpec((8, 4, 4, 2))
    a = realize_triple(g, (30, 10, 25))
    b = realize_triple(g, (30, 10, 25))
    assert a.sets == b.sets
