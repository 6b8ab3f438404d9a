"""Zero-sum partitions of 2-groups with more than one involution.

The entry point is :func:`zero_sum_partition`.  Requested sizes are first
refined into parts of sizes 3, 4 and 5, the resulting triple (a, b, c) is
realized, and the parts are merged back into the caller's sizes.

Realization dispatch, for a group G written with moduli in descending order:

1. order <= 128: a realization table (annex data or cached exact search);
2. cyclic: impossible (a unique involution);
3. rank 2: exact search up to order 1024, unsupported above;
4. exponent 2, and Z4 x Z2^k: split off V = Z2^4 (resp. Z4 x Z2^2) from
   U = Z2^m and fill W + V*, (U \\ W) + V* and U* separately, or peel
   zero-sum cosets of a Klein subgroup when there are many 4-sets;
5. a cyclic factor of order >= 8 (case 1) or two factors Z4 (case 2): cover
   a subgroup B recursively and the rest by unions of good 6-sets.

Internally a family is a list of integer arrays, one row per set.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .goodsets import BoundaryPlan, boundary_split, case1_frame, Case1Frame, good_union_rows, union_parts
from .groups import GroupSpec, SubgroupFrame, from_canonical
from .lemmas import (
    gf4_triples,
    lemma38_rows,
    lemma39_rows,
    peel_quadruples,
    split_blocks,
    triples_minus_octet_rows,
)
from .mappings import complete_mapping
from .partition import (
    GroupStar,
    ProductOfStars,
    SizeMultiset,
    SubsetFamily,
    reassemble,
    reduce_sizes,
    verify_family,
)
from . import tables

__all__ = [
    "NoZeroSumPartition",
    "NotATwoGroup",
    "SizePrecondition",
    "UnsupportedGroup",
    "ConstructionBug",
    "TABLE_MAX_ORDER",
    "SEARCH_MAX_ORDER",
    "Trace",
    "zero_sum_partition",
    "realize_triple",
    "z224_realize",
    "elementary_realize",
    "case1_realize",
    "case2_realize",
]

TABLE_MAX_ORDER = 128
SEARCH_MAX_ORDER = 1024


class NoZeroSumPartition(ValueError):
    """The group has exactly one involution, so its non-zero elements sum to
    that involution and no zero-sum partition exists."""


class NotATwoGroup(ValueError):
    pass


class SizePrecondition(ValueError):
    pass


class UnsupportedGroup(NotImplementedError):
    pass


class ConstructionBug(RuntimeError):
    def __init__(self, message: str, bundle: dict):
        super().__init__(message)
        self.bundle = bundle


@dataclass
class Trace:
    """Recursion record: one node per realized (sub)problem."""

    nodes: list[dict] = field(default_factory=list)

    def add(self, depth: int, kind: str, group: GroupSpec, t, **extra) -> None:
        node = {"depth": depth, "node": kind, "group": str(group), "triple": list(t)}
        node.update(extra)
        self.nodes.append(node)

    def to_json(self) -> str:
        return json.dumps(self.nodes, indent=1)


Rows = list[np.ndarray]


def _weight(t) -> int:
    return 3 * t[0] + 4 * t[1] + 5 * t[2]


def _assert(cond: bool, message: str, **context) -> None:
    if not cond:
        raise ConstructionBug(message, context)


def _rows_from_family(fam: SubsetFamily) -> Rows:
    by: dict[int, list] = {}
    for s in fam.sets:
        by.setdefault(len(s), []).append(s)
    return [np.array(v, dtype=np.int64) for _, v in sorted(by.items())]


# -- dispatcher -----------------------------------------------------------------------


def _realize(g: GroupSpec, t, trace: Trace | None, depth: int) -> Rows:
    """Realize ``t`` in G* for G with descending moduli."""
    _assert(_weight(t) == g.order - 1, "weight does not match the group", group=str(g), triple=list(t))
    mods = g.moduli
    if g.order <= TABLE_MAX_ORDER:
        if trace is not None:
            trace.add(depth, "table", g, t)
        return _table_rows(g, t)
    if g.rank == 1:
        raise NoZeroSumPartition(f"{g} is cyclic and has a unique involution")
    if g.rank == 2:
        if g.order > SEARCH_MAX_ORDER:
            raise UnsupportedGroup(
                f"{g}: rank-2 groups above order {SEARCH_MAX_ORDER} are not constructed (no search, no recursion)"
            )
        if trace is not None:
            trace.add(depth, "search", g, t)
        return _table_rows(g, t)
    if mods[0] == 2:
        return _y_driver(g, t, trace, depth, elementary=True)
    if mods[0] == 4 and mods[1] == 2:
        return _y_driver(g, t, trace, depth, elementary=False)
    if mods[0] >= 8:
        return _case1(g, t, trace, depth)
    return _case2(g, t, trace, depth)


def _table_rows(g: GroupSpec, t) -> Rows:
    try:
        fam = tables.lookup(GroupStar(g), tuple(t))
    except tables.GenerationFailed as exc:
        if exc.exhausted:
            raise NoZeroSumPartition(f"exact search proves {t} is not realizable in {g}*") from exc
        raise
    return _rows_from_family(fam)


def _in_frame(frame: SubgroupFrame, t, trace, depth) -> Rows:
    """Realize ``t`` in the non-zero part of a coordinate-aligned subgroup."""
    sub = frame.spec()
    canon = sub.canonical()
    rows = _realize(canon, t, trace, depth + 1)
    return [frame.lift_codes(from_canonical(r, sub)) for r in rows]


# -- Z2^m and Z4 x Z2^k ------------------------------------------------------------------


def _v_parts(elementary: bool):
    """(V, five zero-sum triples of V*, three zero-sum 5-sets of V*, 45-table ground)."""
    if elementary:
        V = GroupSpec((2, 2, 2, 2))
        triples = gf4_triples(4)
    else:
        V = GroupSpec((4, 2, 2))
        triples = _rows_from_family(tables.lookup(GroupStar(V), (5, 0, 0)))[0]
    fives = _rows_from_family(tables.lookup(GroupStar(V), (0, 0, 3)))[0]
    return V, triples, fives, ProductOfStars(V, GroupSpec((2, 2)))


def _y_driver(g: GroupSpec, t, trace, depth, elementary: bool) -> Rows:
    a, b, c = t
    n = int(math.log2(g.order))
    if b >= g.order // 8:
        div = [1] * g.rank
        div[-1] = 2
        U = SubgroupFrame(g, tuple(div))
        quads = peel_quadruples(g, U)
        if trace is not None:
            trace.add(depth, "peel", g, t, quadruples=len(quads))
        rest = _in_frame(U, (a, b - len(quads), c), trace, depth)
        return [quads] + rest

    V, vtriples, vfives, ground45 = _v_parts(elementary)
    nv = V.rank
    m = g.rank - nv
    usize = 1 << m
    _assert(g.moduli[:nv] == V.moduli and all(x == 2 for x in g.moduli[nv:]), "unexpected shape", group=str(g))
    if m % 2:
        wbasis = np.array([1 << (m - 1), 1 << (m - 2), 1 << (m - 3)], dtype=np.int64)
        wsize = 8
    else:
        wbasis = None
        wsize = 1
    out: Rows = []
    # W + V*: V coordinates lead, so a V code x sits at x * |U|
    if 3 * a > 1 << (n - 2):
        P = vtriples * usize
        out.append(P if wbasis is None else lemma38_rows(g, wbasis, P))
        t1 = (5 * wsize, 0, 0)
    else:
        R = vfives * usize
        out.append(R if wbasis is None else lemma39_rows(g, wbasis, R))
        t1 = (0, 0, 3 * wsize)
    rest = (a - t1[0], b, c - t1[2])
    _assert(min(rest) >= 0, "first batch exceeds the budget", triple=list(t), batch=list(t1))
    r = (usize - wsize) // 3
    _assert(_weight(rest) == 45 * r + usize - 1, "weight conservation failed", triple=list(t))
    plan = split_blocks(rest, r)
    if trace is not None:
        trace.add(depth, "elementary" if elementary else "z224", g, t, first=list(t1), blocks=r,
                  leftover=list(plan.leftover))
    S = gf4_triples(m) if m % 2 == 0 else triples_minus_octet_rows(m)
    _assert(len(S) == r, "triple count mismatch", m=m)
    # (s0, s1) -> s0 * u1 + s1 * u2, indexed by the Z2^2 code 2*s0 + s1
    img = np.stack([np.zeros(r, dtype=np.int64), S[:, 1], S[:, 0], S[:, 2]], axis=1)
    kinds: dict[tuple[int, int, int], list[int]] = {}
    for i, blk in enumerate(plan.blocks):
        kinds.setdefault(blk, []).append(i)
    for blk, idx in kinds.items():
        fam = tables.lookup(ground45, blk)
        idx = np.array(idx)
        for F in _rows_from_family(fam):
            lo, hi = F // 4, F % 4
            out.append((lo[None] * usize + img[idx][:, hi]).reshape(-1, F.shape[1]))
    div = list(V.moduli) + [1] * m
    out += _in_frame(SubgroupFrame(g, tuple(div)), plan.leftover, trace, depth)
    return out


# -- good-union cases -----------------------------------------------------------------------


def _merge_boundary(b_rows: Rows, w_parts: dict[int, np.ndarray], plan: BoundaryPlan) -> Rows:
    out = [r for r in b_rows if r.shape[1] != 3]
    threes = np.concatenate([np.zeros((0, 3), dtype=np.int64)] + [r for r in b_rows if r.shape[1] == 3])
    k = plan.k
    if k:
        out.append(np.concatenate([threes[:k], w_parts[2]], axis=1))
    if len(threes) > k:
        out.append(threes[k:])
    out += [v for q, v in w_parts.items() if q != 2 and len(v)]
    return out


def _good_union_case(g, t, trace, depth, rows, B: SubgroupFrame, kind: str) -> Rows:
    target_b = B.order - 1
    plan = boundary_split(t, target_b)
    if trace is not None:
        trace.add(depth, kind, g, t, b_triple=list(plan.b_triple), split_fives=plan.k, good_sets=len(rows))
    b_rows = _in_frame(B, plan.b_triple, trace, depth)
    w = union_parts(rows, plan.w_counts)
    return _merge_boundary(b_rows, w, plan)


def _case1(g: GroupSpec, t, trace, depth) -> Rows:
    fr = case1_frame(g, 0)
    rows = good_union_rows(fr)
    return _good_union_case(g, t, trace, depth, rows, fr.B, "case1")


# representatives of two good 6-sets of Z4 x Z4 outside {0, e1, e2, e1+e2}
CASE2_REPS = (((0, 1), (1, 2)), ((1, 0), (1, 1)))


def case2_frames(g: GroupSpec) -> list[Case1Frame]:
    div = [1] * g.rank
    div[0] = div[1] = 4
    L = SubgroupFrame(g, tuple(div))
    div[0] = div[1] = 2
    B = SubgroupFrame(g, tuple(div))
    phi = complete_mapping(L.spec())
    frames = []
    for (b, c) in CASE2_REPS:
        bc = g.encode(b + (0,) * (g.rank - 2))
        cc = g.encode(c + (0,) * (g.rank - 2))
        fr = Case1Frame(L, g.encode((2,) + (0,) * (g.rank - 1)), bc, cc, phi, B)
        fr.validate()
        frames.append(fr)
    return frames


def _case2(g: GroupSpec, t, trace, depth) -> Rows:
    frames = case2_frames(g)
    rows = np.concatenate([good_union_rows(fr) for fr in frames])
    return _good_union_case(g, t, trace, depth, rows, frames[0].B, "case2")


# -- public API ---------------------------------------------------------------------------------


def _check_group(g: GroupSpec) -> None:
    if not g.is_two_group:
        raise NotATwoGroup(f"{g} is not a 2-group")
    if g.involution_count() == 1:
        raise NoZeroSumPartition(f"{g} has a unique involution; its non-zero elements sum to it, not to 0")


def _to_family(g: GroupSpec, rows: Rows) -> SubsetFamily:
    canon_sets = [r for r in rows if len(r)]
    sets = []
    for r in canon_sets:
        sets.extend(map(tuple, from_canonical(r, g).tolist()))
    return SubsetFamily(g, sets)


def _finish(g: GroupSpec, fam: SubsetFamily, expected: SizeMultiset, context: dict) -> SubsetFamily:
    rep = verify_family(g, fam, expected_sizes=expected)
    if not rep.ok:
        raise ConstructionBug(f"constructed family fails verification: {rep.summary()}", context)
    return fam


def zero_sum_partition(group: GroupSpec, sizes, *, trace: Trace | None = None, verify: bool = True) -> SubsetFamily:
    """Partition the non-zero elements of ``group`` into zero-sum sets of the given sizes."""
    sizes = sizes if isinstance(sizes, SizeMultiset) else SizeMultiset.of(sizes)
    _check_group(group)
    if any(q < 3 for q in sizes):
        raise SizePrecondition("every part must have size >= 3")
    if sizes.total != group.order - 1:
        raise SizePrecondition(f"sizes sum to {sizes.total}, expected |G|-1 = {group.order - 1}")
    reduced, plan = reduce_sizes(sizes)
    t = reduced.triple
    rows = _realize(group.canonical(), t, trace, 0)
    fam = reassemble(_to_family(group, rows), plan)
    if verify:
        fam = _finish(group, fam, sizes, {"group": str(group), "sizes": list(sizes.sizes)})
    return fam


def realize_triple(group: GroupSpec, t, *, trace: Trace | None = None) -> SubsetFamily:
    t = tuple(int(x) for x in t)
    if min(t) < 0 or _weight(t) != group.order - 1:
        raise SizePrecondition(f"3a+4b+5c must equal |G|-1 = {group.order - 1}")
    return zero_sum_partition(group, SizeMultiset.from_triple(*t), trace=trace)


def _driver_entry(group, t, check, driver, name, trace):
    t = tuple(int(x) for x in t)
    _check_group(group)
    canon = group.canonical()
    if not check(canon.moduli):
        raise UnsupportedGroup(f"{name} does not apply to {group}")
    if _weight(t) != group.order - 1 or min(t) < 0:
        raise SizePrecondition(f"3a+4b+5c must equal |G|-1 = {group.order - 1}")
    rows = driver(canon, t, trace, 0)
    fam = _to_family(group, rows)
    return _finish(group, fam, SizeMultiset.from_triple(*t), {"driver": name, "group": str(group), "triple": list(t)})


def elementary_realize(group: GroupSpec, t, *, trace: Trace | None = None) -> SubsetFamily:
    """Recursive construction for Z2^m, m >= 8 (no table at the top level)."""
    return _driver_entry(group, t, lambda m: m[0] == 2 and len(m) >= 8,
                         lambda g, t, tr, d: _y_driver(g, t, tr, d, elementary=True), "elementary_realize", trace)


def z224_realize(group: GroupSpec, t, *, trace: Trace | None = None) -> SubsetFamily:
    """Recursive construction for Z4 x Z2^k, k >= 6."""
    return _driver_entry(group, t, lambda m: m[0] == 4 and m[1] == 2 and len(m) >= 7,
                         lambda g, t, tr, d: _y_driver(g, t, tr, d, elementary=False), "z224_realize", trace)


def case1_realize(group: GroupSpec, t, *, trace: Trace | None = None) -> SubsetFamily:
    """Z_{2^a} x H with a >= 3 and H of rank >= 2, order >= 256."""
    return _driver_entry(group, t, lambda m: m[0] >= 8 and len(m) >= 3 and math.prod(m) >= 256,
                         _case1, "case1_realize", trace)


def case2_realize(group: GroupSpec, t, *, trace: Trace | None = None) -> SubsetFamily:
    """Z4 x Z4 x H with exponent 4, order >= 256."""
    return _driver_entry(group, t, lambda m: m[0] == 4 and m[1] == 4 and len(m) >= 3 and math.prod(m) >= 256,
                         _case2, "case2_realize", trace)
