"""Building blocks of the 2-group constructions.

All routines work on element codes of a :class:`GroupSpec` and return numpy
arrays of shape ``(count, size)``, one zero-sum set per row.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .groups import GroupSpec, SubgroupFrame
from .partition import ExplicitGround, SubsetFamily

__all__ = [
    "HypothesisViolated",
    "LemmaInputError",
    "BlockPlan",
    "block_types",
    "split_blocks",
    "gf4_triples",
    "gf4_triple_partition",
    "triples_minus_octet",
    "lemma38_family",
    "lemma39_family",
    "lemma38_rows",
    "lemma39_rows",
    "peel_quadruples",
    "embed_codes",
]


class HypothesisViolated(ValueError):
    pass


class LemmaInputError(ValueError):
    pass


# -- weight-45 blocks -----------------------------------------------------------


@lru_cache(maxsize=None)
def block_types() -> tuple[tuple[int, int, int], ...]:
    """Every (x, y, z) with 3x + 4y + 5z = 45."""
    return tuple(
        (x, y, z)
        for z in range(10)
        for y in range(12)
        for x in range(16)
        if 3 * x + 4 * y + 5 * z == 45
    )


@dataclass(frozen=True)
class BlockPlan:
    r: int
    blocks: tuple[tuple[int, int, int], ...]
    leftover: tuple[int, int, int]


def _hypotheses(a: int, b: int, c: int, r: int) -> bool:
    # ceil((b-1)/9) <= a/3 + c, compared in integers
    need = -(-(b - 1) // 9) if b > 0 else 0
    return 3 * a + 4 * b + 5 * c >= 45 * r + 12 and 3 * need <= a + 3 * c


def split_blocks(t: tuple[int, int, int], r: int) -> BlockPlan:
    """Carve ``r`` blocks of weight 45 out of the counts ``t = (a, b, c)``.

    Requires 3a + 4b + 5c >= 45r + 12 and ceil((b-1)/9) <= a/3 + c.  Blocks
    are taken one at a time, each time choosing a block whose removal keeps
    both inequalities true for the remaining ``r - 1`` blocks; 4-heavy blocks
    are preferred while fours are plentiful.
    """
    a, b, c = t
    if r < 0 or min(t) < 0:
        raise ValueError("counts and block number must be non-negative")
    if r == 0:
        return BlockPlan(0, (), (a, b, c))
    if not _hypotheses(a, b, c, r):
        raise HypothesisViolated(
            f"({a},{b},{c}) with r={r} fails 3a+4b+5c >= 45r+12 or ceil((b-1)/9) <= a/3+c"
        )
    types = block_types()
    blocks: list[tuple[int, int, int]] = []
    # bulk phase: identical blocks while the invariant has a large margin
    while r - len(blocks) > 1:
        left = r - len(blocks)
        choice = _pick_block(a, b, c, left, types)
        if choice is None:
            tail = _tail_search(a, b, c, left, types)
            if tail is None:
                raise HypothesisViolated(f"no block decomposition found for ({a},{b},{c}), r={left}")
            blocks.extend(tail)
            a -= sum(x for x, _, _ in tail)
            b -= sum(y for _, y, _ in tail)
            c -= sum(z for _, _, z in tail)
            break
        x, y, z = choice
        blocks.append(choice)
        a, b, c = a - x, b - y, c - z
    if len(blocks) < r:
        last = next(((x, y, z) for x, y, z in types if x <= a and y <= b and z <= c), None)
        if last is None:
            raise HypothesisViolated(f"no final block fits in ({a},{b},{c})")
        blocks.append(last)
        a, b, c = a - last[0], b - last[1], c - last[2]
    return BlockPlan(r, tuple(blocks), (a, b, c))


def _pick_block(a, b, c, left, types):
    best = None
    best_key = None
    for x, y, z in types:
        if x > a or y > b or z > c:
            continue
        if not _hypotheses(a - x, b - y, c - z, left - 1):
            continue
        # spend fours first; among equals keep the rarer of a, c
        key = (y, -(x if a < 3 * c else z))
        if best_key is None or key > best_key:
            best, best_key = (x, y, z), key
    return best


def _tail_search(a, b, c, k, types):
    seen = set()

    def rec(a, b, c, k):
        if k == 0:
            return []
        state = (min(a, 15 * k), min(b, 11 * k), min(c, 9 * k), k)
        if state in seen:
            return None
        for x, y, z in types:
            if x <= a and y <= b and z <= c:
                rest = rec(a - x, b - y, c - z, k - 1)
                if rest is not None:
                    return [(x, y, z)] + rest
        seen.add(state)
        return None

    return rec(a, b, c, k)


# -- elementary abelian triples -------------------------------------------------


def gf4_triples(m: int) -> np.ndarray:
    """Zero-sum triples partitioning ((Z2)^m)* for even ``m``, as codes.

    With the code split into halves x (high bits) and y (low bits), the map
    T(x, y) = (y, x + y) has order 3 and no non-zero fixed point, and
    v + Tv + T^2 v = 0; the triples are the orbits of T.
    """
    if m < 2 or m % 2:
        raise LemmaInputError(f"m must be even and >= 2, got {m}")
    h = m // 2
    mask = (1 << h) - 1
    v = np.arange(1, 1 << m, dtype=np.int64)

    def T(u):
        x, y = u >> h, u & mask
        return (y << h) | (x ^ y)

    t1 = T(v)
    t2 = T(t1)
    keep = (v < t1) & (v < t2)
    return np.stack([v[keep], t1[keep], t2[keep]], axis=1)


def gf4_triple_partition(m: int) -> SubsetFamily:
    g = GroupSpec((2,) * m)
    return SubsetFamily(g, gf4_triples(m).tolist())


def _octet_basis(m: int) -> tuple[int, int, int]:
    # unit vectors of the three leading coordinates of (Z2)^m
    return 1 << (m - 1), 1 << (m - 2), 1 << (m - 3)


def triples_minus_octet_rows(m: int) -> np.ndarray:
    """Zero-sum triples covering (Z2)^m minus its leading-coordinate octet."""
    if m < 5 or m % 2 == 0:
        raise LemmaInputError(f"m must be odd and >= 5, got {m}")
    tail = gf4_triples(m - 3)  # tail coordinates are the low bits
    v = np.array(_octet_basis(m), dtype=np.int64)
    return lemma38_rows(GroupSpec((2,) * m), v, tail)


def triples_minus_octet(m: int) -> SubsetFamily:
    g = GroupSpec((2,) * m)
    rows = triples_minus_octet_rows(m)
    members = np.sort(rows.ravel())
    return SubsetFamily(g, rows.tolist(), ExplicitGround(g, tuple(members.tolist())))


# -- the octet lemmas -------------------------------------------------------------


def _check_octet(group: GroupSpec, v) -> np.ndarray:
    v = np.asarray(v, dtype=np.int64)
    if v.shape != (3,):
        raise LemmaInputError("the octet needs exactly three generators")
    if np.any(group.add_codes(v, v) != 0):
        raise LemmaInputError("octet generators must be involutions")
    span = {0}
    for x in v.tolist():
        span |= {group.add_codes(s, x) for s in span}
    if len(span) != 8:
        raise LemmaInputError("octet generators are not independent")
    return v


def lemma38_rows(group: GroupSpec, v, P) -> np.ndarray:
    """Eight zero-sum triples covering W + P for each row P = (p0, p1, p2).

    ``v`` holds three generators of W = (Z2)^3.  With indices mod 3:
    P_k = {p_k, v_k + p_{k+1}, v_k + p_{k+2}},
    S_k = {v_k + p_k, v_{k+1} + v_{k+2} + p_{k+2}, v_k + v_{k+1} + v_{k+2} + p_{k+1}},
    T_l = {v_i + v_{i+1} + p_{i+1+l} : i = 0, 1, 2} for l = 1, 2.
    (With l = 0 the T set would repeat v_i + v_{i+1} + p_{i+1}, already in S_{i-1}.)
    """
    add = group.add_codes
    v = [np.int64(x) for x in np.asarray(v, dtype=np.int64)]
    P = np.atleast_2d(np.asarray(P, dtype=np.int64))
    p = [P[:, 0], P[:, 1], P[:, 2]]
    vsum = add(add(v[0], v[1]), v[2])
    rows = []
    for k in range(3):
        k1, k2 = (k + 1) % 3, (k + 2) % 3
        rows.append([p[k], add(p[k1], v[k]), add(p[k2], v[k])])
    for k in range(3):
        k1, k2 = (k + 1) % 3, (k + 2) % 3
        rows.append([add(p[k], v[k]), add(p[k2], add(v[k1], v[k2])), add(p[k1], vsum)])
    for l in (1, 2):
        rows.append([add(p[(i + 1 + l) % 3], add(v[i], v[(i + 1) % 3])) for i in range(3)])
    # (8, 3, n) -> (n * 8, 3), grouped by input row
    out = np.stack([np.stack(r, axis=0) for r in rows], axis=0)
    return out.transpose(2, 0, 1).reshape(-1, 3)


def lemma39_rows(group: GroupSpec, v, R) -> np.ndarray:
    """Eight zero-sum 5-sets covering W + R for each row R = (p0, p1, p2, q, r).

    R_k = P_k + {v_k + q, v_k + r}, U_k = S_k + {v_{k+1} + v_{k+2} + q, ... + r},
    V_1 = T_1 + {q, r}, V_2 = T_2 + {v0 + v1 + v2 + q, v0 + v1 + v2 + r}.
    """
    add = group.add_codes
    R = np.atleast_2d(np.asarray(R, dtype=np.int64))
    base = lemma38_rows(group, v, R[:, :3]).reshape(len(R), 8, 3)
    vv = [np.int64(x) for x in np.asarray(v, dtype=np.int64)]
    vsum = add(add(vv[0], vv[1]), vv[2])
    shifts = [vv[0], vv[1], vv[2]]
    shifts += [add(vv[1], vv[2]), add(vv[2], vv[0]), add(vv[0], vv[1])]
    shifts += [np.int64(0), vsum]
    q, r = R[:, 3], R[:, 4]
    extra = np.stack([np.stack([add(q, s), add(r, s)], axis=1) for s in shifts], axis=1)
    return np.concatenate([base, extra], axis=2).reshape(-1, 5)


def _distinct_or_raise(rows: np.ndarray, expected: int) -> None:
    flat = rows.ravel()
    if len(np.unique(flat)) != expected:
        raise LemmaInputError("W + P has repeated elements (W and <P> must meet only in 0)")


def lemma38_family(group: GroupSpec, v, P) -> SubsetFamily:
    v = _check_octet(group, v)
    P = np.asarray(P, dtype=np.int64)
    if P.shape != (3,) or group.sum_codes(P.tolist()) != 0:
        raise LemmaInputError("P must be a zero-sum set of three elements")
    rows = lemma38_rows(group, v, P)
    _distinct_or_raise(rows, 24)
    return SubsetFamily(group, rows.tolist(), ExplicitGround(group, tuple(rows.ravel().tolist())))


def lemma39_family(group: GroupSpec, v, R) -> SubsetFamily:
    v = _check_octet(group, v)
    R = np.asarray(R, dtype=np.int64)
    if R.shape != (5,) or group.sum_codes(R.tolist()) != 0:
        raise LemmaInputError("R must be a zero-sum set of five elements")
    if len(set(R.tolist())) != 5:
        raise LemmaInputError("R has a repeated element")
    rows = lemma39_rows(group, v, R)
    _distinct_or_raise(rows, 40)
    return SubsetFamily(group, rows.tolist(), ExplicitGround(group, tuple(rows.ravel().tolist())))


# -- cosets of an order-4 elementary subgroup --------------------------------------


def _elementary_pair(U: SubgroupFrame) -> tuple[int, int]:
    g = U.parent
    coords = [i for i, (d, m) in enumerate(zip(U.divisors, g.moduli)) if d < m and m % 2 == 0]
    if len(coords) < 2:
        raise LemmaInputError("the subgroup has no elementary abelian subgroup of order 4")
    i, j = coords[:2]
    return g.basis_code(i, g.moduli[i] // 2), g.basis_code(j, g.moduli[j] // 2)


def peel_quadruples(group: GroupSpec, U: SubgroupFrame, W: tuple[int, int] | None = None) -> np.ndarray:
    """Cosets of W = <w1, w2> = (Z2)^2 lying outside the index-2 frame U.

    Each coset g + W sums to 4g, which is 0 when the exponent divides 4.
    """
    if U.index != 2:
        raise LemmaInputError("U must have index 2")
    if group.exponent() > 4:
        raise LemmaInputError("coset sums vanish only for exponent <= 4")
    w1, w2 = W if W is not None else _elementary_pair(U)
    codes = group.all_codes()
    outside = codes[~np.all(group.digits(codes) % np.array(U.divisors) == 0, axis=1)]
    add = group.add_codes
    c1, c2 = add(outside, np.int64(w1)), add(outside, np.int64(w2))
    c3 = add(c1, np.int64(w2))
    keep = (outside < c1) & (outside < c2) & (outside < c3)
    return np.stack([outside[keep], c1[keep], c2[keep], c3[keep]], axis=1)


def embed_codes(codes, src: GroupSpec, dst: GroupSpec, coords, multipliers=None) -> np.ndarray:
    """Place the coordinates of ``src`` at positions ``coords`` of ``dst``."""
    dig = src.digits(codes)
    full = np.zeros(dig.shape[:-1] + (dst.rank,), dtype=np.int64)
    for j, i in enumerate(coords):
        full[..., i] = dig[..., j] * (1 if multipliers is None else multipliers[j])
    return dst.from_digits(full)
