"""Good 6-sets and the unions of them used to split a group around a subgroup.

A good 6-set is ``{c, d, -c-d, -c, -d, c+d}``.  It splits into the three
zero-sum pairs ``{c,-c}, {d,-d}, {-c-d,c+d}`` and into the two zero-sum
triples ``{c, d, -c-d}`` and ``{-c, -d, c+d}``.  Rows of the arrays below
always list the members in that order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import GroupSpec, SubgroupFrame
from .mappings import CompleteMapping, complete_mapping
from .partition import ExplicitGround, SizeMultiset, SubsetFamily

__all__ = [
    "DegenerateSixSet",
    "Infeasible",
    "GoodSixSet",
    "good_six",
    "Case1Frame",
    "case1_frame",
    "good_union_rows",
    "build_good_union",
    "union_parts",
    "realize_in_good_union",
    "BoundaryPlan",
    "boundary_split",
]

PAIRS = ((0, 3), (1, 4), (2, 5))
TRIPLES = ((0, 1, 2), (3, 4, 5))


class DegenerateSixSet(ValueError):
    pass


class Infeasible(ValueError):
    pass


@dataclass(frozen=True)
class GoodSixSet:
    group: GroupSpec
    c: int
    d: int

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(int(x) for x in _six(self.group, np.int64(self.c), np.int64(self.d)))

    def pairs(self) -> list[tuple[int, int]]:
        m = self.members
        return [(m[i], m[j]) for i, j in PAIRS]

    def triples(self) -> list[tuple[int, int, int]]:
        m = self.members
        return [tuple(m[i] for i in t) for t in TRIPLES]

    def quad_and_pair(self) -> tuple[tuple[int, ...], tuple[int, int]]:
        m = self.members
        return (m[0], m[3], m[1], m[4]), (m[2], m[5])


def _six(g: GroupSpec, c, d):
    s = g.add_codes(c, d)
    return [c, d, g.neg_codes(s), g.neg_codes(c), g.neg_codes(d), s]


def good_six(group: GroupSpec, c, d) -> GoodSixSet:
    """The good 6-set generated by ``c`` and ``d`` (codes or residue tuples)."""
    c = group.encode(c) if isinstance(c, (tuple, list)) else int(c)
    d = group.encode(d) if isinstance(d, (tuple, list)) else int(d)
    gs = GoodSixSet(group, c, d)
    if len(set(gs.members)) != 6:
        raise DegenerateSixSet(f"{group.decode(c)}, {group.decode(d)} do not generate six distinct elements")
    return gs


# -- unions over the cosets of L ----------------------------------------------------


@dataclass(frozen=True)
class Case1Frame:
    """Subgroup L with coset representatives e, b, c and a complete mapping of L.

    The six cosets b+L, c+L, -b-c+L, -b+L, -c+L, b+c+L must be distinct and
    disjoint from the subgroup B = L + {0, e} (or the larger B of the
    Z4 x Z4 case, given through ``B``).
    """

    L: SubgroupFrame
    e: int
    b: int
    c: int
    phi: CompleteMapping
    B: SubgroupFrame

    def validate(self) -> None:
        g = self.L.parent
        reps = _six(g, np.int64(self.b), np.int64(self.c))
        classes = {tuple(g.digits(int(r)) % np.array(self.L.divisors)) for r in reps}
        if len(classes) != 6:
            raise DegenerateSixSet("the six coset representatives are not in distinct cosets of L")
        if any(self.B.contains(g.decode(int(r))) for r in reps):
            raise DegenerateSixSet("a good coset meets B")
        if not self.B.contains(g.decode(self.e)) or self.L.contains(g.decode(self.e)):
            raise DegenerateSixSet("e must lie in B but not in L")
        if not self.L.contains(g.decode(g.add_codes(self.e, self.e))):
            raise DegenerateSixSet("2e must lie in L")


def case1_frame(group: GroupSpec, axis: int = 0) -> Case1Frame:
    """Frame for Z_{2^alpha} x H (alpha >= 3) along coordinate ``axis``.

    L = multiples of 8 in that coordinate times H, so G/L = Z8 with
    e = 4u, b = u, c = 2u for the unit vector u; B = L + {0, e}.
    """
    m = group.moduli[axis]
    if m < 8:
        raise DegenerateSixSet("case 1 needs a cyclic factor of order >= 8")
    div = [1] * group.rank
    div[axis] = 8
    L = SubgroupFrame(group, tuple(div))
    div[axis] = 4
    B = SubgroupFrame(group, tuple(div))
    u = group.basis_code(axis)
    fr = Case1Frame(L, group.basis_code(axis, 4), u, group.basis_code(axis, 2), complete_mapping(L.spec()), B)
    fr.validate()
    return fr


def good_union_rows(frame: Case1Frame, b: int | None = None, c: int | None = None) -> np.ndarray:
    """Rows {b+a, c+phi(a), -b-c+psi(a), -b-a, -c-phi(a), b+c-psi(a)} for a in L."""
    g = frame.L.parent
    b = frame.b if b is None else b
    c = frame.c if c is None else c
    lspec = frame.L.spec()
    a = frame.L.lift_codes(lspec.all_codes())
    pa = frame.L.lift_codes(frame.phi.phi)
    return np.stack(_six(g, g.add_codes(a, np.int64(b)), g.add_codes(pa, np.int64(c))), axis=1)


def build_good_union(frame: Case1Frame, b: int | None = None, c: int | None = None) -> list[GoodSixSet]:
    g = frame.L.parent
    rows = good_union_rows(frame, b, c)
    return [GoodSixSet(g, int(r[0]), int(r[1])) for r in rows]


def union_parts(rows: np.ndarray, counts: dict[int, int]) -> dict[int, np.ndarray]:
    """Split the union of good 6-set rows into zero-sum parts.

    ``counts`` maps part size (>= 2) to multiplicity.  Odd parts take one
    triple plus pairs, even parts take pairs only; as many 6-sets as there
    are pairs of odd parts are opened into triples, the rest into pairs.
    """
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, 6)
    if any(q < 2 for q, n in counts.items() if n):
        raise Infeasible("parts of a good union must have size >= 2")
    total = sum(q * n for q, n in counts.items())
    if total != rows.size:
        raise Infeasible(f"parts sum to {total}, the union has {rows.size} elements")
    odd = sum(n for q, n in counts.items() if q % 2)
    if odd % 2:  # pragma: no cover - implied by the total being even
        raise Infeasible("odd number of odd parts")
    k = odd // 2
    triples = rows[:k][:, list(TRIPLES)].reshape(-1, 3)
    pairs = rows[k:][:, list(PAIRS)].reshape(-1, 2)
    out: dict[int, np.ndarray] = {}
    ti = pi = 0
    for q in sorted(counts):
        n = counts[q]
        if not n:
            continue
        np_ = (q - 3) // 2 if q % 2 else q // 2
        chunks = []
        if q % 2:
            chunks.append(triples[ti : ti + n])
            ti += n
        if np_:
            chunks.append(pairs[pi : pi + n * np_].reshape(n, 2 * np_))
            pi += n * np_
        out[q] = np.concatenate(chunks, axis=1)
    return out


def realize_in_good_union(sets: list[GoodSixSet], parts) -> SubsetFamily:
    """Zero-sum exact cover of the union of ``sets`` with the given part sizes."""
    if not sets:
        raise Infeasible("no good sets given")
    g = sets[0].group
    parts = list(parts.sizes if isinstance(parts, SizeMultiset) else parts)
    if any(q < 2 for q in parts):
        raise Infeasible("parts of a good union must have size >= 2")
    rows = np.array([s.members for s in sets], dtype=np.int64)
    counts: dict[int, int] = {}
    for q in parts:
        counts[q] = counts.get(q, 0) + 1
    out = union_parts(rows, counts)
    fam_sets = [tuple(r) for q in sorted(out) for r in out[q].tolist()]
    return SubsetFamily(g, fam_sets, ExplicitGround(g, tuple(rows.ravel().tolist())))


# -- the B / W boundary -----------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryPlan:
    """x3, x4, x5 whole parts go to B; k fives are split as 3 (in B) + 2 (in W)."""

    x3: int
    x4: int
    x5: int
    k: int
    t: tuple[int, int, int]

    @property
    def b_triple(self) -> tuple[int, int, int]:
        return self.x3 + self.k, self.x4, self.x5

    @property
    def w_counts(self) -> dict[int, int]:
        a, b, c = self.t
        return {2: self.k, 3: a - self.x3, 4: b - self.x4, 5: c - self.x5 - self.k}


def boundary_split(parts, target_b: int) -> BoundaryPlan:
    """Split parts of sizes 3, 4, 5 between B* (``target_b`` elements) and W.

    Searches the move set: whole parts on either side, plus up to four fives
    cut into a triple for B* and a pair for W.  B receives only parts of
    size >= 3; W receives parts of size >= 2.
    """
    if isinstance(parts, SizeMultiset):
        a, b, c = parts.triple
        if not parts.is_reduced():
            raise Infeasible("boundary_split expects parts of sizes 3, 4, 5")
    else:
        a, b, c = parts
    total = 3 * a + 4 * b + 5 * c
    rest = total - target_b
    if target_b < 0 or rest < 0 or rest % 2:
        raise Infeasible(f"cannot split {total} into {target_b} and an even remainder")
    for k in range(0, min(4, c) + 1):
        for x5 in range(0, c - k + 1):
            R = target_b - 5 * x5 - 3 * k
            if R < 0:
                break
            # 3 x3 + 4 x4 = R: x4 = R mod 3 (mod 3), x3 <= a
            lo = max(0, -(-(R - 3 * a) // 4))
            x4 = lo + (R - lo) % 3
            if x4 <= b and 4 * x4 <= R:
                x3 = (R - 4 * x4) // 3
                return BoundaryPlan(x3, x4, x5, k, (a, b, c))
    raise Infeasible(f"no boundary split of ({a},{b},{c}) with |B*| = {target_b}")
