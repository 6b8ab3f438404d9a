"""Subset families, ground sets, the partition verifier and the annex codec."""

from __future__ import annotations

import hashlib
import json
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .groups import GroupSpec, SubgroupFrame, format_element, parse_group_spec

__all__ = [
    "SizeMultiset",
    "SubsetFamily",
    "VerifyReport",
    "GroupStar",
    "FrameStar",
    "ProductOfStars",
    "ExplicitGround",
    "MergePlan",
    "verify_family",
    "parse_annex",
    "format_annex",
    "AnnexBlock",
    "reduce_sizes",
    "split_size",
    "reassemble",
    "family_to_json",
    "family_from_json",
]


class SizeError(ValueError):
    pass


@dataclass(frozen=True)
class SizeMultiset:
    """A multiset of part sizes, stored sorted descending."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(sorted((int(s) for s in self.sizes), reverse=True))
        if any(s < 1 for s in sizes):
            raise SizeError(f"part sizes must be positive: {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def of(cls, sizes: Iterable[int]) -> "SizeMultiset":
        return cls(tuple(sizes))

    @classmethod
    def from_triple(cls, a: int, b: int, c: int) -> "SizeMultiset":
        return cls((5,) * c + (4,) * b + (3,) * a)

    @classmethod
    def parse(cls, text: str) -> "SizeMultiset":
        return cls(tuple(int(t) for t in re.split(r"[,\s]+", text.strip()) if t))

    @property
    def total(self) -> int:
        return sum(self.sizes)

    def __len__(self):
        return len(self.sizes)

    def __iter__(self):
        return iter(self.sizes)

    def counts(self) -> Counter:
        return Counter(self.sizes)

    @property
    def triple(self) -> tuple[int, int, int]:
        """Counts of parts equal to 3, 4 and 5."""
        cnt = self.counts()
        return cnt[3], cnt[4], cnt[5]

    def is_reduced(self) -> bool:
        return all(s in (3, 4, 5) for s in self.sizes)


# -- ground sets ----------------------------------------------------------------


@dataclass(frozen=True)
class GroupStar:
    """The non-zero elements of a group."""

    group: GroupSpec

    kind = "group-star"

    def codes(self) -> np.ndarray:
        return self.group.nonzero_codes()

    @property
    def size(self) -> int:
        return self.group.order - 1

    def descriptor(self) -> str:
        return f"{self.group}*"


@dataclass(frozen=True)
class FrameStar:
    """The non-zero elements of a coordinate-aligned subgroup."""

    frame: SubgroupFrame

    kind = "frame-star"

    @property
    def group(self) -> GroupSpec:
        return self.frame.parent

    def codes(self) -> np.ndarray:
        codes = np.sort(self.frame.subgroup_codes())
        return codes[codes != 0]

    @property
    def size(self) -> int:
        return self.frame.order - 1

    def descriptor(self) -> str:
        return f"{self.frame.parent}[{','.join(map(str, self.frame.divisors))}]*"


@dataclass(frozen=True)
class ProductOfStars:
    """``left* + right*`` inside ``left x right`` (coordinates concatenated).

    This is the ground set of a shifted copy of ``left*``: a zero-sum triple
    ``{p, q, p+q}`` is a copy of ``(Z2^2)*``, and ``{p, q, p+q} + V*`` is
    ``V* + (Z2^2)*`` up to an injective homomorphism.
    """

    left: GroupSpec
    right: GroupSpec

    kind = "shifted-product"

    @property
    def group(self) -> GroupSpec:
        return GroupSpec(self.left.moduli + self.right.moduli)

    def codes(self) -> np.ndarray:
        lo = self.left.nonzero_codes()
        hi = self.right.nonzero_codes()
        return np.sort((lo[:, None] * self.right.order + hi[None, :]).ravel())

    @property
    def size(self) -> int:
        return (self.left.order - 1) * (self.right.order - 1)

    def descriptor(self) -> str:
        return f"({self.left})*+({self.right})*"


@dataclass(frozen=True, eq=False)
class ExplicitGround:
    group: GroupSpec
    members: tuple[int, ...]

    kind = "explicit"

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(int(c) for c in self.members)))

    def __eq__(self, other):
        return (
            isinstance(other, ExplicitGround)
            and self.group.moduli == other.group.moduli
            and self.members == other.members
        )

    def __hash__(self):
        return hash((self.group.moduli, self.members))

    def codes(self) -> np.ndarray:
        return np.array(self.members, dtype=np.int64)

    @property
    def size(self) -> int:
        return len(self.members)

    def descriptor(self) -> str:
        digest = hashlib.sha256(repr(self.members).encode()).hexdigest()[:12]
        return f"explicit:{self.group}:{len(self.members)}:{digest}"


Ground = GroupStar | FrameStar | ProductOfStars | ExplicitGround


def parse_ground(text: str, group: GroupSpec | None = None) -> Ground:
    text = text.strip()
    m = re.fullmatch(r"\((.+)\)\*\+\((.+)\)\*", text)
    if m:
        # keep the written factor order: it fixes the coordinate layout
        return ProductOfStars(_ordered_spec(m.group(1)), _ordered_spec(m.group(2)))
    m = re.fullmatch(r"(.+)\[([\d,]+)\]\*", text)
    if m:
        parent = _ordered_spec(m.group(1))
        return FrameStar(SubgroupFrame(parent, tuple(int(d) for d in m.group(2).split(","))))
    if text.endswith("*"):
        return GroupStar(_ordered_spec(text[:-1]))
    raise ValueError(f"unrecognised ground descriptor {text!r}")


def _ordered_spec(text: str) -> GroupSpec:
    canon = parse_group_spec(text)
    mods: list[int] = []
    for token in text.replace(" ", "").split("x"):
        m = re.match(r"Z(\d+)(?:\^(\d+))?$", token)
        mods.extend([int(m.group(1))] * int(m.group(2) or 1))
    assert sorted(mods) == sorted(canon.moduli)
    return GroupSpec(tuple(mods))


# -- families -------------------------------------------------------------------


@dataclass
class SubsetFamily:
    """An ordered family of element sets, stored as tuples of codes."""

    group: GroupSpec
    sets: list[tuple[int, ...]]
    ground: Ground | None = None

    def __post_init__(self):
        self.sets = [tuple(int(c) for c in s) for s in self.sets]
        if self.ground is None:
            self.ground = GroupStar(self.group)

    @classmethod
    def from_elements(cls, group: GroupSpec, sets, ground=None) -> "SubsetFamily":
        return cls(group, [tuple(group.encode(x) for x in s) for s in sets], ground)

    def __len__(self):
        return len(self.sets)

    def element_sets(self) -> list[list[tuple[int, ...]]]:
        return [[self.group.decode(c) for c in s] for s in self.sets]

    @property
    def sizes(self) -> SizeMultiset:
        return SizeMultiset(tuple(len(s) for s in self.sets))

    @property
    def triple(self) -> tuple[int, int, int]:
        return self.sizes.triple

    def all_codes(self) -> np.ndarray:
        if not self.sets:
            return np.zeros(0, dtype=np.int64)
        return np.fromiter((c for s in self.sets for c in s), dtype=np.int64)


FAILURE_KINDS = ("sum", "duplicate", "overlap", "outside-ground", "size-mismatch", "incomplete-cover")


@dataclass
class VerifyReport:
    failures: list[tuple[int | None, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def kinds(self) -> set[str]:
        return {k for _, k in self.failures}

    def __bool__(self):
        return self.ok

    def summary(self) -> str:
        if self.ok:
            return "ok"
        cnt = Counter(k for _, k in self.failures)
        return ", ".join(f"{k} x{n}" for k, n in sorted(cnt.items()))


def verify_family(
    group: GroupSpec,
    family: SubsetFamily,
    expected_sizes: SizeMultiset | Sequence[int] | None = None,
    target: Sequence[int] | None = None,
    require_exact_cover: bool = True,
) -> VerifyReport:
    """Check disjointness, membership, per-set sums, sizes and (optionally) cover."""
    report = VerifyReport()
    fail = report.failures
    sets = family.sets
    target_digits = np.array(group.zero if target is None else group.element(target), dtype=np.int64)

    lengths = np.fromiter((len(s) for s in sets), dtype=np.int64, count=len(sets))
    flat = family.all_codes()
    for i in np.flatnonzero(lengths == 0):
        fail.append((int(i), "size-mismatch"))

    in_range = (flat >= 0) & (flat < group.order)
    set_of = np.repeat(np.arange(len(sets)), lengths)

    ground_codes = family.ground.codes() if family.ground is not None else group.nonzero_codes()
    inside = np.zeros(len(flat), dtype=bool)
    inside[in_range] = np.isin(flat[in_range], ground_codes)
    for i in np.unique(set_of[~inside]):
        fail.append((int(i), "outside-ground"))

    nonempty = np.flatnonzero(lengths > 0)
    if len(nonempty):
        safe = np.where(in_range, flat, 0)
        starts = np.concatenate(([0], np.cumsum(lengths)[:-1]))[nonempty]
        sums = np.add.reduceat(group.digits(safe), starts, axis=0) % group._mod_row
        bad = np.any(sums != target_digits, axis=1)
        for i in nonempty[bad]:
            fail.append((int(i), "sum"))

    # duplicates inside one set, then overlaps between sets
    order = np.lexsort((flat, set_of))
    fs, ss = flat[order], set_of[order]
    dup = (fs[1:] == fs[:-1]) & (ss[1:] == ss[:-1])
    for i in np.unique(ss[1:][dup]):
        fail.append((int(i), "duplicate"))
    pairs = np.unique(np.stack([flat, set_of]), axis=1) if len(flat) else np.zeros((2, 0), np.int64)
    order = np.argsort(pairs[0], kind="stable")
    codes_sorted, sets_sorted = pairs[0][order], pairs[1][order]
    clash = codes_sorted[1:] == codes_sorted[:-1]
    for i in np.unique(sets_sorted[1:][clash]):
        fail.append((int(i), "overlap"))

    if expected_sizes is not None:
        expected = expected_sizes if isinstance(expected_sizes, SizeMultiset) else SizeMultiset.of(expected_sizes)
        if sorted(lengths.tolist(), reverse=True) != list(expected.sizes):
            fail.append((None, "size-mismatch"))

    if require_exact_cover:
        if not np.isin(ground_codes, flat).all():
            fail.append((None, "incomplete-cover"))
    return report


# -- size reduction -------------------------------------------------------------


def split_size(q: int) -> list[int]:
    """Split a part of size ``q >= 3`` into parts from {3, 4, 5}.

    q = 3k + r: r=0 gives k threes, r=1 gives (k-1) threes and a 4,
    r=2 gives (k-1) threes and a 5.
    """
    if q < 3:
        raise SizeError(f"part size {q} is below 3")
    if q <= 5:
        return [q]
    k, r = divmod(q, 3)
    if r == 0:
        return [3] * k
    return [3] * (k - 1) + [3 + r]


@dataclass(frozen=True)
class MergePlan:
    """For each original part (in caller order), the reduced piece sizes."""

    original: tuple[int, ...]
    pieces: tuple[tuple[int, ...], ...]

    @property
    def is_trivial(self) -> bool:
        return all(len(p) == 1 for p in self.pieces)


def reduce_sizes(sizes: SizeMultiset | Sequence[int]) -> tuple[SizeMultiset, MergePlan]:
    original = tuple(sizes.sizes if isinstance(sizes, SizeMultiset) else sizes)
    pieces = tuple(tuple(split_size(q)) for q in original)
    reduced = SizeMultiset(tuple(p for ps in pieces for p in ps))
    return reduced, MergePlan(original, pieces)


def reassemble(family: SubsetFamily, plan: MergePlan) -> SubsetFamily:
    """Union the pieces of each original part; output order follows the plan."""
    pool: dict[int, list[tuple[int, ...]]] = defaultdict(list)
    for s in family.sets:
        pool[len(s)].append(s)
    for stack in pool.values():
        stack.reverse()
    out = []
    for pieces in plan.pieces:
        merged: list[int] = []
        for q in pieces:
            if not pool.get(q):
                raise SizeError(f"family has no spare set of size {q}")
            merged.extend(pool[q].pop())
        out.append(tuple(merged))
    if any(pool.values()):
        raise SizeError("family has sets left over after reassembly")
    return SubsetFamily(family.group, out, family.ground)


# -- annex text format ----------------------------------------------------------

_TUPLE = re.compile(r"\(([^()]*)\)")
_TRAILER = re.compile(r"^\s*A partition for sets of sizes:(.*)$")


@dataclass
class AnnexBlock:
    header: dict[int, int]
    sets: list[list[tuple[int, ...]]]

    @property
    def triple(self) -> tuple[int, int, int]:
        return self.header.get(3, 0), self.header.get(4, 0), self.header.get(5, 0)

    @property
    def sizes(self) -> SizeMultiset:
        return SizeMultiset(tuple(q for q, n in self.header.items() for _ in range(n)))

    def family(self, group: GroupSpec, ground: Ground | None = None) -> SubsetFamily:
        return SubsetFamily.from_elements(group, self.sets, ground)


class AnnexFormatError(ValueError):
    pass


def parse_annex(text: str) -> list[AnnexBlock]:
    """Parse annex-format text: one set per line, each block closed by a trailer."""
    blocks: list[AnnexBlock] = []
    current: list[list[tuple[int, ...]]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        trailer = _TRAILER.match(line)
        if trailer:
            header: dict[int, int] = {}
            for item in trailer.group(1).split():
                m = re.fullmatch(r"(\d+)\*(\d+)", item)
                if not m:
                    raise AnnexFormatError(f"line {lineno}: bad size item {item!r}")
                header[int(m.group(2))] = header.get(int(m.group(2)), 0) + int(m.group(1))
            blocks.append(AnnexBlock(header, current))
            current = []
            continue
        tuples = _TUPLE.findall(line)
        leftover = _TUPLE.sub("", line).replace(",", "").strip()
        if not tuples or leftover:
            raise AnnexFormatError(f"line {lineno}: malformed set {line.strip()!r}")
        try:
            current.append([tuple(int(v) for v in t.split(",")) for t in tuples])
        except ValueError as exc:
            raise AnnexFormatError(f"line {lineno}: malformed tuple") from exc
    if current:
        raise AnnexFormatError("text ends without a trailer line")
    return blocks


def format_trailer(sizes: Iterable[int]) -> str:
    cnt = Counter(sizes)
    if set(cnt) <= {3, 4, 5}:
        items = [f"{cnt[q]:>2}*{q}" for q in (3, 4, 5)]
    else:
        items = [f"{cnt[q]:>2}*{q}" for q in sorted(cnt)]
    return "A partition for sets of sizes: " + " ".join(items)


def format_annex(blocks: Iterable[SubsetFamily | AnnexBlock]) -> str:
    out = []
    for blk in blocks:
        if isinstance(blk, AnnexBlock):
            sets = blk.sets
            trailer_sizes = [q for q, n in blk.header.items() for _ in range(n)]
        else:
            sets = blk.element_sets()
            trailer_sizes = [len(s) for s in sets]
        lines = [", ".join(format_element(x) for x in s) for s in sets]
        lines.append(format_trailer(trailer_sizes))
        out.append("\n".join(lines))
    return "\n\n".join(out) + "\n"


# -- JSON format ----------------------------------------------------------------


def family_to_json(family: SubsetFamily, **header) -> dict:
    doc = dict(header)
    doc["group"] = str(family.group) if _is_canonical(family.group) else "x".join(f"Z{m}" for m in family.group.moduli)
    doc["ground"] = family.ground.descriptor()
    if isinstance(family.ground, ExplicitGround):
        doc["ground_codes"] = list(family.ground.members)
    doc["sets"] = [[list(x) for x in s] for s in family.element_sets()]
    return doc


def _is_canonical(g: GroupSpec) -> bool:
    return g.moduli == g.canonical().moduli


def family_from_json(doc: dict | str) -> SubsetFamily:
    if isinstance(doc, str):
        doc = json.loads(doc)
    group = _ordered_spec(doc["group"])
    if "ground_codes" in doc:
        ground: Ground = ExplicitGround(group, tuple(doc["ground_codes"]))
    else:
        ground = parse_ground(doc["ground"])
    sets = [[tuple(x) for x in s] for s in doc["sets"]]
    return SubsetFamily.from_elements(group, sets, ground)
