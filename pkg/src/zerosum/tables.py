"""Realization tables: the embedded annex data plus lazily generated entries.

An entry maps a triple (a, b, c) to a verified family realizing it inside a
fixed ground set.  Lookups try the embedded annex tables, then the in-memory
cache, then the on-disk cache, and finally run the exact search and persist
the result.  The disk cache holds one JSON file per (ground, triple), named
by a hash of both, under ``$ZEROSUM_CACHE_DIR`` (default ``~/.cache/zerosum``).
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .groups import GroupSpec, from_canonical
from .partition import (
    AnnexBlock,
    GroupStar,
    ProductOfStars,
    SizeMultiset,
    SubsetFamily,
    VerifyReport,
    family_from_json,
    family_to_json,
    parse_annex,
    verify_family,
)
from .search import EXHAUSTED, SearchProblem, enumerate_triples, search_partition

__all__ = [
    "SOLVER_VERSION",
    "TableError",
    "GenerationFailed",
    "RealizationTable",
    "TableCheck",
    "ANNEX_GROUNDS",
    "load_embedded",
    "restore_hidden_coordinate",
    "lookup",
    "generate_table",
    "check_all",
    "cache_dir",
    "clear_memory_cache",
]

SOLVER_VERSION = "zerosum-search/1"

V422 = GroupSpec((4, 2, 2))

# annex name -> ground set; Annex F's ground is V* + (Z2^2)* with V = Z4 x Z2^2
ANNEX_GROUNDS = {
    "A": GroupStar(V422),
    "B": GroupStar(GroupSpec((4, 2, 2, 2))),
    "C": GroupStar(GroupSpec((4, 4, 2))),
    "D": GroupStar(GroupSpec((4, 4, 4))),
    "E": GroupStar(GroupSpec((8, 2, 2))),
    "F": ProductOfStars(V422, GroupSpec((2, 2))),
}


class TableError(ValueError):
    pass


class GenerationFailed(RuntimeError):
    """The search budget ran out, or the search proved the entry impossible."""

    def __init__(self, message: str, exhausted: bool = False):
        super().__init__(message)
        self.exhausted = exhausted


@dataclass
class RealizationTable:
    descriptor: str
    ground: object
    entries: dict[tuple[int, int, int], SubsetFamily] = field(default_factory=dict)
    provenance: str = "generated"

    def __contains__(self, t) -> bool:
        return tuple(t) in self.entries

    def __getitem__(self, t) -> SubsetFamily:
        return self.entries[tuple(t)]

    def triples(self) -> list[tuple[int, int, int]]:
        return sorted(self.entries, key=lambda t: (t[2], t[1], t[0]))


# -- embedded data -----------------------------------------------------------------


def _annex_text(name: str) -> str:
    return resources.files("zerosum.data").joinpath(f"annex_{name.lower()}.txt").read_text()


def restore_hidden_coordinate(block: AnnexBlock, coord: int = 1) -> AnnexBlock:
    """Fill in a Z2 coordinate that was printed as 0 throughout a block.

    Used for the V* + (Z2^2)* table: each printed tuple with a non-zero V
    part must stand for both values of the hidden bit, a printed tuple with
    zero V part can only have hidden bit 1, and every set must have even
    parity in that coordinate.  The resulting GF(2) system is solved with
    free variables set to 0.
    """
    slots = [(i, j) for i, s in enumerate(block.sets) for j in range(len(s))]
    index = {slot: k for k, slot in enumerate(slots)}
    rows: list[tuple[int, int]] = []  # (bitmask over slots, right-hand side)
    by_tuple: dict[tuple[int, ...], list[int]] = {}
    for (i, j), k in index.items():
        x = block.sets[i][j]
        if x[coord] != 0:
            raise TableError("the hidden coordinate is not zero in the printed data")
        by_tuple.setdefault(x, []).append(k)
    for x, ks in by_tuple.items():
        v_part = x[:coord] + x[coord + 1 : 3]
        if len(ks) == 2:
            rows.append(((1 << ks[0]) | (1 << ks[1]), 1))
        elif len(ks) == 1 and not any(v_part):
            rows.append((1 << ks[0], 1))
        else:
            raise TableError(f"tuple {x} occurs {len(ks)} times; cannot restore")
    for i, s in enumerate(block.sets):
        mask = 0
        for j in range(len(s)):
            mask |= 1 << index[(i, j)]
        rows.append((mask, 0))
    bits = _solve_gf2(rows, len(slots))
    if bits is None:
        raise TableError("hidden-coordinate system is inconsistent")
    sets = []
    for i, s in enumerate(block.sets):
        new = []
        for j, x in enumerate(s):
            y = list(x)
            y[coord] = bits[index[(i, j)]]
            new.append(tuple(y))
        sets.append(new)
    return AnnexBlock(dict(block.header), sets)


def _solve_gf2(rows, nvars):
    pivots: dict[int, tuple[int, int]] = {}
    for mask, rhs in rows:
        for p, (pm, pr) in pivots.items():
            if mask >> p & 1:
                mask ^= pm
                rhs ^= pr
        if mask == 0:
            if rhs:
                return None
            continue
        p = mask.bit_length() - 1
        for q, (qm, qr) in list(pivots.items()):
            if qm >> p & 1:
                pivots[q] = (qm ^ mask, qr ^ rhs)
        pivots[p] = (mask, rhs)
    out = [0] * nvars
    for p, (mask, rhs) in pivots.items():
        # every other variable in the row is free (= 0)
        out[p] = rhs
    return out


@lru_cache(maxsize=1)
def _embedded() -> dict[str, RealizationTable]:
    tables = {}
    for name, ground in ANNEX_GROUNDS.items():
        blocks = parse_annex(_annex_text(name))
        if name == "F":
            blocks = [restore_hidden_coordinate(b) for b in blocks]
        table = RealizationTable(_descriptor(ground), ground, provenance=f"annex-{name}")
        for blk in blocks:
            fam = blk.family(ground.group, ground)
            rep = verify_family(ground.group, fam, expected_sizes=blk.sizes)
            if not rep.ok:
                raise TableError(f"embedded annex {name}, block {blk.triple}: {rep.summary()}")
            if blk.triple in table.entries:
                raise TableError(f"embedded annex {name} repeats triple {blk.triple}")
            table.entries[blk.triple] = fam
        tables[name] = table
    return tables


def load_embedded() -> dict[str, RealizationTable]:
    """The six annex tables, keyed "A".."F", each block verified on load."""
    return dict(_embedded())


# -- caches ------------------------------------------------------------------------

_lock = threading.Lock()
_memory: dict[tuple[str, tuple[int, int, int]], SubsetFamily] = {}


def cache_dir(override: str | os.PathLike | None = None) -> Path:
    if override is not None:
        return Path(override)
    env = os.environ.get("ZEROSUM_CACHE_DIR")
    return Path(env) if env else Path.home() / ".cache" / "zerosum"


def clear_memory_cache() -> None:
    with _lock:
        _memory.clear()


def _descriptor(ground) -> str:
    return ground.descriptor()


def _entry_path(root: Path, descriptor: str, t) -> Path:
    key = hashlib.sha256(f"{descriptor}|{t[0]},{t[1]},{t[2]}".encode()).hexdigest()[:24]
    return root / f"{key}.json"


def _read_disk(root: Path, descriptor: str, t) -> SubsetFamily | None:
    path = _entry_path(root, descriptor, t)
    try:
        doc = json.loads(path.read_text())
    except (OSError, ValueError):
        return None
    if doc.get("descriptor") != descriptor or tuple(doc.get("triple", ())) != tuple(t):
        return None
    try:
        fam = family_from_json(doc["family"])
    except (KeyError, ValueError, TypeError):
        return None
    if not verify_family(fam.group, fam, expected_sizes=SizeMultiset.from_triple(*t)).ok:
        return None
    return fam


def _write_disk(root: Path, descriptor: str, t, fam: SubsetFamily) -> None:
    doc = {
        "solver_version": SOLVER_VERSION,
        "descriptor": descriptor,
        "triple": list(t),
        "family": family_to_json(fam),
    }
    try:
        root.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=root, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(doc, fh, separators=(",", ":"))
        os.replace(tmp, _entry_path(root, descriptor, t))
    except OSError:
        pass  # the cache is an optimisation only


# -- lookup ------------------------------------------------------------------------


def _as_ground(ground):
    if isinstance(ground, GroupSpec):
        return GroupStar(ground)
    if isinstance(ground, str):
        from .partition import parse_ground

        return parse_ground(ground)
    return ground


def lookup(
    ground,
    t: tuple[int, int, int],
    *,
    node_limit: int | None = 20_000_000,
    seed: int = 0,
    cache: str | os.PathLike | None = None,
    generate: bool = True,
) -> SubsetFamily:
    """A verified family realizing ``t`` in ``ground`` (a ground or a group)."""
    ground = _as_ground(ground)
    t = tuple(int(x) for x in t)
    weight = 3 * t[0] + 4 * t[1] + 5 * t[2]
    if weight != ground.size:
        raise TableError(f"triple {t} has weight {weight} but the ground set has {ground.size} elements")
    if isinstance(ground, GroupStar) and ground.group.moduli != ground.group.canonical().moduli:
        # work in sorted coordinates, then permute back
        canon = lookup(GroupStar(ground.group.canonical()), t, node_limit=node_limit, seed=seed,
                       cache=cache, generate=generate)
        sets = [tuple(from_canonical(np.array(s), ground.group).tolist()) for s in canon.sets]
        return SubsetFamily(ground.group, sets, ground)
    descriptor = _descriptor(ground)
    for table in _embedded().values():
        if table.descriptor == descriptor and t in table:
            return table[t]
    key = (descriptor, t)
    with _lock:
        if key in _memory:
            return _memory[key]
    root = cache_dir(cache)
    fam = _read_disk(root, descriptor, t)
    if fam is None:
        if not generate:
            raise GenerationFailed(f"no table entry for {descriptor} {t}")
        fam = _generate(ground, t, node_limit, seed)
        _write_disk(root, descriptor, t, fam)
    with _lock:
        _memory[key] = fam
    return fam


def _generate(ground, t, node_limit, seed) -> SubsetFamily:
    sizes = SizeMultiset.from_triple(*t)
    out = search_partition(SearchProblem(ground.group, sizes, ground=ground, node_limit=node_limit, seed=seed))
    if not out.found:
        raise GenerationFailed(
            f"search {out.status} for {ground.descriptor()} {t} after {out.nodes} nodes",
            exhausted=out.status == EXHAUSTED,
        )
    rep = verify_family(ground.group, out.family, expected_sizes=sizes)
    if not rep.ok:  # pragma: no cover - the solver only returns verified sets
        raise TableError(f"search returned an invalid family: {rep.summary()}")
    return out.family


def generate_table(
    ground,
    *,
    node_limit: int | None = 20_000_000,
    seed: int = 0,
    cache: str | os.PathLike | None = None,
    progress=None,
) -> RealizationTable:
    """Every triple of full weight for ``ground``; resumable through the cache."""
    ground = _as_ground(ground)
    table = RealizationTable(_descriptor(ground), ground)
    for t in enumerate_triples(ground.size):
        table.entries[t] = lookup(ground, t, node_limit=node_limit, seed=seed, cache=cache)
        if progress is not None:
            progress(t)
    return table


# -- auditing ----------------------------------------------------------------------


@dataclass
class TableCheck:
    results: list[tuple[str, tuple[int, int, int], str, VerifyReport]]

    @property
    def ok(self) -> bool:
        return all(r.ok for *_, r in self.results)

    @property
    def failures(self):
        return [(d, t, src, r) for d, t, src, r in self.results if not r.ok]

    def summary(self) -> str:
        embedded = sum(1 for _, _, s, _ in self.results if s.startswith("annex"))
        cached = len(self.results) - embedded
        bad = self.failures
        head = f"{len(self.results)} entries checked ({embedded} embedded, {cached} cached), {len(bad)} failing"
        lines = [head] + [f"  FAIL {src} {d} {t}: {r.summary()}" for d, t, src, r in bad]
        return "\n".join(lines)


def check_all(cache: str | os.PathLike | None = None) -> TableCheck:
    """Re-verify every embedded block and every cached entry."""
    results = []
    for table in _embedded().values():
        for t in table.triples():
            fam = table[t]
            rep = verify_family(fam.group, fam, expected_sizes=SizeMultiset.from_triple(*t))
            results.append((table.descriptor, t, table.provenance, rep))
    root = cache_dir(cache)
    if root.is_dir():
        for path in sorted(root.glob("*.json")):
            try:
                doc = json.loads(path.read_text())
                t = tuple(doc["triple"])
                fam = family_from_json(doc["family"])
                rep = verify_family(fam.group, fam, expected_sizes=SizeMultiset.from_triple(*t))
                if fam.ground.descriptor() != doc["descriptor"]:
                    rep = VerifyReport(rep.failures + [(None, "outside-ground")])
                results.append((doc["descriptor"], t, f"cache:{path.name}", rep))
            except (OSError, ValueError, KeyError, TypeError) as exc:
                results.append((path.name, (0, 0, 0), f"cache:{path.name}",
                                VerifyReport([(None, f"unreadable: {type(exc).__name__}")])))
    return TableCheck(results)
