"""Finite Abelian groups given as direct products of cyclic groups.

Elements are residue tuples ``(r_0, ..., r_{k-1})`` with ``0 <= r_i < moduli[i]``.
Every element also has a dense mixed-radix code in ``[0, order)`` with the
last coordinate varying fastest; most of the package works on codes.

When every modulus is a power of two the mixed-radix code is a packed bit
field, and addition is done with a carry-masked integer add (the same code
runs on Python ints and on numpy integer arrays).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "GroupSpec",
    "GroupSpecError",
    "SubgroupFrame",
    "frame_subgroup",
    "canonical_permutation",
    "permute_codes",
    "to_canonical",
    "from_canonical",
    "parse_group_spec",
    "format_element",
    "parse_element",
]

MAX_ORDER = 1 << 62

Element = tuple[int, ...]


class GroupSpecError(ValueError):
    pass


def _is_pow2(m: int) -> bool:
    return m >= 1 and m & (m - 1) == 0


@dataclass(frozen=True, eq=False)
class GroupSpec:
    """A finite Abelian group ``Z_{m_0} x ... x Z_{m_{k-1}}``.

    The factor order is kept as given (frames and quotients need it), but
    equality and hashing use the canonical form: moduli sorted non-increasing.
    """

    moduli: tuple[int, ...]

    def __post_init__(self):
        moduli = tuple(int(m) for m in self.moduli)
        if not moduli:
            raise GroupSpecError("a group needs at least one cyclic factor")
        if any(m < 2 for m in moduli):
            raise GroupSpecError(f"every modulus must be >= 2, got {list(moduli)}")
        if math.prod(moduli) > MAX_ORDER:
            raise GroupSpecError("group order exceeds 2^62")
        object.__setattr__(self, "moduli", moduli)

    # -- identity -------------------------------------------------------------

    def canonical(self) -> "GroupSpec":
        return GroupSpec(tuple(sorted(self.moduli, reverse=True)))

    def __eq__(self, other):
        if not isinstance(other, GroupSpec):
            return NotImplemented
        return sorted(self.moduli) == sorted(other.moduli)

    def __hash__(self):
        return hash(tuple(sorted(self.moduli)))

    def __str__(self):
        return format_group_spec(self)

    # -- structure ------------------------------------------------------------

    @cached_property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @cached_property
    def is_two_group(self) -> bool:
        return all(_is_pow2(m) for m in self.moduli)

    @cached_property
    def exponents(self) -> tuple[int, ...]:
        """Base-2 exponents of the moduli (2-groups only)."""
        if not self.is_two_group:
            raise GroupSpecError(f"{self} is not a 2-group")
        return tuple(m.bit_length() - 1 for m in self.moduli)

    @cached_property
    def radix(self) -> tuple[int, ...]:
        """Place value of each coordinate in the code."""
        out = []
        place = 1
        for m in reversed(self.moduli):
            out.append(place)
            place *= m
        return tuple(reversed(out))

    def exponent(self) -> int:
        return reduce(math.lcm, self.moduli, 1)

    def involution_count(self) -> int:
        even = sum(1 for m in self.moduli if m % 2 == 0)
        return (1 << even) - 1

    def sum_all_elements(self) -> Element:
        """Sum of every group element: the involution if unique, else zero."""
        even = [i for i, m in enumerate(self.moduli) if m % 2 == 0]
        if len(even) == 1:
            i = even[0]
            return tuple(self.moduli[i] // 2 if j == i else 0 for j in range(self.rank))
        return self.zero

    @property
    def zero(self) -> Element:
        return (0,) * self.rank

    def elements(self) -> Iterator[Element]:
        for code in range(self.order):
            yield self.decode(code)

    # -- tuple arithmetic -----------------------------------------------------

    def _check(self, x: Sequence[int]) -> None:
        if len(x) != self.rank:
            raise GroupSpecError(
                f"element {tuple(x)} has {len(x)} coordinates, group {self} has {self.rank}"
            )

    def element(self, x: Iterable[int]) -> Element:
        x = tuple(int(v) for v in x)
        self._check(x)
        return tuple(v % m for v, m in zip(x, self.moduli))

    def add(self, x: Sequence[int], y: Sequence[int]) -> Element:
        self._check(x)
        self._check(y)
        return tuple((a + b) % m for a, b, m in zip(x, y, self.moduli))

    def neg(self, x: Sequence[int]) -> Element:
        self._check(x)
        return tuple(-a % m for a, m in zip(x, self.moduli))

    def sub(self, x: Sequence[int], y: Sequence[int]) -> Element:
        return self.add(x, self.neg(y))

    def scale(self, k: int, x: Sequence[int]) -> Element:
        self._check(x)
        return tuple(k * a % m for a, m in zip(x, self.moduli))

    def sum(self, xs: Iterable[Sequence[int]]) -> Element:
        acc = [0] * self.rank
        for x in xs:
            self._check(x)
            for i, a in enumerate(x):
                acc[i] += a
        return tuple(a % m for a, m in zip(acc, self.moduli))

    def element_order(self, x: Sequence[int]) -> int:
        return reduce(math.lcm, (m // math.gcd(a, m) for a, m in zip(x, self.moduli)), 1)

    # -- codes ------------------------------------------------------------------

    def encode(self, x: Sequence[int]) -> int:
        self._check(x)
        code = 0
        for a, m in zip(x, self.moduli):
            if not 0 <= a < m:
                raise GroupSpecError(f"coordinate {a} out of range for Z{m}")
            code = code * m + a
        return code

    def decode(self, code: int) -> Element:
        if not 0 <= code < self.order:
            raise GroupSpecError(f"code {code} out of range [0, {self.order})")
        out = []
        for m in reversed(self.moduli):
            code, r = divmod(code, m)
            out.append(r)
        return tuple(reversed(out))

    @cached_property
    def _swar(self) -> tuple[int, int, int]:
        """(high-bit mask, full mask, low-bit mask) for packed 2-group codes."""
        high = ones = 0
        shift = 0
        for e in reversed(self.exponents):
            if e:
                high |= 1 << (shift + e - 1)
                ones |= 1 << shift
            shift += e
        return high, (1 << shift) - 1, ones

    def add_codes(self, x, y):
        """Add codes; works elementwise on numpy integer arrays."""
        if self.is_two_group:
            high, full, _ = self._swar
            low = full ^ high
            return ((x & low) + (y & low)) ^ ((x ^ y) & high)
        if isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
            return self.from_digits((self.digits(x) + self.digits(y)) % self._mod_row)
        return self.encode(self.add(self.decode(x), self.decode(y)))

    def neg_codes(self, x):
        if self.is_two_group:
            _, full, ones = self._swar
            return self.add_codes(x ^ full, ones)
        if isinstance(x, np.ndarray):
            return self.from_digits(-self.digits(x) % self._mod_row)
        return self.encode(self.neg(self.decode(x)))

    def sub_codes(self, x, y):
        return self.add_codes(x, self.neg_codes(y))

    def sum_codes(self, codes: Iterable[int]) -> int:
        acc = 0
        for c in codes:
            acc = self.add_codes(acc, c)
        return acc

    @cached_property
    def _mod_row(self) -> np.ndarray:
        return np.array(self.moduli, dtype=np.int64)

    @cached_property
    def _radix_row(self) -> np.ndarray:
        return np.array(self.radix, dtype=np.int64)

    def digits(self, codes) -> np.ndarray:
        """Residue matrix (n x rank) of an array of codes."""
        codes = np.asarray(codes, dtype=np.int64)
        return (codes[..., None] // self._radix_row) % self._mod_row

    def from_digits(self, digits) -> np.ndarray:
        digits = np.asarray(digits, dtype=np.int64) % self._mod_row
        return digits @ self._radix_row

    def all_codes(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def nonzero_codes(self) -> np.ndarray:
        return np.arange(1, self.order, dtype=np.int64)

    def basis_code(self, i: int, k: int = 1) -> int:
        """Code of ``k`` times the i-th unit vector."""
        return (k % self.moduli[i]) * self.radix[i]


def format_group_spec(g: GroupSpec) -> str:
    parts = []
    i = 0
    mods = g.moduli
    while i < len(mods):
        j = i
        while j < len(mods) and mods[j] == mods[i]:
            j += 1
        run = j - i
        parts.append(f"Z{mods[i]}" + (f"^{run}" if run > 1 else ""))
        i = j
    return "x".join(parts)


_FACTOR = re.compile(r"Z(\d+)(?:\^(\d+))?$")


def parse_group_spec(text: str) -> GroupSpec:
    """Parse ``Z4xZ2^2``-style text into a canonical :class:`GroupSpec`."""
    text = text.strip().replace(" ", "")
    if not text:
        raise GroupSpecError("empty group description")
    moduli: list[int] = []
    for token in re.split(r"[x×*]", text):
        match = _FACTOR.match(token)
        if not match:
            raise GroupSpecError(f"cannot parse group factor {token!r} in {text!r}")
        m = int(match.group(1))
        rep = int(match.group(2) or 1)
        if rep < 1:
            raise GroupSpecError(f"repetition must be >= 1 in {token!r}")
        if m < 2:
            raise GroupSpecError(f"modulus must be >= 2, got Z{m}")
        moduli.extend([m] * rep)
        if math.prod(moduli) > MAX_ORDER:
            raise GroupSpecError("group order exceeds 2^62")
    return GroupSpec(tuple(moduli)).canonical()


def format_element(x: Sequence[int]) -> str:
    return "(" + ", ".join(str(int(v)) for v in x) + ")"


def parse_element(text: str) -> Element:
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    return tuple(int(v) for v in body.split(",") if v.strip())


@dataclass(frozen=True)
class SubgroupFrame:
    """The coordinate-aligned subgroup ``{g : divisors[i] | g_i for all i}``.

    The canonical isomorphism onto :meth:`spec` divides coordinate ``i`` by
    ``divisors[i]``; factors that become trivial are dropped.
    """

    parent: GroupSpec
    divisors: tuple[int, ...]

    def __post_init__(self):
        divisors = tuple(int(d) for d in self.divisors)
        if len(divisors) != self.parent.rank:
            raise GroupSpecError("one divisor per coordinate is required")
        for d, m in zip(divisors, self.parent.moduli):
            if d < 1 or m % d:
                raise GroupSpecError(f"{d} does not divide modulus {m}")
        object.__setattr__(self, "divisors", divisors)

    @property
    def kept(self) -> tuple[int, ...]:
        return tuple(i for i, (d, m) in enumerate(zip(self.divisors, self.parent.moduli)) if d < m)

    @property
    def order(self) -> int:
        return math.prod(m // d for m, d in zip(self.parent.moduli, self.divisors))

    @property
    def index(self) -> int:
        return math.prod(self.divisors)

    def spec(self) -> GroupSpec:
        mods = tuple(self.parent.moduli[i] // self.divisors[i] for i in self.kept)
        if not mods:
            raise GroupSpecError("the frame is the trivial subgroup")
        return GroupSpec(mods)

    def quotient_spec(self) -> GroupSpec:
        mods = tuple(d for d in self.divisors if d > 1)
        if not mods:
            raise GroupSpecError("the frame is the whole group")
        return GroupSpec(mods)

    def contains(self, x: Sequence[int]) -> bool:
        return all(a % d == 0 for a, d in zip(x, self.divisors))

    def lift(self, x: Sequence[int]) -> Element:
        """Map an element of :meth:`spec` into the parent group."""
        kept = self.kept
        if len(x) != len(kept):
            raise GroupSpecError("element does not belong to the frame group")
        out = [0] * self.parent.rank
        for a, i in zip(x, kept):
            out[i] = a * self.divisors[i]
        return self.parent.element(out)

    def project(self, x: Sequence[int]) -> Element:
        if not self.contains(x):
            raise GroupSpecError(f"{tuple(x)} is not in the frame")
        return tuple(x[i] // self.divisors[i] for i in self.kept)

    def lift_codes(self, codes) -> np.ndarray:
        """Vectorised :meth:`lift` from codes of :meth:`spec` to parent codes."""
        sub = self.spec()
        dig = sub.digits(codes)
        full = np.zeros(dig.shape[:-1] + (self.parent.rank,), dtype=np.int64)
        for j, i in enumerate(self.kept):
            full[..., i] = dig[..., j] * self.divisors[i]
        return self.parent.from_digits(full)

    def project_codes(self, codes) -> np.ndarray:
        dig = self.parent.digits(codes)
        div = np.array(self.divisors, dtype=np.int64)
        if np.any(dig % div):
            raise GroupSpecError("some codes are outside the frame")
        return self.spec().from_digits((dig // div)[..., list(self.kept)])

    def subgroup_codes(self) -> np.ndarray:
        if not self.kept:
            return np.zeros(1, dtype=np.int64)
        return self.lift_codes(self.spec().all_codes())

    def section_codes(self) -> np.ndarray:
        """Codes of the coset representatives ``0 <= r_i < divisors[i]``, in
        the order of the quotient's codes."""
        q = [i for i, d in enumerate(self.divisors) if d > 1]
        if not q:
            return np.zeros(1, dtype=np.int64)
        qspec = self.quotient_spec()
        dig = qspec.digits(qspec.all_codes())
        full = np.zeros((len(dig), self.parent.rank), dtype=np.int64)
        full[:, q] = dig
        return self.parent.from_digits(full)

    def coset(self, rep: Sequence[int]) -> set[Element]:
        rep = self.parent.element(rep)
        return {self.parent.add(rep, self.parent.decode(int(c))) for c in self.subgroup_codes()}

    def coset_codes(self, rep_code: int) -> np.ndarray:
        return self.parent.add_codes(self.subgroup_codes(), np.int64(rep_code))

    def compose(self, inner: "SubgroupFrame") -> "SubgroupFrame":
        """The frame of a frame, expressed in the parent group."""
        if inner.parent.moduli != self.spec().moduli:
            raise GroupSpecError("inner frame must live on this frame's group")
        divisors = list(self.divisors)
        for j, i in enumerate(self.kept):
            divisors[i] *= inner.divisors[j]
        return SubgroupFrame(self.parent, tuple(divisors))


def frame_subgroup(g: GroupSpec, divisors: Sequence[int]) -> SubgroupFrame:
    return SubgroupFrame(g, tuple(divisors))


def canonical_permutation(g: GroupSpec) -> tuple[int, ...]:
    """Coordinate order that sorts the moduli descending (stable)."""
    return tuple(sorted(range(g.rank), key=lambda i: -g.moduli[i]))


def permute_codes(codes, src: GroupSpec, perm: Sequence[int]) -> np.ndarray:
    """Codes of ``src`` re-expressed in the group whose coordinate j is
    ``src`` coordinate ``perm[j]``."""
    dst = GroupSpec(tuple(src.moduli[i] for i in perm))
    return dst.from_digits(src.digits(codes)[..., list(perm)])


def to_canonical(codes, g: GroupSpec) -> np.ndarray:
    return permute_codes(codes, g, canonical_permutation(g))


def from_canonical(codes, g: GroupSpec) -> np.ndarray:
    perm = canonical_permutation(g)
    inv = [0] * len(perm)
    for j, i in enumerate(perm):
        inv[i] = j
    return permute_codes(codes, g.canonical(), inv)
