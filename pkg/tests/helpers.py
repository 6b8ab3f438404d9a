"""Shared generators and a plain-Python oracle for checking families."""

import math
import random
from itertools import product

from zerosum import Digraph, GroupSpec, RootedTree


def partitions(n, maxpart=None, minpart=1):
    """Integer partitions of ``n`` with parts in [minpart, maxpart], descending."""
    if maxpart is None:
        maxpart = n
    if n == 0:
        yield ()
        return
    for p in range(min(n, maxpart), minpart - 1, -1):
        for rest in partitions(n - p, p, minpart):
            yield (p,) + rest


def shapes(n):
    """Moduli of every abelian 2-group of order 2^n, largest factor first."""
    for p in partitions(n):
        yield tuple(2**e for e in p)


def noncyclic_shapes(n_max, n_min=2):
    for n in range(n_min, n_max + 1):
        for s in shapes(n):
            if len(s) > 1:
                yield s


def group(moduli):
    return GroupSpec(tuple(moduli))


def oracle_check(moduli, sets, ground=None, target=None):
    """Exact cover of ``ground`` (default G*) by sets that each sum to ``target``.

    Works on residue tuples only; shares no code with the library checker.
    """
    moduli = tuple(moduli)
    zero = tuple(0 for _ in moduli)
    target = zero if target is None else tuple(target)
    if ground is None:
        ground = {x for x in product(*(range(m) for m in moduli)) if x != zero}
    seen = []
    for s in sets:
        acc = zero
        for x in s:
            acc = tuple((a + b) % m for a, b, m in zip(acc, x, moduli))
        if acc != target:
            return False
        seen.extend(tuple(x) for x in s)
    return len(seen) == len(set(seen)) and set(seen) == set(ground)


# -- random instances ---------------------------------------------------------------


def _random_octet(g, rng):
    invs = [c for c in range(1, g.order) if g.add_codes(c, c) == 0]
    while True:
        v = rng.sample(invs, 3)
        span = {0}
        for x in v:
            span |= {g.add_codes(s, x) for s in span}
        if len(span) == 8:
            return v, span


def _cosets_ok(g, span, pts):
    keys = [frozenset(g.add_codes(p, w) for w in span) for p in pts]
    return len(set(keys)) == len(pts) and all(0 not in k for k in keys)


def octet_inputs(n_points, count, seed):
    """Random (group, octet generators, zero-sum points, octet span) with the
    points in distinct non-trivial cosets of the octet."""
    rng = random.Random(seed)
    shapes = [(2,) * 6, (2,) * 7, (4, 2, 2, 2, 2), (4, 4, 2, 2), (8, 2, 2, 2)]
    out = []
    while len(out) < count:
        g = GroupSpec(rng.choice(shapes))
        v, span = _random_octet(g, rng)
        pts = [rng.randrange(1, g.order) for _ in range(n_points - 1)]
        pts.append(g.neg_codes(g.sum_codes(pts)))
        if len(set(pts)) == n_points and _cosets_ok(g, span, pts):
            out.append((g, v, pts, span))
    return out


def random_classes(order, rng):
    while True:
        sizes = list(rng.choice(list(partitions(order, minpart=3))))
        if max(sizes) >= 4:
            rng.shuffle(sizes)
            return sizes


def random_3tree(order, rng):
    counts = list(rng.choice(list(partitions(order - 1, minpart=3))))
    rng.shuffle(counts)
    parent = [None]
    leaves = [0]
    for k in counts:
        v = leaves.pop(rng.randrange(len(leaves)))
        for _ in range(k):
            parent.append(v)
            leaves.append(len(parent) - 1)
    # relabel so the root is not always vertex 0
    perm = list(range(order))
    rng.shuffle(perm)
    relabeled = [None] * order
    for v, p in enumerate(parent):
        relabeled[perm[v]] = None if p is None else perm[p]
    return RootedTree(relabeled)


def random_digraph(order, rng):
    """Components of size >= 3 with n < order and order - n not in {2, 3}."""
    while True:
        n = rng.randint(3, order - 1)
        if order - n not in (2, 3):
            break
    sizes = list(rng.choice(list(partitions(n, minpart=3))))
    verts = list(range(n))
    rng.shuffle(verts)
    arcs = []
    start = 0
    for s in sizes:
        comp = verts[start : start + s]
        start += s
        for i in range(1, s):
            u, v = comp[i], comp[rng.randrange(i)]
            arcs.append((u, v) if rng.random() < 0.5 else (v, u))
        for _ in range(rng.randint(0, s)):
            u, v = rng.sample(comp, 2)
            arcs.append((u, v))
    rng.shuffle(arcs)
    return Digraph(n, arcs)


def hypotheses_hold(a, b, c, r):
    # written with fractions, independently of the library's integer form
    return 3 * a + 4 * b + 5 * c >= 45 * r + 12 and math.ceil((b - 1) / 9) <= a / 3 + c


# acceptance results: criterion -> (PASS/FAIL, name, seconds, note)
ACCEPTANCE: dict = {}
