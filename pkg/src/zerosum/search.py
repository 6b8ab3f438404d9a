"""Backtracking search for subset families with prescribed sizes and sums.

The solver picks the smallest unused ground element, decides the size of the
set that contains it, and completes the set with larger elements in search
order; the last element of a set is forced (target minus the partial sum).
Putting the smallest unused element in the next set removes the symmetry
between sets, so a finished run without a solution is a proof that none
exists.
"""

from __future__ import annotations

import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .groups import GroupSpec
from .partition import ExplicitGround, GroupStar, SizeMultiset, SubsetFamily, verify_family

__all__ = [
    "SearchProblem",
    "SearchOutcome",
    "SearchInconsistent",
    "search_partition",
    "enumerate_triples",
    "explore_constant_sum",
    "find_complete_mapping_search",
]

FOUND = "found"
EXHAUSTED = "exhausted"
BUDGET = "budget-exceeded"


class SearchInconsistent(ValueError):
    pass


class _OutOfBudget(Exception):
    pass


@dataclass
class SearchProblem:
    group: GroupSpec
    sizes: SizeMultiset
    ground: object = None  # a ground descriptor or a sequence of codes; default G*
    target: Sequence[int] | None = None
    node_limit: int | None = 5_000_000
    time_limit: float | None = None
    seed: int = 0
    workers: int = 1
    prune: bool = True

    def __post_init__(self):
        if not isinstance(self.sizes, SizeMultiset):
            self.sizes = SizeMultiset.of(self.sizes)
        if self.ground is None:
            self.ground = GroupStar(self.group)
        elif not hasattr(self.ground, "codes"):
            self.ground = ExplicitGround(self.group, tuple(int(c) for c in self.ground))
        if self.sizes.total != self.ground.size:
            raise SearchInconsistent(
                f"sizes sum to {self.sizes.total} but the ground set has {self.ground.size} elements"
            )

    def target_code(self) -> int:
        if self.target is None:
            return 0
        return self.group.encode(self.group.element(self.target))


@dataclass
class SearchOutcome:
    status: str
    family: SubsetFamily | None = None
    nodes: int = 0
    duration: float = 0.0
    attempts: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status == FOUND


def _adder(group: GroupSpec):
    """Return (add, sub) closures on codes, as fast as the group allows."""
    if group.is_two_group:
        high, full, ones = group._swar
        low = full ^ high

        def add(x, y):
            return ((x & low) + (y & low)) ^ ((x ^ y) & high)

        def sub(x, y):
            y = y ^ full
            y = ((y & low) + (ones & low)) ^ ((y ^ ones) & high)
            return ((x & low) + (y & low)) ^ ((x ^ y) & high)

        return add, sub
    n = group.order
    if n <= 1024:
        codes = np.arange(n)
        table = [group.add_codes(np.full(n, x), codes).tolist() for x in range(n)]
        neg = group.neg_codes(codes).tolist()
        return (lambda x, y: table[x][y]), (lambda x, y: table[x][neg[y]])
    return group.add_codes, group.sub_codes


class _Solver:
    def __init__(self, group, ground_codes, sizes, target, prune, node_limit, deadline):
        self.group = group
        self.elems = [int(c) for c in ground_codes]
        n = len(self.elems)
        self.pos = {c: i for i, c in enumerate(self.elems)}
        self.counts = Counter(sizes)
        self.target = target
        self.prune = prune
        self.add, self.sub = _adder(group)
        self.node_limit = node_limit
        self.deadline = deadline
        self.nodes = 0
        self.unused = (1 << n) - 1
        self.sets: list[list[int]] = []

    def _tick(self):
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise _OutOfBudget
        if self.deadline is not None and self.nodes & 1023 == 0 and time.monotonic() > self.deadline:
            raise _OutOfBudget

    def run(self) -> bool:
        if self.prune:
            total = 0
            for c in self.elems:
                total = self.add(total, c)
            want = 0
            for _ in range(sum(self.counts.values())):
                want = self.add(want, self.target)
            if total != want:
                return False
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 4 * len(self.elems) + 1000))
        try:
            return self._place()
        finally:
            sys.setrecursionlimit(old)

    def _place(self) -> bool:
        if not self.unused:
            return True
        low = self.unused & -self.unused
        u = low.bit_length() - 1
        self.unused ^= low
        for q in sorted((q for q, k in self.counts.items() if k), reverse=True):
            self.counts[q] -= 1
            chosen = [u]
            self.sets.append(chosen)
            if self._extend(q - 1, self.elems[u], u, chosen):
                return True
            self.sets.pop()
            self.counts[q] += 1
        self.unused ^= low
        return False

    def _extend(self, need, partial, last, chosen) -> bool:
        self._tick()
        if need == 0:
            return partial == self.target and self._place()
        if need == 1 and self.prune:
            j = self.pos.get(self.sub(self.target, partial), -1)
            if j > last and (self.unused >> j) & 1:
                bit = 1 << j
                self.unused ^= bit
                chosen.append(j)
                if self._place():
                    return True
                chosen.pop()
                self.unused ^= bit
            return False
        base = last + 1
        m = self.unused >> base
        while m:
            low = m & -m
            m ^= low
            j = base + low.bit_length() - 1
            bit = 1 << j
            self.unused ^= bit
            chosen.append(j)
            if self._extend(need - 1, self.add(partial, self.elems[j]), j, chosen):
                return True
            chosen.pop()
            self.unused ^= bit
        return False

    def family_sets(self) -> list[tuple[int, ...]]:
        return [tuple(self.elems[j] for j in s) for s in self.sets]


def _attempt(group, order_codes, sizes, target, prune, limit, deadline):
    solver = _Solver(group, order_codes, sizes, target, prune, limit, deadline)
    try:
        ok = solver.run()
    except _OutOfBudget:
        return BUDGET, None, solver.nodes
    return (FOUND if ok else EXHAUSTED), (solver.family_sets() if ok else None), solver.nodes


def _attempt_orders(ground_codes: np.ndarray, seed: int):
    """Search orders: natural encode order first, then seeded shuffles."""
    yield 0, ground_codes
    k = 1
    while True:
        rng = np.random.default_rng([seed, k])
        yield k, rng.permutation(ground_codes)
        k += 1


def search_partition(problem: SearchProblem) -> SearchOutcome:
    """Find a family realising ``problem`` or prove that none exists.

    Runs complete depth-first searches with growing node limits, first in
    natural order and then in seeded random orders; any run that finishes
    without a solution proves non-existence.
    """
    start = time.monotonic()
    g = problem.group
    ground = np.sort(problem.ground.codes())
    sizes = list(problem.sizes)
    target = problem.target_code()
    deadline = start + problem.time_limit if problem.time_limit else None
    budget = problem.node_limit
    spent = 0
    attempts = 0

    if problem.workers > 1:
        return _parallel_search(problem, ground, sizes, target, start)

    limit = max(2000, 20 * len(ground))
    for k, order in _attempt_orders(ground, problem.seed):
        attempts += 1
        this_limit = limit if budget is None else min(limit, budget - spent)
        if k == 0 and budget is not None and len(ground) <= 24:
            this_limit = budget - spent  # small problems: one complete run
        status, sets, nodes = _attempt(g, order, sizes, target, problem.prune, this_limit, deadline)
        spent += nodes
        if status == FOUND:
            fam = SubsetFamily(g, sets, problem.ground)
            return SearchOutcome(FOUND, fam, spent, time.monotonic() - start, attempts)
        if status == EXHAUSTED:
            return SearchOutcome(EXHAUSTED, None, spent, time.monotonic() - start, attempts)
        if budget is not None and spent >= budget:
            break
        if deadline is not None and time.monotonic() > deadline:
            break
        limit = int(limit * 1.5)
    return SearchOutcome(BUDGET, None, spent, time.monotonic() - start, attempts)


def _worker(args):
    g, order, sizes, target, prune, limit, deadline = args
    return _attempt(g, order, sizes, target, prune, limit, deadline)


def _parallel_search(problem, ground, sizes, target, start) -> SearchOutcome:
    """Portfolio search: independent seeded orders on separate processes."""
    g = problem.group
    budget = problem.node_limit or 10**9
    per = max(1000, budget // problem.workers)
    deadline = start + problem.time_limit if problem.time_limit else None
    orders = []
    for k, order in _attempt_orders(ground, problem.seed):
        orders.append(order)
        if len(orders) == problem.workers:
            break
    jobs = [(g, o, sizes, target, problem.prune, per, deadline) for o in orders]
    spent = 0
    exhausted = False
    with ProcessPoolExecutor(max_workers=problem.workers) as pool:
        for status, sets, nodes in pool.map(_worker, jobs):
            spent += nodes
            if status == FOUND:
                fam = SubsetFamily(g, sets, problem.ground)
                return SearchOutcome(FOUND, fam, spent, time.monotonic() - start, len(jobs))
            exhausted = exhausted or status == EXHAUSTED
    status = EXHAUSTED if exhausted else BUDGET
    return SearchOutcome(status, None, spent, time.monotonic() - start, len(jobs))


def enumerate_triples(total: int) -> list[tuple[int, int, int]]:
    """All (a, b, c) with 3a + 4b + 5c = total, ordered by (c, b) like the annexes."""
    if total < 0:
        return []
    out = []
    for c in range(total // 5 + 1):
        for b in range((total - 5 * c) // 4 + 1):
            rest = total - 5 * c - 4 * b
            if rest % 3 == 0:
                out.append((rest // 3, b, c))
    return out


def explore_constant_sum(
    group: GroupSpec,
    sizes: SizeMultiset | Sequence[int],
    node_limit: int | None = 2_000_000,
    seed: int = 0,
) -> SearchOutcome:
    """Look for a partition of G* into sets with sizes ``sizes`` and a common sum.

    Candidate sums are tried by increasing element order; a candidate ``mu``
    is skipped unless ``t * mu`` equals the sum of all group elements.  The
    outcome carries the sum found in ``extra['mu']`` (a tuple).
    """
    sizes = sizes if isinstance(sizes, SizeMultiset) else SizeMultiset.of(sizes)
    if sizes.total != group.order - 1:
        raise SearchInconsistent(f"sizes must sum to |G|-1 = {group.order - 1}")
    parts = sorted(sizes.sizes)
    if parts and (parts[0] < 1 or (len(parts) > 1 and parts[1] < 2)):
        raise SearchInconsistent("at most one part may have size 1; the others need size >= 2")
    t = len(sizes)
    total = group.sum_all_elements()
    candidates = sorted(group.elements(), key=lambda x: (group.element_order(x), group.encode(x)))
    start = time.monotonic()
    spent = 0
    saw_budget = False
    tried = []
    for mu in candidates:
        if group.scale(t, mu) != total:
            continue
        tried.append(mu)
        out = search_partition(SearchProblem(group, sizes, target=mu, node_limit=node_limit, seed=seed))
        spent += out.nodes
        if out.found:
            out.nodes = spent
            out.duration = time.monotonic() - start
            out.extra = {"mu": mu, "tried": tried}
            return out
        saw_budget = saw_budget or out.status == BUDGET
    status = BUDGET if saw_budget else EXHAUSTED
    return SearchOutcome(status, None, spent, time.monotonic() - start, extra={"mu": None, "tried": tried})


def find_complete_mapping_search(
    group: GroupSpec, node_limit: int = 2_000_000, seed: int = 0
) -> SearchOutcome:
    """Search for a bijection phi with g -> g + phi(g) also a bijection.

    Returns an outcome whose ``extra['phi']`` is the table of phi on codes.
    Groups whose element sum is non-zero (a unique involution) are rejected
    at once: summing g + phi(g) over G gives twice the element sum, which is
    zero, while a bijection would give the element sum itself.
    """
    start = time.monotonic()
    n = group.order
    if n > 1 and any(group.sum_all_elements()):
        return SearchOutcome(EXHAUSTED, nodes=0, duration=time.monotonic() - start)
    if n <= 1 << 10:
        out = _cm_backtrack(group, node_limit, seed)
        if out is not None:
            out.duration = time.monotonic() - start
            return out
    phi = _cm_hill_climb(group, seed, node_limit)
    status = FOUND if phi is not None else BUDGET
    return SearchOutcome(status, None, 0, time.monotonic() - start, extra={"phi": phi})


def _cm_backtrack(group, node_limit, seed):
    n = group.order
    codes = np.arange(n)
    add_table = [group.add_codes(np.full(n, x, dtype=np.int64), codes).tolist() for x in range(n)]
    spent = 0
    limit = max(1000, 50 * n)
    k = 0
    while spent < node_limit:
        rng = np.random.default_rng([seed, k])
        value_order = list(range(n)) if k == 0 else rng.permutation(n).tolist()
        phi = [-1] * n
        used_phi = [False] * n
        used_theta = [False] * n
        nodes = 0
        this_limit = min(limit, node_limit - spent)

        def dfs(g):
            nonlocal nodes
            if g == n:
                return True
            nodes += 1
            if nodes > this_limit:
                raise _OutOfBudget
            row = add_table[g]
            for y in value_order:
                if used_phi[y]:
                    continue
                t = row[y]
                if used_theta[t]:
                    continue
                used_phi[y] = used_theta[t] = True
                phi[g] = y
                if dfs(g + 1):
                    return True
                used_phi[y] = used_theta[t] = False
            return False

        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 2 * n + 1000))
        try:
            ok = dfs(0)
        except _OutOfBudget:
            ok = None
        finally:
            sys.setrecursionlimit(old)
        spent += nodes
        if ok:
            return SearchOutcome(FOUND, None, spent, extra={"phi": np.array(phi, dtype=np.int64)})
        if ok is False:
            return SearchOutcome(EXHAUSTED, None, spent)
        k += 1
        limit *= 2
    return SearchOutcome(BUDGET, None, spent)


def _cm_hill_climb(group, seed, max_steps):
    """Swap-based repair of phi minimising collisions of g + phi(g)."""
    n = group.order
    rng = np.random.default_rng(seed)
    codes = np.arange(n, dtype=np.int64)
    for _ in range(20):
        phi = rng.permutation(n).astype(np.int64)
        theta = group.add_codes(codes, phi)
        hits = np.bincount(theta, minlength=n)
        steps = 0
        while steps < max_steps:
            bad = np.flatnonzero(hits[theta] > 1)
            if not len(bad):
                return phi
            steps += 1
            g = int(rng.choice(bad))
            h = int(rng.integers(n))
            tg_new = int(group.add_codes(g, int(phi[h])))
            th_new = int(group.add_codes(h, int(phi[g])))
            tg, th = int(theta[g]), int(theta[h])
            before = (hits[tg] > 1) + (hits[th] > 1)
            hits[tg] -= 1
            hits[th] -= 1
            hits[tg_new] += 1
            hits[th_new] += 1
            after = (hits[tg_new] > 1) + (hits[th_new] > 1)
            if after <= before or rng.random() < 0.01:
                phi[g], phi[h] = phi[h], phi[g]
                theta[g], theta[h] = tg_new, th_new
            else:
                hits[tg_new] -= 1
                hits[th_new] -= 1
                hits[tg] += 1
                hits[th] += 1
    return None


def verify_outcome(problem: SearchProblem, outcome: SearchOutcome) -> bool:
    if outcome.status != FOUND:
        return True
    return verify_family(
        problem.group, outcome.family, problem.sizes, problem.target, require_exact_cover=True
    ).ok


def naive_partition_exists(group: GroupSpec, ground: Sequence[int], sizes: Sequence[int], target: int = 0) -> bool:
    """Plain enumeration over set partitions; only for tiny grounds."""
    elems = list(ground)
    need = Counter(sizes)

    def rec(rest):
        if not rest:
            return True
        first, others = rest[0], rest[1:]
        for q in list(need):
            if not need[q]:
                continue
            need[q] -= 1
            for combo in _combinations(others, q - 1):
                if group.sum_codes((first,) + combo) == target:
                    left = [x for x in others if x not in combo]
                    if rec(left):
                        need[q] += 1
                        return True
            need[q] += 1
        return False

    return rec(elems)


def _combinations(seq, k):
    from itertools import combinations

    return combinations(seq, k)

