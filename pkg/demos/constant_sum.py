"""
Constant-sum partitions
=======================

Cyclic 2-groups have no zero-sum partition of their non-zero elements.
Relaxing "sum to zero" to "all parts share one sum" brings them back:
exhaustive search decides every size multiset on Z2, Z4, Z8 and Z16.
The same search on small non-cyclic groups turns up multisets with no
common sum at all.
"""

from collections import Counter

from zerosum import GroupSpec, explore_constant_sum


def partitions(n, maxpart=None, minpart=1):
    maxpart = n if maxpart is None else maxpart
    if n == 0:
        yield ()
        return
    for p in range(min(n, maxpart), minpart - 1, -1):
        for rest in partitions(n - p, p, minpart):
            yield (p,) + rest


def survey(moduli):
    g = GroupSpec(moduli)
    tally, misses = Counter(), []
    for sizes in partitions(g.order - 1):
        if sizes.count(1) > 1:
            continue
        out = explore_constant_sum(g, sizes)
        tally[out.status] += 1
        if not out.found:
            misses.append(sizes)
    return g, tally, misses


# one worked instance: common sum 8 in Z16
out = explore_constant_sum(GroupSpec((16,)), [1, 2, 2, 3, 7])
print("common sum", out.extra["mu"])
for s in out.family.element_sets():
    print("  ", s)

for moduli in [(2,), (4,), (8,), (16,), (4, 2), (2, 2, 2)]:
    g, tally, misses = survey(moduli)
    print(f"{str(g):8s} {dict(tally)}  no common sum: {misses or 'none'}")
