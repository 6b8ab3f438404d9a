"""
Zero-sum partitions of a 2-group, step by step
==============================================

Split the non-zero elements of a finite abelian 2-group into subsets
of prescribed sizes, each summing to zero, then check the result.
"""

from zerosum import GroupSpec, Trace, format_annex, parse_group_spec, verify_family, zero_sum_partition

# a group is a list of cyclic factors; elements are residue tuples
g = parse_group_spec("Z4xZ2^2")
print(g, "has order", g.order)

# 15 non-zero elements, split into sizes 3, 3, 4, 5
fam = zero_sum_partition(g, [3, 3, 4, 5])
for s in fam.element_sets():
    print(s)

# the verifier is separate from the construction
print(verify_family(g, fam, expected_sizes=[3, 3, 4, 5]).summary())

# cyclic groups have a unique involution, so the total is never zero
try:
    zero_sum_partition(GroupSpec((8,)), [3, 4])
except ValueError as exc:
    print("Z8:", exc)

# large groups go through the recursive construction; the trace shows how
big = GroupSpec((4, 4) + (2,) * 8)
tr = Trace()
fam = zero_sum_partition(big, [3] * 1000 + [4] * 200 + [5] * 45 + [70], trace=tr)
print(big, "ok:", verify_family(big, fam).ok)
print("construction steps:", sorted({n["node"] for n in tr.nodes}))

# the text format used by the embedded tables round-trips
small = zero_sum_partition(GroupSpec((2, 2, 2)), [3, 4])
print(format_annex([small]))
