"""
Group labelings of graphs
=========================

Three graph labelings that reduce to zero-sum partitions: distance magic
labelings of complete multipartite graphs, antimagic labelings of 3-trees,
and irregular labelings of digraphs.
"""

from zerosum import (
    Digraph,
    GroupSpec,
    LabelingPrecondition,
    MultipartiteSpec,
    RootedTree,
    antimagic_3tree_labeling,
    digraph_irregular_labeling,
    distance_magic_labeling,
)
from zerosum.graphs import verify_antimagic, verify_distance_magic, verify_irregular

g = GroupSpec((4, 2, 2))

# K(3,5,8): every vertex sees labels summing to zero
spec = MultipartiteSpec((3, 5, 8))
lab = distance_magic_labeling(g, spec)
print("distance magic:", verify_distance_magic(g, spec, lab))

# a rooted tree where every internal vertex has at least three children
parent = [None, 0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4]
tree = RootedTree(parent)
ok, weights = verify_antimagic(g, tree, antimagic_3tree_labeling(g, tree))
print("antimagic 3-tree:", ok, "root weight", weights[tree.root])

# a directed cycle on 12 vertices: all in-minus-out weights differ
d = Digraph(12, [(i, (i + 1) % 12) for i in range(12)])
print("irregular digraph:", verify_irregular(g, d, digraph_irregular_labeling(g, d))[0])

# each failed precondition is named
try:
    distance_magic_labeling(GroupSpec((16,)), MultipartiteSpec((4, 12)))
except LabelingPrecondition as exc:
    print("rejected:", exc.condition)
