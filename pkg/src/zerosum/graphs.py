"""Graph labelings obtained from zero-sum partitions.

* distance magic labelings of complete multipartite graphs,
* antimagic edge labelings of 3-trees (every internal vertex has >= 3 children),
* irregular edge labelings of digraphs (inflow minus outflow is injective).

Each construction has an independent verifier that recomputes the weights
from the definition.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field


from .construct import zero_sum_partition
from .groups import GroupSpec, format_element

__all__ = [
    "LabelingPrecondition",
    "GraphFormatError",
    "MultipartiteSpec",
    "RootedTree",
    "Digraph",
    "VertexLabeling",
    "EdgeLabeling",
    "distance_magic_labeling",
    "antimagic_3tree_labeling",
    "digraph_irregular_labeling",
    "realize_component_weights",
    "verify_distance_magic",
    "verify_antimagic",
    "verify_irregular",
    "parse_graph",
]


class LabelingPrecondition(ValueError):
    """A hypothesis of the labeling theorem fails; ``condition`` names it."""

    def __init__(self, condition: str, detail: str = ""):
        super().__init__(f"{condition}: {detail}" if detail else condition)
        self.condition = condition


class GraphFormatError(ValueError):
    pass


# -- graph types -----------------------------------------------------------------


@dataclass(frozen=True)
class MultipartiteSpec:
    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(sorted(int(n) for n in self.sizes))
        if not sizes or sizes[0] < 1:
            raise GraphFormatError("class sizes must be positive")
        object.__setattr__(self, "sizes", sizes)

    @property
    def order(self) -> int:
        return sum(self.sizes)


@dataclass
class RootedTree:
    """Vertices 0..n-1; ``parent[v]`` is None for the root only."""

    parent: list[int | None]

    def __post_init__(self):
        roots = [v for v, p in enumerate(self.parent) if p is None]
        if len(roots) != 1:
            raise GraphFormatError(f"a rooted tree needs exactly one root, found {len(roots)}")
        self.root = roots[0]
        n = len(self.parent)
        self.children: list[list[int]] = [[] for _ in range(n)]
        for v, p in enumerate(self.parent):
            if p is not None:
                if not 0 <= p < n or p == v:
                    raise GraphFormatError(f"bad parent {p} for vertex {v}")
                self.children[p].append(v)
        seen = {self.root}
        todo = [self.root]
        while todo:
            for w in self.children[todo.pop()]:
                seen.add(w)
                todo.append(w)
        if len(seen) != n:
            raise GraphFormatError("parent links contain a cycle")

    @property
    def order(self) -> int:
        return len(self.parent)

    def internal(self) -> list[int]:
        return [v for v in range(self.order) if self.children[v]]

    def is_3tree(self) -> bool:
        return all(len(c) >= 3 for c in self.children if c)


@dataclass
class Digraph:
    n: int
    arcs: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        self.arcs = [(int(u), int(v)) for u, v in self.arcs]
        for u, v in self.arcs:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphFormatError(f"arc ({u}, {v}) has an endpoint outside 0..{self.n - 1}")
            if u == v:
                raise GraphFormatError(f"self-loop at {u}")

    def components(self) -> list[list[int]]:
        """Weakly connected components, each sorted, in order of smallest vertex."""
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.arcs:
            adj[u].append(v)
            adj[v].append(u)
        comp = [-1] * self.n
        out = []
        for s in range(self.n):
            if comp[s] >= 0:
                continue
            comp[s] = len(out)
            members = [s]
            todo = [s]
            while todo:
                for w in adj[todo.pop()]:
                    if comp[w] < 0:
                        comp[w] = comp[s]
                        members.append(w)
                        todo.append(w)
            out.append(sorted(members))
        return out


@dataclass
class VertexLabeling:
    group: GroupSpec
    labels: list[int]  # vertex -> code

    def to_json(self) -> str:
        return json.dumps({"group": str(self.group), "labels": [list(self.group.decode(c)) for c in self.labels]})

    def to_text(self) -> str:
        return "\n".join(f"{v:>5}  {format_element(self.group.decode(c))}" for v, c in enumerate(self.labels))


@dataclass
class EdgeLabeling:
    group: GroupSpec
    edges: list[tuple[int, int]]
    labels: list[int]  # edge index -> code

    def to_json(self) -> str:
        g = self.group
        return json.dumps({
            "group": str(g),
            "edges": [{"edge": list(e), "label": list(g.decode(c))} for e, c in zip(self.edges, self.labels)],
        })

    def to_text(self) -> str:
        g = self.group
        return "\n".join(f"{u:>5} {v:>5}  {format_element(g.decode(c))}" for (u, v), c in zip(self.edges, self.labels))


# -- shared checks -----------------------------------------------------------------


def _require_noncyclic_2group(g: GroupSpec) -> None:
    n = g.order.bit_length() - 1
    if g.order != 1 << n:
        raise LabelingPrecondition("|Γ| = 2^n", f"{g} has order {g.order}")
    if g.involution_count() == 1:
        raise LabelingPrecondition("Γ ≇ Z_{2^n}", f"{g} is cyclic (unique involution)")


def _sorted_sets(fam) -> list[list[int]]:
    return [sorted(s) for s in fam.sets]


# -- distance magic ----------------------------------------------------------------


def distance_magic_labeling(group: GroupSpec, spec: MultipartiteSpec) -> VertexLabeling:
    """Label the vertices of K_{n_1..n_t} so every vertex has neighbour sum 0.

    Vertices are numbered class by class in the order of ``spec.sizes``.
    Each class gets a zero-sum set; the largest class also gets 0.
    """
    _require_noncyclic_2group(group)
    sizes = spec.sizes
    if sum(sizes) != group.order:
        raise LabelingPrecondition("|Γ| = n_1 + ... + n_t", f"classes sum to {sum(sizes)}, |Γ| = {group.order}")
    if sizes[0] < 3:
        raise LabelingPrecondition("n_i ≥ 3 for all i", f"smallest class has {sizes[0]} vertices")
    if sizes[-1] < 4:
        raise LabelingPrecondition("n_t ≥ 4", f"largest class has {sizes[-1]} vertices")
    parts = list(sizes[:-1]) + [sizes[-1] - 1]
    fam = zero_sum_partition(group, parts)
    pool: dict[int, list[list[int]]] = {}
    for s in _sorted_sets(fam):
        pool.setdefault(len(s), []).append(s)
    labels: list[int] = []
    for i, n in enumerate(sizes):
        if i == len(sizes) - 1:
            labels.extend(sorted([0] + pool[n - 1].pop()))
        else:
            labels.extend(pool[n].pop())
    return VertexLabeling(group, labels)


def verify_distance_magic(group: GroupSpec, spec: MultipartiteSpec, lab: VertexLabeling) -> tuple[bool, set]:
    """Recompute every vertex's neighbour sum; returns (ok, set of weights)."""
    if sorted(lab.labels) != list(range(group.order)):
        return False, set()
    # in K_{n_1..n_t} a vertex's neighbours are all vertices outside its class
    total = group.sum_codes(lab.labels)
    weights = set()
    start = 0
    for n in spec.sizes:
        own = group.sum_codes(lab.labels[start : start + n])
        weights.add(group.sub_codes(total, own))
        start += n
    return len(weights) == 1, weights


# -- antimagic 3-trees -----------------------------------------------------------------


def antimagic_3tree_labeling(group: GroupSpec, tree: RootedTree) -> EdgeLabeling:
    """Edge labels (edges listed as (parent, child)) with distinct vertex weights."""
    _require_noncyclic_2group(group)
    if tree.order != group.order:
        raise LabelingPrecondition("|T| = |Γ|", f"tree has {tree.order} vertices, |Γ| = {group.order}")
    bad = [v for v in tree.internal() if len(tree.children[v]) < 3]
    if bad:
        raise LabelingPrecondition("3-tree", f"vertex {bad[0]} has {len(tree.children[bad[0]])} < 3 children")
    internal = tree.internal()
    fam = zero_sum_partition(group, [len(tree.children[v]) for v in internal])
    pool: dict[int, list[list[int]]] = {}
    for s in _sorted_sets(fam):
        pool.setdefault(len(s), []).append(s)
    edges, labels = [], []
    for v in internal:
        kids = sorted(tree.children[v])
        for w, x in zip(kids, pool[len(kids)].pop()):
            edges.append((v, w))
            labels.append(x)
    return EdgeLabeling(group, edges, labels)


def verify_antimagic(group: GroupSpec, tree: RootedTree, lab: EdgeLabeling) -> tuple[bool, list[int]]:
    """Labels must be exactly Γ* and vertex weights pairwise distinct."""
    expected = {(tree.parent[v], v) for v in range(tree.order) if tree.parent[v] is not None}
    if set(lab.edges) != expected or len(lab.edges) != len(expected):
        return False, []
    if sorted(lab.labels) != list(range(1, group.order)):
        return False, []
    weights = [0] * tree.order
    for (u, v), x in zip(lab.edges, lab.labels):
        weights[u] = group.add_codes(weights[u], x)
        weights[v] = group.add_codes(weights[v], x)
    return len(set(weights)) == tree.order, weights


# -- digraphs ---------------------------------------------------------------------------


def realize_component_weights(group: GroupSpec, vertices, arcs, targets: dict[int, int]) -> dict[int, int]:
    """Arc labels (arc index -> code) giving each vertex inflow - outflow = target.

    ``arcs`` is a list of (u, v) pairs restricted to the component.  A BFS
    spanning tree carries the labels, solved from the leaves up; the other
    arcs get 0.  Requires the targets to sum to 0.
    """
    vertices = list(vertices)
    if group.sum_codes(targets[v] for v in vertices) != 0:
        raise LabelingPrecondition("Σ targets = 0", "component targets do not sum to zero")
    labels = {i: 0 for i in range(len(arcs))}
    if len(vertices) <= 1:
        return labels
    inc: dict[int, list[int]] = {v: [] for v in vertices}
    for i, (u, v) in enumerate(arcs):
        inc[u].append(i)
        inc[v].append(i)
    root = vertices[0]
    up: dict[int, int] = {}
    order = [root]
    seen = {root}
    q = deque([root])
    while q:
        x = q.popleft()
        for i in inc[x]:
            u, v = arcs[i]
            y = v if u == x else u
            if y not in seen:
                seen.add(y)
                up[y] = i
                order.append(y)
                q.append(y)
    if len(seen) != len(vertices):
        raise LabelingPrecondition("weakly connected component", "the vertex set is not connected")
    current = {v: 0 for v in vertices}  # inflow - outflow from labelled arcs
    for x in reversed(order[1:]):
        i = up[x]
        u, v = arcs[i]
        need = group.sub_codes(targets[x], current[x])
        lab = need if v == x else group.neg_codes(need)
        labels[i] = int(lab)
        current[v] = group.add_codes(current[v], lab)
        current[u] = group.sub_codes(current[u], lab)
    return labels


def digraph_irregular_labeling(group: GroupSpec, d: Digraph) -> EdgeLabeling:
    """Arc labels whose vertex weights (inflow - outflow) are pairwise distinct."""
    n = d.n
    if group.order != 1 << (group.order.bit_length() - 1):
        raise LabelingPrecondition("|Γ| = 2^m", f"{group} has order {group.order}")
    if group.involution_count() <= 1:
        raise LabelingPrecondition("|I(Γ)| > 1", f"{group} has a unique involution")
    comps = d.components()
    small = [c for c in comps if len(c) < 3]
    if small:
        raise LabelingPrecondition("no component of order less than 3", f"component {small[0]} has {len(small[0])} vertices")
    if group.order <= n:
        raise LabelingPrecondition("|Γ| > n", f"|Γ| = {group.order}, n = {n}")
    if group.order in (n + 2, n + 3):
        raise LabelingPrecondition("|Γ| ∉ {n+2, n+3}", f"|Γ| = {group.order}, n = {n}")
    ranked = sorted(comps, key=len, reverse=True)
    sizes = [len(c) for c in ranked]
    if group.order >= n + 4:
        sizes.append(group.order - 1 - n)
    fam = zero_sum_partition(group, sizes)
    pool: dict[int, list[list[int]]] = {}
    for s in _sorted_sets(fam):
        pool.setdefault(len(s), []).append(s)
    labels = [0] * len(d.arcs)
    comp_of = {v: k for k, c in enumerate(ranked) for v in c}
    arcs_by_comp: dict[int, list[int]] = {}
    for i, (u, _) in enumerate(d.arcs):
        arcs_by_comp.setdefault(comp_of[u], []).append(i)
    for k, comp in enumerate(ranked):
        targets = dict(zip(comp, pool[len(comp)].pop()))
        idx = arcs_by_comp.get(k, [])
        sol = realize_component_weights(group, comp, [d.arcs[i] for i in idx], targets)
        for j, i in enumerate(idx):
            labels[i] = sol[j]
    return EdgeLabeling(group, list(d.arcs), labels)


def irregular_weights(group: GroupSpec, d: Digraph, labels) -> list[int]:
    w = [0] * d.n
    for (u, v), x in zip(d.arcs, labels):
        w[v] = group.add_codes(w[v], x)
        w[u] = group.sub_codes(w[u], x)
    return w


def verify_irregular(group: GroupSpec, d: Digraph, lab: EdgeLabeling) -> tuple[bool, list[int]]:
    if list(lab.edges) != list(d.arcs):
        return False, []
    w = irregular_weights(group, d, lab.labels)
    return len(set(w)) == d.n, w


# -- text format ------------------------------------------------------------------------


def parse_graph(text: str):
    """Parse ``digraph n`` / ``tree n`` / ``classes n1 n2 ...`` files.

    After ``digraph n`` come ``u v`` arcs; after ``tree n`` come
    ``child parent`` links.  Vertices are 0-based; ``#`` starts a comment.
    """
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line.split())
    if not lines:
        raise GraphFormatError("empty graph file")
    head, body = lines[0], lines[1:]
    try:
        if head[0] == "classes":
            if body:
                raise GraphFormatError("a classes file has a single line")
            return MultipartiteSpec(tuple(int(x) for x in head[1:]))
        if len(head) != 2:
            raise GraphFormatError(f"bad header {' '.join(head)!r}")
        n = int(head[1])
        pairs = []
        for row in body:
            if len(row) != 2:
                raise GraphFormatError(f"expected two vertices, got {' '.join(row)!r}")
            pairs.append((int(row[0]), int(row[1])))
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc
    if head[0] == "digraph":
        return Digraph(n, pairs)
    if head[0] == "tree":
        parent: list[int | None] = [None] * n
        for child, par in pairs:
            if not 0 <= child < n:
                raise GraphFormatError(f"vertex {child} outside 0..{n - 1}")
            if parent[child] is not None:
                raise GraphFormatError(f"vertex {child} has two parents")
            parent[child] = par
        return RootedTree(parent)
    raise GraphFormatError(f"unknown graph kind {head[0]!r}")
