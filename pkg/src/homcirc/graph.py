"""Digraphs, spanning-tree machinery and matched cut/cycle matrix pairs.

Branches are numbered 1..m in a fixed order shared by every matrix built
from the graph.  Cut matrices have the cycle space as kernel, cycle
matrices the cut space; a pair is summarized by the exact integers
k_A, k_B and the tree-independent signed invariant k_AB.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    GraphError,
    NotASpanningTree,
    TreeCountExceedsCap,
    UnknownNode,
    ZeroTreeDeterminant,
)
from .numerics import integer_det

DEFAULT_TREE_CAP = 1_000_000


class _DSU:
    def __init__(self, n):
        self.parent = list(range(n + 1))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True

    def copy(self):
        d = _DSU(0)
        d.parent = self.parent.copy()
        return d


@dataclass(frozen=True)
class Digraph:
    """Connected directed multigraph; nodes 1..n, branches 1..m."""

    node_count: int
    branches: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "branches", tuple((int(t), int(h)) for t, h in self.branches)
        )
        n = self.node_count
        if n < 1:
            raise GraphError("graph needs at least one node")
        seen = [False] * (n + 1)
        for k, (tail, head) in enumerate(self.branches, start=1):
            if not (1 <= tail <= n and 1 <= head <= n):
                raise UnknownNode(f"branch {k} touches unknown node")
            if tail == head:
                raise GraphError(f"branch {k} is a self-loop at node {tail}")
            seen[tail] = seen[head] = True
        if n > 1 and not all(seen[1:]):
            isolated = [i for i in range(1, n + 1) if not seen[i]]
            raise GraphError(f"isolated nodes {isolated}")
        dsu = _DSU(n)
        for tail, head in self.branches:
            dsu.union(tail, head)
        root = dsu.find(1)
        if any(dsu.find(v) != root for v in range(2, n + 1)):
            raise GraphError("graph is not connected")

    @property
    def n(self):
        return self.node_count

    @property
    def m(self):
        return len(self.branches)

    def add_branch(self, tail: int, head: int) -> "Digraph":
        return Digraph(self.node_count, self.branches + ((tail, head),))


def full_incidence(g: Digraph) -> np.ndarray:
    """n x m matrix: +1 where a branch leaves a node, -1 where it enters."""
    a = np.zeros((g.n, g.m), dtype=int)
    for j, (tail, head) in enumerate(g.branches):
        a[tail - 1, j] += 1
        a[head - 1, j] -= 1
    return a


def reduced_incidence(g: Digraph, reference: int | None = None) -> np.ndarray:
    """Full incidence with the reference node's row removed (default: node n)."""
    if reference is None:
        reference = g.n
    if not 1 <= reference <= g.n:
        raise UnknownNode(f"reference node {reference} not in graph")
    a = full_incidence(g)
    return np.delete(a, reference - 1, axis=0)


def is_spanning_tree(g: Digraph, branches) -> bool:
    t = tuple(branches)
    if len(t) != g.n - 1 or len(set(t)) != len(t):
        return False
    if any(not 1 <= b <= g.m for b in t):
        return False
    dsu = _DSU(g.n)
    for b in t:
        tail, head = g.branches[b - 1]
        if not dsu.union(tail, head):
            return False
    return True


def spanning_trees(g: Digraph, cap: int = DEFAULT_TREE_CAP) -> list[tuple[int, ...]]:
    """All spanning trees as sorted branch tuples, in lexicographic order."""
    n, m = g.n, g.m
    need = n - 1
    result: list[tuple[int, ...]] = []

    def connects(chosen_dsu, start_idx):
        dsu = chosen_dsu.copy()
        comps = sum(1 for v in range(1, n + 1) if dsu.find(v) == v)
        for j in range(start_idx, m):
            tail, head = g.branches[j]
            if dsu.union(tail, head):
                comps -= 1
                if comps == 1:
                    return True
        return comps == 1

    def recurse(idx, chosen, dsu):
        if len(chosen) == need:
            result.append(tuple(chosen))
            if len(result) > cap:
                raise TreeCountExceedsCap(
                    f"more than {cap} spanning trees", partial_count=len(result)
                )
            return
        if idx == m or len(chosen) + (m - idx) < need:
            return
        tail, head = g.branches[idx]
        if dsu.find(tail) != dsu.find(head):
            inc = dsu.copy()
            inc.union(tail, head)
            chosen.append(idx + 1)
            recurse(idx + 1, chosen, inc)
            chosen.pop()
        # only skip this branch if the rest can still connect everything
        if connects(dsu, idx + 1):
            recurse(idx + 1, chosen, dsu)

    recurse(0, [], _DSU(n))
    return result


def _exact_solve_unit(a_t, a_full):
    """X = a_t^{-1} @ a_full over exact rationals; entries must be integers."""
    k = a_t.shape[0]
    aug = [
        [Fraction(int(a_t[i, j])) for j in range(k)]
        + [Fraction(int(x)) for x in a_full[i]]
        for i in range(k)
    ]
    for col in range(k):
        piv = next((r for r in range(col, k) if aug[r][col] != 0), None)
        if piv is None:
            raise NotASpanningTree("tree columns are linearly dependent")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(k):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    width = a_full.shape[1]
    out = np.zeros((k, width), dtype=int)
    for i in range(k):
        for j in range(width):
            v = aug[i][k + j]
            if v.denominator != 1:
                raise GraphError("fundamental cutset matrix is not integral")
            out[i, j] = int(v)
    return out


@dataclass(frozen=True)
class CutCyclePair:
    """Matched cut matrix A ((n-1) x m) and cycle matrix B ((m-n+1) x m)."""

    a: np.ndarray
    b: np.ndarray
    k_a: int
    k_b: int
    k_ab: int
    witness_tree: tuple[int, ...]
    node_count: int = field(default=0)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=int)
        b = np.asarray(self.b, dtype=int)
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a.shape[1] != b.shape[1]:
            raise GraphError("cut and cycle matrices disagree on branch count")
        if np.any(a @ b.T != 0):
            raise GraphError("cut and cycle matrices are not orthogonal")

    @property
    def m(self):
        return self.a.shape[1]

    def stacked(self) -> np.ndarray:
        return np.vstack([self.a, self.b])


def k_invariant(a, b, tree, n: int) -> int:
    """(-1)**(n(n-1)/2 + sum(tree)) * det A_T * det B_cotree, exact.

    Tree-independent for any fixed valid (A, B) pair sharing a branch order.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    m = a.shape[1]
    t = tuple(sorted(int(j) for j in tree))
    cotree = tuple(j for j in range(1, m + 1) if j not in set(t))
    det_a = integer_det(a[:, [j - 1 for j in t]])
    det_b = integer_det(b[:, [j - 1 for j in cotree]])
    if det_a == 0 or det_b == 0:
        raise ZeroTreeDeterminant(
            f"branch set {t} is not a spanning tree for this pair"
        )
    exponent = n * (n - 1) // 2 + sum(t)
    sign = -1 if exponent % 2 else 1
    return sign * det_a * det_b


def fundamental_pair(g: Digraph, tree) -> CutCyclePair:
    """Fundamental cutset/loop pair of a spanning tree, in global branch
    order, sign-normalized so that k_AB = +1 (and k_A = k_B = 1).
    """
    t = tuple(sorted(int(j) for j in tree))
    if not is_spanning_tree(g, t):
        raise NotASpanningTree(f"branches {t} do not form a spanning tree")
    cotree = tuple(j for j in range(1, g.m + 1) if j not in set(t))
    a_red = reduced_incidence(g)
    a = _exact_solve_unit(a_red[:, [j - 1 for j in t]], a_red)
    b = np.zeros((len(cotree), g.m), dtype=int)
    for r, c in enumerate(cotree):
        b[r, c - 1] = 1
        for i, tj in enumerate(t):
            b[r, tj - 1] = -a[i, c - 1]
    if b.shape[0] > 0 and k_invariant(a, b, t, g.n) == -1:
        b[0, :] = -b[0, :]
    return CutCyclePair(
        a=a, b=b, k_a=1, k_b=1, k_ab=1, witness_tree=t, node_count=g.n
    )


def default_pair(
    g: Digraph, reference: int | None = None, cap: int = DEFAULT_TREE_CAP
) -> CutCyclePair:
    """Reduced incidence matrix plus the fundamental loop matrix of the
    lexicographically first spanning tree, sign-normalized to k_AB = +1.
    """
    a = reduced_incidence(g, reference)
    first = _first_spanning_tree(g)
    b = np.array(fundamental_pair(g, first).b)
    if k_invariant(a, b, first, g.n) == -1:
        # flip one row; with an empty cycle matrix the cut side must yield
        if b.shape[0] > 0:
            b[0, :] = -b[0, :]
        else:
            a = a.copy()
            a[0, :] = -a[0, :]
    pair = CutCyclePair(
        a=a, b=b, k_a=1, k_b=1, k_ab=1, witness_tree=first, node_count=g.n
    )
    if k_invariant(pair.a, pair.b, first, g.n) != 1:
        raise GraphError("failed to sign-normalize the default pair")
    return pair


def _first_spanning_tree(g: Digraph) -> tuple[int, ...]:
    dsu = _DSU(g.n)
    chosen = []
    for j, (tail, head) in enumerate(g.branches, start=1):
        if dsu.union(tail, head):
            chosen.append(j)
            if len(chosen) == g.n - 1:
                break
    if len(chosen) != g.n - 1:
        raise GraphError("graph is not connected")
    return tuple(chosen)


def tree_count(pair: CutCyclePair) -> int:
    """Number of spanning trees via det stack(A, B) = tau * k_AB."""
    det = integer_det(pair.stacked())
    if det % pair.k_ab != 0:
        raise ZeroTreeDeterminant("stacked determinant not divisible by k_AB")
    tau = det // pair.k_ab
    return tau
