"""Finite binary trees as nested tuples: () is a leaf, (left, right) a caret.

A tree with n+1 leaves encodes the standard dyadic subdivision of [0,1]
obtained by halving: the leaves, read left to right, are standard dyadic
intervals.  Trees are immutable, hashable and compared structurally.
"""

from __future__ import annotations

import sys

from .dyadic import Dyadic, ZERO, ONE

# Conjugated elements can carry breakpoints with large exponents, which makes
# their subdivision trees deep; plain recursion needs headroom.
sys.setrecursionlimit(max(sys.getrecursionlimit(), 100_000))

LEAF: tuple = ()
CARET = (LEAF, LEAF)


def num_leaves(tree) -> int:
    count = 0
    stack = [tree]
    while stack:
        t = stack.pop()
        if t:
            stack.append(t[0])
            stack.append(t[1])
        else:
            count += 1
    return count


def join(a, b):
    """Smallest common refinement (union of the two subdivisions)."""
    if not a:
        return b
    if not b:
        return a
    return (join(a[0], b[0]), join(a[1], b[1]))


def subtrees_at_leaves(base, refined) -> list:
    """For each leaf of ``base``, the subtree of ``refined`` hanging there.

    ``refined`` must refine ``base``.
    """
    out: list = []

    def walk(b, r):
        if not b:
            out.append(r)
            return
        if not r:
            raise ValueError("tree is not a refinement of the base")
        walk(b[0], r[0])
        walk(b[1], r[1])

    walk(base, refined)
    return out


def attach(base, subtrees) -> tuple:
    """Replace leaf i of ``base`` with subtrees[i]."""
    it = iter(subtrees)

    def walk(t):
        if not t:
            return next(it)
        return (walk(t[0]), walk(t[1]))

    result = walk(base)
    return result


def caret_leaf_indices(tree) -> dict[int, tuple]:
    """Map leaf index i -> path of the caret whose leaves are (i, i+1)."""
    out: dict[int, tuple] = {}

    def walk(t, path, start) -> int:
        if not t:
            return 1
        if t == CARET:
            out[start] = path
            return 2
        nl = walk(t[0], path + (0,), start)
        return nl + walk(t[1], path + (1,), start + nl)

    walk(tree, (), 0)
    return out


def replace_at(tree, path, subtree):
    if not path:
        return subtree
    l, r = tree
    if path[0] == 0:
        return (replace_at(l, path[1:], subtree), r)
    return (l, replace_at(r, path[1:], subtree))


def partition_points(tree) -> list[Dyadic]:
    """The n+2 boundary points 0 = p0 < ... < p_{n+1} = 1 of the leaf intervals."""
    points = [ZERO]

    def walk(t, lo: Dyadic, hi: Dyadic):
        if not t:
            points.append(hi)
            return
        mid = (lo + hi).half()
        walk(t[0], lo, mid)
        walk(t[1], mid, hi)

    walk(tree, ZERO, ONE)
    return points


def tree_of_partition(points: list[Dyadic]) -> tuple:
    """Rebuild the tree whose leaf intervals have the given boundary points.

    The points must describe a partition of [points[0], points[-1]] into
    standard dyadic intervals, halving all the way down.
    """

    def build(lo_i: int, hi_i: int, lo: Dyadic, hi: Dyadic):
        if hi_i == lo_i + 1:
            if points[lo_i] != lo or points[hi_i] != hi:
                raise ValueError("partition does not match dyadic subdivision")
            return LEAF
        mid = (lo + hi).half()
        # binary search for mid among points[lo_i..hi_i]
        a, b = lo_i + 1, hi_i
        while a < b:
            m = (a + b) // 2
            if points[m] < mid:
                a = m + 1
            else:
                b = m
        if a >= hi_i or points[a] != mid:
            raise ValueError("partition does not split at the midpoint")
        return (build(lo_i, a, lo, mid), build(a, hi_i, mid, hi))

    return build(0, len(points) - 1, points[0], points[-1])
