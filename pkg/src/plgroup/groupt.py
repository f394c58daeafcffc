"""Thompson's group T: tree pairs with a cyclic leaf rotation.

A TElement (D, R, r) with n leaves per tree maps domain leaf i affinely onto
range leaf (i + r) mod n.  Because the induced circle map preserves cyclic
order, refinements and compositions stay in this shape, and the reduced
triple is the canonical form (cross-checked against the CircleMap picture).

Generators: A is F's x0 included in T (rotation 0), B is x1, and C is the
3-leaf element whose circle map sends [0,1/2] -> [3/4,1], [1/2,3/4] -> [0,1/2]
and [3/4,1] -> [1/2,3/4]; with the package's composition order (leftmost
letter applied last) these satisfy C^3 = 1 and (A C)^2 = 1.

Words are tuples over {+-1, +-2, +-3} for {A, B, C} and inverses.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable

from . import trees
from .groupf import TreePair, generator_pair
from .plmap import CircleMap
from .trees import LEAF


def _reduce_t(dom, ran, rot: int):
    while True:
        n = trees.num_leaves(dom)
        if n == 1:
            return dom, ran, 0
        dc = trees.caret_leaf_indices(dom)
        rc = trees.caret_leaf_indices(ran)
        hit = None
        for i in dc:
            j = (i + rot) % n
            if j <= n - 2 and j in rc:
                hit = (i, j)
                break
        if hit is None:
            return dom, ran, rot % n
        i, j = hit
        dom = trees.replace_at(dom, dc[i], LEAF)
        ran = trees.replace_at(ran, rc[j], LEAF)
        rot = (j - i) % (n - 1)


class TElement:
    """Reduced rotated tree pair; canonical form of a T element."""

    __slots__ = ("domain", "range", "rotation", "_hash")

    def __init__(self, domain, range_, rotation: int, *, _reduced=False):
        if not _reduced:
            nd, nr = trees.num_leaves(domain), trees.num_leaves(range_)
            if nd != nr:
                raise ValueError(f"leaf counts differ: {nd} vs {nr}")
            domain, range_, rotation = _reduce_t(domain, range_, rotation % nd)
        self.domain = domain
        self.range = range_
        self.rotation = rotation
        self._hash = None

    @classmethod
    def identity(cls) -> "TElement":
        return cls(LEAF, LEAF, 0, _reduced=True)

    @classmethod
    def from_tree_pair(cls, p: TreePair) -> "TElement":
        return cls(p.domain, p.range, 0, _reduced=True)

    @property
    def is_identity(self) -> bool:
        return self.domain == LEAF and self.range == LEAF and self.rotation == 0

    @property
    def num_leaves(self) -> int:
        return trees.num_leaves(self.domain)

    def __eq__(self, other):
        if not isinstance(other, TElement):
            return NotImplemented
        return (self.rotation == other.rotation and self.domain == other.domain
                and self.range == other.range)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.domain, self.range, self.rotation))
        return self._hash

    def __mul__(self, other: "TElement") -> "TElement":
        """self after other."""
        if not isinstance(other, TElement):
            return NotImplemented
        nt = trees.num_leaves(other.domain)
        ns = trees.num_leaves(self.domain)
        refined = trees.join(other.range, self.domain)
        taus = trees.subtrees_at_leaves(other.range, refined)
        sigmas = trees.subtrees_at_leaves(self.domain, refined)
        # expand other: its domain leaf i splits like its range leaf (i + rot)
        new_dom = trees.attach(other.domain,
                               [taus[(i + other.rotation) % nt] for i in range(nt)])
        rot_other = sum(trees.num_leaves(taus[j]) for j in range(other.rotation))
        # expand self: its range leaf j splits like its domain leaf (j - rot)
        new_ran = trees.attach(self.range,
                               [sigmas[(j - self.rotation) % ns] for j in range(ns)])
        rot_self = sum(trees.num_leaves(sigmas[(j - self.rotation) % ns])
                       for j in range(self.rotation))
        total = trees.num_leaves(refined)
        return TElement(new_dom, new_ran, (rot_other + rot_self) % total)

    def inverse(self) -> "TElement":
        n = self.num_leaves
        return TElement(self.range, self.domain, (-self.rotation) % n, _reduced=True)

    def __pow__(self, n: int) -> "TElement":
        if n < 0:
            return self.inverse() ** (-n)
        out = TElement.identity()
        for _ in range(n):
            out = out * self
        return out

    def __repr__(self):
        return f"TElement({self.domain!r}, {self.range!r}, rot={self.rotation})"

    # -- circle map conversion -------------------------------------------------

    def to_circle_map(self) -> CircleMap:
        dp = trees.partition_points(self.domain)
        rp = trees.partition_points(self.range)
        n = self.num_leaves
        verts = []
        for i in range(n + 1):
            j = i + self.rotation
            verts.append((dp[i], rp[j % n] + (j // n)))
        return CircleMap(tuple(verts))

    @classmethod
    def from_circle_map(cls, c: CircleMap) -> "TElement":
        from bisect import bisect_left, bisect_right

        from .dyadic import Dyadic

        def standard(lo, hi) -> bool:
            width = hi - lo
            odd, k = width.two_adic()
            if odd != 1:
                return False
            if lo.num == 0:
                return True
            _, v = lo.two_adic()
            return v >= k

        xs = [v[0] for v in c.vertices]

        # lo_i..hi_i bounds the indices of breakpoints strictly inside (a, b)
        def build(a, b, fa, fb, lo_i, hi_i):
            base = fa.floor()
            if lo_i >= hi_i and fb - base <= 1 and standard(fa - base, fb - base):
                return LEAF
            mid = (a + b).half()
            if lo_i >= hi_i:
                fmid = (fa + fb).half()
            else:
                fmid = c.evaluate(mid)
            split_l = bisect_left(xs, mid, lo_i, hi_i)
            split_r = bisect_right(xs, mid, lo_i, hi_i)
            return (build(a, mid, fa, fmid, lo_i, split_l),
                    build(mid, b, fmid, fb, split_r, hi_i))

        dom = build(Dyadic(0), Dyadic(1), c.evaluate(Dyadic(0)), c.evaluate(Dyadic(1)),
                    1, len(xs) - 1)
        dp = trees.partition_points(dom)
        keys = []
        for p in dp[:-1]:
            y = c.evaluate(p)
            keys.append(y - y.floor())
        order = sorted(keys)
        rp = order + [Dyadic(1)]
        ran = trees.tree_of_partition(rp)
        rotation = sum(1 for k in keys if k < keys[0])
        return cls(dom, ran, rotation)


# -- generators and distinguished subgroups ------------------------------------


@lru_cache(maxsize=1)
def t_generators() -> tuple[TElement, TElement, TElement]:
    """(A, B, C): A = x0, B = x1, C the 3-leaf cyclic rotation."""
    a = TElement.from_tree_pair(generator_pair(0))
    b = TElement.from_tree_pair(generator_pair(1))
    t3 = (LEAF, (LEAF, LEAF))
    c = TElement(t3, t3, 2, _reduced=True)
    return a, b, c


def t_word_to_element(word: Iterable[int]) -> TElement:
    """Product over letters +-1=A, +-2=B, +-3=C, leftmost applied last."""
    a, b, c = t_generators()
    gens = {1: a, 2: b, 3: c}
    out = TElement.identity()
    for letter in word:
        g = gens[abs(letter)]
        out = out * (g if letter > 0 else g.inverse())
    return out


def t_is_identity(word: Iterable[int]) -> bool:
    return t_word_to_element(word).is_identity


@lru_cache(maxsize=1)
def free_generators() -> tuple[TElement, TElement]:
    """u = A C^2 A and v = A^2 C^2: a free basis of a rank-2 subgroup."""
    a, _, c = t_generators()
    u = a * c * c * a
    v = a * a * c * c
    return u, v


@lru_cache(maxsize=1)
def derived_generators() -> tuple[TElement, TElement, TElement, TElement]:
    """(a, b, c, d) = (u^2, v^2, u v u^-1, v u v^-1)."""
    u, v = free_generators()
    return u * u, v * v, u * v * u.inverse(), v * u * v.inverse()
