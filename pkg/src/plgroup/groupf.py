"""Thompson's group F: reduced tree-pair diagrams, normal forms, word problem.

An element is a pair of binary trees with equally many leaves; leaf i of the
domain tree maps affinely onto leaf i of the range tree.  A pair is reduced
when no leaf index i has a caret at leaves (i, i+1) in both trees; the
reduced pair is the canonical form, so the word problem is equality with the
trivial pair.

Words are tuples of nonzero ints: letter +(i+1) is the generator x_i and
-(i+1) its inverse.  Words read left to right with the leftmost letter
applied last, so the word (1, 2) denotes the function x0 after x1.

The generators are pinned to PL maps: x0 sends t to t/2 on [0, 1/2], and
x_{i+1} is x_i hung under a right caret.  With this choice the conjugation
``plmap.phi_to_line`` carries x0 to the translation t - 1 and x1 to the map
that is the identity left of 0, t/2 on [0,2] and t - 1 right of 2.

Normal forms come from the infinite presentation with relations
x_k^-1 x_n x_k = x_{n+1} for k < n: every element is uniquely

    x_{i1}^{r1} ... x_{ik}^{rk} x_{jl}^{-sl} ... x_{j1}^{-s1}

with i1 < ... < ik, j1 < ... < jl, all exponents >= 1, and whenever an index
occurs in both halves, index+1 occurs in at least one.  For a reduced pair
(D, R) the exponent of index k in the positive (resp. negative) half is the
number of interior nodes of R (resp. D) whose subtree has leftmost leaf k
and does not contain the last leaf.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from . import trees
from .dyadic import Dyadic
from .errors import DecodeError, ResourceLimitError
from .plmap import IntervalMap, LineMap, phi_from_line, phi_to_line
from .trees import CARET, LEAF
from .varint import append_svarint, append_uvarint, read_svarint, read_uvarint
from .words import free_reduce, invert_word

X0 = 1
X1 = 2


def _reduce_pair(dom, ran):
    while True:
        dc = trees.caret_leaf_indices(dom)
        if not dc:
            break
        rc = trees.caret_leaf_indices(ran)
        common = dc.keys() & rc.keys()
        if not common:
            break
        i = min(common)
        dom = trees.replace_at(dom, dc[i], LEAF)
        ran = trees.replace_at(ran, rc[i], LEAF)
    return dom, ran


class TreePair:
    """Reduced tree-pair diagram; the canonical form of an F element."""

    __slots__ = ("domain", "range", "_nleaves", "_hash")

    def __init__(self, domain, range_, *, _reduced=False):
        if not _reduced:
            nd, nr = trees.num_leaves(domain), trees.num_leaves(range_)
            if nd != nr:
                raise ValueError(f"leaf counts differ: {nd} vs {nr}")
            domain, range_ = _reduce_pair(domain, range_)
        self.domain = domain
        self.range = range_
        self._nleaves = None
        self._hash = None

    @classmethod
    def identity(cls) -> "TreePair":
        return cls(LEAF, LEAF, _reduced=True)

    @property
    def is_identity(self) -> bool:
        return self.domain == LEAF and self.range == LEAF

    @property
    def num_leaves(self) -> int:
        if self._nleaves is None:
            self._nleaves = trees.num_leaves(self.domain)
        return self._nleaves

    def __eq__(self, other):
        if not isinstance(other, TreePair):
            return NotImplemented
        return self.domain == other.domain and self.range == other.range

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.domain, self.range))
        return self._hash

    def __mul__(self, other: "TreePair") -> "TreePair":
        """self after other: common-refinement composition."""
        if not isinstance(other, TreePair):
            return NotImplemented
        refined = trees.join(other.range, self.domain)
        taus = trees.subtrees_at_leaves(other.range, refined)
        sigmas = trees.subtrees_at_leaves(self.domain, refined)
        new_dom = trees.attach(other.domain, taus)
        new_ran = trees.attach(self.range, sigmas)
        return TreePair(new_dom, new_ran)

    def inverse(self) -> "TreePair":
        return TreePair(self.range, self.domain, _reduced=True)

    def __pow__(self, n: int) -> "TreePair":
        if n < 0:
            return self.inverse() ** (-n)
        result = TreePair.identity()
        for _ in range(n):
            result = result * self
        return result

    def __repr__(self):
        return f"TreePair({self.domain!r}, {self.range!r})"

    # -- PL map conversions ---------------------------------------------------

    def to_interval_map(self) -> IntervalMap:
        dp = trees.partition_points(self.domain)
        rp = trees.partition_points(self.range)
        return IntervalMap(tuple(zip(dp, rp)))

    @classmethod
    def from_interval_map(cls, f: IntervalMap) -> "TreePair":
        from bisect import bisect_left, bisect_right

        xs = [v[0] for v in f.vertices]

        def standard(lo: Dyadic, hi: Dyadic) -> bool:
            width = hi - lo
            odd, k = width.two_adic()
            if odd != 1:
                return False
            if lo.num == 0:
                return True
            _, v = lo.two_adic()
            return v >= k

        # lo_i..hi_i bounds the indices of breakpoints strictly inside (a, b)
        def build(a: Dyadic, b: Dyadic, fa: Dyadic, fb: Dyadic, lo_i: int, hi_i: int):
            if lo_i >= hi_i and standard(fa, fb):
                return LEAF
            mid = (a + b).half()
            if lo_i >= hi_i:
                fmid = (fa + fb).half()
            else:
                fmid = f._eval_core(mid)
            split_l = bisect_left(xs, mid, lo_i, hi_i)
            split_r = bisect_right(xs, mid, lo_i, hi_i)
            return (build(a, mid, fa, fmid, lo_i, split_l),
                    build(mid, b, fmid, fb, split_r, hi_i))

        dom = build(Dyadic(0), Dyadic(1), Dyadic(0), Dyadic(1), 1, len(xs) - 1)
        dp = trees.partition_points(dom)
        rp = [f.evaluate(p) for p in dp]
        ran = trees.tree_of_partition(rp)
        return cls(dom, ran)

    def to_line_map(self):
        return phi_to_line(self.to_interval_map())

    @classmethod
    def from_line_map(cls, g) -> "TreePair":
        return cls.from_interval_map(phi_from_line(g))

    def normal_form(self) -> "NormalForm":
        pos = _tree_exponents(self.range)
        neg = _tree_exponents(self.domain)
        return NormalForm(pos, neg)


def _tree_exponents(tree) -> tuple[tuple[int, int], ...]:
    """Nonzero leaf exponents of a tree as (index, exponent) pairs, ascending."""
    total = trees.num_leaves(tree)
    exps: dict[int, int] = {}

    def walk(t, start: int) -> int:
        if not t:
            return 1
        nl = walk(t[0], start)
        nr = walk(t[1], start + nl)
        if start + nl + nr - 1 != total - 1:
            exps[start] = exps.get(start, 0) + 1
        return nl + nr

    walk(tree, 0)
    return tuple(sorted(exps.items()))


class NormalForm:
    """Unique positive/negative factorization of an F element.

    ``pos`` lists (index, exponent >= 1) pairs with strictly increasing
    indices for the prefix x_{i1}^{r1}...; ``neg`` lists the suffix factors
    x_{j}^{-s}, also stored ascending although they are applied (and printed,
    and serialized) with indices descending.
    """

    __slots__ = ("pos", "neg")

    def __init__(self, pos, neg):
        self.pos = tuple((int(i), int(r)) for i, r in pos)
        self.neg = tuple((int(j), int(s)) for j, s in neg)

    def __eq__(self, other):
        if not isinstance(other, NormalForm):
            return NotImplemented
        return self.pos == other.pos and self.neg == other.neg

    def __hash__(self):
        return hash((self.pos, self.neg))

    @property
    def is_identity(self) -> bool:
        return not self.pos and not self.neg

    def validate(self) -> None:
        for part in (self.pos, self.neg):
            last = -1
            for i, r in part:
                if i <= last or r < 1:
                    raise DecodeError("normal form indices/exponents out of order")
                last = i
        pos_idx = {i for i, _ in self.pos}
        neg_idx = {j for j, _ in self.neg}
        for t in pos_idx & neg_idx:
            if t + 1 not in pos_idx and t + 1 not in neg_idx:
                raise DecodeError("normal form violates the uniqueness condition")

    def to_word(self) -> tuple[int, ...]:
        """Word over x0, x1 only, expanding x_i = x0^-(i-1) x1 x0^(i-1)."""
        word: list[int] = []
        for i, r in self.pos:
            word.extend(_expand(i, r))
        for j, s in reversed(self.neg):
            word.extend(invert_word(_expand(j, s)))
        return free_reduce(word)

    def to_element(self) -> TreePair:
        """Rebuild the reduced tree pair by inverting the leaf-exponent map.

        Linear in the size of the diagram: both trees are reconstructed
        from their exponent sequences over the smallest leaf count that
        realizes each factor, and the pair constructor re-reduces, which is
        a no-op exactly when the normal form is canonical.
        """
        n = max(_minimal_leaf_index(self.pos), _minimal_leaf_index(self.neg))
        dom = _tree_from_exponents(dict(self.neg), n)
        ran = _tree_from_exponents(dict(self.pos), n)
        return TreePair(dom, ran)

    def to_line_map(self) -> LineMap:
        return self.to_element().to_line_map()

    def __repr__(self):
        def side(part, sign):
            return " ".join(f"x{i}^{sign * r}" for i, r in part)

        if self.is_identity:
            return "NormalForm(1)"
        chunks = [side(self.pos, 1), side(tuple(reversed(self.neg)), -1)]
        return f"NormalForm({' '.join(c for c in chunks if c)})"

    # -- byte encoding: used by the extension's canonical serialization -------

    def append_to(self, buf: bytearray) -> None:
        append_uvarint(buf, len(self.pos))
        for i, r in self.pos:
            append_uvarint(buf, i)
            append_svarint(buf, r)
        append_uvarint(buf, len(self.neg))
        for j, s in self.neg:
            append_uvarint(buf, j)
            append_svarint(buf, -s)

    @classmethod
    def read_from(cls, data: bytes, pos: int) -> tuple["NormalForm", int]:
        npos, pos = read_uvarint(data, pos)
        pos_part = []
        for _ in range(npos):
            i, pos = read_uvarint(data, pos)
            r, pos = read_svarint(data, pos)
            if r < 1:
                raise DecodeError("positive part needs exponent >= 1")
            pos_part.append((i, r))
        nneg, pos = read_uvarint(data, pos)
        neg_part = []
        for _ in range(nneg):
            j, pos = read_uvarint(data, pos)
            s, pos = read_svarint(data, pos)
            if s > -1:
                raise DecodeError("negative part needs exponent <= -1")
            neg_part.append((j, -s))
        nf = cls(pos_part, neg_part)
        nf.validate()
        return nf, pos


def _expand(i: int, r: int) -> tuple[int, ...]:
    """x_i^r over the letters x0, x1."""
    if i == 0:
        return (X0,) * r
    if i == 1:
        return (X1,) * r
    conj = (-X0,) * (i - 1)
    return conj + (X1,) * r + tuple(-l for l in conj)


def _minimal_leaf_index(entries) -> int:
    """Smallest n so that a tree with n+1 leaves realizes the exponents.

    A caret chain of length c at leaf k needs c subtrees to its right plus
    one more so the chain stays off the right spine: n >= k + 1 + sum of
    exponents at indices >= k.
    """
    n = 0
    suffix = 0
    for k, c in sorted(entries, key=lambda e: -e[0]):
        suffix += c
        need = k + 1 + suffix
        if need > n:
            n = need
    return n


def _tree_from_exponents(exps: dict[int, int], n: int):
    """Inverse of the leaf-exponent map: the tree with the given exponents.

    Scans leaves right to left keeping the forest of completed subtrees;
    leaf k is wrapped into exps[k] carets eating forest trees, and whatever
    remains is combed up the right spine.
    """
    from collections import deque

    forest: deque = deque()
    for k in range(n, -1, -1):
        t = LEAF
        c = exps.get(k, 0)
        for _ in range(c):
            if not forest:
                raise DecodeError("exponent sequence does not describe a tree")
            t = (t, forest.popleft())
        if c and not forest:
            raise DecodeError("caret chain may not reach the right spine")
        forest.appendleft(t)
    while len(forest) > 1:
        r = forest.pop()
        l = forest.pop()
        forest.append((l, r))
    return forest[0]


def generator_pair(i: int) -> TreePair:
    """The generator x_i as a reduced tree pair."""
    return generator_power(i, 1)


def generator_power(i: int, r: int) -> TreePair:
    """x_i^r directly: combs of depth r hung under i right carets."""
    if i < 0 or r < 1:
        raise ValueError("generator_power needs i >= 0, r >= 1")
    right_comb = LEAF
    left_comb = LEAF
    for _ in range(r + 1):
        right_comb = (LEAF, right_comb)
        left_comb = (left_comb, LEAF)
    dom, ran = right_comb, left_comb
    for _ in range(i):
        dom = (LEAF, dom)
        ran = (LEAF, ran)
    return TreePair(dom, ran, _reduced=True)


def word_to_element(word: Iterable[int]) -> TreePair:
    """Product of generator letters, leftmost letter applied last."""
    out = TreePair.identity()
    for letter in word:
        if letter == 0:
            raise ValueError("0 is not a letter")
        g = generator_pair(abs(letter) - 1)
        out = out * (g if letter > 0 else g.inverse())
    return out


def is_identity(word: Iterable[int]) -> bool:
    """Word problem for F: does the word represent 1?"""
    return word_to_element(word).is_identity


# -- growth -------------------------------------------------------------------


def growth_series(n: int, generator_words: Sequence[Sequence[int]],
                  budget: int = 10_000_000) -> list[int]:
    """Ball sizes gamma(0..n) over the given generators and their inverses.

    Breadth-first search over canonical forms; deterministic.  Raises
    ResourceLimitError when the ball exceeds ``budget`` elements.
    """
    gens = []
    for w in generator_words:
        g = word_to_element(w)
        for h in (g, g.inverse()):
            if h not in gens:
                gens.append(h)
    ball = {TreePair.identity()}
    frontier = [TreePair.identity()]
    series = [1]
    for _ in range(n):
        new = []
        for g in frontier:
            for s in gens:
                h = g * s
                if h not in ball:
                    ball.add(h)
                    new.append(h)
                    if len(ball) > budget:
                        raise ResourceLimitError(f"growth ball exceeds {budget} elements")
        frontier = new
        series.append(len(ball))
    return series


def growth_count(n: int, generator_words: Sequence[Sequence[int]],
                 budget: int = 10_000_000) -> int:
    return growth_series(n, generator_words, budget)[-1]


# The two defining relators of the finite presentation of F on x0, x1:
# [x0 x1^-1, x0^-1 x1 x0] and [x0 x1^-1, x0^-2 x1 x0^2].
def presentation_relators() -> tuple[tuple[int, ...], tuple[int, ...]]:
    from .words import commutator_word

    u = (X0, -X1)
    v1 = (-X0, X1, X0)
    v2 = (-X0, -X0, X1, X0, X0)
    return commutator_word(u, v1), commutator_word(u, v2)
