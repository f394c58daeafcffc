"""Orientation-preserving automorphisms of F as eventually-periodic line maps.

An AutFMap is a PL2 homeomorphism a of the real line with a(x+1) = a(x) + 1
outside an integer window [N, M]: stored as a vertex list spanning
[N-1, M+1], whose restriction to [N-1, N] (resp. [M, M+1]) is the template
one period of the left (resp. right) tail.  Conjugation by such maps carries
F (as line maps with integer translation tails) to itself, which is how the
automorphism action is computed.

``beta_project`` reads the two tails modulo Z as circle maps, giving the
projection onto T x T whose kernel is exactly the embedded copy of F;
``lift`` inverts it by splicing periodic lifts of the two circle maps onto
the identity with canonical interpolations.  Windows are normalized to the
smallest one outside which the map is exactly tail-periodic (pure
translations anchor at [0, 0]), so equality is equality of data.

Composition and inversion unroll the periodic extensions over the exact
range needed and run a single monotone merge, carrying per-segment slope
exponents through so nothing is ever refactored into powers of two twice.
"""

from __future__ import annotations

from bisect import bisect_right
from functools import lru_cache

from .dyadic import Dyadic, ONE, ZERO
from .errors import InternalConsistencyError, NotPL2Error
from .groupf import TreePair
from .groupt import TElement, derived_generators
from .plmap import (CircleMap, LineMap, Vertex, interpolate, merge_collinear,
                    segment_slopes, slope_exponent)

_D = Dyadic


def _eval_at(xs, verts, slopes, x: Dyadic) -> Dyadic:
    i = bisect_right(xs, x) - 1
    if i >= len(xs) - 1:
        return verts[-1][1]
    vx, vy = verts[i]
    return vy + (x - vx).mul_pow2(slopes[i])


def _compose_merge(g_verts, g_slopes, f_verts, f_slopes):
    """Merged vertex/slope data of x |-> f(g(x)) over g's span.

    ``f_verts`` must cover [g(first), g(last)].  Output is collinear-merged:
    consecutive slopes differ.
    """
    pairs = []  # (x, g(x), index of g segment starting at x)
    fi = 0
    nf = len(f_verts)
    last_seg = len(g_verts) - 2
    for i in range(len(g_verts) - 1):
        x0, y0 = g_verts[i]
        y1 = g_verts[i + 1][1]
        pairs.append((x0, y0, i))
        while fi + 1 < nf and f_verts[fi + 1][0] <= y0:
            fi += 1
        j = fi
        neg_k = -g_slopes[i]
        while j + 1 < nf and f_verts[j + 1][0] < y1:
            yb = f_verts[j + 1][0]
            if yb > y0:
                pairs.append((x0 + (yb - y0).mul_pow2(neg_k), yb, i))
            j += 1
    out_v = []
    out_s = []
    fj = 0
    top = nf - 1
    prev_slope = None
    for x, gx, gi in pairs:
        while fj + 1 < top and f_verts[fj + 1][0] <= gx:
            fj += 1
        s = g_slopes[gi] + f_slopes[fj]
        if s == prev_slope:
            continue
        fx0, fy0 = f_verts[fj]
        out_v.append((x, fy0 + (gx - fx0).mul_pow2(f_slopes[fj])))
        out_s.append(s)
        prev_slope = s
    x, gx = g_verts[-1]
    while fj + 1 < top and f_verts[fj + 1][0] <= gx:
        fj += 1
    fx0, fy0 = f_verts[fj]
    out_v.append((x, fy0 + (gx - fx0).mul_pow2(f_slopes[fj])))
    return out_v, out_s


class AutFMap:
    """Eventually-periodic PL2 line homeomorphism in canonical window form."""

    __slots__ = ("vertices", "window_lo", "window_hi", "_xs", "_ys", "_slopes", "_hash")

    def __init__(self, vertices, window_lo: int, window_hi: int):
        verts = merge_collinear(tuple(
            (x if isinstance(x, Dyadic) else _D(x), y if isinstance(y, Dyadic) else _D(y))
            for x, y in vertices))
        if window_lo > window_hi:
            raise NotPL2Error("window is empty")
        if verts[0][0] != _D(window_lo - 1) or verts[-1][0] != _D(window_hi + 1):
            raise NotPL2Error("vertex data must span [window_lo - 1, window_hi + 1]")
        slopes = segment_slopes(verts)
        xs = [v[0] for v in verts]
        a_lo = _eval_at(xs, verts, slopes, _D(window_lo))
        a_hi = _eval_at(xs, verts, slopes, _D(window_hi))
        if a_lo - verts[0][1] != ONE:
            raise NotPL2Error("left tail template does not advance by 1")
        if verts[-1][1] - a_hi != ONE:
            raise NotPL2Error("right tail template does not advance by 1")
        self._normalize(list(verts), slopes, window_lo, window_hi)

    @classmethod
    def _from_merged(cls, verts, slopes, window_lo: int, window_hi: int) -> "AutFMap":
        """Trusted: collinear-merged data spanning the window, seams valid."""
        m = cls.__new__(cls)
        m._normalize(verts, slopes, window_lo, window_hi)
        return m

    @classmethod
    def _raw_canonical(cls, verts, slopes, window_lo: int, window_hi: int) -> "AutFMap":
        """Trusted: fully canonical data including anchors; stored as-is."""
        m = cls.__new__(cls)
        m.vertices = tuple(verts)
        m.window_lo = window_lo
        m.window_hi = window_hi
        m._xs = [v[0] for v in m.vertices]
        m._ys = [v[1] for v in m.vertices]
        m._slopes = list(slopes)
        m._hash = None
        return m

    def _normalize(self, verts, slopes, lo: int, hi: int) -> None:
        xs = [v[0] for v in verts]

        def ev(p: Dyadic) -> Dyadic:
            return _eval_at(xs, verts, slopes, p)

        def unit_slice(p: int):
            a, b = _D(p), _D(p + 1)
            pts = [(a, ev(a))]
            i = bisect_right(xs, a)
            while i < len(xs) and xs[i] < b:
                pts.append(verts[i])
                i += 1
            pts.append((b, ev(b)))
            return merge_collinear(tuple(pts))

        def shifted(sl):
            return tuple((x + 1, y + 1) for x, y in sl)

        left, right = lo, hi
        while left < right and shifted(unit_slice(left - 1)) == unit_slice(left):
            left += 1
        while right > left and shifted(unit_slice(right - 1)) == unit_slice(right):
            right -= 1
        if left == right and shifted(unit_slice(left - 1)) == unit_slice(left):
            # fully periodic: canonical window is [0, 0]
            d = _D(left)
            base = [(x - d, y - d) for x, y in unit_slice(left - 1)]
            nxt = [(x + 1, y + 1) for x, y in base[1:]]
            merged = merge_collinear(tuple(base + nxt))
            verts = list(merged)
            xs = [v[0] for v in verts]
            slopes = segment_slopes(verts)
            left = right = 0
        a, b = _D(left - 1), _D(right + 1)
        keyed = {v[0]: v for v in verts if a < v[0] < b}
        for p in (left - 1, left, right, right + 1):
            dp = _D(p)
            if dp not in keyed:
                keyed[dp] = (dp, _eval_at(xs, verts, slopes, dp))
        out = tuple(sorted(keyed.values(), key=lambda v: v[0]))
        self.vertices = out
        self.window_lo = left
        self.window_hi = right
        self._xs = [v[0] for v in out]
        self._ys = [v[1] for v in out]
        self._slopes = segment_slopes(out)
        self._hash = None

    # -- structure -------------------------------------------------------------

    @classmethod
    def identity(cls) -> "AutFMap":
        return cls._raw_canonical(
            ((_D(-1), _D(-1)), (ZERO, ZERO), (ONE, ONE)), [0, 0], 0, 0)

    @classmethod
    def from_line(cls, line: LineMap) -> "AutFMap":
        """View an F element (translation tails) as an automorphism; canonical."""
        if line.is_translation:
            c = line.vertices[0][1]
            return cls._raw_canonical(
                ((_D(-1), c - 1), (ZERO, c), (ONE, c + 1)), [0, 0], 0, 0)
        lo, hi = line.window
        l, k = line.left_offset, line.right_offset
        verts = ((_D(lo - 1), _D(lo - 1 + l)),) + line.vertices + ((_D(hi + 1), _D(hi + 1 + k)),)
        slopes = [0] + line._slopes + [0]
        return cls._raw_canonical(verts, slopes, lo, hi)

    @property
    def is_identity(self) -> bool:
        return (self.window_lo == 0 == self.window_hi and len(self.vertices) == 3
                and self.vertices[1] == (ZERO, ZERO) and self._slopes[0] == 0)

    def __eq__(self, other):
        if not isinstance(other, AutFMap):
            return NotImplemented
        return (self.window_lo == other.window_lo and self.window_hi == other.window_hi
                and self.vertices == other.vertices)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.window_lo, self.window_hi, self.vertices))
        return self._hash

    def __repr__(self):
        pts = ", ".join(f"({x},{y})" for x, y in self.vertices)
        return f"AutFMap[{self.window_lo},{self.window_hi}]([{pts}])"

    # -- evaluation --------------------------------------------------------------

    def evaluate(self, x) -> Dyadic:
        x = x if isinstance(x, Dyadic) else _D(x)
        lo = self.vertices[0][0]
        hi = self.vertices[-1][0]
        if x < lo:
            k = (lo - x).ceil()
            return _eval_at(self._xs, self.vertices, self._slopes, x + k) - k
        if x > hi:
            k = (x - hi).ceil()
            return _eval_at(self._xs, self.vertices, self._slopes, x - k) + k
        return _eval_at(self._xs, self.vertices, self._slopes, x)

    def evaluate_inverse(self, y) -> Dyadic:
        y = y if isinstance(y, Dyadic) else _D(y)
        lo = self.vertices[0][1]
        hi = self.vertices[-1][1]
        shift = 0
        if y < lo:
            shift = (lo - y).ceil()
        elif y > hi:
            shift = -(y - hi).ceil()
        yy = y + shift
        i = bisect_right(self._ys, yy) - 1
        if i >= len(self._ys) - 1:
            return self.vertices[-1][0] - shift
        vx, vy = self.vertices[i]
        return vx + (yy - vy).mul_pow2(-self._slopes[i]) - shift

    def unroll(self, a: Dyadic, b: Dyadic):
        """Vertex/slope data of the periodic extension covering exactly [a, b]."""
        verts = self.vertices
        slopes = self._slopes
        lo_d = _D(self.window_lo)
        hi_d = _D(self.window_hi)
        out_v = []
        out_s = []
        first_x = verts[0][0]
        if a < first_x:
            p = bisect_right(self._xs, lo_d) - 1  # index of window_lo vertex
            tmpl_v = verts[:p + 1]
            tmpl_s = slopes[:p + 1]
            k = (first_x - a).ceil()
            while k >= 1:
                dk = _D(k)
                out_v.extend((x - dk, y - dk) for x, y in tmpl_v[:-1])
                out_s.extend(tmpl_s[:len(tmpl_v) - 1])
                k -= 1
        out_v.extend(verts[:-1])
        out_s.extend(slopes)
        out_v.append(verts[-1])
        last_x = verts[-1][0]
        if b > last_x:
            q = bisect_right(self._xs, hi_d) - 1  # index of window_hi vertex
            tmpl_v = verts[q:]
            tmpl_s = slopes[q:]
            k = 1
            kmax = (b - last_x).ceil()
            while k <= kmax:
                dk = _D(k)
                out_v.extend((x + dk, y + dk) for x, y in tmpl_v[1:])
                out_s.extend(tmpl_s)
                k += 1
        # clip to [a, b] exactly
        i = 0
        while out_v[i + 1][0] <= a:
            i += 1
        j = len(out_v) - 1
        while out_v[j - 1][0] >= b:
            j -= 1
        out_v = out_v[i:j + 1]
        out_s = out_s[i:j]
        if out_v[0][0] < a:
            vx, vy = out_v[0]
            out_v[0] = (a, vy + (a - vx).mul_pow2(out_s[0]))
        if out_v[-1][0] > b:
            vx, vy = out_v[-2]
            out_v[-1] = (b, vy + (b - vx).mul_pow2(out_s[-1]))
        return out_v, out_s

    # -- group operations ----------------------------------------------------------

    def compose(self, other: "AutFMap") -> "AutFMap":
        """self after other."""
        n_s, m_s = self.window_lo, self.window_hi
        n_t, m_t = other.window_lo, other.window_hi
        lo = min(n_t, other.evaluate_inverse(_D(n_s - 1)).floor() + 1)
        hi = max(m_t, other.evaluate_inverse(_D(m_s)).ceil())
        if lo > hi:
            lo = hi
        g_verts, g_slopes = other.unroll(_D(lo - 1), _D(hi + 1))
        f_verts, f_slopes = self.unroll(g_verts[0][1], g_verts[-1][1])
        verts, slopes = _compose_merge(g_verts, g_slopes, f_verts, f_slopes)
        return AutFMap._from_merged(verts, slopes, lo, hi)

    def __mul__(self, other):
        if not isinstance(other, AutFMap):
            return NotImplemented
        return self.compose(other)

    def inverse(self) -> "AutFMap":
        lo = self.evaluate(_D(self.window_lo)).floor()
        hi = self.evaluate(_D(self.window_hi)).ceil()
        if lo > hi:
            lo = hi
        xa = self.evaluate_inverse(_D(lo - 1))
        xb = self.evaluate_inverse(_D(hi + 1))
        src_v, src_s = self.unroll(xa, xb)
        # unrolled copies can be collinear across template seams: re-merge
        inv_v = [(src_v[0][1], src_v[0][0]), (src_v[1][1], src_v[1][0])]
        inv_s = [-src_s[0]]
        for i in range(1, len(src_s)):
            s = -src_s[i]
            v = (src_v[i + 1][1], src_v[i + 1][0])
            if s == inv_s[-1]:
                inv_v[-1] = v
            else:
                inv_v.append(v)
                inv_s.append(s)
        return AutFMap._from_merged(inv_v, inv_s, lo, hi)

    # -- F specifics ------------------------------------------------------------

    def to_line(self) -> LineMap:
        """Read back a LineMap; valid only when both tails are translations."""
        lo, hi = self.window_lo, self.window_hi
        lo_d, hi_d = _D(lo), _D(hi)
        i_lo = bisect_right(self._xs, lo_d) - 1
        i_hi = bisect_right(self._xs, hi_d) - 1
        if (i_lo != 1 or i_hi != len(self.vertices) - 2
                or self._slopes[0] != 0 or self._slopes[-1] != 0
                or not (self.vertices[0][1] - self.vertices[0][0]).is_integer()
                or not (self.vertices[-1][1] - self.vertices[-1][0]).is_integer()):
            raise InternalConsistencyError("map is not in the image of F")
        core = self.vertices[1:-1]
        if len(core) == 1:
            return LineMap._raw(((ZERO, core[0][1] - core[0][0]),))
        return LineMap._from_merged(core, self._slopes[1:-1])

    def __call__(self, x):
        return self.evaluate(x)


def _line_cover(line: LineMap, a: Dyadic, b: Dyadic):
    """Vertex/slope data of a LineMap covering exactly [a, b]."""
    verts = list(line.vertices)
    slopes = list(line._slopes)
    if len(verts) == 1:
        off = verts[0][1] - verts[0][0]
        return [(a, a + off), (b, b + off)], [0]
    if verts[0][0] < a:
        i = 0
        while i + 1 < len(verts) and verts[i + 1][0] <= a:
            i += 1
        verts = verts[i:]
        slopes = slopes[i:]
        if verts[0][0] < a:
            verts[0] = (a, verts[0][1] + (a - verts[0][0]).mul_pow2(slopes[0]))
    elif verts[0][0] > a:
        verts.insert(0, (a, a + line.left_offset))
        slopes.insert(0, 0)
    if verts[-1][0] > b:
        j = len(verts) - 1
        while j - 1 >= 0 and verts[j - 1][0] >= b:
            j -= 1
        verts = verts[:j + 1]
        slopes = slopes[:j]
        if verts[-1][0] > b:
            verts[-1] = (b, verts[-2][1] + (b - verts[-2][0]).mul_pow2(slopes[-1]))
    elif verts[-1][0] < b:
        verts.append((b, b + line.right_offset))
        slopes.append(0)
    return verts, slopes


def conjugate_line(front: AutFMap, back: AutFMap, fline: LineMap) -> LineMap:
    """front o fline o back in one fused pass; the result must lie in F.

    Used for the automorphism action theta, where front and back are a
    composite automorphism and its inverse: the three-stage composition is
    merged without constructing intermediate window-normalized maps.
    """
    n2, m2 = fline.window
    lo = min(back.window_lo, back.evaluate_inverse(_D(n2 - 1)).floor() + 1)
    hi = max(back.window_hi, back.evaluate_inverse(_D(m2)).ceil())
    lo = min(lo, back.evaluate_inverse(
        fline.evaluate_inverse(_D(front.window_lo - 1))).floor() + 1)
    hi = max(hi, back.evaluate_inverse(
        fline.evaluate_inverse(_D(front.window_hi))).ceil())
    if lo >= hi:
        # the composite is a pure translation
        val = front.evaluate(fline.evaluate(back.evaluate(_D(lo))))
        return LineMap.translation((val - lo).num)
    g_v, g_s = back.unroll(_D(lo), _D(hi))
    m_v, m_s = _line_cover(fline, g_v[0][1], g_v[-1][1])
    h_v, h_s = _compose_merge(g_v, g_s, m_v, m_s)
    f_v, f_s = front.unroll(h_v[0][1], h_v[-1][1])
    o_v, o_s = _compose_merge(h_v, h_s, f_v, f_s)
    return LineMap._from_merged(o_v, o_s)


def embed_f(p: TreePair) -> AutFMap:
    """The inclusion F -> Aut+(F): an F element acting by conjugation."""
    return AutFMap.from_line(p.to_line_map())


def to_f(a: AutFMap) -> TreePair:
    """Inverse of ``embed_f`` on the kernel of beta."""
    return TreePair.from_line_map(a.to_line())


def act_on_f(s: AutFMap, f: TreePair) -> TreePair:
    """The automorphism action: s^-1 o f o s, back in tree-pair form."""
    conj = s.inverse() * embed_f(f) * s
    return to_f(conj)


def beta_project(a: AutFMap) -> tuple[TElement, TElement]:
    """Tails modulo Z: the projection Aut+(F) -> T x T."""
    lo, hi = a.window_lo, a.window_hi
    d = _D(lo - 1)
    left = tuple((x - d, y - d) for x, y in a.vertices if x <= _D(lo))
    dh = _D(hi)
    right = tuple((x - dh, y - dh) for x, y in a.vertices if x >= dh)
    return (TElement.from_circle_map(CircleMap(left)),
            TElement.from_circle_map(CircleMap(right)))


def lift(t_minus: TElement, t_plus: TElement) -> AutFMap:
    """An AutFMap with beta_project equal to (t_minus, t_plus).

    Splices the periodic lifts onto the identity: the map is the extended
    lift of t_minus on (-inf, -1], interpolates [-1,0] onto [lift(-1), 0],
    is the identity on [0,1], interpolates [1,2] onto [1, lift(2)], and is
    the extended lift of t_plus on [2, inf).
    """
    lm = t_minus.to_circle_map()
    lp = t_plus.to_circle_map()
    cm = lm.vertices[0][1]
    cp = lp.vertices[0][1]
    two = _D(2)
    pieces: list[Vertex] = []
    pieces.extend((x - two, y - two) for x, y in lm.vertices)          # [-2, -1]
    pieces.extend(interpolate(_D(-1), ZERO, cm - 1, ZERO))             # [-1, 0]
    pieces.append((ONE, ONE))                                          # [0, 1] identity
    pieces.extend(interpolate(ONE, two, ONE, cp + 2))                  # [1, 2]
    pieces.extend((x + two, y + two) for x, y in lp.vertices)          # [2, 3]
    dedup: dict = {}
    for x, y in pieces:
        if x in dedup and dedup[x][1] != y:
            raise InternalConsistencyError("lift pieces disagree at a junction")
        dedup.setdefault(x, (x, y))
    verts = tuple(sorted(dedup.values(), key=lambda v: v[0]))
    return AutFMap(verts, -1, 2)


@lru_cache(maxsize=1)
def hat_generators() -> tuple[AutFMap, AutFMap, AutFMap, AutFMap]:
    """Lifts of ((a,1), (b,1), (1,c), (1,d)) for the derived free generators."""
    a, b, c, d = derived_generators()
    one = TElement.identity()
    return lift(a, one), lift(b, one), lift(one, c), lift(one, d)
