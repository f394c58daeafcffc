"""Piecewise-linear homeomorphisms with dyadic breakpoints and power-of-2 slopes.

Three carriers, one calculus:

* ``IntervalMap``  -- PL bijections of [0,1] fixing the endpoints.
* ``LineMap``      -- PL bijections of the real line that are integer
  translations x + l / x + k outside an integer window [N, M].
* ``CircleMap``    -- degree-1 lifts of PL circle maps: data on [0,1] with
  f(1) = f(0) + 1 and f(0) in [0,1).

All maps are stored as vertex lists ((x0,y0), ..., (xn,yn)) in normalized
form (no two adjacent segments share a slope) with per-segment slope
exponents cached, so equality of maps is equality of data and evaluation is
a bisect plus one affine step.  ``phi`` / ``phi_inv`` give the fixed PL
bijection R -> (0,1) used to conjugate interval maps to line maps, and
``interpolate`` produces a canonical PL map between arbitrary dyadic
intervals.
"""

from __future__ import annotations

from bisect import bisect_right

from .dyadic import Dyadic, HALF, ONE, ZERO
from .errors import DomainError, NotPL2Error

Vertex = tuple[Dyadic, Dyadic]


def _as_dyadic(v) -> Dyadic:
    if isinstance(v, Dyadic):
        return v
    if isinstance(v, int):
        return Dyadic(v)
    raise TypeError(f"expected Dyadic or int, got {type(v).__name__}")


def _coerce_vertices(vertices) -> tuple[Vertex, ...]:
    return tuple((_as_dyadic(x), _as_dyadic(y)) for x, y in vertices)


def slope_exponent(p: Vertex, q: Vertex) -> int:
    """Exponent k with (q.y - p.y) = 2^k (q.x - p.x); both deltas must be > 0."""
    dx = q[0] - p[0]
    dy = q[1] - p[1]
    if dx.num <= 0 or dy.num <= 0:
        raise NotPL2Error(f"segment {p} -> {q} is not strictly increasing")
    nx, ny = dx.num, dy.num
    kx = (nx & -nx).bit_length() - 1 - dx.exp
    ky = (ny & -ny).bit_length() - 1 - dy.exp
    if nx >> (kx + dx.exp) != ny >> (ky + dy.exp):
        raise NotPL2Error(f"segment {p} -> {q} has slope {dy}/{dx}, not a power of 2")
    return ky - kx


def segment_slopes(verts) -> list[int]:
    return [slope_exponent(verts[i], verts[i + 1]) for i in range(len(verts) - 1)]


def merge_collinear(vertices) -> tuple[Vertex, ...]:
    """Drop interior vertices where the slope does not change (validates PL2)."""
    pts = [vertices[0]]
    for v in vertices[1:]:
        if v[0] == pts[-1][0]:
            if v[1] != pts[-1][1]:
                raise NotPL2Error("duplicate x with different values")
            continue
        pts.append(v)
    if len(pts) == 1:
        return (pts[0],)
    last = slope_exponent(pts[0], pts[1])
    out = [pts[0], pts[1]]
    for v in pts[2:]:
        s = slope_exponent(out[-1], v)
        if s == last:
            out[-1] = v
        else:
            out.append(v)
            last = s
    return tuple(out)


def compose_monotone(g_verts, g_slopes, f_verts, f_slopes) -> list[Vertex]:
    """Vertex data of x |-> f(g(x)) over g's span, by one monotone merge.

    ``f_verts`` must cover [g(first), g(last)].  The result contains g's
    endpoints and every candidate breakpoint, in order, unnormalized.
    """
    pairs: list[Vertex] = []  # (x, g(x)) at every candidate x
    fi = 0
    nf = len(f_verts)
    for i in range(len(g_verts) - 1):
        x0, y0 = g_verts[i]
        y1 = g_verts[i + 1][1]
        pairs.append((x0, y0))
        while fi + 1 < nf and f_verts[fi + 1][0] <= y0:
            fi += 1
        j = fi
        neg_k = -g_slopes[i]
        while j + 1 < nf and f_verts[j + 1][0] < y1:
            yb = f_verts[j + 1][0]
            if yb > y0:
                pairs.append((x0 + (yb - y0).mul_pow2(neg_k), yb))
            j += 1
    pairs.append(g_verts[-1])
    out: list[Vertex] = []
    fj = 0
    top = nf - 1
    for x, gx in pairs:
        while fj + 1 < top and f_verts[fj + 1][0] <= gx:
            fj += 1
        fx0, fy0 = f_verts[fj]
        out.append((x, fy0 + (gx - fx0).mul_pow2(f_slopes[fj])))
    return out


class _PLData:
    """Shared storage/equality for vertex-list maps."""

    __slots__ = ("vertices", "_xs", "_ys", "_slopes", "_hash")

    def _store(self, vertices: tuple[Vertex, ...]) -> None:
        self.vertices = vertices
        self._xs = [v[0] for v in vertices]
        self._ys = [v[1] for v in vertices]
        self._slopes = segment_slopes(vertices)
        self._hash = None

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.vertices == other.vertices

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self.vertices))
        return self._hash

    @property
    def breakpoints(self) -> tuple[Dyadic, ...]:
        return tuple(self._xs[1:-1])

    def _eval_core(self, x: Dyadic) -> Dyadic:
        i = bisect_right(self._xs, x) - 1
        if i >= len(self._xs) - 1:
            return self.vertices[-1][1]
        if i < 0:
            raise DomainError(f"{x} below map domain")
        vx, vy = self.vertices[i]
        return vy + (x - vx).mul_pow2(self._slopes[i])

    def _eval_core_inverse(self, y: Dyadic) -> Dyadic:
        i = bisect_right(self._ys, y) - 1
        if i >= len(self._ys) - 1:
            return self.vertices[-1][0]
        if i < 0:
            raise DomainError(f"{y} below map range")
        vx, vy = self.vertices[i]
        return vx + (y - vy).mul_pow2(-self._slopes[i])

    def __repr__(self):
        pts = ", ".join(f"({x},{y})" for x, y in self.vertices)
        return f"{type(self).__name__}([{pts}])"


class IntervalMap(_PLData):
    """PL2 bijection of [0,1] fixing 0 and 1."""

    __slots__ = ()

    def __init__(self, vertices):
        verts = merge_collinear(_coerce_vertices(vertices))
        if verts[0] != (ZERO, ZERO) or verts[-1] != (ONE, ONE):
            raise NotPL2Error("interval map must fix 0 and 1")
        self._store(verts)

    @classmethod
    def identity(cls) -> "IntervalMap":
        return cls(((ZERO, ZERO), (ONE, ONE)))

    @property
    def is_identity(self) -> bool:
        return len(self.vertices) == 2

    def evaluate(self, x) -> Dyadic:
        x = _as_dyadic(x)
        if x < 0 or x > 1:
            raise DomainError(f"{x} outside [0,1]")
        return self._eval_core(x)

    def evaluate_inverse(self, y) -> Dyadic:
        y = _as_dyadic(y)
        if y < 0 or y > 1:
            raise DomainError(f"{y} outside [0,1]")
        return self._eval_core_inverse(y)

    def compose(self, other: "IntervalMap") -> "IntervalMap":
        """self after other: (self * other)(x) = self(other(x))."""
        verts = compose_monotone(other.vertices, other._slopes, self.vertices, self._slopes)
        return IntervalMap(verts)

    def __mul__(self, other):
        if not isinstance(other, IntervalMap):
            return NotImplemented
        return self.compose(other)

    def inverse(self) -> "IntervalMap":
        return IntervalMap(tuple((y, x) for x, y in self.vertices))

    def slope_at_zero(self) -> int:
        return self._slopes[0]

    def slope_at_one(self) -> int:
        return self._slopes[-1]


class LineMap(_PLData):
    """PL2 bijection of R, equal to x + l left of N and x + k right of M.

    The stored vertex list spans exactly the minimal integer window [N, M];
    a pure translation is anchored at the single vertex (0, offset).
    """

    __slots__ = ()

    def __init__(self, vertices):
        verts = _coerce_vertices(vertices)
        if len(verts) > 1:
            verts = merge_collinear(verts)
        if len(verts) == 1:
            x0, y0 = verts[0]
            off = y0 - x0
            if not (x0.is_integer() and off.is_integer()):
                raise NotPL2Error("translation anchor must be integral")
            self._store(((ZERO, Dyadic(off.num)),))
            return
        first, last = verts[0], verts[-1]
        if not first[0].is_integer() or not last[0].is_integer():
            raise NotPL2Error("line map window endpoints must be integers")
        if not (first[1] - first[0]).is_integer() or not (last[1] - last[0]).is_integer():
            raise NotPL2Error("line map tail offsets must be integers")
        l_off = (first[1] - first[0]).num
        r_off = (last[1] - last[0]).num
        # genuine breakpoints: interior vertices, plus the window endpoints
        # when the slope actually changes across them (tail slope is 1)
        bps = list(verts[1:-1])
        if slope_exponent(verts[0], verts[1]) != 0:
            bps.insert(0, verts[0])
        if slope_exponent(verts[-2], verts[-1]) != 0:
            bps.append(verts[-1])
        if not bps:
            if l_off != r_off:
                raise NotPL2Error("discontinuous translation tails")
            self._store(((ZERO, Dyadic(l_off)),))
            return
        lo = bps[0][0].floor()
        hi = bps[-1][0].ceil()
        out = []
        if bps[0][0] != lo:
            out.append((Dyadic(lo), Dyadic(lo + l_off)))
        out.extend(bps)
        if bps[-1][0] != hi:
            out.append((Dyadic(hi), Dyadic(hi + r_off)))
        self._store(tuple(out))

    @classmethod
    def _raw(cls, vertices: tuple[Vertex, ...]) -> "LineMap":
        """Trusted constructor for data already in canonical form."""
        m = cls.__new__(cls)
        m._store(vertices)
        return m

    @classmethod
    def _from_merged(cls, verts, slopes) -> "LineMap":
        """Trusted: collinear-merged data with translation tails beyond its span."""
        if len(verts) == 1:
            x0, y0 = verts[0]
            off = y0 - x0
            if not off.is_integer():
                raise NotPL2Error("translation offset must be integral")
            return cls._raw(((ZERO, Dyadic(off.num)),))
        l_off = verts[0][1] - verts[0][0]
        r_off = verts[-1][1] - verts[-1][0]
        if not l_off.is_integer() or not r_off.is_integer():
            raise NotPL2Error("line map tail offsets must be integers")
        start = 1 if slopes[0] == 0 else 0
        end = len(verts) - (2 if slopes[-1] == 0 else 1)
        if start > end:
            return cls._raw(((ZERO, Dyadic(l_off.num)),))
        out = list(verts[start:end + 1])
        out_slopes = list(slopes[start:end])
        lo = out[0][0].floor()
        hi = out[-1][0].ceil()
        if out[0][0] != lo:
            out.insert(0, (Dyadic(lo), Dyadic(lo + l_off.num)))
            out_slopes.insert(0, 0)
        if out[-1][0] != hi:
            out.append((Dyadic(hi), Dyadic(hi + r_off.num)))
            out_slopes.append(0)
        m = cls.__new__(cls)
        m.vertices = tuple(out)
        m._xs = [v[0] for v in out]
        m._ys = [v[1] for v in out]
        m._slopes = out_slopes
        m._hash = None
        return m

    @classmethod
    def identity(cls) -> "LineMap":
        return cls._raw(((ZERO, ZERO),))

    @classmethod
    def translation(cls, offset: int) -> "LineMap":
        return cls._raw(((ZERO, Dyadic(offset)),))

    def _store(self, vertices):
        if len(vertices) == 1:
            self.vertices = vertices
            self._xs = [vertices[0][0]]
            self._ys = [vertices[0][1]]
            self._slopes = []
            self._hash = None
        else:
            super()._store(vertices)

    @property
    def is_identity(self) -> bool:
        return len(self.vertices) == 1 and self.vertices[0][1].num == 0

    @property
    def is_translation(self) -> bool:
        return len(self.vertices) == 1

    @property
    def window(self) -> tuple[int, int]:
        return self.vertices[0][0].num, self.vertices[-1][0].num

    @property
    def left_offset(self) -> int:
        v = self.vertices[0]
        return (v[1] - v[0]).num

    @property
    def right_offset(self) -> int:
        v = self.vertices[-1]
        return (v[1] - v[0]).num

    def evaluate(self, x) -> Dyadic:
        x = _as_dyadic(x)
        if x <= self.vertices[0][0]:
            return x + self.left_offset
        if x >= self.vertices[-1][0]:
            return x + self.right_offset
        return self._eval_core(x)

    def evaluate_inverse(self, y) -> Dyadic:
        y = _as_dyadic(y)
        if y <= self.vertices[0][1]:
            return y - self.left_offset
        if y >= self.vertices[-1][1]:
            return y - self.right_offset
        return self._eval_core_inverse(y)

    def compose(self, other: "LineMap") -> "LineMap":
        """self after other; tail offsets add."""
        if other.is_translation:
            c = other.left_offset
            if self.is_translation:
                return LineMap.translation(self.left_offset + c)
            if c == 0:
                return self
            d = Dyadic(c)
            return LineMap._raw(tuple((x - d, y) for x, y in self.vertices))
        if self.is_translation:
            c = self.left_offset
            if c == 0:
                return other
            d = Dyadic(c)
            return LineMap._raw(tuple((x, y + d) for x, y in other.vertices))
        n_s, m_s = self.window
        n_o, m_o = other.window
        lo = min(n_o, n_s - other.left_offset)
        hi = max(m_o, m_s - other.right_offset)
        if lo > hi:
            lo = hi
        dlo, dhi = Dyadic(lo), Dyadic(hi)
        g_verts = list(other.vertices)
        if g_verts[0][0] > dlo:
            g_verts.insert(0, (dlo, dlo + other.left_offset))
        if g_verts[-1][0] < dhi:
            g_verts.append((dhi, dhi + other.right_offset))
        ga, gb = g_verts[0][1], g_verts[-1][1]
        f_verts = list(self.vertices)
        if f_verts[0][0] > ga:
            f_verts.insert(0, (ga, ga + self.left_offset))
        if f_verts[-1][0] < gb:
            f_verts.append((gb, gb + self.right_offset))
        verts = compose_monotone(g_verts, segment_slopes(g_verts),
                                 f_verts, segment_slopes(f_verts))
        return LineMap(verts)

    def __mul__(self, other):
        if not isinstance(other, LineMap):
            return NotImplemented
        return self.compose(other)

    def inverse(self) -> "LineMap":
        if self.is_translation:
            return LineMap._raw(((ZERO, Dyadic(-self.left_offset)),))
        return LineMap(tuple((y, x) for x, y in self.vertices))


class CircleMap(_PLData):
    """Degree-1 lift of a PL2 circle map: data on [0,1], f(1) = f(0) + 1.

    Normalized so the stored value f(0) lies in [0,1).  The periodic
    extension f(x + n) = f(x) + n makes lifts composable and invertible.
    """

    __slots__ = ()

    def __init__(self, vertices):
        verts = merge_collinear(_coerce_vertices(vertices))
        if verts[0][0] != ZERO or verts[-1][0] != ONE:
            raise NotPL2Error("circle lift must span [0,1]")
        if verts[-1][1] - verts[0][1] != ONE:
            raise NotPL2Error("circle lift must have degree 1")
        shift = verts[0][1].floor()
        if shift:
            d = Dyadic(shift)
            verts = tuple((x, y - d) for x, y in verts)
        self._store(verts)

    @classmethod
    def identity(cls) -> "CircleMap":
        return cls(((ZERO, ZERO), (ONE, ONE)))

    @property
    def is_identity(self) -> bool:
        return len(self.vertices) == 2 and self.vertices[0][1].num == 0

    def evaluate(self, x) -> Dyadic:
        """Extended lift value at any dyadic x: f(x + n) = f(x) + n."""
        x = _as_dyadic(x)
        n = x.floor()
        if n == 0 and x.num >= 0:
            return self._eval_core(x)
        return self._eval_core(x - n) + n

    def evaluate_inverse(self, y) -> Dyadic:
        """Inverse of the extended lift at any dyadic y."""
        y = _as_dyadic(y)
        base = self.vertices[0][1]
        n = (y - base).floor()
        y0 = y - n
        if y0 == base + 1:
            n += 1
            y0 = base
        return self._eval_core_inverse(y0) + n

    def compose(self, other: "CircleMap") -> "CircleMap":
        """self after other, as lifts of circle maps."""
        cand = set(other._xs)
        lo = other.vertices[0][1]
        for bx in self._xs[:-1]:
            for shift in range(lo.floor() - 1, (lo + 1).ceil() + 2):
                y = bx + shift
                if lo <= y <= lo + 1:
                    cand.add(other.evaluate_inverse(y))
        xs = sorted(x for x in cand if ZERO <= x <= ONE)
        return CircleMap(tuple((x, self.evaluate(other.evaluate(x))) for x in xs))

    def __mul__(self, other):
        if not isinstance(other, CircleMap):
            return NotImplemented
        return self.compose(other)

    def inverse(self) -> "CircleMap":
        cand = {ZERO, ONE}
        for _, vy in self.vertices:
            f = vy - vy.floor()
            cand.add(f)
        xs = sorted(cand)
        return CircleMap(tuple((y, self.evaluate_inverse(y)) for y in xs))


# -- the conjugating bijection phi: R -> (0,1) --------------------------------
#
# phi is affine on each [n, n+1] with phi(n) = 1 - 2^(-n-1) for n >= 0 and
# phi(n) = 2^(n-1) for n <= 0 (so -1 |-> 1/4, 0 |-> 1/2, 1 |-> 3/4).  It is
# never materialized as a map object; the closed form is applied pointwise.
# Two identities are used throughout: phi(x+k) = 2^k phi(x) when x, x+k <= 0,
# and 1 - phi(x+k) = 2^(-k) (1 - phi(x)) when x, x+k >= 0.


def phi(x) -> Dyadic:
    x = _as_dyadic(x)
    if x >= 0:
        n = x.floor()
        return ONE - HALF.mul_pow2(-n) + (x - n).mul_pow2(-n - 2)
    n = x.ceil()
    return (x - n + 2).mul_pow2(n - 2)


def phi_inv(y) -> Dyadic:
    y = _as_dyadic(y)
    if y <= 0 or y >= 1:
        raise DomainError(f"phi_inv requires 0 < y < 1, got {y}")
    if y >= HALF:
        z = ONE - y
        odd, k = z.two_adic()
        n = -(k + odd.bit_length() - 1) - 2
        if n < 0:
            n = 0
        return Dyadic(n) + (y - ONE + HALF.mul_pow2(-n)).mul_pow2(n + 2)
    odd, k = y.two_adic()
    n = (k + odd.bit_length() - 1) + 2
    return Dyadic(n - 2) + y.mul_pow2(2 - n)


def phi_to_line(f: IntervalMap) -> LineMap:
    """Conjugate an interval map to the line: x |-> phi_inv(f(phi(x)))."""
    if f.is_identity:
        return LineMap.identity()
    l = f.slope_at_zero()
    k = f.slope_at_one()
    depth = max(max(x.exp, y.exp) for x, y in f.vertices)
    lo = min(0, -l, -depth - 1)
    hi = max(0, k, depth + 1)
    cand = {Dyadic(n) for n in range(lo, hi + 1)}
    for x, _ in f.vertices[1:-1]:
        cand.add(phi_inv(x))
    for n in range(lo + l, hi - k + 1):
        cand.add(phi_inv(f.evaluate_inverse(phi(Dyadic(n)))))
    xs = sorted(c for c in cand if Dyadic(lo) <= c <= Dyadic(hi))
    return LineMap(tuple((x, phi_inv(f.evaluate(phi(x)))) for x in xs))


def phi_from_line(g: LineMap) -> IntervalMap:
    """Inverse conjugation: interval map y |-> phi(g(phi_inv(y)))."""
    n, m = g.window
    lo = min(0, -g.left_offset, n) - 1
    hi = max(0, -g.right_offset, m) + 1
    cand = set()
    for x, _ in g.vertices:
        cand.add(phi(x))
    for j in range(lo, hi + 1):
        cand.add(phi(Dyadic(j)))
    glo = lo + g.left_offset
    ghi = hi + g.right_offset
    for j in range(glo, ghi + 1):
        cand.add(phi(g.evaluate_inverse(Dyadic(j))))
    xs = sorted(c for c in cand if ZERO < c < ONE)
    verts = [(ZERO, ZERO)]
    verts.extend((x, phi(g.evaluate(phi_inv(x)))) for x in xs)
    verts.append((ONE, ONE))
    return IntervalMap(tuple(verts))


# -- canonical PL map between dyadic intervals --------------------------------


def dyadic_tiles(a: Dyadic, b: Dyadic) -> list[tuple[Dyadic, Dyadic]]:
    """Minimal tiling of [a,b] by standard dyadic intervals [m 2^s, (m+1) 2^s].

    Greedy from the left: at each point take the largest standard interval
    that starts there and fits.
    """
    if not a < b:
        raise DomainError(f"empty interval [{a}, {b}]")
    tiles = []
    p = a
    while p < b:
        rem = b - p
        odd, kk = rem.two_adic()
        s = kk + odd.bit_length() - 1
        if p.num != 0:
            _, vp = p.two_adic()
            if vp < s:
                s = vp
        q = p + ONE.mul_pow2(s)
        tiles.append((p, q))
        p = q
    return tiles


def interpolate(a, b, c, d) -> tuple[Vertex, ...]:
    """Canonical PL2 vertex data mapping [a,b] onto [c,d] (a<b, c<d dyadic).

    Both intervals are tiled minimally by standard dyadic intervals; the
    shorter list is refined by splitting its widest tile (ties: leftmost)
    until the counts match, and the i-th tile maps to the i-th tile affinely.
    Deterministic, always power-of-2 slopes.
    """
    a, b, c, d = _as_dyadic(a), _as_dyadic(b), _as_dyadic(c), _as_dyadic(d)
    src = dyadic_tiles(a, b)
    dst = dyadic_tiles(c, d)

    def refine(tiles, target):
        while len(tiles) < target:
            widest = 0
            for i in range(1, len(tiles)):
                if tiles[i][1] - tiles[i][0] > tiles[widest][1] - tiles[widest][0]:
                    widest = i
            lo, hi = tiles[widest]
            mid = (lo + hi).half()
            tiles[widest:widest + 1] = [(lo, mid), (mid, hi)]
        return tiles

    src = refine(src, len(dst))
    dst = refine(dst, len(src))
    verts = [(src[0][0], dst[0][0])]
    verts.extend((s[1], t[1]) for s, t in zip(src, dst))
    return merge_collinear(tuple(verts))
