"""The extension group G: F extended by a free group acting through Aut+(F).

A two-generator source presentation <x, y | R_1, ..., R_m> determines m+2
action generators in Aut+(F): for j <= m the relator R_j evaluated at the
hat lifts (c^, d^), then a^ c^ and b^ d^ (the diagonal images of x and y).
The group G is generated by F's generators alpha, beta together with stable
letters t_1, ..., t_n (n = m+2) subject to

    t_j^-1 alpha t_j = phi_j^-1 alpha phi_j,   and likewise for beta,

so every element has the canonical form (f, w): an F part and a freely
reduced word in the stable letters, multiplied by

    (f1, w1) (f2, w2) = (f1 . theta_w1(f2), reduce(w1 w2)),

where theta_{t_j}(f) = phi_j o f o phi_j^-1.  The word problem is solved in
two phases: map to the free quotient by deleting alpha/beta letters (a freely
nontrivial t-word is already a witness), then collect to canonical form and
decide the F part, where the word problem is solvable.

Letter encoding for G words: +-1 = alpha, +-2 = beta, +-(2+j) = t_j.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .autf import AutFMap, act_on_f, conjugate_line, hat_generators
from .dyadic import Dyadic
from .errors import DecodeError, ResourceLimitError
from .groupf import NormalForm, TreePair, generator_pair, presentation_relators
from .plmap import LineMap
from .varint import append_svarint, append_uvarint, read_svarint, read_uvarint
from .words import free_reduce, invert_word

ALPHA = 1
BETA = 2

BUNDLE_FORMAT = "plgroup-bundle"
BUNDLE_VERSION = 1


@dataclass(frozen=True)
class SourcePresentation:
    """Two-generator presentation; relators are words over {+-1, +-2}."""

    generators: tuple[str, str]
    relators: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.generators) != 2 or len(set(self.generators)) != 2:
            raise ValueError("exactly two distinct generator names required")
        for name in self.generators:
            if len(name) != 1 or not name.isalpha() or not name.islower():
                raise ValueError("generator names must be single lowercase letters")
        if not self.relators:
            raise ValueError("at least one relator required")
        for r in self.relators:
            if not r or free_reduce(r) != tuple(r):
                raise ValueError("relators must be nonempty and freely reduced")
            if any(abs(l) not in (1, 2) for l in r):
                raise ValueError("relator letters must be +-1 or +-2")

    @classmethod
    def from_strings(cls, generators: Sequence[str], relators: Sequence[str]) -> "SourcePresentation":
        """Uppercase encodes inverses: with generators (x, y), 'xyXY' = x y x^-1 y^-1."""
        gx, gy = generators
        table = {gx: 1, gy: 2, gx.upper(): -1, gy.upper(): -2}
        words = []
        for r in relators:
            try:
                words.append(tuple(table[ch] for ch in r))
            except KeyError as exc:
                raise ValueError(f"relator {r!r} uses unknown letter {exc.args[0]!r}") from None
        return cls((gx, gy), tuple(words))

    def relator_strings(self) -> list[str]:
        gx, gy = self.generators
        table = {1: gx, 2: gy, -1: gx.upper(), -2: gy.upper()}
        return ["".join(table[l] for l in r) for r in self.relators]


#: the presentation shipped as the default configuration.
SAMPLE_PRESENTATION = SourcePresentation(("x", "y"), ((1, 2, -1, -2),))


@dataclass(frozen=True)
class ExtensionPresentation:
    """Generators and relators of G, with the conjugation words spelled out."""

    generator_names: tuple[str, ...]
    relators: tuple[tuple[int, ...], ...]
    conjugate_words: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]  # per t_j: (w_alpha, w_beta)


class GElement:
    """Canonical pair (F part, reduced stable word); equality is data equality.

    The F part is carried as its line-map form (the two are in canonical
    bijection); the reduced tree pair and normal form are derived on demand.
    """

    __slots__ = ("ctx", "fline", "word", "_phi", "_phi_inv", "_pair", "_nf", "_bytes", "_hash")

    def __init__(self, ctx: "GroupContext", fline: LineMap, word: tuple[int, ...]):
        self.ctx = ctx
        self.fline = fline
        self.word = word
        self._phi = None
        self._phi_inv = None
        self._pair = None
        self._nf = None
        self._bytes = None
        self._hash = None

    @property
    def f(self) -> TreePair:
        if self._pair is None:
            self._pair = TreePair.from_line_map(self.fline)
        return self._pair

    @property
    def normal_form(self) -> NormalForm:
        if self._nf is None:
            self._nf = self.f.normal_form()
        return self._nf

    @property
    def is_identity(self) -> bool:
        return not self.word and self.fline.is_identity

    def __eq__(self, other):
        if not isinstance(other, GElement):
            return NotImplemented
        return self.word == other.word and self.fline == other.fline

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.fline, self.word))
        return self._hash

    def __mul__(self, other):
        if not isinstance(other, GElement):
            return NotImplemented
        return self.ctx.multiply(self, other)

    def inverse(self) -> "GElement":
        return self.ctx.invert(self)

    def serialize(self) -> bytes:
        if self._bytes is None:
            buf = bytearray()
            self.normal_form.append_to(buf)
            append_uvarint(buf, len(self.word))
            for letter in self.word:
                append_svarint(buf, letter - 2 if letter > 0 else letter + 2)
            self._bytes = bytes(buf)
        return self._bytes

    def __repr__(self):
        return f"GElement({self.normal_form!r}, w={self.ctx.format_word(self.word)!r})"

    # composite automorphism of the stable word, with inverse

    @property
    def phi(self) -> AutFMap:
        if self._phi is None:
            acc = AutFMap.identity()
            for letter in self.word:
                acc = acc * self.ctx.action_map(letter)
            self._phi = acc
        return self._phi

    @property
    def phi_inv(self) -> AutFMap:
        if self._phi_inv is None:
            acc = AutFMap.identity()
            for letter in reversed(self.word):
                acc = acc * self.ctx.action_map(-letter)
            self._phi_inv = acc
        return self._phi_inv


class GroupContext:
    """Immutable bundle of everything G needs: action maps and relator data.

    Build once from a SourcePresentation, then share freely; all group
    operations are pure relative to the context.
    """

    def __init__(self, presentation: SourcePresentation, breakpoint_budget: int = 100_000):
        self.presentation = presentation
        self.breakpoint_budget = breakpoint_budget
        ah, bh, ch, dh = hat_generators()
        maps = []
        for relator in presentation.relators:
            acc = AutFMap.identity()
            for letter in relator:
                base = ch if abs(letter) == 1 else dh
                acc = acc * (base if letter > 0 else base.inverse())
            maps.append(acc)
        maps.append(ah * ch)
        maps.append(bh * dh)
        self.action_maps = tuple(maps)
        self.action_inverses = tuple(m.inverse() for m in maps)
        self.n_letters = len(maps)
        self._alpha_pair = generator_pair(0)
        self._beta_pair = generator_pair(1)
        self._alpha_line = self._alpha_pair.to_line_map()
        self._beta_line = self._beta_pair.to_line_map()
        self._identity_line = LineMap.identity()
        conj = []
        for m in self.action_maps:
            w_alpha = act_on_f(m, self._alpha_pair).normal_form().to_word()
            w_beta = act_on_f(m, self._beta_pair).normal_form().to_word()
            conj.append((w_alpha, w_beta))
        f_rel_1, f_rel_2 = presentation_relators()
        relators: list[tuple[int, ...]] = [f_rel_1, f_rel_2]
        for j in range(1, self.n_letters + 1):
            w_alpha, w_beta = conj[j - 1]
            t = 2 + j
            relators.append(free_reduce((-t, ALPHA, t) + invert_word(w_alpha)))
            relators.append(free_reduce((-t, BETA, t) + invert_word(w_beta)))
        names = ("a", "b") + tuple(f"t{j}" for j in range(1, self.n_letters + 1))
        self.ext_presentation = ExtensionPresentation(names, tuple(relators), tuple(conj))
        self._theta_memo: dict[tuple[int, LineMap], LineMap] = {}

    # -- elements ------------------------------------------------------------

    def identity(self) -> GElement:
        return GElement(self, self._identity_line, ())

    def generator(self, letter: int) -> GElement:
        self._check_letter(letter)
        if abs(letter) <= 2:
            line = self._alpha_line if abs(letter) == ALPHA else self._beta_line
            if letter < 0:
                line = line.inverse()
            return GElement(self, line, ())
        return GElement(self, self._identity_line, (letter,))

    def generators(self) -> list[GElement]:
        return [self.generator(l) for l in range(1, self.n_letters + 3)]

    def _check_letter(self, letter: int) -> None:
        if letter == 0 or abs(letter) > 2 + self.n_letters:
            raise ValueError(f"letter {letter} outside the generating set")

    def action_map(self, letter: int) -> AutFMap:
        """The automorphism attached to stable letter +-t_j."""
        j = abs(letter) - 2
        if j < 1 or j > self.n_letters:
            raise ValueError(f"{letter} is not a stable letter")
        return self.action_maps[j - 1] if letter > 0 else self.action_inverses[j - 1]

    # -- the action ------------------------------------------------------------

    def theta_letter(self, letter: int, fline: LineMap) -> LineMap:
        """theta_{t_j^{+-1}} applied to an F part in line form (memoized)."""
        key = (letter, fline)
        hit = self._theta_memo.get(key)
        if hit is not None:
            return hit
        j = abs(letter) - 2
        if letter > 0:
            front, back = self.action_maps[j - 1], self.action_inverses[j - 1]
        else:
            front, back = self.action_inverses[j - 1], self.action_maps[j - 1]
        out = conjugate_line(front, back, fline)
        self._check_budget(out)
        self._theta_memo[key] = out
        # theta_{-letter} undoes theta_{letter}: seed the reverse edge
        self._theta_memo.setdefault((-letter, out), fline)
        return out

    def theta_word(self, g: GElement, fline: LineMap) -> LineMap:
        """theta_w for g's stable word, via its cached composite automorphism."""
        if not g.word:
            return fline
        out = conjugate_line(g.phi, g.phi_inv, fline)
        self._check_budget(out)
        return out

    def _check_budget(self, m) -> None:
        if len(m.vertices) > self.breakpoint_budget:
            raise ResourceLimitError(
                f"PL data grew past the breakpoint budget ({self.breakpoint_budget})")

    # -- group operations ---------------------------------------------------------

    def multiply(self, g1: GElement, g2: GElement) -> GElement:
        if g1.ctx is not g2.ctx or g1.ctx is not self:
            raise ValueError("elements belong to different group contexts")
        fline = g1.fline * self.theta_word(g1, g2.fline)
        self._check_budget(fline)
        out = GElement(self, fline, free_reduce(g1.word + g2.word))
        if g1._phi is not None and g2._phi is not None:
            out._phi = g1._phi * g2._phi
            self._check_budget(out._phi)
        if g1._phi_inv is not None and g2._phi_inv is not None:
            out._phi_inv = g2._phi_inv * g1._phi_inv
        return out

    def invert(self, g: GElement) -> GElement:
        fline_inv = g.fline.inverse()
        if g.word:
            fline_inv = conjugate_line(g.phi_inv, g.phi, fline_inv)
            self._check_budget(fline_inv)
        out = GElement(self, fline_inv, invert_word(g.word))
        out._phi = g.phi_inv
        out._phi_inv = g.phi
        return out

    def word_to_canonical(self, word: Iterable[int]) -> GElement:
        """Left-to-right collection of a word over the generating set."""
        out = self.identity()
        out._phi = AutFMap.identity()
        out._phi_inv = AutFMap.identity()
        for letter in word:
            self._check_letter(letter)
            if abs(letter) <= 2:
                line = self._alpha_line if abs(letter) == ALPHA else self._beta_line
                if letter < 0:
                    line = line.inverse()
                fline = out.fline * self.theta_word(out, line)
                self._check_budget(fline)
                nxt = GElement(self, fline, out.word)
                nxt._phi = out._phi
                nxt._phi_inv = out._phi_inv
            else:
                if out.word and out.word[-1] == -letter:
                    new_word = out.word[:-1]
                else:
                    new_word = out.word + (letter,)
                nxt = GElement(self, out.fline, new_word)
                nxt._phi = out._phi * self.action_map(letter)
                nxt._phi_inv = self.action_map(-letter) * out._phi_inv
                self._check_budget(nxt._phi)
            out = nxt
        return out

    def is_identity(self, word: Iterable[int]) -> bool:
        return self.is_identity_explained(word)[0]

    def is_identity_explained(self, word: Iterable[int]) -> tuple[bool, int]:
        """Word problem, reporting the deciding phase (1 = free quotient, 2 = F part)."""
        word = tuple(word)
        for letter in word:
            self._check_letter(letter)
        projection = free_reduce(l for l in word if abs(l) > 2)
        if projection:
            return False, 1
        g = self.word_to_canonical(word)
        return g.fline.is_identity and not g.word, 2

    # -- serialization ---------------------------------------------------------------

    def deserialize(self, data: bytes, pos: int = 0) -> tuple[GElement, int]:
        nf, pos = NormalForm.read_from(data, pos)
        count, pos = read_uvarint(data, pos)
        word = []
        for _ in range(count):
            raw, pos = read_svarint(data, pos)
            if raw == 0 or abs(raw) > self.n_letters:
                raise DecodeError(f"stable letter {raw} out of range")
            letter = raw + 2 if raw > 0 else raw - 2
            if word and word[-1] == -letter:
                raise DecodeError("stable word is not freely reduced")
            word.append(letter)
        fline = nf.to_line_map()
        g = GElement(self, fline, tuple(word))
        g._nf = nf
        return g, pos

    def deserialize_exact(self, data: bytes) -> GElement:
        g, pos = self.deserialize(data, 0)
        if pos != len(data):
            raise DecodeError("trailing bytes after element")
        return g

    # -- word syntax -------------------------------------------------------------------

    def parse_word(self, text: str) -> tuple[int, ...]:
        """Whitespace-separated letters a, b, tN; inverse via ^-1 suffix or uppercase."""
        out = []
        for token in text.split():
            sign = 1
            if token.endswith("^-1"):
                sign = -1
                token = token[:-3]
            if token != token.lower():
                sign = -sign
                token = token.lower()
            if token == "a":
                idx = ALPHA
            elif token == "b":
                idx = BETA
            elif token.startswith("t") and token[1:].isdigit():
                j = int(token[1:])
                if not 1 <= j <= self.n_letters:
                    raise ValueError(f"stable letter {token!r} out of range")
                idx = 2 + j
            else:
                raise ValueError(f"unknown letter {token!r}")
            out.append(sign * idx)
        return tuple(out)

    def format_word(self, word: Sequence[int]) -> str:
        names = {ALPHA: "a", BETA: "b"}
        names.update({2 + j: f"t{j}" for j in range(1, self.n_letters + 1)})
        return " ".join(names[abs(l)] + ("" if l > 0 else "^-1") for l in word)

    # -- bundle (configuration file) -----------------------------------------------------

    def bundle_dict(self) -> dict:
        def map_data(m: AutFMap) -> dict:
            return {
                "window": [m.window_lo, m.window_hi],
                "vertices": [[[v[0].num, v[0].exp], [v[1].num, v[1].exp]] for v in m.vertices],
            }

        body = {
            "format": BUNDLE_FORMAT,
            "version": BUNDLE_VERSION,
            "presentation": {
                "generators": list(self.presentation.generators),
                "relators": self.presentation.relator_strings(),
            },
            "stable_letters": self.n_letters,
            "action_generators": [map_data(m) for m in self.action_maps],
            "conjugate_words": [
                {"alpha": self.format_word(wa), "beta": self.format_word(wb)}
                for wa, wb in self.ext_presentation.conjugate_words
            ],
            "relators": [self.format_word(r) for r in self.ext_presentation.relators],
        }
        body["digest"] = hashlib.sha256(_canonical_json(body)).hexdigest()
        return body

    def digest(self) -> bytes:
        return bytes.fromhex(self.bundle_dict()["digest"])


def _canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def context_from_bundle(bundle: dict, breakpoint_budget: int = 100_000) -> GroupContext:
    """Rebuild a context from a bundle file, verifying digest and cached data."""
    if bundle.get("format") != BUNDLE_FORMAT or bundle.get("version") != BUNDLE_VERSION:
        raise DecodeError("unknown bundle format/version")
    body = {k: v for k, v in bundle.items() if k != "digest"}
    body["digest"] = hashlib.sha256(_canonical_json(body)).hexdigest()
    if body["digest"] != bundle.get("digest"):
        raise DecodeError("bundle digest mismatch")
    pres = SourcePresentation.from_strings(
        bundle["presentation"]["generators"], bundle["presentation"]["relators"])
    ctx = GroupContext(pres, breakpoint_budget=breakpoint_budget)
    cached = [
        AutFMap(
            tuple((Dyadic(x[0], x[1]), Dyadic(y[0], y[1])) for x, y in entry["vertices"]),
            entry["window"][0], entry["window"][1])
        for entry in bundle["action_generators"]
    ]
    if tuple(cached) != ctx.action_maps:
        raise DecodeError("bundle action generators disagree with the presentation")
    return ctx


def build_context(presentation: SourcePresentation | None = None,
                  breakpoint_budget: int = 100_000) -> GroupContext:
    return GroupContext(presentation or SAMPLE_PRESENTATION, breakpoint_budget)


# -- growth -------------------------------------------------------------------------------


def growth_series(ctx: GroupContext, n: int, budget: int = 10_000_000) -> list[int]:
    """Ball sizes of G over {alpha, beta, t_1..t_n} and inverses, by BFS.

    Elements are explored by left multiplication so that stable-letter steps
    hit the memoized single-letter action and generator steps cost one line
    composition.  Every step memoizes its reverse, and the edge back to the
    parent is skipped outright.
    """
    alpha_lines = {
        ALPHA: ctx._alpha_line, -ALPHA: ctx._alpha_line.inverse(),
        BETA: ctx._beta_line, -BETA: ctx._beta_line.inverse(),
    }
    t_letters = [l for j in range(1, ctx.n_letters + 1) for l in (2 + j, -(2 + j))]
    compose_memo: dict[tuple[int, LineMap], LineMap] = {}

    def gen_step(letter: int, fline: LineMap) -> LineMap:
        key = (letter, fline)
        hit = compose_memo.get(key)
        if hit is None:
            hit = alpha_lines[letter] * fline
            compose_memo[key] = hit
            compose_memo.setdefault((-letter, hit), fline)
        return hit

    identity = (ctx._identity_line, ())
    ball = {identity}
    frontier = [(ctx._identity_line, (), 0)]
    series = [1]
    for _ in range(n):
        new = []
        for fline, word, incoming in frontier:
            for letter in (ALPHA, -ALPHA, BETA, -BETA):
                if letter == incoming:
                    continue
                cand = (gen_step(letter, fline), word)
                if cand not in ball:
                    ball.add(cand)
                    new.append(cand + (-letter,))
            for letter in t_letters:
                if letter == incoming:
                    continue
                if word and word[0] == -letter:
                    new_word = word[1:]
                else:
                    new_word = (letter,) + word
                cand = (ctx.theta_letter(letter, fline), new_word)
                if cand not in ball:
                    ball.add(cand)
                    new.append(cand + (-letter,))
            if len(ball) > budget:
                raise ResourceLimitError(f"growth ball exceeds {budget} elements")
        frontier = new
        series.append(len(ball))
    return series
