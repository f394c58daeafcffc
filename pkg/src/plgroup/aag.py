"""Commutator key exchange over the extension group, deterministic under seeds.

Two parties publish tuples (s_1..s_m) and (t_1..t_n) of group elements.
A picks a private word a over the s-tuple and sends the canonical forms of
a^-1 t_i a; B picks b over the t-tuple and sends b^-1 s_i b.  Each side
evaluates its own word over the received conjugates and left-multiplies by
its inverse, so both end up holding the commutator [a, b] = a^-1 b^-1 a b
(B computes [b, a] and inverts).  Only canonical forms ever cross the wire:
transmitting the literal conjugate words would hand the private word to any
observer by free-group inspection.

All randomness flows from explicit 64-bit seeds through splitmix64; equal
seeds give byte-identical instances, commitments and keys.  No security
level is claimed anywhere: word lengths are parameters, not recommendations.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .extension import GElement, GroupContext
from .rng import SplitMix64
from .varint import append_uvarint

KDF_PREFIX = b"plgroup-kex/v1"
CONFIRM_PREFIX = b"plgroup-kex/v1/confirm"
INSTANCE_PREFIX = b"plgroup-kex/v1/instance"


@dataclass(frozen=True)
class ExchangeParams:
    """Public tuple sizes and word-length ranges (inclusive).

    ``private_word`` bounds the random words of the protocol itself and
    defaults to 16..32 letters; ``instance_word`` bounds the words used to
    fabricate the public tuples, which is plumbing this package supplies.
    """

    s_size: int = 2
    t_size: int = 2
    instance_word_min: int = 2
    instance_word_max: int = 4
    private_word_min: int = 16
    private_word_max: int = 32

    def __post_init__(self):
        if self.s_size < 1 or self.t_size < 1:
            raise ValueError("tuple sizes must be >= 1")
        if not (1 <= self.instance_word_min <= self.instance_word_max):
            raise ValueError("bad instance word length range")
        if not (1 <= self.private_word_min <= self.private_word_max):
            raise ValueError("bad private word length range")


@dataclass(frozen=True)
class PublicInstance:
    ctx: GroupContext
    s_tuple: tuple[GElement, ...]
    t_tuple: tuple[GElement, ...]

    def digest(self) -> bytes:
        buf = bytearray(INSTANCE_PREFIX)
        buf.extend(self.ctx.digest())
        for tup in (self.s_tuple, self.t_tuple):
            append_uvarint(buf, len(tup))
            for g in tup:
                data = g.serialize()
                append_uvarint(buf, len(data))
                buf.extend(data)
        return hashlib.sha256(bytes(buf)).digest()

    def tuple_for(self, role: str) -> tuple[GElement, ...]:
        return self.s_tuple if role == "a" else self.t_tuple

    def opposite_tuple(self, role: str) -> tuple[GElement, ...]:
        return self.t_tuple if role == "a" else self.s_tuple


@dataclass(frozen=True)
class PrivateWord:
    """Freely reduced, non-empty word of signed 1-based indices into a tuple."""

    role: str
    letters: tuple[int, ...]

    def __post_init__(self):
        if self.role not in ("a", "b"):
            raise ValueError("role must be 'a' or 'b'")
        if not self.letters:
            raise ValueError("private word must be non-empty")
        for i, l in enumerate(self.letters):
            if l == 0 or (i and self.letters[i - 1] == -l):
                raise ValueError("private word must be freely reduced")


@dataclass(frozen=True)
class Commitment:
    role: str
    elements: tuple[GElement, ...]


@dataclass(frozen=True)
class SharedKey:
    element: GElement
    digest: bytes = field(repr=False)

    def confirmation(self) -> bytes:
        return confirm_digest(self.element)


def kdf(element: GElement) -> bytes:
    """32-byte key material: SHA-256 over the framed canonical serialization."""
    return _domain_hash(KDF_PREFIX, element)


def confirm_digest(element: GElement) -> bytes:
    """Key-confirmation value sent on the wire; domain-separated from kdf."""
    return _domain_hash(CONFIRM_PREFIX, element)


def _domain_hash(prefix: bytes, element: GElement) -> bytes:
    data = element.serialize()
    buf = bytearray(prefix)
    append_uvarint(buf, len(data))
    buf.extend(data)
    return hashlib.sha256(bytes(buf)).digest()


def _random_gword(ctx: GroupContext, rng: SplitMix64, length: int) -> tuple[int, ...]:
    top = 2 + ctx.n_letters
    out = []
    for _ in range(length):
        letter = rng.randint(1, top)
        if rng.randrange(2):
            letter = -letter
        out.append(letter)
    return tuple(out)


def instance_gen(ctx: GroupContext, params: ExchangeParams, seed: int) -> PublicInstance:
    """Deterministic public tuples; trivial draws are rejected and redrawn."""
    rng = SplitMix64(seed)

    def draw() -> GElement:
        while True:
            length = rng.randint(params.instance_word_min, params.instance_word_max)
            g = ctx.word_to_canonical(_random_gword(ctx, rng, length))
            if not g.is_identity:
                return g

    s_tuple = tuple(draw() for _ in range(params.s_size))
    t_tuple = tuple(draw() for _ in range(params.t_size))
    return PublicInstance(ctx, s_tuple, t_tuple)


def _random_private(rng: SplitMix64, size: int, lo: int, hi: int, role: str) -> PrivateWord:
    length = rng.randint(lo, hi)
    letters: list[int] = []
    while len(letters) < length:
        letter = rng.randint(1, size)
        if rng.randrange(2):
            letter = -letter
        if letters and letters[-1] == -letter:
            continue
        letters.append(letter)
    return PrivateWord(role, tuple(letters))


def evaluate_private(word: PrivateWord, tup: tuple[GElement, ...]) -> GElement:
    """The group element a word denotes over a tuple of elements."""
    ctx = tup[0].ctx
    out = ctx.identity()
    for letter in word.letters:
        g = tup[abs(letter) - 1]
        out = out * (g if letter > 0 else g.inverse())
    return out


def commit(instance: PublicInstance, role: str, seed: int) -> tuple[PrivateWord, Commitment]:
    """Draw a private word over the own tuple; conjugate the opposite tuple.

    The commitment entries are canonical forms of x^-1 t x, never the words.
    """
    params_size = len(instance.tuple_for(role))
    rng = SplitMix64(seed)
    word = _random_private(rng, params_size, 16, 32, role)
    return _commit_with(instance, role, word)


def commit_with_params(instance: PublicInstance, role: str, seed: int,
                       params: ExchangeParams) -> tuple[PrivateWord, Commitment]:
    rng = SplitMix64(seed)
    word = _random_private(rng, len(instance.tuple_for(role)),
                           params.private_word_min, params.private_word_max, role)
    return _commit_with(instance, role, word)


def _commit_with(instance: PublicInstance, role: str,
                 word: PrivateWord) -> tuple[PrivateWord, Commitment]:
    own = evaluate_private(word, instance.tuple_for(role))
    own_inv = own.inverse()
    conjugated = tuple(own_inv * t * own for t in instance.opposite_tuple(role))
    return word, Commitment(role, conjugated)


def derive_key(role: str, own_private: PrivateWord, own_tuple: tuple[GElement, ...],
               received: Commitment) -> SharedKey:
    """Both roles end with the canonical form of [a, b] and its kdf digest."""
    if len(received.elements) != len(own_tuple):
        raise ValueError("commitment length does not match the tuple")
    if received.role == own_private.role:
        raise ValueError("received own commitment")
    own = evaluate_private(own_private, own_tuple)
    mixed = evaluate_private(own_private, received.elements)
    # role a: a(b^-1 s b) = b^-1 a b, so a^-1 . that = [a, b]
    # role b: b(a^-1 t a) = a^-1 b a, so (b^-1 . that)^-1 = [b, a]^-1 = [a, b]
    key = own.inverse() * mixed
    if role == "b":
        key = key.inverse()
    return SharedKey(key, kdf(key))
