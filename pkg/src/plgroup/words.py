"""Free-word utilities over integer letter alphabets.

Letters are nonzero ints; -x is the inverse of x.  Used for words in F's
generators, T's generators, and the extension's generating set alike.
"""

from __future__ import annotations

from typing import Iterable, Sequence


def free_reduce(word: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for letter in word:
        if letter == 0:
            raise ValueError("0 is not a letter")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def invert_word(word: Sequence[int]) -> tuple[int, ...]:
    return tuple(-letter for letter in reversed(word))


def commutator_word(u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
    """[u, v] = u^-1 v^-1 u v, freely reduced."""
    return free_reduce(invert_word(u) + invert_word(v) + tuple(u) + tuple(v))


def reduced_words(letters: Sequence[int], length: int):
    """Yield all freely reduced words of exactly the given length."""
    alphabet = [l for l in letters] + [-l for l in letters]

    def extend(prefix: tuple[int, ...]):
        if len(prefix) == length:
            yield prefix
            return
        for a in alphabet:
            if prefix and prefix[-1] == -a:
                continue
            yield from extend(prefix + (a,))

    yield from extend(())
