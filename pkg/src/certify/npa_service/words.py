"""
Operator words over three parties A, B and C with dichotomic observables.

Letters of different parties commute and every letter squares to the
identity, so a word is stored as one index tuple per party and reduced by
cancelling adjacent repeats inside each party.  Observables are Hermitian:
the adjoint of a word reverses each party's tuple.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

PARTIES = ("A", "B", "C")

# Row/column order of the moment matrix.
BASIS_LABELS = (
    "I",
    "A0", "A1", "B0", "B1", "C0", "C1",
    "A0B1C1", "A1B0C1", "A1B1C0", "A0B0C0",
    "A1B0C0", "A0B1C0", "A0B0C1", "A1B1C1",
)

_LETTER = re.compile(r"([ABC])([01])")


@dataclass(frozen=True, slots=True)
class OperatorWord:
    """
    Attributes
    ----------
    parts : tuple
        Three tuples of observable indices, for A, B and C in that order.
    sign : int
        Global ±1.
    """

    parts: tuple = ((), (), ())
    sign: int = 1

    @classmethod
    def from_string(cls, text: str) -> "OperatorWord":
        """Parse "A0B1C1", "-A1A0" or "I"."""
        text = text.strip()
        sign = 1
        if text.startswith("-"):
            sign, text = -1, text[1:]
        if text in ("", "I"):
            return cls(((), (), ()), sign)
        if _LETTER.sub("", text):
            raise ValueError(f"cannot parse operator word {text!r}")
        parts = [[], [], []]
        for party, index in _LETTER.findall(text):
            parts[PARTIES.index(party)].append(int(index))
        return cls(tuple(tuple(p) for p in parts), sign)

    def __str__(self) -> str:
        body = "".join(
            f"{party}{index}"
            for party, part in zip(PARTIES, self.parts)
            for index in part
        )
        return ("-" if self.sign < 0 else "") + (body or "I")

    def __mul__(self, other: "OperatorWord") -> "OperatorWord":
        joined = tuple(a + b for a, b in zip(self.parts, other.parts))
        return reduce_word(OperatorWord(joined, self.sign * other.sign))

    @property
    def length(self) -> int:
        return sum(len(p) for p in self.parts)

    @property
    def is_identity(self) -> bool:
        return self.length == 0

    def unsigned(self) -> "OperatorWord":
        return OperatorWord(self.parts, 1)

    def adjoint(self) -> "OperatorWord":
        return OperatorWord(tuple(tuple(reversed(p)) for p in self.parts), self.sign)

    def sort_key(self) -> tuple:
        return (self.length, self.parts)


IDENTITY = OperatorWord()


def reduce_word(word: OperatorWord) -> OperatorWord:
    """Cancel adjacent equal indices inside each party (stack reduction)."""
    reduced = []
    for part in word.parts:
        stack: list[int] = []
        for index in part:
            if stack and stack[-1] == index:
                stack.pop()
            else:
                stack.append(index)
        reduced.append(tuple(stack))
    return OperatorWord(tuple(reduced), word.sign)


def word_class(word: OperatorWord) -> OperatorWord:
    """
    Canonical representative of {W, W†} after reduction, sign kept.

    Real moment matrices identify ⟨W⟩ with ⟨W†⟩ = conj⟨W⟩.
    """
    forward = reduce_word(word)
    backward = forward.adjoint()
    return min(forward, backward, key=OperatorWord.sort_key)


def basis_words() -> tuple[OperatorWord, ...]:
    return tuple(OperatorWord.from_string(label) for label in BASIS_LABELS)


def entry_word(row: OperatorWord, column: OperatorWord) -> OperatorWord:
    """Reduced O_i† O_j."""
    return row.adjoint() * column


# --------------------------------------------------------------------------- #
# String-rewriting census
# --------------------------------------------------------------------------- #

def _rewrite(tokens: list[str]) -> list[str]:
    tokens = sorted(tokens, key=lambda t: t[0])  # stable: keeps in-party order
    changed = True
    while changed:
        changed = False
        for k in range(len(tokens) - 1):
            if tokens[k] == tokens[k + 1]:
                del tokens[k:k + 2]
                changed = True
                break
    return tokens


def _canonical_string(tokens: list[str]) -> str:
    grouped = {p: [t for t in tokens if t[0] == p] for p in PARTIES}
    forward = "".join("".join(grouped[p]) for p in PARTIES)
    backward = "".join("".join(reversed(grouped[p])) for p in PARTIES)
    return min(forward or "I", backward or "I", key=lambda s: (len(s), s))


def class_census(labels: Iterable[str] = BASIS_LABELS) -> dict[str, int]:
    """
    Count upper-triangle entries per class by plain token rewriting.

    Independent of :class:`OperatorWord`; used to cross-check the model.
    """
    letters = [re.findall(r"[ABC][01]", label) for label in labels]
    census: dict[str, int] = {}
    for i, left in enumerate(letters):
        for right in letters[i:]:
            key = _canonical_string(_rewrite(list(reversed(left)) + right))
            census[key] = census.get(key, 0) + 1
    return census
