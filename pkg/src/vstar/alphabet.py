"""Characters, call/return taggings and well-matchedness.

A tagged string is represented by its raw text plus the tagging that
classifies each character; artificial brackets inserted by a tokenizer are
ordinary (private-use) characters registered as an extra pair in the tagging,
so character-level and token-level images share one implementation.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, NamedTuple, Sequence


class Kind(IntEnum):
    PLAIN = 0
    CALL = 1
    RETURN = 2


class Symbol(NamedTuple):
    char: str
    kind: Kind
    pair: int  # -1 for plain symbols


class TaggingError(ValueError):
    """Raised for malformed taggings or characters outside the alphabet."""


@dataclass(frozen=True)
class Alphabet:
    chars: tuple[str, ...]

    def __post_init__(self):
        if not self.chars:
            raise TaggingError("alphabet must be non-empty")
        if len(set(self.chars)) != len(self.chars):
            raise TaggingError("alphabet contains duplicates")
        if list(self.chars) != sorted(self.chars):
            object.__setattr__(self, "chars", tuple(sorted(self.chars)))

    @classmethod
    def of(cls, strings: Iterable[str]) -> "Alphabet":
        return cls(tuple(sorted(set("".join(strings)))))

    def __contains__(self, c) -> bool:
        return c in self.chars

    def __iter__(self):
        return iter(self.chars)

    def __len__(self):
        return len(self.chars)


@dataclass(frozen=True)
class Tagging:
    """Ordered set of (call, return) character pairs obeying Unique Pairing."""

    pairs: tuple[tuple[str, str], ...] = ()
    _kinds: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        pairs = tuple((str(a), str(b)) for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        kinds = {}
        for i, (a, b) in enumerate(pairs):
            if len(a) != 1 or len(b) != 1:
                raise TaggingError(f"pair {i} must map single characters: {a!r}, {b!r}")
            for c, kind in ((a, Kind.CALL), (b, Kind.RETURN)):
                if c in kinds:
                    raise TaggingError(f"character {c!r} appears in more than one role")
                kinds[c] = (kind, i)
        object.__setattr__(self, "_kinds", kinds)

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def calls(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.pairs)

    @property
    def returns(self) -> tuple[str, ...]:
        return tuple(b for _, b in self.pairs)

    def kind(self, c: str) -> tuple[Kind, int]:
        return self._kinds.get(c, (Kind.PLAIN, -1))

    def is_tagged(self, c: str) -> bool:
        return c in self._kinds

    def extend(self, pair: tuple[str, str]) -> "Tagging":
        return Tagging(self.pairs + (pair,))

    def validate(self, alphabet: Alphabet) -> None:
        for c in self._kinds:
            if c not in alphabet:
                raise TaggingError(f"tagged character {c!r} is not in the alphabet")

    def to_json(self) -> str:
        return json.dumps({"pairs": [list(p) for p in self.pairs]}, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "Tagging":
        return cls(tuple(tuple(p) for p in json.loads(text)["pairs"]))


@dataclass(frozen=True)
class TaggedString:
    text: str
    tagging: Tagging

    @property
    def symbols(self) -> tuple[Symbol, ...]:
        return tuple(Symbol(c, *self.tagging.kind(c)) for c in self.text)

    def __len__(self):
        return len(self.text)

    def __str__(self):
        return render(self.text, self.tagging)


def apply_tagging(t: Tagging, s: str, alphabet: Alphabet | None = None) -> TaggedString:
    if alphabet is not None:
        for c in s:
            if c not in alphabet:
                raise TaggingError(f"character {c!r} is not in the alphabet")
    return TaggedString(s, t)


def untag(ts: TaggedString) -> str:
    return ts.text


def unmatched_profile(text: str, tagging: Tagging) -> tuple[list[int], list[int]]:
    """Pending call and pending return pair indices of ``text``.

    A return that meets a call of a different pair is reported as pending
    and leaves the open call on the stack.
    """
    kinds = tagging._kinds
    stack: list[int] = []
    pending_returns: list[int] = []
    for c in text:
        kp = kinds.get(c)
        if kp is None:
            continue
        kind, pair = kp
        if kind is Kind.CALL:
            stack.append(pair)
        elif stack and stack[-1] == pair:
            stack.pop()
        else:
            pending_returns.append(pair)
    return stack, pending_returns


def is_well_matched(text: str, tagging: Tagging) -> bool:
    kinds = tagging._kinds
    stack: list[int] = []
    for c in text:
        kp = kinds.get(c)
        if kp is None:
            continue
        kind, pair = kp
        if kind is Kind.CALL:
            stack.append(pair)
        elif stack and stack[-1] == pair:
            stack.pop()
        else:
            return False
    return not stack


def tagged_is_well_matched(ts: TaggedString) -> bool:
    return is_well_matched(ts.text, ts.tagging)


def tagged_profile(ts: TaggedString) -> tuple[list[int], list[int]]:
    return unmatched_profile(ts.text, ts.tagging)


# Artificial brackets live in the Unicode private-use area.
_PUA_BASE = 0xE000


def artificial_pair(index: int, avoid: Iterable[str] = ()) -> tuple[str, str]:
    avoid = set(avoid)
    base = _PUA_BASE + 2 * index
    while chr(base) in avoid or chr(base + 1) in avoid:
        base += 0x100
    return chr(base), chr(base + 1)


def is_artificial(c: str) -> bool:
    return 0xE000 <= ord(c) <= 0xF8FF


def erase_artificial(text: str) -> str:
    return "".join(c for c in text if not is_artificial(c))


def render(text: str, tagging: Tagging) -> str:
    """Human-readable form: artificial brackets as ◁/▷, tagged chars marked."""
    out = []
    for c in text:
        kind, pair = tagging.kind(c)
        if is_artificial(c):
            suffix = "" if pair == 0 else str(pair)
            out.append(("◁" if kind is Kind.CALL else "▷") + suffix)
        elif kind is Kind.CALL:
            out.append("‹" + c)
        elif kind is Kind.RETURN:
            out.append(c + "›")
        else:
            out.append(c)
    return "".join(out)


def render_brackets(text: str, tagging: Tagging) -> str:
    """Like :func:`render` but leaves real characters unmarked."""
    out = []
    for c in text:
        kind, pair = tagging.kind(c)
        if is_artificial(c):
            suffix = "" if pair == 0 else str(pair)
            out.append(("◁" if kind is Kind.CALL else "▷") + suffix)
        else:
            out.append(c)
    return "".join(out)


def tagged_words(tagging: Tagging, plain: Sequence[str]) -> tuple[str, ...]:
    """All symbols of a tagged alphabet, plain first then call/return pairs."""
    return tuple(plain) + tagging.calls + tagging.returns
