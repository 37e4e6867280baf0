"""Nesting patterns found by synchronized pumping, and k-repeatability."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

Member = Callable[[str], bool]


@dataclass(frozen=True, order=True)
class NestingPattern:
    """Partition ``seed = u x z y v`` given by cut points ``i <= j <= l <= m``."""

    seed_index: int
    i: int
    j: int
    l: int
    m: int
    seed: str
    K: int = 2

    def __post_init__(self):
        if not (0 <= self.i < self.j <= self.l < self.m <= len(self.seed)):
            raise ValueError("cut points must give non-empty x and y")

    @property
    def u(self) -> str:
        return self.seed[: self.i]

    @property
    def x(self) -> str:
        return self.seed[self.i: self.j]

    @property
    def z(self) -> str:
        return self.seed[self.j: self.l]

    @property
    def y(self) -> str:
        return self.seed[self.l: self.m]

    @property
    def v(self) -> str:
        return self.seed[self.m:]

    def pump(self, k: int, j: int) -> str:
        return self.u + self.x * k + self.z + self.y * j + self.v

    def key(self) -> tuple:
        # outermost first: leftmost x, then rightmost y, then shortest fragments
        return (self.seed_index, self.i, -self.m, self.j - self.i, self.m - self.l)

    def certificate(self) -> list[tuple[int, int, bool]]:
        """The pumping tests that justify the pattern at its bound."""
        return [(k, j, k == j) for k in range(self.K + 1) for j in range(self.K + 1)
                if not (k == j == 0)]

    def short(self) -> str:
        return f"({self.x},{self.y})"


def _grid(K: int) -> list[tuple[int, int]]:
    """Test order: cheap decisive checks first, then the rest of the grid."""
    head = [(2, 2), (2, 1), (1, 2), (1, 1)]
    rest = [(k, j) for k in range(K + 1) for j in range(K + 1)
            if (k, j) not in head and not (k == j == 0)]
    return head + rest


def is_pattern(o: Member, seed: str, i: int, j: int, l: int, m: int, K: int) -> bool:
    u, x, z, y, v = seed[:i], seed[i:j], seed[j:l], seed[l:m], seed[m:]
    for k, jj in _grid(K):
        if o(u + x * k + z + y * jj + v) != (k == jj):
            return False
    return True


def partitions(n: int, max_frag: int = 8):
    """Cut points (i, j, l, m) with 1 <= |x|, |y| <= max_frag, smallest u first
    and, for each x, largest v first."""
    for i in range(n):
        for j in range(i + 1, min(n, i + max_frag) + 1):
            for m in range(n, j, -1):
                for l in range(m - 1, max(j, m - max_frag) - 1, -1):
                    yield i, j, l, m


def candidate_nesting(o: Member, seeds: Sequence[str], K: int = 2,
                      max_frag: int = 8) -> list[NestingPattern]:
    if K < 2:
        raise ValueError("K must be at least 2")
    out = []
    for si, s in enumerate(seeds):
        for i, j, l, m in partitions(len(s), max_frag):
            if is_pattern(o, s, i, j, l, m, K):
                out.append(NestingPattern(si, i, j, l, m, s, K))
    out.sort(key=NestingPattern.key)
    return out


def revalidate(o: Member, p: NestingPattern) -> bool:
    return is_pattern(o, p.seed, p.i, p.j, p.l, p.m, p.K)


def is_k_repeatable(o: Member, s: str, span: tuple[int, int], k: int = 2) -> bool:
    """``span`` is 1-based and inclusive."""
    i, j = span
    if not 1 <= i <= j <= len(s):
        raise ValueError(f"bad span {span} for a string of length {len(s)}")
    return o(s[: i - 1] + s[i - 1: j] * k + s[j:])
