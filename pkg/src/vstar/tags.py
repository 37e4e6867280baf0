"""Character-level tagging inference by backtracking over nesting patterns."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .alphabet import Tagging, is_well_matched, unmatched_profile
from .nesting import NestingPattern, candidate_nesting

Member = Callable[[str], bool]


class SeedRejected(ValueError):
    def __init__(self, seed: str):
        super().__init__(f"seed {seed!r} is rejected by the oracle")
        self.seed = seed


@dataclass(frozen=True)
class TagConfig:
    k_cap: int = 6
    max_frag: int = 8


@dataclass
class TagResult:
    tagging: Tagging | None
    K: int
    patterns: list[NestingPattern] = field(default_factory=list)


def is_compatible_tagging(t: Tagging, p: NestingPattern) -> bool:
    calls_x, _ = unmatched_profile(p.x, t)
    _, rets_y = unmatched_profile(p.y, t)
    return bool(set(calls_x) & set(rets_y))


def candidate_pairs(p: NestingPattern, t: Tagging) -> list[tuple[str, str]]:
    """Outermost first: leftmost character of x, rightmost of y."""
    out = []
    for a in p.x:
        for b in reversed(p.y):
            if a == b or t.is_tagged(a) or t.is_tagged(b) or (a, b) in out:
                continue
            out.append((a, b))
    return out


def tag_search(patterns: Sequence[NestingPattern], seeds: Sequence[str],
               t: Tagging | None = None) -> Tagging | None:
    t = t or Tagging()
    n = len(patterns)

    def go(idx: int, t: Tagging) -> Tagging | None:
        while idx < n and is_compatible_tagging(t, patterns[idx]):
            idx += 1
        if idx == n:
            return t
        p = patterns[idx]
        for pair in candidate_pairs(p, t):
            t2 = t.extend(pair)
            if not all(is_well_matched(s, t2) for s in seeds):
                continue
            if not all(is_compatible_tagging(t2, d) for d in patterns[: idx + 1]):
                continue
            found = go(idx + 1, t2)
            if found is not None:
                return found
        return None

    return go(0, t)


def tag_infer(o: Member, seeds: Sequence[str], cfg: TagConfig = TagConfig()) -> TagResult:
    for s in seeds:
        if not o(s):
            raise SeedRejected(s)
    K = 2
    patterns: list[NestingPattern] = []
    while K <= cfg.k_cap:
        patterns = candidate_nesting(o, seeds, K, cfg.max_frag)
        t = tag_search(patterns, seeds)
        if t is not None:
            return TagResult(t, K, patterns)
        K += 1
    return TagResult(None, cfg.k_cap, patterns)


def audit_tagging(t: Tagging, seeds: Sequence[str], patterns: Sequence[NestingPattern]) -> list[str]:
    """Problems found by re-checking a tagging; empty when compatible."""
    problems = [f"seed {s!r} not well-matched" for s in seeds if not is_well_matched(s, t)]
    problems += [f"pattern {p.short()} uncovered" for p in patterns if not is_compatible_tagging(t, p)]
    return problems
