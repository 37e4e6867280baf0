"""Simulated equivalence queries.

Seed combination: strings ``u·x·v`` built from a prefix, an infix and a
suffix of seed images, kept when well-matched, scanned shortest first.
Perfect teacher: exhaustive comparison with a reference up to a length bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Sequence

from .alphabet import Kind, Tagging, erase_artificial, is_well_matched
from .sevpa import Sevpa

Member = Callable[[str], bool]


@dataclass(frozen=True)
class CorpusLimits:
    max_fragment: int = 20
    max_corpus: int = 100_000
    infixes: int = 1  # 0..2 infixes between prefix and suffix

    def __post_init__(self):
        if self.max_fragment <= 0 or self.max_corpus <= 0:
            raise ValueError("limits must be positive")
        if self.infixes not in (0, 1, 2):
            raise ValueError("infixes must be 0, 1 or 2")


@dataclass
class TestCorpus:
    strings: list[str]  # raw (untagged) strings
    images: list[str]  # tagged images fed to the machine
    provenance: list[tuple] = field(default_factory=list)

    def __len__(self):
        return len(self.strings)


def _profile(text: str, t: Tagging):
    """(pending returns, pending calls) or None when a return meets a call
    of another pair inside the fragment."""
    rets: list[int] = []
    calls: list[int] = []
    for c in text:
        kind, j = t.kind(c)
        if kind is Kind.CALL:
            calls.append(j)
        elif kind is Kind.RETURN:
            if calls:
                if calls[-1] != j:
                    return None
                calls.pop()
            else:
                rets.append(j)
    return tuple(rets), tuple(calls)


def _attach(calls: tuple, frag) -> tuple | None:
    """Pending calls after appending a fragment to a prefix with no pending returns."""
    rets, fcalls = frag
    stack = list(calls)
    for r in rets:
        if not stack or stack[-1] != r:
            return None
        stack.pop()
    return tuple(stack) + fcalls


def build_corpus(seeds: Sequence[str], t: Tagging, limits: CorpusLimits = CorpusLimits(),
                 images: Sequence[str] | None = None,
                 reimage: Callable[[str], str] | None = None) -> TestCorpus:
    """Seeds first, then combinations by total length and lexicographically.

    ``images`` are the tagged forms of the seeds (default: the seeds).  When
    ``reimage`` is given (token mode) each combination is kept as is and,
    if well-matched, also in the form obtained by erasing its artificial
    brackets and converting again.  Entries are distinct tagged strings.
    """
    if not seeds:
        raise ValueError("need at least one seed")
    images = list(images) if images is not None else list(seeds)
    F = limits.max_fragment
    prefixes, infixes, suffixes = {}, {}, {}
    for im in images:
        n = len(im)
        for a in range(min(n, F) + 1):
            prefixes.setdefault(im[:a], None)
        for a in range(max(0, n - F), n + 1):
            suffixes.setdefault(im[a:], None)
        for a in range(n + 1):
            for b in range(a, min(n, a + F) + 1):
                infixes.setdefault(im[a:b], None)

    def group(frags):
        by_len: dict[int, list] = {}
        for f in sorted(frags):
            prof = _profile(f, t)
            if prof is not None:
                by_len.setdefault(len(f), []).append((f, prof))
        return by_len

    P = {L: [(f, p) for f, p in fs if not p[0]] for L, fs in group(prefixes).items()}
    X = group(infixes)
    # suffixes indexed by the returns they close; they must open nothing
    V: dict[int, dict[tuple, list[str]]] = {}
    for L, fs in group(suffixes).items():
        for f, (rets, calls) in fs:
            if not calls:
                V.setdefault(L, {}).setdefault(tuple(reversed(rets)), []).append(f)

    strings: list[str] = []
    imgs: list[str] = []
    seen: set[str] = set()

    def add(raw: str, im: str) -> None:
        if im not in seen and len(strings) < limits.max_corpus:
            seen.add(im)
            strings.append(raw)
            imgs.append(im)

    def keep(im: str) -> None:
        if not reimage:
            add(im, im)
            return
        # token mode: the combination itself (possibly not an image of
        # anything) and the conversion of its raw text
        raw = erase_artificial(im)
        add(raw, im)
        im2 = reimage(raw)
        if is_well_matched(im2, t):
            add(raw, im2)

    for s, im in zip(seeds, images):
        if is_well_matched(im, t):
            add(s, im)

    lens_x = sorted(X)
    max_total = 3 * F + (F if limits.infixes == 2 else 0)
    for total in range(max_total + 1):
        if len(strings) >= limits.max_corpus:
            break
        found: set[str] = set()
        for lu in sorted(P):
            if lu > total:
                break
            for u, (_, ucalls) in P[lu]:
                for ux, calls in _middles(u, ucalls, X, lens_x, total - lu, limits.infixes):
                    lv = total - len(ux)
                    for v in V.get(lv, {}).get(calls, ()):
                        found.add(ux + v)
        for im in sorted(found):
            if len(strings) >= limits.max_corpus:
                break
            keep(im)
    return TestCorpus(strings, imgs)


def _middles(u, ucalls, X, lens_x, budget, n_inf):
    if n_inf == 0:
        yield u, ucalls
        return
    for lx in lens_x:
        if lx > budget:
            break
        for x, prof in X[lx]:
            calls = _attach(ucalls, prof)
            if calls is None:
                continue
            if n_inf == 1:
                yield u + x, calls
            else:
                for lx2 in lens_x:
                    if lx + lx2 > budget:
                        break
                    for x2, prof2 in X[lx2]:
                        calls2 = _attach(calls, prof2)
                        if calls2 is not None:
                            yield u + x + x2, calls2


@dataclass
class Counterexample:
    raw: str
    tagged: str
    verdict_oracle: bool
    verdict_hypothesis: bool

    def __post_init__(self):
        if self.verdict_oracle == self.verdict_hypothesis:
            raise ValueError("verdicts must differ")


class SeedCombination:
    """Scans a fixed corpus; oracle answers come from the (cached) oracle.

    ``member`` judges tagged strings directly (token mode, where a tagged
    string must also be the conversion of its raw text); by default the
    oracle is asked about the raw string.
    """

    def __init__(self, corpus: TestCorpus, oracle: Member, member: Member | None = None):
        self.corpus = corpus
        self.oracle = oracle
        self.member = member

    def find(self, m: Sevpa) -> Counterexample | None:
        for raw, im in zip(self.corpus.strings, self.corpus.images):
            h = m.accepts(im)
            o = self.member(im) if self.member is not None else self.oracle(raw)
            if h != o:
                return Counterexample(raw, im, o, h)
        return None

    def __call__(self, m: Sevpa) -> str | None:
        cex = self.find(m)
        return None if cex is None else cex.tagged


class PerfectTeacher:
    """Exhaustive comparison with a reference on all strings up to ``max_len``.

    Character mode only: machine input equals raw input.  Strings are
    visited depth first over the prefix tree in length-lexicographic order
    per length, and the shortest disagreement is returned.
    """

    def __init__(self, reference, alphabet: Iterable[str], max_len: int):
        self.reference = reference
        self.alphabet = tuple(sorted(set(alphabet)))
        self.max_len = max_len

    def find(self, m: Sevpa) -> Counterexample | None:
        bad = first_disagreement(m, self.reference, self.alphabet, self.max_len)
        if bad is None:
            return None
        return Counterexample(bad, bad, self.reference.accepts(bad), m.accepts(bad))

    def __call__(self, m: Sevpa) -> str | None:
        cex = self.find(m)
        return None if cex is None else cex.tagged


def machine_step(m: Sevpa, config, c: str):
    """Lenient machine stepper: ``None`` once the prefix cannot be accepted."""
    if config is None or not m.in_alphabet(c):
        return None
    return m.step(config, c)


def first_disagreement(m: Sevpa, reference, alphabet: Sequence[str], max_len: int,
                       wm_only: bool = False) -> str | None:
    """Shortest (then lexicographically least) string where the machine and
    the reference grammar disagree, or ``None``.

    Enumerates level by level, carrying machine and grammar configurations;
    subtrees where both sides are dead are cut.
    """
    stepper = reference.stepper()
    lex = reference.lex if not reference.char_level else None
    if lex is not None:
        raise ValueError("first_disagreement needs a character-level reference")
    level = [("", m.start(), stepper.initial())]
    for length in range(max_len + 1):
        for s, mc, gc in level:
            hm = mc is not None and m.is_final(mc)
            hg = gc is not None and stepper.accepting(gc)
            if hm != hg:
                return s
        if length == max_len:
            break
        nxt = []
        for s, mc, gc in level:
            for c in alphabet:
                mc2 = machine_step(m, mc, c)
                gc2 = stepper.step(gc, c) if gc is not None else None
                if mc2 is None and gc2 is None:
                    continue
                nxt.append((s + c, mc2, gc2))
        level = nxt
    return None


def count_disagreements(m: Sevpa, reference, alphabet: Sequence[str], max_len: int) -> tuple[int, int]:
    """(strings visited, disagreements) over every string up to ``max_len``.

    Dead subtrees (both sides rejecting every extension) are counted without
    being expanded.
    """
    stepper = reference.stepper()
    visited = 0
    bad = 0
    k = len(alphabet)
    stack = [("", m.start(), stepper.initial())]
    while stack:
        s, mc, gc = stack.pop()
        visited += 1
        hm = mc is not None and m.is_final(mc)
        hg = gc is not None and stepper.accepting(gc)
        bad += hm != hg
        if len(s) == max_len:
            continue
        for c in alphabet:
            mc2 = machine_step(m, mc, c)
            gc2 = stepper.step(gc, c) if gc is not None else None
            if mc2 is None and gc2 is None:
                rest = max_len - len(s) - 1
                visited += sum(k ** i for i in range(rest + 1))
                continue
            stack.append((s + c, mc2, gc2))
    return visited, bad


def strings_upto(alphabet: Sequence[str], max_len: int):
    for n in range(max_len + 1):
        for t in product(alphabet, repeat=n):
            yield "".join(t)
