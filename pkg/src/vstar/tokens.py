"""Call/return token inference, tokenization and the artificial-bracket conversion."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .alphabet import Kind, Tagging, artificial_pair, erase_artificial, is_well_matched, unmatched_profile
from .lstar import Dfa, literal_dfa, lstar, minimize, prefix_dfa
from .nesting import NestingPattern, candidate_nesting
from .tags import SeedRejected

Member = Callable[[str], bool]


@dataclass(frozen=True)
class TokenPair:
    call: Dfa
    ret: Dfa
    call_example: str = ""
    ret_example: str = ""


@dataclass(frozen=True)
class PartialTokenizer:
    pairs: tuple[TokenPair, ...] = ()
    base: tuple[str, ...] = ()
    k_rep: int = 2
    brackets: tuple[tuple[str, str], ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not self.brackets or len(self.brackets) != len(self.pairs):
            taken = set(self.base)
            br = []
            for i in range(len(self.pairs)):
                p = artificial_pair(i, taken)
                taken.update(p)
                br.append(p)
            object.__setattr__(self, "brackets", tuple(br))
        for tp in self.pairs:
            if tp.call.is_empty() or tp.ret.is_empty():
                raise ValueError("token languages must be non-empty")

    @property
    def tagging(self) -> Tagging:
        return Tagging(self.brackets)

    def extend(self, pair: TokenPair) -> "PartialTokenizer":
        return PartialTokenizer(self.pairs + (pair,), self.base, self.k_rep)

    def to_dict(self) -> dict:
        return {
            "pairs": [{"call": tp.call.to_dict(), "ret": tp.ret.to_dict(),
                       "call_example": tp.call_example, "ret_example": tp.ret_example}
                      for tp in self.pairs],
            "base": list(self.base),
            "brackets": [list(b) for b in self.brackets],
            "k_rep": self.k_rep,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, ensure_ascii=True)

    @classmethod
    def from_dict(cls, d: dict) -> "PartialTokenizer":
        pairs = tuple(TokenPair(Dfa.from_dict(p["call"]), Dfa.from_dict(p["ret"]),
                                p.get("call_example", ""), p.get("ret_example", ""))
                      for p in d["pairs"])
        return cls(pairs, tuple(d.get("base", ())), d.get("k_rep", 2),
                   tuple(tuple(b) for b in d.get("brackets", ())))

    @classmethod
    def from_json(cls, text: str) -> "PartialTokenizer":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class TokenMatch:
    pair: int
    side: Kind
    start: int  # 1-based, inclusive
    end: int

    @property
    def span(self) -> tuple[int, int]:
        """0-based half-open."""
        return self.start - 1, self.end


def tokenize(D: PartialTokenizer, s: str, o: Member | None = None,
             ctx: tuple[str, str] = ("", "")) -> list[TokenMatch]:
    """Scan left to right; a match that is k-repeatable in place is skipped."""
    left, right = ctx
    out = []
    i = 0
    n = len(s)
    while i < n:
        found = None
        for pi, tp in enumerate(D.pairs):
            for side, dfa in ((Kind.CALL, tp.call), (Kind.RETURN, tp.ret)):
                j = dfa.longest_match(s, i)
                if j is not None and j > i:
                    found = (pi, side, j)
                    break
            if found:
                break
        if found is None:
            i += 1
            continue
        pi, side, j = found
        w = s[i:j]
        if o is not None and o(left + s[:i] + w * D.k_rep + s[j:] + right):
            i += 1
            continue
        out.append(TokenMatch(pi, side, i + 1, j))
        i = j
    return out


def conv_positions(D: PartialTokenizer, s: str, matches: Sequence[TokenMatch]):
    """Converted text plus, for each source index, its position in it."""
    before = {}
    after = {}
    for m in matches:
        a, b = D.brackets[m.pair]
        st, en = m.span
        if m.side is Kind.CALL:
            before[st] = before.get(st, "") + a
        else:
            after[en - 1] = b + after.get(en - 1, "")
    out = []
    pos = []
    n = 0
    for idx, c in enumerate(s):
        pre = before.get(idx, "")
        post = after.get(idx, "")
        out.append(pre + c + post)
        pos.append(n + len(pre))
        n += len(pre) + 1 + len(post)
    return "".join(out), pos, before, after


def conv(D: PartialTokenizer, s: str, matches: Sequence[TokenMatch] | None = None,
         o: Member | None = None) -> str:
    if matches is None:
        matches = tokenize(D, s, o)
    return conv_positions(D, s, matches)[0]


def conv_region(D: PartialTokenizer, s: str, matches: Sequence[TokenMatch], i: int, j: int) -> str:
    """Image of ``s[i:j]``: a call bracket right before ``s[i]`` and a return
    bracket right after ``s[j-1]`` belong to the region."""
    text, pos, before, after = conv_positions(D, s, matches)
    start = pos[i] - len(before.get(i, ""))
    end = pos[j - 1] + 1 + len(after.get(j - 1, ""))
    return text[start:end]


def _region_compatible(D: PartialTokenizer, s: str, matches, x: tuple[int, int],
                       y: tuple[int, int]) -> bool:
    t = D.tagging
    calls, _ = unmatched_profile(conv_region(D, s, matches, *x), t)
    _, rets = unmatched_profile(conv_region(D, s, matches, *y), t)
    return bool(set(calls) & set(rets))


def is_compatible_tokenizer(D: PartialTokenizer, p: NestingPattern,
                            matches: Sequence[TokenMatch],
                            pumped_matches: Sequence[TokenMatch] | None = None) -> bool:
    """``matches`` is the tokenization of ``p.seed``.

    A token may straddle the border of ``x`` or ``y`` in the seed (shifted
    patterns such as ``x = <a>``, ``y = a>x</``), so when ``pumped_matches``
    (the tokenization of ``p.pump(2, 2)``) is given, the regions ``x·x`` and
    ``y·y`` of the pumped string are accepted as well.
    """
    if _region_compatible(D, p.seed, matches, (p.i, p.j), (p.l, p.m)):
        return True
    if pumped_matches is None:
        return False
    lx, ly = len(p.x), len(p.y)
    x0 = len(p.u)
    y0 = x0 + 2 * lx + len(p.z)
    return _region_compatible(D, p.pump(2, 2), pumped_matches, (x0, x0 + 2 * lx), (y0, y0 + 2 * ly))


# ---------------------------------------------------------------------------
# Token inference
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TokenConfig:
    k_cap: int = 6
    max_frag: int = 8
    max_tests: int = 10_000
    max_candidates: int = 2000
    lstar_rounds: int = 50


@dataclass
class TokenResult:
    tokenizer: PartialTokenizer | None
    K: int
    patterns: list[NestingPattern] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def _spans(n: int, lo: int, hi: int, outer_end: bool):
    """Spans inside [0, n) touching [lo, hi); calls list start ascending then
    end descending, returns end descending then start ascending."""
    spans = [(a, b) for a in range(n) for b in range(a + 1, n + 1) if a < hi and b > lo]
    if outer_end:
        spans.sort(key=lambda ab: (-ab[1], ab[0]))
    else:
        spans.sort(key=lambda ab: (ab[0], -ab[1]))
    return spans


def anchor_candidates(p: NestingPattern):
    """Token occurrences for the call and the return, as
    ``(text, start, end, fragment)``.  Each side is a pair of lists: spans
    inside ``x`` (``y``) and spans crossing the middle of ``x·x`` (``y·y``)."""
    s1 = p.seed
    s2 = p.pump(2, 2)
    lx, ly = len(p.x), len(p.y)
    calls = [(s1, p.i + a, p.i + b, p.x) for a, b in _spans(lx, 0, lx, False)]
    calls_x2 = [(s2, p.i + a, p.i + b, p.x * 2) for a, b in _spans(2 * lx, 0, 2 * lx, False)
                if a < lx < b]
    rets = [(s1, p.l + a, p.l + b, p.y) for a, b in _spans(ly, 0, ly, True)]
    y2 = len(p.u) + 2 * lx + len(p.z)
    rets_y2 = [(s2, y2 + a, y2 + b, p.y * 2) for a, b in _spans(2 * ly, 0, 2 * ly, True)
               if a < ly < b]
    return (calls, calls_x2), (rets, rets_y2)


def learn_token(o: Member, text: str, a: int, b: int, fragment: str, alphabet: Sequence[str],
                cfg: TokenConfig = TokenConfig()) -> Dfa | None:
    """Lexical rule for the token occurring at ``text[a:b]``.

    The token is assumed to start with ``text[a]`` and end with ``text[b-1]``;
    L* learns what may follow the first character in this context.  The test
    set holds prefix·suffix combinations of ``fragment`` plus substrings of
    ``text`` with the same first and last character.
    """
    word = text[a:b]
    if len(word) == 1:
        return minimize(literal_dfa(word, alphabet))
    q, g = word[0], word[-1]
    left, right = text[:a], text[b:]

    def member(w: str) -> bool:
        return (q + w).endswith(g) and len(w) > 0 and o(left + q + w + right)

    tests = []
    seen = set()
    for i in range(len(fragment) + 1):
        for j in range(len(fragment) + 1):
            t = fragment[:i] + fragment[j:]
            if t.startswith(q) and t[1:] not in seen:
                seen.add(t[1:])
                tests.append(t[1:])
    # neighbouring substrings of the same shape (e.g. a closing tag next to
    # an opening one) keep the learned rule from swallowing other tokens
    cap = 2 * len(fragment)
    for i in range(len(text)):
        if text[i] != q:
            continue
        for j in range(i + 2, min(len(text), i + cap) + 1):
            t = text[i:j]
            if t.endswith(g) and t[1:] not in seen:
                seen.add(t[1:])
                tests.append(t[1:])
    tests.append(word[1:])
    if len(tests) > cfg.max_tests:
        return None
    tests.sort(key=lambda t: (len(t), t))
    res = lstar(member, alphabet, tests, max_rounds=cfg.lstar_rounds)
    if not res.converged:
        return None
    tok = prefix_dfa(q, res.dfa)
    if not tok.accepts(word):
        return None
    return tok


def _occurs_in(d: Dfa, text: str) -> bool:
    return any(d.longest_match(text, i) is not None for i in range(len(text)))


def separated(D: PartialTokenizer, tp: TokenPair) -> bool:
    """No token of ``tp`` matches inside an example of another token and vice versa."""
    others = [(q.call, q.call_example) for q in D.pairs] + [(q.ret, q.ret_example) for q in D.pairs]
    mine = [(tp.call, tp.call_example), (tp.ret, tp.ret_example)]
    for d, ex in mine:
        for d2, ex2 in others:
            if _occurs_in(d, ex2) or _occurs_in(d2, ex):
                return False
    (c, ce), (r, re) = mine
    return not (_occurs_in(c, re) or _occurs_in(r, ce))


def _canon(d: Dfa) -> str:
    return json.dumps(minimize(d).to_dict())


class _TokenSearch:
    def __init__(self, o: Member, seeds: Sequence[str], patterns: Sequence[NestingPattern],
                 cfg: TokenConfig):
        self.o = o
        self.seeds = list(seeds)
        self.patterns = list(patterns)
        self.cfg = cfg
        self.alphabet = tuple(sorted(set("".join(seeds))))
        self._token_cache: dict = {}
        self._match_cache: dict = {}

    def token(self, text, a, b, fragment):
        key = (text, a, b)
        if key not in self._token_cache:
            d = learn_token(self.o, text, a, b, fragment, self.alphabet, self.cfg)
            self._token_cache[key] = d
        return self._token_cache[key]

    def matches(self, D: PartialTokenizer, s: str):
        key = (id(D), s)
        hit = self._match_cache.get(key)
        if hit is None or hit[0] is not D:
            hit = (D, tokenize(D, s, self.o))
            self._match_cache[key] = hit
        return hit[1]

    def seeds_ok(self, D: PartialTokenizer) -> bool:
        t = D.tagging
        return all(is_well_matched(conv(D, s, self.matches(D, s)), t) for s in self.seeds)

    def compatible(self, D: PartialTokenizer, p: NestingPattern) -> bool:
        if not D.pairs:
            return False
        if is_compatible_tokenizer(D, p, self.matches(D, p.seed)):
            return True
        s2 = p.pump(2, 2)
        return is_compatible_tokenizer(D, p, self.matches(D, p.seed), self.matches(D, s2))

    def candidates(self, p: NestingPattern, D: PartialTokenizer):
        """Anchor pairs inside ``(x, y)`` first, then those reaching into
        ``x·x`` or ``y·y``."""
        calls, rets = anchor_candidates(p)
        used = {_canon(tp.call) for tp in D.pairs} | {_canon(tp.ret) for tp in D.pairs}
        seen = set()
        count = 0
        tiers = [(calls[0], rets[0]), (calls[0], rets[1]), (calls[1], rets[0]), (calls[1], rets[1])]
        for cs, rs in tiers:
            for ct, ca, cb, cfrag in cs:
                cd = self.token(ct, ca, cb, cfrag)
                if cd is None or _canon(cd) in used:
                    continue
                for rt, ra, rb, rfrag in rs:
                    rd = self.token(rt, ra, rb, rfrag)
                    if rd is None or _canon(rd) in used:
                        continue
                    key = (_canon(cd), _canon(rd))
                    if key[0] == key[1] or key in seen:
                        continue
                    seen.add(key)
                    count += 1
                    if count > self.cfg.max_candidates:
                        return
                    yield TokenPair(cd, rd, ct[ca:cb], rt[ra:rb])

    def run(self) -> PartialTokenizer | None:
        base = tuple(sorted(set("".join(self.seeds))))
        return self._go(0, PartialTokenizer((), base))

    def _go(self, idx: int, D: PartialTokenizer) -> PartialTokenizer | None:
        n = len(self.patterns)
        while idx < n and self.compatible(D, self.patterns[idx]):
            idx += 1
        if idx == n:
            return D
        p = self.patterns[idx]
        for tp in self.candidates(p, D):
            if not separated(D, tp):
                continue
            D2 = D.extend(tp)
            if not self.compatible(D2, p) or not self.seeds_ok(D2):
                continue
            if not all(self.compatible(D2, d) for d in self.patterns[:idx]):
                continue
            found = self._go(idx + 1, D2)
            if found is not None:
                return found
        return None


def token_infer(o: Member, seeds: Sequence[str], cfg: TokenConfig = TokenConfig()) -> TokenResult:
    for s in seeds:
        if not o(s):
            raise SeedRejected(s)
    K = 2
    patterns: list[NestingPattern] = []
    while K <= cfg.k_cap:
        patterns = candidate_nesting(o, seeds, K, cfg.max_frag)
        D = _TokenSearch(o, seeds, patterns, cfg).run()
        if D is not None:
            return TokenResult(D, K, patterns, check_assumptions(D, o, seeds))
        K += 1
    return TokenResult(None, cfg.k_cap, patterns)


# ---------------------------------------------------------------------------
# Assumption checks (warnings, never fatal)
# ---------------------------------------------------------------------------

def check_assumptions(D: PartialTokenizer, o: Member, seeds: Sequence[str],
                      max_len: int = 8) -> list[str]:
    warnings = []
    toks = []
    for i, tp in enumerate(D.pairs):
        for side, dfa in (("call", tp.call), ("ret", tp.ret)):
            words = dfa.words(max_len)[:20]
            toks.append((i, side, dfa, words))
    # separation: no word belongs to two token languages
    for x in range(len(toks)):
        for y in range(x + 1, len(toks)):
            common = [w for w in toks[x][3] if toks[y][2].accepts(w)]
            if common:
                warnings.append(f"separation: {common[0]!r} is both {toks[x][:2]} and {toks[y][:2]}")
    # exclusivity: a proper prefix/suffix of a token word may not occur inside it
    for i, side, dfa, words in toks:
        for w in words:
            if len(w) < 2:
                continue
            for k in range(1, len(w)):
                for part in (w[:k], w[k:]):
                    if part in w[1:-1]:
                        warnings.append(f"exclusivity: {part!r} is an infix of token {w!r}")
                        break
    # tokenization consistency: concatenated token words re-tokenize to themselves
    for i, side, dfa, words in toks:
        for w in words[:3]:
            got = tokenize(D, w + w)
            if [(m.pair, m.start, m.end) for m in got] != [(i, 1, len(w)), (i, len(w) + 1, 2 * len(w))]:
                warnings.append(f"consistency: {w + w!r} does not split into two tokens")
    for s in seeds:
        c = conv(D, s, o=o)
        if erase_artificial(c) != s:
            warnings.append(f"conv round trip failed on {s!r}")
        if not is_well_matched(c, D.tagging):
            warnings.append(f"conv image of seed {s!r} is not well-matched")
    return sorted(set(warnings))
