"""Well-matched visibly pushdown grammars.

Rules take one of three forms::

    L -> ε
    L -> c L1            (c plain)
    L -> <a L1 b> L2     (a call, b return)

Terminals are strings; a grammar whose terminals are all single characters
is character-level, otherwise input text is split by longest-match lexing
over the terminal set before recognition.
"""
from __future__ import annotations

import heapq
import json
import random
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from .alphabet import Tagging, TaggedString


class GrammarError(ValueError):
    """Malformed grammar or grammar unusable for the requested operation."""


class Eps(NamedTuple):
    lhs: str


class Linear(NamedTuple):
    lhs: str
    terminal: str
    rhs: str


class Match(NamedTuple):
    lhs: str
    call: str
    inner: str
    ret: str
    rest: str


Rule = Eps | Linear | Match


@dataclass(frozen=True)
class Vpg:
    nonterminals: tuple[str, ...]
    start: str
    rules: tuple[Rule, ...]
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        declared = set(self.nonterminals)
        if len(declared) != len(self.nonterminals):
            raise GrammarError("duplicate nonterminal")
        if self.start not in declared:
            raise GrammarError(f"start {self.start!r} not declared")
        calls, rets, plains = set(), set(), set()
        for r in self.rules:
            refs = {Eps: lambda r: (r.lhs,), Linear: lambda r: (r.lhs, r.rhs),
                    Match: lambda r: (r.lhs, r.inner, r.rest)}[type(r)](r)
            for nt in refs:
                if nt not in declared:
                    raise GrammarError(f"rule {r} references undeclared {nt!r}")
            if isinstance(r, Linear):
                if not r.terminal:
                    raise GrammarError("empty terminal")
                plains.add(r.terminal)
            elif isinstance(r, Match):
                if not r.call or not r.ret:
                    raise GrammarError("empty terminal")
                calls.add(r.call)
                rets.add(r.ret)
        if (calls & rets) or (calls & plains) or (rets & plains):
            raise GrammarError("a terminal is used with two different kinds")
        object.__setattr__(self, "_index", _GrammarIndex(self, calls, rets, plains))

    # -- derived views -------------------------------------------------
    @property
    def calls(self) -> frozenset[str]:
        return self._index.calls

    @property
    def returns(self) -> frozenset[str]:
        return self._index.rets

    @property
    def plains(self) -> frozenset[str]:
        return self._index.plains

    @property
    def terminals(self) -> frozenset[str]:
        return self._index.calls | self._index.rets | self._index.plains

    @property
    def char_level(self) -> bool:
        return all(len(t) == 1 for t in self.terminals)

    def rules_of(self, nt: str) -> tuple[Rule, ...]:
        return self._index.by_lhs.get(nt, ())

    def pairs(self) -> list[tuple[str, str]]:
        seen = []
        for r in self.rules:
            if isinstance(r, Match) and (r.call, r.ret) not in seen:
                seen.append((r.call, r.ret))
        return seen

    def tagging(self) -> Tagging:
        """Character tagging implied by a character-level grammar."""
        if not self.char_level:
            raise GrammarError("only character-level grammars induce a character tagging")
        return Tagging(tuple(self.pairs()))

    # -- recognition ---------------------------------------------------
    def lex(self, s: str) -> list[str] | None:
        return self._index.lex(s)

    def accepts(self, s: str) -> bool:
        toks = self.lex(s)
        return toks is not None and self._index.recognize(toks)

    def recognize_terminals(self, toks: Sequence[str]) -> bool:
        return self._index.recognize(toks)

    def stepper(self) -> "_GrammarIndex":
        return self._index

    # -- serialization ---------------------------------------------------
    def to_text(self) -> str:
        lines = []
        order = {nt: i for i, nt in enumerate(self.nonterminals)}
        for r in sorted(self.rules, key=lambda r: order[r.lhs]):
            lines.append(f"{r.lhs} -> {_rhs_text(r)}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        rules = []
        for r in self.rules:
            if isinstance(r, Eps):
                rules.append([r.lhs, "eps"])
            elif isinstance(r, Linear):
                rules.append([r.lhs, "linear", r.terminal, r.rhs])
            else:
                rules.append([r.lhs, "match", r.call, r.inner, r.ret, r.rest])
        return {"start": self.start, "nonterminals": list(self.nonterminals), "rules": rules}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, d: dict) -> "Vpg":
        rules = []
        for item in d["rules"]:
            kind = item[1]
            if kind == "eps":
                rules.append(Eps(item[0]))
            elif kind == "linear":
                rules.append(Linear(item[0], item[2], item[3]))
            elif kind == "match":
                rules.append(Match(item[0], item[2], item[3], item[4], item[5]))
            else:
                raise GrammarError(f"unknown rule kind {kind!r}")
        return cls(tuple(d["nonterminals"]), d["start"], tuple(rules))


def _quote(t: str) -> str:
    return json.dumps(t)


def _rhs_text(r: Rule) -> str:
    if isinstance(r, Eps):
        return "ε"
    if isinstance(r, Linear):
        return f"{_quote(r.terminal)} {r.rhs}"
    return f"<{_quote(r.call)} {r.inner} {_quote(r.ret)}> {r.rest}"


# ---------------------------------------------------------------------------
# Text grammar parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    \s*(?:
      (?P<arrow>->)
    | (?P<bar>\|)
    | (?P<lt><)
    | (?P<gt>>)
    | (?P<eps>ε|\beps\b)
    | (?P<str>"(?:[^"\\]|\\.)*"|'(?:[^'\\]|\\.)*')
    | (?P<cls>\[(?:[^\]\\]|\\.)+\])
    | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
    )""", re.VERBOSE)


def _expand_class(body: str) -> list[str]:
    chars = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\" and i + 1 < len(body):
            chars.append(body[i + 1])
            i += 2
            continue
        if i + 2 < len(body) and body[i + 1] == "-":
            chars.extend(chr(o) for o in range(ord(c), ord(body[i + 2]) + 1))
            i += 3
            continue
        chars.append(c)
        i += 1
    return chars


def _terminal(tok: tuple[str, str]) -> str:
    kind, val = tok
    if kind != "str":
        raise GrammarError(f"expected a quoted terminal, got {val!r}")
    if val[0] == "'":
        val = '"' + val[1:-1].replace('"', '\\"') + '"'
    return json.loads(val)


def parse_grammar(text: str) -> Vpg:
    """Parse the text format (``L -> <"a" A "b"> L | "c" B | ε``).

    ``[a-z]`` in linear position expands to one linear rule per character.
    ``%start X`` overrides the default start (first left-hand side).
    """
    nonterminals: list[str] = []
    rules: list[Rule] = []
    start = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("%start"):
            start = line.split()[1]
            continue
        toks = []
        pos = 0
        while pos < len(line):
            m = _TOKEN_RE.match(line, pos)
            if not m or m.end() == pos:
                if line[pos:].strip() == "":
                    break
                raise GrammarError(f"line {lineno}: cannot parse near {line[pos:]!r}")
            toks.append((m.lastgroup, m.group(m.lastgroup)))
            pos = m.end()
        if len(toks) < 3 or toks[0][0] != "name" or toks[1][0] != "arrow":
            raise GrammarError(f"line {lineno}: expected 'Name -> ...'")
        lhs = toks[0][1]
        if lhs not in nonterminals:
            nonterminals.append(lhs)
        alts: list[list] = [[]]
        for tok in toks[2:]:
            if tok[0] == "bar":
                alts.append([])
            else:
                alts[-1].append(tok)
        for alt in alts:
            kinds = [k for k, _ in alt]
            if kinds == ["eps"]:
                rules.append(Eps(lhs))
            elif kinds in (["str", "name"], ["cls", "name"]):
                rhs = alt[1][1]
                if alt[0][0] == "cls":
                    for c in _expand_class(alt[0][1][1:-1]):
                        rules.append(Linear(lhs, c, rhs))
                else:
                    rules.append(Linear(lhs, _terminal(alt[0]), rhs))
            elif kinds == ["lt", "str", "name", "str", "gt", "name"]:
                rules.append(Match(lhs, _terminal(alt[1]), alt[2][1], _terminal(alt[3]), alt[5][1]))
            else:
                raise GrammarError(f"line {lineno}: alternative {alt} is not a VPG rule form")
    for r in rules:
        for nt in _refs(r):
            if nt not in nonterminals:
                nonterminals.append(nt)
    if not rules:
        raise GrammarError("empty grammar")
    return Vpg(tuple(nonterminals), start or rules[0].lhs, tuple(rules))


def _refs(r: Rule) -> tuple[str, ...]:
    if isinstance(r, Eps):
        return ()
    if isinstance(r, Linear):
        return (r.rhs,)
    return (r.inner, r.rest)


def load_grammar(path: str | Path) -> Vpg:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return Vpg.from_dict(json.loads(text))
    return parse_grammar(text)


# ---------------------------------------------------------------------------
# Recognition: left-to-right subset simulation with memoized transitions.
# A level state is a frozenset of (origin, current) nonterminal indices,
# origin being the inner nonterminal opened at the enclosing call.
# ---------------------------------------------------------------------------

_DEAD = frozenset()


class _GrammarIndex:
    def __init__(self, g: Vpg, calls, rets, plains):
        self.calls = frozenset(calls)
        self.rets = frozenset(rets)
        self.plains = frozenset(plains)
        self.by_lhs: dict[str, tuple[Rule, ...]] = {}
        for r in g.rules:
            self.by_lhs.setdefault(r.lhs, ())
            self.by_lhs[r.lhs] += (r,)
        self.nt_id = {nt: i for i, nt in enumerate(g.nonterminals)}
        n = len(g.nonterminals)
        self.nullable = [False] * n
        self.lin: list[dict[str, list[int]]] = [dict() for _ in range(n)]
        # match rules per lhs: call -> list of (inner, ret, rest)
        self.mat: list[dict[str, list[tuple[int, str, int]]]] = [dict() for _ in range(n)]
        for r in g.rules:
            i = self.nt_id[r.lhs]
            if isinstance(r, Eps):
                self.nullable[i] = True
            elif isinstance(r, Linear):
                self.lin[i].setdefault(r.terminal, []).append(self.nt_id[r.rhs])
            else:
                self.mat[i].setdefault(r.call, []).append(
                    (self.nt_id[r.inner], r.ret, self.nt_id[r.rest]))
        self.start_state = frozenset({(-1, self.nt_id[g.start])})
        self._plain_memo: dict = {}
        self._call_memo: dict = {}
        self._ret_memo: dict = {}
        self._acc_memo: dict = {}
        terms = self.calls | self.rets | self.plains
        self.single_char = all(len(t) == 1 for t in terms)
        self._by_first: dict[str, list[str]] = {}
        for t in sorted(terms, key=lambda t: (-len(t), t)):
            self._by_first.setdefault(t[0], []).append(t)

    def lex(self, s: str) -> list[str] | None:
        if self.single_char:
            return list(s)
        out = []
        i = 0
        n = len(s)
        while i < n:
            for t in self._by_first.get(s[i], ()):
                if s.startswith(t, i):
                    out.append(t)
                    i += len(t)
                    break
            else:
                return None
        return out

    # configuration = (level_state, stack) where stack is a tuple of
    # (call terminal, caller level_state) frames, innermost last.
    def initial(self):
        return (self.start_state, ())

    def step(self, config, t: str):
        state, stack = config
        if t in self.plains:
            key = (state, t)
            nxt = self._plain_memo.get(key)
            if nxt is None:
                nxt = frozenset((o, c) for o, cur in state for c in self.lin[cur].get(t, ()))
                self._plain_memo[key] = nxt
            return None if nxt is _DEAD or not nxt else (nxt, stack)
        if t in self.calls:
            key = (state, t)
            nxt = self._call_memo.get(key)
            if nxt is None:
                nxt = frozenset((inner, inner) for _, cur in state
                                for inner, _, _ in self.mat[cur].get(t, ()))
                self._call_memo[key] = nxt
            if not nxt:
                return None
            return (nxt, stack + ((t, state),))
        if t in self.rets:
            if not stack:
                return None
            call, caller = stack[-1]
            key = (state, caller, call, t)
            nxt = self._ret_memo.get(key)
            if nxt is None:
                done = {o for o, cur in state if self.nullable[cur]}
                nxt = frozenset(
                    (o, rest) for o, cur in caller
                    for inner, ret, rest in self.mat[cur].get(call, ())
                    if ret == t and inner in done)
                self._ret_memo[key] = nxt
            if not nxt:
                return None
            return (nxt, stack[:-1])
        return None

    def accepting(self, config) -> bool:
        state, stack = config
        if stack:
            return False
        acc = self._acc_memo.get(state)
        if acc is None:
            acc = any(self.nullable[cur] for _, cur in state)
            self._acc_memo[state] = acc
        return acc

    def recognize(self, toks: Sequence[str]) -> bool:
        config = self.initial()
        for t in toks:
            config = self.step(config, t)
            if config is None:
                return False
        return self.accepting(config)


def recognize_vpg(g: Vpg, ts: TaggedString | str) -> bool:
    """Membership of a (tagged) character string in a character-level grammar."""
    text = ts.text if isinstance(ts, TaggedString) else ts
    if not g.char_level:
        raise GrammarError("recognize_vpg expects a character-level grammar")
    return g.recognize_terminals(list(text))


# ---------------------------------------------------------------------------
# Productivity, shortest strings and sampling
# ---------------------------------------------------------------------------

def shortest_strings(g: Vpg) -> dict[str, tuple[str, ...]]:
    """Shortest (then lexicographically least) terminal sequence per productive nonterminal."""
    best: dict[str, tuple[str, ...]] = {}

    def key(seq):
        return (sum(len(t) for t in seq), len(seq), seq)

    changed = True
    while changed:
        changed = False
        for r in g.rules:
            if isinstance(r, Eps):
                cand = ()
            elif isinstance(r, Linear):
                if r.rhs not in best:
                    continue
                cand = (r.terminal,) + best[r.rhs]
            else:
                if r.inner not in best or r.rest not in best:
                    continue
                cand = (r.call,) + best[r.inner] + (r.ret,) + best[r.rest]
            cur = best.get(r.lhs)
            if cur is None or key(cand) < key(cur):
                best[r.lhs] = cand
                changed = True
    return best


def productive(g: Vpg) -> set[str]:
    return set(shortest_strings(g))


def prune(g: Vpg) -> Vpg:
    """Drop unproductive and unreachable nonterminals (and rules mentioning them)."""
    prod = productive(g)
    if g.start not in prod:
        raise GrammarError("start nonterminal derives no terminal string")
    rules = [r for r in g.rules if r.lhs in prod and all(n in prod for n in _refs(r))]
    by_lhs: dict[str, list[Rule]] = {}
    for r in rules:
        by_lhs.setdefault(r.lhs, []).append(r)
    reach = [g.start]
    seen = {g.start}
    while reach:
        nt = reach.pop()
        for r in by_lhs.get(nt, ()):
            for m in _refs(r):
                if m not in seen:
                    seen.add(m)
                    reach.append(m)
    nts = tuple(n for n in g.nonterminals if n in seen)
    return Vpg(nts, g.start, tuple(r for r in rules if r.lhs in seen))


def sample_vpg(g: Vpg, n: int, max_depth: int = 12, rng: int | random.Random = 0) -> list[str]:
    """Draw ``n`` strings by uniform random rule expansion.

    Past ``max_depth`` the expansion switches to the rule that leads to the
    shortest completion, which guarantees termination.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    short = shortest_strings(g)
    if g.start not in short:
        raise GrammarError("start nonterminal derives no terminal string")
    minlen = {nt: len(seq) for nt, seq in short.items()}
    r = rng if isinstance(rng, random.Random) else random.Random(rng)
    options: dict[str, list[Rule]] = {}
    cheapest: dict[str, Rule] = {}
    for nt in g.nonterminals:
        if nt not in short:
            continue
        live = [x for x in g.rules_of(nt) if all(m in short for m in _refs(x))]
        options[nt] = live

        def cost(x):
            if isinstance(x, Eps):
                return 0
            if isinstance(x, Linear):
                return 1 + minlen[x.rhs]
            return 2 + minlen[x.inner] + minlen[x.rest]

        cheapest[nt] = min(live, key=cost)
    out = []
    for _ in range(n):
        parts: list[str] = []
        work: list = [(g.start, 0)]
        while work:
            item = work.pop()
            if isinstance(item, str):
                parts.append(item)
                continue
            nt, depth = item
            rule = cheapest[nt] if depth >= max_depth else r.choice(options[nt])
            if isinstance(rule, Linear):
                work.append((rule.rhs, depth + 1))
                work.append(rule.terminal)
            elif isinstance(rule, Match):
                work.append((rule.rest, depth + 1))
                work.append(rule.ret)
                work.append((rule.inner, depth + 1))
                work.append(rule.call)
        out.append("".join(parts))
    return out


def derivation_contexts(g: Vpg, source: str) -> dict[str, tuple[str, str]]:
    """Shortest (left, right) terminal contexts with ``source =>* left N right``."""
    short = {nt: "".join(seq) for nt, seq in shortest_strings(g).items()}
    dist: dict[str, tuple[str, str]] = {}
    heap = [(0, "", "", source)]
    while heap:
        d, left, right, nt = heapq.heappop(heap)
        if nt in dist:
            continue
        dist[nt] = (left, right)
        for r in g.rules_of(nt):
            if isinstance(r, Linear):
                steps = [(r.rhs, r.terminal, "")]
            elif isinstance(r, Match):
                if r.rest not in short or r.inner not in short:
                    continue
                steps = [(r.inner, r.call, r.ret + short[r.rest]),
                         (r.rest, r.call + short[r.inner] + r.ret, "")]
            else:
                continue
            for target, l2, r2 in steps:
                if target not in dist:
                    nl, nr = left + l2, r2 + right
                    heapq.heappush(heap, (len(nl) + len(nr), nl, nr, target))
    return dist
