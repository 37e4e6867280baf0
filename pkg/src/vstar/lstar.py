"""Angluin's L* for regular languages, and the DFA type it produces."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable


@dataclass(frozen=True)
class Dfa:
    """Complete DFA; state 0 is initial."""

    alphabet: tuple[str, ...]
    n_states: int
    accepting: frozenset[int]
    trans: dict = field(compare=False)

    def __post_init__(self):
        for q in range(self.n_states):
            for c in self.alphabet:
                if (q, c) not in self.trans:
                    raise ValueError(f"missing transition ({q}, {c!r})")
        live = set(self.accepting)
        changed = True
        while changed:
            changed = False
            for (q, _), r in self.trans.items():
                if r in live and q not in live:
                    live.add(q)
                    changed = True
        object.__setattr__(self, "_live", frozenset(live))
        object.__setattr__(self, "_sigma", frozenset(self.alphabet))

    def step(self, q: int, c: str) -> int | None:
        if c not in self._sigma:
            return None
        return self.trans[(q, c)]

    def accepts(self, w: str) -> bool:
        q = 0
        for c in w:
            q = self.step(q, c)
            if q is None:
                return False
        return q in self.accepting

    def is_empty(self) -> bool:
        return 0 not in self._live

    def longest_match(self, s: str, i: int) -> int | None:
        """End (exclusive) of the longest accepted ``s[i:j]``, or ``None``."""
        q = 0
        best = i if q in self.accepting else None
        for j in range(i, len(s)):
            q = self.step(q, s[j])
            if q is None or q not in self._live:
                break
            if q in self.accepting:
                best = j + 1
        return best

    def words(self, max_len: int) -> list[str]:
        """Accepted words up to ``max_len``, shortest first."""
        out = []
        frontier = [("", 0)]
        for _ in range(max_len + 1):
            nxt = []
            for w, q in frontier:
                if q in self.accepting:
                    out.append(w)
                for c in self.alphabet:
                    r = self.trans[(q, c)]
                    if r in self._live:
                        nxt.append((w + c, r))
            frontier = nxt
        return out

    def to_dict(self) -> dict:
        return {
            "alphabet": list(self.alphabet),
            "states": self.n_states,
            "accepting": sorted(self.accepting),
            "trans": [[q, c, r] for (q, c), r in sorted(self.trans.items())],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Dfa":
        return cls(tuple(d["alphabet"]), d["states"], frozenset(d["accepting"]),
                   {(q, c): r for q, c, r in d["trans"]})

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def literal_dfa(word: str, alphabet: Iterable[str]) -> Dfa:
    """DFA for the singleton ``{word}`` (chain plus sink)."""
    sigma = tuple(sorted(set(alphabet) | set(word)))
    n = len(word) + 2
    sink = n - 1
    trans = {}
    for q in range(n):
        for c in sigma:
            trans[(q, c)] = q + 1 if q < len(word) and word[q] == c else sink
    return Dfa(sigma, n, frozenset({len(word)}), trans)


def prefix_dfa(prefix: str, body: Dfa) -> Dfa:
    """DFA for ``prefix · L(body)``."""
    sigma = tuple(sorted(set(body.alphabet) | set(prefix)))
    p = len(prefix)
    sink = p + body.n_states
    trans = {}
    for q in range(p):
        for c in sigma:
            trans[(q, c)] = q + 1 if prefix[q] == c else sink
    for q in range(body.n_states):
        for c in sigma:
            r = body.step(q, c)
            trans[(p + q, c)] = sink if r is None else p + r
    for c in sigma:
        trans[(sink, c)] = sink
    return minimize(Dfa(sigma, p + body.n_states + 1,
                        frozenset(p + q for q in body.accepting), trans))


def minimize(d: Dfa) -> Dfa:
    """Reachable part, Moore partition refinement, states renumbered by BFS."""
    reach = [0]
    seen = {0}
    for q in reach:
        for c in d.alphabet:
            r = d.trans[(q, c)]
            if r not in seen:
                seen.add(r)
                reach.append(r)
    block = {q: int(q in d.accepting) for q in reach}
    while True:
        sig = {q: (block[q],) + tuple(block[d.trans[(q, c)]] for c in d.alphabet) for q in reach}
        ids: dict[tuple, int] = {}
        new = {q: ids.setdefault(sig[q], len(ids)) for q in reach}
        if len(ids) == len(set(block.values())):
            break
        block = new
    order = {}
    queue = [block[0]]
    order[block[0]] = 0
    rep = {}
    for q in reach:
        rep.setdefault(block[q], q)
    for b in queue:
        for c in d.alphabet:
            nb = block[d.trans[(rep[b], c)]]
            if nb not in order:
                order[nb] = len(order)
                queue.append(nb)
    trans = {(order[b], c): order[block[d.trans[(rep[b], c)]]] for b in order for c in d.alphabet}
    acc = frozenset(order[b] for b in order if rep[b] in d.accepting)
    return Dfa(d.alphabet, len(order), acc, trans)


@dataclass
class LstarResult:
    dfa: Dfa
    converged: bool
    rounds: int
    S: list[str]
    E: list[str]
    queries: int


def lstar(member: Callable[[str], bool], alphabet: Iterable[str],
          eq: Iterable[str] | Callable[[Dfa], str | None], max_rounds: int = 200) -> LstarResult:
    """Learn a DFA.  ``eq`` is either a finite list of test words or a
    teacher returning a counterexample (``None`` when satisfied)."""
    sigma = tuple(sorted(set(alphabet)))
    if not sigma:
        raise ValueError("alphabet must be non-empty")
    memo: dict[str, bool] = {}

    def mq(w):
        if w not in memo:
            memo[w] = bool(member(w))
        return memo[w]

    if not callable(eq):
        tests = list(eq)

        def eq(h):
            for w in tests:
                if h.accepts(w) != mq(w):
                    return w
            return None

    S = [""]
    E = [""]

    def row(s):
        return tuple(mq(s + e) for e in E)

    rounds = 0
    while True:
        while True:
            rows = {row(s) for s in S}
            missing = next((s + c for s in S for c in sigma if row(s + c) not in rows), None)
            if missing is not None:
                S.append(missing)
                continue
            bad = None
            for s1, s2 in itertools.combinations(S, 2):
                if row(s1) != row(s2):
                    continue
                for c in sigma:
                    for e in E:
                        if mq(s1 + c + e) != mq(s2 + c + e):
                            bad = c + e
                            break
                    if bad:
                        break
                if bad:
                    break
            if bad is None:
                break
            E.append(bad)
        reps: dict[tuple, int] = {}
        for s in S:
            reps.setdefault(row(s), len(reps))
        accepting = frozenset(i for r, i in reps.items() if r[0])
        trans = {}
        first = {}
        for s in S:
            first.setdefault(row(s), s)
        for r, i in reps.items():
            for c in sigma:
                trans[(i, c)] = reps[row(first[r] + c)]
        h = Dfa(sigma, len(reps), accepting, trans)
        cex = eq(h)
        if cex is None:
            return LstarResult(h, True, rounds, S, E, len(memo))
        rounds += 1
        if rounds > max_rounds:
            return LstarResult(h, False, rounds, S, E, len(memo))
        for i in range(1, len(cex) + 1):
            if cex[:i] not in S:
                S.append(cex[:i])
