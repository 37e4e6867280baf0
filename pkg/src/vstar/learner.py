"""L*-style learning of k-SEVPAs from membership and (simulated) equivalence queries.

Words handled here are *tagged texts*: strings whose call/return characters
are classified by the learner's tagging.  The membership function passed in
answers for tagged texts; the pipeline builds it from the raw oracle.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .alphabet import Kind, Tagging, is_well_matched, render
from .sevpa import Sevpa

Member = Callable[[str], bool]
EquivalenceCheck = Callable[[Sevpa], "str | None"]


class LearnerInvariantError(AssertionError):
    """Separability or closedness failed where it must hold."""


class NotACounterexample(ValueError):
    pass


@dataclass
class ObservationStructure:
    """Access words ``Q[i]`` and contexts ``C[i]`` per module.

    A context is a ``(left, right)`` pair and the test of access word ``q``
    is ``left + q + right``.  Module 0 contexts have ``left == ""``; module
    ``j+1`` contexts have ``left`` ending with the call of pair ``j``.
    """

    tagging: Tagging
    plains: tuple[str, ...]
    Q: list[list[str]]
    C: list[list[tuple[str, str]]]

    @property
    def k(self) -> int:
        return self.tagging.k

    def nested_words(self) -> list[str]:
        out = []
        for j, (a, b) in enumerate(self.tagging.pairs):
            out.extend(a + q + b for q in self.Q[j + 1])
        return out

    def sigma_m(self) -> list[str]:
        return list(self.plains) + self.nested_words()


def init_observation(t: Tagging, plains=()) -> ObservationStructure:
    k = t.k
    Q = [[""] for _ in range(k + 1)]
    C: list[list[tuple[str, str]]] = [[("", "")]]
    for a, _ in t.pairs:
        C.append([(a, b) for b in t.returns])
    return ObservationStructure(t, tuple(plains), Q, C)


@dataclass
class LearnResult:
    machine: Sevpa
    converged: bool
    rounds: int
    observation: ObservationStructure
    trace: list[dict] = field(default_factory=list)
    counterexamples: list[str] = field(default_factory=list)
    cex_queries: list[int] = field(default_factory=list)  # one entry per refinement
    cex_lengths: list[int] = field(default_factory=list)  # length of the string each refinement used
    member_calls: int = 0


class VpaLearner:
    """Observation structure plus the operations that grow it."""

    def __init__(self, member: Member, tagging: Tagging, plains, hook=None):
        self.member_fn = member
        self.obs = init_observation(tagging, plains)
        self._memo: dict[str, bool] = {}
        self._rows: dict[tuple[int, str], list[bool]] = {}
        self._index: list[dict[tuple, str]] = []
        self.member_calls = 0
        self.hook = hook
        self._reindex_all()

    # -- membership & rows ---------------------------------------------
    def member(self, w: str) -> bool:
        ans = self._memo.get(w)
        if ans is None:
            ans = bool(self.member_fn(w))
            self._memo[w] = ans
            self.member_calls += 1
        return ans

    def row(self, i: int, w: str) -> tuple:
        ctx = self.obs.C[i]
        cached = self._rows.get((i, w))
        if cached is None:
            cached = []
            self._rows[(i, w)] = cached
        while len(cached) < len(ctx):
            left, right = ctx[len(cached)]
            cached.append(self.member(left + w + right))
        return tuple(cached)

    def c_equivalent(self, i: int, q1: str, q2: str) -> bool:
        return self.row(i, q1) == self.row(i, q2)

    def _reindex(self, i: int):
        idx = {}
        for q in self.obs.Q[i]:
            r = self.row(i, q)
            if r in idx:
                raise LearnerInvariantError(
                    f"module {i}: {q!r} and {idx[r]!r} are not separated")
            idx[r] = q
        self._index[i] = idx

    def _reindex_all(self):
        self._index = [dict() for _ in self.obs.Q]
        for i in range(len(self.obs.Q)):
            self._reindex(i)

    def find(self, i: int, w: str) -> str | None:
        """Access word of module ``i`` equivalent to ``w`` (unique by separability)."""
        return self._index[i].get(self.row(i, w))

    def _add_access(self, i: int, w: str):
        r = self.row(i, w)
        if r in self._index[i]:
            raise LearnerInvariantError(f"module {i}: {w!r} duplicates {self._index[i][r]!r}")
        self.obs.Q[i].append(w)
        self._index[i][r] = w

    # -- closing -------------------------------------------------------
    def close(self):
        obs = self.obs
        sigma = obs.sigma_m()
        work = deque((i, q, m) for i in range(obs.k + 1) for q in obs.Q[i] for m in sigma)
        while work:
            i, q, m = work.popleft()
            w = q + m
            if self.find(i, w) is not None:
                continue
            self._add_access(i, w)
            for m2 in sigma:
                work.append((i, w, m2))
            if i > 0:
                a, b = obs.tagging.pairs[i - 1]
                nested = a + w + b
                sigma.append(nested)
                for i2 in range(obs.k + 1):
                    for q2 in obs.Q[i2]:
                        work.append((i2, q2, nested))
        if self.hook:
            self.hook(self, "close")

    # -- hypothesis construction -------------------------------------
    def hypothesis(self) -> Sevpa:
        obs = self.obs
        ids: dict[tuple[int, str], int] = {}
        modules = []
        labels = []
        for i, Qi in enumerate(obs.Q):
            mod = []
            for q in Qi:
                ids[(i, q)] = len(labels)
                mod.append(len(labels))
                labels.append(render(q, obs.tagging))
            modules.append(tuple(mod))

        def target(i, w):
            r = self.find(i, w)
            if r is None:
                raise LearnerInvariantError(f"not closed: module {i} lacks a class for {w!r}")
            return ids[(i, r)]

        plain = {}
        ret = {}
        for i, Qi in enumerate(obs.Q):
            for q in Qi:
                for c in obs.plains:
                    plain[(ids[(i, q)], c)] = target(i, q + c)
        for j, (a, b) in enumerate(obs.tagging.pairs):
            for q in obs.Q[j + 1]:
                for i, Qi in enumerate(obs.Q):
                    for caller in Qi:
                        ret[(ids[(j + 1, q)], ids[(i, caller)], j)] = target(i, caller + a + q + b)
        accepting = frozenset(ids[(0, q)] for q in obs.Q[0] if self.member(q))
        return Sevpa(
            tagging=obs.tagging, plains=obs.plains, modules=tuple(modules),
            entries=tuple(ids[(i, "")] for i in range(obs.k + 1)),
            accepting=accepting, plain_trans=plain, ret_trans=ret,
            labels=tuple(labels))

    # -- counterexample processing -----------------------------------
    def process_counterexample(self, s: str, h: Sevpa) -> int:
        """Refine with counterexample ``s``.

        Returns the fresh membership calls spent on locating the breakpoint
        (the verdict on ``s`` plus the binary search); filling in the new
        context column is charged to closing.
        """
        before = self.member_calls
        obs = self.obs
        if not is_well_matched(s, obs.tagging):
            raise NotACounterexample("counterexample is not well-matched")
        target = self.member(s)
        if h.accepts(s) == target:
            raise NotACounterexample(f"hypothesis already agrees on {s!r}")
        # map machine state ids back to (module, access word)
        state_word = []
        for i, Qi in enumerate(obs.Q):
            for q in Qi:
                state_word.append((i, q))
        configs = h.trace(s)
        n = len(s)

        def stack_prefix(stack) -> str:
            return "".join(state_word[caller][1] + obs.tagging.pairs[j][0] for caller, j in stack)

        def correct(idx: int) -> bool:
            q, stack = configs[idx]
            return self.member(stack_prefix(stack) + state_word[q][1] + s[idx:]) == target

        lo, hi = 0, n  # correct(lo) holds, correct(hi) fails
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if correct(mid):
                lo = mid
            else:
                hi = mid
        spent = self.member_calls - before
        c = s[lo]
        q_lo, stack_lo = configs[lo]
        kind, j = obs.tagging.kind(c)
        if kind is Kind.PLAIN:
            i, q = state_word[q_lo]
            new_word = q + c
            ctx = (stack_prefix(stack_lo), s[lo + 1:])
        elif kind is Kind.RETURN:
            caller, _ = stack_lo[-1]
            i, qc = state_word[caller]
            a, b = obs.tagging.pairs[j]
            new_word = qc + a + state_word[q_lo][1] + b
            ctx = (stack_prefix(stack_lo[:-1]), s[lo + 1:])
        else:
            raise LearnerInvariantError("a call cannot separate correct from incorrect runs")
        obs.C[i].append(ctx)
        self._reindex(i)
        self._add_access(i, new_word)
        if self.hook:
            self.hook(self, "counterexample")
        return spent

    # -- audits ----------------------------------------------------------
    def audit(self, closed: bool = True):
        """Independent separability (and optionally closedness) check."""
        obs = self.obs
        for i, Qi in enumerate(obs.Q):
            if "" not in Qi:
                raise LearnerInvariantError(f"module {i} lost ε")
            for q in Qi:
                if not is_well_matched(q, obs.tagging):
                    raise LearnerInvariantError(f"access word {q!r} is not well-matched")
            rows = [tuple(self.member(l + q + r) for l, r in obs.C[i]) for q in Qi]
            if len(set(rows)) != len(rows):
                raise LearnerInvariantError(f"module {i} not separable")
            if closed:
                rowset = set(rows)
                for q in Qi:
                    for m in obs.sigma_m():
                        r = tuple(self.member(l + q + m + rr) for l, rr in obs.C[i])
                        if r not in rowset:
                            raise LearnerInvariantError(f"module {i} not closed for {q + m!r}")


def learn(member: Member, tagging: Tagging, plains, eq: EquivalenceCheck,
          max_rounds: int = 1000, hook=None, on_round=None) -> LearnResult:
    """Outer learning loop.

    A counterexample is reused while the refined hypothesis still disagrees
    on it, saving equivalence scans; each refinement counts as one round.
    """
    lr = VpaLearner(member, tagging, plains, hook=hook)
    lr.close()
    h = lr.hypothesis()
    trace = []
    cexs, costs, lengths = [], [], []
    rounds = 0
    converged = False
    while rounds < max_rounds:
        cex = eq(h)
        record = {
            "round": rounds,
            "Q": [len(q) for q in lr.obs.Q],
            "C": [len(c) for c in lr.obs.C],
            "member_calls": lr.member_calls,
            "states": h.size,
            "counterexample": cex,
        }
        if on_round:
            record.update(on_round())
        trace.append(record)
        if cex is None:
            converged = True
            break
        cexs.append(cex)
        while rounds < max_rounds and h.accepts(cex) != lr.member(cex):
            costs.append(lr.process_counterexample(cex, h))
            lengths.append(len(cex))
            lr.close()
            h = lr.hypothesis()
            rounds += 1
    return LearnResult(h, converged, rounds, lr.obs, trace, cexs, costs, lengths, lr.member_calls)


def query_bound(m: int, sigma: int, n_max: int) -> float:
    """Polynomial bound on membership queries: 10·(m³|Σ|² + m·log n)."""
    return 10 * (m ** 3 * sigma ** 2 + m * math.log2(max(n_max, 2)))
