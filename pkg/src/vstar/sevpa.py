"""k-module single-entry visibly pushdown automata."""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .alphabet import Kind, Tagging, is_well_matched
from .vpg import Eps, GrammarError, Linear, Match, Vpg, prune


class Verdict(Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    ILLFORMED = "ill-formed"


class MachineError(ValueError):
    pass


@dataclass(frozen=True)
class Sevpa:
    """States are integers; module 0 holds the initial state, module ``j+1``
    is entered only through ``entries[j+1]`` by calls of pair ``j``.

    ``ret_trans`` is keyed by ``(state, caller_state, pair)``: the stack
    symbol pushed by a call of pair ``j`` from ``caller_state`` is exactly
    ``(caller_state, j)``.
    """

    tagging: Tagging
    plains: tuple[str, ...]
    modules: tuple[tuple[int, ...], ...]
    entries: tuple[int, ...]
    accepting: frozenset[int]
    plain_trans: dict
    ret_trans: dict
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.modules) != self.tagging.k + 1 or len(self.entries) != len(self.modules):
            raise MachineError("need one module per call pair plus module 0")
        owner = {}
        for i, states in enumerate(self.modules):
            if self.entries[i] not in states:
                raise MachineError(f"entry of module {i} is outside the module")
            for q in states:
                if q in owner:
                    raise MachineError(f"state {q} in two modules")
                owner[q] = i
        if not self.accepting <= set(self.modules[0]):
            raise MachineError("accepting states must lie in module 0")
        for (q, c), r in self.plain_trans.items():
            if owner.get(r) != owner.get(q):
                raise MachineError("plain transition leaves its module")
        for (q, caller, j), r in self.ret_trans.items():
            if owner.get(q) != j + 1 or owner.get(r) != owner.get(caller):
                raise MachineError("return transition inconsistent with modules")
        object.__setattr__(self, "_owner", owner)
        object.__setattr__(self, "_plainset", frozenset(self.plains))

    @property
    def k(self) -> int:
        return self.tagging.k

    @property
    def initial(self) -> int:
        return self.entries[0]

    @property
    def size(self) -> int:
        return sum(len(m) for m in self.modules)

    def module_of(self, q: int) -> int:
        return self._owner[q]

    def in_alphabet(self, c: str) -> bool:
        return c in self._plainset or self.tagging.is_tagged(c)

    # configuration = (state, stack) with stack a tuple of (caller, pair)
    def start(self):
        return (self.initial, ())

    def step(self, config, c: str):
        """One transition; ``None`` when the move is undefined (ill-formed prefix)."""
        q, stack = config
        kind, j = self.tagging.kind(c)
        if kind is Kind.CALL:
            return (self.entries[j + 1], stack + ((q, j),))
        if kind is Kind.RETURN:
            if not stack or stack[-1][1] != j:
                return None
            caller, _ = stack[-1]
            return (self.ret_trans[(q, caller, j)], stack[:-1])
        if c not in self._plainset:
            raise MachineError(f"symbol {c!r} outside the machine alphabet")
        return (self.plain_trans[(q, c)], stack)

    def is_final(self, config) -> bool:
        return not config[1] and config[0] in self.accepting

    def run(self, text: str) -> Verdict:
        for c in text:
            if not self.in_alphabet(c):
                raise MachineError(f"symbol {c!r} outside the machine alphabet")
        if not is_well_matched(text, self.tagging):
            return Verdict.ILLFORMED
        return Verdict.ACCEPT if self._accepts_wm(text) else Verdict.REJECT

    def _accepts_wm(self, text: str) -> bool:
        q = self.initial
        stack = []
        kinds = self.tagging._kinds
        plain = self.plain_trans
        ret = self.ret_trans
        entries = self.entries
        for c in text:
            kp = kinds.get(c)
            if kp is None:
                q = plain[(q, c)]
            elif kp[0] is Kind.CALL:
                stack.append(q)
                q = entries[kp[1] + 1]
            else:
                q = ret[(q, stack.pop(), kp[1])]
        return q in self.accepting

    def accepts(self, text: str) -> bool:
        """Lenient membership: unknown symbols and ill-formed input reject."""
        for c in text:
            if not self.in_alphabet(c):
                return False
        return is_well_matched(text, self.tagging) and self._accepts_wm(text)

    def trace(self, text: str) -> list[tuple[int, tuple]]:
        """Configurations before each symbol and after the last (well-matched input)."""
        config = self.start()
        out = [config]
        for c in text:
            config = self.step(config, c)
            if config is None:
                raise MachineError("ill-formed input")
            out.append(config)
        return out

    # -- serialization -------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "pairs": [list(p) for p in self.tagging.pairs],
            "plains": list(self.plains),
            "modules": [
                {"states": list(states), "entry": self.entries[i],
                 **({"accepting": sorted(self.accepting)} if i == 0 else {})}
                for i, states in enumerate(self.modules)
            ],
            "plain": [[q, c, r] for (q, c), r in sorted(self.plain_trans.items())],
            "call": [[q, j, self.entries[j + 1]]
                     for q in sorted(self._owner) for j in range(self.k)],
            "ret": [[q, caller, j, r] for (q, caller, j), r in sorted(self.ret_trans.items())],
            "labels": list(self.labels),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, ensure_ascii=True)

    @classmethod
    def from_dict(cls, d: dict) -> "Sevpa":
        mods = d["modules"]
        return cls(
            tagging=Tagging(tuple(tuple(p) for p in d["pairs"])),
            plains=tuple(d["plains"]),
            modules=tuple(tuple(m["states"]) for m in mods),
            entries=tuple(m["entry"] for m in mods),
            accepting=frozenset(mods[0].get("accepting", ())),
            plain_trans={(q, c): r for q, c, r in d["plain"]},
            ret_trans={(q, caller, j): r for q, caller, j, r in d["ret"]},
            labels=tuple(d.get("labels", ())),
        )

    @classmethod
    def from_json(cls, text: str) -> "Sevpa":
        return cls.from_dict(json.loads(text))


def run(m: Sevpa, text: str) -> Verdict:
    return m.run(text)


def to_vpg(m: Sevpa) -> Vpg:
    """Summary grammar: ``N{i}_{q}_{r}`` derives the well-matched words that
    drive ``q`` to ``r`` inside module ``i``."""

    def nt(q, r):
        return f"N{m.module_of(q)}_{q}_{r}"

    names = []
    rules = []
    for i, states in enumerate(m.modules):
        for q in states:
            for r in states:
                lhs = nt(q, r)
                names.append(lhs)
                if q == r:
                    rules.append(Eps(lhs))
                for c in m.plains:
                    rules.append(Linear(lhs, c, nt(m.plain_trans[(q, c)], r)))
                for j, (a, b) in enumerate(m.tagging.pairs):
                    entry = m.entries[j + 1]
                    for q2 in m.modules[j + 1]:
                        q3 = m.ret_trans.get((q2, q, j))
                        if q3 is not None:
                            rules.append(Match(lhs, a, nt(entry, q2), b, nt(q3, r)))
    start = "S"
    q0 = m.initial
    for qf in sorted(m.accepting):
        src = nt(q0, qf)
        for rule in [x for x in rules if x.lhs == src]:
            rules.append(rule._replace(lhs=start))
    try:
        return prune(Vpg(tuple([start] + names), start, tuple(rules)))
    except GrammarError:
        # empty language
        return Vpg((start,), start, ())
