"""Recall, precision, F1, reports, and seed/dataset generation from grammars."""
from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

from .alphabet import erase_artificial
from .vpg import GrammarError, Linear, Match, Vpg, derivation_contexts, sample_vpg, shortest_strings


def recall(accepts: Callable[[str], bool], dataset: Sequence[str]) -> float:
    """Fraction of (positive) dataset strings accepted by the learned model."""
    if not dataset:
        raise ValueError("recall is undefined on an empty dataset")
    return sum(1 for s in dataset if accepts(s)) / len(dataset)


def precision(learned: Vpg, oracle: Callable[[str], bool], n: int = 1000,
              rng: int | random.Random = 0, max_depth: int = 12) -> tuple[float, list[str]]:
    """Oracle-acceptance rate of ``n`` strings sampled from the learned grammar
    (artificial brackets erased).  Returns the rate and the samples."""
    if n <= 0:
        raise ValueError("need a positive sample count")
    samples = [erase_artificial(s) for s in sample_vpg(learned, n, max_depth, rng)]
    return sum(1 for s in samples if oracle(s)) / n, samples


def f1(r: float, p: float) -> float:
    if r <= 0 or p <= 0:
        return 0.0
    return 2 / (1 / r + 1 / p)


@dataclass
class EvalReport:
    recall: float
    precision: float
    f1: float
    stats: dict
    corpus_size: int
    sample_size: int
    dataset_size: int
    elapsed: float | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        for v in (self.recall, self.precision, self.f1):
            if not 0 <= v <= 1:
                raise ValueError("metrics must lie in [0, 1]")

    def query_split(self) -> tuple[int, float, float]:
        """Total unique queries and the token-inference / VPA-learning shares.

        Equivalence-corpus queries are counted with VPA learning."""
        phases = self.stats.get("by_phase", {})
        total = sum(phases.values())
        tok = phases.get("token", 0)
        if total == 0:
            return 0, 0.0, 0.0
        return total, tok / total, (total - tok) / total

    def to_dict(self, with_time: bool = True) -> dict:
        d = asdict(self)
        if not with_time:
            d.pop("elapsed")
        total, qt, qv = self.query_split()
        d["queries"] = total
        d["pct_token"] = round(100 * qt, 2)
        d["pct_vpa"] = round(100 * qv, 2)
        return d

    def to_json(self, with_time: bool = True) -> str:
        return json.dumps(self.to_dict(with_time), indent=1, sort_keys=True)


TABLE_COLUMNS = ("Name", "Recall", "Precision", "F1", "#Queries", "%Q(Token)", "%Q(VPA)", "#TS", "Time")


def format_table(rows: Sequence[tuple[str, EvalReport]]) -> str:
    body = []
    for name, r in rows:
        total, qt, qv = r.query_split()
        t = "-" if r.elapsed is None else f"{r.elapsed:.1f}s"
        body.append((name, f"{r.recall:.2f}", f"{r.precision:.2f}", f"{r.f1:.2f}", str(total),
                     f"{100 * qt:.0f}%", f"{100 * qv:.0f}%", str(r.corpus_size), t))
    widths = [max(len(c), *(len(row[i]) for row in body)) if body else len(c)
              for i, c in enumerate(TABLE_COLUMNS)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(TABLE_COLUMNS, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in body]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Seeds and datasets
# ---------------------------------------------------------------------------

def _nonempty_shortest(g: Vpg, short: dict[str, str]) -> dict[str, str]:
    best = {}
    for r in g.rules:
        if isinstance(r, Linear) and r.rhs in short:
            cand = r.terminal + short[r.rhs]
        elif isinstance(r, Match) and r.inner in short and r.rest in short:
            cand = r.call + short[r.inner] + r.ret + short[r.rest]
        else:
            continue
        cur = best.get(r.lhs)
        if cur is None or (len(cand), cand) < (len(cur), cur):
            best[r.lhs] = cand
    return best


def derive_seed_strings(g: Vpg, depth: int = 2) -> list[str]:
    """Witnesses of each recursive matching rule, nested 1..depth times.

    For ``L -> <a A b> B`` with ``A =>* α L β``, the single witness is
    ``a α w β b w'`` placed in a shortest context of ``L`` (``w`` and ``w'``
    shortest non-empty expansions of ``L`` and ``B``); deeper witnesses
    nest the recursion inside itself.
    """
    short = {nt: "".join(seq) for nt, seq in shortest_strings(g).items()}
    if g.start not in short:
        raise GrammarError("start nonterminal derives no terminal string")
    filler = _nonempty_shortest(g, short)
    ctx_start = derivation_contexts(g, g.start)
    out: list[str] = []
    for r in g.rules:
        if not isinstance(r, Match) or r.lhs not in ctx_start:
            continue
        inner_ctx = derivation_contexts(g, r.inner)
        if r.lhs not in inner_ctx or r.rest not in short:
            continue
        alpha, beta = inner_ctx[r.lhs]
        left, right = ctx_start[r.lhs]
        core = filler.get(r.lhs, short[r.lhs])
        tail = filler.get(r.rest, short[r.rest])
        for d in range(1, depth + 1):
            w = core
            for level in range(d):
                after = tail if level == d - 1 else short[r.rest]
                w = r.call + alpha + w + beta + r.ret + after
            s = left + w + right
            if s not in out:
                out.append(s)
    return out


def generate_seeds(g: Vpg, n: int = 40, rng: int = 0, max_len: int = 16,
                   depth: int = 2, max_depth: int = 8) -> list[str]:
    """Recursion witnesses first, then short random derivations, deduplicated."""
    out = [s for s in derive_seed_strings(g, depth) if len(s) <= max_len]
    r = random.Random(rng)
    tries = 0
    while len(out) < n and tries < 200:
        tries += 1
        for s in sample_vpg(g, 4 * n, max_depth, r):
            if 0 < len(s) <= max_len and s not in out:
                out.append(s)
                if len(out) >= n:
                    break
    return out[:n]


def held_out(g: Vpg, n: int = 500, rng: int = 1, exclude: Sequence[str] = (),
             max_depth: int = 10, max_len: int | None = None) -> list[str]:
    """``n`` distinct positives not in ``exclude`` (fewer if the language is small)."""
    r = random.Random(rng)
    banned = set(exclude)
    out: list[str] = []
    seen = set()
    tries = 0
    while len(out) < n and tries < 100:
        tries += 1
        for s in sample_vpg(g, n, max_depth, r):
            if s in seen or s in banned or (max_len is not None and len(s) > max_len):
                continue
            seen.add(s)
            out.append(s)
            if len(out) >= n:
                break
    return out
