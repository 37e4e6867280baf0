"""Structure inference followed by automaton learning, in character or token mode."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .alphabet import Tagging, erase_artificial, is_well_matched
from .equivalence import CorpusLimits, PerfectTeacher, SeedCombination, TestCorpus, build_corpus
from .learner import LearnResult, learn
from .oracle import MembershipOracle
from .sevpa import Sevpa, to_vpg
from .tags import TagConfig, TagResult, tag_infer
from .tokens import PartialTokenizer, TokenConfig, TokenResult, conv, token_infer
from .vpg import Vpg


class PipelineError(RuntimeError):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: str = "char"
    eq_mode: str = "seeds"
    eq_max_len: int = 8
    max_fragment: int = 20
    max_corpus: int = 100_000
    infixes: int = 1
    k_cap: int = 6
    max_frag: int = 8
    max_rounds: int = 1000
    rng_seed: int = 0
    precision_samples: int = 1000
    sample_depth: int = 12

    def __post_init__(self):
        if self.mode not in ("char", "token"):
            raise ValueError(f"mode must be 'char' or 'token', not {self.mode!r}")
        if self.eq_mode not in ("seeds", "perfect"):
            raise ValueError(f"eq mode must be 'seeds' or 'perfect', not {self.eq_mode!r}")
        for name in ("eq_max_len", "max_fragment", "max_corpus", "k_cap", "max_frag",
                     "max_rounds", "precision_samples", "sample_depth"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


class LearnedModel:
    """Learned machine plus the structure used to feed it raw strings."""

    def __init__(self, machine: Sevpa, tagging: Tagging | None = None,
                 tokenizer: PartialTokenizer | None = None, oracle=None):
        if (tagging is None) == (tokenizer is None):
            raise ValueError("give exactly one of tagging or tokenizer")
        self.machine = machine
        self.tagging = tagging
        self.tokenizer = tokenizer
        self.oracle = oracle

    @property
    def mode(self) -> str:
        return "char" if self.tokenizer is None else "token"

    def image(self, raw: str) -> str:
        if self.tokenizer is None:
            return raw
        return conv(self.tokenizer, raw, o=self.oracle)

    def accepts(self, raw: str) -> bool:
        return self.machine.accepts(self.image(raw))

    def grammar(self) -> Vpg:
        return to_vpg(self.machine)


@dataclass
class PipelineResult:
    model: LearnedModel
    learn: LearnResult
    structure: TagResult | TokenResult
    corpus: TestCorpus | None
    stats: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.learn.converged


def char_member(oracle, t: Tagging):
    def member(x: str) -> bool:
        return is_well_matched(x, t) and oracle(x)
    return member


def token_member(oracle, D: PartialTokenizer):
    t = D.tagging

    def member(x: str) -> bool:
        if not is_well_matched(x, t):
            return False
        raw = erase_artificial(x)
        return oracle(raw) and conv(D, raw, o=oracle) == x
    return member


def run_pipeline(oracle: MembershipOracle, seeds: Sequence[str], cfg: RunConfig = RunConfig(),
                 reference: Vpg | None = None, hook=None) -> PipelineResult:
    seeds = list(dict.fromkeys(seeds))
    if not seeds:
        raise PipelineError("no seed strings")
    limits = CorpusLimits(cfg.max_fragment, cfg.max_corpus, cfg.infixes)
    alphabet = sorted(set("".join(seeds)))

    with oracle.in_phase("token"):
        if cfg.mode == "char":
            structure = tag_infer(oracle, seeds, TagConfig(cfg.k_cap, cfg.max_frag))
            if structure.tagging is None:
                raise PipelineError(f"no compatible tagging found up to K={cfg.k_cap}")
            t = structure.tagging
            plains = tuple(c for c in alphabet if not t.is_tagged(c))
            member = char_member(oracle, t)
            images = list(seeds)
            reimage = None
            model_kw = {"tagging": t}
        else:
            structure = token_infer(oracle, seeds, TokenConfig(cfg.k_cap, cfg.max_frag))
            if structure.tokenizer is None:
                raise PipelineError(f"no compatible tokenizer found up to K={cfg.k_cap}")
            D = structure.tokenizer
            t = D.tagging
            plains = tuple(alphabet)
            member = token_member(oracle, D)
            images = [conv(D, s, o=oracle) for s in seeds]

            def reimage(raw):
                return conv(D, raw, o=oracle)
            model_kw = {"tokenizer": D}

    corpus = None
    if cfg.eq_mode == "perfect":
        if reference is None:
            raise PipelineError("the perfect teacher needs a reference grammar (vpg: oracle)")
        if cfg.mode != "char":
            raise PipelineError("the perfect teacher supports character mode only")
        teacher = PerfectTeacher(reference, alphabet, cfg.eq_max_len)
    else:
        with oracle.in_phase("eq"):
            corpus = build_corpus(seeds, t, limits, images=images, reimage=reimage)
        teacher = SeedCombination(corpus, oracle, member if cfg.mode == "token" else None)

    def eq(m: Sevpa):
        with oracle.in_phase("eq"):
            return teacher(m)

    def vpa_member(x: str) -> bool:
        with oracle.in_phase("vpa"):
            return member(x)

    def on_round():
        return {"unique_queries": oracle.stats().unique}

    result = learn(vpa_member, t, plains, eq, cfg.max_rounds, hook=hook, on_round=on_round)
    model = LearnedModel(result.machine, oracle=oracle, **model_kw)
    return PipelineResult(model, result, structure, corpus, oracle.stats().as_dict())


def trace_lines(result: LearnResult) -> str:
    return "".join(json.dumps(rec, sort_keys=True, ensure_ascii=True) + "\n" for rec in result.trace)
