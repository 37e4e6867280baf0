import pytest
from conftest import brute_accepts

from vstar.alphabet import Tagging
from vstar.equivalence import count_disagreements
from vstar.grammars import fixture
from vstar.oracle import MembershipOracle, vpg_oracle
from vstar.pipeline import LearnedModel, PipelineError, RunConfig, char_member, run_pipeline, token_member, trace_lines
from vstar.tokens import conv

FIG1_SEEDS = ["agcdcdhbcd", "agagcdhbhbcd"]
XML_SEEDS = ["<p><p>p</p></p>", "<p><p><p>p</p></p></p>"]


def test_fig1_seed_mode():
    g = fixture("fig1")
    res = run_pipeline(vpg_oracle(g), FIG1_SEEDS)
    assert res.converged and res.model.tagging == Tagging((("a", "b"),))
    assert count_disagreements(res.model.machine, g, "abcdgh", 7)[1] == 0
    phases = res.stats["by_phase"]
    assert set(phases) <= {"token", "vpa", "eq"} and phases["token"] > 0 and phases["vpa"] > 0
    assert sum(phases.values()) == res.stats["unique"]


def test_fig1_perfect_teacher():
    g = fixture("fig1")
    res = run_pipeline(vpg_oracle(g), FIG1_SEEDS, RunConfig(eq_mode="perfect", eq_max_len=7), reference=g)
    assert res.converged and res.corpus is None
    with pytest.raises(PipelineError):
        run_pipeline(vpg_oracle(g), FIG1_SEEDS, RunConfig(eq_mode="perfect"))


def test_toy_xml_token_mode():
    g = fixture("toy-xml")
    o = vpg_oracle(g)
    res = run_pipeline(o, XML_SEEDS, RunConfig(mode="token"))
    assert res.converged and res.model.mode == "token"
    for s in ["p", "<p>pp</p>", "ppp", "<p><p>p</p></p>", "<p></p>", "<p>p</p><p>p</p>", "p<p>p</p>"]:
        assert res.model.accepts(s) == brute_accepts(g, s), s


def test_token_member_requires_own_image():
    g = fixture("toy-xml")
    o = vpg_oracle(g)
    D = run_pipeline(o, XML_SEEDS, RunConfig(mode="token")).model.tokenizer
    member = token_member(o, D)
    a, b = D.brackets[0]
    assert member(conv(D, "<p>p</p>"))
    # right raw text, wrong bracketing
    assert not member("<p>p</p>")
    assert not member(a + "<p>" + b)


def test_char_member():
    t = Tagging((("a", "b"),))
    m = char_member(lambda s: True, t)
    assert m("ab") and not m("ba")


def test_errors():
    o = MembershipOracle(lambda s: True)
    with pytest.raises(PipelineError):
        run_pipeline(o, [])
    with pytest.raises(ValueError):
        RunConfig(mode="word")
    with pytest.raises(ValueError):
        RunConfig(max_rounds=0)
    with pytest.raises(ValueError):
        LearnedModel(None)


def test_trace_lines_are_json():
    import json
    res = run_pipeline(vpg_oracle(fixture("fig1")), FIG1_SEEDS)
    lines = trace_lines(res.learn).splitlines()
    assert len(lines) == len(res.learn.trace)
    assert all("unique_queries" in json.loads(line) for line in lines)
