from itertools import product

import pytest
from conftest import brute_accepts

from vstar.alphabet import Tagging
from vstar.grammars import FIXTURES, fixture
from vstar.vpg import (Eps, GrammarError, Linear, Match, Vpg, derivation_contexts, load_grammar,
                       parse_grammar, productive, prune, recognize_vpg, sample_vpg, shortest_strings)


def all_strings(alphabet, n):
    for k in range(n + 1):
        for t in product(alphabet, repeat=k):
            yield "".join(t)


@pytest.mark.parametrize("name", ["fig1", "dyck1", "dyck2", "mini-json", "mini-lisp"])
def test_recognizer_matches_brute_force(name):
    g = fixture(name)
    alphabet = sorted(g.terminals)
    n = 6 if len(alphabet) <= 6 else 4
    for s in all_strings(alphabet, n):
        assert g.accepts(s) == brute_accepts(g, s), s


@pytest.mark.parametrize("name", ["toy-xml", "mini-xml"])
def test_token_recognizer_matches_brute_force(name):
    g = fixture(name)
    toks = sorted(t for t in g.terminals if len(t) > 1) + ["p", "x", "<", "/"]
    for k in range(5):
        for t in product(toks, repeat=k):
            s = "".join(t)
            assert g.accepts(s) == brute_accepts(g, s), s


def test_fig1_membership():
    g = fixture("fig1")
    for s in ["", "cd", "agcdhbcd", "agagcdhbhbcd", "aghb", "agcdcdhbcd"]:
        assert g.accepts(s)
    for s in ["a", "ab", "agb", "aghbb", "dc", "agcdhbc"]:
        assert not g.accepts(s)
    assert g.pairs() == [("a", "b"), ("g", "h")]
    assert g.tagging() == Tagging((("a", "b"), ("g", "h")))
    assert recognize_vpg(g, "aghb")


def test_parse_forms():
    g = parse_grammar('''
        # comment
        %start S
        S -> <"(" S ")"> S | 'x' S | [ab] S | eps
    ''')
    assert g.start == "S"
    assert Match("S", "(", "S", ")", "S") in g.rules
    assert Linear("S", "x", "S") in g.rules
    assert Linear("S", "a", "S") in g.rules and Linear("S", "b", "S") in g.rules
    assert Eps("S") in g.rules
    assert g.accepts("(ax)b") and not g.accepts("(")


def test_text_and_json_round_trip(tmp_path):
    for fx in FIXTURES.values():
        g = fx.grammar()
        assert parse_grammar(g.to_text()) == g
        assert Vpg.from_dict(g.to_dict()) == g
        p = tmp_path / f"{fx.name}.json"
        p.write_text(g.to_json())
        assert load_grammar(p) == g


def test_grammar_errors():
    with pytest.raises(GrammarError):
        parse_grammar("L -> L L")
    with pytest.raises(GrammarError):
        parse_grammar("")
    with pytest.raises(GrammarError):
        # "a" used both as call and as plain
        parse_grammar('L -> <"a" L "b"> L | "a" L | ε')
    with pytest.raises(GrammarError):
        Vpg(("L",), "M", (Eps("L"),))
    with pytest.raises(GrammarError):
        Vpg(("L",), "L", (Linear("L", "a", "Z"),))


def test_shortest_and_productive():
    g = fixture("fig1")
    short = shortest_strings(g)
    assert short["L"] == () and short["B"] == ("d",) and short["A"] == ("g", "h")
    g2 = parse_grammar('L -> "a" L | "b" M\nM -> "c" M')
    assert productive(g2) == set()
    with pytest.raises(GrammarError):
        prune(g2)


def test_prune_drops_dead_rules():
    g = parse_grammar('L -> "a" L | ε | "b" M\nM -> "c" M\nU -> ε')
    p = prune(g)
    assert p.nonterminals == ("L",)
    assert all(brute_accepts(p, s) == g.accepts(s) for s in all_strings("abc", 5))


def test_sampling_is_in_language_and_seeded():
    for name in FIXTURES:
        g = fixture(name)
        xs = sample_vpg(g, 200, 10, rng=3)
        assert all(brute_accepts(g, s) for s in xs)
        assert xs == sample_vpg(g, 200, 10, rng=3)


def test_derivation_contexts_fig1():
    g = fixture("fig1")
    ctx = derivation_contexts(g, "L")
    assert ctx["L"] == ("", "")
    left, right = ctx["A"]
    assert (left, right) == ("a", "b")
    for nt, (l, r) in derivation_contexts(g, "A").items():
        s = l + "".join(shortest_strings(g)[nt]) + r
        assert brute_accepts(g, "a" + s + "b"), nt
