import pytest
from conftest import brute_accepts

from vstar.evaluation import (EvalReport, derive_seed_strings, f1, format_table, generate_seeds, held_out,
                              precision, recall)
from vstar.grammars import fixture
from vstar.vpg import parse_grammar


def test_f1_values():
    assert f1(0.42, 0.98) == pytest.approx(0.588, abs=1e-3)
    assert round(f1(0.42, 0.98), 2) == 0.59
    assert f1(1.0, 1.0) == 1.0
    assert f1(0.0, 1.0) == 0.0


def test_recall():
    assert recall(lambda s: s.startswith("a"), ["ab", "ba", "aa", "bb"]) == 0.5
    with pytest.raises(ValueError):
        recall(lambda s: True, [])


def test_fig1_seed_strings(fig1):
    seeds = derive_seed_strings(fig1)
    assert "agcdhbcd" in seeds and "agagcdhbhbcd" in seeds
    assert all(brute_accepts(fig1, s) for s in seeds)


def test_precision_of_overgeneral_grammar():
    g = parse_grammar('L -> "a" L | "b" L | ε')
    dyck = fixture("dyck1")
    p, samples = precision(g, lambda s: brute_accepts(dyck, s), 300, 0)
    assert len(samples) == 300
    assert 0 < p < 1
    assert p == sum(brute_accepts(dyck, s) for s in samples) / 300


def test_precision_of_exact_grammar():
    dyck = fixture("dyck1")
    p, _ = precision(dyck, lambda s: brute_accepts(dyck, s), 200, 3)
    assert p == 1.0
    with pytest.raises(ValueError):
        precision(dyck, lambda s: True, 0)


def test_generated_data_is_positive():
    g = fixture("mini-lisp")
    seeds = generate_seeds(g, 30)
    assert len(seeds) == len(set(seeds)) == 30
    data = held_out(g, 100, exclude=seeds)
    assert len(data) == 100 and not set(data) & set(seeds)
    assert all(brute_accepts(g, s) for s in seeds + data)


def test_report_and_table():
    stats = {"by_phase": {"token": 25, "vpa": 60, "eq": 15}}
    r = EvalReport(1.0, 0.5, f1(1.0, 0.5), stats, 42, 1000, 500, 1.25)
    assert r.query_split() == (100, 0.25, 0.75)
    d = r.to_dict(with_time=False)
    assert "elapsed" not in d and d["queries"] == 100 and d["pct_token"] == 25.0
    table = format_table([("demo", r)])
    lines = table.splitlines()
    assert lines[0].split() == ["Name", "Recall", "Precision", "F1", "#Queries", "%Q(Token)", "%Q(VPA)", "#TS", "Time"]
    assert lines[2].split() == ["demo", "1.00", "0.50", "0.67", "100", "25%", "75%", "42", "1.2s"]
    with pytest.raises(ValueError):
        EvalReport(1.5, 1.0, 1.0, {}, 0, 0, 0)
