import pytest

from vstar.alphabet import (Alphabet, Kind, Symbol, Tagging, TaggingError, apply_tagging,
                            artificial_pair, erase_artificial, is_artificial, is_well_matched,
                            render, render_brackets, tagged_is_well_matched, tagged_profile,
                            unmatched_profile, untag)

AB = Tagging((("a", "b"),))


def test_apply_tagging_fig1_seed():
    ts = apply_tagging(AB, "agcdhbcd")
    kinds = [s.kind for s in ts.symbols]
    assert kinds[0] is Kind.CALL and kinds[5] is Kind.RETURN
    assert all(k is Kind.PLAIN for i, k in enumerate(kinds) if i not in (0, 5))
    assert str(ts) == "‹agcdhb›cd"


def test_empty_tagging_is_all_plain():
    ts = apply_tagging(Tagging(), "abc")
    assert ts.symbols == tuple(Symbol(c, Kind.PLAIN, -1) for c in "abc")


def test_empty_string():
    ts = apply_tagging(AB, "")
    assert len(ts) == 0 and untag(ts) == ""


def test_character_outside_alphabet_rejected():
    with pytest.raises(TaggingError):
        apply_tagging(AB, "axb", Alphabet(tuple("ab")))


def test_well_matched_examples():
    assert is_well_matched("agcdcdhbcd", AB)
    assert not is_well_matched("agcdcdhbcd", Tagging((("a", "h"), ("g", "b"))))
    assert is_well_matched("", AB)
    assert tagged_is_well_matched(apply_tagging(AB, "ab"))


def test_well_matched_rejects_crossed_pairs():
    t = Tagging((("(", ")"), ("[", "]")))
    assert is_well_matched("([])[]", t)
    assert not is_well_matched("([)]", t)
    assert not is_well_matched(")(", t)
    assert not is_well_matched("((", t)


def test_unmatched_profile():
    assert unmatched_profile("ag", AB) == ([0], [])
    assert unmatched_profile("hb", AB) == ([], [0])
    assert unmatched_profile("agcdhbcd", AB) == ([], [])
    assert tagged_profile(apply_tagging(AB, "bba")) == ([0], [0, 0])


def test_unique_pairing_enforced():
    with pytest.raises(TaggingError):
        Tagging((("a", "b"), ("a", "c")))
    with pytest.raises(TaggingError):
        Tagging((("a", "a"),))
    with pytest.raises(TaggingError):
        Tagging((("ab", "c"),))


def test_tagging_validate_and_json():
    t = Tagging((("a", "b"), ("g", "h")))
    t.validate(Alphabet.of(["abgh"]))
    with pytest.raises(TaggingError):
        t.validate(Alphabet(tuple("ab")))
    assert Tagging.from_json(t.to_json()) == t
    assert t.calls == ("a", "g") and t.returns == ("b", "h") and t.k == 2


def test_alphabet_invariants():
    assert Alphabet(tuple("cba")).chars == ("a", "b", "c")
    with pytest.raises(TaggingError):
        Alphabet(())
    with pytest.raises(TaggingError):
        Alphabet(tuple("aa"))


def test_artificial_pair_avoids_collisions():
    a, b = artificial_pair(0)
    assert is_artificial(a) and is_artificial(b) and a != b
    a2, b2 = artificial_pair(0, avoid=[a])
    assert a2 != a and is_artificial(a2)
    assert artificial_pair(1)[0] not in (a, b)


def test_erase_and_render_brackets():
    a, b = artificial_pair(0)
    t = Tagging(((a, b),))
    img = a + "<p>" + "p" + "</p>" + b
    assert erase_artificial(img) == "<p>p</p>"
    assert render_brackets(img, t) == "◁<p>p</p>▷"
    assert render(img, t) == "◁<p>p</p>▷"
