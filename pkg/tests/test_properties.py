"""Property suites; every one runs at least PROPERTY_CASES examples."""
from functools import lru_cache
from itertools import product

from conftest import PROPERTY_CASES, brute_accepts
from hypothesis import given, settings
from hypothesis import strategies as st

from vstar.alphabet import Tagging, apply_tagging, erase_artificial, is_well_matched, unmatched_profile, untag
from vstar.grammars import fixture
from vstar.learner import learn
from vstar.lstar import Dfa, lstar, minimize
from vstar.oracle import MembershipOracle, vpg_oracle
from vstar.pipeline import RunConfig, run_pipeline
from vstar.sevpa import to_vpg
from vstar.tokens import conv, tokenize

CASES = settings(max_examples=PROPERTY_CASES)
T2 = Tagging((("a", "b"), ("(", ")")))
text = st.text(alphabet="ab()cd", max_size=16)


def stack_wm(s):
    # independent reference: plain bracket matching
    st_ = []
    for c in s:
        if c in "a(":
            st_.append(c)
        elif c in "b)":
            if not st_ or st_.pop() != {"b": "a", ")": "("}[c]:
                return False
    return not st_


@CASES
@given(text)
def test_tagging_round_trip(s):
    ts = apply_tagging(T2, s)
    assert untag(ts) == s
    assert [sym.char for sym in ts.symbols] == list(s)


@CASES
@given(text)
def test_well_matched_iff_empty_profile(s):
    calls, rets = unmatched_profile(s, T2)
    assert is_well_matched(s, T2) == (not calls and not rets) == stack_wm(s)


@CASES
@given(text, text)
def test_well_matched_closed_under_concatenation(x, y):
    if is_well_matched(x, T2) and is_well_matched(y, T2):
        assert is_well_matched(x + y, T2)


# -- learner ---------------------------------------------------------------

AB = Tagging((("a", "b"),))
WM6 = [w for n in range(7) for w in map("".join, product("abc", repeat=n)) if is_well_matched(w, AB)]


def target(depth, mod, r):
    """Well-matched strings of nesting depth <= depth whose top-level c count is r mod ``mod``."""
    def member(w):
        if not is_well_matched(w, AB):
            return False
        d = top = 0
        for ch in w:
            if ch == "a":
                d += 1
                if d > depth:
                    return False
            elif ch == "b":
                d -= 1
            elif d == 0:
                top += 1
        return top % mod == r
    return member


def list_teacher(member, tests):
    return lambda h: next((w for w in tests if h.accepts(w) != member(w)), None)


params = st.tuples(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2)).map(
    lambda t: (t[0], t[1], t[2] % t[1]))


@CASES
@given(params, st.randoms(use_true_random=False))
def test_learner_invariants_hold_after_every_step(p, rnd):
    member = target(*p)
    tests = list(WM6)
    rnd.shuffle(tests)

    def hook(lr, event):
        lr.audit(closed=(event == "close"))

    res = learn(member, AB, ("c",), list_teacher(member, tests), hook=hook)
    assert res.converged
    assert all(res.machine.accepts(w) == member(w) for w in WM6)


@lru_cache(maxsize=None)
def learned_machine(p):
    member = target(*p)
    return learn(member, AB, ("c",), list_teacher(member, WM6)).machine


@CASES
@given(params, st.text(alphabet="abc", max_size=10))
def test_exported_grammar_has_machine_language(p, w):
    m = learned_machine(p)
    g = to_vpg(m)
    assert g.accepts(w) == m.accepts(w) == brute_accepts(g, w)


# -- oracle cache ------------------------------------------------------------

@CASES
@given(st.lists(st.text(alphabet="xy", max_size=4), max_size=30))
def test_cache_is_transparent(queries):
    calls = []

    def backend(s):
        calls.append(s)
        return len(s) % 2 == 0

    o = MembershipOracle(backend)
    assert [o(s) for s in queries] == [len(s) % 2 == 0 for s in queries]
    stats = o.stats()
    assert sorted(calls) == sorted(set(queries))
    assert stats.unique == len(set(queries)) and stats.total_raw == len(queries)
    assert stats.cache_hits == len(queries) - len(set(queries))


# -- tokenizer ----------------------------------------------------------------

@lru_cache(maxsize=None)
def xml_tokenizer():
    g = fixture("toy-xml")
    res = run_pipeline(vpg_oracle(g), ["<p><p>p</p></p>", "<p><p><p>p</p></p></p>"], RunConfig(mode="token"))
    return res.model.tokenizer


@CASES
@given(st.text(alphabet="<>/p", max_size=16))
def test_conv_erases_back(s):
    D = xml_tokenizer()
    c = conv(D, s)
    assert erase_artificial(c) == s
    # every token gets exactly one bracket
    assert len(c) - len(s) == len(tokenize(D, s))


# -- L* on regular languages -----------------------------------------------

WORDS8 = [w for n in range(9) for w in map("".join, product("ab", repeat=n))]


@st.composite
def dfas(draw):
    n = draw(st.integers(1, 4))
    trans = {(q, c): draw(st.integers(0, n - 1)) for q in range(n) for c in "ab"}
    acc = frozenset(q for q in range(n) if draw(st.booleans()))
    return Dfa(("a", "b"), n, acc, trans)


@CASES
@given(dfas())
def test_lstar_learns_minimal_dfa(d):
    res = lstar(d.accepts, "ab", list_teacher(d.accepts, WORDS8))
    assert res.converged
    assert res.dfa.n_states == minimize(d).n_states
    assert all(res.dfa.accepts(w) == d.accepts(w) for w in WORDS8)
