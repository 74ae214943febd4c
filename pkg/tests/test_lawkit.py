import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import formulas

from eptl.datatypes import mvr_get_oracle
from eptl.errors import BoundError
from eptl.evaluator import Evaluator
from eptl.formula import EX, atom
from eptl.graph import chain, make_event
from eptl.lawkit import (
    CHAIN_BATTERY,
    Kind,
    Law,
    all_models,
    chain_equivalence_check,
    check_law,
    check_laws,
    enumerate_models,
    get_law,
    labeling_matcher,
    law_catalog,
    ltl_sat,
    posets,
    render_reports,
    serialize,
)
from eptl.parser import parse
from eptl.values import ValueSet


def brute_posets(n):
    """Filter every edge subset down to the strict partial orders."""
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    out = set()
    for bits in range(1 << len(pairs)):
        rel = {pairs[i] for i in range(len(pairs)) if bits >> i & 1}
        if any((b, a) in rel for a, b in rel):
            continue
        if all((a, d) in rel for a, b in rel for c, d in rel if b == c):
            out.add(frozenset(rel))
    return out


class TestEnumeration:
    @pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
    def test_posets_match_brute_force(self, n):
        got = posets(n)
        assert len(got) == len(set(got))
        assert set(got) == brute_posets(n)

    def test_known_counts(self):
        assert [len(posets(n)) for n in range(6)] == [1, 1, 3, 19, 219, 4231]

    @pytest.mark.parametrize("n, k, count", [(1, 1, 2), (3, 0, 19), (2, 1, 12), (2, 2, 48)])
    def test_model_counts(self, n, k, count):
        assert sum(1 for _ in enumerate_models(n, k)) == count

    def test_all_models_chains_sizes(self):
        assert sum(1 for _ in all_models(3, 0)) == 1 + 3 + 19

    @pytest.mark.parametrize("n, k", [(6, 1), (2, 4), (-1, 1)])
    def test_bounds(self, n, k):
        with pytest.raises(BoundError):
            list(enumerate_models(n, k))


class TestCatalog:
    def test_counts_by_kind(self):
        kinds = [law.kind for law in law_catalog()]
        assert kinds.count(Kind.EQUIVALENCE) >= 14
        assert kinds.count(Kind.IMPLICATION) >= 6
        assert kinds.count(Kind.NON_LAW) >= 6

    def test_names_unique(self):
        names = [law.name for law in law_catalog()]
        assert len(names) == len(set(names))

    def test_non_laws_need_fixture(self):
        with pytest.raises(ValueError):
            Law("x", Kind.NON_LAW, atom("p"), atom("q"))

    def test_unknown_law(self):
        with pytest.raises(KeyError):
            get_law("nope")

    @pytest.mark.parametrize(
        "name, event, witness",
        [
            # e1 reaches a p-successor and a q-successor, neither both.
            ("ax-or-converse", "e1", {"e2": ("p",), "e3": ("q",)}),
            ("ex-and-converse", "e1", {"e2": ("p",), "e3": ("q",)}),
            # one branch meets q, the other r.
            ("until-or-converse", "e1", {"e2": ("q",), "e4": ("r",)}),
            # a last event: AX holds vacuously, EX never.
            ("ax-implies-ex", "e2", {}),
        ],
    )
    def test_fixtures_refute_non_laws(self, name, event, witness):
        law = get_law(name)
        fx = law.fixture
        assert fx.event == event
        for eid, true_atoms in witness.items():
            assert tuple(a for a in "pqr" if fx.labeling[(eid, a)]) == true_atoms
        report = check_law(law)
        assert report.fixture_lhs is True and report.fixture_rhs is False
        assert report.ok

    def test_until_induction_fixture(self):
        for name in ("until-induction-ex", "until-induction-ax"):
            law = get_law(name)
            fx = law.fixture
            ev = Evaluator(fx.execution, matcher=labeling_matcher(fx.labeling))
            assert ev.sat("e1", law.lhs) and not ev.sat("e1", law.rhs)
        # the first step sits on p with both branches of U failing one step later
        assert not ev.sat("e2", parse("p() U q()"))
        assert not ev.sat("e5", parse("p() U q()"))


class TestCheckLaw:
    def test_true_law_has_no_counterexample(self):
        r = check_law(get_law("not-ex"), all_models(3, 1), props=1)
        assert r.ok and r.counterexample is None
        assert r.models == 2 + 12 + 19 * 8

    def test_false_equivalence_is_caught(self):
        law = Law("bogus", Kind.EQUIVALENCE, parse("F p()"), parse("p()"))
        r = check_law(law, all_models(2, 1), props=1)
        assert not r.ok
        cx = r.counterexample
        ev = Evaluator(cx.execution, matcher=labeling_matcher(cx.labeling))
        assert ev.sat(cx.event, law.lhs) != ev.sat(cx.event, law.rhs)
        doc = cx.to_trace_json()
        assert doc["at"] == cx.event and {e["op"] for e in doc["events"]} == {"label"}

    def test_atoms_are_substituted_when_props_are_scarce(self):
        law = Law("bogus-or", Kind.IMPLICATION, parse("p() | q()"), parse("p()"))
        r = check_law(law, all_models(1, 1), props=1)
        assert r.counterexample is None  # q is identified with p
        r = check_law(law, all_models(1, 2), props=2)
        assert r.counterexample is not None

    def test_conditions(self):
        r = check_laws([get_law("last-ax"), get_law("ax-implies-ex-non-last")], all_models(3, 1), props=1)
        assert all(x.ok for x in r)
        text = render_reports(r)
        assert "last-ax" in text and "FAIL" not in text

    def test_json(self):
        r = check_law(get_law("ax-or-converse"))
        doc = r.to_json()
        assert doc["kind"] == "non-law" and doc["fixture"]["lhs"] is True


class TestLtl:
    def test_until(self):
        assert ltl_sat((frozenset("p"), frozenset("q")), 0, parse("p() U q()"))

    def test_strong_next(self):
        assert not ltl_sat((frozenset("p"),), 0, EX(atom("p")))
        assert ltl_sat((frozenset("p"),), 0, parse("AX false"))

    def test_globally_not(self):
        assert ltl_sat((frozenset(),), 0, parse("G !p()"))

    def test_errors(self):
        with pytest.raises(IndexError):
            ltl_sat((), 0, parse("true"))
        with pytest.raises(ValueError):
            ltl_sat((frozenset(),), 0, parse("put(1)"))

    def test_chain_agreement(self):
        report = chain_equivalence_check(4, 2)
        assert report.ok, report.disagreements[:3]
        assert report.checked > 0

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.frozensets(st.sampled_from("pq")), min_size=1, max_size=5),
        formulas(atoms=("p", "q"), max_leaves=6),
    )
    def test_chain_agreement_random(self, trace, f):
        ids = [f"e{i + 1}" for i in range(len(trace))]
        A = chain([make_event(i, "tick") for i in ids])
        lab = {(e, a): a in s for e, s in zip(ids, trace) for a in "pq"}
        ev = Evaluator(A, matcher=labeling_matcher(lab))
        for j, e in enumerate(ids):
            assert ev.sat(e, f) == ltl_sat(tuple(trace), j, f)

    def test_battery_parses(self):
        assert all(parse(t) for t in CHAIN_BATTERY)


class TestSerialize:
    def test_concurrent_puts_serializations_hide_concurrency(self, concurrent_trace):
        """Every serialization of the concurrent-puts trace forces a single value at the final read."""
        orders = concurrent_trace.linear_extensions()
        assert len(orders) == 3
        finals = set()
        for order in orders:
            S = serialize(concurrent_trace, order)
            v = mvr_get_oracle(S, "e5")
            assert len(v) == 1
            finals.add(v)
        assert finals == {ValueSet.of([1]), ValueSet.of([2])}
        assert mvr_get_oracle(concurrent_trace, "e5") == ValueSet.of([1, 2])

    def test_serialization_is_a_chain(self, concurrent_trace):
        S = serialize(concurrent_trace, ["e1", "e3", "e4", "e2", "e5"])
        assert len(S.vis_reduction) == 4
        assert S.lt("e4", "e2")


def test_exhaustive_small_laws():
    reports = check_laws(law_catalog(), all_models(3, 2), props=2)
    bad = [r.law.name for r in reports if not r.ok]
    assert bad == []
