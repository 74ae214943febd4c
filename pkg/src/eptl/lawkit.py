"""Executable checks for EPTL rewrite laws.

Laws are formula schemas over 0-ary atoms ``p``, ``q``, ``r``. They are checked
at every event of every small labeled poset (exhaustive small-model checking),
and the non-laws are refuted by hand-built fixture executions. A finite-trace
LTL evaluator supports the comparison of EPTL with LTL on totally ordered
executions.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Optional

from .errors import BoundError
from .evaluator import Evaluator
from .formula import (
    AX,
    EX,
    And,
    F,
    FalseF,
    Formula,
    G,
    Implies,
    Not,
    Or,
    Prop,
    Proposition,
    TrueF,
    Until,
    W,
    atom,
    children,
)
from .graph import AbstractExecution, Event, OperationRecord, _bits, chain, validate
from .parser import parse

MAX_EVENTS = 5
MAX_PROPS = 3
ATOMS = ("p", "q", "r")


class Kind(enum.Enum):
    EQUIVALENCE = "equivalence"
    IMPLICATION = "implication"
    NON_LAW = "non-law"


# -- labelings ------------------------------------------------------------

Labeling = Mapping  # (event id, atom name) -> bool


def labeling_matcher(labeling: Labeling):
    """Proposition matcher reading 0-ary atoms off a labeling."""

    def match(prop: Proposition, event: Event, interp) -> bool:
        return bool(labeling.get((event.id, prop.op_name), False))

    return match


def labeling_from_ops(A: AbstractExecution, atoms: Iterable[str] = ATOMS) -> dict:
    """Fixture traces mark an atom as true by naming the event's operation after it."""
    return {(e.id, a): e.op.name == a for e in A.events for a in atoms}


# -- model enumeration ----------------------------------------------------


@lru_cache(maxsize=None)
def posets(n: int) -> tuple:
    """Every strict partial order on points 0..n-1, as frozensets of pairs.

    Built by inserting point n-1 into each order on n-1 points with every
    compatible (down-set, up-set) pair: the down-set must be down-closed, the
    up-set up-closed, and everything below must sit below everything above.
    """
    if n == 0:
        return (frozenset(),)
    out = []
    new = n - 1
    for rel in posets(n - 1):
        below = {x: {a for a, b in rel if b == x} for x in range(new)}
        above = {x: {b for a, b in rel if a == x} for x in range(new)}
        for down_bits in range(1 << new):
            down = {x for x in range(new) if down_bits >> x & 1}
            if any(not below[x] <= down for x in down):
                continue
            rest = [x for x in range(new) if x not in down]
            for up_bits in range(1 << len(rest)):
                up = {rest[i] for i in range(len(rest)) if up_bits >> i & 1}
                if any(not above[x] <= up for x in up):
                    continue
                if any(u not in above[d] for d in down for u in up):
                    continue
                out.append(rel | {(d, new) for d in down} | {(new, u) for u in up})
    return tuple(out)


def event_ids(n: int) -> list:
    return [f"e{i + 1}" for i in range(n)]


@lru_cache(maxsize=None)
def _poset_executions(n: int) -> tuple:
    ids = event_ids(n)
    events = [Event(i, OperationRecord("tick")) for i in ids]
    return tuple(validate(events, [(ids[a], ids[b]) for a, b in rel]) for rel in posets(n))


def _check_bounds(n: int, k: int):
    if not 0 <= n <= MAX_EVENTS:
        raise BoundError(f"event bound {n} outside 0..{MAX_EVENTS}")
    if not 0 <= k <= MAX_PROPS:
        raise BoundError(f"proposition bound {k} outside 0..{MAX_PROPS}")


def labelings(ids: list, k: int) -> Iterator[dict]:
    slots = [(e, a) for e in ids for a in ATOMS[:k]]
    for bits in itertools.product((False, True), repeat=len(slots)):
        yield dict(zip(slots, bits))


def enumerate_models(max_events: int, props: int) -> Iterator[tuple]:
    """All (execution, labeling) pairs with exactly ``max_events`` events and
    ``props`` atoms, in a fixed order. See :func:`all_models` for every size."""
    _check_bounds(max_events, props)
    ids = event_ids(max_events)
    for A in _poset_executions(max_events):
        for lab in labelings(ids, props):
            yield A, lab


def all_models(max_events: int, props: int, min_events: int = 1) -> Iterator[tuple]:
    _check_bounds(max_events, props)
    for n in range(min_events, max_events + 1):
        yield from enumerate_models(n, props)


# -- laws -----------------------------------------------------------------


@dataclass(frozen=True)
class Fixture:
    execution: AbstractExecution
    labeling: dict
    event: str
    trace_name: str = ""


@dataclass(frozen=True)
class Law:
    name: str
    kind: Kind
    lhs: Formula
    rhs: Formula
    condition: Optional[str] = None  # None, "last" or "not-last"
    fixture: Optional[Fixture] = None
    claimed: str = "=>"  # how a non-law is usually stated: "=>" or "<=>"

    def __post_init__(self):
        if self.kind is Kind.NON_LAW and self.fixture is None:
            raise ValueError(f"non-law {self.name} needs a refuting fixture")

    def describe(self) -> str:
        op = {Kind.EQUIVALENCE: "<=>", Kind.IMPLICATION: "=>", Kind.NON_LAW: "=/=>"}[self.kind]
        text = f"{self.lhs} {op} {self.rhs}"
        if self.condition:
            text = f"[{self.condition} event] {text}"
        return text


def schema_atoms(f: Formula) -> set:
    if isinstance(f, Prop):
        return {f.prop.op_name}
    out = set()
    for c in children(f):
        out |= schema_atoms(c)
    return out


def rename_atoms(f: Formula, mapping: Mapping) -> Formula:
    if isinstance(f, Prop):
        return atom(mapping.get(f.prop.op_name, f.prop.op_name))
    if isinstance(f, (Not, EX, AX, F, G)):
        return type(f)(rename_atoms(f.sub, mapping))
    if isinstance(f, (Or, And, Implies, Until, W)):
        return type(f)(rename_atoms(f.left, mapping), rename_atoms(f.right, mapping))
    return f


def intern(f: Formula, table: dict) -> Formula:
    """Canonical shared instance, so identity-keyed memoization sees common subterms."""
    if isinstance(f, (Not, EX, AX, F, G)):
        f = type(f)(intern(f.sub, table))
    elif isinstance(f, (Or, And, Implies, Until, W)):
        f = type(f)(intern(f.left, table), intern(f.right, table))
    return table.setdefault(f, f)


def instantiations(law: Law, k: int) -> list:
    """Atom substitutions needed to cover a law with only ``k`` labeled atoms.

    With ``k`` at least the number of schema atoms the identity suffices, since
    labelings already range over every valuation (including equal atoms).
    """
    names = sorted(schema_atoms(law.lhs) | schema_atoms(law.rhs))
    if len(names) <= k:
        return [{}]
    targets = ATOMS[:k] or ()
    if not targets:
        # No labeled atom at all: every atom is false everywhere.
        return [{}]
    return [dict(zip(names, combo)) for combo in itertools.product(targets, repeat=len(names))]


def _fixture_dir():
    from importlib import resources

    return resources.files("eptl") / "fixtures"


def load_fixture_trace(name: str) -> AbstractExecution:
    from .trace_io import loads_trace

    return loads_trace((_fixture_dir() / name).read_text(encoding="utf-8"))


def _fixture(trace: str, event: str) -> Fixture:
    A = load_fixture_trace(trace)
    return Fixture(A, labeling_from_ops(A), event, trace)


def law_catalog() -> list:
    P = parse
    eq, imp, non = Kind.EQUIVALENCE, Kind.IMPLICATION, Kind.NON_LAW
    ax_or = _fixture("law_ax_or.json", "e1")
    last = _fixture("law_ax_or.json", "e2")
    u_or = _fixture("law_u_or.json", "e1")
    u_ind = _fixture("law_u_induction.json", "e1")
    return [
        # distributivity
        Law("ex-or-distrib", eq, P("EX p() | EX q()"), P("EX(p() | q())")),
        Law("ax-and-distrib", eq, P("AX p() & AX q()"), P("AX(p() & q())")),
        Law("f-or-distrib", eq, P("F p() | F q()"), P("F(p() | q())")),
        Law("g-and-distrib", eq, P("G p() & G q()"), P("G(p() & q())")),
        Law("until-and-distrib", eq, P("(p() U r()) & (q() U r())"), P("(p() & q()) U r()")),
        # negation
        Law("not-ex", eq, P("!EX p()"), P("AX !p()")),
        Law("not-ax", eq, P("!AX p()"), P("EX !p()")),
        Law("not-f", eq, P("!F p()"), P("G !p()")),
        Law("not-g", eq, P("!G p()"), P("F !p()")),
        # idempotence
        Law("f-idempotent", eq, P("F F p()"), P("F p()")),
        Law("g-idempotent", eq, P("G G p()"), P("G p()")),
        Law("until-idempotent", eq, P("p() U (p() U q())"), P("p() U q()")),
        # induction
        Law("f-induction", eq, P("F p()"), P("p() | EX F p()")),
        Law("g-induction", eq, P("G p()"), P("p() & AX G p()")),
        # one-directional distributivity
        Law("ax-or-weaken", imp, P("AX p() | AX q()"), P("AX(p() | q())")),
        Law("ex-and-weaken", imp, P("EX(p() & q())"), P("EX p() & EX q()")),
        Law("until-or-weaken", imp, P("(p() U q()) | (p() U r())"), P("p() U (q() | r())")),
        # last events
        Law("last-ax", imp, TrueF(), P("AX p()"), condition="last"),
        Law("last-not-ex", imp, TrueF(), P("!EX p()"), condition="last"),
        Law("ax-implies-ex-non-last", imp, P("AX p()"), P("EX p()"), condition="not-last"),
        # refuted candidates
        Law("ax-or-converse", non, P("AX(p() | q())"), P("AX p() | AX q()"), fixture=ax_or),
        Law("ex-and-converse", non, P("EX p() & EX q()"), P("EX(p() & q())"), fixture=ax_or),
        Law("until-or-converse", non, P("p() U (q() | r())"), P("(p() U q()) | (p() U r())"), fixture=u_or),
        Law("ax-implies-ex", non, P("AX p()"), P("EX p()"), fixture=last),
        Law(
            "until-induction-ex",
            non,
            P("p() U q()"),
            P("q() | (p() & EX(p() U q()))"),
            fixture=u_ind,
            claimed="<=>",
        ),
        Law(
            "until-induction-ax",
            non,
            P("p() U q()"),
            P("q() | (p() & AX(p() U q()))"),
            fixture=u_ind,
            claimed="<=>",
        ),
    ]


def get_law(name: str) -> Law:
    for law in law_catalog():
        if law.name == name:
            return law
    raise KeyError(name)


# -- checking -------------------------------------------------------------


@dataclass(frozen=True)
class Counterexample:
    execution: AbstractExecution
    labeling: dict
    event: str
    substitution: dict
    lhs: bool
    rhs: bool

    def to_trace_json(self) -> dict:
        """Trace-schema snippet; each event lists its true atoms as arguments."""
        events = []
        for e in self.execution.events:
            true_atoms = sorted(a for (eid, a), v in self.labeling.items() if eid == e.id and v)
            events.append({"id": e.id, "op": "label", "args": true_atoms})
        vis = sorted([list(p) for p in self.execution.vis_reduction])
        return {"events": events, "vis": vis, "at": self.event, "substitution": self.substitution}


@dataclass
class LawReport:
    law: Law
    models: int = 0
    counterexample: Optional[Counterexample] = None
    fixture_lhs: Optional[bool] = None
    fixture_rhs: Optional[bool] = None

    @property
    def fixture_refutes(self) -> bool:
        return self.fixture_lhs is True and self.fixture_rhs is False

    @property
    def ok(self) -> bool:
        if self.law.kind is Kind.NON_LAW:
            return self.fixture_refutes
        return self.counterexample is None

    def to_json(self) -> dict:
        out = {
            "law": self.law.name,
            "kind": self.law.kind.value,
            "statement": self.law.describe(),
            "models_checked": self.models,
            "ok": self.ok,
            "counterexample": self.counterexample.to_trace_json() if self.counterexample else None,
        }
        if self.law.fixture is not None:
            out["fixture"] = {
                "trace": self.law.fixture.trace_name,
                "event": self.law.fixture.event,
                "lhs": self.fixture_lhs,
                "rhs": self.fixture_rhs,
            }
        return out


def _condition_mask(A: AbstractExecution, condition: Optional[str]) -> int:
    if condition is None:
        return A.full_mask
    last = sum(1 << i for i in range(len(A)) if not A.succ_mask(i))
    return last if condition == "last" else A.full_mask & ~last


def _violations(ev: Evaluator, law: Law, lhs: Formula, rhs: Formula, conditions: dict) -> int:
    """Bitmask of events where the candidate rule fails."""
    left, right = ev.mask(lhs), ev.mask(rhs)
    if law.kind is Kind.EQUIVALENCE:
        bad = left ^ right
    else:
        bad = left & ~right
    return bad & conditions[law.condition]


def check_laws(laws: list, models: Iterable[tuple], props: int = 2) -> list:
    """Check every law on every model in a single pass over the stream."""
    reports = [LawReport(law) for law in laws]
    table = {}
    plans = [
        [
            (sub, intern(rename_atoms(law.lhs, sub), table), intern(rename_atoms(law.rhs, sub), table))
            for sub in instantiations(law, props)
        ]
        for law in laws
    ]
    for A, lab in models:
        ev = Evaluator(A, matcher=labeling_matcher(lab))
        conditions = {c: _condition_mask(A, c) for c in (None, "last", "not-last")}
        for report, plan in zip(reports, plans):
            report.models += 1
            if report.counterexample is not None:
                continue
            for sub, lhs, rhs in plan:
                bad = _violations(ev, report.law, lhs, rhs, conditions)
                if bad:
                    j = next(_bits(bad))
                    report.counterexample = Counterexample(
                        A, dict(lab), A.events[j].id, sub, bool(ev.mask(lhs) >> j & 1), bool(ev.mask(rhs) >> j & 1)
                    )
                    break
    for report in reports:
        fx = report.law.fixture
        if fx is not None:
            ev = Evaluator(fx.execution, matcher=labeling_matcher(fx.labeling))
            report.fixture_lhs = ev.sat(fx.event, report.law.lhs)
            report.fixture_rhs = ev.sat(fx.event, report.law.rhs)
    return reports


def check_law(law: Law, models: Iterable[tuple] = (), props: int = 2) -> LawReport:
    return check_laws([law], models, props)[0]


def render_reports(reports: list) -> str:
    rows = [("law", "kind", "models", "result", "detail")]
    for r in reports:
        if r.law.kind is Kind.NON_LAW:
            detail = f"fixture {r.law.fixture.trace_name}@{r.law.fixture.event}: lhs={r.fixture_lhs} rhs={r.fixture_rhs}"
            if r.counterexample is not None:
                detail += f"; small-model counterexample at {r.counterexample.event}"
        elif r.counterexample is not None:
            detail = "COUNTEREXAMPLE " + json.dumps(r.counterexample.to_trace_json())
        else:
            detail = ""
        rows.append((r.law.name, r.law.kind.value, str(r.models), "ok" if r.ok else "FAIL", detail))
    widths = [max(len(row[c]) for row in rows) for c in range(4)]
    lines = ["  ".join(row[c].ljust(widths[c]) for c in range(4)) + "  " + row[4] for row in rows]
    return "\n".join(line.rstrip() for line in lines)


# -- finite-trace LTL -----------------------------------------------------

LtlTrace = tuple  # tuple of frozensets of atom names


def ltl_sat(trace: LtlTrace, j: int, f: Formula) -> bool:
    """Finite-trace LTL. EX is the strong next step, AX the weak one."""
    n = len(trace)
    if not 0 <= j < n:
        raise IndexError(f"position {j} outside trace of length {n}")
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Prop):
        if f.prop.arg_patterns or f.prop.ret_predicate is not None:
            raise ValueError(f"LTL traces only carry 0-ary atoms, got {f}")
        return f.prop.op_name in trace[j]
    if isinstance(f, Not):
        return not ltl_sat(trace, j, f.sub)
    if isinstance(f, Or):
        return ltl_sat(trace, j, f.left) or ltl_sat(trace, j, f.right)
    if isinstance(f, And):
        return ltl_sat(trace, j, f.left) and ltl_sat(trace, j, f.right)
    if isinstance(f, Implies):
        return not ltl_sat(trace, j, f.left) or ltl_sat(trace, j, f.right)
    if isinstance(f, EX):
        return j + 1 < n and ltl_sat(trace, j + 1, f.sub)
    if isinstance(f, AX):
        return j + 1 >= n or ltl_sat(trace, j + 1, f.sub)
    if isinstance(f, Until):
        return any(
            ltl_sat(trace, k, f.right) and all(ltl_sat(trace, i, f.left) for i in range(j, k))
            for k in range(j, n)
        )
    if isinstance(f, F):
        return ltl_sat(trace, j, Until(TrueF(), f.sub))
    if isinstance(f, G):
        return ltl_sat(trace, j, Not(F(Not(f.sub))))
    if isinstance(f, W):
        return ltl_sat(trace, j, Or(G(f.left), Until(f.left, f.right)))
    raise TypeError(f"not a formula: {f!r}")


CHAIN_BATTERY = (
    "p() U q()",
    "F p()",
    "G p()",
    "p() W q()",
    "EX p()",
    "AX p()",
    "!(p() U q())",
    "EX(p() U q())",
    "AX(p() U q())",
    "G(p() => F q())",
    "F(p() & EX q())",
    "(p() U q()) U p()",
    "G(p() | AX q())",
    "p() U (q() W !p())",
    "F G p() & G F q()",
)


@dataclass
class ChainReport:
    checked: int = 0
    disagreements: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements


def chain_execution(n: int) -> AbstractExecution:
    return chain([Event(i, OperationRecord("tick")) for i in event_ids(n)])


def chain_equivalence_check(n: int, k: int, battery: Iterable[str] = CHAIN_BATTERY) -> ChainReport:
    """Compare EPTL on every chain of up to ``n`` events with finite-trace LTL."""
    _check_bounds(n, k)
    atoms = ATOMS[:k]
    formulas = []
    for text in battery:
        f = parse(text)
        names = sorted(schema_atoms(f))
        if len(names) <= k:
            formulas.append(f)
        elif atoms:
            for combo in itertools.product(atoms, repeat=len(names)):
                formulas.append(rename_atoms(f, dict(zip(names, combo))))
        else:
            formulas.append(f)
    report = ChainReport()
    for length in range(1, n + 1):
        A = chain_execution(length)
        ids = event_ids(length)
        for lab in labelings(ids, k):
            trace = tuple(frozenset(a for a in atoms if lab[(e, a)]) for e in ids)
            ev = Evaluator(A, matcher=labeling_matcher(lab))
            for f in formulas:
                for pos, eid in enumerate(ids):
                    report.checked += 1
                    eptl, ltl = ev.sat(eid, f), ltl_sat(trace, pos, f)
                    if eptl != ltl:
                        report.disagreements.append((trace, pos, str(f), eptl, ltl))
    return report


def serialize(A: AbstractExecution, order: list) -> AbstractExecution:
    """The same events, totally ordered as given (one serialization)."""
    return chain([A.event(i) for i in order])
