"""EPTL satisfaction over abstract executions.

Each subformula is evaluated once per interpretation into a bitmask of the
events that satisfy it (bit ``i`` stands for ``A.events[i]``). Masks are
memoized by subformula and by the interpretation restricted to that
subformula's free variables, so common subterms and variable-free parts are
shared across interpretations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional

from .errors import EmptyDomainError, UnboundVariableError
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
    TrueF,
    Until,
    W,
    free_vars,
    match_prop,
)
from .graph import AbstractExecution, _bits
from .values import ValueSet, value_key

Matcher = Callable  # (Proposition, Event, Mapping) -> bool
FRESH_VALUE = "⊥"


def _interp_key(f: Formula, interp: Mapping) -> tuple:
    names = free_vars(f)
    if not names:
        return ()
    missing = names - interp.keys()
    if missing:
        raise UnboundVariableError(sorted(missing)[0])
    return tuple((n, value_key(interp[n])) for n in sorted(names))


class EvalCache:
    """Write-once table of satisfaction masks for one execution and matcher."""

    def __init__(self):
        self._table = {}

    def get(self, key):
        return self._table.get(key)

    def put(self, key, mask: int):
        # Idempotent: a recomputation always yields the same mask.
        self._table.setdefault(key, mask)

    def __len__(self):
        return len(self._table)


class Evaluator:
    """Evaluates formulas on one execution under one interpretation."""

    def __init__(
        self,
        execution: AbstractExecution,
        interp: Optional[Mapping] = None,
        *,
        matcher: Matcher = match_prop,
        cache: Optional[EvalCache] = None,
        memo: bool = True,
    ):
        self.A = execution
        self.interp = dict(interp or {})
        self.matcher = matcher
        self.memo = memo
        self.cache = cache
        self.full = execution.full_mask
        # Per-evaluator memo by node identity; the optional shared cache is
        # structural and survives across interpretations.
        self._local = {}
        n = len(execution)
        self._up = tuple(execution.succ_mask(i, inclusive=True) for i in range(n))
        self._down = tuple(execution.pred_mask(i, inclusive=True) for i in range(n))
        self._imm = tuple(execution.imm_mask(i) for i in range(n))

    def sat(self, event_id, f: Formula) -> bool:
        return bool(self.mask(f) >> self.A.index(event_id) & 1)

    def mask(self, f: Formula) -> int:
        if not self.memo:
            return self._compute(f)
        local = self._local.get(id(f))
        if local is not None:
            return local[1]
        if self.cache is None:
            hit = self._compute(f)
        else:
            key = (f, _interp_key(f, self.interp))
            hit = self.cache.get(key)
            if hit is None:
                hit = self._compute(f)
                self.cache.put(key, hit)
        self._local[id(f)] = (f, hit)
        return hit

    def _compute(self, f: Formula) -> int:
        try:
            rule = _RULES[type(f)]
        except KeyError:
            raise TypeError(f"not a formula: {f!r}") from None
        return rule(self, f)

    def _prop(self, f: Prop) -> int:
        out = 0
        for i, e in enumerate(self.A.events):
            if self.matcher(f.prop, e, self.interp):
                out |= 1 << i
        return out

    def _ex(self, f: EX) -> int:
        s = self.mask(f.sub)
        return sum(1 << i for i, imm in enumerate(self._imm) if imm & s)

    def _ax(self, f: AX) -> int:
        bad = self.full & ~self.mask(f.sub)
        return sum(1 << i for i, imm in enumerate(self._imm) if not imm & bad)

    # F, G and W use their direct readings; the definitional expansions
    # (true U p, !F!p, Gp | pUq) are checked against these in the law suite.
    def _f(self, f: F) -> int:
        s = self.mask(f.sub)
        return sum(1 << i for i, up in enumerate(self._up) if up & s)

    def _always(self, sub: int) -> int:
        bad = self.full & ~sub
        return sum(1 << i for i, up in enumerate(self._up) if not up & bad)

    def _until(self, phi: int, psi: int) -> int:
        """Events e with a psi at or after e, and for every non-phi e3 >= e
        some psi event e2 with e <= e2 <= e3."""
        down = self._down
        out = 0
        for i, future in enumerate(self._up):
            if not future & psi:
                continue
            if all(future & down[j] & psi for j in _bits(future & ~phi)):
                out |= 1 << i
        return out

    # -- diagnostics ------------------------------------------------------

    def _minimal(self, mask: int) -> int:
        for j in _bits(mask):
            if not self.A.pred_mask(j) & mask:
                return j
        raise ValueError("empty mask")

    def _unguarded_failure(self, i: int, phi: int, psi: int) -> Optional[int]:
        """A non-phi event after i with no psi event between i and it."""
        future = self.A.succ_mask(i, inclusive=True)
        bad = 0
        for j in _bits(future & ~phi):
            if not future & self.A.pred_mask(j, inclusive=True) & psi:
                bad |= 1 << j
        return self._minimal(bad) if bad else None

    def blame(self, i: int, f: Formula, path: tuple = (), holds: bool = False) -> tuple:
        """Locate why ``f`` evaluates to ``holds`` at event index ``i``.

        Returns ``(path, index)``: the path of child positions down to the
        subformula responsible, and the event where it is decided.
        """
        A = self.A
        if isinstance(f, (TrueF, FalseF, Prop)):
            return path, i
        if isinstance(f, Not):
            return self.blame(i, f.sub, path + (0,), not holds)
        if isinstance(f, (Or, And)):
            # A true Or / false And is decided by one child; otherwise both agree.
            decisive = holds if isinstance(f, Or) else not holds
            if decisive and bool(self.mask(f.left) >> i & 1) == holds:
                return self.blame(i, f.left, path + (0,), holds)
            return self.blame(i, f.right, path + (1,), holds)
        if isinstance(f, Implies):
            if holds and not self.mask(f.left) >> i & 1:
                return self.blame(i, f.left, path + (0,), False)
            return self.blame(i, f.right, path + (1,), holds)
        if isinstance(f, (EX, AX)):
            sub = self.mask(f.sub)
            succ = A.imm_mask(i)
            pick = succ & sub if holds else succ & ~sub
            if not pick:
                return path, i
            return self.blame(self._minimal(pick), f.sub, path + (0,), holds)
        if isinstance(f, (F, G)):
            sub = self.mask(f.sub)
            future = A.succ_mask(i, inclusive=True)
            pick = future & sub if holds else future & ~sub
            if not pick or (holds and isinstance(f, G)) or (not holds and isinstance(f, F)):
                return path, i
            return self.blame(self._minimal(pick), f.sub, path + (0,), holds)
        if isinstance(f, (Until, W)):
            phi, psi = self.mask(f.left), self.mask(f.right)
            future = A.succ_mask(i, inclusive=True)
            if holds:
                if future & psi and self._unguarded_failure(i, phi, psi) is None:
                    return self.blame(self._minimal(future & psi), f.right, path + (1,), True)
                return path, i
            j = self._unguarded_failure(i, phi, psi)
            if j is None:
                return path, i
            return self.blame(j, f.left, path + (0,), False)
        raise TypeError(f"not a formula: {f!r}")


_RULES = {
    TrueF: lambda ev, f: ev.full,
    FalseF: lambda ev, f: 0,
    Prop: Evaluator._prop,
    Not: lambda ev, f: ev.full & ~ev.mask(f.sub),
    Or: lambda ev, f: ev.mask(f.left) | ev.mask(f.right),
    And: lambda ev, f: ev.mask(f.left) & ev.mask(f.right),
    Implies: lambda ev, f: (ev.full & ~ev.mask(f.left)) | ev.mask(f.right),
    EX: Evaluator._ex,
    AX: Evaluator._ax,
    Until: lambda ev, f: ev._until(ev.mask(f.left), ev.mask(f.right)),
    F: Evaluator._f,
    G: lambda ev, f: ev._always(ev.mask(f.sub)),
    W: lambda ev, f: ev._always(ev.mask(f.left)) | ev._until(ev.mask(f.left), ev.mask(f.right)),
}


# -- module API -------------------------------------------------------------


def sat(A: AbstractExecution, event_id, f: Formula, interp: Optional[Mapping] = None, **kw) -> bool:
    return Evaluator(A, interp, **kw).sat(event_id, f)


def diagnose(A: AbstractExecution, event_id, f: Formula, interp: Optional[Mapping] = None, **kw):
    """Violating event id when ``f`` fails at ``event_id``; ``None`` when it holds."""
    ev = Evaluator(A, interp, **kw)
    if ev.sat(event_id, f):
        return None
    _, j = ev.blame(A.index(event_id), f)
    return A.events[j].id


@dataclass(frozen=True)
class Failure:
    start: str
    interpretation: dict
    path: tuple
    event: str


@dataclass
class Verdict:
    failures: list = field(default_factory=list)
    interpretations: int = 0

    @property
    def satisfied(self) -> bool:
        return not self.failures


def trace_values(A: AbstractExecution) -> list:
    """Every value appearing as an argument, return value or set member."""
    found = {}

    def add(v):
        found.setdefault(value_key(v), v)
        if isinstance(v, ValueSet):
            for x in v:
                add(x)

    for e in A.events:
        for a in e.op.args:
            add(a)
        if e.op.ret is not None:
            add(e.op.ret)
    return [found[k] for k in sorted(found)]


def default_domain(A: AbstractExecution) -> list:
    """Observed values plus one value guaranteed not to occur in the trace."""
    values = trace_values(A)
    keys = {value_key(v) for v in values}
    fresh = FRESH_VALUE
    n = 0
    while value_key(fresh) in keys:
        n += 1
        fresh = f"{FRESH_VALUE}{n}"
    return values + [fresh]


def interpretations(names: Iterable[str], domain: Iterable) -> Iterable[dict]:
    names = sorted(names)
    domain = sorted({value_key(v): v for v in domain}.items())
    for combo in itertools.product([v for _, v in domain], repeat=len(names)):
        yield dict(zip(names, combo))


def check_execution(
    A: AbstractExecution,
    f: Formula,
    domain: Optional[Iterable] = None,
    *,
    matcher: Matcher = match_prop,
) -> Verdict:
    """Does every starting event satisfy ``f`` under every interpretation over ``domain``?"""
    names = free_vars(f)
    domain = default_domain(A) if domain is None else list(domain)
    if names and not domain:
        raise EmptyDomainError("formula has free variables but the interpretation domain is empty")
    cache = EvalCache()
    verdict = Verdict()
    starts = sorted(A.starting_events(), key=A.index)
    for interp in interpretations(names, domain):
        verdict.interpretations += 1
        ev = Evaluator(A, interp, matcher=matcher, cache=cache)
        m = ev.mask(f)
        for s in starts:
            i = A.index(s)
            if not m >> i & 1:
                path, j = ev.blame(i, f)
                verdict.failures.append(Failure(s, interp, path, A.events[j].id))
    return verdict
