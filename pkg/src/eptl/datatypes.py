"""Replicated datatype oracles and a causally consistent trace generator."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import ConfigError, SchemaError
from .graph import AbstractExecution, Event, OperationRecord, _bits, validate
from .values import ValueSet, value_eq

# Operation name -> arity, per datatype.
SIGNATURES = {
    "mvr": {"put": 1, "get": 0},
    "counter": {"inc": 0, "get": 0},
}

MVR_FORMULA = "G(put(a) => AX((get() contains a) W put(_)))"
MVR_UNSHIFTED_FORMULA = "G(put(a) => ((get() contains a) W put(b)))"


@dataclass(frozen=True)
class DatatypeSpec:
    name: str

    def __post_init__(self):
        if self.name not in SIGNATURES:
            raise ConfigError(f"unknown datatype {self.name!r}; expected one of {sorted(SIGNATURES)}")

    @property
    def signature(self) -> dict:
        return SIGNATURES[self.name]


def _visible(A: AbstractExecution, event_id) -> int:
    return A.pred_mask(A.index(event_id))


def mvr_get_oracle(A: AbstractExecution, event_id) -> ValueSet:
    """Values of the visibility-maximal puts strictly before the event."""
    seen = _visible(A, event_id)
    puts = 0
    for j in _bits(seen):
        if A.events[j].op.name == "put":
            puts |= 1 << j
    maximal = [j for j in _bits(puts) if not A.succ_mask(j) & puts]
    return ValueSet.of(A.events[j].op.args[0] for j in maximal)


def counter_get_oracle(A: AbstractExecution, event_id) -> int:
    return sum(1 for j in _bits(_visible(A, event_id)) if A.events[j].op.name == "inc")


ORACLES = {"mvr": mvr_get_oracle, "counter": counter_get_oracle}


def validate_returns(A: AbstractExecution, spec) -> list:
    """(event id, expected, recorded) for every get whose return disagrees with the oracle."""
    if isinstance(spec, str):
        spec = DatatypeSpec(spec)
    sig = spec.signature
    for e in A.events:
        if e.op.name not in sig:
            raise SchemaError(f"event {e.id}: operation {e.op.name!r} is not part of {spec.name}")
        if len(e.op.args) != sig[e.op.name]:
            raise SchemaError(
                f"event {e.id}: {e.op.name} takes {sig[e.op.name]} argument(s), got {len(e.op.args)}"
            )
    oracle = ORACLES[spec.name]
    mismatches = []
    for e in A.events:
        if e.op.name != "get":
            continue
        expected = oracle(A, e.id)
        if e.op.ret is None or not value_eq(expected, e.op.ret):
            mismatches.append((e.id, expected, e.op.ret))
    return mismatches


@dataclass(frozen=True)
class GeneratorConfig:
    replicas: int = 2
    ops: int = 8
    seed: int = 0
    datatype: str = "mvr"
    merge_probability: float = 0.3

    def check(self):
        if not isinstance(self.replicas, int) or self.replicas < 1:
            raise ConfigError("replicas must be a positive integer")
        if not isinstance(self.ops, int) or self.ops < 1:
            raise ConfigError("ops must be a positive integer")
        if not 0.0 <= self.merge_probability <= 1.0:
            raise ConfigError("merge_probability must lie in [0, 1]")
        if self.replicas > 1 and self.merge_probability == 1.0:
            # Every step would synchronize and no operation would ever run.
            raise ConfigError("merge_probability 1 never executes an operation with several replicas")
        DatatypeSpec(self.datatype)


def generate(config: GeneratorConfig) -> AbstractExecution:
    """Simulate replicas exchanging full known-sets; each new event sees exactly
    what its replica knows at that moment."""
    config.check()
    rng = random.Random(config.seed)
    known = [set() for _ in range(config.replicas)]
    preds = {}
    ops = {}
    events = []
    while len(events) < config.ops:
        r = rng.randrange(config.replicas)
        if config.replicas > 1 and rng.random() < config.merge_probability:
            other = rng.randrange(config.replicas - 1)
            other += other >= r
            known[r] |= known[other]
            continue
        eid = f"e{len(events) + 1}"
        op = _next_op(config.datatype, rng, known[r], preds, ops)
        events.append(Event(eid, op, replica=f"r{r}"))
        preds[eid] = frozenset(known[r])
        ops[eid] = op
        known[r].add(eid)
    return validate(events, [(p, e.id) for e in events for p in sorted(preds[e.id])])


def _next_op(datatype: str, rng: random.Random, known: set, preds: dict, ops: dict) -> OperationRecord:
    if rng.random() < 0.5:
        if datatype == "mvr":
            return OperationRecord("put", (rng.randrange(10),))
        return OperationRecord("inc")
    if datatype == "counter":
        return OperationRecord("get", (), sum(1 for k in known if ops[k].name == "inc"))
    # Known sets are causally closed, so a put is maximal iff no known put sees it.
    puts = [k for k in known if ops[k].name == "put"]
    live = [p for p in puts if not any(p in preds[q] for q in puts)]
    return OperationRecord("get", (), ValueSet.of(ops[p].args[0] for p in live))
