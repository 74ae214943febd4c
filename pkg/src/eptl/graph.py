"""Abstract executions: events plus a visibility partial order.

An execution is built with :func:`validate`, which accepts any generating
relation (reduction, closure or anything in between), rejects cycles, and
stores both the transitive reduction and the cached closure. Order queries
run on per-event bitmasks over the id-sorted event list.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .errors import CycleError, DuplicateIdError, TooLargeError, UnknownIdError
from .values import canon, format_value

DEFAULT_EXTENSION_BOUND = 10


@dataclass(frozen=True)
class OperationRecord:
    name: str
    args: tuple = ()
    ret: Optional[object] = None

    def __post_init__(self):
        if not self.name:
            raise ValueError("operation name must be non-empty")
        object.__setattr__(self, "args", tuple(canon(a) for a in self.args))
        if self.ret is not None:
            object.__setattr__(self, "ret", canon(self.ret))

    def label(self) -> str:
        text = f"{self.name}({', '.join(format_value(a) for a in self.args)})"
        if self.ret is not None:
            text += f" => {format_value(self.ret)}"
        return text


@dataclass(frozen=True)
class Event:
    id: str
    op: OperationRecord
    replica: Optional[str] = None


def id_sort_key(event_id) -> tuple:
    """Natural ordering so that e2 sorts before e10."""
    parts = re.split(r"(\d+)", str(event_id))
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts if p)


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True, eq=False)
class AbstractExecution:
    """Immutable finite abstract execution. Construct through :func:`validate`."""

    events: tuple
    vis_reduction: frozenset
    vis_closure: frozenset
    # Per-event bitmasks, indexed like ``events``.
    _index: dict = field(repr=False)
    _succ: tuple = field(repr=False)
    _pred: tuple = field(repr=False)
    _imm: tuple = field(repr=False)

    # -- basic access -----------------------------------------------------

    @property
    def ids(self) -> list:
        return [e.id for e in self.events]

    def __len__(self):
        return len(self.events)

    def __contains__(self, event_id):
        return event_id in self._index

    def event(self, event_id) -> Event:
        return self.events[self.index(event_id)]

    def index(self, event_id) -> int:
        try:
            return self._index[event_id]
        except (KeyError, TypeError):
            raise UnknownIdError(event_id) from None

    def _ids_of(self, mask: int) -> set:
        return {self.events[i].id for i in _bits(mask)}

    # Bitmask accessors used by the evaluator; bit i is events[i].
    def succ_mask(self, i: int, inclusive: bool = False) -> int:
        return self._succ[i] | (1 << i) if inclusive else self._succ[i]

    def pred_mask(self, i: int, inclusive: bool = False) -> int:
        return self._pred[i] | (1 << i) if inclusive else self._pred[i]

    def imm_mask(self, i: int) -> int:
        return self._imm[i]

    @property
    def full_mask(self) -> int:
        return (1 << len(self.events)) - 1

    # -- order queries ----------------------------------------------------

    def leq(self, e1, e2) -> bool:
        i, j = self.index(e1), self.index(e2)
        return i == j or bool(self._succ[i] >> j & 1)

    def lt(self, e1, e2) -> bool:
        i, j = self.index(e1), self.index(e2)
        return bool(self._succ[i] >> j & 1)

    def concurrent(self, e1, e2) -> bool:
        return e1 != e2 and not self.leq(e1, e2) and not self.leq(e2, e1)

    def starting_events(self) -> set:
        return {e.id for i, e in enumerate(self.events) if not self._pred[i]}

    def last_events(self) -> set:
        return {e.id for i, e in enumerate(self.events) if not self._succ[i]}

    def is_last(self, event_id) -> bool:
        return not self._succ[self.index(event_id)]

    def immediate_successors(self, event_id) -> set:
        return self._ids_of(self._imm[self.index(event_id)])

    def successors_including(self, event_id) -> set:
        i = self.index(event_id)
        return self._ids_of(self._succ[i] | (1 << i))

    def predecessors(self, event_id) -> set:
        return self._ids_of(self._pred[self.index(event_id)])

    # -- serializations ---------------------------------------------------

    def linear_extensions(self, bound: int = DEFAULT_EXTENSION_BOUND) -> list:
        """All total orders consistent with visibility, in lexicographic order.

        Ids compare by :func:`id_sort_key`, so the smallest available event is
        always tried first and the output comes out sorted without a final sort.
        """
        n = len(self.events)
        if n > bound:
            raise TooLargeError(f"{n} events exceed the linear-extension bound of {bound}")
        out = []
        order = []

        def extend(placed: int):
            if placed == self.full_mask:
                out.append([self.events[i].id for i in order])
                return
            for i in range(n):
                if not placed >> i & 1 and self._pred[i] & ~placed == 0:
                    order.append(i)
                    extend(placed | 1 << i)
                    order.pop()

        extend(0)
        return out

    def to_dot(self, name: str = "execution") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for e in self.events:
            label = e.op.label().replace("\\", "\\\\").replace('"', '\\"')
            lines.append(f'  "{e.id}" [label="{e.id}: {label}"];')
        for a, b in sorted(self.vis_reduction, key=lambda p: (id_sort_key(p[0]), id_sort_key(p[1]))):
            lines.append(f'  "{a}" -> "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def validate(raw_events: Iterable[Event], raw_vis: Iterable[Sequence] = ()) -> AbstractExecution:
    """Check events and a generating visibility relation; build the execution."""
    events = list(raw_events)
    seen = set()
    for e in events:
        if e.id in seen:
            raise DuplicateIdError(e.id)
        seen.add(e.id)
    events.sort(key=lambda e: id_sort_key(e.id))
    index = {e.id: i for i, e in enumerate(events)}
    n = len(events)

    adj = [0] * n
    for pair in raw_vis:
        a, b = pair
        if a not in index:
            raise UnknownIdError(a)
        if b not in index:
            raise UnknownIdError(b)
        if a == b:
            raise CycleError([a, a])
        adj[index[a]] |= 1 << index[b]

    topo = _topological_order(adj, events)
    succ = [0] * n
    for i in reversed(topo):
        mask = adj[i]
        for j in _bits(adj[i]):
            mask |= succ[j]
        succ[i] = mask
    pred = [0] * n
    for i in range(n):
        for j in _bits(succ[i]):
            pred[j] |= 1 << i
    # j covers i iff nothing sits strictly between them.
    imm = [0] * n
    for i in range(n):
        for j in _bits(succ[i]):
            if succ[i] & pred[j] == 0:
                imm[i] |= 1 << j

    closure = frozenset((events[i].id, events[j].id) for i in range(n) for j in _bits(succ[i]))
    reduction = frozenset((events[i].id, events[j].id) for i in range(n) for j in _bits(imm[i]))
    return AbstractExecution(
        events=tuple(events),
        vis_reduction=reduction,
        vis_closure=closure,
        _index=index,
        _succ=tuple(succ),
        _pred=tuple(pred),
        _imm=tuple(imm),
    )


def _topological_order(adj: list, events: list) -> list:
    n = len(adj)
    WHITE, GREY, BLACK = 0, 1, 2
    colour = [WHITE] * n
    order = []
    for root in range(n):
        if colour[root] != WHITE:
            continue
        stack = [(root, iter(list(_bits(adj[root]))))]
        colour[root] = GREY
        path = [root]
        while stack:
            node, children = stack[-1]
            for child in children:
                if colour[child] == GREY:
                    cycle = path[path.index(child):] + [child]
                    raise CycleError(events[k].id for k in cycle)
                if colour[child] == WHITE:
                    colour[child] = GREY
                    path.append(child)
                    stack.append((child, iter(list(_bits(adj[child])))))
                    break
            else:
                colour[node] = BLACK
                order.append(node)
                path.pop()
                stack.pop()
    order.reverse()
    return order


def make_event(event_id, name: str, *args, ret=None, replica=None) -> Event:
    """Shorthand used heavily by tests and fixtures."""
    return Event(event_id, OperationRecord(name, tuple(args), ret), replica)


def chain(events: Sequence[Event]) -> AbstractExecution:
    """Totally ordered execution in the given order."""
    return validate(events, [(a.id, b.id) for a, b in zip(events, events[1:])])
