"""EPTL formula syntax tree, proposition patterns and rendering.

Every node is a frozen dataclass, so formulas hash structurally and can key
evaluation caches directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Optional, Union

from .errors import UnboundVariableError
from .values import ValueSet, canon, format_value, value_eq

# -- patterns -------------------------------------------------------------


@dataclass(frozen=True)
class Literal:
    value: object

    def __post_init__(self):
        object.__setattr__(self, "value", canon(self.value))


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not self.name or not (self.name[0].isalpha() or self.name[0] == "_") or self.name == "_":
            raise ValueError(f"bad variable name {self.name!r}")


@dataclass(frozen=True)
class Wildcard:
    pass


Pattern = Union[Literal, Var, Wildcard]


@dataclass(frozen=True)
class Equals:
    pattern: Pattern


@dataclass(frozen=True)
class Contains:
    pattern: Pattern


RetPredicate = Union[Equals, Contains]


@dataclass(frozen=True)
class Proposition:
    op_name: str
    arg_patterns: tuple = ()
    ret_predicate: Optional[RetPredicate] = None

    def __post_init__(self):
        object.__setattr__(self, "arg_patterns", tuple(self.arg_patterns))

    @property
    def arity(self) -> int:
        return len(self.arg_patterns)


# -- formulas -------------------------------------------------------------


class Formula:
    """Base class; concrete nodes are the dataclasses below."""

    __slots__ = ()

    def __str__(self):
        return render(self)


def _node(cls):
    """Frozen dataclass whose structural hash is computed once per instance.

    Formulas key evaluation caches, and the generated dataclass hash would
    re-walk the whole tree on every lookup.
    """
    cls = dataclass(frozen=True)(cls)
    field_hash = cls.__hash__

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = field_hash(self)
            object.__setattr__(self, "_hash", h)
            return h

    cls.__hash__ = __hash__
    return cls


@_node
class TrueF(Formula):
    pass


@_node
class FalseF(Formula):
    pass


@_node
class Prop(Formula):
    prop: Proposition


@_node
class Not(Formula):
    sub: Formula


@_node
class Or(Formula):
    left: Formula
    right: Formula


@_node
class And(Formula):
    left: Formula
    right: Formula


@_node
class Implies(Formula):
    left: Formula
    right: Formula


@_node
class EX(Formula):
    sub: Formula


@_node
class AX(Formula):
    sub: Formula


@_node
class Until(Formula):
    left: Formula
    right: Formula


@_node
class F(Formula):
    sub: Formula


@_node
class G(Formula):
    sub: Formula


@_node
class W(Formula):
    left: Formula
    right: Formula


UNARY = (Not, EX, AX, F, G)
BINARY = (Or, And, Implies, Until, W)


def atom(name: str) -> Prop:
    """0-ary proposition ``name()``; the atoms of law schemas."""
    return Prop(Proposition(name))


def children(f: Formula) -> tuple:
    if isinstance(f, UNARY):
        return (f.sub,)
    if isinstance(f, BINARY):
        return (f.left, f.right)
    return ()


def subformula(f: Formula, path: tuple) -> Formula:
    for step in path:
        f = children(f)[step]
    return f


def _pattern_vars(p) -> frozenset:
    return frozenset([p.name]) if isinstance(p, Var) else frozenset()


def prop_vars(p: Proposition) -> frozenset:
    out = frozenset()
    for pat in p.arg_patterns:
        out |= _pattern_vars(pat)
    if p.ret_predicate is not None:
        out |= _pattern_vars(p.ret_predicate.pattern)
    return out


@lru_cache(maxsize=None)
def free_vars(f: Formula) -> frozenset:
    if isinstance(f, Prop):
        return prop_vars(f.prop)
    out = frozenset()
    for c in children(f):
        out |= free_vars(c)
    return out


# -- proposition matching -------------------------------------------------


def _resolve(p, interp: Mapping):
    if isinstance(p, Literal):
        return p.value
    try:
        return interp[p.name]
    except KeyError:
        raise UnboundVariableError(p.name) from None


def _pattern_matches(p, value, interp: Mapping) -> bool:
    if isinstance(p, Wildcard):
        return True
    return value_eq(_resolve(p, interp), value)


def match_prop(p: Proposition, event, interp: Mapping) -> bool:
    """Does ``event`` satisfy proposition ``p`` with variables bound by ``interp``?"""
    # Resolve every variable first so an unbound one is reported regardless of the event.
    for name in prop_vars(p):
        if name not in interp:
            raise UnboundVariableError(name)
    op = event.op
    if op.name != p.op_name or len(op.args) != p.arity:
        return False
    if not all(_pattern_matches(pat, arg, interp) for pat, arg in zip(p.arg_patterns, op.args)):
        return False
    pred = p.ret_predicate
    if pred is None:
        return True
    if op.ret is None:
        return False
    if isinstance(pred, Equals):
        return _pattern_matches(pred.pattern, op.ret, interp)
    if not isinstance(op.ret, ValueSet):
        return False
    if isinstance(pred.pattern, Wildcard):
        return len(op.ret) > 0
    return _resolve(pred.pattern, interp) in op.ret


# -- rendering ------------------------------------------------------------

# Binding strength, loosest first; unary operators and atoms bind tightest.
_PREC = {Implies: 1, Or: 2, And: 3, Until: 4, W: 4}
_SYMBOL = {Implies: "=>", Or: "|", And: "&", Until: "U", W: "W"}
_RIGHT_ASSOC = (Implies, Until, W)
_UNARY_NAME = {EX: "EX", AX: "AX", F: "F", G: "G"}


def render_pattern(p) -> str:
    if isinstance(p, Wildcard):
        return "_"
    if isinstance(p, Var):
        return p.name
    return format_value(p.value)


def render_prop(p: Proposition) -> str:
    text = f"{p.op_name}({', '.join(render_pattern(a) for a in p.arg_patterns)})"
    pred = p.ret_predicate
    if isinstance(pred, Equals):
        text += f" == {render_pattern(pred.pattern)}"
    elif isinstance(pred, Contains):
        text += f" contains {render_pattern(pred.pattern)}"
    return text


def _prec(f) -> int:
    return _PREC.get(type(f), 9)


def render(f: Formula) -> str:
    """Canonical text; ``parse(render(f)) == f`` for every formula."""
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Prop):
        return render_prop(f.prop)
    if isinstance(f, Not):
        inner = render(f.sub)
        # A prop with a return predicate would otherwise read ambiguously after "!".
        bare = _prec(f.sub) == 9 and not (isinstance(f.sub, Prop) and f.sub.prop.ret_predicate)
        return f"!{inner}" if bare else f"!({inner})"
    if isinstance(f, tuple(_UNARY_NAME)):
        return f"{_UNARY_NAME[type(f)]}({render(f.sub)})"
    prec = _PREC[type(f)]
    right_assoc = isinstance(f, _RIGHT_ASSOC)
    left, right = render(f.left), render(f.right)
    lp, rp = _prec(f.left), _prec(f.right)
    if lp < prec or (lp == prec and right_assoc):
        left = f"({left})"
    if rp < prec or (rp == prec and not right_assoc):
        right = f"({right})"
    return f"{left} {_SYMBOL[type(f)]} {right}"
