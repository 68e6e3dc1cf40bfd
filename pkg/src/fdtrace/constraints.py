"""The eight primitive constraints.

Each form knows its reduction operators (one per variable), its solved
condition and its awakening condition.  ``check_satisfied`` gives the plain
ground semantics used by the brute-force oracle.
"""

from __future__ import annotations

import enum
import functools
import re
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Optional

from .domain import Domain, UpdateType, VarRef


class Kind(str, enum.Enum):
    EQ = "eq"
    NEQ = "neq"
    EQ_OFFSET = "eq_offset"
    NEQ_OFFSET = "neq_offset"
    GT = "gt"
    GEQ = "geq"
    EQ_CONST = "eq_const"
    NEQ_CONST = "neq_const"


BINARY = frozenset({Kind.EQ, Kind.NEQ, Kind.EQ_OFFSET, Kind.NEQ_OFFSET, Kind.GT, Kind.GEQ})
WITH_CONSTANT = frozenset({Kind.EQ_OFFSET, Kind.NEQ_OFFSET, Kind.EQ_CONST, Kind.NEQ_CONST})

# functor names of the concrete representation
FUNCTORS = {
    Kind.EQ: "eq",
    Kind.NEQ: "diff",
    Kind.EQ_OFFSET: "eqN",
    Kind.NEQ_OFFSET: "diffN",
    Kind.GT: "gt",
    Kind.GEQ: "geq",
    Kind.EQ_CONST: "assign",
    Kind.NEQ_CONST: "remove",
}
_KIND_OF_FUNCTOR = {f: k for k, f in FUNCTORS.items()}

_OPERATORS = {
    Kind.EQ: "#=", Kind.NEQ: "##", Kind.EQ_OFFSET: "#=", Kind.NEQ_OFFSET: "##",
    Kind.GT: "#>", Kind.GEQ: "#>=", Kind.EQ_CONST: "#=", Kind.NEQ_CONST: "##",
}

_G, _MIN, _MAX, _ANY = UpdateType.GROUND, UpdateType.MIN, UpdateType.MAX, UpdateType.ANY


@dataclass(frozen=True)
class ConstraintForm:
    kind: Kind
    x: VarRef
    y: Optional[VarRef] = None
    n: Optional[int] = None

    def __post_init__(self):
        if (self.kind in BINARY) != (self.y is not None):
            raise ValueError(f"{self.kind.value} takes {'two variables' if self.kind in BINARY else 'one variable'}")
        if (self.kind in WITH_CONSTANT) != (self.n is not None):
            raise ValueError(f"{self.kind.value}: constant {'missing' if self.n is None else 'not allowed'}")
        if self.y is not None and self.x == self.y:
            raise ValueError(f"{self.kind.value}: both sides are {self.x.name}")

    @property
    def vars(self) -> tuple[VarRef, ...]:
        return (self.x,) if self.y is None else (self.x, self.y)

    def abstract(self) -> str:
        op = _OPERATORS[self.kind]
        if self.y is None:
            return f"{self.x.name}{op}{self.n}"
        if self.kind in (Kind.EQ_OFFSET, Kind.NEQ_OFFSET):
            return f"{self.x.name}{op}{self.y.name}+{self.n}"
        return f"{self.x.name}{op}{self.y.name}"

    def concrete(self) -> str:
        args = [f"var({v.index},{v.name})" for v in self.vars]
        if self.n is not None:
            args.append(str(self.n))
        return f"{FUNCTORS[self.kind]}({','.join(args)})"

    def __str__(self):
        return self.abstract()


_CONCRETE_RE = re.compile(
    r"^(\w+)\(var\((\d+),([^(),]+)\)(?:,var\((\d+),([^(),]+)\))?(?:,(-?\d+))?\)$")


@functools.lru_cache(maxsize=8192)
def parse_concrete(text: str) -> ConstraintForm:
    """Inverse of :meth:`ConstraintForm.concrete`."""
    m = _CONCRETE_RE.match(text.replace(" ", ""))
    if not m or m.group(1) not in _KIND_OF_FUNCTOR:
        raise ValueError(f"not a concrete constraint: {text!r}")
    functor, xi, xn, yi, yn, n = m.groups()
    y = VarRef(int(yi), yn) if yi else None
    return ConstraintForm(_KIND_OF_FUNCTOR[functor], VarRef(int(xi), xn), y,
                          int(n) if n is not None else None)


class ConstraintRef(NamedTuple):
    """The (identifier, abstract text) pair a store listing is made of."""

    id: int
    abstract: str


@dataclass(eq=False)
class ConstraintInstance:
    """A told constraint: identifier, source text, form and invocation context."""

    id: int
    abstract: str
    form: ConstraintForm
    context: str
    ref: ConstraintRef = field(init=False, repr=False)

    def __post_init__(self):
        self.ref = ConstraintRef(self.id, self.abstract)

    @property
    def vars(self) -> tuple[VarRef, ...]:
        return self.form.vars

    @property
    def concrete(self) -> str:
        return self.form.concrete()


def _form(c) -> ConstraintForm:
    return c.form if isinstance(c, ConstraintInstance) else c


def reduce_step(c, domains: Mapping[VarRef, Domain], x: VarRef) -> frozenset:
    """The values W_x that the reduction operator of ``c`` for ``x`` withdraws."""
    f = _form(c)
    if x not in f.vars:
        raise ValueError(f"{x.name} does not occur in {f.abstract()}")
    dx = domains[x]
    k = f.kind
    if k is Kind.EQ_CONST:
        return frozenset(v for v in dx if v != f.n)
    if k is Kind.NEQ_CONST:
        return frozenset((f.n,)) if f.n in dx else frozenset()

    first = x == f.x
    other = domains[f.y] if first else domains[f.x]
    if k is Kind.EQ:
        return frozenset(v for v in dx if v not in other)
    if k is Kind.NEQ:
        if other.is_ground and other.value in dx:
            return frozenset((other.value,))
        return frozenset()
    if k is Kind.EQ_OFFSET:
        # x = y + n
        shift = f.n if first else -f.n
        support = {v + shift for v in other}
        return frozenset(v for v in dx if v not in support)
    if k is Kind.NEQ_OFFSET:
        if other.is_ground:
            v = other.value + (f.n if first else -f.n)
            if v in dx:
                return frozenset((v,))
        return frozenset()
    if not other:
        return frozenset(dx)
    if k is Kind.GT:
        if first:
            return frozenset(v for v in dx if v <= other.min)
        return frozenset(v for v in dx if v >= other.max)
    if k is Kind.GEQ:
        if first:
            return frozenset(v for v in dx if v < other.min)
        return frozenset(v for v in dx if v > other.max)
    raise AssertionError(k)


def is_solved(c, domains: Mapping[VarRef, Domain]) -> bool:
    f = _form(c)
    dx = domains[f.x]
    k = f.kind
    if k is Kind.EQ_CONST:
        return dx.values == (f.n,)
    if k is Kind.NEQ_CONST:
        return f.n not in dx
    dy = domains[f.y]
    if k is Kind.EQ:
        return dx.is_ground and dx == dy
    if k is Kind.NEQ:
        return not set(dx.values) & set(dy.values)
    if k is Kind.EQ_OFFSET:
        return dx.is_ground and dy.is_ground and dx.value == dy.value + f.n
    if k is Kind.NEQ_OFFSET:
        return all(v + f.n not in dx for v in dy)
    if k is Kind.GT:
        return dx.min > dy.max
    if k is Kind.GEQ:
        return dx.min >= dy.max
    raise AssertionError(k)


def awakening_condition(c) -> list[tuple[VarRef, UpdateType]]:
    f = _form(c)
    k = f.kind
    if k in (Kind.EQ, Kind.EQ_OFFSET):
        return [(f.x, _ANY), (f.y, _ANY)]
    if k in (Kind.NEQ, Kind.NEQ_OFFSET):
        return [(f.x, _G), (f.y, _G)]
    if k in (Kind.GT, Kind.GEQ):
        return [(f.x, _MAX), (f.y, _MIN)]
    return []


def check_satisfied(c, assignment: Mapping[VarRef, int]) -> bool:
    f = _form(c)
    x = assignment[f.x]
    k = f.kind
    if k is Kind.EQ_CONST:
        return x == f.n
    if k is Kind.NEQ_CONST:
        return x != f.n
    y = assignment[f.y]
    if k is Kind.EQ:
        return x == y
    if k is Kind.NEQ:
        return x != y
    if k is Kind.EQ_OFFSET:
        return x == y + f.n
    if k is Kind.NEQ_OFFSET:
        return x != y + f.n
    if k is Kind.GT:
        return x > y
    if k is Kind.GEQ:
        return x >= y
    raise AssertionError(k)
