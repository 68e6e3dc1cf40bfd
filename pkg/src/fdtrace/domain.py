"""Finite integer domains and classification of domain updates."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping


@dataclass(frozen=True, order=True)
class VarRef:
    """A constraint variable: a unique integer plus its source name."""

    index: int
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be nonempty")

    def __str__(self):
        return self.name


class UpdateType(str, enum.Enum):
    ANY = "any"
    GROUND = "ground"
    MIN = "min"
    MAX = "max"
    EMPTY = "empty"

    def __str__(self):
        return self.value


# canonical emission order for classify_update
UPDATE_ORDER = (UpdateType.ANY, UpdateType.GROUND, UpdateType.MIN,
                UpdateType.MAX, UpdateType.EMPTY)


class Domain:
    """An immutable, strictly increasing set of integers."""

    __slots__ = ("values",)

    def __init__(self, values: Iterable[int] = ()):
        object.__setattr__(self, "values", tuple(sorted(set(values))))

    @classmethod
    def _trusted(cls, values: tuple) -> "Domain":
        d = object.__new__(cls)
        object.__setattr__(d, "values", values)
        return d

    @classmethod
    def interval(cls, lo: int, hi: int) -> "Domain":
        return cls._trusted(tuple(range(lo, hi + 1)))

    def __setattr__(self, key, value):
        raise AttributeError("Domain is immutable")

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __bool__(self):
        return bool(self.values)

    def __contains__(self, v):
        return v in self.values

    def __eq__(self, other):
        if isinstance(other, Domain):
            return self.values == other.values
        return NotImplemented

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return f"Domain({list(self.values)!r})"

    def __str__(self):
        return render(self)

    @property
    def min(self) -> int:
        if not self.values:
            raise ValueError("empty domain has no lower bound")
        return self.values[0]

    @property
    def max(self) -> int:
        if not self.values:
            raise ValueError("empty domain has no upper bound")
        return self.values[-1]

    @property
    def is_ground(self) -> bool:
        return len(self.values) == 1

    @property
    def value(self) -> int:
        """The single value of a ground domain."""
        if len(self.values) != 1:
            raise ValueError(f"domain {self} is not ground")
        return self.values[0]


DomainState = dict  # VarRef -> Domain


def intersect(a: Domain, b: Domain) -> Domain:
    other = set(b.values)
    return Domain._trusted(tuple(v for v in a.values if v in other))


def remove_values(d: Domain, withdrawn: Iterable[int]) -> Domain:
    w = set(withdrawn)
    if not w:
        return d
    return Domain._trusted(tuple(v for v in d.values if v not in w))


def classify_update(old: Domain, withdrawn: Iterable[int]) -> list[UpdateType]:
    """Modification types produced by withdrawing ``withdrawn`` from ``old``.

    The result is in canonical order ``[any, ground, min, max, empty]``.
    Bound flags are left out when the new domain is empty.
    """
    w = set(withdrawn)
    if not w:
        raise ValueError("withdrawn set must be nonempty")
    if not w <= set(old.values):
        raise ValueError(f"withdrawn values {sorted(w - set(old.values))} not in {old}")
    new = remove_values(old, w)
    tags = [UpdateType.ANY]
    if not new:
        tags.append(UpdateType.EMPTY)
        return tags
    if len(new) == 1:
        tags.append(UpdateType.GROUND)
    if new.min != old.min:
        tags.append(UpdateType.MIN)
    if new.max != old.max:
        tags.append(UpdateType.MAX)
    return tags


def render(d: Domain | Iterable[int]) -> str:
    """``[1,2,3]`` style rendering used by the compact trace format."""
    return "[" + ",".join(str(v) for v in d) + "]"


def domain_sizes(state: Mapping[VarRef, Domain]) -> dict[VarRef, int]:
    return {v: len(d) for v, d in state.items()}
