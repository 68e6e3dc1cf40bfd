"""Domain-size evolution: one row per tell, reject and solution."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..domain import UpdateType
from ..trace import Port, TraceEvent

TELL, REJECT, SOLUTION = "tell", "reject", "solution"


def update_class(types) -> str:
    """Colour class of one reduce: empty, ground, min, max, bounds or any."""
    types = set(types)
    if UpdateType.EMPTY in types:
        return "empty"
    if UpdateType.GROUND in types:
        return "ground"
    lo, hi = UpdateType.MIN in types, UpdateType.MAX in types
    if lo and hi:
        return "bounds"
    if lo:
        return "min"
    if hi:
        return "max"
    return "any"


@dataclass
class EvolutionRow:
    step: int  # chrono of the triggering event
    trigger: str
    sizes: dict  # variable name -> domain size
    updates: dict = field(default_factory=dict)  # variable name -> colour class


class EvolutionBuilder:
    def __init__(self):
        self.rows: list[EvolutionRow] = []
        self.variables: list[str] = []
        self._updates: dict = {}
        self._leaf_open = False
        self._rejected = False

    def _row(self, e: TraceEvent, trigger: str) -> None:
        if not self.variables:
            self.variables = [v.name for v in sorted(e.domains)]
        sizes = {v.name: len(d) for v, d in e.domains.items()}
        self.rows.append(EvolutionRow(e.chrono, trigger, sizes, self._updates))
        self._updates = {}

    def __call__(self, e: TraceEvent) -> None:
        if not self.variables:
            self.variables = [v.name for v in sorted(e.domains)]
        port = e.port
        if port is Port.TELL:
            self._row(e, TELL)
            self._leaf_open = True
            self._rejected = False
        elif port is Port.REDUCE:
            var, _ = e.withdrawn
            self._updates[var.name] = update_class(t for _, t in e.update)
        elif port is Port.REJECT:
            self._rejected = True
            self._row(e, REJECT)
        elif port is Port.TOLD:
            if self._leaf_open and not self._rejected and all(len(d) == 1 for d in e.domains.values()):
                self._row(e, SOLUTION)
            self._leaf_open = False

    def result(self) -> list[EvolutionRow]:
        return self.rows


def evolution_matrix(events: Iterable[TraceEvent]) -> list[EvolutionRow]:
    b = EvolutionBuilder()
    for e in events:
        b(e)
    return b.result()


def to_csv(rows: list[EvolutionRow], variables: Optional[list] = None,
           include_updates: bool = False) -> str:
    if variables is None:
        variables = list(rows[0].sizes) if rows else []
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["step", "trigger", *variables]
    if include_updates:
        header += [f"{v}_update" for v in variables]
    w.writerow(header)
    for r in rows:
        line = [r.step, r.trigger, *(r.sizes[v] for v in variables)]
        if include_updates:
            line += [r.updates.get(v, "") for v in variables]
        w.writerow(line)
    return buf.getvalue()
