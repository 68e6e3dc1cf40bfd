"""Activation records, useless activations and summary statistics."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

from ..trace import Port, TraceEvent

_LEAVING = (Port.TRUE, Port.SUSPEND, Port.REJECT)


@dataclass(frozen=True)
class ActivationRecord:
    constraint_id: int
    abstract: str
    activated_at: int  # chrono of the select or tell
    activated_by: Port
    reduces: int
    terminal: Port


class ActivationTracker:
    """Follows each constraint from its select (or tell) until it leaves A."""

    def __init__(self):
        self.records: list[ActivationRecord] = []
        self._open: Optional[list] = None

    def __call__(self, e: TraceEvent) -> None:
        if e.port in (Port.SELECT, Port.TELL):
            self._open = [e.constraint.id, e.constraint.abstract, e.chrono, e.port, 0]
        elif self._open is None or e.constraint.id != self._open[0]:
            return
        elif e.port is Port.REDUCE:
            self._open[4] += 1
        elif e.port in _LEAVING:
            self.records.append(ActivationRecord(*self._open, e.port))
            self._open = None

    def useless(self) -> list[ActivationRecord]:
        return [r for r in self.records if r.activated_by is Port.SELECT and r.reduces == 0]


def detect_useless_activations(events: Iterable[TraceEvent]) -> list[ActivationRecord]:
    """Selected constraints that leave A without a single reduce."""
    t = ActivationTracker()
    for e in events:
        t(e)
    return t.useless()


class StatsCollector:
    def __init__(self):
        self.ports: Counter = Counter()
        self.events = 0
        self.max_depth = 0
        self.withdrawn = 0
        self.activations = ActivationTracker()

    def __call__(self, e: TraceEvent) -> None:
        self.events += 1
        self.ports[e.port] += 1
        self.max_depth = max(self.max_depth, e.depth)
        if e.withdrawn is not None:
            self.withdrawn += len(e.withdrawn[1])
        self.activations(e)

    def result(self) -> dict:
        out = {"events": self.events, "max_depth": self.max_depth}
        for p in Port:
            out[p.value] = self.ports.get(p, 0)
        out["withdrawn_values"] = self.withdrawn
        out["useless_activations"] = len(self.activations.useless())
        return out


def statistics(events: Iterable[TraceEvent]) -> dict:
    s = StatsCollector()
    for e in events:
        s(e)
    return s.result()


def format_stats(stats: dict) -> str:
    return "".join(f"{k}: {v}\n" for k, v in stats.items())


def format_activations(records: list[ActivationRecord]) -> str:
    return "".join(
        f"chrono={r.activated_at} constraint={r.constraint_id} {r.abstract} "
        f"reduces={r.reduces} terminal={r.terminal.value}\n"
        for r in records)
