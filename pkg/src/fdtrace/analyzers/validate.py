"""Well-formedness checks over a trace stream."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from ..constraints import awakening_condition, parse_concrete
from ..domain import classify_update
from ..trace import Port, Store, TraceEvent

_ACTIVE_PORTS = (Port.REDUCE, Port.TRUE, Port.SUSPEND, Port.REJECT)
_RESETS = (Port.SELECT, Port.TRUE, Port.SUSPEND, Port.REJECT, Port.TELL, Port.TOLD)


@dataclass(frozen=True)
class Violation:
    chrono: int
    rule: str
    message: str

    def __str__(self):
        return f"chrono={self.chrono} rule={self.rule} message={self.message}"


class TraceValidator:
    def __init__(self):
        self.violations: list[Violation] = []
        self._prev: Optional[TraceEvent] = None
        self._depth = 0
        self._tells: list[int] = []
        self._awake: dict = {}
        self._last_update: Optional[set] = None
        self._priority_update: Optional[tuple] = None  # (reduce chrono, update set)

    def _flag(self, e: TraceEvent, rule: str, message: str) -> None:
        self.violations.append(Violation(e.chrono, rule, message))

    def __call__(self, e: TraceEvent) -> None:
        prev = self._prev
        expected = 1 if prev is None else prev.chrono + 1
        if e.chrono != expected:
            self._flag(e, "chrono", f"chrono gap at {e.chrono} (expected {expected})")

        self._check_depth(e)
        self._check_store(e)
        self._check_domains(e, prev)
        self._check_priority(e)

        port = e.port
        if port is Port.TELL and e.constraint.id not in self._awake:
            try:
                self._awake[e.constraint.id] = {
                    (v.name, t) for v, t in awakening_condition(parse_concrete(e.constraint.concrete))}
            except ValueError:
                self._flag(e, "constraint", f"unreadable concrete form {e.constraint.concrete!r}")
        if port is Port.REDUCE:
            self._check_reduce(e)
        elif port is Port.WAKE_UP:
            cause = {(v.name, t) for v, t in e.cause or ()}
            if not cause:
                self._flag(e, "cause", "wake-up without a cause")
            elif self._last_update is None:
                self._flag(e, "cause", "wake-up not preceded by a reduce")
            elif not cause <= self._last_update:
                self._flag(e, "cause", "cause is not part of the last reduce's update list")
        elif port in _RESETS:
            self._last_update = None
        self._prev = e

    def _check_depth(self, e: TraceEvent) -> None:
        if e.port is Port.TELL:
            self._depth += 1
            self._tells.append(e.constraint.id)
            if e.depth != self._depth:
                self._flag(e, "depth", f"tell at depth {e.depth}, expected {self._depth}")
        elif e.port is Port.TOLD:
            if not self._tells:
                self._flag(e, "balance", "told without a matching tell")
            else:
                told = self._tells.pop()
                if told != e.constraint.id:
                    self._flag(e, "balance", f"told names constraint {e.constraint.id}, matching tell was {told}")
                if e.depth != self._depth:
                    self._flag(e, "depth", f"told at depth {e.depth}, expected {self._depth}")
                self._depth -= 1
        elif e.depth != self._depth:
            self._flag(e, "depth", f"{e.port.value} at depth {e.depth}, expected {self._depth}")

    def _check_store(self, e: TraceEvent) -> None:
        st = e.store
        seen: dict = {}
        for part in Store._fields:
            for ref in getattr(st, part):
                if ref[0] in seen:
                    self._flag(e, "partition", f"constraint {ref[0]} in both {seen[ref[0]]} and {part}")
                seen[ref[0]] = part
        if len(st.A) > 1:
            self._flag(e, "partition", "more than one active constraint")
        if len(st.R) > 1:
            self._flag(e, "partition", "more than one rejected constraint")
        cid = e.constraint.id
        if e.port is Port.SELECT:
            if st.A:
                self._flag(e, "select", "select while a constraint is active")
            if st.R:
                self._flag(e, "select", "select after a rejection")
            if not st.Q or st.Q[0][0] != cid:
                self._flag(e, "select", "selected constraint is not the queue head")
        elif e.port in _ACTIVE_PORTS:
            if not st.A or st.A[0][0] != cid:
                self._flag(e, "active", f"{e.port.value} of {cid} while it is not active")
        elif e.port is Port.WAKE_UP:
            if cid not in [r[0] for r in st.S]:
                self._flag(e, "wake-up", f"woken constraint {cid} is not suspended")
        elif e.port is Port.TELL:
            if st.A and st.A[0][0] != cid:
                self._flag(e, "active", "tell while another constraint is active")

    def _check_domains(self, e: TraceEvent, prev: Optional[TraceEvent]) -> None:
        if prev is None or prev.port is Port.TOLD:
            return
        names = {v.name: d for v, d in prev.domains.items()}
        for v, d in e.domains.items():
            old = names.get(v.name)
            if old is None:
                continue
            if not set(d.values) <= set(old.values):
                self._flag(e, "monotonicity", f"domain of {v.name} grew during propagation")
        if prev.port is Port.REDUCE:
            var, values = prev.withdrawn
            expect = [x for x in names[var.name].values if x not in set(values)]
            got = next((d for v, d in e.domains.items() if v.name == var.name), None)
            if got is not None and list(got.values) != expect:
                self._flag(e, "reduce-effect", f"domain of {var.name} does not reflect chrono {prev.chrono}")

    def _check_reduce(self, e: TraceEvent) -> None:
        var, values = e.withdrawn
        dom = next((d for v, d in e.domains.items() if v.name == var.name), None)
        if dom is None or not values or not set(values) <= set(dom.values):
            self._flag(e, "withdrawn", f"withdrawn values of {var.name} not in its domain")
            self._last_update = None
            return
        update = [(v.name, t) for v, t in e.update]
        expect = [(var.name, t) for t in classify_update(dom, values)]
        if update != expect:
            self._flag(e, "update", f"update list {update} does not classify the withdrawal")
        self._last_update = set(update)
        self._priority_update = (e.chrono, set(update))

    def _check_priority(self, e: TraceEvent) -> None:
        if self._priority_update is None or e.port is Port.WAKE_UP:
            return
        chrono, update = self._priority_update
        self._priority_update = None
        if e.port in (Port.REJECT, Port.TOLD):
            return
        for ref in e.store.S:
            if self._awake.get(ref[0], set()) & update:
                self._flag(e, "priority", f"constraint {ref[0]} still suspended although "
                                          f"the reduce at chrono {chrono} meets its awakening condition")

    def finish(self) -> list[Violation]:
        if self._tells:
            at = self._prev.chrono if self._prev else 0
            self.violations.append(Violation(at, "balance", f"{len(self._tells)} tell(s) never told"))
            self._tells = []
        return self.violations


def validate_trace(events: Iterable[TraceEvent]) -> list[Violation]:
    v = TraceValidator()
    for e in events:
        v(e)
    return v.finish()


def format_report(violations: list[Violation]) -> str:
    return "".join(f"{v}\n" for v in violations)
