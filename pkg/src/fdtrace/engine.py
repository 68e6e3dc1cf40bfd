"""Rule machine over the partitioned constraint store.

The store is split into the active constraint (A), the suspended list (S),
the propagation queue (Q), the solved list (T) and the rejected constraint
(R).  Each call to :meth:`Engine.propagation_step` fires the first
applicable rule in the fixed order select, reject, wake-up, reduce, true,
suspend and emits one trace event describing the state just before the
rule acted.  ``tell`` pushes a snapshot of (store, domains) and ``told``
pops it.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict, deque
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

from .constraints import (ConstraintForm, ConstraintInstance, awakening_condition,
                          is_solved, reduce_step)
from .domain import Domain, VarRef, classify_update, remove_values
from .trace import ConstraintInfo, Port, Store, TraceEvent

log = logging.getLogger(__name__)

Sink = Callable[[TraceEvent], None]


@dataclass(frozen=True)
class StepOutcome:
    kind: str  # "fired", "fixpoint" or "halted"
    port: Optional[Port] = None
    rejected: Optional[int] = None

    @property
    def halted(self) -> bool:
        return self.kind == "halted"

    @property
    def fired(self) -> bool:
        return self.kind == "fired"


FIXPOINT = StepOutcome("fixpoint")
_FIRED = {p: StepOutcome("fired", p) for p in Port}


class EngineError(RuntimeError):
    pass


@dataclass(frozen=True)
class Snapshot:
    suspended: dict
    queue: tuple
    solved: tuple
    rejected: Optional[ConstraintInstance]
    domains: dict
    stamps: dict


class Engine:
    """Single-threaded propagation engine emitting trace events to sinks.

    ``domains`` is treated copy-on-write: every reduction installs a new dict,
    so emitted events and snapshots can share it safely.
    """

    def __init__(self, domains: Mapping[VarRef, Domain], sinks=()):
        self.domains: dict = dict(domains)
        self.active: Optional[ConstraintInstance] = None
        # oldest first; the S listing is the reverse (most recently suspended first)
        self.suspended: dict = {}
        self.queue: deque = deque()
        self.solved: list = []
        self.rejected: Optional[ConstraintInstance] = None
        self.pending_mods: list = []
        self.chrono = 0
        self.port_counts: Counter = Counter()
        self.sinks: list = list(sinks)
        self.sink_errors: list = []
        self.fixpoint_hooks: list = []
        self._stack: list = []
        self._told_at: list = []
        self._next_id = 1
        self._stamp = 0
        self._stamps: dict = {}
        self._wake: deque = deque()
        self._awake: dict = {}
        self._watchers = defaultdict(list)

    @property
    def depth(self) -> int:
        return len(self._stack)

    # -- store views ------------------------------------------------------

    def store(self) -> Store:
        return Store(
            (self.active.ref,) if self.active is not None else (),
            tuple(reversed(self.suspended)),
            tuple(c.ref for c in self.queue),
            tuple(c.ref for c in reversed(self.solved)),
            (self.rejected.ref,) if self.rejected is not None else (),
        )

    def suspended_list(self) -> list[ConstraintInstance]:
        return list(reversed(self.suspended.values()))

    def constraints(self) -> list[ConstraintInstance]:
        """Every constraint currently in the store."""
        out = [self.active] if self.active is not None else []
        out += self.suspended_list() + list(self.queue) + list(self.solved)
        if self.rejected is not None:
            out.append(self.rejected)
        return out

    # -- events -----------------------------------------------------------

    def _emit(self, port: Port, c: ConstraintInstance, **extra) -> None:
        self.chrono += 1
        self.port_counts[port] += 1
        if not self.sinks:
            return
        event = TraceEvent(
            self.chrono, self.depth, port,
            ConstraintInfo(c.id, c.abstract, c.concrete, c.context),
            self.domains, self.store(), **extra)
        for sink in self.sinks:
            try:
                sink(event)
            except Exception as exc:  # sinks never stop the solver
                log.warning("trace sink %r failed at chrono %d: %s", sink, event.chrono, exc)
                self.sink_errors.append((event.chrono, exc))

    # -- control rules ----------------------------------------------------

    def tell(self, form: ConstraintForm, abstract: Optional[str] = None,
             context: str = "") -> StepOutcome:
        """Add a constraint as the active one, then propagate to fixpoint or rejection."""
        if self.active is not None:
            raise EngineError("tell requires an empty active set")
        c = ConstraintInstance(self._next_id, abstract or form.abstract(), form, context)
        self._next_id += 1
        self._stack.append(Snapshot(dict(self.suspended), tuple(self.queue),
                                    tuple(self.solved), self.rejected, self.domains,
                                    dict(self._stamps)))
        self._told_at.append(c)
        awake = awakening_condition(form)
        self._awake[c.id] = awake
        for v in {v for v, _ in awake}:
            self._watchers[v].append(c)
        self.active = c
        self.pending_mods = []
        self._wake.clear()
        self._emit(Port.TELL, c)
        return self.run_propagation()

    def told(self) -> ConstraintInstance:
        """Restore the state saved by the matching tell; returns the told constraint."""
        if not self._stack:
            raise EngineError("told on an empty control stack")
        c = self._told_at[-1]
        self._emit(Port.TOLD, c)
        snap = self._stack.pop()
        self._told_at.pop()
        self.active = None
        self.suspended = snap.suspended
        self.queue = deque(snap.queue)
        self.solved = list(snap.solved)
        self.rejected = snap.rejected
        self.domains = snap.domains
        self._stamps = snap.stamps
        self.pending_mods = []
        self._wake.clear()
        for v in {v for v, _ in self._awake.pop(c.id)}:
            watchers = self._watchers[v]
            assert watchers[-1] is c
            watchers.pop()
        return c

    # -- propagation rules ------------------------------------------------

    def propagation_step(self) -> StepOutcome:
        a = self.active
        if a is None and self.rejected is None and self.queue:
            return self._select()
        if a is not None and any(not self.domains[v] for v in a.vars):
            return self._reject(a)
        if self.rejected is None and self._wake:
            return self._wake_up()
        if a is not None and self.rejected is None:
            for x in a.vars:
                w = reduce_step(a.form, self.domains, x)
                if w:
                    return self._reduce(a, x, w)
            if is_solved(a.form, self.domains):
                return self._true(a)
            return self._suspend(a)
        if self.rejected is not None:
            return StepOutcome("halted", rejected=self.rejected.id)
        return FIXPOINT

    def run_propagation(self) -> StepOutcome:
        while True:
            outcome = self.propagation_step()
            if not outcome.fired:
                break
        if outcome is FIXPOINT:
            for hook in self.fixpoint_hooks:
                hook(self)
        return outcome

    def _select(self) -> StepOutcome:
        c = self.queue[0]
        self._emit(Port.SELECT, c)
        self.queue.popleft()
        self.active = c
        self._clear_mods()
        return _FIRED[Port.SELECT]

    def _reject(self, c) -> StepOutcome:
        self._emit(Port.REJECT, c)
        self.active = None
        self.rejected = c
        self._clear_mods()
        return StepOutcome("halted", rejected=c.id)

    def _wake_up(self) -> StepOutcome:
        c, cause = self._wake[0]
        self._emit(Port.WAKE_UP, c, cause=tuple(cause))
        self._wake.popleft()
        del self.suspended[c.ref]
        self.queue.append(c)
        return _FIRED[Port.WAKE_UP]

    def _reduce(self, c, x: VarRef, w) -> StepOutcome:
        old = self.domains[x]
        mods = [(x, t) for t in classify_update(old, w)]
        self._emit(Port.REDUCE, c, withdrawn=(x, tuple(sorted(w))), update=tuple(mods))
        self.domains = {**self.domains, x: remove_values(old, w)}
        self.pending_mods = mods
        self._wake = deque(self._wake_candidates(x, {t for _, t in mods}))
        return _FIRED[Port.REDUCE]

    def _wake_candidates(self, x: VarRef, types: set):
        """Suspended constraints whose awakening condition meets the new mods, in S order."""
        found = []
        for c in self._watchers.get(x, ()):
            if c.ref not in self.suspended:
                continue
            cause = [(v, t) for v, t in self._awake[c.id] if v == x and t in types]
            if cause:
                found.append((self._stamps[c.id], c, cause))
        found.sort(key=lambda item: -item[0])
        return [(c, cause) for _, c, cause in found]

    def _true(self, c) -> StepOutcome:
        self._emit(Port.TRUE, c)
        self.active = None
        self.solved.append(c)
        self._clear_mods()
        return _FIRED[Port.TRUE]

    def _suspend(self, c) -> StepOutcome:
        self._emit(Port.SUSPEND, c)
        self.active = None
        self._stamp += 1
        self._stamps[c.id] = self._stamp
        self.suspended[c.ref] = c
        self._clear_mods()
        return _FIRED[Port.SUSPEND]

    def _clear_mods(self) -> None:
        self.pending_mods = []
        self._wake.clear()
