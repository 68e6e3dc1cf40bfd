"""Instrumented engine and independent checks shared by several test modules."""

from __future__ import annotations

import itertools

from fdtrace.constraints import check_satisfied
from fdtrace.engine import Engine


def unsupported_values(engine: Engine) -> list[tuple]:
    """(constraint id, variable, value) triples lacking a brute-force support."""
    doms = engine.domains
    missing = []
    for c in engine.constraints():
        if c is engine.rejected:
            continue
        for var in c.vars:
            others = [v for v in c.vars if v != var]
            for value in doms[var]:
                if not any(check_satisfied(c.form, {var: value, **dict(zip(others, combo))})
                           for combo in itertools.product(*(doms[o] for o in others))):
                    missing.append((c.id, var.name, value))
    return missing


class CheckingEngine(Engine):
    """Engine that records independent copies of the state at each tell.

    On every told it compares the restored state with that copy, and at
    every propagation fixpoint it checks arc consistency of the store.
    """

    def __init__(self, domains, sinks=()):
        super().__init__(domains, sinks)
        self._copies: list = []
        self.restore_failures: list = []
        self.ac_failures: list = []
        self.fixpoints = 0
        self.tolds = 0
        self.fixpoint_hooks.append(self._check_ac)

    def _state(self):
        return {v: tuple(d.values) for v, d in self.domains.items()}, self.store()

    def _check_ac(self, engine):
        self.fixpoints += 1
        bad = unsupported_values(engine)
        if bad:
            self.ac_failures.append((engine.chrono, bad))

    def tell(self, form, abstract=None, context=""):
        self._copies.append(self._state())
        return super().tell(form, abstract, context)

    def told(self):
        c = super().told()
        self.tolds += 1
        expected = self._copies.pop()
        if self._state() != expected:
            self.restore_failures.append((self.chrono, c.id))
        return c
