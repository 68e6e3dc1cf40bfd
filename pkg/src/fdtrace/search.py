"""Depth-first labelling driven by tell/told."""

from __future__ import annotations

from typing import Iterator, Mapping, Optional, Sequence

from .constraints import ConstraintForm, Kind
from .domain import Domain, VarRef
from .engine import Engine
from .model import Labelling, Model, ValStrategy, VarStrategy

Solution = dict  # VarRef -> int


def middle_out(items: Sequence) -> list:
    """Reorder a list from its middle element outward, lower side first."""
    if not items:
        return []
    mid = (len(items) - 1) // 2
    out = [items[mid]]
    for d in range(1, len(items)):
        for i in (mid - d, mid + d):
            if 0 <= i < len(items):
                out.append(items[i])
    return out


def select_variable(strategy: VarStrategy, domains: Mapping[VarRef, Domain],
                    variables: Sequence[VarRef]) -> Optional[VarRef]:
    """Pick the next variable to label among the non-ground ones.

    ``variables`` is expected in tie-break order; ``middle_first`` callers
    pass the list already reordered by :func:`middle_out`.
    """
    best = None
    best_size = None
    for v in variables:
        size = len(domains[v])
        if size <= 1:
            continue
        if strategy is VarStrategy.INPUT_ORDER:
            return v
        if best is None or size < best_size:
            best, best_size = v, size
    return best


def value_order(domain: Domain, strategy: ValStrategy) -> list[int]:
    values = list(domain.values)
    if strategy is ValStrategy.MIN or not values:
        return values
    mid = (values[0] + values[-1]) // 2
    return sorted(values, key=lambda v: (abs(v - mid), v))


def label(engine: Engine, labelling: Labelling) -> Iterator[Solution]:
    """Enumerate solutions depth first; every tell is matched by a told,
    including when the consumer stops early."""
    order = list(labelling.variables)
    if labelling.var_strategy is VarStrategy.MIDDLE_FIRST:
        order = middle_out(order)
    var_strategy = (VarStrategy.FIRST_FAIL if labelling.var_strategy is VarStrategy.MIDDLE_FIRST
                    else labelling.var_strategy)
    yield from _label(engine, labelling, order, var_strategy, labelling.context)


def _label(engine, labelling, order, var_strategy, context):
    v = select_variable(var_strategy, engine.domains, order)
    if v is None:
        yield {x: engine.domains[x].value for x in labelling.variables}
        return
    for value in value_order(engine.domains[v], labelling.val_strategy):
        outcome = engine.tell(ConstraintForm(Kind.EQ_CONST, v, n=value), context=context)
        try:
            if not outcome.halted:
                yield from _label(engine, labelling, order, var_strategy, context)
        finally:
            engine.told()


def solve(model: Model, engine: Optional[Engine] = None, *, sinks=(),
          labelling: Optional[Labelling] = None) -> Iterator[Solution]:
    """Tell the model's constraints, then label.  All tells are unwound at the end."""
    if engine is None:
        engine = Engine(model.initial_domains(), sinks)
    labelling = labelling or model.effective_labelling()
    told = 0
    try:
        ok = True
        for c in model.constraints:
            outcome = engine.tell(c.form, c.abstract, c.context)
            told += 1
            if outcome.halted:
                ok = False
                break
        if ok:
            yield from label(engine, labelling)
    finally:
        for _ in range(told):
            engine.told()


def format_solution(solution: Mapping[VarRef, int]) -> str:
    return "{" + ", ".join(f"{v.name}:{val}" for v, val in solution.items()) + "}"
