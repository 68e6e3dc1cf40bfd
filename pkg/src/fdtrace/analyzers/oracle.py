"""Brute-force ground truth: enumerate the Cartesian product of initial domains."""

from __future__ import annotations

import itertools
import math

from ..constraints import check_satisfied
from ..model import Model

DEFAULT_LIMIT = 10 ** 7


class OracleSizeError(ValueError):
    pass


def search_space(model: Model) -> int:
    return math.prod(len(d) for _, d in model.variables)


def oracle_solve(model: Model, limit: int = DEFAULT_LIMIT) -> list[dict]:
    """All solutions over every model variable, in lexicographic order."""
    size = search_space(model)
    if size > limit:
        raise OracleSizeError(f"search space {size} exceeds the oracle limit {limit}")
    variables = model.vars
    forms = [c.form for c in model.constraints]
    out = []
    for values in itertools.product(*(d.values for _, d in model.variables)):
        assignment = dict(zip(variables, values))
        if all(check_satisfied(f, assignment) for f in forms):
            out.append(assignment)
    return out
