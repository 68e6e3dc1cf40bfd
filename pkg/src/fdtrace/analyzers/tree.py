"""Search-tree reconstruction from tell/told/reduce events, and DOT output.

Tell and told are downward and upward moves of a depth-first walk.  The
tells of the model's own constraints are merged into a single arc below the
root; every labelling tell becomes its own arc.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..domain import Domain, VarRef, remove_values, render
from ..trace import Port, TraceEvent

INTERNAL, FAILURE, SOLUTION = "internal", "failure", "solution"


class TreeError(ValueError):
    pass


@dataclass(eq=False)
class TreeNode:
    id: int
    arc: Optional[str] = None
    parent: Optional["TreeNode"] = None
    children: list = field(default_factory=list)
    deltas: list = field(default_factory=list)  # (VarRef, withdrawn values)
    reduced: dict = field(default_factory=dict)  # VarRef -> Domain after the phase
    kind: str = INTERNAL
    rejected: bool = False
    model_arc: bool = False
    closed: bool = False

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass
class SearchTree:
    root: TreeNode
    initial: dict = field(default_factory=dict)

    def nodes(self) -> list[TreeNode]:
        return list(self.root.walk())

    def leaves(self, kind: Optional[str] = None) -> list[TreeNode]:
        return [n for n in self.nodes() if not n.children and n is not self.root
                and (kind is None or n.kind == kind)]

    @property
    def solutions(self) -> int:
        return len(self.leaves(SOLUTION))

    @property
    def failures(self) -> int:
        return sum(1 for n in self.nodes() if n.kind == FAILURE)

    @property
    def choice_points(self) -> int:
        return sum(1 for n in self.nodes() if len(n.children) > 1)

    def labelling_arcs(self) -> int:
        return sum(1 for n in self.nodes() if n.arc is not None and not n.model_arc)

    def summary(self) -> dict:
        return {"nodes": len(self.nodes()), "solutions": self.solutions,
                "failures": self.failures, "choice_points": self.choice_points,
                "labelling_arcs": self.labelling_arcs()}


class TreeBuilder:
    """Incremental fold; feed events with ``builder(event)``."""

    def __init__(self):
        self.root = TreeNode(0)
        self.initial: dict = {}
        self._stack: list[TreeNode] = []
        self._next = 1
        self._started = False

    def __call__(self, e: TraceEvent) -> None:
        if not self._started:
            self.initial = dict(e.domains)
            self._started = True
        if e.port is Port.TELL:
            self._tell(e)
        elif e.port is Port.TOLD:
            self._told(e)
        elif e.port is Port.REDUCE:
            node = self._top(e)
            var, values = e.withdrawn
            node.deltas.append((var, values))
            node.reduced[var] = remove_values(e.domains[var], values)
        elif e.port is Port.REJECT:
            self._top(e).rejected = True

    def _top(self, e) -> TreeNode:
        if not self._stack:
            raise TreeError(f"chrono {e.chrono}: {e.port.value} outside any tell")
        return self._stack[-1]

    def _tell(self, e: TraceEvent) -> None:
        labelling = e.constraint.is_labelling
        parent = self._stack[-1] if self._stack else self.root
        if not labelling and parent.model_arc and not parent.children and not parent.closed:
            parent.arc += ", " + e.constraint.abstract
            self._stack.append(parent)
            return
        node = TreeNode(self._next, e.constraint.abstract, parent, model_arc=not labelling)
        self._next += 1
        parent.children.append(node)
        self._stack.append(node)

    def _told(self, e: TraceEvent) -> None:
        if not self._stack:
            raise TreeError(f"chrono {e.chrono}: told without a matching tell")
        node = self._stack.pop()
        if node.closed:
            return
        node.closed = True
        if node.rejected:
            node.kind = FAILURE
        elif not node.children and all(len(d) == 1 for d in e.domains.values()):
            node.kind = SOLUTION

    def result(self) -> SearchTree:
        if self._stack:
            raise TreeError(f"unbalanced trace: {len(self._stack)} tell(s) never told")
        return SearchTree(self.root, self.initial)


def build_search_tree(events: Iterable[TraceEvent]) -> SearchTree:
    builder = TreeBuilder()
    for e in events:
        builder(e)
    return builder.result()


_SHAPES = {INTERNAL: "ellipse", FAILURE: "box", SOLUTION: "doublecircle"}


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _node_label(tree: SearchTree, node: TreeNode) -> str:
    if node is tree.root:
        items = sorted(tree.initial.items())
    else:
        items = sorted(node.reduced.items())
    return "\n".join(f"{v.name}:{render(d)}" for v, d in items)


def emit_dot(tree: SearchTree, name: str = "search_tree") -> str:
    lines = [f"digraph {name} {{", '  node [fontname="monospace"];']
    nodes = tree.nodes()
    for n in nodes:
        lines.append(f"  n{n.id} [shape={_SHAPES[n.kind]}, label={_quote(_node_label(tree, n))}];")
    for n in nodes:
        for child in n.children:
            lines.append(f"  n{n.id} -> n{child.id} [label={_quote(child.arc)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
