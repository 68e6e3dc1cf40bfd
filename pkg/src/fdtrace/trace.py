"""Trace events, their JSON Lines encoding and the compact human layout.

One JSON object per line::

    {"chrono": 14, "depth": 4, "port": "reduce",
     "constraint": {"id": 4, "abstract": "X#=2", "concrete": "assign(var(1,X),2)",
                    "context": "labelling([X, Y, Z])"},
     "domains": {"X": [2, 3], "Y": [2, 3], "Z": [1, 2]},
     "store": {"A": [[4, "X#=2"]], "S": [...], "Q": [], "T": [], "R": []},
     "withdrawn": {"var": "X", "values": [3]},
     "update": [{"var": "X", "type": "any"}, ...]}

``domains`` lists every model variable in index order; parsing numbers the
variables 1, 2, ... in that order.
"""

from __future__ import annotations

import enum
import io
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping, NamedTuple, Optional, Union

from .constraints import ConstraintForm, ConstraintRef, parse_concrete
from .domain import Domain, UpdateType, VarRef, render

log = logging.getLogger(__name__)

TRACE_SUFFIX = ".fdtrace.jsonl"


class Port(str, enum.Enum):
    TELL = "tell"
    TOLD = "told"
    SELECT = "select"
    REJECT = "reject"
    WAKE_UP = "wake-up"
    REDUCE = "reduce"
    TRUE = "true"
    SUSPEND = "suspend"

    @property
    def title(self) -> str:
        return self.value.capitalize()


class ConstraintInfo(NamedTuple):
    id: int
    abstract: str
    concrete: str
    context: str

    @property
    def ref(self) -> ConstraintRef:
        return ConstraintRef(self.id, self.abstract)

    @property
    def form(self) -> ConstraintForm:
        return parse_concrete(self.concrete)

    @property
    def is_labelling(self) -> bool:
        return self.context.startswith("labelling(")


class Store(NamedTuple):
    A: tuple = ()
    S: tuple = ()
    Q: tuple = ()
    T: tuple = ()
    R: tuple = ()

    def ids(self, part: str) -> list[int]:
        return [r[0] for r in getattr(self, part)]


Update = tuple  # (VarRef, UpdateType)


@dataclass(frozen=True)
class TraceEvent:
    chrono: int
    depth: int
    port: Port
    constraint: ConstraintInfo
    domains: Mapping[VarRef, Domain]
    store: Store
    withdrawn: Optional[tuple] = None  # (VarRef, tuple of values)
    update: Optional[tuple] = None
    cause: Optional[tuple] = None

    @property
    def vars(self) -> tuple[VarRef, ...]:
        return self.constraint.form.vars


class TraceFormatError(ValueError):
    def __init__(self, message: str, lineno: Optional[int] = None):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)


def _updates_json(updates):
    return [{"var": v.name, "type": t.value} for v, t in updates]


def to_record(e: TraceEvent) -> dict:
    c = e.constraint
    rec = {
        "chrono": e.chrono,
        "depth": e.depth,
        "port": e.port.value,
        "constraint": {"id": c.id, "abstract": c.abstract,
                       "concrete": c.concrete, "context": c.context},
        "domains": {v.name: list(d.values) for v, d in sorted(e.domains.items())},
        "store": {k: [list(r) for r in part] for k, part in zip(Store._fields, e.store)},
    }
    if e.withdrawn is not None:
        var, values = e.withdrawn
        rec["withdrawn"] = {"var": var.name, "values": list(values)}
    if e.update is not None:
        rec["update"] = _updates_json(e.update)
    if e.cause is not None:
        rec["cause"] = _updates_json(e.cause)
    return rec


_fragments: dict = {}
_FRAGMENT_LIMIT = 500_000


def _fragment(key, build):
    text = _fragments.get(key)
    if text is None:
        if len(_fragments) > _FRAGMENT_LIMIT:
            _fragments.clear()
        text = _fragments[key] = build(key)
    return text


def _ref_json(ref) -> str:
    return f"[{ref[0]},{json.dumps(ref[1])}]"


def _domain_json(item) -> str:
    var, dom = item
    return json.dumps(var.name) + ":[" + ",".join(map(str, dom.values)) + "]"


def serialize(e: TraceEvent) -> str:
    """Same text as ``json.dumps(to_record(e), separators=(",", ":"))``, built from
    cached fragments because the store listing dominates each record."""
    c = e.constraint
    head = json.dumps({
        "chrono": e.chrono, "depth": e.depth, "port": e.port.value,
        "constraint": {"id": c.id, "abstract": c.abstract,
                       "concrete": c.concrete, "context": c.context},
    }, separators=(",", ":"))
    parts = [head[:-1], ',"domains":{']
    parts.append(",".join(_fragment(item, _domain_json) for item in sorted(e.domains.items())))
    parts.append('},"store":{')
    parts.append(",".join(
        f'"{k}":[' + ",".join([_fragment(r, _ref_json) for r in part]) + "]"
        for k, part in zip(Store._fields, e.store)))
    parts.append("}")
    tail = {}
    if e.withdrawn is not None:
        var, values = e.withdrawn
        tail["withdrawn"] = {"var": var.name, "values": list(values)}
    if e.update is not None:
        tail["update"] = _updates_json(e.update)
    if e.cause is not None:
        tail["cause"] = _updates_json(e.cause)
    if tail:
        parts.append("," + json.dumps(tail, separators=(",", ":"))[1:-1])
    parts.append("}")
    return "".join(parts)


_REQUIRED = ("chrono", "depth", "port", "constraint", "domains", "store")


def _require(obj, key, kind, lineno, where="record"):
    if not isinstance(obj, dict) or key not in obj:
        raise TraceFormatError(f"{where} is missing required key {key!r}", lineno)
    val = obj[key]
    if not isinstance(val, kind) or (kind is int and isinstance(val, bool)):
        raise TraceFormatError(f"{where} key {key!r} has wrong type", lineno)
    return val


def _read_updates(items, vars_by_name, key, lineno):
    if not isinstance(items, list) or not items:
        raise TraceFormatError(f"{key} must be a nonempty list", lineno)
    out = []
    for item in items:
        name = _require(item, "var", str, lineno, key)
        try:
            t = UpdateType(_require(item, "type", str, lineno, key))
        except ValueError:
            raise TraceFormatError(f"{key}: unknown update type {item['type']!r}", lineno) from None
        out.append((_var(vars_by_name, name, lineno), t))
    return tuple(out)


def _var(vars_by_name, name, lineno):
    try:
        return vars_by_name[name]
    except KeyError:
        raise TraceFormatError(f"unknown variable {name!r}", lineno) from None


class _RefCache(dict):
    """Interns store entries; only unseen pairs pay for validation."""

    def __missing__(self, key):
        if len(key) != 2 or type(key[0]) is not int or type(key[1]) is not str:
            raise ValueError(key)
        ref = ConstraintRef(*key)
        if len(self) < _FRAGMENT_LIMIT:
            self[key] = ref
        return ref


_REFS = _RefCache()


def from_record(rec: dict, lineno: Optional[int] = None) -> TraceEvent:
    if not isinstance(rec, dict):
        raise TraceFormatError("record is not a JSON object", lineno)
    for key in _REQUIRED:
        if key not in rec:
            raise TraceFormatError(f"missing required key {key!r}", lineno)
    chrono = _require(rec, "chrono", int, lineno)
    depth = _require(rec, "depth", int, lineno)
    try:
        port = Port(rec["port"])
    except ValueError:
        raise TraceFormatError(f"unknown port {rec['port']!r}", lineno) from None

    c = _require(rec, "constraint", dict, lineno)
    info = ConstraintInfo(_require(c, "id", int, lineno, "constraint"),
                          _require(c, "abstract", str, lineno, "constraint"),
                          _require(c, "concrete", str, lineno, "constraint"),
                          _require(c, "context", str, lineno, "constraint"))

    raw_domains = _require(rec, "domains", dict, lineno)
    domains = {}
    vars_by_name = {}
    for i, (name, values) in enumerate(raw_domains.items(), start=1):
        if not isinstance(values, list) or not all(isinstance(v, int) for v in values):
            raise TraceFormatError(f"domain of {name!r} is not a list of integers", lineno)
        var = VarRef(i, name)
        vars_by_name[name] = var
        domains[var] = Domain(values)

    raw_store = _require(rec, "store", dict, lineno)
    parts = []
    lookup = _REFS.__getitem__
    for k in Store._fields:
        part = _require(raw_store, k, list, lineno, "store")
        try:
            refs = tuple(map(lookup, map(tuple, part)))
        except (TypeError, ValueError):
            raise TraceFormatError(f"store.{k} entries must be [id, abstract] pairs", lineno) from None
        parts.append(refs)
    store = Store(*parts)

    withdrawn = update = cause = None
    if port is Port.REDUCE:
        if "withdrawn" not in rec or "update" not in rec:
            raise TraceFormatError("reduce event requires withdrawn and update", lineno)
        w = _require(rec, "withdrawn", dict, lineno)
        values = _require(w, "values", list, lineno, "withdrawn")
        if not values:
            raise TraceFormatError("withdrawn values must be nonempty", lineno)
        withdrawn = (_var(vars_by_name, _require(w, "var", str, lineno, "withdrawn"), lineno),
                     tuple(sorted(values)))
        update = _read_updates(rec["update"], vars_by_name, "update", lineno)
    else:
        for key in ("withdrawn", "update"):
            if key in rec:
                raise TraceFormatError(f"{key} is only allowed on reduce events", lineno)
    if port is Port.WAKE_UP:
        if "cause" not in rec:
            raise TraceFormatError("wake-up event requires cause", lineno)
        cause = _read_updates(rec["cause"], vars_by_name, "cause", lineno)
    elif "cause" in rec:
        raise TraceFormatError("cause is only allowed on wake-up events", lineno)

    return TraceEvent(chrono, depth, port, info, domains, store, withdrawn, update, cause)


def parse(line: str, lineno: Optional[int] = None) -> Optional[TraceEvent]:
    """Decode one JSON Lines record; blank lines give ``None``."""
    if not line.strip():
        return None
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"malformed JSON: {exc.msg}", lineno) from None
    return from_record(rec, lineno)


def read_trace(source: Union[str, Path, IO[str], Iterable[str]]) -> Iterator[TraceEvent]:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            yield from read_trace(fh)
        return
    for lineno, line in enumerate(source, start=1):
        e = parse(line, lineno)
        if e is not None:
            yield e


def format_compact(e: TraceEvent) -> str:
    parts = [str(e.chrono), f"[{e.depth}]", e.port.title, e.constraint.abstract]
    for v in e.vars:
        parts.append(f"{v.name}:{render(e.domains[v])}")
    if e.withdrawn is not None:
        var, values = e.withdrawn
        parts.append(f"{var.name}{render(values)}")
    return " ".join(parts)


def format_update(updates) -> str:
    """``[X->any, X->ground]`` style rendering."""
    return "[" + ", ".join(f"{v.name}->{t.value}" for v, t in updates) + "]"


class TraceWriter:
    """Sink writing each event as one line, in ``jsonl`` or ``compact`` format."""

    def __init__(self, stream: IO[str], fmt: str = "jsonl"):
        if fmt not in ("jsonl", "compact"):
            raise ValueError(f"unknown trace format {fmt!r}")
        self.stream = stream
        self._format = serialize if fmt == "jsonl" else format_compact
        self.count = 0

    def __call__(self, event: TraceEvent) -> None:
        self.stream.write(self._format(event))
        self.stream.write("\n")
        self.count += 1


class TraceRecorder(list):
    """Sink keeping every event in memory."""

    def __call__(self, event: TraceEvent) -> None:
        self.append(event)


def dumps(events: Iterable[TraceEvent]) -> str:
    buf = io.StringIO()
    w = TraceWriter(buf)
    for e in events:
        w(e)
    return buf.getvalue()
