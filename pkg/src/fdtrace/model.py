"""Model language and built-in example models.

Grammar (statements end with ``;``, ``%`` starts a line comment)::

    var X in 1..3;
    [X, Y, Z] :: 1..3;
    X ## Y;              % also X #\\= Y
    X #>= Y;  Y #> Z;
    X #= Y + 2;  X ## Y - 1;  X #= Y + (-1);
    X #= 2;   X ## 4;
    label [X, Y, Z] var first_fail val min;

``X #= Y + 0`` reads as ``X #= Y``.  A negative offset swaps the sides:
``X #= Y - n`` becomes ``Y #= X + n`` (same for ``##``).  ``#>`` and ``#>=``
only relate two variables.
"""

from __future__ import annotations

import enum
import random
import re
from dataclasses import dataclass, field
from typing import Optional

from .constraints import ConstraintForm, Kind
from .domain import Domain, VarRef


class VarStrategy(str, enum.Enum):
    INPUT_ORDER = "input_order"
    FIRST_FAIL = "first_fail"
    MIDDLE_FIRST = "middle_first"


class ValStrategy(str, enum.Enum):
    MIN = "min"
    MIDDLE = "middle"


@dataclass(frozen=True)
class ModelConstraint:
    form: ConstraintForm
    abstract: str
    context: str


@dataclass(frozen=True)
class Labelling:
    variables: tuple
    var_strategy: VarStrategy = VarStrategy.FIRST_FAIL
    val_strategy: ValStrategy = ValStrategy.MIN

    @property
    def context(self) -> str:
        return "labelling([" + ", ".join(v.name for v in self.variables) + "])"


@dataclass
class Model:
    variables: list = field(default_factory=list)  # (VarRef, Domain) pairs
    constraints: list = field(default_factory=list)
    labelling: Optional[Labelling] = None
    name: str = "model"

    def initial_domains(self) -> dict:
        return dict(self.variables)

    @property
    def vars(self) -> list[VarRef]:
        return [v for v, _ in self.variables]

    def var(self, name: str) -> VarRef:
        for v, _ in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    def effective_labelling(self) -> Labelling:
        return self.labelling or Labelling(tuple(self.vars))


class ModelSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<op>\#>=|\#>|\#\\=|\#\#|\#=)
  | (?P<punct>::|\.\.|[\[\],;+\-()])
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ModelSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1, pos))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1, pos))
    return toks


class _Parser:
    def __init__(self, text: str, context: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.context = context
        self.model = Model(name=context)
        self.by_name: dict[str, VarRef] = {}

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message, tok=None):
        tok = tok or self.tok
        return ModelSyntaxError(message, tok.line, tok.col)

    def advance(self) -> _Tok:
        tok = self.tok
        self.i += 1
        return tok

    def expect(self, kind, text=None) -> _Tok:
        tok = self.tok
        if tok.kind != kind or (text is not None and tok.text != text):
            want = repr(text) if text else kind
            got = repr(tok.text) if tok.text else "end of input"
            raise self.error(f"expected {want}, got {got}")
        return self.advance()

    def at(self, kind, text=None) -> bool:
        return self.tok.kind == kind and (text is None or self.tok.text == text)

    def integer(self) -> int:
        sign = 1
        if self.at("punct", "-"):
            self.advance()
            sign = -1
        return sign * int(self.expect("int").text)

    def parse(self) -> Model:
        while not self.at("eof"):
            self.statement()
        return self.model

    def statement(self):
        tok = self.tok
        if self.at("name", "var") and self.toks[self.i + 1].kind == "name":
            self.advance()
            name = self.expect("name")
            self.expect("name", "in")
            self.declare([name], *self.range())
        elif self.at("punct", "["):
            names = self.name_list()
            self.expect("punct", "::")
            self.declare(names, *self.range())
        elif self.at("name", "label") and self.toks[self.i + 1].text == "[":
            self.label(self.advance())
        elif self.at("name"):
            self.constraint()
        else:
            raise self.error(f"unexpected {tok.text or 'end of input'!r}")
        self.expect("punct", ";")

    def range(self):
        lo_tok = self.tok
        lo = self.integer()
        self.expect("punct", "..")
        hi = self.integer()
        if lo > hi:
            raise self.error(f"empty range {lo}..{hi}", lo_tok)
        return lo, hi

    def name_list(self) -> list[_Tok]:
        self.expect("punct", "[")
        names = []
        if not self.at("punct", "]"):
            names.append(self.expect("name"))
            while self.at("punct", ","):
                self.advance()
                names.append(self.expect("name"))
        self.expect("punct", "]")
        return names

    def declare(self, names, lo, hi):
        for tok in names:
            if tok.text in self.by_name:
                raise self.error(f"variable {tok.text} declared twice", tok)
            v = VarRef(len(self.model.variables) + 1, tok.text)
            self.by_name[tok.text] = v
            self.model.variables.append((v, Domain.interval(lo, hi)))

    def lookup(self, tok: _Tok) -> VarRef:
        try:
            return self.by_name[tok.text]
        except KeyError:
            raise self.error(f"undeclared variable {tok.text}", tok) from None

    def label(self, keyword: _Tok):
        if self.model.labelling is not None:
            raise self.error("labelling given twice", keyword)
        variables = tuple(self.lookup(t) for t in self.name_list())
        var_s, val_s = VarStrategy.FIRST_FAIL, ValStrategy.MIN
        while self.at("name", "var") or self.at("name", "val"):
            which = self.advance().text
            tok = self.expect("name")
            enum_cls = VarStrategy if which == "var" else ValStrategy
            try:
                choice = enum_cls(tok.text)
            except ValueError:
                raise self.error(f"unknown {which} strategy {tok.text!r}", tok) from None
            if which == "var":
                var_s = choice
            else:
                val_s = choice
        self.model.labelling = Labelling(variables, var_s, val_s)

    def constraint(self):
        start = self.tok
        x = self.lookup(self.advance())
        op_tok = self.tok
        if op_tok.kind != "op":
            raise self.error(f"expected a constraint operator, got {op_tok.text!r}")
        self.advance()
        op = "##" if op_tok.text == "#\\=" else op_tok.text

        y = None
        n = None
        if self.at("name"):
            y = self.lookup(self.advance())
            if self.at("punct", "+") or self.at("punct", "-"):
                sign = 1 if self.advance().text == "+" else -1
                if self.at("punct", "("):
                    self.advance()
                    n = self.integer()
                    self.expect("punct", ")")
                else:
                    n = self.integer()
                n *= sign
        elif self.at("int") or self.at("punct", "-"):
            n = self.integer()
        else:
            raise self.error(f"expected a variable or integer, got {self.tok.text!r}")
        end = self.tok

        if y == x:
            raise self.error(f"both sides of the constraint are {x.name}", start)
        form = _normalize(op, x, y, n)
        if form is None:
            raise self.error(f"{op} with this right-hand side is not a primitive constraint", op_tok)
        abstract = re.sub(r"\s+", "", self.text[start.pos:end.pos])
        self.model.constraints.append(ModelConstraint(form, abstract, self.context))


def _normalize(op, x, y, n) -> Optional[ConstraintForm]:
    if y is None:
        if op == "#=":
            return ConstraintForm(Kind.EQ_CONST, x, n=n)
        if op == "##":
            return ConstraintForm(Kind.NEQ_CONST, x, n=n)
        return None
    if op in ("#>", "#>="):
        if n is not None:
            return None
        return ConstraintForm(Kind.GT if op == "#>" else Kind.GEQ, x, y)
    plain, offset = (Kind.EQ, Kind.EQ_OFFSET) if op == "#=" else (Kind.NEQ, Kind.NEQ_OFFSET)
    if not n:
        return ConstraintForm(plain, x, y)
    if n > 0:
        return ConstraintForm(offset, x, y, n)
    return ConstraintForm(offset, y, x, -n)


def parse_model(text: str, context: str = "model") -> Model:
    """Parse model source; ``context`` names the invocation context of every constraint."""
    return _Parser(text, context).parse()


def render_model(model: Model) -> str:
    """Canonical source text; ``parse_model`` reads it back to an equal model."""
    lines = []
    for v, d in model.variables:
        vals = d.values
        if vals != tuple(range(vals[0], vals[-1] + 1)):
            raise ValueError(f"domain of {v.name} is not an interval")
        lines.append(f"var {v.name} in {vals[0]}..{vals[-1]};")
    for c in model.constraints:
        lines.append(f"{c.abstract};")
    if model.labelling is not None:
        lab = model.labelling
        names = ", ".join(v.name for v in lab.variables)
        lines.append(f"label [{names}] var {lab.var_strategy.value} val {lab.val_strategy.value};")
    return "\n".join(lines) + "\n"


SORTED_SOURCE = """\
% sorted([X, Y, Z])
[X, Y, Z] :: 1..3;
X ## Y;
X #>= Y;
Y #> Z;
label [X, Y, Z] var first_fail val min;
"""


def generate_sorted() -> Model:
    """Three variables in 1..3 with X##Y, X#>=Y, Y#>Z and first-fail labelling."""
    x, y, z = VarRef(1, "X"), VarRef(2, "Y"), VarRef(3, "Z")
    ctx = "sorted([X, Y, Z])"
    cons = [
        ModelConstraint(ConstraintForm(Kind.NEQ, x, y), "X##Y", ctx),
        ModelConstraint(ConstraintForm(Kind.GEQ, x, y), "X#>=Y", ctx),
        ModelConstraint(ConstraintForm(Kind.GT, y, z), "Y#>Z", ctx),
    ]
    dom = Domain.interval(1, 3)
    return Model([(x, dom), (y, dom), (z, dom)], cons, Labelling((x, y, z)), name=ctx)


def generate_nqueens(n: int, var_strategy=VarStrategy.FIRST_FAIL,
                     val_strategy=ValStrategy.MIN) -> Model:
    """Queens Q1..Qn (Qi is the column of the queen on row i)."""
    if n < 1:
        raise ValueError("n-queens needs n >= 1")
    qs = [VarRef(i, f"Q{i}") for i in range(1, n + 1)]
    ctx = f"queens({n})"
    cons = []
    for i in range(n):
        for j in range(i + 1, n):
            a, b, d = qs[i], qs[j], j - i
            cons.append(ModelConstraint(ConstraintForm(Kind.NEQ, a, b), f"{a.name}##{b.name}", ctx))
            cons.append(ModelConstraint(ConstraintForm(Kind.NEQ_OFFSET, a, b, d), f"{a.name}##{b.name}+{d}", ctx))
            cons.append(ModelConstraint(ConstraintForm(Kind.NEQ_OFFSET, b, a, d), f"{b.name}##{a.name}+{d}", ctx))
    dom = Domain.interval(1, n)
    return Model([(q, dom) for q in qs], cons,
                 Labelling(tuple(qs), VarStrategy(var_strategy), ValStrategy(val_strategy)),
                 name=ctx)


def builtin(text: str) -> Model:
    """Resolve ``sorted``, ``nqueens:<n>`` or ``random:<seed>``."""
    name, _, arg = text.partition(":")
    if name == "sorted" and not arg:
        return generate_sorted()
    if name == "random" and arg:
        return random_model(random.Random(int(arg)))
    if name in ("nqueens", "queens"):
        try:
            n = int(arg) if arg else 8
        except ValueError:
            raise ValueError(f"bad board size in {text!r}") from None
        return generate_nqueens(n)
    raise ValueError(f"unknown builtin model {text!r} (known: sorted, nqueens:<n>, random:<seed>)")


def random_model(rng, max_vars: int = 4, lo: int = 1, hi: int = 6,
                 max_constraints: int = 6) -> Model:
    """A small random model over the eight primitive forms (``rng`` is a ``random.Random``)."""
    n = rng.randint(1, max_vars)
    variables = []
    for i in range(1, n + 1):
        a = rng.randint(lo, hi)
        b = rng.randint(lo, hi)
        variables.append((VarRef(i, f"V{i}"), Domain.interval(min(a, b), max(a, b))))
    vs = [v for v, _ in variables]
    kinds = list(Kind) if n > 1 else [Kind.EQ_CONST, Kind.NEQ_CONST]
    cons = []
    for _ in range(rng.randint(0, max_constraints)):
        kind = rng.choice(kinds)
        if kind in (Kind.EQ_CONST, Kind.NEQ_CONST):
            form = ConstraintForm(kind, rng.choice(vs), n=rng.randint(lo, hi))
        else:
            x, y = rng.sample(vs, 2)
            offset = rng.randint(1, 3) if kind in (Kind.EQ_OFFSET, Kind.NEQ_OFFSET) else None
            form = ConstraintForm(kind, x, y, offset)
        cons.append(ModelConstraint(form, form.abstract(), "random"))
    strategy = rng.choice(list(VarStrategy))
    value = rng.choice(list(ValStrategy))
    return Model(variables, cons, Labelling(tuple(vs), strategy, value), name="random")
