"""The ``.ecs`` script language.

A script names every letter it creates::

    type compass
    loc D1 = disc(0, 0, 1)
    choose p1 in D1
    ...
    end

Each statement is one step rule, so a parsed script is a uniform
:class:`~ecs.model.ConstructionProgram`.  Two extensions beyond the six rule
forms: ``target ...`` attaches the set K the script should construct, and
``macro NAME ARGS`` stands for a built-in construction (the only way to write
a non-uniform program).  Positions in errors are 1-based ``line:column``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Optional

from .constructions import ALIASES, BUILTINS
from .errors import NotExpressible, ParseError, RuleViolation, TypeHeaderViolation, UseBeforeDefine
from .geometry import Circle, Line, Point, distance
from .model import (
    COMPASS,
    STRAIGHTEDGE,
    TYPES,
    BisectorTarget,
    Choose,
    ConstructionProgram,
    Disc,
    End,
    EquilateralTarget,
    HSegment,
    NewCircle,
    NewIntersection,
    NewLine,
    NewLocation,
    PointPair,
    PointTarget,
    UnitDistanceTarget,
    is_location,
)

_TYPE_RANK = {STRAIGHTEDGE: 0, COMPASS: 0, "general": 1}

# ---------------------------------------------------------------------------
# tokens


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "num", "op", "eof"
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>\#[^\n]*)"
    r"|(?P<num>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<op>[(),=])"
)


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind in ("num", "name", "op"):
            out.append(Token(kind, m.group(), line, col))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


# ---------------------------------------------------------------------------
# parser


KINDS = ("point", "line", "circle")


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.names: dict[str, tuple[int, str]] = {}  # name -> (letter index, kind)
        self.labels: list[str] = []
        self.root: list = []
        self.steps: list = []
        self.kind_of: list[str] = []
        self.target = None
        self.macro = None
        self.type = None

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Token | None = None, cls=ParseError):
        t = tok or self.tok
        raise cls(msg, t.line, t.col)

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind == "eof":
            found = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
            self.error(f"expected {text!r}, found {found}")
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "name":
            self.error("expected an identifier")
        return self.advance()

    def number(self) -> float:
        if self.tok.kind != "num":
            self.error("expected a number")
        return float(self.advance().text)

    def numbers(self, n: int) -> list[float]:
        self.expect("(")
        vals = [self.number()]
        while self.tok.text == ",":
            self.advance()
            vals.append(self.number())
        close = self.expect(")")
        if len(vals) != n:
            self.error(f"expected {n} numbers, got {len(vals)}", close)
        return vals

    def ref(self, kinds: tuple[str, ...] | None = None, rule: int = 0) -> tuple[int, Token]:
        t = self.ident()
        if t.text not in self.names:
            self.error(f"{t.text!r} is used before it is defined", t, UseBeforeDefine)
        idx, kind = self.names[t.text]
        if kinds is not None and kind not in kinds:
            want = " or ".join(kinds)
            self.error(f"rule {rule}: {t.text!r} is a {kind}, expected a {want}", t, RuleViolation)
        return idx, t

    def define(self, tok: Token, kind: str) -> None:
        if tok.text in self.names:
            self.error(f"{tok.text!r} is already defined", tok)
        if tok.text in _KEYWORDS:
            self.error(f"{tok.text!r} is a keyword", tok)
        self.names[tok.text] = (len(self.labels), kind)
        self.labels.append(tok.text)
        self.kind_of.append(kind)

    # grammar
    def parse(self) -> ConstructionProgram:
        self.expect("type")
        t = self.ident()
        if t.text not in TYPES:
            self.error(f"unknown construction type {t.text!r}", t)
        self.type = t.text
        while self.tok.text == "given":
            self.given()
        while self.tok.kind == "name" and self.tok.text != "end":
            self.statement()
        if self.tok.kind == "eof":
            self.error("missing 'end'")
        if self.steps and isinstance(self.steps[-1], NewLocation):
            self.error("a location must be followed by 'choose'", cls=RuleViolation)
        self.expect("end")
        if self.tok.kind != "eof":
            self.error("text after 'end'")
        return self.build()

    def given(self) -> None:
        self.advance()
        kind_tok = self.ident()
        if kind_tok.text not in KINDS:
            self.error(f"a given must be a point, line or circle, not {kind_tok.text!r}", kind_tok)
        name = self.ident()
        self.expect("=")
        start = self.tok
        try:
            if kind_tok.text == "point":
                item = Point(*self.numbers(2))
            elif kind_tok.text == "line":
                item = Line(*self.numbers(3))
            else:
                cx, cy, r = self.numbers(3)
                item = Circle(Point(cx, cy), r)
        except ValueError as exc:
            self.error(str(exc), start)
        self.define(name, kind_tok.text)
        self.root.append(item)

    def statement(self) -> None:
        if self.steps and isinstance(self.steps[-1], NewLocation) and self.tok.text != "choose":
            self.error("a location must be followed by 'choose'", cls=RuleViolation)
        kw = self.tok
        handler = {
            "line": self.line_stmt,
            "circle": self.circle_stmt,
            "point": self.point_stmt,
            "loc": self.loc_stmt,
            "choose": self.choose_stmt,
            "target": self.target_stmt,
            "macro": self.macro_stmt,
        }.get(kw.text)
        if handler is None:
            self.error(f"unknown statement {kw.text!r}")
        if self.macro is not None and kw.text != "target":
            self.error("a macro must be the only construction statement", kw)
        handler()

    def line_stmt(self) -> None:
        kw = self.advance()
        name = self.ident()
        self.expect("=")
        self.expect("line")
        self.expect("(")
        i, ti = self.ref(("point",), 2)
        self.expect(",")
        j, tj = self.ref(("point",), 2)
        self.expect(")")
        if i == j:
            self.error("rule 2: a line needs two distinct points", tj, RuleViolation)
        if self.type == COMPASS:
            self.error("straightedge is forbidden in a compass construction", kw, TypeHeaderViolation)
        self.define(name, "line")
        self.steps.append(NewLine(i, j))

    def circle_stmt(self, declared: str = "circle") -> None:
        kw = self.advance()
        name = self.ident()
        self.expect("=")
        self.expect("circle")
        self.expect("(")
        i, _ = self.ref(("point",), 3)
        self.expect(",")
        j, tj = self.ref(("point",), 3)
        self.expect(",")
        k, tk = self.ref(("point",), 3)
        self.expect(")")
        degenerate = j == k
        if declared == "point" and not degenerate:
            self.error("only circle(a, b, b) yields a point", tj, RuleViolation)
        if not degenerate and self.type == STRAIGHTEDGE:
            self.error("compass is forbidden in a straightedge construction", kw, TypeHeaderViolation)
        self.define(name, "point" if degenerate else "circle")
        self.steps.append(NewCircle(i, j, k))

    def point_stmt(self) -> None:
        if self.i + 3 < len(self.toks) and self.toks[self.i + 3].text == "circle":
            return self.circle_stmt("point")
        self.advance()
        name = self.ident()
        self.expect("=")
        self.expect("meet")
        self.expect("(")
        i, _ = self.ref(("line", "circle"), 4)
        self.expect(",")
        j, tj = self.ref(("line", "circle"), 4)
        self.expect(",")
        sel_tok = self.tok
        sel = self.number()
        self.expect(")")
        if i == j:
            self.error("rule 4: an intersection needs two distinct curves", tj, RuleViolation)
        if sel not in (0, 1):
            self.error("rule 4: the intersection index must be 0 or 1", sel_tok, RuleViolation)
        self.define(name, "point")
        self.steps.append(NewIntersection(i, j, int(sel)))

    def loc_stmt(self) -> None:
        self.advance()
        name = self.ident()
        self.expect("=")
        shape = self.ident()
        try:
            if shape.text == "disc":
                cx, cy, r = self.numbers(3)
                loc = Disc(Point(cx, cy), r)
            elif shape.text == "hseg":
                loc = HSegment(*self.numbers(3))
            elif shape.text == "pair":
                x1, y1, x2, y2 = self.numbers(4)
                loc = PointPair(Point(x1, y1), Point(x2, y2))
            else:
                self.error(f"unknown location {shape.text!r}; use disc, hseg or pair", shape)
        except ValueError as exc:
            self.error(f"rule 5: {exc}", shape, RuleViolation)
        self.define(name, "loc")
        self.steps.append(NewLocation(loc))

    def choose_stmt(self) -> None:
        kw = self.advance()
        name = self.ident()
        self.expect("in")
        idx, t = self.ref(("loc",), 6)
        if not self.steps or not isinstance(self.steps[-1], NewLocation) or idx != len(self.labels) - 1:
            self.error(f"rule 6: 'choose' must directly follow the location {t.text!r}", kw, RuleViolation)
        self.define(name, "point")
        self.steps.append(Choose())

    def target_stmt(self) -> None:
        kw = self.advance()
        if self.target is not None:
            self.error("only one target per script", kw)
        what = self.ident()
        if what.text == "unit":
            self.target = UnitDistanceTarget()
        elif what.text == "equilateral":
            self.target = EquilateralTarget()
        elif what.text == "point":
            self.target = PointTarget(Point(*self.numbers(2)))
        elif what.text == "center":
            self.expect("(")
            idx, t = self.ref(("circle",))
            self.expect(")")
            item = self._letter(idx, t)
            self.target = PointTarget(item.center, "center")
        elif what.text == "bisector":
            self.expect("(")
            p = self._point_arg()
            self.expect(",")
            q = self._point_arg()
            self.expect(")")
            if distance(p, q) == 0:
                self.error("the bisector target needs two distinct points", what)
            self.target = BisectorTarget(p, q)
        else:
            self.error(f"unknown target {what.text!r}", what)

    def _letter(self, idx: int, tok: Token):
        if idx >= len(self.root):
            self.error(f"{tok.text!r} must be a given", tok)
        return self.root[idx]

    def _point_arg(self) -> Point:
        if self.tok.text == "(":
            self.advance()
            x = self.number()
            self.expect(",")
            y = self.number()
            self.expect(")")
            return Point(x, y)
        idx, t = self.ref(("point",))
        return self._letter(idx, t)

    def macro_stmt(self) -> None:
        kw = self.advance()
        if self.steps:
            self.error("a macro must be the only construction statement", kw)
        name = self.ident()
        key = ALIASES.get(name.text, name.text)
        if key not in BUILTINS:
            self.error(f"unknown macro {name.text!r}", name)
        b = BUILTINS[key]
        args = []
        arg_toks = []
        for want in b.arg_kinds:
            if self.tok.kind != "name" or self.tok.text == "end" or self.tok.text in _KEYWORDS:
                self.error(f"macro {key} expects a {want} argument")
            idx, t = self.ref((want,))
            args.append(idx)
            arg_toks.append(t)
        if args != list(range(len(self.root))):
            self.error(f"macro {key}: its arguments must be exactly the givens, in order", name, RuleViolation)
        program = b.factory(*self.root)
        if _TYPE_RANK[program.declared_type] > _TYPE_RANK[self.type] or (
            self.type != "general" and program.declared_type != self.type
        ):
            self.error(
                f"macro {key} is a {program.declared_type} construction, header says {self.type}",
                kw,
                TypeHeaderViolation,
            )
        self.macro = (key, tuple(t.text for t in arg_toks), program)

    def build(self) -> ConstructionProgram:
        if self.macro is not None:
            key, argnames, program = self.macro
            return replace(
                program,
                declared_type=self.type,
                target=self.target or program.target,
                labels=tuple(self.labels),
                macro=(key, argnames),
            )
        return ConstructionProgram.from_steps(
            self.root,
            self.steps,
            declared_type=self.type,
            target=self.target,
            labels=tuple(self.labels),
        )


_KEYWORDS = {"type", "given", "line", "circle", "point", "meet", "loc", "choose", "in", "end", "target", "macro",
             "disc", "hseg", "pair"}


def parse(text: str) -> ConstructionProgram:
    """Compile a script; raises :class:`ParseError` (or a subclass) with a position.

    A file holding only blanks and comments is the empty construction.
    """
    if all(t.kind == "eof" for t in tokenize(text)):
        return ConstructionProgram.from_steps([], [], name="empty")
    return _Parser(text).parse()


def parse_file(path) -> ConstructionProgram:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


# ---------------------------------------------------------------------------
# formatter


def _num(x: float) -> str:
    r = repr(float(x))
    return "0.0" if r == "-0.0" else r


def _nums(*xs: float) -> str:
    return "(" + ", ".join(_num(x) for x in xs) + ")"


def _default_labels(program: ConstructionProgram) -> list[str]:
    counters = {"point": 0, "line": 0, "circle": 0, "loc": 0}
    prefix = {"point": "p", "line": "L", "circle": "C", "loc": "S"}
    labels = []

    def fresh(kind):
        counters[kind] += 1
        return f"{prefix[kind]}{counters[kind]}"

    for item in program.root:
        labels.append(fresh("point" if isinstance(item, Point) else "line" if isinstance(item, Line) else "circle"))
    for s in program.steps:
        if isinstance(s, NewLine):
            labels.append(fresh("line"))
        elif isinstance(s, NewCircle):
            labels.append(fresh("point" if s.j == s.k else "circle"))
        elif isinstance(s, (NewIntersection, Choose)):
            labels.append(fresh("point"))
        elif isinstance(s, NewLocation):
            labels.append(fresh("loc"))
    return labels


def _format_target(target, labels, root) -> Optional[str]:
    if target is None:
        return None
    if isinstance(target, UnitDistanceTarget):
        return "target unit"
    if isinstance(target, EquilateralTarget):
        return "target equilateral"
    if isinstance(target, PointTarget):
        if target.label == "center":
            for name, item in zip(labels, root):
                if isinstance(item, Circle) and item.center == target.point:
                    return f"target center({name})"
        return f"target point{_nums(target.point.x, target.point.y)}"
    if isinstance(target, BisectorTarget):
        return f"target bisector({_nums(*target.p)}, {_nums(*target.q)})"
    raise NotExpressible(f"target {target!r} has no script form")


def format(program: ConstructionProgram) -> str:  # noqa: A001 - mirrors parse
    """Script text for ``program``; :class:`NotExpressible` for opaque programs."""
    if program.macro is None and not program.is_uniform:
        raise NotExpressible("program steps are computed by a function; only uniform programs have a script form")
    labels = list(program.labels) if program.labels else _default_labels(program)
    lines = [f"type {program.declared_type}"]
    for name, item in zip(labels, program.root):
        if isinstance(item, Point):
            lines.append(f"given point {name} = {_nums(item.x, item.y)}")
        elif isinstance(item, Line):
            lines.append(f"given line {name} = {_nums(item.a, item.b, item.c)}")
        elif isinstance(item, Circle):
            lines.append(f"given circle {name} = {_nums(item.center.x, item.center.y, item.radius)}")
        else:
            raise NotExpressible(f"root letter {item!r} has no script form")
    if program.macro is not None:
        key, _ = program.macro
        args = labels[: len(program.root)]
        lines.append(" ".join(["macro", key, *args]))
    else:
        n0 = len(program.root)
        for n, s in enumerate(program.steps):
            name = labels[n0 + n]
            if isinstance(s, NewLine):
                lines.append(f"line {name} = line({labels[s.i]}, {labels[s.j]})")
            elif isinstance(s, NewCircle):
                kw = "point" if s.j == s.k else "circle"
                lines.append(f"{kw} {name} = circle({labels[s.i]}, {labels[s.j]}, {labels[s.k]})")
            elif isinstance(s, NewIntersection):
                lines.append(f"point {name} = meet({labels[s.i]}, {labels[s.j]}, {s.select})")
            elif isinstance(s, NewLocation):
                loc = s.loc
                if not is_location(loc):
                    raise NotExpressible("location computed from the word")
                if isinstance(loc, Disc):
                    args = _nums(loc.center.x, loc.center.y, loc.radius)
                    lines.append(f"loc {name} = disc{args}")
                elif isinstance(loc, HSegment):
                    lines.append(f"loc {name} = hseg{_nums(loc.a, loc.b, loc.c)}")
                else:
                    lines.append(f"loc {name} = pair{_nums(loc.p.x, loc.p.y, loc.q.x, loc.q.y)}")
            elif isinstance(s, Choose):
                lines.append(f"choose {name} in {labels[n0 + n - 1]}")
            elif isinstance(s, End):
                break
    t = _format_target(program.target, labels, program.root)
    if t:
        lines.append(t)
    lines.append("end")
    return "\n".join(lines) + "\n"
