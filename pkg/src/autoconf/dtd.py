"""DTD element declarations and content-model validation.

Only ``<!ELEMENT>`` declarations are understood.  Each content model is
compiled to a deterministic automaton: the Glushkov (position) automaton
of the model's regular expression, determinized by subset construction so
that nondeterministic models are handled too.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence, Union

from .xml_core import NAME_RE, Text, XmlDocument, XmlElement

log = logging.getLogger(__name__)

__all__ = [
    "Name",
    "Seq",
    "Choice",
    "Repeat",
    "PCData",
    "Empty",
    "ContentModel",
    "DtdGrammar",
    "DtdSyntaxError",
    "Matcher",
    "MatchResult",
    "Violation",
    "ValidationReport",
    "parse_dtd",
    "compile_content_model",
    "validate_document",
    "describe",
]


class DtdSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.message = message
        self.line = line


# -- content model tree ----------------------------------------------------


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Seq:
    items: tuple

    def __post_init__(self):
        if not self.items:
            raise ValueError("empty sequence")


@dataclass(frozen=True)
class Choice:
    items: tuple

    def __post_init__(self):
        if not self.items:
            raise ValueError("empty choice")


@dataclass(frozen=True)
class Repeat:
    expr: "ContentModel"
    kind: str  # one of "*", "?", "+"

    def __post_init__(self):
        if self.kind not in ("*", "?", "+"):
            raise ValueError(f"bad repeat kind {self.kind!r}")


@dataclass(frozen=True)
class PCData:
    pass


@dataclass(frozen=True)
class Empty:
    pass


ContentModel = Union[Name, Seq, Choice, Repeat, PCData, Empty]


def describe(model: ContentModel) -> str:
    """Render a content model back in DTD syntax."""
    if isinstance(model, Empty):
        return "EMPTY"
    if isinstance(model, PCData):
        return "(#PCDATA)"
    return _describe(model, top=True)


def _describe(m, top=False) -> str:
    if isinstance(m, Name):
        return f"({m.name})" if top else m.name
    if isinstance(m, PCData):
        return "#PCDATA"
    if isinstance(m, Seq):
        return "(" + ", ".join(_describe(i) for i in m.items) + ")"
    if isinstance(m, Choice):
        return "(" + " | ".join(_describe(i) for i in m.items) + ")"
    if isinstance(m, Repeat):
        inner = _describe(m.expr)
        if isinstance(m.expr, Repeat) or (isinstance(m.expr, Name) and top):
            inner = f"({inner})"
        return inner + m.kind
    raise TypeError(m)


def model_names(model: ContentModel) -> list[str]:
    """Element names mentioned in *model*, first-occurrence order."""
    out: list[str] = []

    def walk(m):
        if isinstance(m, Name):
            if m.name not in out:
                out.append(m.name)
        elif isinstance(m, (Seq, Choice)):
            for i in m.items:
                walk(i)
        elif isinstance(m, Repeat):
            walk(m.expr)

    walk(model)
    return out


def is_mixed(model: ContentModel) -> bool:
    """``(#PCDATA)`` or ``(#PCDATA | a | b)*``."""
    if isinstance(model, PCData):
        return True
    return (
        isinstance(model, Repeat)
        and isinstance(model.expr, Choice)
        and isinstance(model.expr.items[0], PCData)
    )


# -- DTD text parsing ------------------------------------------------------


_TOKEN_RE = re.compile(r"\s*(#PCDATA|[A-Za-z_][A-Za-z0-9._-]*|[()|,*?+]|\S)")


class _ModelParser:
    def __init__(self, text: str, line: int):
        self.tokens = []
        pos = 0
        while True:
            m = _TOKEN_RE.match(text, pos)
            if not m:
                break
            self.tokens.append(m.group(1))
            pos = m.end()
        self.i = 0
        self.line = line
        self.src = text.strip()

    def peek(self) -> Optional[str]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> Optional[str]:
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, why: str):
        raise DtdSyntaxError(f"{why} in content model {self.src!r}", self.line)

    def parse(self) -> ContentModel:
        if self.peek() == "EMPTY" and len(self.tokens) == 1:
            return Empty()
        if self.peek() == "ANY":
            self.fail("ANY content is not supported")
        if self.peek() != "(":
            self.fail("expected '('")
        if self.tokens[1:2] == ["#PCDATA"]:
            model = self.parse_mixed()
        else:
            model = self.parse_particle()
        if self.peek() is not None:
            self.fail(f"unexpected {self.peek()!r}")
        return model

    def parse_mixed(self) -> ContentModel:
        self.take()  # (
        self.take()  # #PCDATA
        names = []
        while self.peek() == "|":
            self.take()
            tok = self.take()
            if tok is None or not NAME_RE.fullmatch(tok):
                self.fail("expected an element name after '|'")
            if tok in names:
                self.fail(f"duplicate name {tok!r} in mixed content")
            names.append(tok)
        if self.take() != ")":
            self.fail("unbalanced parentheses")
        if names:
            if self.take() != "*":
                self.fail("mixed content with element names must end in ')*'")
            return Repeat(Choice((PCData(),) + tuple(Name(n) for n in names)), "*")
        if self.peek() == "*":
            self.take()
        return PCData()

    def parse_particle(self) -> ContentModel:
        tok = self.take()
        if tok == "(":
            items = [self.parse_particle()]
            sep = None
            while True:
                tok = self.take()
                if tok == ")":
                    break
                if tok not in ("|", ","):
                    if tok is None:
                        self.fail("unbalanced parentheses")
                    self.fail(f"unexpected {tok!r}")
                if sep is None:
                    sep = tok
                elif sep != tok:
                    self.fail("cannot mix ',' and '|' in one group")
                if self.peek() in (")", "|", ",", None):
                    self.fail(f"empty term after {tok!r}")
                items.append(self.parse_particle())
            if len(items) == 1:
                node: ContentModel = items[0]  # (x) is just x
            else:
                node = Choice(tuple(items)) if sep == "|" else Seq(tuple(items))
        elif tok == "#PCDATA":
            self.fail("#PCDATA only allowed as the first item of mixed content")
        elif tok is not None and NAME_RE.fullmatch(tok):
            node = Name(tok)
        else:
            self.fail(f"expected an element name or '(' but got {tok!r}")
        if self.peek() in ("*", "?", "+"):
            node = Repeat(node, self.take())
        return node


@dataclass(frozen=True)
class DtdGrammar:
    declarations: dict  # element name -> ContentModel
    declaration_order: tuple[str, ...]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __contains__(self, name: str) -> bool:
        return name in self.declarations

    def model(self, name: str) -> ContentModel:
        return self.declarations[name]

    @cached_property
    def _matchers(self) -> dict:
        return {}

    def matcher(self, name: str) -> "Matcher":
        cache = self._matchers
        if name not in cache:
            cache[name] = compile_content_model(self.declarations[name])
        return cache[name]


_DECL_RE = re.compile(r"<!(ELEMENT|ATTLIST|ENTITY|NOTATION|DOCTYPE)\b")


def parse_dtd(text: str) -> DtdGrammar:
    """Parse a file of ``<!ELEMENT>`` declarations.

    Identical redeclarations are dropped with a warning; a redeclaration
    with a different content model is an error.
    """
    if text.startswith("\ufeff"):
        text = text[1:]
    decls: dict[str, ContentModel] = {}
    order: list[str] = []
    warns: list[str] = []
    pos = 0
    n = len(text)

    def line_at(p: int) -> int:
        return text.count("\n", 0, p) + 1

    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        if text.startswith("<!--", pos):
            end = text.find("-->", pos + 4)
            if end < 0:
                raise DtdSyntaxError("unterminated comment", line_at(pos))
            pos = end + 3
            continue
        m = _DECL_RE.match(text, pos)
        if not m:
            if text.startswith("<?", pos):
                raise DtdSyntaxError("processing instructions are not supported", line_at(pos))
            raise DtdSyntaxError("expected a markup declaration", line_at(pos))
        kind = m.group(1)
        line = line_at(pos)
        if kind != "ELEMENT":
            raise DtdSyntaxError(f"<!{kind}> declarations are not supported", line)
        end = text.find(">", m.end())
        if end < 0:
            raise DtdSyntaxError("unterminated <!ELEMENT> declaration", line)
        body = text[m.end():end]
        nm = re.match(r"\s+([A-Za-z_][A-Za-z0-9._-]*)\s+", body)
        if not nm:
            raise DtdSyntaxError("malformed <!ELEMENT> declaration: expected name and content model", line)
        name = nm.group(1)
        model = _ModelParser(body[nm.end():], line).parse()
        if name in decls:
            if decls[name] != model:
                raise DtdSyntaxError(
                    f"conflicting redeclaration of element {name!r}: "
                    f"{describe(decls[name])} vs {describe(model)}",
                    line,
                )
            msg = f"line {line}: duplicate declaration of element {name!r} ignored"
            log.info(msg)
            warns.append(msg)
        else:
            decls[name] = model
            order.append(name)
        pos = end + 1
    return DtdGrammar(decls, tuple(order), tuple(warns))


# -- automaton -------------------------------------------------------------


@dataclass(frozen=True)
class MatchResult:
    ok: bool
    index: int = -1  # position of the first offending child, len(seq) if input ended early
    expected: tuple[str, ...] = ()  # names acceptable at that point ("" means end-of-content)


class Matcher:
    """DFA over child element names built from a content model."""

    def __init__(self, model: ContentModel):
        self.model = model
        self.allows_text = is_mixed(model)
        self.alphabet = tuple(model_names(model))
        self._build()

    def _build(self):
        model = self.model
        if isinstance(model, (Empty, PCData)):
            self.transitions = [{}]
            self.accepting = [True]
            return
        if is_mixed(model):
            model = Repeat(Choice(tuple(i for i in model.expr.items if isinstance(i, Name))), "*")

        # Glushkov construction: number each Name occurrence as a position.
        symbols: list[str] = []
        follow: list[set[int]] = []

        def walk(m) -> tuple[bool, set[int], set[int]]:
            """Return (nullable, first, last) and fill in follow sets."""
            if isinstance(m, Name):
                p = len(symbols)
                symbols.append(m.name)
                follow.append(set())
                return False, {p}, {p}
            if isinstance(m, Seq):
                nullable, first, last = True, set(), set()
                for item in m.items:
                    n2, f2, l2 = walk(item)
                    for p in last:
                        follow[p] |= f2
                    if nullable:
                        first |= f2
                    last = (last | l2) if n2 else l2
                    nullable = nullable and n2
                return nullable, first, last
            if isinstance(m, Choice):
                nullable, first, last = False, set(), set()
                for item in m.items:
                    n2, f2, l2 = walk(item)
                    nullable |= n2
                    first |= f2
                    last |= l2
                return nullable, first, last
            if isinstance(m, Repeat):
                n2, f2, l2 = walk(m.expr)
                if m.kind in ("*", "+"):
                    for p in l2:
                        follow[p] |= f2
                return n2 or m.kind in ("*", "?"), f2, l2
            raise TypeError(f"unexpected node in element content: {m!r}")

        nullable, first, last = walk(model)

        # Subset construction.  A DFA state is a frozenset of positions; the
        # start state is the pseudo-position -1.
        START = frozenset([-1])
        index = {START: 0}
        states = [START]
        transitions: list[dict[str, int]] = []
        accepting: list[bool] = []
        i = 0
        while i < len(states):
            st = states[i]
            nxt_positions = set()
            for p in st:
                nxt_positions |= first if p == -1 else follow[p]
            by_symbol: dict[str, set[int]] = {}
            for q in sorted(nxt_positions):
                by_symbol.setdefault(symbols[q], set()).add(q)
            row = {}
            for sym in sorted(by_symbol):
                target = frozenset(by_symbol[sym])
                if target not in index:
                    index[target] = len(states)
                    states.append(target)
                row[sym] = index[target]
            transitions.append(row)
            accepting.append(any((p == -1 and nullable) or (p >= 0 and p in last) for p in st))
            i += 1
        self.transitions = transitions
        self.accepting = accepting

    def match(self, children: Sequence[str]) -> MatchResult:
        state = 0
        for i, name in enumerate(children):
            nxt = self.transitions[state].get(name)
            if nxt is None:
                return MatchResult(False, i, self._expected(state))
            state = nxt
        if self.accepting[state]:
            return MatchResult(True)
        return MatchResult(False, len(children), self._expected(state))

    def accepts(self, children: Sequence[str]) -> bool:
        return self.match(children).ok

    def _expected(self, state: int) -> tuple[str, ...]:
        exp = tuple(sorted(self.transitions[state]))
        if self.accepting[state]:
            exp += ("",)
        return exp

    @property
    def state_count(self) -> int:
        return len(self.transitions)


def compile_content_model(model: ContentModel) -> Matcher:
    return Matcher(model)


# -- validation ------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    path: str
    expected: str
    found: str

    def __str__(self):
        return f"{self.path}: expected {self.expected}; found {self.found}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        return [str(v) for v in self.violations]


def _found(names: Sequence[str]) -> str:
    return "(" + ", ".join(names) + ")" if names else "no child elements"


def _expected_text(exp: tuple[str, ...]) -> str:
    words = [f"<{e}>" if e else "end of content" for e in exp]
    if not words:
        return "nothing"
    return " or ".join(words)


def validate_document(doc: XmlDocument, grammar: DtdGrammar, root_name: str) -> ValidationReport:
    """Check every element's children against its declared content model.

    Attributes are not validated.  Whitespace-only text is ignored in
    element content.
    """
    root = doc.root
    if root.name != root_name:
        return ValidationReport((Violation("/" + root.name, f"root element <{root_name}>", f"<{root.name}>"),))

    out: list[Violation] = []
    stack: list[tuple[XmlElement, str]] = [(root, "/" + root.name)]
    while stack:
        elem, path = stack.pop()
        if elem.name not in grammar:
            out.append(Violation(path, "a declared element", f"undeclared element <{elem.name}>"))
            continue
        model = grammar.model(elem.name)
        matcher = grammar.matcher(elem.name)
        child_names = [c.name for c in elem.element_children]
        text = "".join(c.value for c in elem.children if isinstance(c, Text))
        desc = describe(model)

        if isinstance(model, Empty):
            if elem.children:
                out.append(Violation(path, "EMPTY", _summary(child_names, text)))
        elif isinstance(model, PCData):
            if child_names:
                out.append(Violation(path, desc, _found(child_names)))
        else:
            if not matcher.allows_text and text.strip():
                out.append(Violation(path, f"{desc} (element content)", f"text {_clip(text.strip())!r}"))
            res = matcher.match(child_names)
            if not res.ok:
                if res.index < len(child_names):
                    where = f"<{child_names[res.index]}> at child {res.index + 1}"
                else:
                    where = "end of content"
                out.append(
                    Violation(
                        path,
                        f"{desc}; at child {res.index + 1} expected {_expected_text(res.expected)}",
                        f"{_found(child_names)}, stopped at {where}",
                    )
                )
        # children in document order -> push reversed
        kids = elem.element_children
        for c in reversed(kids):
            stack.append((c, f"{path}/{c.name}"))
    return ValidationReport(tuple(out))


def _clip(s: str, n: int = 40) -> str:
    return s if len(s) <= n else s[: n - 3] + "..."


def _summary(names, text) -> str:
    if names:
        return _found(names)
    return f"text {_clip(text.strip())!r}" if text.strip() else "whitespace"
