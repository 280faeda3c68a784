"""Small XML parser and deterministic serializer.

Handles the subset of XML the customization and manifest formats need:
elements, attributes, character data, comments, an optional XML
declaration and the predefined/numeric character references.  CDATA,
processing instructions, DOCTYPE and namespaced names are rejected.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

__all__ = [
    "Text",
    "XmlElement",
    "XmlDocument",
    "WellFormednessError",
    "parse_document",
    "serialize_document",
    "serialize_element",
    "canonical_text",
]

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9._-]*")
_ATTR_RE = re.compile(r"\s*([A-Za-z_][A-Za-z0-9._-]*)\s*=\s*")
_XML_DECL_RE = re.compile(
    r"<\?xml\s+version\s*=\s*(['\"])1\.[0-9]+\1"
    r"(\s+encoding\s*=\s*(['\"])[A-Za-z][A-Za-z0-9._-]*\3)?"
    r"(\s+standalone\s*=\s*(['\"])(yes|no)\5)?\s*\?>"
)
# XML 1.0 Char production minus the surrogate block.
_ILLEGAL_CHAR_RE = re.compile("[^\t\n\r\x20-\ud7ff\ue000-\ufffd\U00010000-\U0010ffff]")

PREDEFINED = {"lt": "<", "gt": ">", "amp": "&", "quot": '"', "apos": "'"}


class WellFormednessError(ValueError):
    """Input is not a well-formed document in the supported subset."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Text:
    value: str

    @property
    def is_whitespace(self) -> bool:
        return not self.value.strip()


@dataclass(frozen=True, eq=False)
class XmlElement:
    """One element.  Equality is structural and ignores source location and
    whitespace-only text between child elements (indentation)."""

    name: str
    attributes: tuple[tuple[str, str], ...] = ()
    children: tuple[Union["XmlElement", Text], ...] = ()
    source_location: tuple[int, int] = field(default=(0, 0))

    def __post_init__(self):
        if not NAME_RE.fullmatch(self.name):
            raise ValueError(f"illegal element name {self.name!r}")
        seen = set()
        for key, _ in self.attributes:
            if key in seen:
                raise ValueError(f"duplicate attribute {key!r} on <{self.name}>")
            seen.add(key)

    @property
    def element_children(self) -> list["XmlElement"]:
        return [c for c in self.children if isinstance(c, XmlElement)]

    @property
    def is_element_only(self) -> bool:
        """True when there is at least one child element and every text
        child is whitespace."""
        has_elem = False
        for c in self.children:
            if isinstance(c, XmlElement):
                has_elem = True
            elif not c.is_whitespace:
                return False
        return has_elem

    def significant_children(self) -> tuple:
        if self.is_element_only:
            return tuple(c for c in self.children if isinstance(c, XmlElement))
        return self.children

    def get(self, attr: str, default: Optional[str] = None) -> Optional[str]:
        for key, value in self.attributes:
            if key == attr:
                return value
        return default

    def find(self, name: str) -> Optional["XmlElement"]:
        for c in self.children:
            if isinstance(c, XmlElement) and c.name == name:
                return c
        return None

    def iter(self) -> Iterator["XmlElement"]:
        yield self
        for c in self.element_children:
            yield from c.iter()

    def __eq__(self, other):
        if not isinstance(other, XmlElement):
            return NotImplemented
        return (
            self.name == other.name
            and self.attributes == other.attributes
            and self.significant_children() == other.significant_children()
        )

    def __hash__(self):
        return hash((self.name, self.attributes, self.significant_children()))


@dataclass(frozen=True)
class XmlDocument:
    root: XmlElement
    had_prolog: bool = False


def canonical_text(elem: XmlElement) -> str:
    """All descendant text concatenated and stripped."""
    parts: list[str] = []

    def walk(e: XmlElement):
        for c in e.children:
            if isinstance(c, Text):
                parts.append(c.value)
            else:
                walk(c)

    walk(elem)
    return "".join(parts).strip()


# -- parsing ---------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self._line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def location(self, pos: Optional[int] = None) -> tuple[int, int]:
        if pos is None:
            pos = self.pos
        pos = max(0, min(pos, len(self.text)))
        line = bisect.bisect_right(self._line_starts, pos)
        return line, pos - self._line_starts[line - 1] + 1

    def error(self, message: str, pos: Optional[int] = None) -> WellFormednessError:
        if pos is not None and pos >= len(self.text) and self.text:
            # point at the last character rather than one past the end
            pos = len(self.text) - 1
        line, col = self.location(pos)
        return WellFormednessError(message, line, col)

    def startswith(self, s: str) -> bool:
        return self.text.startswith(s, self.pos)

    def parse(self) -> XmlDocument:
        text = self.text
        had_prolog = False
        if self.startswith("<?xml") and (len(text) == 5 or text[5] in " \t\n?"):
            m = _XML_DECL_RE.match(text, self.pos)
            if not m:
                raise self.error("malformed XML declaration")
            self.pos = m.end()
            had_prolog = True

        root: Optional[XmlElement] = None
        while True:
            self.skip_misc(root is not None)
            if self.pos >= len(text):
                break
            if root is not None:
                raise self.error("multiple root elements")
            root = self.parse_element()
        if root is None:
            raise self.error("no root element", len(text))
        return XmlDocument(root, had_prolog)

    def skip_misc(self, after_root: bool):
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch in " \t\n":
                self.pos += 1
            elif self.startswith("<!--"):
                self.parse_comment()
            elif ch == "<":
                if self.startswith("<?"):
                    raise self.error("processing instructions are not supported")
                if self.startswith("<!DOCTYPE"):
                    raise self.error("DOCTYPE declarations are not supported")
                return
            else:
                where = "after the root element" if after_root else "before the root element"
                raise self.error(f"text {where}")

    def parse_comment(self):
        start = self.pos
        end = self.text.find("-->", self.pos + 4)
        if end < 0:
            raise self.error("unterminated comment", start)
        body = self.text[self.pos + 4:end]
        if "--" in body or body.endswith("-"):
            raise self.error("'--' not allowed inside a comment", start)
        self.pos = end + 3

    def parse_name(self) -> str:
        m = NAME_RE.match(self.text, self.pos)
        if not m:
            raise self.error("expected a name")
        self.pos = m.end()
        if self.pos < len(self.text) and self.text[self.pos] == ":":
            raise self.error("namespaced names are not supported")
        return m.group()

    def parse_element(self) -> XmlElement:
        # iterative to avoid recursion limits on deep input
        stack: list[tuple[str, tuple, tuple[int, int], list, int]] = []
        text = self.text
        while True:
            start = self.pos
            loc = self.location()
            self.pos += 1  # '<'
            name = self.parse_name()
            attrs = self.parse_attributes(name)
            if self.startswith("/>"):
                self.pos += 2
                elem = XmlElement(name, attrs, (), loc)
            elif self.startswith(">"):
                self.pos += 1
                stack.append((name, attrs, loc, [], start))
                elem = None
            else:
                raise self.error(f"malformed start tag <{name}>")

            while True:
                if elem is not None:
                    if not stack:
                        return elem
                    stack[-1][3].append(elem)
                    elem = None
                children = stack[-1][3]
                self.parse_content(children)
                if self.pos >= len(text):
                    open_name, _, open_loc, _, _ = stack[-1]
                    raise WellFormednessError(
                        f"unclosed element <{open_name}> (opened at line {open_loc[0]}, "
                        f"column {open_loc[1]})",
                        *self.location(len(text) - 1 if text else 0),
                    )
                if self.startswith("</"):
                    close_pos = self.pos
                    self.pos += 2
                    close = self.parse_name()
                    while self.pos < len(text) and text[self.pos] in " \t\n":
                        self.pos += 1
                    if not self.startswith(">"):
                        raise self.error(f"malformed end tag </{close}>")
                    self.pos += 1
                    open_name, open_attrs, open_loc, kids, _ = stack.pop()
                    if close != open_name:
                        raise self.error(
                            f"mismatched tag: </{close}> closes <{open_name}> "
                            f"opened at line {open_loc[0]}, column {open_loc[1]}",
                            close_pos,
                        )
                    elem = XmlElement(open_name, open_attrs, _merge_text(kids), open_loc)
                    continue
                # a child start tag
                break

    def parse_attributes(self, elem_name: str) -> tuple[tuple[str, str], ...]:
        text = self.text
        attrs: list[tuple[str, str]] = []
        seen: set[str] = set()
        while True:
            ws_start = self.pos
            while self.pos < len(text) and text[self.pos] in " \t\n":
                self.pos += 1
            if self.pos >= len(text) or text[self.pos] in "/>":
                return tuple(attrs)
            if self.pos == ws_start:
                raise self.error("whitespace required before attribute")
            attr_pos = self.pos
            m = _ATTR_RE.match(text, self.pos)
            if not m:
                raise self.error(f"malformed attribute in <{elem_name}>")
            key = m.group(1)
            self.pos = m.end()
            if self.pos < len(text) and text[self.pos] == ":":
                raise self.error("namespaced names are not supported")
            if key in seen:
                raise self.error(f"duplicate attribute {key!r}", attr_pos)
            seen.add(key)
            if self.pos >= len(text) or text[self.pos] not in "\"'":
                raise self.error("attribute value must be quoted")
            quote = text[self.pos]
            end = text.find(quote, self.pos + 1)
            if end < 0:
                raise self.error("unterminated attribute value")
            raw = text[self.pos + 1:end]
            if "<" in raw:
                raise self.error("'<' not allowed in attribute value", self.pos + 1 + raw.index("<"))
            # literal tabs/newlines normalize to spaces; character references do not
            raw = raw.replace("\t", " ").replace("\n", " ")
            attrs.append((key, self.expand_references(raw, self.pos + 1)))
            self.pos = end + 1

    def parse_content(self, out: list):
        text = self.text
        while self.pos < len(text):
            if text[self.pos] == "<":
                if self.startswith("<!--"):
                    self.parse_comment()
                    continue
                if self.startswith("<![CDATA["):
                    raise self.error("CDATA sections are not supported")
                if self.startswith("<?"):
                    raise self.error("processing instructions are not supported")
                if self.startswith("<!"):
                    raise self.error("markup declarations are not allowed in content")
                return
            end = text.find("<", self.pos)
            if end < 0:
                end = len(text)
            raw = text[self.pos:end]
            if "]]>" in raw:
                raise self.error("']]>' not allowed in character data", self.pos + raw.index("]]>"))
            out.append(Text(self.expand_references(raw, self.pos)))
            self.pos = end

    def expand_references(self, raw: str, offset: int) -> str:
        if "&" not in raw:
            return raw
        out = []
        i = 0
        while True:
            j = raw.find("&", i)
            if j < 0:
                out.append(raw[i:])
                return "".join(out)
            out.append(raw[i:j])
            k = raw.find(";", j)
            if k < 0:
                raise self.error("unterminated character reference", offset + j)
            ref = raw[j + 1:k]
            if ref.startswith("#"):
                out.append(self._char_ref(ref, offset + j))
            elif ref in PREDEFINED:
                out.append(PREDEFINED[ref])
            elif NAME_RE.fullmatch(ref):
                raise self.error(f"undefined entity &{ref};", offset + j)
            else:
                raise self.error(f"illegal character reference &{ref};", offset + j)
            i = k + 1

    def _char_ref(self, ref: str, pos: int) -> str:
        try:
            if ref.startswith("#x"):
                if not re.fullmatch(r"[0-9A-Fa-f]+", ref[2:]):
                    raise ValueError
                cp = int(ref[2:], 16)
            else:
                if not re.fullmatch(r"[0-9]+", ref[1:]):
                    raise ValueError
                cp = int(ref[1:])
            ch = chr(cp)
        except (ValueError, OverflowError):
            raise self.error(f"illegal character reference &{ref};", pos) from None
        if _ILLEGAL_CHAR_RE.match(ch):
            raise self.error(f"illegal character reference &{ref};", pos)
        return ch


def _merge_text(kids: list) -> tuple:
    """Join adjacent text nodes (split by comments or references)."""
    merged: list = []
    for k in kids:
        if isinstance(k, Text) and merged and isinstance(merged[-1], Text):
            merged[-1] = Text(merged[-1].value + k.value)
        elif isinstance(k, Text) and not k.value:
            continue
        else:
            merged.append(k)
    return tuple(merged)


def parse_document(text: str) -> XmlDocument:
    """Parse *text* into an :class:`XmlDocument`.

    Raises :class:`WellFormednessError` carrying the line and column of the
    first problem found.
    """
    if text.startswith("\ufeff"):
        text = text[1:]
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    bad = _ILLEGAL_CHAR_RE.search(text)
    if bad:
        p = _Parser(text)
        raise p.error(f"illegal character U+{ord(bad.group()):04X}", bad.start())
    return _Parser(text).parse()


# -- serialization ---------------------------------------------------------


def _escape_text(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _escape_attr(s: str) -> str:
    return (
        _escape_text(s)
        .replace('"', "&quot;")
        .replace("'", "&apos;")
        .replace("\t", "&#9;")
        .replace("\n", "&#10;")
    )


def _write(elem: XmlElement, depth: int, out: list[str], indent: str):
    pad = indent * depth
    attrs = "".join(f' {k}="{_escape_attr(v)}"' for k, v in elem.attributes)
    if not elem.children:
        out.append(f"{pad}<{elem.name}{attrs}/>")
    elif elem.is_element_only:
        out.append(f"{pad}<{elem.name}{attrs}>")
        for c in elem.element_children:
            _write(c, depth + 1, out, indent)
        out.append(f"{pad}</{elem.name}>")
    else:
        out.append(f"{pad}<{elem.name}{attrs}>{_inline(elem.children)}</{elem.name}>")


def _inline(children) -> str:
    parts = []
    for c in children:
        if isinstance(c, Text):
            parts.append(_escape_text(c.value))
        else:
            attrs = "".join(f' {k}="{_escape_attr(v)}"' for k, v in c.attributes)
            if c.children:
                parts.append(f"<{c.name}{attrs}>{_inline(c.children)}</{c.name}>")
            else:
                parts.append(f"<{c.name}{attrs}/>")
    return "".join(parts)


def serialize_element(elem: XmlElement, indent: str = "  ") -> str:
    out: list[str] = []
    _write(elem, 0, out, indent)
    return "\n".join(out) + "\n"


def serialize_document(doc: XmlDocument) -> str:
    """Deterministic text form: two-space indentation for element-only
    content, mixed and text content written inline."""
    head = '<?xml version="1.0" encoding="UTF-8"?>\n' if doc.had_prolog else ""
    return head + serialize_element(doc.root)
