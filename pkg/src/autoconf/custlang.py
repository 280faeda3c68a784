"""The customization language: GUI overrides, event toggles and
permission toggles, lowered from a validated XML document."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from . import errors
from .dtd import DtdGrammar, validate_document
from .xml_core import Text, XmlDocument, XmlElement, canonical_text

log = logging.getLogger(__name__)


class ControlType(str, Enum):
    LABEL = "Label"
    TEXTBOX = "Textbox"
    BUTTON = "Button"
    TOOL_STRIP_MENU_ITEM = "ToolStripMenuItem"
    FORM = "Form"
    CHECKBOX = "Checkbox"
    RADIO_BUTTON = "RadioButton"
    COMBO_BOX = "ComboBox"
    PICTURE_BOX = "PictureBox"


class PropertyName(str, Enum):
    VISIBLE = "Visible"
    ENABLED = "Enabled"
    TEXT = "Text"
    CHECKED = "Checked"
    IMAGE = "Image"
    ITEMS = "Items"


class PermissionName(str, Enum):
    DISK_ACCESS = "DiskAccess"
    NETWORK_ACCESS = "NetworkAccess"
    PROCESS_ACCESS = "ProcessAccess"


class Toggle(Enum):
    ON = "+"
    OFF = "-"

    @property
    def flag(self) -> bool:
        return self is Toggle.ON


PropertyValue = Union[bool, str, tuple]

BOOL_PROPERTIES = frozenset({PropertyName.VISIBLE, PropertyName.ENABLED, PropertyName.CHECKED})
COMMON_PROPERTIES = (PropertyName.VISIBLE, PropertyName.ENABLED, PropertyName.TEXT)
EXTRA_PROPERTIES = {
    ControlType.CHECKBOX: (PropertyName.CHECKED,),
    ControlType.PICTURE_BOX: (PropertyName.IMAGE,),
    ControlType.COMBO_BOX: (PropertyName.ITEMS,),
}
PROPERTY_DEFAULTS: dict[PropertyName, PropertyValue] = {
    PropertyName.VISIBLE: True,
    PropertyName.ENABLED: True,
    PropertyName.TEXT: "",
    PropertyName.CHECKED: False,
    PropertyName.IMAGE: "",
    PropertyName.ITEMS: (),
}

# Spellings seen in real customization files that are not the canonical names.
TYPE_ALIASES = {
    "Image": ControlType.PICTURE_BOX,
    "CheckBox": ControlType.CHECKBOX,
}


def allowed_properties(control_type: ControlType) -> tuple[PropertyName, ...]:
    """Customizable properties of a control type, in a fixed order."""
    return COMMON_PROPERTIES + EXTRA_PROPERTIES.get(control_type, ())


def parse_control_type(text: str, strict: bool = False, path: Optional[str] = None):
    """Return ``(ControlType, warning-or-None)``."""
    try:
        return ControlType(text), None
    except ValueError:
        pass
    if text in TYPE_ALIASES:
        target = TYPE_ALIASES[text]
        if strict:
            raise errors.DialectError(f"control type alias {text!r} (use {target.value!r})", path)
        return target, f"{path}: control type {text!r} read as {target.value!r}"
    raise errors.UnknownControlType(
        f"unknown control type {text!r}; expected one of {', '.join(t.value for t in ControlType)}", path
    )


def parse_property_name(text: str, path: Optional[str] = None) -> PropertyName:
    try:
        return PropertyName(text)
    except ValueError:
        raise errors.PropertyNotApplicable(
            f"unknown property {text!r}; expected one of {', '.join(p.value for p in PropertyName)}", path
        ) from None


def check_applicable(control_type: ControlType, prop: PropertyName, path: Optional[str] = None):
    if prop not in allowed_properties(control_type):
        raise errors.PropertyNotApplicable(
            f"property {prop.value!r} does not apply to a {control_type.value}", path
        )


def parse_bool(text: str, path: Optional[str] = None, what: str = "value") -> bool:
    low = text.strip().lower()
    if low == "true":
        return True
    if low == "false":
        return False
    raise errors.BadValue(f"{what} must be True or False, got {text!r}", path)


def parse_property_value(prop: PropertyName, text: str, path: Optional[str] = None) -> PropertyValue:
    if prop in BOOL_PROPERTIES:
        return parse_bool(text, path, f"{prop.value} value")
    if prop is PropertyName.ITEMS:
        if not text.strip():
            return ()
        items = tuple(part.strip() for part in text.split("|"))
        if any(not item for item in items):
            raise errors.BadValue(f"empty entry in Items list {text!r}", path)
        return items
    return text


def format_property_value(prop: PropertyName, value: PropertyValue) -> str:
    if prop in BOOL_PROPERTIES:
        return "True" if value else "False"
    if prop is PropertyName.ITEMS:
        return "|".join(value)
    return value


def parse_toggle(text: str, path: Optional[str] = None) -> Toggle:
    token = text.strip()
    if token == "+":
        return Toggle.ON
    if token == "-":
        return Toggle.OFF
    raise errors.BadActionToken(f"action must be '+' or '-', got {text!r}", path)


def parse_permission_name(text: str, path: Optional[str] = None) -> PermissionName:
    try:
        return PermissionName(text.strip())
    except ValueError:
        raise errors.UnknownPermissionName(
            f"unknown permission {text!r}; expected one of {', '.join(p.value for p in PermissionName)}",
            path,
        ) from None


@dataclass(frozen=True)
class GuiOverride:
    control_name: str
    control_type: ControlType
    property: PropertyName
    value: PropertyValue

    def __post_init__(self):
        check_applicable(self.control_type, self.property)
        want = bool if self.property in BOOL_PROPERTIES else tuple if self.property is PropertyName.ITEMS else str
        if not isinstance(self.value, want):
            raise errors.BadValue(f"{self.property.value} needs a {want.__name__} value, got {self.value!r}")


@dataclass(frozen=True)
class EventAction:
    event_name: str
    control_name: str
    action: Toggle


@dataclass(frozen=True)
class PermissionAction:
    permission: PermissionName
    action: Toggle


@dataclass(frozen=True)
class Dialect:
    uses_eventName: bool = False
    uses_POLICIES: bool = False


@dataclass(frozen=True)
class CustomizationSpec:
    gui: tuple[GuiOverride, ...] = ()
    events: tuple[EventAction, ...] = ()
    permissions: tuple[PermissionAction, ...] = ()
    source_dialect: Dialect = field(default=Dialect(), compare=False)
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        seen: set = set()
        for g in self.gui:
            key = (g.control_name, g.property)
            if key in seen:
                raise errors.DuplicateTarget(f"control {g.control_name!r} property {g.property.value!r} set twice")
            seen.add(key)
        names = [e.event_name for e in self.events]
        for n in names:
            if names.count(n) > 1:
                raise errors.DuplicateTarget(f"event {n!r} customized twice")
        perms = [p.permission for p in self.permissions]
        for p in perms:
            if perms.count(p) > 1:
                raise errors.DuplicateTarget(f"permission {p.value!r} customized twice")

    def __len__(self):
        return len(self.gui) + len(self.events) + len(self.permissions)


def _field(elem: XmlElement, *names: str) -> str:
    for child in elem.element_children:
        if child.name in names:
            return canonical_text(child)
    raise errors.SemanticError(f"<{elem.name}> has no <{names[0]}>")


def lower_to_spec(doc: XmlDocument, grammar: Optional[DtdGrammar] = None, *, strict_dialect: bool = False) -> CustomizationSpec:
    """Validate *doc* and turn it into a :class:`CustomizationSpec`.

    Both dialects are accepted: ``eventName`` for ``name`` inside
    ``<event>``, and ``POLICIES``/``policy`` for ``PERMISSIONS``/``permission``.
    With ``strict_dialect`` those spellings, and control-type aliases, are
    rejected.
    """
    if grammar is None:
        from .resources import customization_grammar

        grammar = customization_grammar()
    report = validate_document(doc, grammar, "customization")
    if not report.valid:
        raise errors.InvalidDocument(report, "customization file")

    root = doc.root
    gui: list[GuiOverride] = []
    events: list[EventAction] = []
    perms: list[PermissionAction] = []
    warns: list[str] = []
    uses_event_name = uses_policies = False

    def dup(msg, path, line):
        return errors.DuplicateTarget(msg, path, line)

    seen_gui: set = set()
    seen_events: set = set()
    seen_perms: set = set()

    for section in root.element_children:
        if section.name == "GUI":
            for ctl in section.element_children:
                path = "/customization/GUI/control"
                line = ctl.source_location[0]
                name = _field(ctl, "name")
                where = f"{path}[{name}]"
                ctype, warn = parse_control_type(_field(ctl, "type"), strict_dialect, where)
                if warn:
                    warns.append(warn)
                prop = parse_property_name(_field(ctl, "property"), where)
                check_applicable(ctype, prop, where)
                value = parse_property_value(prop, _field(ctl, "value"), where)
                if (name, prop) in seen_gui:
                    raise dup(f"control {name!r} property {prop.value!r} set twice", path, line)
                seen_gui.add((name, prop))
                gui.append(GuiOverride(name, ctype, prop, value))
        elif section.name == "EVENTS":
            for ev in section.element_children:
                path = "/customization/EVENTS/event"
                line = ev.source_location[0]
                if ev.find("eventName") is not None:
                    uses_event_name = True
                    if strict_dialect:
                        raise errors.DialectError("<eventName> is an alias; use <name>", path, line)
                name = _field(ev, "name", "eventName")
                action = parse_toggle(_field(ev, "action"), f"{path}[{name}]")
                if name in seen_events:
                    raise dup(f"event {name!r} customized twice", path, line)
                seen_events.add(name)
                events.append(EventAction(name, _field(ev, "controlName"), action))
        elif section.name in ("PERMISSIONS", "POLICIES"):
            item = "permission" if section.name == "PERMISSIONS" else "policy"
            if section.name == "POLICIES":
                uses_policies = True
                if strict_dialect:
                    raise errors.DialectError(
                        "<POLICIES> is an alias; use <PERMISSIONS>", "/customization/POLICIES", section.source_location[0]
                    )
            for p in section.element_children:
                path = f"/customization/{section.name}/{item}"
                line = p.source_location[0]
                pname = parse_permission_name(_field(p, "name"), path)
                action = parse_toggle(_field(p, "action"), f"{path}[{pname.value}]")
                if pname in seen_perms:
                    raise dup(f"permission {pname.value!r} customized twice", path, line)
                seen_perms.add(pname)
                perms.append(PermissionAction(pname, action))

    for w in warns:
        log.info(w)
    return CustomizationSpec(
        tuple(gui),
        tuple(events),
        tuple(perms),
        Dialect(uses_event_name, uses_policies),
        tuple(warns),
    )


def _leaf(name: str, text: str) -> XmlElement:
    return XmlElement(name, (), (Text(text),) if text else ())


def spec_to_document(spec: CustomizationSpec, dialect: Dialect = Dialect()) -> XmlDocument:
    """Write *spec* back out as a customization document in *dialect*."""
    sections = []
    if spec.gui:
        sections.append(
            XmlElement(
                "GUI",
                (),
                tuple(
                    XmlElement(
                        "control",
                        (),
                        (
                            _leaf("name", g.control_name),
                            _leaf("type", g.control_type.value),
                            _leaf("property", g.property.value),
                            _leaf("value", format_property_value(g.property, g.value)),
                        ),
                    )
                    for g in spec.gui
                ),
            )
        )
    if spec.events:
        tag = "eventName" if dialect.uses_eventName else "name"
        sections.append(
            XmlElement(
                "EVENTS",
                (),
                tuple(
                    XmlElement(
                        "event",
                        (),
                        (_leaf(tag, e.event_name), _leaf("controlName", e.control_name), _leaf("action", e.action.value)),
                    )
                    for e in spec.events
                ),
            )
        )
    if spec.permissions:
        outer, inner = ("POLICIES", "policy") if dialect.uses_POLICIES else ("PERMISSIONS", "permission")
        sections.append(
            XmlElement(
                outer,
                (),
                tuple(
                    XmlElement(inner, (), (_leaf("name", p.permission.value), _leaf("action", p.action.value)))
                    for p in spec.permissions
                ),
            )
        )
    return XmlDocument(XmlElement("customization", (), tuple(sections)))
