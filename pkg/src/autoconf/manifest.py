"""Application manifest: the declared controls, event-handlers and
permissions of one application, with their default states."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import errors
from .custlang import (
    PROPERTY_DEFAULTS,
    ControlType,
    PermissionName,
    PropertyName,
    PropertyValue,
    allowed_properties,
    check_applicable,
    format_property_value,
    parse_bool,
    parse_control_type,
    parse_permission_name,
    parse_property_name,
    parse_property_value,
)
from .dtd import DtdGrammar, validate_document
from .sets import ElementSet
from .xml_core import Text, XmlDocument, XmlElement, canonical_text, serialize_document


@dataclass(frozen=True)
class ControlDecl:
    name: str
    control_type: ControlType
    properties: dict = field(default_factory=dict)

    def __post_init__(self):
        props = dict(self.properties)
        for prop in props:
            check_applicable(self.control_type, prop, f"control {self.name!r}")
        full = {p: props.get(p, PROPERTY_DEFAULTS[p]) for p in allowed_properties(self.control_type)}
        object.__setattr__(self, "properties", full)

    @property
    def visible(self) -> bool:
        return self.properties[PropertyName.VISIBLE]

    def with_property(self, prop: PropertyName, value: PropertyValue) -> "ControlDecl":
        props = dict(self.properties)
        props[prop] = value
        return ControlDecl(self.name, self.control_type, props)


@dataclass(frozen=True)
class EventDecl:
    name: str
    control_name: str
    enabled: bool = True


@dataclass(frozen=True)
class PermissionDecl:
    name: PermissionName
    granted: bool = True


def _dups(names) -> Optional[str]:
    seen = set()
    for n in names:
        if n in seen:
            return n
        seen.add(n)
    return None


@dataclass(frozen=True)
class ApplicationManifest:
    app_name: str
    controls: tuple[ControlDecl, ...] = ()
    events: tuple[EventDecl, ...] = ()
    permissions: tuple[PermissionDecl, ...] = ()

    def __post_init__(self):
        for attr in ("controls", "events", "permissions"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))
        d = _dups(c.name for c in self.controls)
        if d is not None:
            raise errors.DuplicateName(f"control {d!r} declared twice", "/application/controls")
        d = _dups(e.name for e in self.events)
        if d is not None:
            raise errors.DuplicateName(f"event {d!r} declared twice", "/application/events")
        d = _dups(p.name for p in self.permissions)
        if d is not None:
            raise errors.DuplicateName(f"permission {d.value!r} declared twice", "/application/permissions")
        forms = [c.name for c in self.controls if c.control_type is ControlType.FORM]
        if not forms:
            raise errors.MissingForm("the application declares no Form control", "/application/controls")
        if len(forms) > 1:
            raise errors.MultipleForms(f"more than one Form control: {', '.join(forms)}", "/application/controls")
        names = {c.name for c in self.controls}
        for e in self.events:
            if e.control_name not in names:
                raise errors.DanglingEventControl(
                    f"event {e.name!r} is bound to undeclared control {e.control_name!r}", "/application/events"
                )

    def control(self, name: str) -> Optional[ControlDecl]:
        for c in self.controls:
            if c.name == name:
                return c
        return None

    def event(self, name: str) -> Optional[EventDecl]:
        for e in self.events:
            if e.name == name:
                return e
        return None

    def permission(self, name) -> Optional[PermissionDecl]:
        for p in self.permissions:
            if p.name == name:
                return p
        return None

    @property
    def form(self) -> ControlDecl:
        return next(c for c in self.controls if c.control_type is ControlType.FORM)

    def declared_set(self) -> ElementSet:
        return ElementSet.of(
            (c.name for c in self.controls),
            (e.name for e in self.events),
            (p.name.value for p in self.permissions),
        )


def active_set(m: ApplicationManifest) -> ElementSet:
    """Visible controls, enabled events and granted permissions.

    ``Enabled`` does not affect membership; only ``Visible`` does.
    """
    return ElementSet.of(
        (c.name for c in m.controls if c.visible),
        (e.name for e in m.events if e.enabled),
        (p.name.value for p in m.permissions if p.granted),
    )


def _text(elem: XmlElement, name: str) -> str:
    child = elem.find(name)
    return canonical_text(child) if child is not None else ""


def parse_manifest(doc: XmlDocument, grammar: Optional[DtdGrammar] = None, *, strict_dialect: bool = False) -> ApplicationManifest:
    if grammar is None:
        from .resources import manifest_grammar

        grammar = manifest_grammar()
    report = validate_document(doc, grammar, "application")
    if not report.valid:
        raise errors.InvalidDocument(report, "manifest")

    root = doc.root
    controls = []
    for ctl in root.find("controls").element_children:
        name = _text(ctl, "name")
        where = f"/application/controls/control[{name}]"
        line = ctl.source_location[0]
        ctype, _ = parse_control_type(_text(ctl, "type"), strict_dialect, where)
        props: dict = {}
        for p in ctl.element_children:
            if p.name != "property":
                continue
            prop = parse_property_name(_text(p, "name"), where)
            check_applicable(ctype, prop, where)
            if prop in props:
                raise errors.DuplicateName(f"property {prop.value!r} given twice", where, line)
            props[prop] = parse_property_value(prop, _text(p, "value"), where)
        controls.append(ControlDecl(name, ctype, props))

    events = []
    for ev in root.find("events").element_children:
        name = _text(ev, "name")
        where = f"/application/events/event[{name}]"
        events.append(EventDecl(name, _text(ev, "controlName"), parse_bool(_text(ev, "enabled"), where, "enabled")))

    perms = []
    for p in root.find("permissions").element_children:
        where = "/application/permissions/permission"
        pname = parse_permission_name(_text(p, "name"), where)
        perms.append(PermissionDecl(pname, parse_bool(_text(p, "granted"), f"{where}[{pname.value}]", "granted")))

    return ApplicationManifest(_text(root, "name"), tuple(controls), tuple(events), tuple(perms))


def _leaf(name: str, text: str) -> XmlElement:
    return XmlElement(name, (), (Text(text),) if text else ())


def _bool(v: bool) -> str:
    return "True" if v else "False"


def manifest_to_document(m: ApplicationManifest) -> XmlDocument:
    """Manifest as XML.  Only properties that differ from their default
    are written."""
    controls = []
    for c in m.controls:
        kids = [_leaf("name", c.name), _leaf("type", c.control_type.value)]
        for prop, value in c.properties.items():
            if value != PROPERTY_DEFAULTS[prop]:
                kids.append(
                    XmlElement("property", (), (_leaf("name", prop.value), _leaf("value", format_property_value(prop, value))))
                )
        controls.append(XmlElement("control", (), tuple(kids)))
    events = [
        XmlElement("event", (), (_leaf("name", e.name), _leaf("controlName", e.control_name), _leaf("enabled", _bool(e.enabled))))
        for e in m.events
    ]
    perms = [
        XmlElement("permission", (), (_leaf("name", p.name.value), _leaf("granted", _bool(p.granted))))
        for p in m.permissions
    ]
    root = XmlElement(
        "application",
        (),
        (
            _leaf("name", m.app_name),
            XmlElement("controls", (), tuple(controls)),
            XmlElement("events", (), tuple(events)),
            XmlElement("permissions", (), tuple(perms)),
        ),
    )
    return XmlDocument(root)


def serialize_manifest(m: ApplicationManifest) -> str:
    return serialize_document(manifest_to_document(m))
