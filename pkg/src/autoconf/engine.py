"""Applying a customization to a manifest, and checking the set model.

The customization file is operational (hide this, disable that); the
keep-set turns it into the set of elements that remain switched on, and
the customized application's active set is compared against
``active_set(A) & keep_set(A, X)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .custlang import CustomizationSpec, PropertyName, PropertyValue, format_property_value
from .errors import BindingMismatch, ModelError, SubsetViolation
from .manifest import ApplicationManifest, EventDecl, PermissionDecl, active_set
from .sets import ElementSet, difference, first_outside, intersect, is_subset, union

__all__ = [
    "ElementSet",
    "ChangeRecord",
    "CustomizedManifest",
    "ModelReport",
    "intersect",
    "union",
    "is_subset",
    "referenced_set",
    "keep_set",
    "apply",
    "verify_model",
    "diff",
]


@dataclass(frozen=True)
class ChangeRecord:
    partition: str  # gui | events | permissions
    target: str
    field: str
    old: PropertyValue
    new: PropertyValue

    def _fmt(self, v) -> str:
        if isinstance(v, bool):
            return "True" if v else "False"
        if isinstance(v, tuple):
            v = format_property_value(PropertyName.ITEMS, v)
        return json.dumps(v)

    def __str__(self):
        return f"{self.partition} {self.target} {self.field} {self._fmt(self.old)} -> {self._fmt(self.new)}"

    def to_json(self) -> dict:
        def enc(v):
            return list(v) if isinstance(v, tuple) else v

        return {
            "partition": self.partition,
            "target": self.target,
            "field": self.field,
            "old": enc(self.old),
            "new": enc(self.new),
        }


@dataclass(frozen=True)
class CustomizedManifest:
    manifest: ApplicationManifest
    provenance: tuple[ChangeRecord, ...]


@dataclass(frozen=True)
class ModelReport:
    subset_holds: bool
    intersection_holds: bool
    witness: Optional[tuple[str, str]] = None  # (partition, name)
    detail: str = ""


def referenced_set(x: CustomizationSpec) -> ElementSet:
    """Every name *x* mentions, by partition.  An event's ``controlName``
    counts as a GUI reference."""
    return ElementSet.of(
        [g.control_name for g in x.gui] + [e.control_name for e in x.events],
        (e.event_name for e in x.events),
        (p.permission.value for p in x.permissions),
    )


def _check_references(a: ApplicationManifest, x: CustomizationSpec) -> None:
    # Walk in document order so the first reported problem is the first in the file.
    for g in x.gui:
        decl = a.control(g.control_name)
        if decl is None:
            raise SubsetViolation("gui", g.control_name)
        if decl.control_type is not g.control_type:
            raise BindingMismatch(
                "gui",
                g.control_name,
                f"customization says {g.control_type.value}, application declares {decl.control_type.value}",
            )
    for e in x.events:
        decl = a.event(e.event_name)
        if decl is None:
            raise SubsetViolation("events", e.event_name)
        if a.control(e.control_name) is None:
            raise SubsetViolation("gui", e.control_name, f"controlName of event {e.event_name!r}")
        if decl.control_name != e.control_name:
            raise BindingMismatch(
                "events",
                e.event_name,
                f"customization binds it to {e.control_name!r}, application to {decl.control_name!r}",
            )
    for p in x.permissions:
        if a.permission(p.permission) is None:
            raise SubsetViolation("permissions", p.permission.value)


def keep_set(a: ApplicationManifest, x: CustomizationSpec) -> ElementSet:
    """Elements of *a* that stay switched on under *x*.

    Raises :class:`SubsetViolation` if *x* names anything *a* does not
    declare.
    """
    _check_references(a, x)
    removed = ElementSet.of(
        (g.control_name for g in x.gui if g.property is PropertyName.VISIBLE and g.value is False),
        (e.event_name for e in x.events if not e.action.flag),
        (p.permission.value for p in x.permissions if not p.action.flag),
    )
    added = ElementSet.of(
        (g.control_name for g in x.gui if g.property is PropertyName.VISIBLE and g.value is True),
        (e.event_name for e in x.events if e.action.flag),
        (p.permission.value for p in x.permissions if p.action.flag),
    )
    return union(difference(active_set(a), removed), added)


def apply(a: ApplicationManifest, x: CustomizationSpec) -> CustomizedManifest:
    """Write every override and toggle of *x* into a copy of *a*.

    Declarations are never removed; only property values and the
    enabled/granted flags change.  Nothing is written unless every
    reference checks out.
    """
    _check_references(a, x)
    records: list[ChangeRecord] = []

    controls = {c.name: c for c in a.controls}
    for g in x.gui:
        current = controls[g.control_name]
        old = current.properties[g.property]
        if old != g.value:
            controls[g.control_name] = current.with_property(g.property, g.value)
            records.append(ChangeRecord("gui", g.control_name, g.property.value, old, g.value))

    events = {e.name: e for e in a.events}
    for ea in x.events:
        current = events[ea.event_name]
        if current.enabled != ea.action.flag:
            events[ea.event_name] = EventDecl(current.name, current.control_name, ea.action.flag)
            records.append(ChangeRecord("events", ea.event_name, "enabled", current.enabled, ea.action.flag))

    perms = {p.name: p for p in a.permissions}
    for pa in x.permissions:
        current = perms[pa.permission]
        if current.granted != pa.action.flag:
            perms[pa.permission] = PermissionDecl(current.name, pa.action.flag)
            records.append(ChangeRecord("permissions", pa.permission.value, "granted", current.granted, pa.action.flag))

    result = ApplicationManifest(
        a.app_name,
        tuple(controls[c.name] for c in a.controls),
        tuple(events[e.name] for e in a.events),
        tuple(perms[p.name] for p in a.permissions),
    )
    return CustomizedManifest(result, tuple(records))


def verify_model(a: ApplicationManifest, x: CustomizationSpec) -> ModelReport:
    """Check the subset and intersection properties for one (A, X) pair."""
    outside = first_outside(referenced_set(x), a.declared_set())
    if outside is not None:
        return ModelReport(False, False, outside, f"{outside[1]!r} is not declared in the application")
    try:
        kept = keep_set(a, x)
        customized = active_set(apply(a, x).manifest)
    except ModelError as exc:
        return ModelReport(True, False, (exc.partition, exc.name), str(exc))
    expected = intersect(active_set(a), kept)
    if customized == expected:
        return ModelReport(True, True)
    for part, names in customized.partitions():
        extra = names ^ getattr(expected, part)
        if extra:
            name = min(extra)
            how = "switched on by the customization but not active" if name in names else "missing"
            return ModelReport(True, False, (part, name), f"{name!r} {how} in the application")
    raise AssertionError("unreachable")


def diff(a: ApplicationManifest, c: CustomizedManifest) -> list[ChangeRecord]:
    """Changes between *a* and the customized manifest, in the order the
    customization listed them.

    Computed by comparing the two manifests; raises ``ValueError`` if that
    does not agree with the recorded provenance (i.e. *c* was not
    produced from *a*).
    """
    found: list[ChangeRecord] = []
    before = {ctl.name: ctl for ctl in a.controls}
    for ctl in c.manifest.controls:
        old = before.get(ctl.name)
        if old is None:
            raise ValueError(f"control {ctl.name!r} not in the original manifest")
        for prop, value in ctl.properties.items():
            if old.properties[prop] != value:
                found.append(ChangeRecord("gui", ctl.name, prop.value, old.properties[prop], value))
    ev_before = {e.name: e for e in a.events}
    for e in c.manifest.events:
        old_e = ev_before.get(e.name)
        if old_e is None:
            raise ValueError(f"event {e.name!r} not in the original manifest")
        if old_e.enabled != e.enabled:
            found.append(ChangeRecord("events", e.name, "enabled", old_e.enabled, e.enabled))
    p_before = {p.name: p for p in a.permissions}
    for p in c.manifest.permissions:
        old_p = p_before.get(p.name)
        if old_p is None:
            raise ValueError(f"permission {p.name.value!r} not in the original manifest")
        if old_p.granted != p.granted:
            found.append(ChangeRecord("permissions", p.name.value, "granted", old_p.granted, p.granted))

    order = {(r.partition, r.target, r.field): i for i, r in enumerate(c.provenance)}
    if set(found) != set(c.provenance) or len(found) != len(c.provenance):
        raise ValueError("customized manifest does not derive from this manifest")
    return sorted(found, key=lambda r: order[(r.partition, r.target, r.field)])
