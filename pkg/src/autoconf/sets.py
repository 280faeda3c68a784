from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

PARTITIONS = ("gui", "events", "permissions")


@dataclass(frozen=True)
class ElementSet:
    """Names split into three independent partitions."""

    gui: frozenset = frozenset()
    events: frozenset = frozenset()
    permissions: frozenset = frozenset()

    def __post_init__(self):
        for part in PARTITIONS:
            value = getattr(self, part)
            if not isinstance(value, frozenset):
                object.__setattr__(self, part, frozenset(value))

    @classmethod
    def of(cls, gui: Iterable[str] = (), events: Iterable[str] = (), permissions: Iterable[str] = ()) -> "ElementSet":
        return cls(frozenset(gui), frozenset(events), frozenset(permissions))

    def partitions(self) -> Iterator[tuple[str, frozenset]]:
        for part in PARTITIONS:
            yield part, getattr(self, part)

    def is_empty(self) -> bool:
        return not (self.gui or self.events or self.permissions)

    def __len__(self):
        return len(self.gui) + len(self.events) + len(self.permissions)

    def sorted(self) -> dict[str, list[str]]:
        return {part: sorted(names) for part, names in self.partitions()}


def intersect(a: ElementSet, b: ElementSet) -> ElementSet:
    return ElementSet(a.gui & b.gui, a.events & b.events, a.permissions & b.permissions)


def union(a: ElementSet, b: ElementSet) -> ElementSet:
    return ElementSet(a.gui | b.gui, a.events | b.events, a.permissions | b.permissions)


def difference(a: ElementSet, b: ElementSet) -> ElementSet:
    return ElementSet(a.gui - b.gui, a.events - b.events, a.permissions - b.permissions)


def is_subset(x: ElementSet, a: ElementSet) -> bool:
    return x.gui <= a.gui and x.events <= a.events and x.permissions <= a.permissions


def first_outside(x: ElementSet, a: ElementSet) -> Optional[tuple[str, str]]:
    """(partition, name) of the smallest name in *x* missing from *a*."""
    for part, names in x.partitions():
        missing = names - getattr(a, part)
        if missing:
            return part, min(missing)
    return None
