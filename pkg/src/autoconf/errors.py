"""Exception hierarchy for semantic and model-level failures."""

from __future__ import annotations

from typing import Optional


class SemanticError(ValueError):
    """A well-formed, DTD-valid document that still makes no sense."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        where = ""
        if path:
            where = path + (f" (line {line})" if line else "") + ": "
        super().__init__(where + message)
        self.message = message
        self.path = path
        self.line = line

    @property
    def kind(self) -> str:
        return type(self).__name__


class InvalidDocument(SemanticError):
    """The document failed DTD validation; ``report`` holds the details."""

    def __init__(self, report, what: str = "document"):
        lines = report.lines()
        super().__init__(f"{what} is not valid against its grammar: " + "; ".join(lines))
        self.report = report


class UnknownControlType(SemanticError):
    pass


class PropertyNotApplicable(SemanticError):
    pass


class BadValue(SemanticError):
    pass


class BadActionToken(SemanticError):
    pass


class DuplicateTarget(SemanticError):
    pass


class UnknownPermissionName(SemanticError):
    pass


class DialectError(SemanticError):
    """An alias spelling was used while strict dialect checking is on."""


class DuplicateName(SemanticError):
    pass


class DanglingEventControl(SemanticError):
    pass


class MissingForm(SemanticError):
    pass


class MultipleForms(SemanticError):
    pass


class ModelError(ValueError):
    """A customization does not fit the application it is applied to."""


class SubsetViolation(ModelError):
    def __init__(self, partition: str, name: str, detail: str = ""):
        msg = f"{partition} element {name!r} is not declared in the application"
        super().__init__(msg + (f" ({detail})" if detail else ""))
        self.partition = partition
        self.name = name


class BindingMismatch(ModelError):
    """The customization's view of an element disagrees with the manifest
    (event bound to another control, or a control of another type)."""

    def __init__(self, partition: str, name: str, detail: str):
        super().__init__(f"{partition} element {name!r}: {detail}")
        self.partition = partition
        self.name = name
