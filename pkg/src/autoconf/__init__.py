"""Declarative self-configuration of an application's GUI controls,
event-handlers and permissions from XML customization files."""

__version__ = "0.1.0"

from .custlang import CustomizationSpec, lower_to_spec
from .dtd import DtdGrammar, ValidationReport, parse_dtd, validate_document
from .engine import apply, diff, keep_set, verify_model
from .manifest import ApplicationManifest, active_set, parse_manifest, serialize_manifest
from .sets import ElementSet, intersect, is_subset, union
from .xml_core import XmlDocument, XmlElement, parse_document, serialize_document

__all__ = [
    "ApplicationManifest",
    "CustomizationSpec",
    "DtdGrammar",
    "ElementSet",
    "ValidationReport",
    "XmlDocument",
    "XmlElement",
    "active_set",
    "apply",
    "diff",
    "intersect",
    "is_subset",
    "keep_set",
    "lower_to_spec",
    "parse_document",
    "parse_dtd",
    "parse_manifest",
    "serialize_document",
    "serialize_manifest",
    "union",
    "validate_document",
    "verify_model",
]
