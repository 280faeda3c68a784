"""Bundled grammars and example files."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path

from .dtd import DtdGrammar, parse_dtd

FIXTURES = (
    "stock_manifest.xml",
    "user.xml",
    "admin.xml",
    "user_raw.xml",
    "empty.xml",
    "customization.dtd",
    "manifest.dtd",
)


def data_path(name: str) -> Path:
    """Filesystem path of a bundled file (the package is never zipped)."""
    return Path(str(resources.files(__package__).joinpath("data", name)))


def read_text(name: str) -> str:
    return data_path(name).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def customization_grammar() -> DtdGrammar:
    return parse_dtd(read_text("customization.dtd"))


@lru_cache(maxsize=None)
def manifest_grammar() -> DtdGrammar:
    return parse_dtd(read_text("manifest.dtd"))
