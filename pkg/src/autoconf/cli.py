"""Command-line front end.

Exit status: 0 on success, 1 when an input is malformed, invalid, or does
not fit the application, 2 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional

from . import __version__
from .custlang import CustomizationSpec, format_property_value, lower_to_spec
from .dtd import DtdGrammar, DtdSyntaxError, parse_dtd
from .engine import CustomizedManifest, apply, diff, keep_set, verify_model
from .errors import InvalidDocument, ModelError, SemanticError, SubsetViolation
from .manifest import ApplicationManifest, active_set, parse_manifest, serialize_manifest
from .resources import customization_grammar, manifest_grammar
from .sets import ElementSet
from .xml_core import WellFormednessError, parse_document

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad arguments or unreadable files (exit 2)."""


class Failure(Exception):
    """Input rejected (exit 1).  ``lines`` go to stdout."""

    def __init__(self, lines: list[str]):
        super().__init__("\n".join(lines))
        self.lines = lines


class _Out:
    def __init__(self, stream):
        self.stream = stream
        self.color = not os.environ.get("AUTOCONF_NO_COLOR") and hasattr(stream, "isatty") and stream.isatty()

    def line(self, text: str = ""):
        self.stream.write(text + "\n")

    def verdict(self, ok: bool) -> str:
        word = "PASS" if ok else "FAIL"
        if self.color:
            return f"\033[{'32' if ok else '31'}m{word}\033[0m"
        return word


def _read(path: str) -> str:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise Failure([f"{path}: not UTF-8 text (byte offset {exc.start})"]) from None


def _grammar(path: Optional[str], default) -> DtdGrammar:
    if path is None:
        return default()
    try:
        return parse_dtd(_read(path))
    except DtdSyntaxError as exc:
        raise UsageError(f"{path}: bad grammar: {exc}") from None


def _parse_xml(path: str):
    text = _read(path)
    try:
        return parse_document(text)
    except WellFormednessError as exc:
        raise Failure([f"{path}:{exc.line}:{exc.column}: not well-formed: {exc.message}"]) from None


def _semantic_failure(path: str, exc: SemanticError) -> Failure:
    if isinstance(exc, InvalidDocument):
        return Failure([f"{path}: {v}" for v in exc.report.violations])
    return Failure([f"{path}: {exc.kind}: {exc}"])


def load_custom(path: str, args, err) -> CustomizationSpec:
    doc = _parse_xml(path)
    grammar = _grammar(args.custom_grammar, customization_grammar)
    try:
        spec = lower_to_spec(doc, grammar, strict_dialect=args.strict_dialect)
    except SemanticError as exc:
        raise _semantic_failure(path, exc) from None
    for w in spec.warnings:
        err.write(f"warning: {path}: {w}\n")
    return spec


def load_manifest(path: str, args, err) -> ApplicationManifest:
    doc = _parse_xml(path)
    grammar = _grammar(args.manifest_grammar, manifest_grammar)
    try:
        return parse_manifest(doc, grammar, strict_dialect=args.strict_dialect)
    except SemanticError as exc:
        raise _semantic_failure(path, exc) from None


def _write_atomic(path: str, data: str):
    target = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=target.parent if str(target.parent) else ".", prefix=f".{target.name}.", suffix=".tmp")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None


def _model_failure(exc: ModelError) -> Failure:
    return Failure([f"{type(exc).__name__}: {exc}", f"witness: {exc.partition} {exc.name}"])


# -- renderers -------------------------------------------------------------


def render_json(c: CustomizedManifest) -> str:
    m = c.manifest

    def enc(v):
        return list(v) if isinstance(v, tuple) else v

    doc = {
        "application": m.app_name,
        "controls": [
            {
                "name": ctl.name,
                "control_type": ctl.control_type.value,
                "properties": {p.value: enc(v) for p, v in ctl.properties.items()},
            }
            for ctl in m.controls
        ],
        "events": [{"name": e.name, "control_name": e.control_name, "enabled": e.enabled} for e in m.events],
        "permissions": [{"name": p.name.value, "granted": p.granted} for p in m.permissions],
        "provenance": [r.to_json() for r in c.provenance],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def render_text(c: CustomizedManifest) -> str:
    m = c.manifest
    out = [f"application {json.dumps(m.app_name, ensure_ascii=False)}"]
    for ctl in m.controls:
        props = " ".join(
            f"{p.value}={json.dumps(format_property_value(p, v), ensure_ascii=False) if not isinstance(v, bool) else format_property_value(p, v)}"
            for p, v in ctl.properties.items()
        )
        out.append(f"control {ctl.name} {ctl.control_type.value} {props}")
    for e in m.events:
        out.append(f"event {e.name} control={e.control_name} enabled={e.enabled}")
    for p in m.permissions:
        out.append(f"permission {p.name.value} granted={p.granted}")
    for r in c.provenance:
        out.append(f"change {r}")
    return "\n".join(out) + "\n"


def _format_set(label: str, s: ElementSet) -> list[str]:
    lines = [label]
    for part, names in s.sorted().items():
        lines.append(f"  {part} ({len(names)}): {', '.join(names)}".rstrip())
    return lines


# -- commands --------------------------------------------------------------


def cmd_validate(args, out: _Out, err) -> int:
    if args.custom:
        path, kind = args.custom, "customization file"
        spec = load_custom(path, args, err)
        detail = f"{len(spec.gui)} controls, {len(spec.events)} events, {len(spec.permissions)} permissions"
    else:
        path, kind = args.manifest, "manifest"
        m = load_manifest(path, args, err)
        detail = f"{len(m.controls)} controls, {len(m.events)} events, {len(m.permissions)} permissions"
    out.line(f"{path}: valid {kind} ({detail})")
    return EXIT_OK


def cmd_apply(args, out: _Out, err) -> int:
    m = load_manifest(args.manifest, args, err)
    spec = load_custom(args.custom, args, err)
    try:
        result = apply(m, spec)
    except ModelError as exc:
        raise _model_failure(exc) from None
    if args.format == "xml":
        data = serialize_manifest(result.manifest)
    elif args.format == "json":
        data = render_json(result)
    else:
        data = render_text(result)
    if args.output:
        _write_atomic(args.output, data)
    else:
        out.stream.write(data)
    return EXIT_OK


def cmd_diff(args, out: _Out, err) -> int:
    m = load_manifest(args.manifest, args, err)
    spec = load_custom(args.custom, args, err)
    try:
        result = apply(m, spec)
    except ModelError as exc:
        raise _model_failure(exc) from None
    for record in diff(m, result):
        out.line(str(record))
    return EXIT_OK


def cmd_sets(args, out: _Out, err) -> int:
    m = load_manifest(args.manifest, args, err)
    spec = load_custom(args.custom, args, err)
    a = active_set(m)
    try:
        kept = keep_set(m, spec)
    except ModelError as exc:
        for line in _format_set("A (active set)", a):
            out.line(line)
        if args.check:
            out.line(f"subset property: {out.verdict(not isinstance(exc, SubsetViolation))}")
        out.line(f"{type(exc).__name__}: {exc}")
        out.line(f"witness: {exc.partition} {exc.name}")
        return EXIT_INVALID

    customized = active_set(apply(m, spec).manifest)
    for label, s in (("A (active set)", a), ("X (keep set)", kept), ("C (customized)", customized)):
        for line in _format_set(label, s):
            out.line(line)
    if not args.check:
        return EXIT_OK
    report = verify_model(m, spec)
    out.line(f"subset property: {out.verdict(report.subset_holds)}")
    out.line(f"intersection property: {out.verdict(report.intersection_holds)}")
    if not report.intersection_holds:
        out.line(f"witness: {report.witness[0]} {report.witness[1]} ({report.detail})")
        return EXIT_INVALID
    return EXIT_OK


# -- entry point -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--custom-grammar", metavar="DTD", help="use this DTD instead of the bundled customization grammar")
    common.add_argument("--manifest-grammar", metavar="DTD", help="use this DTD instead of the bundled manifest grammar")
    common.add_argument(
        "--strict-dialect",
        action="store_true",
        help="reject the alternative spellings eventName, POLICIES/policy and control-type aliases",
    )

    parser = argparse.ArgumentParser(prog="autoconf", description="Validate and apply application customization files.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a customization file or manifest")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--custom", "-c", metavar="FILE", help="customization file to check")
    which.add_argument("--manifest", "-m", metavar="FILE", help="application manifest to check")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("apply", parents=[common], help="write the customized manifest")
    p.add_argument("-m", "--manifest", required=True, metavar="FILE")
    p.add_argument("-c", "--custom", required=True, metavar="FILE")
    p.add_argument("-o", "--output", metavar="FILE", help="output file (default: standard output)")
    p.add_argument("--format", choices=("xml", "json", "text"), default="xml")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("diff", parents=[common], help="list the changes a customization makes")
    p.add_argument("-m", "--manifest", required=True, metavar="FILE")
    p.add_argument("-c", "--custom", required=True, metavar="FILE")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("sets", parents=[common], help="print the active, keep and customized sets")
    p.add_argument("-m", "--manifest", required=True, metavar="FILE")
    p.add_argument("-c", "--custom", required=True, metavar="FILE")
    p.add_argument("--check", action="store_true", help="check the subset and intersection properties")
    p.set_defaults(func=cmd_sets)
    return parser


def main(argv: Optional[list[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = _Out(stdout)
    try:
        return args.func(args, out, stderr)
    except UsageError as exc:
        stderr.write(f"autoconf: error: {exc}\n")
        return EXIT_USAGE
    except Failure as exc:
        for line in exc.lines:
            out.line(line)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
