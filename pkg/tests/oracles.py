"""Reference implementations the tests check the package against.

None of these share code paths with what they check: content models are
matched with Python's ``re`` engine over a token encoding, and the set
model is recomputed element by element.
"""

import itertools
import re

from autoconf.dtd import Choice, Empty, Name, PCData, Repeat, Seq, is_mixed, model_names
from autoconf.xml_core import XmlDocument, XmlElement


# -- content-model membership ------------------------------------------------


def model_regex(model) -> str:
    if isinstance(model, Name):
        return re.escape(f"<{model.name}>")
    if isinstance(model, Seq):
        return "".join(f"(?:{model_regex(i)})" for i in model.items)
    if isinstance(model, Choice):
        return "(?:" + "|".join(model_regex(i) for i in model.items if not isinstance(i, PCData)) + ")"
    if isinstance(model, Repeat):
        return f"(?:{model_regex(model.expr)}){model.kind}"
    if isinstance(model, (PCData, Empty)):
        return ""
    raise TypeError(model)


def oracle_accepts(model, children) -> bool:
    """Child-element sequence membership by regular-expression matching."""
    if isinstance(model, (PCData, Empty)):
        return not children
    if is_mixed(model):
        allowed = set(model_names(model))
        return all(c in allowed for c in children)
    return re.fullmatch(model_regex(model), "".join(f"<{c}>" for c in children)) is not None


def all_sequences(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


def probe_alphabet(model, outsider="zz"):
    """The model's own names plus one name it never mentions."""
    return list(model_names(model)) + [outsider]


# -- fixture mutations ---------------------------------------------------------


def required_names(model):
    """Names filling a mandatory slot of a top-level sequence: a bare name,
    or one alternative of an unrepeated choice of names.  Deleting one of
    these always breaks the model."""
    if isinstance(model, Name):
        return {model.name}
    out = set()
    if isinstance(model, Seq):
        for item in model.items:
            if isinstance(item, Name):
                out.add(item.name)
            elif isinstance(item, Choice) and all(isinstance(i, Name) for i in item.items):
                out.update(i.name for i in item.items)
    return out


def _replace_at(root: XmlElement, path: tuple, new):
    """Rebuild *root* with the element at child-index *path* replaced by
    *new* (a sequence of nodes, possibly empty)."""
    if not path:
        raise ValueError
    i, rest = path[0], path[1:]
    kids = list(root.children)
    if not rest:
        kids[i:i + 1] = list(new)
    else:
        kids[i] = _replace_at(kids[i], rest, new)
    return XmlElement(root.name, root.attributes, tuple(kids), root.source_location)


def _walk(elem, path=()):
    yield path, elem
    for i, c in enumerate(elem.children):
        if isinstance(c, XmlElement):
            yield from _walk(c, path + (i,))


def deletion_mutants(doc: XmlDocument, grammar):
    """Delete each required child once."""
    for path, elem in _walk(doc.root):
        if elem.name not in grammar:
            continue
        req = required_names(grammar.model(elem.name))
        for i, c in enumerate(elem.children):
            if isinstance(c, XmlElement) and c.name in req:
                yield f"delete {c.name} under {elem.name}", XmlDocument(_replace_at(doc.root, path + (i,), []), doc.had_prolog)


def reorder_mutants(doc: XmlDocument, grammar):
    """Swap the first two distinct children of each element whose model is
    a sequence."""
    for path, elem in _walk(doc.root):
        if elem.name not in grammar or not isinstance(grammar.model(elem.name), Seq):
            continue
        idx = [i for i, c in enumerate(elem.children) if isinstance(c, XmlElement)]
        if len(idx) < 2:
            continue
        a, b = idx[0], idx[1]
        if elem.children[a].name == elem.children[b].name:
            continue
        kids = list(elem.children)
        kids[a], kids[b] = kids[b], kids[a]
        swapped = XmlElement(elem.name, elem.attributes, tuple(kids), elem.source_location)
        root = swapped if not path else _replace_at(doc.root, path, [swapped])
        yield f"reorder {elem.children[a].name}/{elem.children[b].name} under {elem.name}", XmlDocument(root, doc.had_prolog)


def action_mutants(doc: XmlDocument):
    """Replace each <action> text with 'x'."""
    from autoconf.xml_core import Text

    for path, elem in _walk(doc.root):
        if elem.name == "action":
            yield f"action x at {path}", XmlDocument(
                _replace_at(doc.root, path, [XmlElement("action", (), (Text("x"),))]), doc.had_prolog
            )


# -- set model -----------------------------------------------------------------


def brute_force_customized(a, x):
    """Element-by-element: returns (active(A), keep(A, X), active(apply(A, X)))
    as dicts partition -> set, without using the engine."""
    state = {
        "gui": {c.name: c.properties[_vis()] for c in a.controls},
        "events": {e.name: e.enabled for e in a.events},
        "permissions": {p.name.value: p.granted for p in a.permissions},
    }
    final = {k: dict(v) for k, v in state.items()}
    for g in x.gui:
        if g.property.value == "Visible":
            final["gui"][g.control_name] = g.value
    for e in x.events:
        final["events"][e.event_name] = e.action.value == "+"
    for p in x.permissions:
        final["permissions"][p.permission.value] = p.action.value == "+"
    active = {k: {n for n, on in v.items() if on} for k, v in state.items()}
    after = {k: {n for n, on in v.items() if on} for k, v in final.items()}
    # keep: what stays on when only the customization's instructions decide
    keep = {}
    for part in state:
        targeted = _targets(x, part)
        keep[part] = {n for n in state[part] if (final[part][n] if n in targeted else state[part][n])}
    return active, keep, after


def _targets(x, part):
    if part == "gui":
        return {g.control_name for g in x.gui if g.property.value == "Visible"}
    if part == "events":
        return {e.event_name for e in x.events}
    return {p.permission.value for p in x.permissions}


def _vis():
    from autoconf.custlang import PropertyName

    return PropertyName.VISIBLE


def brute_intersection(a: dict, b: dict) -> dict:
    out = {}
    for part in a:
        out[part] = set()
        for n in a[part]:
            for m in b[part]:
                if n == m:
                    out[part].add(n)
    return out
