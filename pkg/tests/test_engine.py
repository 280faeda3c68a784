import copy
import dataclasses
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autoconf import errors
from autoconf.custlang import (
    ControlType,
    CustomizationSpec,
    EventAction,
    GuiOverride,
    PermissionAction,
    PermissionName,
    PropertyName,
    Toggle,
    lower_to_spec,
)
from autoconf.engine import ChangeRecord, apply, diff, keep_set, referenced_set, verify_model
from autoconf.manifest import active_set
from autoconf.sets import ElementSet, first_outside, intersect, is_subset, union

from conftest import (
    ADMIN_EVENTS,
    ADMIN_GUI,
    ADMIN_PERMISSIONS,
    STOCK_EVENTS,
    STOCK_GUI,
    STOCK_PERMISSIONS,
    USER_EVENTS,
    USER_GUI,
    USER_PERMISSIONS,
    load_doc,
)
from generators import random_pairs
from oracles import brute_force_customized, brute_intersection

# -- set algebra -----------------------------------------------------------------

A_ABSTRACT = ElementSet.of({"a", "b", "c"}, {"m", "n", "p"}, {"s", "t", "v"})
X_ABSTRACT = ElementSet.of({"b"}, {"n", "p"}, {"v"})


def test_abstract_intersection():
    assert intersect(A_ABSTRACT, X_ABSTRACT) == ElementSet.of({"b"}, {"n", "p"}, {"v"})


def test_abstract_union_and_subset():
    assert union(A_ABSTRACT, X_ABSTRACT) == A_ABSTRACT
    assert is_subset(X_ABSTRACT, A_ABSTRACT)
    assert not is_subset(A_ABSTRACT, X_ABSTRACT)
    assert first_outside(A_ABSTRACT, X_ABSTRACT) == ("gui", "a")


def test_partitions_do_not_mix():
    # The same name in two partitions is two different elements.
    a = ElementSet.of({"x"}, (), ())
    b = ElementSet.of((), {"x"}, ())
    assert intersect(a, b).is_empty()
    assert len(union(a, b)) == 2


def _naive(a, b, op):
    out = {}
    for part in ("gui", "events", "permissions"):
        xs, ys = sorted(getattr(a, part)), sorted(getattr(b, part))
        if op == "and":
            out[part] = [n for n in xs if n in ys]
        else:
            out[part] = xs + [n for n in ys if n not in xs]
    return ElementSet.of(out["gui"], out["events"], out["permissions"])


def test_random_pairs_against_naive():
    rng = random.Random(5)
    pool = list("abcdefgh")

    def rand_set():
        return ElementSet.of(*(rng.sample(pool, rng.randrange(len(pool) + 1)) for _ in range(3)))

    for _ in range(1000):
        a, b = rand_set(), rand_set()
        assert intersect(a, b) == intersect(b, a) == _naive(a, b, "and")
        assert union(a, b) == union(b, a) == _naive(a, b, "or")


names = st.frozensets(st.sampled_from("abcdef"))
element_sets = st.builds(ElementSet, names, names, names)


@given(element_sets, element_sets, element_sets)
def test_algebra_laws(a, b, c):
    assert intersect(intersect(a, b), c) == intersect(a, intersect(b, c))
    assert union(union(a, b), c) == union(a, union(b, c))
    assert intersect(a, a) == a and union(a, a) == a
    assert intersect(a, union(b, c)) == union(intersect(a, b), intersect(a, c))
    assert is_subset(intersect(a, b), a)
    assert is_subset(a, b) == (intersect(a, b) == a)
    assert (first_outside(a, b) is None) == is_subset(a, b)


# -- fixtures end to end -----------------------------------------------------------


def test_user_keep_set(stock, user_spec):
    assert keep_set(stock, user_spec) == ElementSet.of(USER_GUI, USER_EVENTS, USER_PERMISSIONS)


def test_admin_keep_set(stock, admin_spec):
    assert keep_set(stock, admin_spec) == ElementSet.of(ADMIN_GUI, ADMIN_EVENTS, ADMIN_PERMISSIONS)


def test_empty_keep_set(stock, empty_spec):
    assert keep_set(stock, empty_spec) == active_set(stock)


@pytest.mark.parametrize(
    "spec_name, gui, events, permissions",
    [
        ("user_spec", USER_GUI, USER_EVENTS, USER_PERMISSIONS),
        ("admin_spec", ADMIN_GUI, ADMIN_EVENTS, ADMIN_PERMISSIONS),
        ("empty_spec", STOCK_GUI, STOCK_EVENTS, STOCK_PERMISSIONS),
    ],
)
def test_apply_fixture(request, stock, spec_name, gui, events, permissions):
    spec = request.getfixturevalue(spec_name)
    result = apply(stock, spec)
    assert active_set(result.manifest) == ElementSet.of(gui, events, permissions)
    report = verify_model(stock, spec)
    assert report.subset_holds and report.intersection_holds


def test_user_listing_counts():
    assert len(USER_GUI) == 15 and {"advertisementImage", "mainForm"} <= USER_GUI
    assert len(ADMIN_GUI) == 15 and {"approveCheckbox", "saveButton"} <= ADMIN_GUI


def test_verbatim_user_file_violates_subset(stock):
    spec = lower_to_spec(load_doc("user_raw.xml"))
    with pytest.raises(errors.SubsetViolation) as info:
        apply(stock, spec)
    assert (info.value.partition, info.value.name) == ("gui", "approvedCheckbox")
    with pytest.raises(errors.SubsetViolation):
        keep_set(stock, spec)
    report = verify_model(stock, spec)
    assert not report.subset_holds
    assert report.witness == ("gui", "approvedCheckbox")


def test_ghost_button(stock):
    spec = CustomizationSpec(gui=(GuiOverride("ghostButton", ControlType.BUTTON, PropertyName.VISIBLE, False),))
    report = verify_model(stock, spec)
    assert (report.subset_holds, report.witness) == (False, ("gui", "ghostButton"))


def test_unknown_event_and_permission(stock):
    ev = CustomizationSpec(events=(EventAction("printButton_Click", "saveButton", Toggle.OFF),))
    with pytest.raises(errors.SubsetViolation) as info:
        apply(stock, ev)
    assert info.value.partition == "events"
    form_only = dataclasses.replace(stock, permissions=())
    perm = CustomizationSpec(permissions=(PermissionAction(PermissionName.DISK_ACCESS, Toggle.OFF),))
    with pytest.raises(errors.SubsetViolation) as info:
        apply(form_only, perm)
    assert (info.value.partition, info.value.name) == ("permissions", "DiskAccess")


def test_binding_mismatch(stock):
    wrong_type = CustomizationSpec(gui=(GuiOverride("saveButton", ControlType.LABEL, PropertyName.VISIBLE, False),))
    with pytest.raises(errors.BindingMismatch):
        apply(stock, wrong_type)
    wrong_control = CustomizationSpec(events=(EventAction("saveButton_Click", "createButton", Toggle.OFF),))
    with pytest.raises(errors.BindingMismatch):
        apply(stock, wrong_control)


def test_referenced_set(user_spec):
    ref = referenced_set(user_spec)
    assert ref.gui == {"adminToolStripMenuItem", "approveCheckbox", "saveButton"}
    assert ref.events == {"saveButton_Click", "adminToolStripMenuItem_Click"}
    assert ref.permissions == STOCK_PERMISSIONS


# -- apply properties ---------------------------------------------------------------


def test_failed_apply_leaves_input_untouched(stock):
    spec = lower_to_spec(load_doc("user_raw.xml"))
    before = copy.deepcopy(stock)
    with pytest.raises(errors.SubsetViolation):
        apply(stock, spec)
    assert stock == before


def test_apply_is_pure_and_idempotent():
    for a, x in random_pairs(1, 200):
        before = copy.deepcopy(a)
        once = apply(a, x)
        assert a == before
        twice = apply(once.manifest, x)
        assert twice.manifest == once.manifest
        assert twice.provenance == ()


def test_apply_never_removes_declarations():
    for a, x in random_pairs(2, 200):
        after = apply(a, x).manifest
        assert after.declared_set() == a.declared_set()
        assert [c.name for c in after.controls] == [c.name for c in a.controls]


def test_apply_matches_brute_force():
    for a, x in random_pairs(3, 300):
        _, _, after = brute_force_customized(a, x)
        got = active_set(apply(a, x).manifest)
        assert got.sorted() == {k: sorted(v) for k, v in after.items()}


def test_keep_set_matches_brute_force():
    for a, x in random_pairs(4, 300):
        _, keep, _ = brute_force_customized(a, x)
        assert keep_set(a, x).sorted() == {k: sorted(v) for k, v in keep.items()}


def test_subset_violations_are_caught():
    hits = 0
    for a, x in random_pairs(6, 300, foreign=0.3):
        outside = first_outside(referenced_set(x), a.declared_set())
        if outside is None:
            apply(a, x)
            continue
        hits += 1
        with pytest.raises(errors.SubsetViolation):
            apply(a, x)
        assert verify_model(a, x).witness == outside
    assert hits > 50


def _switches_on_inactive(a, x):
    active, _, _ = brute_force_customized(a, x)
    on = [g.control_name for g in x.gui if g.property is PropertyName.VISIBLE and g.value]
    if any(n not in active["gui"] for n in on):
        return True
    if any(e.action.flag and e.event_name not in active["events"] for e in x.events):
        return True
    return any(p.action.flag and p.permission.value not in active["permissions"] for p in x.permissions)


def test_intersection_identity_characterized():
    # The identity active(apply(A, X)) == active(A) & keep(A, X) holds
    # exactly when X switches nothing on that A has switched off.
    holds = fails = 0
    for a, x in random_pairs(7, 500):
        active, keep, after = brute_force_customized(a, x)
        identity = brute_intersection(active, keep) == after
        assert identity == (not _switches_on_inactive(a, x))
        assert verify_model(a, x).intersection_holds == identity
        holds += identity
        fails += not identity
    assert holds and fails


def test_intersection_identity_with_declared_set():
    for a, x in random_pairs(8, 500):
        declared = a.declared_set()
        after = active_set(apply(a, x).manifest)
        assert after == intersect(declared, keep_set(a, x))


def test_intersection_identity_when_all_on():
    for a, x in random_pairs(9, 300, all_on=True):
        assert active_set(apply(a, x).manifest) == intersect(active_set(a), keep_set(a, x))


@pytest.mark.xfail(strict=True, reason="fails when a customization switches on an element that is off in the manifest")
def test_intersection_identity_universal():
    for a, x in random_pairs(10, 500):
        assert active_set(apply(a, x).manifest) == intersect(active_set(a), keep_set(a, x))


# -- diff and provenance -----------------------------------------------------------------


def test_user_diff(stock, user_spec):
    records = diff(stock, apply(stock, user_spec))
    assert [str(r) for r in records] == [
        "gui adminToolStripMenuItem Visible True -> False",
        "gui approveCheckbox Visible True -> False",
        "gui saveButton Visible True -> False",
        "events saveButton_Click enabled True -> False",
        "events adminToolStripMenuItem_Click enabled True -> False",
        "permissions DiskAccess granted True -> False",
        "permissions NetworkAccess granted True -> False",
        "permissions ProcessAccess granted True -> False",
    ]


def test_empty_diff(stock, empty_spec):
    assert diff(stock, apply(stock, empty_spec)) == []


def test_diff_counts_match_perturbation():
    # Count the fields that actually change by perturbing one entry at a time.
    for a, x in random_pairs(12, 200):
        expected = 0
        for g in x.gui:
            expected += a.control(g.control_name).properties[g.property] != g.value
        for e in x.events:
            expected += a.event(e.event_name).enabled != e.action.flag
        for p in x.permissions:
            expected += a.permission(p.permission).granted != p.action.flag
        c = apply(a, x)
        assert len(diff(a, c)) == len(c.provenance) == expected


def test_diff_rejects_unrelated(stock, user_spec, admin_spec):
    with pytest.raises(ValueError):
        diff(apply(stock, admin_spec).manifest, apply(stock, user_spec))


def test_change_record_formatting():
    r = ChangeRecord("gui", "countryCBX", "Items", ("a", "b"), ())
    assert str(r) == 'gui countryCBX Items "a|b" -> ""'
    assert r.to_json()["old"] == ["a", "b"]
    assert str(ChangeRecord("gui", "l", "Text", "", 'say "hi"')) == 'gui l Text "" -> "say \\"hi\\""'


def test_enabled_override_does_not_change_active(stock):
    spec = CustomizationSpec(gui=(GuiOverride("saveButton", ControlType.BUTTON, PropertyName.ENABLED, False),))
    c = apply(stock, spec)
    assert active_set(c.manifest) == active_set(stock)
    assert [str(r) for r in c.provenance] == ["gui saveButton Enabled True -> False"]
