import glob
import itertools

import pytest

from obtt.codes import (
    BoolCode,
    CapExceeded,
    ConstFamily,
    FnCode,
    UnitCode,
    UpCode,
    code_eq,
    decode,
    decompose_fn,
    enum_codes,
    fam_value,
    restrict_code,
    take,
    vlift,
)
from obtt.model.canon import Atom, canon_key, fun_tab
from obtt.model.checks import (
    brute_section_fiber,
    check_decode_fn,
    check_genericity,
    check_lift,
    check_naturality,
    check_retraction,
    witness_non_injectivity,
)
from obtt.model.fincat import (
    CategoryError,
    arrow_category,
    from_json,
    load_category,
    span_category,
    terminal_category,
    to_json,
)
from obtt.model.host import (
    Caps,
    PresheafHost,
    make_stage_family,
    rename_family,
    search_iso,
    validate_stage_family,
    verify_iso,
)
from obtt.model.presheaf import enum_presheaves
from oracles import count_codes_brute, count_presheaves_brute

BASES = {
    "terminal": terminal_category,
    "arrow": arrow_category,
    "span": span_category,
}


def host_on(name, bounds=(2, 3), **kw):
    return PresheafHost(BASES[name](), bounds, **kw)


# -- base categories ----------------------------------------------------------

@pytest.mark.parametrize("name", sorted(BASES))
def test_bundled_base_files_round_trip(name):
    built = BASES[name]()
    loaded = load_category(f"bases/{name}.json")
    assert to_json(loaded) == to_json(built)


def test_corrupt_composition_is_rejected():
    data = to_json(arrow_category())
    # send every composite that should be the non-identity arrow elsewhere
    data["comp"] = [
        [g, f, ("idb" if h == "u" else h)] for g, f, h in data["comp"]
    ]
    with pytest.raises(CategoryError):
        from_json(data)


def test_missing_identity_is_rejected():
    data = to_json(arrow_category())
    del data["identities"][data["objects"][0]]
    with pytest.raises(CategoryError):
        from_json(data)


# -- presheaf enumeration vs the brute oracle ---------------------------------

FROZEN_PRESHEAF_COUNTS = {
    ("terminal", 2): 3,
    ("terminal", 3): 4,
    ("arrow", 2): 11,
    ("arrow", 3): 60,
}


@pytest.mark.parametrize("name,bound", sorted(FROZEN_PRESHEAF_COUNTS))
def test_presheaf_counts_frozen(name, bound):
    cat = BASES[name]()
    got = sum(1 for _ in enum_presheaves(cat, bound))
    assert got == FROZEN_PRESHEAF_COUNTS[(name, bound)]
    assert got == count_presheaves_brute(cat, bound)


def test_presheaf_count_span_matches_brute():
    cat = span_category()
    got = sum(1 for _ in enum_presheaves(cat, 2))
    assert got == count_presheaves_brute(cat, 2)


def test_enumeration_is_duplicate_free():
    cat = arrow_category()
    seen = set()
    for psh in enum_presheaves(cat, 2):
        key = tuple(
            (obj, psh.fiber(obj)) for obj in cat.objects
        ) + tuple(
            (f, tuple(psh.restrict(f, x) for x in psh.fiber(cat.dst[f])))
            for f in cat.arrow_ids
            if not cat.is_identity(f)
        )
        assert key not in seen
        seen.add(key)


# -- code enumeration vs the brute oracle -------------------------------------

def test_terminal_code_count_frozen():
    host = host_on("terminal")
    codes, truncated = take(enum_codes(host, 0, "*", 1), 10_000)
    assert not truncated
    assert len(codes) == 177
    assert count_codes_brute(host, 0, "*", 1) == 177


def test_arrow_code_count_matches_brute_small_bounds():
    host = host_on("arrow", bounds=(1, 2))
    for stage in host.stages():
        codes, truncated = take(enum_codes(host, 0, stage, 1), 100_000)
        assert not truncated
        brute = count_codes_brute(host, 0, stage, 1)
        assert len(codes) == brute


def test_code_stream_is_duplicate_free():
    host = host_on("terminal")
    codes, _ = take(enum_codes(host, 0, "*", 1), 10_000)
    for a, b in itertools.combinations(codes[:60], 2):
        assert not code_eq(host, a, b)


def test_take_reports_truncation():
    items, truncated = take(iter(range(10)), 3)
    assert items == [0, 1, 2] and truncated
    items, truncated = take(iter(range(3)), 3)
    assert items == [0, 1, 2] and not truncated


# -- decoding and sections ----------------------------------------------------

def test_fn_code_fibers_match_brute_oracle():
    host = host_on("arrow")
    stage = "b"
    fn_codes = [
        code for code in take(enum_codes(host, 0, stage, 1), 400)[0]
        if decompose_fn(code) is not None
    ][:40]
    assert fn_codes
    for code in fn_codes:
        dom, fam = decompose_fn(code)
        dom_fam = host.decode_host(decode(host, stage, dom))

        def bfam(f, x, _fam=fam):
            return host.decode_host(
                decode(host, host.arrow_src(f), fam_value(host, stage, _fam, f, x))
            )

        dec_fam = host.decode_host(decode(host, stage, code))
        for f in host.arrows_into(stage):
            want = brute_section_fiber(host, stage, f, dom_fam, bfam, 100_000)
            assert dec_fam.fiber(f) == want


def test_known_fiber_sizes():
    host = host_on("terminal")
    fn = FnCode(0, BoolCode(0), ConstFamily(BoolCode(0)))
    ident = host.identity_arrow("*")
    assert len(host.decode_host(decode(host, "*", fn)).fiber(ident)) == 4
    from obtt.codes import SgCode

    sg = SgCode(0, BoolCode(0), ConstFamily(UnitCode(0)))
    assert len(host.decode_host(decode(host, "*", sg)).fiber(ident)) == 2


def test_brute_oracle_respects_its_limit():
    host = host_on("terminal")
    fn = FnCode(0, BoolCode(0), ConstFamily(BoolCode(0)))
    dom, fam = decompose_fn(fn)
    dom_fam = host.decode_host(decode(host, "*", dom))

    def bfam(f, x):
        return host.decode_host(
            decode(host, host.arrow_src(f), fam_value(host, "*", fam, f, x))
        )

    with pytest.raises(CapExceeded):
        brute_section_fiber(host, "*", host.identity_arrow("*"), dom_fam, bfam, 0)


def test_universe_fibers_are_coherent_families():
    host = host_on("arrow")
    cat = host.cat
    for stage in host.stages():
        for elem in host.elements(0, stage):
            validate_stage_family(cat, elem, bound=host.bounds[0])
        for f in host.arrows_into(stage):
            if host.is_identity(f):
                continue
            src = host.arrow_src(f)
            for elem in host.elements(0, stage):
                assert host.restrict_elem(elem, f) in host.stage_set(0, src)


def test_restrict_code_along_identity():
    host = host_on("arrow")
    codes, _ = take(enum_codes(host, 0, "b", 1), 50)
    ident = host.identity_arrow("b")
    for code in codes:
        assert code_eq(host, restrict_code(host, "b", code, ident), code)


def test_restricted_codes_decode_naturally():
    host = host_on("arrow")
    codes, _ = take(enum_codes(host, 0, "b", 1), 80)
    for code in codes:
        for f in host.arrows_into("b"):
            if host.is_identity(f):
                continue
            moved = restrict_code(host, "b", code, f)
            src = host.arrow_src(f)
            lhs = host.restrict_elem(decode(host, "b", code), f)
            assert host.elem_eq(lhs, decode(host, src, moved))


def test_lift_preserves_decoding():
    host = host_on("terminal")
    codes, _ = take(enum_codes(host, 0, "*", 1), 60)
    for code in codes:
        lifted = vlift(host, code)
        assert host.elem_eq(decode(host, "*", code), decode(host, "*", lifted))


def test_const_and_tab_families_never_compare_equal():
    host = host_on("terminal")
    body = BoolCode(0)
    dom = UnitCode(0)
    elems = host.decode_host(decode(host, "*", dom))
    ident = host.identity_arrow("*")
    entries = tuple(
        ((ident, x), body) for x in elems.fiber(ident)
    )
    from obtt.codes import tab_family

    tab = tab_family(host, entries)
    fn_const = FnCode(0, dom, ConstFamily(body))
    fn_tab = FnCode(0, dom, tab)
    # same sections either way, but the codes stay distinct
    assert host.elem_eq(
        decode(host, "*", fn_const), decode(host, "*", fn_tab)
    )
    assert not code_eq(host, fn_const, fn_tab)


# -- stage families and isomorphism helpers -----------------------------------

def arrow_two_point_family():
    cat = arrow_category()
    fibers = {
        "idb": (Atom(0), Atom(1)),
        "u": (Atom(0),),
    }

    def restrict(f, g, v):
        if f == "idb" and g == "u":
            return Atom(0)
        return v

    return cat, make_stage_family(cat, "b", lambda f: fibers[f], restrict)


def test_stage_family_identity_restriction_is_identity():
    cat, fam = arrow_two_point_family()
    for v in fam.fiber("idb"):
        assert fam.restrict("idb", "idb", v) == v


def test_rename_family_is_isomorphic_not_equal():
    cat, fam = arrow_two_point_family()
    renamed, tables = rename_family(cat, fam)
    assert verify_iso(cat, fam, renamed, tables)
    assert search_iso(cat, fam, renamed) is not None


def test_search_iso_rejects_size_mismatch():
    cat, fam = arrow_two_point_family()
    small = make_stage_family(cat, "b", lambda f: (Atom(0),), lambda f, g, v: v)
    assert search_iso(cat, fam, small) is None


def test_canon_key_orders_mixed_values():
    vals = [Atom(3), Atom(0), fun_tab([(Atom(0), Atom(1))])]
    ordered = sorted(vals, key=canon_key)
    assert ordered[0] == Atom(0) and ordered[1] == Atom(3)


# -- model checks end to end --------------------------------------------------

def test_all_checks_pass_on_terminal():
    host = host_on("terminal")
    records = []
    records += check_retraction(host, 0)
    records += check_decode_fn(host, 0, 2)
    records += check_naturality(host, 0, 2)
    records += check_lift(host, 0, 2)
    records += witness_non_injectivity(host, 0)
    for rec in records:
        assert rec.status == "pass", (rec.check, rec.failures)
    decode_notes = [r.note for r in records if r.check == "decode_fn"]
    assert any("oracle cross-checked" in (n or "") for n in decode_notes)


def test_non_injectivity_witness_payload():
    for name in sorted(BASES):
        host = host_on(name)
        for rec in witness_non_injectivity(host, 0):
            assert rec.status == "pass"
            assert rec.witness is not None, name
            w = rec.witness
            assert w["kind"] == "host_non_injectivity"
            assert w["body0"] != w["body1"]
            assert w["code0"] != w["code1"]


def test_lift_functoriality_needs_three_levels():
    host = host_on("terminal", bounds=(2, 3))
    rec = check_lift(host, 0, 2)[0]
    assert "functoriality skipped" in (rec.note or "")
    host3 = host_on("terminal", bounds=(2, 3, 4))
    rec3 = check_lift(host3, 0, 2)[0]
    assert rec3.status == "pass"
    assert "0->2" in rec3.level or rec3.level == "0->2"


def test_genericity_census_frozen():
    host = host_on("terminal")
    rec = check_genericity(host, 0, 2)[0]
    assert rec.status == "pass"
    assert rec.checked == 13
    assert rec.witness == {
        "kind": "genericity_census",
        "base_presheaves": 3,
        "out_of_class": 8,
    }


def test_weak_mode_decode_fn_passes():
    host = host_on("arrow", strict_fn=False)
    for rec in check_decode_fn(host, 0, 2):
        assert rec.status == "pass", rec.failures


def test_cap_on_code_stream_is_reported():
    host = host_on("terminal", caps=Caps(codes_per_stage=5))
    rec = check_decode_fn(host, 0, 2)[0]
    assert rec.capped
    assert "truncated" in (rec.note or "")
