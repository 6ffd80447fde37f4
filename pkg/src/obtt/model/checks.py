"""The model verification suite.

Each check walks enumerated inputs, compares two independently computed
sides, and returns one record per (level, stage) with counts, bounded
failure samples, and witness payloads.  Hitting a resource cap marks
the record capped; it is reported, never silently absorbed, and is not
a failure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

from .. import codes as ct
from ..codes import (
    CapExceeded,
    ConstFamily,
    FnCode,
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
from .canon import Atom, Tup, canon_key
from .fincat import elements_category
from .host import PresheafHost, rename_family, verify_iso
from .presheaf import enum_presheaves

MAX_FAILURE_SAMPLES = 5

# total full-product entries the section oracle may walk per record; keeps
# the cross-check bounded while the cheap fibers all still get verified
ORACLE_WORK_BUDGET = 200_000


@dataclass
class CheckRecord:
    check: str
    level: str
    stage: str
    checked: int = 0
    failure_count: int = 0
    failures: list = field(default_factory=list)
    capped: bool = False
    note: str | None = None
    witness: dict | None = None

    @property
    def status(self) -> str:
        return "fail" if self.failure_count else "pass"

    def fail(self, message: str) -> None:
        self.failure_count += 1
        if len(self.failures) < MAX_FAILURE_SAMPLES:
            self.failures.append(message)

    def add_note(self, text: str) -> None:
        self.note = f"{self.note}; {text}" if self.note else text

    def cap(self, exc: CapExceeded) -> None:
        self.capped = True
        self.add_note(str(exc))

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "level": self.level,
            "stage": self.stage,
            "status": self.status,
            "checked": self.checked,
            "failure_count": self.failure_count,
            "failures": list(self.failures),
            "capped": self.capped,
            "note": self.note,
            "witness": self.witness,
        }


def _code_label(host, code) -> str:
    return str(ct.encode_code(host, code))


def check_retraction(host: PresheafHost, level: int) -> list[CheckRecord]:
    """Decoding an embedded element returns that element."""
    out = []
    for stage in host.stages():
        rec = CheckRecord("retraction", str(level), stage)
        try:
            for x in host.elements(level, stage):
                rec.checked += 1
                if not host.elem_eq(decode(host, stage, UpCode(level, x)), x):
                    rec.fail(f"element {host.encode_elem(x)} not recovered")
        except CapExceeded as exc:
            rec.cap(exc)
        out.append(rec)
    return out


def _oracle_keys_pools(host, stage, f, dom_fam, bfam):
    cat = host.cat
    d = cat.src[f]
    keys = []
    for g in cat.arrows_into(d):
        for x in dom_fam.fiber(cat.after(f, g)):
            keys.append((g, x))
    keys.sort(key=lambda k: (cat.arrow_index[k[0]], canon_key(k[1])))
    pools = [
        bfam(cat.after(f, g), x).fiber(cat.identity[cat.src[g]]) for g, x in keys
    ]
    return keys, pools


def oracle_product_size(host, stage, f, dom_fam, bfam) -> int:
    """Work the full-product oracle would do at this fiber."""
    _, pools = _oracle_keys_pools(host, stage, f, dom_fam, bfam)
    return math.prod((len(p) for p in pools), start=1)


def brute_section_fiber(host, stage, f, dom_fam, bfam, limit):
    """Independent section enumerator: full product, then a naturality filter.

    Deliberately ignores the propagation structure the main route uses.
    """
    cat = host.cat
    keys, pools = _oracle_keys_pools(host, stage, f, dom_fam, bfam)
    total = math.prod((len(p) for p in pools), start=1)
    if total > limit:
        raise CapExceeded(f"oracle section product at {f}", limit)
    found = []
    for combo in product(*pools):
        phi = dict(zip(keys, combo))
        ok = True
        for (g, x), val in phi.items():
            e = cat.src[g]
            fg = cat.after(f, g)
            for h in cat.arrows_into(e):
                if cat.is_identity(h):
                    continue
                lhs = phi[(cat.after(g, h), dom_fam.restrict(fg, h, x))]
                rhs = bfam(fg, x).restrict(cat.identity[e], h, val)
                if lhs != rhs:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            found.append(_encode_section(cat, phi))
    found.sort(key=canon_key)
    return tuple(found)


def _encode_section(cat, phi) -> Tup:
    from .canon import fun_tab

    return fun_tab(
        (Tup((Atom(cat.arrow_index[g]), x)), v) for (g, x), v in phi.items()
    )


def check_decode_fn(host: PresheafHost, level: int, depth: int) -> list[CheckRecord]:
    """Function codes decode to the literal dependent-section family.

    The decoded family is compared to an independent brute-force section
    enumerator fiber by fiber.  In strict mode the host's own function
    former must agree literally; in weak mode a differing-but-isomorphic
    host output is recorded as a witness.
    """
    out = []
    for stage in host.stages():
        rec = CheckRecord("decode_fn", str(level), stage)
        budget = ORACLE_WORK_BUDGET
        oracle_done = 0
        oracle_skipped = 0
        code_skips = 0
        try:
            codes, truncated = take(
                enum_codes(host, level, stage, depth), host.caps.codes_per_stage
            )
            if truncated:
                rec.capped = True
                rec.add_note(
                    f"code stream truncated at {host.caps.codes_per_stage}"
                )
            for code in codes:
                parts = decompose_fn(code)
                if parts is None:
                    continue
                dom, fam = parts
                rec.checked += 1
                try:
                    dom_elem = decode(host, stage, dom)
                    dom_fam = host.decode_host(dom_elem)

                    def cod(f, x, _fam=fam):
                        return decode(
                            host,
                            host.arrow_src(f),
                            fam_value(host, stage, _fam, f, x),
                        )

                    def bfam(f, x, _cod=cod):
                        return host.decode_host(_cod(f, x))

                    dec = decode(host, stage, code)
                    dec_fam = host.decode_host(dec)
                    for f in host.arrows_into(stage):
                        cost = oracle_product_size(host, stage, f, dom_fam, bfam)
                        if cost > budget:
                            oracle_skipped += 1
                            continue
                        budget -= cost
                        oracle_done += 1
                        want = brute_section_fiber(
                            host, stage, f, dom_fam, bfam, cost
                        )
                        if dec_fam.fiber(f) != want:
                            rec.fail(
                                f"sections at {f} differ from oracle for "
                                f"{_code_label(host, code)}"
                            )
                    hout = host.host_fn(level, stage, dom_elem, cod)
                    if host.strict_fn:
                        if not host.elem_eq(hout, dec):
                            rec.fail(
                                f"strict host function former deviates on "
                                f"{_code_label(host, code)}"
                            )
                    else:
                        literal = host.section_fn(level, stage, dom_elem, cod)
                        renamed, tables = rename_family(host.cat, literal)
                        if not host.elem_eq(hout, renamed):
                            rec.fail(
                                "weak host former is not the renamed sections"
                            )
                        if not host.elem_eq(hout, dec) and rec.witness is None:
                            if verify_iso(host.cat, literal, hout, tables):
                                rec.witness = {
                                    "kind": "weak_host_fn_differs",
                                    "code": _code_label(host, code),
                                    "sections": str(host.encode_elem(literal)),
                                    "host_fn": str(host.encode_elem(hout)),
                                    "isomorphic": True,
                                }
                            else:
                                rec.fail(
                                    "weak host former not isomorphic to sections"
                                )
                except CapExceeded:
                    code_skips += 1
        except CapExceeded as exc:
            rec.cap(exc)
        if oracle_skipped:
            rec.capped = True
            rec.add_note(
                f"oracle cross-checked {oracle_done} section fibers, skipped "
                f"{oracle_skipped} over the work budget"
            )
        elif oracle_done:
            rec.add_note(f"oracle cross-checked {oracle_done} section fibers")
        if code_skips:
            rec.capped = True
            rec.add_note(f"{code_skips} codes skipped over a resource cap")
        out.append(rec)
    return out


def check_naturality(host: PresheafHost, level: int, depth: int) -> list[CheckRecord]:
    """Restricting a code then decoding equals decoding then restricting."""
    out = []
    for stage in host.stages():
        rec = CheckRecord("naturality", str(level), stage)
        code_skips = 0
        try:
            arrows = [
                f for f in host.arrows_into(stage) if not host.is_identity(f)
            ]
            if arrows:
                codes, truncated = take(
                    enum_codes(host, level, stage, depth),
                    host.caps.codes_per_stage,
                )
            else:
                codes, truncated = [], False
            if truncated:
                rec.capped = True
                rec.add_note(
                    f"code stream truncated at {host.caps.codes_per_stage}"
                )
            for code in codes:
                try:
                    dec = decode(host, stage, code)
                    for f in arrows:
                        rec.checked += 1
                        via_code = decode(
                            host,
                            host.arrow_src(f),
                            restrict_code(host, stage, code, f),
                        )
                        via_elem = host.restrict_elem(dec, f)
                        if not host.elem_eq(via_code, via_elem):
                            rec.fail(
                                f"restriction along {f} disagrees on "
                                f"{_code_label(host, code)}"
                            )
                except CapExceeded:
                    code_skips += 1
        except CapExceeded as exc:
            rec.cap(exc)
        if code_skips:
            rec.capped = True
            rec.add_note(f"{code_skips} codes skipped over a resource cap")
        out.append(rec)
    return out


def check_lift(host: PresheafHost, level: int, depth: int) -> list[CheckRecord]:
    """Lift coherence, and functoriality when a third level exists.

    Coherence: decoding a lifted code gives the lifted decode.  With
    levels level..level+2 configured, composing two one-step lifts must
    equal the direct two-step lift structurally.
    """
    # functoriality needs levels level, level+1, level+2 all configured
    functorial = len(host.bounds) >= level + 3
    out = []
    for stage in host.stages():
        label = f"{level}->{level + 2 if functorial else level + 1}"
        rec = CheckRecord("lift", label, stage)
        if not functorial:
            rec.note = "functoriality skipped: fewer than three levels configured"
        code_skips = 0
        try:
            codes, truncated = take(
                enum_codes(host, level, stage, depth), host.caps.codes_per_stage
            )
            if truncated:
                rec.capped = True
                rec.add_note(
                    f"code stream truncated at {host.caps.codes_per_stage}"
                )
            for code in codes:
                rec.checked += 1
                try:
                    lifted = vlift(host, code)
                    base = decode(host, stage, code)
                    if not host.elem_eq(
                        decode(host, stage, lifted), host.host_lift(base, level)
                    ):
                        rec.fail(
                            f"lift coherence fails on {_code_label(host, code)}"
                        )
                    if functorial:
                        twice = vlift(host, lifted)
                        direct = vlift(host, code, 2)
                        if not code_eq(host, twice, direct):
                            rec.fail(
                                f"lift functoriality fails on "
                                f"{_code_label(host, code)}"
                            )
                        if not host.elem_eq(
                            decode(host, stage, twice),
                            host.host_lift(host.host_lift(base, level), level + 1),
                        ):
                            rec.fail(
                                f"two-step lift coherence fails on "
                                f"{_code_label(host, code)}"
                            )
                except CapExceeded:
                    code_skips += 1
        except CapExceeded as exc:
            rec.cap(exc)
        if code_skips:
            rec.capped = True
            rec.add_note(f"{code_skips} codes skipped over a resource cap")
        out.append(rec)
    return out


def witness_non_injectivity(host: PresheafHost, level: int) -> list[CheckRecord]:
    """The host's function former identifies what distinct codes keep apart.

    Over the empty domain every dependent product is terminal, so two
    constant families with different bodies give equal host elements;
    the corresponding function codes stay distinct under code equality.
    """
    out = []
    for stage in host.stages():
        rec = CheckRecord("non_injectivity_witness", str(level), stage)
        try:
            elems = host.elements(level, stage)
            empty = next(
                (e for e in elems if all(not e.fiber(f) for f in host.arrows_into(stage))),
                None,
            )
            if empty is None:
                rec.fail("no empty family in the stage set")
                out.append(rec)
                continue
            if len(elems) < 2:
                rec.checked = 1
                rec.note = "no witness exists: the stage set is a single family"
                out.append(rec)
                continue
            others = [e for e in elems if e != empty]
            pick = (others[0], others[1]) if len(others) >= 2 else (empty, others[0])
            b0, b1 = pick
            fam0 = ConstFamily(UpCode(level, b0))
            fam1 = ConstFamily(UpCode(level, b1))
            dom = UpCode(level, empty)

            def cod(fam):
                def go(f, x):
                    return decode(
                        host, host.arrow_src(f), fam_value(host, stage, fam, f, x)
                    )

                return go

            p0 = host.host_fn(level, stage, empty, cod(fam0))
            p1 = host.host_fn(level, stage, empty, cod(fam1))
            c0 = FnCode(level, dom, fam0)
            c1 = FnCode(level, dom, fam1)
            rec.checked = 1
            if not host.elem_eq(p0, p1):
                rec.fail("host function former distinguishes empty-domain families")
            if code_eq(host, c0, c1):
                rec.fail("function codes with distinct families compare equal")
            if rec.failure_count == 0:
                rec.witness = {
                    "kind": "host_non_injectivity",
                    "body0": str(host.encode_elem(b0)),
                    "body1": str(host.encode_elem(b1)),
                    "host_fn_both": str(host.encode_elem(p0)),
                    "code0": _code_label(host, c0),
                    "code1": _code_label(host, c1),
                }
        except CapExceeded as exc:
            rec.cap(exc)
        out.append(rec)
    return out


def check_genericity(host: PresheafHost, level: int, family_bound: int) -> list[CheckRecord]:
    """Every bounded family over every small presheaf is a pullback of
    the universe: its classifying map lands in the stage sets, is
    natural, and reconstructs the family on the nose.

    Families with any fiber over the bound are counted out of class.
    """
    cat = host.cat
    rec = CheckRecord("genericity", str(level), "*")
    bound = host.bounds[level]
    out_of_class = 0
    bases = 0
    try:
        for level_stage in cat.objects:
            host.elements(level, level_stage)  # fail fast on stage caps
        for base in enum_presheaves(cat, family_bound):
            bases += 1
            elems_cat = elements_category(
                cat, base.fiber, lambda f, x: base.restrict(f, x)
            )
            budget = host.caps.genericity_families
            seen = 0
            for fam in enum_presheaves(elems_cat.fincat, bound + 1):
                if seen >= budget:
                    rec.capped = True
                    rec.note = (
                        f"family stream truncated at {budget} per base presheaf"
                    )
                    break
                seen += 1
                if any(
                    len(fam.fiber(elems_cat.obj_name[(c, x)])) > bound
                    for c in cat.objects
                    for x in base.fiber(c)
                ):
                    out_of_class += 1
                    continue
                rec.checked += 1
                _classify_and_check(host, level, base, elems_cat, fam, rec)
    except CapExceeded as exc:
        rec.cap(exc)
    rec.witness = {
        "kind": "genericity_census",
        "base_presheaves": bases,
        "out_of_class": out_of_class,
    }
    return [rec]


def _classify_and_check(host, level, base, elems_cat, fam, rec) -> None:
    from .host import make_stage_family

    cat = host.cat
    chi = {}
    for c in cat.objects:
        for x in base.fiber(c):
            stage_fam = make_stage_family(
                cat,
                c,
                lambda f, _x=x: fam.fiber(
                    elems_cat.obj_name[(cat.src[f], base.restrict(f, _x))]
                ),
                lambda f, g, v, _x=x: fam.restrict(
                    elems_cat.arrow_name[(g, base.restrict(f, _x))], v
                ),
            )
            chi[(c, x)] = stage_fam
            if stage_fam not in host.stage_set(level, c):
                rec.fail(f"classifier misses the stage set at {c}")
                return
    for f in cat.arrow_ids:
        if cat.is_identity(f):
            continue
        c = cat.dst[f]
        for x in base.fiber(c):
            if host.restrict_elem(chi[(c, x)], f) != chi[(cat.src[f], base.restrict(f, x))]:
                rec.fail(f"classifier not natural along {f}")
                return
    for c in cat.objects:
        ident = cat.identity[c]
        for x in base.fiber(c):
            got = chi[(c, x)].fiber(ident)
            want = tuple(
                sorted(fam.fiber(elems_cat.obj_name[(c, x)]), key=canon_key)
            )
            if got != want:
                rec.fail(f"pullback fiber differs at {c}")
                return
            for f in cat.arrows_into(c):
                if cat.is_identity(f):
                    continue
                for v in got:
                    lhs = chi[(c, x)].restrict(ident, f, v)
                    rhs = fam.restrict(elems_cat.arrow_name[(f, x)], v)
                    if lhs != rhs:
                        rec.fail(f"pullback restriction differs along {f}")
                        return
