"""Finite categories with explicit composition tables.

A category is given by object names, arrow names with endpoints, a
choice of identity arrow per object, and a total composition table.
``validate`` checks the category laws exhaustively and reports the first
violating instance by name.  Slice categories and categories of elements
are built as ordinary ``FinCat`` values so that one functor enumerator
serves every context the checks need.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

from .canon import CanonVal


class CategoryError(Exception):
    pass


@dataclass(frozen=True)
class FinCat:
    objects: tuple[str, ...]
    # (arrow id, source object, target object)
    arrows: tuple[tuple[str, str, str], ...]
    # (object, its identity arrow)
    identities: tuple[tuple[str, str], ...]
    # (g, f, h) with h = g . f, listed for every composable pair
    comp: tuple[tuple[str, str, str], ...]

    @cached_property
    def arrow_ids(self) -> tuple[str, ...]:
        return tuple(a for a, _, _ in self.arrows)

    @cached_property
    def arrow_index(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.arrow_ids)}

    @cached_property
    def src(self) -> dict[str, str]:
        return {a: s for a, s, _ in self.arrows}

    @cached_property
    def dst(self) -> dict[str, str]:
        return {a: t for a, _, t in self.arrows}

    @cached_property
    def identity(self) -> dict[str, str]:
        return dict(self.identities)

    @cached_property
    def _comp_table(self) -> dict[tuple[str, str], str]:
        return {(g, f): h for g, f, h in self.comp}

    def after(self, g: str, f: str) -> str:
        """The composite g . f (first f, then g)."""
        try:
            return self._comp_table[(g, f)]
        except KeyError:
            raise CategoryError(f"arrows {g} and {f} do not compose") from None

    def arrows_into(self, obj: str) -> tuple[str, ...]:
        return tuple(a for a in self.arrow_ids if self.dst[a] == obj)

    def arrows_out_of(self, obj: str) -> tuple[str, ...]:
        return tuple(a for a in self.arrow_ids if self.src[a] == obj)

    def is_identity(self, a: str) -> bool:
        return self.identity[self.src[a]] == a

    def validate(self) -> None:
        if len(set(self.objects)) != len(self.objects):
            raise CategoryError("duplicate object name")
        if len(set(self.arrow_ids)) != len(self.arrow_ids):
            raise CategoryError("duplicate arrow id")
        for a, s, t in self.arrows:
            for obj in (s, t):
                if obj not in self.objects:
                    raise CategoryError(f"arrow {a} mentions unknown object {obj}")
        seen = dict(self.identities)
        if set(seen) != set(self.objects):
            missing = set(self.objects) - set(seen)
            raise CategoryError(f"objects without identity: {sorted(missing)}")
        for obj, a in self.identities:
            if a not in self.src:
                raise CategoryError(f"identity of {obj} is unknown arrow {a}")
            if self.src[a] != obj or self.dst[a] != obj:
                raise CategoryError(f"identity of {obj} has wrong endpoints: {a}")
        composable = {
            (g, f)
            for g in self.arrow_ids
            for f in self.arrow_ids
            if self.src[g] == self.dst[f]
        }
        given = {(g, f) for g, f, _ in self.comp}
        if given != composable:
            missing = sorted(composable - given)
            extra = sorted(given - composable)
            if missing:
                raise CategoryError(f"composition undefined for {missing[0]}")
            raise CategoryError(f"composition defined for non-composable {extra[0]}")
        if len(self.comp) != len(self._comp_table):
            raise CategoryError("composition table has conflicting rows")
        for g, f, h in self.comp:
            if h not in self.src:
                raise CategoryError(f"composite {g}.{f} is unknown arrow {h}")
            if self.src[h] != self.src[f] or self.dst[h] != self.dst[g]:
                raise CategoryError(f"composite {g}.{f} = {h} has wrong endpoints")
        for a in self.arrow_ids:
            left = self.after(self.identity[self.dst[a]], a)
            right = self.after(a, self.identity[self.src[a]])
            if left != a:
                raise CategoryError(f"left identity fails at {a}: got {left}")
            if right != a:
                raise CategoryError(f"right identity fails at {a}: got {right}")
        for h in self.arrow_ids:
            for g in self.arrow_ids:
                if self.src[h] != self.dst[g]:
                    continue
                for f in self.arrow_ids:
                    if self.src[g] != self.dst[f]:
                        continue
                    if self.after(self.after(h, g), f) != self.after(h, self.after(g, f)):
                        raise CategoryError(
                            f"associativity fails at {h}, {g}, {f}"
                        )


def make_fincat(objects, arrows, identities, comp) -> FinCat:
    cat = FinCat(tuple(objects), tuple(arrows), tuple(identities), tuple(comp))
    cat.validate()
    return cat


def from_json(data: dict) -> FinCat:
    try:
        objects = list(data["objects"])
        arrows = [(a["id"], a["src"], a["dst"]) for a in data["arrows"]]
        identities = sorted(data["identities"].items())
        comp = [tuple(row) for row in data["comp"]]
    except (KeyError, TypeError) as exc:
        raise CategoryError(f"malformed category description: {exc}") from exc
    return make_fincat(objects, arrows, identities, comp)


def load_category(path) -> FinCat:
    with open(path, encoding="utf-8") as handle:
        return from_json(json.load(handle))


def to_json(cat: FinCat) -> dict:
    return {
        "objects": list(cat.objects),
        "arrows": [{"id": a, "src": s, "dst": t} for a, s, t in cat.arrows],
        "identities": dict(cat.identities),
        "comp": [list(row) for row in cat.comp],
    }


def _close_comp(objects, arrows, identities, rules) -> FinCat:
    """Complete a composition table from rules for non-identity pairs."""
    ident = dict(identities)
    src = {a: s for a, s, _ in arrows}
    dst = {a: t for a, _, t in arrows}
    comp = []
    for g, gs, gt in arrows:
        for f, fs, ft in arrows:
            if gs != ft:
                continue
            if ident[gs] == g:
                comp.append((g, f, f))
            elif ident[fs] == f:
                comp.append((g, f, g))
            else:
                comp.append((g, f, rules[(g, f)]))
    return make_fincat([o for o in objects], arrows, identities, comp)


def terminal_category() -> FinCat:
    return _close_comp(["*"], [("id*", "*", "*")], [("*", "id*")], {})


def arrow_category() -> FinCat:
    """Two objects a, b and a single non-identity arrow u : a -> b."""
    return _close_comp(
        ["a", "b"],
        [("ida", "a", "a"), ("idb", "b", "b"), ("u", "a", "b")],
        [("a", "ida"), ("b", "idb")],
        {},
    )


def span_category() -> FinCat:
    """Objects s, a, b with arrows f : s -> a and g : s -> b."""
    return _close_comp(
        ["s", "a", "b"],
        [
            ("ids", "s", "s"),
            ("ida", "a", "a"),
            ("idb", "b", "b"),
            ("f", "s", "a"),
            ("g", "s", "b"),
        ],
        [("s", "ids"), ("a", "ida"), ("b", "idb")],
        {},
    )


BUNDLED_BASES = {
    "terminal": terminal_category,
    "arrow": arrow_category,
    "span": span_category,
}


@dataclass(frozen=True)
class SliceCat:
    """The category of arrows into a fixed object.

    Objects are arrow ids of the base category; the arrow of the slice
    from f.g to f determined by g is named "g>f".
    """

    cat: FinCat
    base_obj: str  # object of the original category being sliced over

    @cached_property
    def fincat(self) -> FinCat:
        cat = self.cat
        objs = list(cat.arrows_into(self.base_obj))
        arrows = []
        identities = []
        for f in objs:
            d = cat.src[f]
            for g in cat.arrows_into(d):
                name = f"{g}>{f}"
                arrows.append((name, cat.after(f, g), f))
                if cat.is_identity(g):
                    identities.append((f, name))
        rules = {}
        for f in objs:
            for g1 in cat.arrows_into(cat.src[f]):
                fg1 = cat.after(f, g1)
                for g2 in cat.arrows_into(cat.src[fg1]):
                    rules[(f"{g1}>{f}", f"{g2}>{fg1}")] = f"{cat.after(g1, g2)}>{f}"
        comp = []
        gsrc = {a: s for a, s, _ in arrows}
        fdst = {a: t for a, _, t in arrows}
        for g, _, _ in arrows:
            for f, _, _ in arrows:
                if gsrc[g] == fdst[f]:
                    comp.append((g, f, rules[(g, f)]))
        sliced = FinCat(tuple(objs), tuple(arrows), tuple(identities), tuple(comp))
        sliced.validate()
        return sliced


def slice_category(cat: FinCat, obj: str) -> FinCat:
    return SliceCat(cat, obj).fincat


@dataclass(frozen=True)
class ElementsCat:
    """Category of elements of a finite presheaf (see presheaf.py).

    Objects are (object, element) pairs; the arrow (c, x) <- (d, x.f)
    named per base arrow f : d -> c witnesses restriction.  Presheaves on
    this category are exactly families over the given presheaf.
    """

    fincat: FinCat
    obj_name: dict  # (object, CanonVal) -> elements-category object name
    arrow_name: dict  # (arrow id, CanonVal at its target) -> arrow name


def elements_category(cat: FinCat, fibers, restrict) -> ElementsCat:
    """Build the category of elements.

    fibers: obj -> ordered tuple of CanonVal
    restrict: (arrow id, CanonVal at dst) -> CanonVal at src
    """
    obj_name: dict[tuple[str, CanonVal], str] = {}
    objects = []
    for c in cat.objects:
        for i, x in enumerate(fibers(c)):
            name = f"{c}#{i}"
            obj_name[(c, x)] = name
            objects.append(name)
    arrow_name: dict[tuple[str, CanonVal], str] = {}
    arrows = []
    identities = []
    for f in cat.arrow_ids:
        c = cat.dst[f]
        d = cat.src[f]
        for x in fibers(c):
            name = f"{f}@{obj_name[(c, x)]}"
            arrow_name[(f, x)] = name
            arrows.append((name, obj_name[(d, restrict(f, x))], obj_name[(c, x)]))
            if cat.is_identity(f):
                identities.append((obj_name[(c, x)], name))
    rules = {}
    for f in cat.arrow_ids:
        c = cat.dst[f]
        for x in fibers(c):
            xf = restrict(f, x)
            for g in cat.arrows_into(cat.src[f]):
                rules[(arrow_name[(f, x)], arrow_name[(g, xf)])] = arrow_name[
                    (cat.after(f, g), x)
                ]
    comp = []
    src = {a: s for a, s, _ in arrows}
    dst = {a: t for a, _, t in arrows}
    for g, gs, _ in arrows:
        for f, _, ft in arrows:
            if gs == ft:
                comp.append((g, f, rules[(g, f)]))
    fincat = FinCat(tuple(objects), tuple(arrows), tuple(identities), tuple(comp))
    fincat.validate()
    return ElementsCat(fincat, obj_name, arrow_name)
