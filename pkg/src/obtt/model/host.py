"""Host universes inside a finite presheaf topos.

An element of the host universe at a stage c is a bounded family over
the slice at c: a fiber of canonical values for every arrow into c and
a functorial restriction map for every composable extension.  The
universe carrier at each level is the set of all such families with
fibers under that level's bound, canonically enumerated.

The dependent-section construction gives the host's function former.
In strict mode it is used as-is, so decoding commutes with the function
code former on the nose; weak mode post-composes a deterministic fiber
renaming, which keeps an isomorphic family but destroys the literal
equality, modeling hosts whose universe is only closed up to iso.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from ..codes import CapExceeded, HostUniverse
from .canon import Atom, CanonVal, FunTab, Tup, canon_key, fun_tab, sorted_vals
from .fincat import FinCat, slice_category
from .presheaf import enum_presheaves


@dataclass(frozen=True)
class Caps:
    """Resource limits; every truncation they force is reported."""

    stage_elements: int = 1_000_000
    codes_per_stage: int = 600
    section_fiber: int = 50_000
    genericity_families: int = 5_000


@dataclass(frozen=True)
class StageFamily:
    """A family over the slice at a stage, canonically represented.

    fibers: per arrow f into the stage, the sorted fiber at f.
    maps: per (f, g) with g a non-identity arrow into f's source, the
    graph of the restriction fiber(f) -> fiber(f.g); identity
    restrictions are implicit.
    """

    stage: str
    fibers: tuple[tuple[str, tuple[CanonVal, ...]], ...]
    maps: tuple[tuple[tuple[str, str], tuple[tuple[CanonVal, CanonVal], ...]], ...]

    @cached_property
    def _fiber(self) -> dict[str, tuple[CanonVal, ...]]:
        return dict(self.fibers)

    @cached_property
    def _map(self) -> dict[tuple[str, str], dict[CanonVal, CanonVal]]:
        return {key: dict(rows) for key, rows in self.maps}

    def fiber(self, f: str) -> tuple[CanonVal, ...]:
        return self._fiber[f]

    def restrict(self, f: str, g: str, value: CanonVal) -> CanonVal:
        rows = self._map.get((f, g))
        if rows is None:
            # only identity restrictions are unlisted
            return value
        return rows[value]

    def restrict_along(self, cat: FinCat, h: str) -> "StageFamily":
        """Reindex the whole family along h into its stage."""
        return make_stage_family(
            cat,
            cat.src[h],
            lambda f: self.fiber(cat.after(h, f)),
            lambda f, g, v: self.restrict(cat.after(h, f), g, v),
        )


def make_stage_family(cat: FinCat, stage: str, fiber_fun, restrict_fun) -> StageFamily:
    """Canonicalize fiber/restriction functions into a StageFamily."""
    fibers = []
    for f in cat.arrows_into(stage):
        fibers.append((f, sorted_vals(fiber_fun(f))))
    fiber_of = dict(fibers)
    maps = []
    for f in cat.arrows_into(stage):
        for g in cat.arrows_into(cat.src[f]):
            if cat.is_identity(g):
                continue
            rows = tuple((x, restrict_fun(f, g, x)) for x in fiber_of[f])
            maps.append(((f, g), rows))
    return StageFamily(stage, tuple(fibers), tuple(maps))


def validate_stage_family(cat: FinCat, fam: StageFamily, bound: int | None = None) -> None:
    """Exhaustive functoriality (and optional bound) check; assertion-based."""
    for f in cat.arrows_into(fam.stage):
        if bound is not None:
            assert len(fam.fiber(f)) <= bound, (fam.stage, f)
        for g in cat.arrows_into(cat.src[f]):
            if cat.is_identity(g):
                continue
            fg = cat.after(f, g)
            for x in fam.fiber(f):
                xg = fam.restrict(f, g, x)
                assert xg in fam.fiber(fg), (f, g, x)
                for h in cat.arrows_into(cat.src[g]):
                    if cat.is_identity(h):
                        continue
                    gh = cat.after(g, h)
                    left = fam.restrict(fg, h, xg)
                    right = fam.restrict(f, gh, x)
                    assert left == right, (f, g, h, x)


def encode_stage_family(cat: FinCat, fam: StageFamily) -> CanonVal:
    """Injective canonical encoding of a family as a single value."""
    fibs = Tup(
        tuple(
            Tup((Atom(cat.arrow_index[f]), Tup(vals)))
            for f, vals in fam.fibers
        )
    )
    maps = Tup(
        tuple(
            Tup((Atom(cat.arrow_index[f]), Atom(cat.arrow_index[g]), FunTab(rows)))
            for (f, g), rows in fam.maps
        )
    )
    return Tup((fibs, maps))


def rename_family(cat: FinCat, fam: StageFamily) -> tuple[StageFamily, dict]:
    """Positionally rename every fiber to atoms; returns (family, tables).

    The tables give, per arrow, the bijection old value -> new atom;
    they are the isomorphism witness between input and output.
    """
    tables = {
        f: {v: Atom(i) for i, v in enumerate(vals)} for f, vals in fam.fibers
    }
    renamed = make_stage_family(
        cat,
        fam.stage,
        lambda f: tuple(tables[f].values()),
        lambda f, g, v: tables[cat.after(f, g)][
            fam.restrict(f, g, _table_inv(tables[f], v))
        ],
    )
    return renamed, tables


def _table_inv(table: dict, new: CanonVal) -> CanonVal:
    for old, atom in table.items():
        if atom == new:
            return old
    raise KeyError(new)


def verify_iso(cat: FinCat, a: StageFamily, b: StageFamily, tables: dict) -> bool:
    """Check a claimed per-fiber bijection commutes with all restrictions."""
    if a.stage != b.stage:
        return False
    for f in cat.arrows_into(a.stage):
        table = tables.get(f)
        if table is None:
            return False
        if sorted(map(canon_key, table.keys())) != sorted(map(canon_key, a.fiber(f))):
            return False
        if sorted(map(canon_key, table.values())) != sorted(map(canon_key, b.fiber(f))):
            return False
        if len(set(table.values())) != len(table):
            return False
    for f in cat.arrows_into(a.stage):
        for g in cat.arrows_into(cat.src[f]):
            if cat.is_identity(g):
                continue
            fg = cat.after(f, g)
            for x in a.fiber(f):
                if tables[fg][a.restrict(f, g, x)] != b.restrict(f, g, tables[f][x]):
                    return False
    return True


def search_iso(cat: FinCat, a: StageFamily, b: StageFamily) -> dict | None:
    """Find an isomorphism by backtracking search; None when there is none.

    Intended for small fibers (test oracles); factorial in fiber size.
    """
    from itertools import permutations

    if a.stage != b.stage:
        return None
    arrows = cat.arrows_into(a.stage)
    for f in arrows:
        if len(a.fiber(f)) != len(b.fiber(f)):
            return None

    def consistent(tables) -> bool:
        for f in arrows:
            if f not in tables:
                continue
            for g in cat.arrows_into(cat.src[f]):
                if cat.is_identity(g):
                    continue
                fg = cat.after(f, g)
                if fg not in tables:
                    continue
                for x in a.fiber(f):
                    if tables[fg][a.restrict(f, g, x)] != b.restrict(
                        f, g, tables[f][x]
                    ):
                        return False
        return True

    def rec(i: int, tables: dict):
        if i == len(arrows):
            return dict(tables)
        f = arrows[i]
        for image in permutations(b.fiber(f)):
            tables[f] = dict(zip(a.fiber(f), image))
            if consistent(tables):
                found = rec(i + 1, tables)
                if found is not None:
                    return found
        del tables[f]
        return None

    return rec(0, {})


class PresheafHost(HostUniverse):
    """The bounded family universe over a validated finite category."""

    def __init__(
        self,
        cat: FinCat,
        bounds: tuple[int, ...],
        strict_fn: bool = True,
        uni_code_depth: int = 0,
        caps: Caps = Caps(),
    ):
        super().__init__()
        self.cat = cat
        self.bounds = tuple(bounds)
        self.strict_fn = strict_fn
        self.uni_code_depth = uni_code_depth
        self.caps = caps
        self._slices: dict[str, FinCat] = {}
        self._stage_sets: dict = {}
        self._stage_lookup: dict = {}
        self._consts: dict = {}
        self._uni: dict = {}

    # base navigation
    def stages(self):
        return self.cat.objects

    def arrows_into(self, stage):
        return self.cat.arrows_into(stage)

    def arrow_src(self, f):
        return self.cat.src[f]

    def after(self, g, f):
        return self.cat.after(g, f)

    def identity_arrow(self, stage):
        return self.cat.identity[stage]

    def is_identity(self, f):
        return self.cat.is_identity(f)

    def arrow_pos(self, f):
        return self.cat.arrow_index[f]

    # elements
    def _slice(self, stage: str) -> FinCat:
        if stage not in self._slices:
            self._slices[stage] = slice_category(self.cat, stage)
        return self._slices[stage]

    def elements(self, level, stage):
        key = (level, stage)
        if key not in self._stage_sets:
            if not 0 <= level < len(self.bounds):
                raise ValueError(f"no bound configured for level {level}")
            fams = []
            for psh in enum_presheaves(self._slice(stage), self.bounds[level]):
                if len(fams) >= self.caps.stage_elements:
                    raise CapExceeded(f"stage elements at {stage}", self.caps.stage_elements)
                fams.append(self._from_slice_presheaf(stage, psh))
            fams.sort(key=lambda fam: canon_key(self.encode_elem(fam)))
            self._stage_sets[key] = tuple(fams)
            self._stage_lookup[key] = frozenset(fams)
        return self._stage_sets[key]

    def stage_set(self, level, stage) -> frozenset:
        self.elements(level, stage)
        return self._stage_lookup[(level, stage)]

    def _from_slice_presheaf(self, stage, psh) -> StageFamily:
        # slice objects are arrow ids; slice arrows are named "g>f"
        return make_stage_family(
            self.cat,
            stage,
            lambda f: psh.fiber(f),
            lambda f, g, v: psh.restrict(f"{g}>{f}", v),
        )

    def elem_eq(self, x, y):
        return x == y

    def restrict_elem(self, x, f):
        return x.restrict_along(self.cat, f)

    def decode_host(self, x):
        return x

    def encode_elem(self, x):
        return encode_stage_family(self.cat, x)

    # type formers
    def _const_elem(self, stage: str, size: int) -> StageFamily:
        key = (stage, size)
        if key not in self._consts:
            atoms = tuple(Atom(i) for i in range(size))
            self._consts[key] = make_stage_family(
                self.cat, stage, lambda f: atoms, lambda f, g, v: v
            )
        return self._consts[key]

    def host_bool(self, level, stage):
        return self._const_elem(stage, 2)

    def host_unit(self, level, stage):
        return self._const_elem(stage, 1)

    def section_fn(self, level, stage, dom, cod):
        return self._sections(stage, dom, cod)

    def host_fn(self, level, stage, dom, cod):
        literal = self._sections(stage, dom, cod)
        if self.strict_fn:
            return literal
        renamed, _ = rename_family(self.cat, literal)
        return renamed

    def host_sg(self, level, stage, dom, cod):
        cat = self.cat
        dom_fam = self.decode_host(dom)
        memo: dict = {}

        def bfam(f, x):
            if (f, x) not in memo:
                memo[(f, x)] = self.decode_host(cod(f, x))
            return memo[(f, x)]

        def fiber_fun(f):
            ide = cat.identity[cat.src[f]]
            return tuple(
                Tup((x, y))
                for x in dom_fam.fiber(f)
                for y in bfam(f, x).fiber(ide)
            )

        def restrict_fun(f, g, pair):
            x, y = pair.items
            ide = cat.identity[cat.src[f]]
            return Tup(
                (dom_fam.restrict(f, g, x), bfam(f, x).restrict(ide, g, y))
            )

        return make_stage_family(cat, stage, fiber_fun, restrict_fun)

    def host_lift(self, x, level):
        # bounds only govern which families are enumerated; data is shared
        return x

    def universe_elem(self, named_level, stage):
        key = (named_level, stage)
        if key not in self._uni:
            self._uni[key] = self._build_universe_elem(named_level, stage)
        return self._uni[key]

    def _build_universe_elem(self, named_level, stage) -> StageFamily:
        from .. import codes as ct

        cat = self.cat
        by_stage: dict[str, dict[CanonVal, object]] = {}

        def codes_at(d: str) -> dict[CanonVal, object]:
            if d not in by_stage:
                table: dict[CanonVal, object] = {}
                for n, code in enumerate(
                    ct.enum_codes(self, named_level, d, self.uni_code_depth)
                ):
                    if n >= self.caps.codes_per_stage:
                        raise CapExceeded(
                            f"universe fiber at {d}", self.caps.codes_per_stage
                        )
                    table[ct.encode_code(self, code)] = code
                by_stage[d] = table
            return by_stage[d]

        def fiber_fun(f):
            return tuple(codes_at(cat.src[f]).keys())

        def restrict_fun(f, g, enc):
            code = codes_at(cat.src[f])[enc]
            return ct.encode_code(
                self, ct.restrict_code(self, cat.src[f], code, g)
            )

        return make_stage_family(cat, stage, fiber_fun, restrict_fun)

    def _sections(self, stage, dom, cod) -> StageFamily:
        """Dependent sections of a family over the decoded domain.

        The fiber at f holds every assignment of a value to each index
        (g, x in dom-fiber at f.g) that is natural in g; assignments are
        found by propagating each choice to all its forced consequences.
        """
        cat = self.cat
        dom_fam = self.decode_host(dom)
        memo: dict = {}

        def bfam(f, x):
            if (f, x) not in memo:
                memo[(f, x)] = self.decode_host(cod(f, x))
            return memo[(f, x)]

        def fiber_sections(f: str) -> list[CanonVal]:
            d = cat.src[f]
            keys = []
            for g in cat.arrows_into(d):
                for x in dom_fam.fiber(cat.after(f, g)):
                    keys.append((g, x))
            keys.sort(key=lambda k: (cat.arrow_index[k[0]], canon_key(k[1])))
            pools = {
                (g, x): bfam(cat.after(f, g), x).fiber(cat.identity[cat.src[g]])
                for g, x in keys
            }
            out: list[CanonVal] = []

            def propagate(assigned, start_key, start_val) -> bool:
                todo = [(start_key, start_val)]
                while todo:
                    (g, x), val = todo.pop()
                    old = assigned.get((g, x))
                    if old is not None:
                        if old != val:
                            return False
                        continue
                    if val not in pools[(g, x)]:
                        return False
                    assigned[(g, x)] = val
                    e = cat.src[g]
                    fg = cat.after(f, g)
                    for h in cat.arrows_into(e):
                        if cat.is_identity(h):
                            continue
                        key2 = (cat.after(g, h), dom_fam.restrict(fg, h, x))
                        val2 = bfam(fg, x).restrict(cat.identity[e], h, val)
                        todo.append((key2, val2))
                return True

            def fill(assigned, idx) -> None:
                while idx < len(keys) and keys[idx] in assigned:
                    idx += 1
                if idx == len(keys):
                    if len(out) >= self.caps.section_fiber:
                        raise CapExceeded(
                            f"section fiber at {f}", self.caps.section_fiber
                        )
                    out.append(
                        fun_tab(
                            (Tup((Atom(cat.arrow_index[g]), x)), v)
                            for (g, x), v in assigned.items()
                        )
                    )
                    return
                for val in pools[keys[idx]]:
                    trial = dict(assigned)
                    if propagate(trial, keys[idx], val):
                        fill(trial, idx + 1)

            fill({}, 0)
            return out

        secs = {f: fiber_sections(f) for f in cat.arrows_into(stage)}

        def restrict_fun(f, g, phi):
            fg = cat.after(f, g)
            rows = []
            for h in cat.arrows_into(cat.src[fg]):
                gh = cat.after(g, h)
                for x in dom_fam.fiber(cat.after(fg, h)):
                    rows.append(
                        (
                            Tup((Atom(cat.arrow_index[h]), x)),
                            phi.apply(Tup((Atom(cat.arrow_index[gh]), x))),
                        )
                    )
            return fun_tab(rows)

        return make_stage_family(cat, stage, lambda f: secs[f], restrict_fun)
