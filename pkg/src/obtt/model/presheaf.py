"""Finite presheaves on a finite category, and their exhaustive enumeration.

A presheaf assigns a finite set of canonical values to every object and
a restriction function to every arrow, contravariantly.  ``enum_presheaves``
streams every presheaf whose fibers are initial segments of the atoms,
in a fixed deterministic order; the same enumerator is used for host
stage sets (on slice categories), for base presheaves, and for families
over a presheaf (on its category of elements).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterator

from .canon import Atom, CanonVal, canon_key
from .fincat import FinCat


@dataclass(frozen=True)
class Presheaf:
    cat: FinCat
    # (object, sorted fiber)
    fibers: tuple[tuple[str, tuple[CanonVal, ...]], ...]
    # (arrow id, graph of the restriction fiber(dst) -> fiber(src))
    maps: tuple[tuple[str, tuple[tuple[CanonVal, CanonVal], ...]], ...]

    @cached_property
    def _fiber(self) -> dict[str, tuple[CanonVal, ...]]:
        return dict(self.fibers)

    @cached_property
    def _map(self) -> dict[str, dict[CanonVal, CanonVal]]:
        return {a: dict(rows) for a, rows in self.maps}

    def fiber(self, obj: str) -> tuple[CanonVal, ...]:
        return self._fiber[obj]

    def restrict(self, arrow: str, value: CanonVal) -> CanonVal:
        return self._map[arrow][value]

    def validate(self) -> None:
        cat = self.cat
        assert tuple(o for o, _ in self.fibers) == cat.objects
        assert tuple(a for a, _ in self.maps) == cat.arrow_ids
        for a in cat.arrow_ids:
            graph = self._map[a]
            assert set(graph) == set(self.fiber(cat.dst[a])), a
            for v in graph.values():
                assert v in self.fiber(cat.src[a]), a
        for obj in cat.objects:
            ident = cat.identity[obj]
            for x in self.fiber(obj):
                assert self.restrict(ident, x) == x, obj
        for g in cat.arrow_ids:
            for f in cat.arrow_ids:
                if cat.src[g] != cat.dst[f]:
                    continue
                for x in self.fiber(cat.dst[g]):
                    assert self.restrict(cat.after(g, f), x) == self.restrict(
                        f, self.restrict(g, x)
                    ), (g, f)


def make_presheaf(cat: FinCat, fibers, restrict) -> Presheaf:
    """Package fiber/restriction functions as a validated Presheaf."""
    fib = tuple(
        (obj, tuple(sorted(fibers(obj), key=canon_key))) for obj in cat.objects
    )
    fib_of = dict(fib)
    maps = tuple(
        (a, tuple((x, restrict(a, x)) for x in fib_of[cat.dst[a]]))
        for a in cat.arrow_ids
    )
    psh = Presheaf(cat, fib, maps)
    psh.validate()
    return psh


def representable(cat: FinCat, obj: str) -> Presheaf:
    """The presheaf of arrows into obj; elements are atoms by arrow index."""
    into = {a: Atom(i) for i, a in enumerate(cat.arrows_into(obj))}
    rev = {v: a for a, v in into.items()}

    def fibers(c):
        return tuple(into[a] for a in cat.arrows_into(obj) if cat.src[a] == c)

    def restrict(g, x):
        return into[cat.after(rev[x], g)]

    return make_presheaf(cat, fibers, restrict)


def enum_presheaves(cat: FinCat, bound: int) -> Iterator[Presheaf]:
    """Stream all presheaves with fibers {Atom(0)..Atom(k-1)}, k <= bound.

    Deterministic order: fiber size vectors ascend lexicographically in
    the category's object order, then restriction choices ascend with the
    last arrow varying fastest.  Functoriality is enforced by pruning as
    each arrow's restriction is chosen.
    """
    non_id = [a for a in cat.arrow_ids if not cat.is_identity(a)]
    for sizes in product(range(bound + 1), repeat=len(cat.objects)):
        size_of = dict(zip(cat.objects, sizes))
        fibers = {
            obj: tuple(Atom(i) for i in range(size_of[obj])) for obj in cat.objects
        }
        yield from _fill_maps(cat, fibers, non_id, {}, 0)


def _fill_maps(cat, fibers, non_id, chosen, idx) -> Iterator[Presheaf]:
    if idx == len(non_id):
        full = dict(chosen)
        for obj in cat.objects:
            ident = cat.identity[obj]
            full[ident] = {x: x for x in fibers[obj]}
        yield Presheaf(
            cat,
            tuple((obj, fibers[obj]) for obj in cat.objects),
            tuple(
                (a, tuple((x, full[a][x]) for x in fibers[cat.dst[a]]))
                for a in cat.arrow_ids
            ),
        )
        return
    arrow = non_id[idx]
    dom = fibers[cat.dst[arrow]]
    cod = fibers[cat.src[arrow]]
    if dom and not cod:
        return
    for values in product(cod, repeat=len(dom)):
        graph = dict(zip(dom, values))
        trial = dict(chosen)
        trial[arrow] = graph
        if _coherent(cat, fibers, trial, arrow):
            yield from _fill_maps(cat, fibers, non_id, trial, idx + 1)


def _coherent(cat, fibers, chosen, new_arrow) -> bool:
    """Check every composition law instance whose arrows are all chosen."""

    def lookup(a, x):
        if cat.is_identity(a):
            return x
        graph = chosen.get(a)
        return None if graph is None else graph[x]

    for g in cat.arrow_ids:
        for f in cat.arrow_ids:
            if cat.src[g] != cat.dst[f]:
                continue
            gf = cat.after(g, f)
            if new_arrow not in (g, f, gf):
                continue
            for x in fibers[cat.dst[g]]:
                via_g = lookup(g, x)
                if via_g is None:
                    break
                step = lookup(f, via_g)
                direct = lookup(gf, x)
                if step is None or direct is None:
                    break
                if step != direct:
                    return False
    return True


def count_presheaves(cat: FinCat, bound: int) -> int:
    return sum(1 for _ in enum_presheaves(cat, bound))
