"""Independent oracle implementations used by the tests.

Everything here deliberately recomputes results by a different route
than the package: full products with filters instead of incremental
propagation, term-level rewriting instead of value-level lifting.
"""
from __future__ import annotations

import random
from itertools import product

from obtt.codes import (
    BoolCode,
    CodeTree,
    ConstFamily,
    FnCode,
    SgCode,
    TabFamily,
    UniCode,
    UnitCode,
    UpCode,
    code_eq,
    restrict_code,
)
from obtt.model.canon import canon_key
from obtt.syntax import terms as t


# -- seeded kernel code generator ---------------------------------------------

def gen_code_term(rng: random.Random, level: int, depth: int,
                  uni_binders: tuple[int, ...] = ()) -> t.Term:
    """A random closed code term checking against ``V level``.

    ``uni_binders`` lists, innermost first, the levels of enclosing
    binder variables that stand for codes (introduced by a ``cUni``
    domain); such a variable is reachable through enough lifts.
    """
    leaves: list[t.Term] = [t.CBool(), t.CUnit()]
    leaves += [t.CUni(k) for k in range(level)]
    for ix, var_level in enumerate(uni_binders):
        if var_level <= level:
            term: t.Term = t.Var(ix)
            for _ in range(level - var_level):
                term = t.CLift(term)
            leaves.append(term)
    if depth == 0:
        return rng.choice(leaves)
    roll = rng.random()
    if roll < 0.25:
        return rng.choice(leaves)
    if roll < 0.40 and level >= 1:
        return t.CLift(gen_code_term(rng, level - 1, depth - 1, uni_binders))
    former = t.CPi if rng.random() < 0.5 else t.CSg
    if rng.random() < 0.3 and level >= 1:
        # a universe domain lets the codomain mention the bound code
        dom_level = rng.randrange(level)
        dom: t.Term = t.CUni(dom_level)
        inner = (dom_level,) + tuple(lv for lv in uni_binders)
        cod = gen_code_term(rng, level, depth - 1, inner)
        return former(dom, cod)
    dom = gen_code_term(rng, level, depth - 1, uni_binders)
    cod = gen_code_term(rng, level, depth - 1, uni_binders)
    # the new binder is not a code variable, so code vars shift past it
    return former(dom, _shift_vars(cod, 0))


def _shift_vars(term: t.Term, cutoff: int) -> t.Term:
    """Shift free variable indices up by one (entering a dead binder)."""
    match term:
        case t.Var(ix):
            return t.Var(ix + 1) if ix >= cutoff else term
        case t.CLift(body):
            return t.CLift(_shift_vars(body, cutoff))
        case t.CPi(dom, cod):
            return t.CPi(_shift_vars(dom, cutoff), _shift_vars(cod, cutoff + 1))
        case t.CSg(dom, cod):
            return t.CSg(_shift_vars(dom, cutoff), _shift_vars(cod, cutoff + 1))
        case _:
            return term


# -- term-level lift oracle ---------------------------------------------------

_CANONICAL_HEADS = (t.CBool, t.CUnit, t.CUni, t.CPi, t.CSg)


def lift_term_oracle(nf: t.Term) -> t.Term:
    """Push one lift through a beta-normal code term, syntactically."""
    match nf:
        case t.CBool() | t.CUnit() | t.CUni(_):
            return nf
        case t.CPi(dom, cod):
            return t.CPi(lift_term_oracle(dom), lift_term_oracle(cod))
        case t.CSg(dom, cod):
            return t.CSg(lift_term_oracle(dom), lift_term_oracle(cod))
        case _:
            return t.CLift(nf)


def lift_heads_ok(nf: t.Term) -> bool:
    """No lift applied to a canonical code constructor anywhere in ``nf``."""
    match nf:
        case t.CLift(body):
            if isinstance(body, _CANONICAL_HEADS):
                return False
            return lift_heads_ok(body)
        case _:
            return all(
                lift_heads_ok(val)
                for val in vars(nf).values()
                if isinstance(val, t.Term)
            )


# -- brute-force presheaf counter ---------------------------------------------

def count_presheaves_brute(cat, bound: int) -> int:
    """Full product over all restriction graphs, filtered by the laws."""
    non_id = [a for a in cat.arrow_ids if not cat.is_identity(a)]
    total = 0
    for sizes in product(range(bound + 1), repeat=len(cat.objects)):
        size_of = dict(zip(cat.objects, sizes))
        graph_choices = []
        for a in non_id:
            dom = range(size_of[cat.dst[a]])
            cod = range(size_of[cat.src[a]])
            graph_choices.append([dict(zip(dom, vals))
                                  for vals in product(cod, repeat=len(dom))])
        for graphs in product(*graph_choices):
            assign = dict(zip(non_id, graphs))

            def app(arrow, x):
                return x if cat.is_identity(arrow) else assign[arrow][x]

            ok = True
            for g in cat.arrow_ids:
                for f in cat.arrow_ids:
                    if cat.src[g] != cat.dst[f]:
                        continue
                    gf = cat.after(g, f)
                    for x in range(size_of[cat.dst[g]]):
                        if app(f, app(g, x)) != app(gf, x):
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    break
            total += ok
    return total


# -- brute-force code counter -------------------------------------------------

def count_codes_brute(host, level: int, stage: str, depth: int) -> int:
    """Count codes of depth <= depth by full family products with a
    naturality filter, recursively.  Independent of the streaming
    enumerator's strata and worklist propagation."""
    return len(_codes_brute(host, level, stage, depth))


def _codes_brute(host, level: int, stage: str, depth: int) -> list[CodeTree]:
    out: list[CodeTree] = [
        UpCode(level, x) for x in host.elements(level, stage)
    ]
    out.append(BoolCode(level))
    out.append(UnitCode(level))
    out += [UniCode(level, k) for k in range(level)]
    if depth == 0:
        return out
    smaller = _codes_brute(host, level, stage, depth - 1)
    for former in (FnCode, SgCode):
        for dom in smaller:
            for fam in _families_brute(host, level, stage, dom, depth - 1):
                out.append(former(level, dom, fam))
    seen = []
    for c in out:
        if not any(code_eq(host, c, d) for d in seen):
            seen.append(c)
    return seen


def _families_brute(host, level, stage, dom, depth):
    from obtt.codes import decode

    values = _codes_brute(host, level, stage, depth)
    fams = [ConstFamily(body) for body in values]
    dom_fam = host.decode_host(decode(host, stage, dom))
    keys = []
    for g in host.arrows_into(stage):
        for x in dom_fam.fiber(g):
            keys.append((g, x))
    keys.sort(key=lambda k: (host.arrow_pos(k[0]), canon_key(k[1])))
    pools = [
        _codes_brute(host, level, host.arrow_src(g), depth) for g, _ in keys
    ]
    for combo in product(*pools):
        table = dict(zip(keys, combo))
        if _natural(host, stage, dom_fam, table):
            fams.append(TabFamily(tuple((key, table[key]) for key in keys)))
    return fams


def _natural(host, stage, dom_fam, table) -> bool:
    for (g, x), val in table.items():
        e = host.arrow_src(g)
        for h in host.arrows_into(e):
            if host.is_identity(h):
                continue
            derived_key = (host.after(g, h), dom_fam.restrict(g, h, x))
            want = restrict_code(host, e, val, h)
            if not code_eq(host, table[derived_key], want):
                return False
    return True
