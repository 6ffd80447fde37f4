"""Typed conversion checking.

Conversion is directed by the type being compared at: functions and
pairs are compared by eta, any two elements of the unit type are equal,
and any two proofs of the same proposition are equal without inspection.
Codes are compared structurally at their universe.  Neutral spines are
compared elimination by elimination, synthesizing the type as the spine
unwinds; proof-typed components of blocked heads are skipped.

``types`` is the typing environment indexed by de Bruijn level; its
length is the current binder depth.
"""
from __future__ import annotations

from ..syntax import terms as t
from . import values as v
from .evaluate import apply_val, capply, el_val, fst_val, quote, snd_val

Types = tuple[v.Value, ...]


class _TypeSort:
    """Sort of a decoded stuck code; nothing eliminates a type further."""


def _erase_proofs(term: t.Term) -> t.Term:
    """Collapse every proof subterm to ``star``.

    Proofs are irrelevant, so syntactic comparison of normal forms must
    not look at them; the known proof positions are the proof formers
    themselves and the proof arguments of casts and absurdity
    eliminations.
    """
    match term:
        case (t.Star() | t.Refl(_) | t.Sym(_) | t.PiFst(_) | t.PiSnd(_, _)
              | t.SgFst(_) | t.SgSnd(_, _)):
            return t.Star()
        case t.Cast(src, tgt, _, body):
            return t.Cast(_erase_proofs(src), _erase_proofs(tgt), t.Star(),
                          _erase_proofs(body))
        case t.Exfalso(motive, _):
            return t.Exfalso(_erase_proofs(motive), t.Star())
        case _:
            fields = {
                name: _erase_proofs(val) if isinstance(val, t.Term) else val
                for name, val in vars(term).items() if name != "span"
            }
            return type(term)(**fields)


def _untyped_eq(types: Types, a: v.Value, b: v.Value) -> bool:
    # Fallback at stuck types, where no eta rule can apply: compare
    # syntactic normal forms up to proof content.
    return (_erase_proofs(quote(len(types), a))
            == _erase_proofs(quote(len(types), b)))


def conv(types: Types, a: v.Value, b: v.Value, ty: v.Value) -> bool:
    """Are ``a`` and ``b`` convertible at type ``ty``?"""
    match ty:
        case v.VTop() | v.VBot() | v.VObsEq(_, _, _):
            return True
        case v.VUnit():
            return True
        case v.VPi(dom, cod):
            x = v.fresh(len(types))
            return conv(types + (dom,), apply_val(a, x), apply_val(b, x),
                        capply(cod, x))
        case v.VSg(dom, cod):
            if not conv(types, fst_val(a), fst_val(b), dom):
                return False
            return conv(types, snd_val(a), snd_val(b),
                        capply(cod, fst_val(a)))
        case v.VBool():
            match (a, b):
                case (v.VTrue(), v.VTrue()) | (v.VFalse(), v.VFalse()):
                    return True
                case (v.Neutral(_, _), v.Neutral(_, _)):
                    return conv_neutral(types, a, b) is not None
            return False
        case v.VProp():
            return conv_prop(types, a, b)
        case v.VType(level):
            return conv_code(types, a, b, level)
        case v.Neutral(_, _):
            if isinstance(a, v.Neutral) and isinstance(b, v.Neutral):
                return conv_neutral(types, a, b) is not None
            return _untyped_eq(types, a, b)
    raise AssertionError(f"conversion at a non-type {ty!r}")


def conv_prop(types: Types, a: v.Value, b: v.Value) -> bool:
    """Compare two propositions (as elements of the type of propositions)."""
    match (a, b):
        case (v.VTop(), v.VTop()) | (v.VBot(), v.VBot()):
            return True
        case (v.VObsEq(i, l, r), v.VObsEq(j, l2, r2)):
            return (i == j and conv(types, l, l2, v.VType(i))
                    and conv(types, r, r2, v.VType(i)))
        case (v.Neutral(_, _), v.Neutral(_, _)):
            return conv_neutral(types, a, b) is not None
    return False


def conv_code(types: Types, a: v.Value, b: v.Value, level: int) -> bool:
    """Compare two codes at the given universe level."""
    match (a, b):
        case (v.SBool(), v.SBool()) | (v.SUnit(), v.SUnit()):
            return True
        case (v.SUni(j), v.SUni(k)):
            return j == k
        case (v.SPi(d1, c1), v.SPi(d2, c2)) | (v.SSg(d1, c1), v.SSg(d2, c2)):
            if type(a) is not type(b):
                return False
            if not conv_code(types, d1, d2, level):
                return False
            x = v.fresh(len(types))
            return conv_code(types + (el_val(d1),), capply(c1, x),
                             capply(c2, x), level)
        case (v.SLift(u), v.SLift(w)):
            return conv_code(types, u, w, level - 1)
        case (v.Neutral(_, _), v.Neutral(_, _)):
            return conv_neutral(types, a, b) is not None
    return False


def conv_ty(types: Types, a: v.Value, b: v.Value) -> bool:
    """Compare two types."""
    match (a, b):
        case (v.VBool(), v.VBool()) | (v.VUnit(), v.VUnit()):
            return True
        case (v.VProp(), v.VProp()) | (v.VTop(), v.VTop()) | (v.VBot(), v.VBot()):
            return True
        case (v.VType(j), v.VType(k)):
            return j == k
        case (v.VPi(d1, c1), v.VPi(d2, c2)) | (v.VSg(d1, c1), v.VSg(d2, c2)):
            if type(a) is not type(b):
                return False
            if not conv_ty(types, d1, d2):
                return False
            x = v.fresh(len(types))
            return conv_ty(types + (d1,), capply(c1, x), capply(c2, x))
        case (v.VObsEq(i, l, r), v.VObsEq(j, l2, r2)):
            return (i == j and conv(types, l, l2, v.VType(i))
                    and conv(types, r, r2, v.VType(i)))
        case (v.Neutral(_, _), v.Neutral(_, _)):
            return conv_neutral(types, a, b) is not None
    return False


def conv_neutral(types: Types, n1: v.Value, n2: v.Value):
    """Compare two neutrals; return the synthesized type of the spine
    (or a sort marker after decoding), or None when they differ."""
    assert isinstance(n1, v.Neutral) and isinstance(n2, v.Neutral)
    ty = _conv_head(types, n1.head, n2.head)
    if ty is None:
        return None
    if len(n1.spine) != len(n2.spine):
        return None
    for i, (e1, e2) in enumerate(zip(n1.spine, n2.spine)):
        prefix = v.Neutral(n1.head, n1.spine[:i])
        ty = _conv_elim(types, e1, e2, ty, prefix)
        if ty is None:
            return None
    return ty


def _conv_head(types: Types, h1: v.Head, h2: v.Head):
    match (h1, h2):
        case (v.HVar(l1), v.HVar(l2)):
            return types[l1] if l1 == l2 else None
        case (v.HCast(s1, t1, _, b1), v.HCast(s2, t2, _, b2)):
            # Proof components are irrelevant and skipped.
            if not _untyped_eq(types, s1, s2):
                return None
            if not _untyped_eq(types, t1, t2):
                return None
            if not conv(types, b1, b2, el_val(s1)):
                return None
            return el_val(t1)
        case (v.HExfalso(m1, _), v.HExfalso(m2, _)):
            return m1 if conv_ty(types, m1, m2) else None
    return None


def _conv_elim(types: Types, e1: v.Elim, e2: v.Elim, ty, prefix: v.Neutral):
    if isinstance(ty, _TypeSort):
        return None
    match (e1, e2):
        case (v.EApp(a1), v.EApp(a2)):
            if not isinstance(ty, v.VPi):
                return None
            if not conv(types, a1, a2, ty.dom):
                return None
            return capply(ty.cod, a1)
        case (v.EFst(), v.EFst()):
            return ty.dom if isinstance(ty, v.VSg) else None
        case (v.ESnd(), v.ESnd()):
            if not isinstance(ty, v.VSg):
                return None
            return capply(ty.cod, fst_val(prefix))
        case (v.EBoolElim(m1, t1, f1), v.EBoolElim(m2, t2, f2)):
            x = v.fresh(len(types))
            if not conv_ty(types + (v.VBool(),), capply(m1, x), capply(m2, x)):
                return None
            if not conv(types, t1, t2, capply(m1, v.VTrue())):
                return None
            if not conv(types, f1, f2, capply(m1, v.VFalse())):
                return None
            return capply(m1, prefix)
        case (v.EEl(), v.EEl()):
            return _TypeSort() if isinstance(ty, v.VType) else None
    return None
