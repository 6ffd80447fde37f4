"""Evaluation, the cast operator, and quotation back to terms.

Decoding computes on canonical codes: ``El`` of a function code is a
function type over the decoded domain, ``El`` of a lifted code is ``El``
of the code itself, and ``El`` of a universe code is that universe.
Lifting likewise pushes through every code constructor and survives only
on stuck codes.  ``cast_step`` computes by recursion on the source and
target code heads and gets stuck, as a value, on anything else; the
recursive occurrences of cast use the placeholder proof ``VStar`` since
proofs are definitionally irrelevant.
"""
from __future__ import annotations

from typing import Mapping

from ..syntax import terms as t
from . import values as v


def capply(clos: v.ClosureLike, arg: v.Value) -> v.Value:
    if isinstance(clos, v.Builtin):
        return clos.fn(arg)
    return eval_term(clos.body, clos.env + (arg,), clos.globals)


def apply_val(fn: v.Value, arg: v.Value) -> v.Value:
    match fn:
        case v.VLam(clos):
            return capply(clos, arg)
        case v.Neutral(head, spine):
            return v.Neutral(head, spine + (v.EApp(arg),))
    raise AssertionError(f"applied a non-function value {fn!r}")


def fst_val(pair: v.Value) -> v.Value:
    match pair:
        case v.VPair(a, _):
            return a
        case v.Neutral(head, spine):
            return v.Neutral(head, spine + (v.EFst(),))
    raise AssertionError("first projection of a non-pair value")


def snd_val(pair: v.Value) -> v.Value:
    match pair:
        case v.VPair(_, b):
            return b
        case v.Neutral(head, spine):
            return v.Neutral(head, spine + (v.ESnd(),))
    raise AssertionError("second projection of a non-pair value")


def bool_elim_val(motive: v.ClosureLike, on_true: v.Value, on_false: v.Value,
                  scrut: v.Value) -> v.Value:
    match scrut:
        case v.VTrue():
            return on_true
        case v.VFalse():
            return on_false
        case v.Neutral(head, spine):
            return v.Neutral(head, spine + (v.EBoolElim(motive, on_true, on_false),))
    raise AssertionError("boolean elimination of a non-boolean value")


def el_val(code: v.Value) -> v.Value:
    """Decode a code value to a type value."""
    match code:
        case v.SBool():
            return v.VBool()
        case v.SUnit():
            return v.VUnit()
        case v.SPi(dom, cod):
            return v.VPi(el_val(dom), v.Builtin(lambda a: el_val(capply(cod, a))))
        case v.SSg(dom, cod):
            return v.VSg(el_val(dom), v.Builtin(lambda a: el_val(capply(cod, a))))
        case v.SUni(level):
            return v.VType(level)
        case v.SLift(body):
            # Decoding ignores lifts, even stuck ones.
            return el_val(body)
        case v.Neutral(head, spine):
            return v.Neutral(head, spine + (v.EEl(),))
    raise AssertionError(f"decoded a non-code value {code!r}")


def lift_val(code: v.Value) -> v.Value:
    """Lift a code value one level, rewriting through constructors."""
    match code:
        case v.SBool() | v.SUnit() | v.SUni(_):
            return code
        case v.SPi(dom, cod):
            return v.SPi(lift_val(dom), v.Builtin(lambda a: lift_val(capply(cod, a))))
        case v.SSg(dom, cod):
            return v.SSg(lift_val(dom), v.Builtin(lambda a: lift_val(capply(cod, a))))
        case v.SLift(_) | v.Neutral(_, _):
            return v.SLift(code)
    raise AssertionError(f"lifted a non-code value {code!r}")


def cast_step(src: v.Value, tgt: v.Value, prf: v.Value, body: v.Value) -> v.Value:
    match (src, tgt):
        case (v.SBool(), v.SBool()):
            return body
        case (v.SUnit(), v.SUnit()):
            return v.VTt()
        case (v.SUni(j), v.SUni(k)) if j == k:
            return body
        case (v.SPi(a0, b0), v.SPi(a1, b1)):
            def casted(arg1: v.Value) -> v.Value:
                arg0 = cast_step(a1, a0, v.VStar(), arg1)
                return cast_step(capply(b0, arg0), capply(b1, arg1), v.VStar(),
                                 apply_val(body, arg0))
            return v.VLam(v.Builtin(casted))
        case (v.SSg(a0, b0), v.SSg(a1, b1)):
            first0 = fst_val(body)
            first1 = cast_step(a0, a1, v.VStar(), first0)
            second1 = cast_step(capply(b0, first0), capply(b1, first1), v.VStar(),
                                snd_val(body))
            return v.VPair(first1, second1)
    return v.Neutral(v.HCast(src, tgt, prf, body), ())


def eval_term(term: t.Term, env: tuple[v.Value, ...],
              globs: Mapping[str, v.DefEntry]) -> v.Value:
    ev = lambda x: eval_term(x, env, globs)
    clos = lambda body: v.Closure(env, body, globs)
    match term:
        case t.Var(ix):
            return env[len(env) - 1 - ix]
        case t.Ref(name):
            return globs[name].value
        case t.VType(k):
            return v.VType(k)
        case t.CBool():
            return v.SBool()
        case t.CUnit():
            return v.SUnit()
        case t.CPi(dom, cod):
            return v.SPi(ev(dom), clos(cod))
        case t.CSg(dom, cod):
            return v.SSg(ev(dom), clos(cod))
        case t.CUni(k):
            return v.SUni(k)
        case t.CLift(body):
            return lift_val(ev(body))
        case t.El(code):
            return el_val(ev(code))
        case t.Pi(dom, cod):
            return v.VPi(ev(dom), clos(cod))
        case t.Sg(dom, cod):
            return v.VSg(ev(dom), clos(cod))
        case t.BoolT():
            return v.VBool()
        case t.UnitT():
            return v.VUnit()
        case t.PropT():
            return v.VProp()
        case t.TopP():
            return v.VTop()
        case t.BotP():
            return v.VBot()
        case t.ObsEq(k, lhs, rhs):
            return v.VObsEq(k, ev(lhs), ev(rhs))
        case t.Lam(body):
            return v.VLam(clos(body))
        case t.App(fn, arg):
            return apply_val(ev(fn), ev(arg))
        case t.Pair(a, b):
            return v.VPair(ev(a), ev(b))
        case t.Fst(p):
            return fst_val(ev(p))
        case t.Snd(p):
            return snd_val(ev(p))
        case t.Tt():
            return v.VTt()
        case t.TrueLit():
            return v.VTrue()
        case t.FalseLit():
            return v.VFalse()
        case t.BoolElim(motive, on_true, on_false, scrut):
            return bool_elim_val(clos(motive), ev(on_true), ev(on_false), ev(scrut))
        case t.Star():
            return v.VStar()
        case t.Exfalso(motive, prf):
            return v.Neutral(v.HExfalso(ev(motive), ev(prf)), ())
        case t.PiFst(prf):
            return v.VPiFst(ev(prf))
        case t.PiSnd(prf, arg):
            return v.VPiSnd(ev(prf), ev(arg))
        case t.SgFst(prf):
            return v.VSgFst(ev(prf))
        case t.SgSnd(prf, arg):
            return v.VSgSnd(ev(prf), ev(arg))
        case t.Sym(prf):
            return v.VSym(ev(prf))
        case t.Refl(code):
            return v.VRefl(ev(code))
        case t.Cast(src, tgt, prf, body):
            return cast_step(ev(src), ev(tgt), ev(prf), ev(body))
    raise AssertionError(f"unevaluable term {term!r}")


# -- quotation ----------------------------------------------------------------

def quote_clos(depth: int, clos: v.ClosureLike) -> t.Term:
    return quote(depth + 1, capply(clos, v.fresh(depth)))


def quote(depth: int, value: v.Value) -> t.Term:
    """Read a value back as a beta-normal term at the given binder depth."""
    q = lambda x: quote(depth, x)
    match value:
        case v.Neutral(head, spine):
            match head:
                case v.HVar(level):
                    out: t.Term = t.Var(depth - 1 - level)
                case v.HCast(src, tgt, prf, body):
                    out = t.Cast(q(src), q(tgt), q(prf), q(body))
                case v.HExfalso(motive, prf):
                    out = t.Exfalso(q(motive), q(prf))
            for elim in spine:
                match elim:
                    case v.EApp(arg):
                        out = t.App(out, q(arg))
                    case v.EFst():
                        out = t.Fst(out)
                    case v.ESnd():
                        out = t.Snd(out)
                    case v.EBoolElim(motive, on_true, on_false):
                        out = t.BoolElim(quote_clos(depth, motive),
                                         q(on_true), q(on_false), out)
                    case v.EEl():
                        out = t.El(out)
            return out
        case v.VLam(clos):
            return t.Lam(quote_clos(depth, clos))
        case v.VPair(a, b):
            return t.Pair(q(a), q(b))
        case v.VTrue():
            return t.TrueLit()
        case v.VFalse():
            return t.FalseLit()
        case v.VTt():
            return t.Tt()
        case v.VStar():
            return t.Star()
        case v.VRefl(code):
            return t.Refl(q(code))
        case v.VSym(prf):
            return t.Sym(q(prf))
        case v.VPiFst(prf):
            return t.PiFst(q(prf))
        case v.VPiSnd(prf, arg):
            return t.PiSnd(q(prf), q(arg))
        case v.VSgFst(prf):
            return t.SgFst(q(prf))
        case v.VSgSnd(prf, arg):
            return t.SgSnd(q(prf), q(arg))
        case v.VPi(dom, cod):
            return t.Pi(q(dom), quote_clos(depth, cod))
        case v.VSg(dom, cod):
            return t.Sg(q(dom), quote_clos(depth, cod))
        case v.VBool():
            return t.BoolT()
        case v.VUnit():
            return t.UnitT()
        case v.VType(k):
            return t.VType(k)
        case v.VProp():
            return t.PropT()
        case v.VTop():
            return t.TopP()
        case v.VBot():
            return t.BotP()
        case v.VObsEq(k, lhs, rhs):
            return t.ObsEq(k, q(lhs), q(rhs))
        case v.SBool():
            return t.CBool()
        case v.SUnit():
            return t.CUnit()
        case v.SPi(dom, cod):
            return t.CPi(q(dom), quote_clos(depth, cod))
        case v.SSg(dom, cod):
            return t.CSg(q(dom), quote_clos(depth, cod))
        case v.SUni(k):
            return t.CUni(k)
        case v.SLift(body):
            return t.CLift(q(body))
    raise AssertionError(f"unquotable value {value!r}")
