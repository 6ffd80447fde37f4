"""Bidirectional type checking.

Universe levels are externally fixed naturals up to a configurable
maximum.  There is no implicit cumulativity: a code inhabits exactly one
universe in inference mode (the least level its constructors admit), and
checking mode distributes the expected level through code constructors,
so ``cUni k`` checks at level ``j`` exactly when ``k < j`` and ``cLift``
moves a level-``i`` code to level ``i + 1``.

Codes are not types; a code ``c`` is used as a type by decoding it with
``El c``.  Propositions are types, live outside the code universes, and
are also first-class elements of ``Prop``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..syntax import printer, terms as t
from . import values as v
from .convert import conv, conv_ty
from .evaluate import capply, cast_step, el_val, eval_term, fst_val, quote

DEFAULT_MAX_LEVEL = 3


class CheckError(Exception):
    """Type error, with a source position when one is known."""

    def __init__(self, msg: str, span: t.Span | None):
        super().__init__(f"{span}: {msg}" if span is not None else msg)
        self.msg = msg
        self.span = span


@dataclass(frozen=True)
class Ctx:
    """Typing context; ``types`` and ``env`` are indexed by de Bruijn level."""

    max_level: int = DEFAULT_MAX_LEVEL
    types: tuple[v.Value, ...] = ()
    env: tuple[v.Value, ...] = ()
    names: tuple[str, ...] = ()
    globals: dict[str, v.DefEntry] = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return len(self.types)

    def bind(self, ty: v.Value, name: str = "") -> "Ctx":
        return Ctx(self.max_level, self.types + (ty,),
                   self.env + (v.fresh(self.depth),),
                   self.names + (name or f"x{self.depth}",), self.globals)

    def eval(self, term: t.Term) -> v.Value:
        return eval_term(term, self.env, self.globals)

    def show(self, value: v.Value) -> str:
        return printer.print_term(quote(self.depth, value), self.names)


def _fail(msg: str, term: t.Term) -> CheckError:
    return CheckError(msg, term.span)


def is_type(ctx: Ctx, term: t.Term) -> v.Value:
    """Check that ``term`` is a type and return its value."""
    match term:
        case t.VType(k):
            if k > ctx.max_level:
                raise _fail(f"universe level {k} exceeds the maximum "
                            f"level {ctx.max_level}", term)
        case t.Pi(dom, cod) | t.Sg(dom, cod):
            dom_ty = is_type(ctx, dom)
            is_type(ctx.bind(dom_ty), cod)
        case t.BoolT() | t.UnitT() | t.PropT() | t.TopP() | t.BotP():
            pass
        case t.ObsEq(k, lhs, rhs):
            if k > ctx.max_level:
                raise _fail(f"universe level {k} exceeds the maximum "
                            f"level {ctx.max_level}", term)
            check(ctx, lhs, v.VType(k))
            check(ctx, rhs, v.VType(k))
        case t.El(code):
            code_ty = infer(ctx, code)
            if not isinstance(code_ty, v.VType):
                raise _fail("El expects a code, but its argument has type "
                            f"{ctx.show(code_ty)}", term)
        case _:
            ty = infer(ctx, term)
            if not isinstance(ty, v.VProp):
                raise _fail(f"not a type: this term has type {ctx.show(ty)}; "
                            "only codes decoded with El, propositions, and "
                            "the primitive type formers are types", term)
    return ctx.eval(term)


def infer(ctx: Ctx, term: t.Term) -> v.Value:
    """Synthesize the type of ``term``."""
    match term:
        case t.Var(ix):
            if not 0 <= ix < ctx.depth:
                raise _fail(f"variable index {ix} out of scope", term)
            return ctx.types[ctx.depth - 1 - ix]
        case t.Ref(name):
            entry = ctx.globals.get(name)
            if entry is None:
                raise _fail(f"unknown definition {name!r}", term)
            return entry.ty
        case t.TrueLit() | t.FalseLit():
            return v.VBool()
        case t.Tt():
            return v.VUnit()
        case t.Star():
            return v.VTop()
        case t.CBool() | t.CUnit():
            return v.VType(0)
        case t.CPi(dom, cod) | t.CSg(dom, cod):
            dom_ty = infer(ctx, dom)
            if not isinstance(dom_ty, v.VType):
                raise _fail("a code constructor needs a code domain, got "
                            f"{ctx.show(dom_ty)}", term)
            body_ctx = ctx.bind(el_val(ctx.eval(dom)))
            check(body_ctx, cod, v.VType(dom_ty.level))
            return dom_ty
        case t.CUni(k):
            if k + 1 > ctx.max_level:
                raise _fail(f"universe level violation: cUni{k} needs level "
                            f"{k + 1}, above the maximum {ctx.max_level}", term)
            return v.VType(k + 1)
        case t.CLift(body):
            body_ty = infer(ctx, body)
            if not isinstance(body_ty, v.VType):
                raise _fail(f"cLift expects a code, got {ctx.show(body_ty)}",
                            term)
            if body_ty.level + 1 > ctx.max_level:
                raise _fail(f"universe level violation: lifting past the "
                            f"maximum level {ctx.max_level}", term)
            return v.VType(body_ty.level + 1)
        case t.TopP() | t.BotP():
            return v.VProp()
        case t.ObsEq(k, lhs, rhs):
            if k > ctx.max_level:
                raise _fail(f"universe level {k} exceeds the maximum "
                            f"level {ctx.max_level}", term)
            check(ctx, lhs, v.VType(k))
            check(ctx, rhs, v.VType(k))
            return v.VProp()
        case t.Lam(_):
            raise _fail("cannot infer the type of a bare function literal; "
                        "give it an annotation", term)
        case t.Pair(_, _):
            raise _fail("cannot infer the type of a bare pair; "
                        "give it an annotation", term)
        case t.App(fn, arg):
            fn_ty = infer(ctx, fn)
            if not isinstance(fn_ty, v.VPi):
                raise _fail(f"applied a non-function of type {ctx.show(fn_ty)}",
                            term)
            check(ctx, arg, fn_ty.dom)
            return capply(fn_ty.cod, ctx.eval(arg))
        case t.Fst(pair):
            pair_ty = infer(ctx, pair)
            if not isinstance(pair_ty, v.VSg):
                raise _fail(f"projected a non-pair of type {ctx.show(pair_ty)}",
                            term)
            return pair_ty.dom
        case t.Snd(pair):
            pair_ty = infer(ctx, pair)
            if not isinstance(pair_ty, v.VSg):
                raise _fail(f"projected a non-pair of type {ctx.show(pair_ty)}",
                            term)
            return capply(pair_ty.cod, fst_val(ctx.eval(pair)))
        case t.BoolElim(motive, on_true, on_false, scrut):
            motive_ctx = ctx.bind(v.VBool())
            is_type(motive_ctx, motive)
            mclos = v.Closure(ctx.env, motive, ctx.globals)
            check(ctx, on_true, capply(mclos, v.VTrue()))
            check(ctx, on_false, capply(mclos, v.VFalse()))
            check(ctx, scrut, v.VBool())
            return capply(mclos, ctx.eval(scrut))
        case t.Exfalso(motive, prf):
            motive_ty = is_type(ctx, motive)
            check(ctx, prf, v.VBot())
            return motive_ty
        case t.Refl(code):
            code_ty = infer(ctx, code)
            if not isinstance(code_ty, v.VType):
                raise _fail(f"refl expects a code, got {ctx.show(code_ty)}",
                            term)
            value = ctx.eval(code)
            return v.VObsEq(code_ty.level, value, value)
        case t.Sym(prf):
            prf_ty = infer(ctx, prf)
            if not isinstance(prf_ty, v.VObsEq):
                raise _fail("sym expects a code equality proof, got "
                            f"{ctx.show(prf_ty)}", term)
            return v.VObsEq(prf_ty.level, prf_ty.rhs, prf_ty.lhs)
        case t.PiFst(prf):
            level, (l, r) = _decompose(ctx, term, prf, v.SPi, "function")
            return v.VObsEq(level, l.dom, r.dom)
        case t.PiSnd(prf, arg):
            level, (l, r) = _decompose(ctx, term, prf, v.SPi, "function")
            check(ctx, arg, el_val(l.dom))
            value = ctx.eval(arg)
            casted = cast_step(l.dom, r.dom, v.VStar(), value)
            return v.VObsEq(level, capply(l.cod, value), capply(r.cod, casted))
        case t.SgFst(prf):
            level, (l, r) = _decompose(ctx, term, prf, v.SSg, "pair")
            return v.VObsEq(level, l.dom, r.dom)
        case t.SgSnd(prf, arg):
            level, (l, r) = _decompose(ctx, term, prf, v.SSg, "pair")
            check(ctx, arg, el_val(l.dom))
            value = ctx.eval(arg)
            casted = cast_step(l.dom, r.dom, v.VStar(), value)
            return v.VObsEq(level, capply(l.cod, value), capply(r.cod, casted))
        case t.Cast(src, tgt, prf, body):
            src_ty = infer(ctx, src)
            if not isinstance(src_ty, v.VType):
                raise _fail(f"cast expects codes, got {ctx.show(src_ty)}", term)
            check(ctx, tgt, v.VType(src_ty.level))
            src_val = ctx.eval(src)
            tgt_val = ctx.eval(tgt)
            check(ctx, prf, v.VObsEq(src_ty.level, src_val, tgt_val))
            check(ctx, body, el_val(src_val))
            return el_val(tgt_val)
        case t.VType(_) | t.El(_) | t.Pi(_, _) | t.Sg(_, _) | t.BoolT() \
                | t.UnitT() | t.PropT():
            raise _fail("a type cannot be used as a term here; only "
                        "propositions are both", term)
    raise _fail(f"cannot infer a type for {printer.print_term(term, ctx.names)}",
                term)


def _decompose(ctx: Ctx, at: t.Term, prf: t.Term, head: type, what: str):
    """Require ``prf`` to prove an equality between two ``head`` codes."""
    prf_ty = infer(ctx, prf)
    if not isinstance(prf_ty, v.VObsEq):
        raise _fail(f"expected a code equality proof, got {ctx.show(prf_ty)}",
                    at)
    lhs, rhs = prf_ty.lhs, prf_ty.rhs
    if not (isinstance(lhs, head) and isinstance(rhs, head)):
        raise _fail(f"cannot decompose an equality between non-{what} codes "
                    f"{ctx.show(lhs)} and {ctx.show(rhs)}", at)
    return prf_ty.level, (lhs, rhs)


def check(ctx: Ctx, term: t.Term, ty: v.Value) -> None:
    """Check ``term`` against the type value ``ty``."""
    match (term, ty):
        case (t.Lam(body), v.VPi(dom, cod)):
            x = v.fresh(ctx.depth)
            check(ctx.bind(dom), body, capply(cod, x))
            return
        case (t.Lam(_), _):
            raise _fail("a function literal needs a function type, but this "
                        f"one is checked against {ctx.show(ty)}", term)
        case (t.Pair(a, b), v.VSg(dom, cod)):
            check(ctx, a, dom)
            check(ctx, b, capply(cod, ctx.eval(a)))
            return
        case (t.Pair(_, _), _):
            raise _fail("a pair needs a pair type, but this one is checked "
                        f"against {ctx.show(ty)}", term)
        case (t.CBool() | t.CUnit(), v.VType(_)):
            return
        case (t.CPi(dom, cod), v.VType(level)) \
                | (t.CSg(dom, cod), v.VType(level)):
            check(ctx, dom, v.VType(level))
            check(ctx.bind(el_val(ctx.eval(dom))), cod, v.VType(level))
            return
        case (t.CUni(k), v.VType(level)):
            if k >= level:
                raise _fail(f"universe level violation: cUni{k} is not a "
                            f"code at level {level}", term)
            return
        case (t.CLift(body), v.VType(level)):
            if level == 0:
                raise _fail("a lifted code cannot live at level 0", term)
            check(ctx, body, v.VType(level - 1))
            return
    actual = infer(ctx, term)
    if not conv_ty(ctx.types, actual, ty):
        raise _fail(f"type mismatch: expected {ctx.show(ty)}, "
                    f"got {ctx.show(actual)}", term)


def check_file(source: t.SourceFile,
               max_level: int = DEFAULT_MAX_LEVEL) -> dict[str, v.DefEntry]:
    """Check every declaration in order; later ones see earlier ones."""
    globs: dict[str, v.DefEntry] = {}
    for decl in source.decls:
        ctx = Ctx(max_level=max_level, globals=globs)
        try:
            if decl.annotation is not None:
                ty = is_type(ctx, decl.annotation)
                check(ctx, decl.body, ty)
            else:
                ty = infer(ctx, decl.body)
        except CheckError as err:
            raise CheckError(f"in definition {decl.name!r}: {err.msg}",
                             err.span) from None
        globs[decl.name] = v.DefEntry(ty, eval_term(decl.body, (), globs))
    return globs
