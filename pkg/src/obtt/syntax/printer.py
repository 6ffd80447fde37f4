"""Deterministic printing of core terms back to surface syntax.

Binder names are generated stably from binder depth (``x0``, ``x1``, ...),
skipping any name that a definition reference in the term already uses;
binders whose variable never occurs print as ``_``.  The output parses
back to the same de Bruijn term.
"""
from __future__ import annotations

from . import terms as t

# Precedence classes: atoms need no parentheses anywhere, applications
# need them in argument position, ``fun`` needs them everywhere but the top.
_ATOM, _APP, _LOW = 0, 1, 2


def occurs_free(term: t.Term, ix: int) -> bool:
    """Does the de Bruijn variable ``ix`` occur free in ``term``?"""
    match term:
        case t.Var(i):
            return i == ix
        case t.Lam(b):
            return occurs_free(b, ix + 1)
        case t.CPi(d, c) | t.CSg(d, c) | t.Pi(d, c) | t.Sg(d, c):
            return occurs_free(d, ix) or occurs_free(c, ix + 1)
        case t.BoolElim(m, tr, fa, s):
            return (occurs_free(m, ix + 1) or occurs_free(tr, ix)
                    or occurs_free(fa, ix) or occurs_free(s, ix))
        case _:
            kids = [v for v in vars(term).values() if isinstance(v, t.Term)]
            return any(occurs_free(k, ix) for k in kids)


def _ref_names(term: t.Term, out: set[str]) -> None:
    if isinstance(term, t.Ref):
        out.add(term.name)
    for v in vars(term).values():
        if isinstance(v, t.Term):
            _ref_names(v, out)


class _Printer:
    def __init__(self, taken: set[str]):
        self.taken = taken

    def fresh(self, depth: int) -> str:
        name = f"x{depth}"
        while name in self.taken:
            name = name + "'"
        return name

    def binder(self, body: t.Term, names: tuple[str, ...]) -> str:
        name = self.fresh(len(names)) if occurs_free(body, 0) else "_"
        text, _ = self.go(body, names + (name,))
        return f"({name} . {text})"

    def atom(self, term: t.Term, names: tuple[str, ...]) -> str:
        text, prec = self.go(term, names)
        return text if prec == _ATOM else f"({text})"

    def head(self, term: t.Term, names: tuple[str, ...]) -> str:
        text, prec = self.go(term, names)
        return text if prec != _LOW else f"({text})"

    def go(self, term: t.Term, names: tuple[str, ...]) -> tuple[str, int]:
        a = lambda x: self.atom(x, names)
        match term:
            case t.Var(ix):
                return (names[-1 - ix] if ix < len(names) else f"#{ix}"), _ATOM
            case t.Ref(name):
                return name, _ATOM
            case t.VType(k):
                return f"V{k}", _ATOM
            case t.CUni(k):
                return f"cUni{k}", _ATOM
            case t.CBool():
                return "cBool", _ATOM
            case t.CUnit():
                return "cUnit", _ATOM
            case t.BoolT():
                return "Bool", _ATOM
            case t.UnitT():
                return "Unit", _ATOM
            case t.PropT():
                return "Prop", _ATOM
            case t.TopP():
                return "Top", _ATOM
            case t.BotP():
                return "Bot", _ATOM
            case t.Tt():
                return "tt", _ATOM
            case t.TrueLit():
                return "true", _ATOM
            case t.FalseLit():
                return "false", _ATOM
            case t.Star():
                return "star", _ATOM
            case t.CPi(d, c):
                return f"cPi {a(d)} {self.binder(c, names)}", _APP
            case t.CSg(d, c):
                return f"cSg {a(d)} {self.binder(c, names)}", _APP
            case t.Pi(d, c):
                return f"Pi {a(d)} {self.binder(c, names)}", _APP
            case t.Sg(d, c):
                return f"Sg {a(d)} {self.binder(c, names)}", _APP
            case t.CLift(b):
                return f"cLift {a(b)}", _APP
            case t.El(c):
                return f"El {a(c)}", _APP
            case t.Lam():
                body = term
                bound: list[str] = []
                while isinstance(body, t.Lam):
                    name = (self.fresh(len(names) + len(bound))
                            if occurs_free(body.body, 0) else "_")
                    bound.append(name)
                    body = body.body
                # A trailing unused binder still needs a printable name slot.
                text, _ = self.go(body, names + tuple(bound))
                return f"fun {' '.join(bound)} . {text}", _LOW
            case t.App(f, x):
                return f"{self.head(f, names)} {a(x)}", _APP
            case t.Pair(x, y):
                return f"({self.go(x, names)[0]}, {self.go(y, names)[0]})", _ATOM
            case t.Fst(p):
                return f"fst {a(p)}", _APP
            case t.Snd(p):
                return f"snd {a(p)}", _APP
            case t.BoolElim(m, tr, fa, s):
                return (f"boolElim {self.binder(m, names)} {a(tr)} {a(fa)} {a(s)}",
                        _APP)
            case t.ObsEq(k, l, r):
                return f"Eq{k} {a(l)} {a(r)}", _APP
            case t.Exfalso(m, p):
                return f"exfalso {a(m)} {a(p)}", _APP
            case t.PiFst(p):
                return f"piFst {a(p)}", _APP
            case t.PiSnd(p, x):
                return f"piSnd {a(p)} {a(x)}", _APP
            case t.SgFst(p):
                return f"sgFst {a(p)}", _APP
            case t.SgSnd(p, x):
                return f"sgSnd {a(p)} {a(x)}", _APP
            case t.Sym(p):
                return f"sym {a(p)}", _APP
            case t.Refl(c):
                return f"refl {a(c)}", _APP
            case t.Cast(s, tg, e, b):
                return f"cast {a(s)} {a(tg)} {a(e)} {a(b)}", _APP
        raise AssertionError(f"unprintable term {term!r}")


def print_term(term: t.Term, names: tuple[str, ...] = ()) -> str:
    refs: set[str] = set()
    _ref_names(term, refs)
    return _Printer(refs).go(term, names)[0]


def print_decl(decl: t.Decl) -> str:
    if decl.annotation is None:
        return f"def {decl.name} := {print_term(decl.body)}"
    return (f"def {decl.name} : {print_term(decl.annotation)}"
            f" := {print_term(decl.body)}")
