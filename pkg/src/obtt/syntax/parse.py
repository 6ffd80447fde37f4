"""Recursive-descent parser for ``.obtt`` source files.

The grammar is whitespace- and newline-insensitive.  Application is
juxtaposition and associates left; ``fun x y . body`` extends as far
right as possible; binder arguments are written ``(x . body)``.  Code
keywords carry a ``c`` prefix, and the numeric families ``V0 V1 ...``,
``cUni0 cUni1 ...`` and ``Eq0 Eq1 ...`` are single tokens.  ``--``
starts a line comment.  See ``docs/grammar.ebnf`` for the grammar.
"""
from __future__ import annotations

import re

from . import terms as t
from .terms import Span


class ParseError(Exception):
    """Syntax or scoping error, with a source position."""

    def __init__(self, msg: str, span: Span):
        super().__init__(f"{span}: {msg}")
        self.msg = msg
        self.span = span


_TOKEN = re.compile(
    r"""(?P<ws>\s+|--[^\n]*)
      | (?P<assign>:=)
      | (?P<colon>:)
      | (?P<lparen>\()
      | (?P<rparen>\))
      | (?P<comma>,)
      | (?P<dot>\.)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)

# keyword -> argument shape; "a" is an atomic argument, "b" a binder
_KEYWORDS: dict[str, str] = {
    "cPi": "ab", "cSg": "ab", "Pi": "ab", "Sg": "ab",
    "cLift": "a", "El": "a", "fst": "a", "snd": "a",
    "piFst": "a", "sgFst": "a", "sym": "a", "refl": "a",
    "piSnd": "aa", "sgSnd": "aa", "exfalso": "aa",
    "cast": "aaaa", "boolElim": "baaa",
}

_NULLARY: dict[str, type] = {
    "cBool": t.CBool, "cUnit": t.CUnit, "Bool": t.BoolT, "Unit": t.UnitT,
    "Prop": t.PropT, "Top": t.TopP, "Bot": t.BotP, "tt": t.Tt,
    "true": t.TrueLit, "false": t.FalseLit, "star": t.Star,
}

_LEVELED = re.compile(r"(V|cUni|Eq)([0-9]+)$")

_RESERVED = (set(_KEYWORDS) | set(_NULLARY) | {"def", "fun", "_"})


def _is_reserved(name: str) -> bool:
    return name in _RESERVED or _LEVELED.match(name) is not None


class _Token:
    __slots__ = ("kind", "text", "span")

    def __init__(self, kind: str, text: str, span: Span):
        self.kind = kind
        self.text = text
        self.span = span


def _tokenize(src: str) -> list[_Token]:
    toks: list[_Token] = []
    line, col, pos = 1, 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", Span(line, col))
        kind = m.lastgroup or ""
        text = m.group()
        if kind != "ws":
            toks.append(_Token(kind, text, Span(line, col)))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    toks.append(_Token("eof", "", Span(line, col)))
    return toks


class _Parser:
    def __init__(self, src: str, known: set[str] | None = None):
        self.toks = _tokenize(src)
        self.pos = 0
        self.globals: set[str] = set(known or ())
        self.scope: list[str] = []

    # -- token plumbing --------------------------------------------------

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def next(self) -> _Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            shown = tok.text or "end of input"
            raise ParseError(f"expected {what}, found {shown!r}", tok.span)
        return self.next()

    # -- terms -----------------------------------------------------------

    def term(self) -> t.Term:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "fun":
            return self.lam()
        head = self.atom()
        out = head
        while self.starts_atom():
            arg = self.atom()
            out = t.App(out, arg, span=head.span)
        return out

    def lam(self) -> t.Term:
        start = self.next()
        names: list[str] = []
        while self.peek().kind == "ident" and self.peek().text != ".":
            names.append(self.binder_name())
        if not names:
            raise ParseError("expected at least one binder after 'fun'",
                             self.peek().span)
        self.expect("dot", "'.' after binders")
        self.scope.extend(names)
        body = self.term()
        del self.scope[-len(names):]
        for _ in names:
            body = t.Lam(body, span=start.span)
        return body

    def binder_name(self) -> str:
        tok = self.expect("ident", "a binder name")
        if tok.text != "_" and _is_reserved(tok.text):
            raise ParseError(f"{tok.text!r} is a reserved word", tok.span)
        return tok.text

    def starts_atom(self) -> bool:
        tok = self.peek()
        if tok.kind == "lparen":
            return True
        return tok.kind == "ident" and tok.text not in ("def", "fun")

    def binder(self) -> t.Term:
        """Parse ``(x . body)``, returning the body with one extra index."""
        lp = self.expect("lparen", "a binder '(x . ...)'")
        name = self.binder_name()
        self.expect("dot", "'.' in binder")
        self.scope.append(name)
        body = self.term()
        self.scope.pop()
        self.expect("rparen", "')' closing binder")
        del lp
        return body

    def atom(self) -> t.Term:
        tok = self.peek()
        if tok.kind == "lparen":
            return self.parens()
        tok = self.expect("ident", "a term")
        name, span = tok.text, tok.span

        if name in _NULLARY:
            return _NULLARY[name](span=span)
        lv = _LEVELED.match(name)
        if lv:
            level = int(lv.group(2))
            if lv.group(1) == "V":
                return t.VType(level, span=span)
            if lv.group(1) == "cUni":
                return t.CUni(level, span=span)
            return t.ObsEq(level, self.atom(), self.atom(), span=span)
        if name in _KEYWORDS:
            args = [self.binder() if kind == "b" else self.atom()
                    for kind in _KEYWORDS[name]]
            ctor = {
                "cPi": t.CPi, "cSg": t.CSg, "Pi": t.Pi, "Sg": t.Sg,
                "cLift": t.CLift, "El": t.El, "fst": t.Fst, "snd": t.Snd,
                "piFst": t.PiFst, "sgFst": t.SgFst, "sym": t.Sym,
                "refl": t.Refl, "piSnd": t.PiSnd, "sgSnd": t.SgSnd,
                "exfalso": t.Exfalso, "cast": t.Cast, "boolElim": t.BoolElim,
            }[name]
            return ctor(*args, span=span)
        if name == "def":
            raise ParseError("'def' cannot appear inside a term", span)
        if name == "_":
            raise ParseError("'_' cannot be used as a term", span)
        for depth, bound in enumerate(reversed(self.scope)):
            if bound == name:
                return t.Var(depth, span=span)
        if name in self.globals:
            return t.Ref(name, span=span)
        raise ParseError(f"unbound identifier {name!r}", span)

    def parens(self) -> t.Term:
        lp = self.next()
        nxt = self.toks[self.pos]
        after = self.toks[self.pos + 1] if self.pos + 1 < len(self.toks) else None
        if nxt.kind == "ident" and after is not None and after.kind == "dot":
            raise ParseError("a binder '(x . ...)' is only allowed as an "
                             "argument of cPi, cSg, Pi, Sg or boolElim", lp.span)
        inner = self.term()
        if self.peek().kind == "comma":
            self.next()
            snd = self.term()
            self.expect("rparen", "')' closing pair")
            return t.Pair(inner, snd, span=lp.span)
        self.expect("rparen", "')'")
        return inner

    # -- declarations ----------------------------------------------------

    def file(self) -> t.SourceFile:
        decls: list[t.Decl] = []
        while self.peek().kind != "eof":
            tok = self.expect("ident", "'def'")
            if tok.text != "def":
                raise ParseError(f"expected 'def', found {tok.text!r}", tok.span)
            name_tok = self.expect("ident", "a definition name")
            name = name_tok.text
            if _is_reserved(name):
                raise ParseError(f"{name!r} is a reserved word", name_tok.span)
            if name in self.globals:
                raise ParseError(f"duplicate definition of {name!r}",
                                 name_tok.span)
            annotation = None
            if self.peek().kind == "colon":
                self.next()
                annotation = self.term()
            self.expect("assign", "':='")
            body = self.term()
            decls.append(t.Decl(name, annotation, body, span=tok.span))
            self.globals.add(name)
        return t.SourceFile(tuple(decls))


def parse_file(src: str) -> t.SourceFile:
    """Parse a whole source file of ``def`` declarations."""
    return _Parser(src).file()


def parse_term(src: str, known: set[str] | None = None) -> t.Term:
    """Parse a single term; ``known`` names parse as definition references."""
    parser = _Parser(src, known)
    term = parser.term()
    parser.expect("eof", "end of input")
    return term
