"""Core term syntax.

Terms use de Bruijn indices; binders (``CPi``, ``CSg``, ``Pi``, ``Sg``,
``Lam`` and the motive of ``BoolElim``) carry their body with one extra
free index.  Source positions ride along on every node but are excluded
from structural equality so that printing and re-parsing round-trips.
"""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    """Start position of a construct in its source file (1-based)."""

    line: int
    col: int

    def __str__(self) -> str:
        return f"line {self.line}, column {self.col}"


@dataclass(frozen=True)
class Term:
    span: Span | None = field(default=None, compare=False, repr=False, kw_only=True)


# -- variables and definitions ------------------------------------------------

@dataclass(frozen=True)
class Var(Term):
    """Bound variable, as a de Bruijn index (0 = innermost binder)."""

    ix: int


@dataclass(frozen=True)
class Ref(Term):
    """Reference to an earlier top-level definition."""

    name: str


# -- universes and codes ------------------------------------------------------

@dataclass(frozen=True)
class VType(Term):
    """The type of level-``level`` codes."""

    level: int


@dataclass(frozen=True)
class CBool(Term):
    """Code for the booleans."""


@dataclass(frozen=True)
class CUnit(Term):
    """Code for the unit type."""


@dataclass(frozen=True)
class CPi(Term):
    """Code for a dependent function type; ``cod`` binds one variable."""

    dom: Term
    cod: Term


@dataclass(frozen=True)
class CSg(Term):
    """Code for a dependent pair type; ``cod`` binds one variable."""

    dom: Term
    cod: Term


@dataclass(frozen=True)
class CUni(Term):
    """Code for the level-``level`` code type itself."""

    level: int


@dataclass(frozen=True)
class CLift(Term):
    """One-level lift of a code."""

    body: Term


@dataclass(frozen=True)
class El(Term):
    """The type decoded from a code."""

    code: Term


# -- plain type formers -------------------------------------------------------

@dataclass(frozen=True)
class Pi(Term):
    dom: Term
    cod: Term


@dataclass(frozen=True)
class Sg(Term):
    dom: Term
    cod: Term


@dataclass(frozen=True)
class BoolT(Term):
    pass


@dataclass(frozen=True)
class UnitT(Term):
    pass


# -- term formers -------------------------------------------------------------

@dataclass(frozen=True)
class Lam(Term):
    """Function literal; ``body`` binds one variable."""

    body: Term


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Pair(Term):
    fst: Term
    snd: Term


@dataclass(frozen=True)
class Fst(Term):
    pair: Term


@dataclass(frozen=True)
class Snd(Term):
    pair: Term


@dataclass(frozen=True)
class Tt(Term):
    """The unit element."""


@dataclass(frozen=True)
class TrueLit(Term):
    pass


@dataclass(frozen=True)
class FalseLit(Term):
    pass


@dataclass(frozen=True)
class BoolElim(Term):
    """Boolean case analysis; ``motive`` binds the scrutinee variable."""

    motive: Term
    on_true: Term
    on_false: Term
    scrut: Term


# -- propositions and proofs --------------------------------------------------

@dataclass(frozen=True)
class PropT(Term):
    """The type of propositions."""


@dataclass(frozen=True)
class TopP(Term):
    """The trivially true proposition."""


@dataclass(frozen=True)
class BotP(Term):
    """The empty proposition."""


@dataclass(frozen=True)
class ObsEq(Term):
    """Observational equality of two level-``level`` codes."""

    level: int
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Star(Term):
    """The proof of the trivially true proposition."""


@dataclass(frozen=True)
class Exfalso(Term):
    """Elimination of the empty proposition into any type."""

    motive: Term
    prf: Term


@dataclass(frozen=True)
class PiFst(Term):
    """Domain part of an equality between two function codes."""

    prf: Term


@dataclass(frozen=True)
class PiSnd(Term):
    """Codomain part of an equality between two function codes, at a point."""

    prf: Term
    arg: Term


@dataclass(frozen=True)
class SgFst(Term):
    """First-component part of an equality between two pair codes."""

    prf: Term


@dataclass(frozen=True)
class SgSnd(Term):
    """Second-component part of an equality between two pair codes, at a point."""

    prf: Term
    arg: Term


@dataclass(frozen=True)
class Sym(Term):
    prf: Term


@dataclass(frozen=True)
class Refl(Term):
    code: Term


@dataclass(frozen=True)
class Cast(Term):
    """Transport of ``body`` along a proof that ``src`` equals ``tgt``."""

    src: Term
    tgt: Term
    prf: Term
    body: Term


# -- source files -------------------------------------------------------------

@dataclass(frozen=True)
class Decl:
    """One top-level definition.  ``annotation`` is optional."""

    name: str
    annotation: Term | None
    body: Term
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SourceFile:
    decls: tuple[Decl, ...]
