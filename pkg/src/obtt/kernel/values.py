"""Semantic values for normalization by evaluation.

Values are weak-head-normal.  Stuck computation lives in ``Neutral``: a
head (a variable, a blocked cast, or an absurdity elimination) under a
spine of eliminations.  Casts whose source and target codes are not both
canonical with matching heads are values, not errors.

Lifts are rewritten into code constructors during evaluation, so ``SLift``
only ever wraps a stuck code.  Proof formers evaluate structurally; the
conversion checker ignores their content (proofs are definitionally
irrelevant), but their normal forms must still re-check.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from ..syntax import terms as t


class Value:
    __slots__ = ()


# -- closures -----------------------------------------------------------------

@dataclass(eq=False)
class Closure:
    """A binder body waiting for its argument."""

    env: tuple[Value, ...]
    body: t.Term
    globals: Mapping[str, "DefEntry"]


@dataclass(eq=False)
class Builtin:
    """A semantic function introduced by evaluation itself (decode, cast, lift)."""

    fn: Callable[[Value], Value]


ClosureLike = Closure | Builtin


# -- neutrals -----------------------------------------------------------------

@dataclass(eq=False)
class HVar:
    """Free variable, as a de Bruijn level."""

    level: int


@dataclass(eq=False)
class HCast:
    """A cast blocked on a non-canonical or mismatched code pair."""

    src: Value
    tgt: Value
    prf: Value
    body: Value


@dataclass(eq=False)
class HExfalso:
    """Elimination of the empty proposition; never computes."""

    motive: Value
    prf: Value


Head = HVar | HCast | HExfalso


@dataclass(eq=False)
class EApp:
    arg: Value


@dataclass(eq=False)
class EFst:
    pass


@dataclass(eq=False)
class ESnd:
    pass


@dataclass(eq=False)
class EBoolElim:
    motive: ClosureLike
    on_true: Value
    on_false: Value


@dataclass(eq=False)
class EEl:
    """Decoding applied to a stuck code."""


Elim = EApp | EFst | ESnd | EBoolElim | EEl


@dataclass(eq=False)
class Neutral(Value):
    head: Head
    spine: tuple[Elim, ...]


# -- canonical terms ----------------------------------------------------------

@dataclass(eq=False)
class VLam(Value):
    clos: ClosureLike


@dataclass(eq=False)
class VPair(Value):
    fst: Value
    snd: Value


@dataclass(eq=False)
class VTrue(Value):
    pass


@dataclass(eq=False)
class VFalse(Value):
    pass


@dataclass(eq=False)
class VTt(Value):
    pass


@dataclass(eq=False)
class VStar(Value):
    pass


# -- proof values (irrelevant, but re-checkable) ------------------------------

@dataclass(eq=False)
class VRefl(Value):
    code: Value


@dataclass(eq=False)
class VSym(Value):
    prf: Value


@dataclass(eq=False)
class VPiFst(Value):
    prf: Value


@dataclass(eq=False)
class VPiSnd(Value):
    prf: Value
    arg: Value


@dataclass(eq=False)
class VSgFst(Value):
    prf: Value


@dataclass(eq=False)
class VSgSnd(Value):
    prf: Value
    arg: Value


# -- types --------------------------------------------------------------------

@dataclass(eq=False)
class VPi(Value):
    dom: Value
    cod: ClosureLike


@dataclass(eq=False)
class VSg(Value):
    dom: Value
    cod: ClosureLike


@dataclass(eq=False)
class VBool(Value):
    pass


@dataclass(eq=False)
class VUnit(Value):
    pass


@dataclass(eq=False)
class VType(Value):
    """The type of level-``level`` codes."""

    level: int


@dataclass(eq=False)
class VProp(Value):
    pass


@dataclass(eq=False)
class VTop(Value):
    pass


@dataclass(eq=False)
class VBot(Value):
    pass


@dataclass(eq=False)
class VObsEq(Value):
    level: int
    lhs: Value
    rhs: Value


# -- semantic codes -----------------------------------------------------------

@dataclass(eq=False)
class SBool(Value):
    pass


@dataclass(eq=False)
class SUnit(Value):
    pass


@dataclass(eq=False)
class SPi(Value):
    dom: Value
    cod: ClosureLike


@dataclass(eq=False)
class SSg(Value):
    dom: Value
    cod: ClosureLike


@dataclass(eq=False)
class SUni(Value):
    level: int


@dataclass(eq=False)
class SLift(Value):
    """A lift surviving on a stuck code."""

    body: Value


# -- top-level definitions ----------------------------------------------------

@dataclass(eq=False)
class DefEntry:
    ty: Value
    value: Value


def fresh(level: int) -> Neutral:
    return Neutral(HVar(level), ())
