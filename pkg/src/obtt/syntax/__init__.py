"""Surface syntax: core terms, parser, and printer."""
from .terms import (  # noqa: F401
    App, BoolElim, BoolT, BotP, Cast, CBool, CLift, CPi, CSg, CUni, CUnit,
    Decl, El, Exfalso, FalseLit, Fst, Lam, ObsEq, Pair, Pi, PiFst, PiSnd,
    PropT, Ref, Refl, Sg, SgFst, SgSnd, Snd, SourceFile, Span, Star, Sym,
    Term, TopP, TrueLit, Tt, UnitT, Var, VType,
)
from .parse import ParseError, parse_file, parse_term  # noqa: F401
from .printer import print_decl, print_term  # noqa: F401
