import glob
import random

import pytest

from obtt.kernel import (
    CheckError,
    Ctx,
    capply,
    cast_step,
    check,
    check_file,
    conv,
    conv_code,
    conv_ty,
    el_val,
    eval_term,
    infer,
    quote,
)
from obtt.kernel import values as v
from obtt.syntax import parse_file, parse_term, print_term, terms as t
from oracles import gen_code_term, lift_heads_ok, lift_term_oracle

MAX_LEVEL = 3


def ev(term, env=()):
    return eval_term(term, env, {})


def generated_codes(count, seed):
    """Seeded stream of (term, level) pairs, all closed and well-typed."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        level = rng.randrange(MAX_LEVEL)
        depth = rng.randrange(1, 5)
        term = gen_code_term(rng, level, depth)
        out.append((term, level))
    return out


def run_code_property_suite(count, seed):
    """The four generated-code property families; returns check counts.

    Raises AssertionError on the first violated property.
    """
    ctx = Ctx(max_level=MAX_LEVEL)
    pi_codes = {lv: [] for lv in range(MAX_LEVEL)}
    counts = {"codes": 0, "decode": 0, "lift_nf": 0, "injectivity": 0,
              "irrelevance": 0}
    for term, level in generated_codes(count, seed):
        check(ctx, term, v.VType(level))
        counts["codes"] += 1
        value = ev(term)

        # decode equations, at conversion level
        decoded = el_val(value)
        match term:
            case t.CPi(dom, cod):
                rhs = ev(t.Pi(t.El(dom), t.El(cod)))
                assert conv_ty((), decoded, rhs), print_term(term)
                pi_codes[level].append((term, value))
            case t.CSg(dom, cod):
                rhs = ev(t.Sg(t.El(dom), t.El(cod)))
                assert conv_ty((), decoded, rhs), print_term(term)
            case t.CBool():
                assert isinstance(decoded, v.VBool)
            case t.CUnit():
                assert isinstance(decoded, v.VUnit)
            case t.CUni(k):
                assert isinstance(decoded, v.VType) and decoded.level == k
        if level + 1 <= MAX_LEVEL:
            lifted = ev(t.CLift(term))
            assert conv_ty((), el_val(lifted), decoded), print_term(term)
            counts["decode"] += 1

            # lift-rewrite normal forms, against the syntactic oracle
            nf = quote(0, lifted)
            assert lift_heads_ok(nf), print_term(nf)
            assert nf == lift_term_oracle(quote(0, value)), print_term(term)
            counts["lift_nf"] += 1

        # proof irrelevance: distinct stuck proofs cast the same element
        eq_ty = v.VObsEq(level, value, value)
        ctx_pq = ctx.bind(eq_ty).bind(eq_ty).bind(decoded)
        p, q, x = v.fresh(0), v.fresh(1), v.fresh(2)
        left = cast_step(value, value, p, x)
        right = cast_step(value, value, q, x)
        assert conv(ctx_pq.types, left, right, decoded), print_term(term)
        counts["irrelevance"] += 1

    # function code injectivity, on generated pairs at matching levels
    for level, pairs in pi_codes.items():
        for (t0, v0), (t1, v1) in zip(pairs, pairs[1:]):
            eq = v.VObsEq(level, v0, v1)
            ctx_p = ctx.bind(eq)
            doms = infer(ctx_p, t.PiFst(t.Var(0)))
            expected = v.VObsEq(level, v0.dom, v1.dom)
            assert conv_ty(ctx_p.types, doms, expected), print_term(t0)
            ctx_px = ctx_p.bind(el_val(v0.dom))
            cods = infer(ctx_px, t.PiSnd(t.Var(1), t.Var(0)))
            assert isinstance(cods, v.VObsEq) and cods.level == level
            # left side is the first codomain at the bound element; the
            # right side is the second codomain at its cast image
            x = v.fresh(1)
            assert conv_code(ctx_px.types, cods.lhs, capply(v0.cod, x),
                             level), print_term(t0)
            image = cast_step(v0.dom, v1.dom, v.VStar(), x)
            assert conv_code(ctx_px.types, cods.rhs, capply(v1.cod, image),
                             level), print_term(t1)
            counts["injectivity"] += 1
    return counts


def test_generated_code_properties_small():
    counts = run_code_property_suite(120, seed=7)
    assert counts["codes"] == 120
    assert counts["injectivity"] > 0


# -- frozen decode and lift facts ---------------------------------------------

def test_decode_pi_bool():
    decoded = ev(parse_term("El (cPi cBool (b . cBool))"))
    assert isinstance(decoded, v.VPi)
    assert isinstance(decoded.dom, v.VBool)
    from obtt.kernel import capply

    assert isinstance(capply(decoded.cod, v.VTrue()), v.VBool)


def test_decode_lift_is_decode():
    assert isinstance(ev(parse_term("El (cLift cBool)")), v.VBool)


def test_decode_universe_code():
    decoded = ev(parse_term("El (cUni1)"))
    assert isinstance(decoded, v.VType) and decoded.level == 1


def test_double_lift_normal_form_is_lift_free():
    nf = quote(0, ev(parse_term("cLift (cLift cBool)")))
    assert nf == t.CBool()


def test_lift_of_pi_pushes_through():
    nf = quote(0, ev(parse_term("El (cLift (cPi cBool (b . cBool)))")))
    assert nf == parse_term("Pi Bool (b . Bool)")


def test_lift_survives_on_neutral():
    term = parse_term("fun a . cLift a")
    ty = ev(parse_term("Pi V0 (a . V1)"))
    check(Ctx(), term, ty)
    nf = quote(0, ev(term))
    assert nf == t.Lam(t.CLift(t.Var(0)))


def test_check_identity_at_decoded_pi():
    check(Ctx(), parse_term("fun x . x"),
          ev(parse_term("El (cPi cBool (b . cBool))")))


def test_check_mismatch_rejected():
    with pytest.raises(CheckError):
        check(Ctx(), parse_term("true"), ev(parse_term("El cUnit")))


def test_universe_in_itself_rejected():
    with pytest.raises(CheckError):
        check(Ctx(), t.CUni(0), v.VType(0))


def test_level_ceiling_configurable():
    with pytest.raises(CheckError):
        infer(Ctx(max_level=3), t.CUni(3))
    ty = infer(Ctx(max_level=5), t.CUni(4))
    assert isinstance(ty, v.VType) and ty.level == 5


# -- casts --------------------------------------------------------------------

BOOL_FUNS = [
    "fun b . b",
    "fun b . boolElim (x . Bool) false true b",
    "fun b . true",
    "fun b . false",
]


@pytest.mark.parametrize("src", BOOL_FUNS)
def test_cast_along_refl_preserves_behavior(src):
    code = "cPi cBool (b . cBool)"
    casted = parse_term(f"cast ({code}) ({code}) (refl ({code})) ({src})")
    plain = parse_term(src)
    ty = ev(parse_term(f"El ({code})"))
    check(Ctx(), casted, ty)
    for arg in (v.VTrue(), v.VFalse()):
        from obtt.kernel import apply_val

        assert conv((), apply_val(ev(casted), arg), apply_val(ev(plain), arg),
                    v.VBool())


def test_cast_between_sigma_codes_componentwise():
    src = "cast (cSg cBool (b . cUnit)) (cSg cBool (b . cUnit)) " \
          "(refl (cSg cBool (b . cUnit))) ((true, tt))"
    value = ev(parse_term(src))
    assert isinstance(value, v.VPair)
    assert isinstance(value.fst, v.VTrue) and isinstance(value.snd, v.VTt)


def test_stuck_cast_is_neutral_and_quotes():
    ctx = (Ctx().bind(v.VType(0)).bind(v.VType(0))
           .bind(v.VObsEq(0, v.fresh(0), v.fresh(1))).bind(el_val(v.fresh(0))))
    value = cast_step(v.fresh(0), v.fresh(1), v.fresh(2), v.fresh(3))
    assert isinstance(value, v.Neutral)
    nf = quote(ctx.depth, value)
    assert isinstance(nf, t.Cast)


def test_stuck_cast_proof_irrelevance_and_body_relevance():
    a, b = v.fresh(0), v.fresh(1)
    p, q = v.fresh(2), v.fresh(3)
    x, y = v.fresh(4), v.fresh(5)
    types = (v.VType(0), v.VType(0), v.VObsEq(0, a, b), v.VObsEq(0, a, b),
             el_val(a), el_val(a))
    target = el_val(b)
    assert conv(types, cast_step(a, b, p, x), cast_step(a, b, q, x), target)
    assert not conv(types, cast_step(a, b, p, x), cast_step(a, b, p, y), target)


# -- corpus-level checks ------------------------------------------------------

def corpus_files(kind):
    return sorted(glob.glob(f"corpus/{kind}/*.obtt"))


def test_corpus_directories_populated():
    assert len(corpus_files("well_typed")) >= 20
    assert len(corpus_files("ill_typed")) >= 10


PROP_TYPES = (v.VObsEq, v.VTop, v.VBot, v.VProp)


@pytest.mark.parametrize("path", corpus_files("well_typed"))
def test_well_typed_corpus_subject_reduction(path):
    """Normal forms of checked definitions check again at the same type.

    Definitions at proposition types are skipped: their values carry no
    information, so quoting picks an arbitrary representative that need
    not re-check at the original (irrelevant) type.
    """
    with open(path, encoding="utf-8") as fh:
        entries = check_file(parse_file(fh.read()))
    for name, entry in entries.items():
        if isinstance(entry.ty, PROP_TYPES):
            continue
        ctx = Ctx(globals=entries)
        nf = quote(0, entry.value)
        check(ctx, nf, entry.ty)


@pytest.mark.parametrize("path", corpus_files("ill_typed"))
def test_ill_typed_corpus_rejected(path):
    from obtt.syntax import ParseError

    with open(path, encoding="utf-8") as fh:
        source = fh.read()
    with pytest.raises((CheckError, ParseError)):
        check_file(parse_file(source))
