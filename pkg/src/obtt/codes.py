"""Free universe codes over an abstract host universe.

A code is a well-founded tree: embedded host elements, booleans, unit,
names of smaller code universes, and dependent function/pair formers
whose codomains are code families.  Codes carry an explicit level tag.
Everything here is parametric in a ``HostUniverse``; the presheaf model
supplies the only concrete host, and the kernel mirrors the same
structure syntactically.

Families come in two forms.  A tabulated family lists a code for every
(arrow, element) index of the decoded domain; a constant family carries
one body code and restricts it along each index arrow.  The constant
form is intensional: over an empty domain all tabulations collapse to
the empty table, while two constant families with different bodies stay
distinct.  That distinction is what keeps the function-code constructor
injective where the host's own function former is not.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Iterator

from .model.canon import Atom, CanonVal, Tup, canon_key


class CodeError(Exception):
    pass


class CapExceeded(Exception):
    def __init__(self, what: str, cap: int):
        super().__init__(f"resource cap exceeded: {what} (cap {cap})")
        self.what = what
        self.cap = cap


class HostUniverse(ABC):
    """What a semantic host must provide for codes to decode into it.

    Elements are stage-indexed and carry their own family structure,
    exposed through ``decode_host``.  Equality of elements must be a
    decidable equivalence.  ``strict_fn`` reports whether the host's own
    function former literally equals the section construction; the
    decode of function codes never depends on it.
    """

    strict_fn: bool

    def __init__(self) -> None:
        self._decode_cache: dict = {}
        self._code_pools: dict = {}

    # base navigation
    @abstractmethod
    def stages(self) -> tuple[str, ...]: ...

    @abstractmethod
    def arrows_into(self, stage: str) -> tuple[str, ...]: ...

    @abstractmethod
    def arrow_src(self, f: str) -> str: ...

    @abstractmethod
    def after(self, g: str, f: str) -> str: ...

    @abstractmethod
    def identity_arrow(self, stage: str) -> str: ...

    @abstractmethod
    def is_identity(self, f: str) -> bool: ...

    @abstractmethod
    def arrow_pos(self, f: str) -> int: ...

    # elements
    @abstractmethod
    def elements(self, level: int, stage: str) -> tuple: ...

    @abstractmethod
    def elem_eq(self, x, y) -> bool: ...

    @abstractmethod
    def restrict_elem(self, x, f: str): ...

    @abstractmethod
    def decode_host(self, x):
        """The family an element names: has .fiber(f) and .restrict(f, g, v)."""

    @abstractmethod
    def encode_elem(self, x) -> CanonVal: ...

    # type formers
    @abstractmethod
    def host_bool(self, level: int, stage: str): ...

    @abstractmethod
    def host_unit(self, level: int, stage: str): ...

    @abstractmethod
    def host_fn(self, level: int, stage: str, dom, cod: Callable): ...

    @abstractmethod
    def section_fn(self, level: int, stage: str, dom, cod: Callable):
        """The literal dependent-section element; host_fn in strict mode."""

    @abstractmethod
    def host_sg(self, level: int, stage: str, dom, cod: Callable): ...

    @abstractmethod
    def host_lift(self, x, level: int): ...

    @abstractmethod
    def universe_elem(self, named_level: int, stage: str):
        """The element naming the code universe of named_level (approximated)."""


@dataclass(frozen=True)
class CodeTree:
    level: int


@dataclass(frozen=True)
class UpCode(CodeTree):
    elem: object


@dataclass(frozen=True)
class BoolCode(CodeTree):
    pass


@dataclass(frozen=True)
class UnitCode(CodeTree):
    pass


@dataclass(frozen=True)
class UniCode(CodeTree):
    named: int

    def __post_init__(self):
        if not 0 <= self.named < self.level:
            raise CodeError(
                f"universe name {self.named} not below level {self.level}"
            )


class CodeFamily:
    __slots__ = ()


@dataclass(frozen=True)
class ConstFamily(CodeFamily):
    body: CodeTree


@dataclass(frozen=True)
class TabFamily(CodeFamily):
    # ((arrow id, domain element), code), sorted by (arrow position, element)
    entries: tuple[tuple[tuple[str, CanonVal], CodeTree], ...]


@dataclass(frozen=True)
class FnCode(CodeTree):
    dom: CodeTree
    cod: CodeFamily

    def __post_init__(self):
        _check_family_levels(self)


@dataclass(frozen=True)
class SgCode(CodeTree):
    dom: CodeTree
    cod: CodeFamily

    def __post_init__(self):
        _check_family_levels(self)


def _check_family_levels(code) -> None:
    if code.dom.level != code.level:
        raise CodeError("domain level differs from former level")
    cod = code.cod
    bodies = [cod.body] if isinstance(cod, ConstFamily) else [
        c for _, c in cod.entries
    ]
    for body in bodies:
        if body.level != code.level:
            raise CodeError("codomain level differs from former level")


def tab_family(host: HostUniverse, entries) -> TabFamily:
    """Canonically ordered tabulated family; rejects duplicate keys."""
    rows = sorted(
        entries, key=lambda kv: (host.arrow_pos(kv[0][0]), canon_key(kv[0][1]))
    )
    for (k1, _), (k2, _) in zip(rows, rows[1:]):
        if k1 == k2:
            raise CodeError(f"duplicate family index {k1}")
    return TabFamily(tuple(rows))


def fam_value(host: HostUniverse, stage: str, fam: CodeFamily, f: str, x: CanonVal) -> CodeTree:
    """The family's code at index (f, x); f is an arrow into stage."""
    if isinstance(fam, ConstFamily):
        return restrict_code(host, stage, fam.body, f)
    table = dict(fam.entries)
    try:
        return table[(f, x)]
    except KeyError:
        raise CodeError(f"family tabulation has no index ({f}, {x})") from None


def depth_of(code: CodeTree) -> int:
    match code:
        case FnCode(_, dom, cod) | SgCode(_, dom, cod):
            return 1 + max(depth_of(dom), _fam_depth(cod))
        case _:
            return 0


def _fam_depth(fam: CodeFamily) -> int:
    if isinstance(fam, ConstFamily):
        return depth_of(fam.body)
    return max((depth_of(c) for _, c in fam.entries), default=0)


def decode(host: HostUniverse, stage: str, code: CodeTree):
    """The host element a code names; function codes decode to sections."""
    key = (stage, code)
    cached = host._decode_cache.get(key)
    if cached is not None:
        return cached
    match code:
        case UpCode(_, elem):
            out = elem
        case BoolCode(level):
            out = host.host_bool(level, stage)
        case UnitCode(level):
            out = host.host_unit(level, stage)
        case UniCode(_, named):
            out = host.universe_elem(named, stage)
        case FnCode(level, dom, cod):
            out = host.section_fn(
                level, stage, decode(host, stage, dom), _decoded_cod(host, stage, cod)
            )
        case SgCode(level, dom, cod):
            out = host.host_sg(
                level, stage, decode(host, stage, dom), _decoded_cod(host, stage, cod)
            )
        case _:
            raise CodeError(f"not a code: {code!r}")
    host._decode_cache[key] = out
    return out


def _decoded_cod(host, stage, fam):
    def cod(f: str, x: CanonVal):
        return decode(host, host.arrow_src(f), fam_value(host, stage, fam, f, x))

    return cod


def restrict_code(host: HostUniverse, stage: str, code: CodeTree, f: str) -> CodeTree:
    """Reindex a code at stage along f into stage; codes form a presheaf."""
    if host.is_identity(f):
        return code
    match code:
        case UpCode(level, elem):
            return UpCode(level, host.restrict_elem(elem, f))
        case BoolCode() | UnitCode() | UniCode():
            return code
        case FnCode(level, dom, cod):
            return FnCode(
                level,
                restrict_code(host, stage, dom, f),
                _restrict_family(host, stage, dom, cod, f),
            )
        case SgCode(level, dom, cod):
            return SgCode(
                level,
                restrict_code(host, stage, dom, f),
                _restrict_family(host, stage, dom, cod, f),
            )
    raise CodeError(f"not a code: {code!r}")


def _restrict_family(host, stage, dom, fam, f):
    if isinstance(fam, ConstFamily):
        return ConstFamily(restrict_code(host, stage, fam.body, f))
    d = host.arrow_src(f)
    dom_fam = host.decode_host(decode(host, stage, dom))
    entries = []
    for g in host.arrows_into(d):
        fg = host.after(f, g)
        for x in dom_fam.fiber(fg):
            entries.append(((g, x), fam_value(host, stage, fam, fg, x)))
    return tab_family(host, entries)


def vlift(host: HostUniverse, code: CodeTree, steps: int = 1) -> CodeTree:
    """Raise a code's level, rewriting through every constructor.

    The lift never survives at the head of a canonical tree: embedded
    elements are lifted in the host, universe names are retagged, and
    the function/pair formers are rebuilt on lifted components.  With
    steps > 1 this is the direct multi-level composite, used to state
    functoriality against the iterated one-step lift.
    """
    if steps < 0:
        raise CodeError("negative lift")
    if steps == 0:
        return code
    match code:
        case UpCode(level, elem):
            out = elem
            for s in range(steps):
                out = host.host_lift(out, level + s)
            return UpCode(level + steps, out)
        case BoolCode(level):
            return BoolCode(level + steps)
        case UnitCode(level):
            return UnitCode(level + steps)
        case UniCode(level, named):
            return UniCode(level + steps, named)
        case FnCode(level, dom, cod):
            return FnCode(
                level + steps, vlift(host, dom, steps), _lift_family(host, cod, steps)
            )
        case SgCode(level, dom, cod):
            return SgCode(
                level + steps, vlift(host, dom, steps), _lift_family(host, cod, steps)
            )
    raise CodeError(f"not a code: {code!r}")


def _lift_family(host, fam, steps):
    if isinstance(fam, ConstFamily):
        return ConstFamily(vlift(host, fam.body, steps))
    # index keys are stable: lifting preserves decoded domains exactly
    return TabFamily(
        tuple((key, vlift(host, c, steps)) for key, c in fam.entries)
    )


def decompose_fn(code: CodeTree):
    """The unique components of a function code; None on any other head.

    Totality of this projection on function codes is the injectivity
    witness: two function codes are equal iff their components are.
    """
    if isinstance(code, FnCode):
        return code.dom, code.cod
    return None


def code_eq(host: HostUniverse, a: CodeTree, b: CodeTree) -> bool:
    """Structural code equality; embedded elements compare by the host."""
    match (a, b):
        case (UpCode(i, x), UpCode(j, y)):
            return i == j and host.elem_eq(x, y)
        case (BoolCode(i), BoolCode(j)) | (UnitCode(i), UnitCode(j)):
            return i == j
        case (UniCode(i, n), UniCode(j, m)):
            return i == j and n == m
        case (FnCode(i, d1, c1), FnCode(j, d2, c2)) | (
            SgCode(i, d1, c1),
            SgCode(j, d2, c2),
        ):
            return i == j and code_eq(host, d1, d2) and _fam_eq(host, c1, c2)
        case _:
            return False


def _fam_eq(host, f1, f2) -> bool:
    match (f1, f2):
        case (ConstFamily(b1), ConstFamily(b2)):
            return code_eq(host, b1, b2)
        case (TabFamily(e1), TabFamily(e2)):
            if len(e1) != len(e2):
                return False
            return all(
                k1 == k2 and code_eq(host, c1, c2)
                for (k1, c1), (k2, c2) in zip(e1, e2)
            )
        case _:
            # a tabulation is never a constant family: trees are free
            return False


def encode_code(host: HostUniverse, code: CodeTree) -> CanonVal:
    """Injective canonical encoding, used for universe-element fibers."""
    match code:
        case UpCode(level, elem):
            return Tup((Atom(0), Atom(level), host.encode_elem(elem)))
        case BoolCode(level):
            return Tup((Atom(1), Atom(level)))
        case UnitCode(level):
            return Tup((Atom(2), Atom(level)))
        case UniCode(level, named):
            return Tup((Atom(3), Atom(level), Atom(named)))
        case FnCode(level, dom, cod):
            return Tup(
                (Atom(4), Atom(level), encode_code(host, dom), _encode_fam(host, cod))
            )
        case SgCode(level, dom, cod):
            return Tup(
                (Atom(5), Atom(level), encode_code(host, dom), _encode_fam(host, cod))
            )
    raise CodeError(f"not a code: {code!r}")


def _encode_fam(host, fam) -> CanonVal:
    if isinstance(fam, ConstFamily):
        return Tup((Atom(0), encode_code(host, fam.body)))
    rows = tuple(
        Tup((Atom(host.arrow_pos(f)), x, encode_code(host, c)))
        for (f, x), c in fam.entries
    )
    return Tup((Atom(1), Tup(rows)))


def enum_codes(
    host: HostUniverse, level: int, stage: str, depth: int
) -> Iterator[CodeTree]:
    """All well-formed codes of constructor depth <= depth, each once.

    Deterministic order: leaves first (embedded elements in host order,
    then bool, unit, universe names ascending), then depth strata in
    order; within a stratum the function/pair streams over each domain
    are merged round-robin, constant families before tabulations.
    Consumers impose caps; see ``take``.
    """
    for d in range(depth + 1):
        yield from _stratum(host, level, stage, d)


def _pool(host, level, stage, maxdepth) -> list[CodeTree]:
    key = (level, stage, maxdepth)
    got = host._code_pools.get(key)
    if got is None:
        got = []
        for d in range(maxdepth + 1):
            got.extend(_stratum(host, level, stage, d))
        host._code_pools[key] = got
    return got


def _stratum(host, level, stage, d) -> Iterator[CodeTree]:
    if d == 0:
        for x in host.elements(level, stage):
            yield UpCode(level, x)
        yield BoolCode(level)
        yield UnitCode(level)
        for k in range(level):
            yield UniCode(level, k)
        return
    doms = _pool(host, level, stage, d - 1)
    streams = [
        _former_stream(host, level, stage, ctor, dom, d)
        for dom in doms
        for ctor in (FnCode, SgCode)
    ]
    yield from _round_robin(streams)


def _former_stream(host, level, stage, ctor, dom, d) -> Iterator[CodeTree]:
    dom_depth = depth_of(dom)
    for fam in _families(host, level, stage, dom, d - 1):
        if 1 + max(dom_depth, _fam_depth(fam)) == d:
            yield ctor(level, dom, fam)


def _families(host, level, stage, dom, maxdepth) -> Iterator[CodeFamily]:
    for body in _pool(host, level, stage, maxdepth):
        yield ConstFamily(body)
    yield from _tab_families(host, level, stage, dom, maxdepth)


def _tab_families(host, level, stage, dom, maxdepth) -> Iterator[TabFamily]:
    """All natural tabulated families over the decoded domain.

    Keys forced by naturality from earlier choices are filled by
    propagation; only genuinely free keys range over the value pool.
    """
    dom_fam = host.decode_host(decode(host, stage, dom))
    keys = [
        (f, x)
        for f in host.arrows_into(stage)
        for x in dom_fam.fiber(f)
    ]
    keys.sort(key=lambda k: (host.arrow_pos(k[0]), canon_key(k[1])))

    def propagate(assigned: dict, start_key, start_val):
        # one-step consequences of each new assignment, to a fixpoint
        todo = [(start_key, start_val)]
        while todo:
            (f, x), val = todo.pop()
            old = assigned.get((f, x))
            if old is not None:
                if not code_eq(host, old, val):
                    return False
                continue
            assigned[(f, x)] = val
            for g in host.arrows_into(host.arrow_src(f)):
                if host.is_identity(g):
                    continue
                key2 = (host.after(f, g), dom_fam.restrict(f, g, x))
                val2 = restrict_code(host, host.arrow_src(f), val, g)
                todo.append((key2, val2))
        return True

    def fill(assigned: dict, idx: int) -> Iterator[TabFamily]:
        while idx < len(keys) and keys[idx] in assigned:
            idx += 1
        if idx == len(keys):
            yield tab_family(host, list(assigned.items()))
            return
        f, x = keys[idx]
        for val in _pool(host, level, host.arrow_src(f), maxdepth):
            trial = dict(assigned)
            if propagate(trial, (f, x), val):
                yield from fill(trial, idx + 1)

    yield from fill({}, 0)


def _round_robin(streams) -> Iterator:
    live = [iter(s) for s in streams]
    while live:
        nxt = []
        for it in live:
            try:
                yield next(it)
            except StopIteration:
                continue
            nxt.append(it)
        live = nxt


def take(stream: Iterator, cap: int) -> tuple[list, bool]:
    """Up to cap items and whether the stream had more (never silent)."""
    out = []
    for item in stream:
        if len(out) == cap:
            return out, True
        out.append(item)
    return out, False
