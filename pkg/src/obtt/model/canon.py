"""Canonical finite values.

Every element of every finite set manipulated by the model checks is a
``CanonVal``: an atom, a tuple of canonical values, or a finite function
table with distinct, sorted keys.  Structural equality is decidable and
``canon_key`` gives a total order, so sets of canonical values have a
unique sorted presentation.
"""
from __future__ import annotations

from dataclasses import dataclass


class CanonVal:
    __slots__ = ()


@dataclass(frozen=True)
class Atom(CanonVal):
    n: int

    def __str__(self) -> str:
        return f"#{self.n}"


@dataclass(frozen=True)
class Tup(CanonVal):
    items: tuple[CanonVal, ...]

    def __str__(self) -> str:
        return "(" + ", ".join(map(str, self.items)) + ")"


@dataclass(frozen=True)
class FunTab(CanonVal):
    """A finite function as a table of (key, value) pairs."""

    pairs: tuple[tuple[CanonVal, CanonVal], ...]

    def __str__(self) -> str:
        inside = ", ".join(f"{k} -> {v}" for k, v in self.pairs)
        return "{" + inside + "}"

    def apply(self, key: CanonVal) -> CanonVal:
        for k, val in self.pairs:
            if k == key:
                return val
        raise KeyError(key)


def canon_key(value: CanonVal):
    """Total order key; atoms sort before tuples before function tables.

    Keys get cached on the value, so repeated sorts of shared structure
    cost one traversal total.
    """
    cached = getattr(value, "_key", None)
    if cached is not None:
        return cached
    match value:
        case Atom(n):
            key = (0, n)
        case Tup(items):
            key = (1, tuple(canon_key(x) for x in items))
        case FunTab(pairs):
            key = (2, tuple((canon_key(k), canon_key(v)) for k, v in pairs))
        case _:
            raise TypeError(f"not a canonical value: {value!r}")
    object.__setattr__(value, "_key", key)
    return key


def fun_tab(pairs) -> FunTab:
    """Build a function table, sorting by key and rejecting duplicates."""
    rows = sorted(pairs, key=lambda kv: canon_key(kv[0]))
    for (k1, _), (k2, _) in zip(rows, rows[1:]):
        if k1 == k2:
            raise ValueError(f"duplicate key {k1} in function table")
    return FunTab(tuple(rows))


def sorted_vals(values) -> tuple[CanonVal, ...]:
    return tuple(sorted(values, key=canon_key))
