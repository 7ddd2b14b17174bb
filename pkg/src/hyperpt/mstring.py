"""M-strings (sequences of match ranges) and m-maps (label -> m-string).

An m-string is a tuple of ``(start, end)`` pairs where ``None`` stands for
an undefined component. ``(p, None)`` opens a match at ``p``, ``(None, p)``
closes the currently open match, ``(s, e)`` is a complete match.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

Pair = tuple
MString = tuple
MMap = dict

EMPTY: MString = ()


class DomainError(ValueError):
    """Partial concatenation applied outside its domain."""


def concat_pair(s: MString, x: Pair) -> MString:
    c, d = x
    if not s:
        if c is None:
            raise DomainError(f"ε ⊙ {format_pair(x)} is undefined")
        return (x,)
    a, b = s[-1]
    if b is not None:
        return s + (x,)
    if c is None:
        return s[:-1] + ((a, d),)
    # an open match that never closed is overwritten by the new one
    return s[:-1] + ((c, d),)


def concat(s: MString, other: Iterable[Pair]) -> MString:
    for x in other:
        s = concat_pair(s, x)
    return s


def mstring(*pairs: Pair) -> MString:
    """Build an m-string through ⊙ only, so malformed inputs raise."""
    return concat(EMPTY, pairs)


def well_formed(s: Sequence[Pair]) -> bool:
    for i, (a, b) in enumerate(s):
        if a is None:
            return False
        if b is None and i != len(s) - 1:
            return False
    return True


def mmap_concat(m1: Mapping[str, MString], m2: Mapping[str, MString]) -> MMap:
    if not m2:
        return dict(m1)
    if not m1:
        return dict(m2)
    out = dict(m1)
    for label, s2 in m2.items():
        out[label] = concat(out.get(label, EMPTY), s2)
    return out


def format_pair(x: Pair) -> str:
    c, d = x
    return f"({'⊥' if c is None else c},{'⊥' if d is None else d})"


def format_mstring(s: MString) -> str:
    return "".join(format_pair(x) for x in s) if s else "ε"


def format_mmap(m: Mapping[str, MString]) -> str:
    if not m:
        return "∅"
    return "{" + ", ".join(f"{k}↦{format_mstring(v)}" for k, v in sorted(m.items())) + "}"
