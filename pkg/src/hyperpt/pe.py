"""Prefix expressions and their derivative-style evaluation.

A prefix expression matches the shortest prefix of a word it can. Evaluation
rewrites the expression one letter at a time (``step``); the m-map produced
along the way records where labeled sub-expressions matched.

``step`` works on m-map *deltas*: each rewrite is computed from the empty
m-map and its output is appended to the accumulated one with ⊕. This is the
same as running the finite transducer of the expression, where every edge
emits the m-map of a single rewrite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .events import Event, EventPattern
from .mstring import MMap, MString, mmap_concat

_NO_MAP: MMap = {}  # shared, never mutated


class Pe:
    """Base class of prefix-expression nodes (all immutable)."""

    def __hash__(self) -> int:
        try:
            return self._h  # type: ignore[attr-defined]
        except AttributeError:
            h = hash((type(self).__name__,) + tuple(self.__dict__[f] for f in self.__dataclass_fields__))  # type: ignore[attr-defined]
            object.__setattr__(self, "_h", h)
            return h

    def __str__(self) -> str:
        from .dsl import format_pe

        return format_pe(self)


@dataclass(frozen=True, eq=True)
class Epsilon(Pe):
    __hash__ = Pe.__hash__


@dataclass(frozen=True, eq=True)
class Bottom(Pe):
    __hash__ = Pe.__hash__


@dataclass(frozen=True, eq=True)
class Atom(Pe):
    pattern: EventPattern
    __hash__ = Pe.__hash__


@dataclass(frozen=True, eq=True)
class Concat(Pe):
    left: Pe
    right: Pe
    __hash__ = Pe.__hash__


@dataclass(frozen=True, eq=True)
class Or(Pe):
    left: Pe
    right: Pe
    __hash__ = Pe.__hash__


@dataclass(frozen=True, eq=True)
class Iter(Pe):
    """``body U until``: repeat ``body`` until the one-letter ``until`` matches."""

    body: Pe
    until: Pe
    __hash__ = Pe.__hash__


@dataclass(frozen=True, eq=True)
class Labeled(Pe):
    label: str
    body: Pe
    __hash__ = Pe.__hash__


@dataclass(frozen=True, eq=True)
class InFlight(Pe):
    """A labeled expression whose match has started but not finished."""

    label: str
    body: Pe
    __hash__ = Pe.__hash__


EPS = Epsilon()
BOT = Bottom()


class PeError(ValueError):
    pass


# -- constructors -----------------------------------------------------------

def seq(*parts: Pe) -> Pe:
    """Right-nested concatenation, dropping ε operands."""
    out: Pe = EPS
    for part in reversed(parts):
        out = _cat(part, out)
    return out


def alt(*parts: Pe) -> Pe:
    """Right-nested disjunction."""
    if not parts:
        raise PeError("empty disjunction")
    out = parts[-1]
    for part in reversed(parts[:-1]):
        out = Or(part, out)
    return out


def _cat(x: Pe, y: Pe) -> Pe:
    if x is BOT or isinstance(x, Bottom):
        return BOT
    if isinstance(x, Epsilon):
        return y
    if isinstance(y, Epsilon):
        return x
    return Concat(x, y)


def _or(x: Pe, y: Pe) -> Pe:
    if isinstance(x, Bottom):
        return y
    if isinstance(y, Bottom):
        return x
    return Or(x, y)


# -- structural queries -----------------------------------------------------

def nullable(pe: Pe) -> bool:
    """ε ∈ pe, following the inductive definition literally.

    Only ε itself and disjunctions (bare, labeled, or in flight) with a
    nullable operand are nullable.
    """
    if isinstance(pe, Epsilon):
        return True
    if isinstance(pe, Or):
        return nullable(pe.left) or nullable(pe.right)
    if isinstance(pe, Concat) and isinstance(pe.left, Epsilon):
        return nullable(pe.right)
    if isinstance(pe, Concat) and isinstance(pe.right, Epsilon):
        return nullable(pe.left)
    if isinstance(pe, (Labeled, InFlight)) and isinstance(pe.body, Or):
        return nullable(pe.body)
    return False


def labels(pe: Pe) -> list[str]:
    """Labels in pre-order, with repetitions."""
    out: list[str] = []
    stack = [pe]
    while stack:
        node = stack.pop()
        if isinstance(node, (Labeled, InFlight)):
            out.append(node.label)
            stack.append(node.body)
        elif isinstance(node, (Concat, Or)):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, Iter):
            stack.append(node.until)
            stack.append(node.body)
    return out


def is_single_letter(pe: Pe) -> bool:
    """Membership in the restricted grammar ``β ::= a | β + β | [β]_l``."""
    if isinstance(pe, Atom):
        return True
    if isinstance(pe, Or):
        return is_single_letter(pe.left) and is_single_letter(pe.right)
    if isinstance(pe, Labeled):
        return is_single_letter(pe.body)
    return False


def validate(pe: Pe) -> None:
    """Check the invariants of a user-written expression."""
    seen: set[str] = set()
    for label in labels(pe):
        if label in seen:
            raise PeError(f"duplicate label {label!r}")
        seen.add(label)
    _validate_node(pe)


def _validate_node(pe: Pe) -> None:
    if isinstance(pe, (Bottom, InFlight)):
        raise PeError(f"{type(pe).__name__} cannot appear in a written expression")
    if isinstance(pe, Iter):
        if not is_single_letter(pe.until):
            raise PeError("right operand of U must match exactly one letter")
        _validate_node(pe.body)
        _validate_node(pe.until)
    elif isinstance(pe, (Concat, Or)):
        _validate_node(pe.left)
        _validate_node(pe.right)
    elif isinstance(pe, Labeled):
        _validate_node(pe.body)


def size(pe: Pe) -> int:
    if isinstance(pe, (Concat, Or)):
        return 1 + size(pe.left) + size(pe.right)
    if isinstance(pe, Iter):
        return 1 + size(pe.body) + size(pe.until)
    if isinstance(pe, (Labeled, InFlight)):
        return 1 + size(pe.body)
    return 1


# -- the one-step relation --------------------------------------------------

def _join(m0: MMap, m1: MMap) -> MMap:
    # within one step every label contributes at most one pair, so the deltas
    # of sub-steps are disjoint; a lone (⊥,p) only makes sense appended to the
    # accumulated m-map, never to ε
    if not m1:
        return m0
    if not m0:
        return m1
    if m0.keys() & m1.keys():
        return mmap_concat(m0, m1)
    return {**m0, **m1}


def _strip_eps(pe: Pe) -> Pe:
    while isinstance(pe, Concat) and (isinstance(pe.left, Epsilon) or isinstance(pe.right, Epsilon)):
        pe = pe.right if isinstance(pe.left, Epsilon) else pe.left
    return pe


def step_rule(pe: Pe, a: Event, p) -> tuple[str, Pe, MMap]:
    """Rewrite ``pe`` by letter ``a`` at position ``p``.

    Returns the name of the rule applied, the residual and the m-map delta.
    ``p`` may be any value, which lets the compiler pass a symbolic position.
    """
    if isinstance(pe, Atom):
        if pe.pattern.matches(a):
            return "Ltr", EPS, _NO_MAP
        return "Ltr-fail", BOT, _NO_MAP

    if isinstance(pe, Concat):
        if isinstance(pe.left, Epsilon):  # rewriting is modulo ε·α = α·ε = α
            return step_rule(pe.right, a, p)
        if isinstance(pe.right, Epsilon):
            return step_rule(pe.left, a, p)
        _, x1, m = step_rule(pe.left, a, p)
        if isinstance(x1, Bottom):
            return "Concat-⊥", BOT, _NO_MAP
        if nullable(x1):
            return "Concat-ε", pe.right, m
        return "Concat", Concat(x1, pe.right), m

    if isinstance(pe, Or):
        _, x0, m0 = step_rule(pe.left, a, p)
        _, x1, m1 = step_rule(pe.right, a, p)
        if nullable(x0) or nullable(x1):
            return "OR-end", EPS, _join(m0, m1)
        return "OR", _or(x0, x1), _join(m0, m1)

    if isinstance(pe, Iter):
        _, b1, mb = step_rule(pe.until, a, p)
        if nullable(b1):
            return "Iter-end", EPS, mb
        _, x1, mx = step_rule(pe.body, a, p)
        return "Iter", _cat(x1, pe), mx

    if isinstance(pe, Labeled):
        _, x1, m = step_rule(pe.body, a, p)
        if isinstance(x1, Bottom):
            return "L-fail", BOT, _NO_MAP
        if nullable(x1):
            return "L-ltr", EPS, _join(m, {pe.label: ((p, p),)})
        return "L-start", InFlight(pe.label, x1), _join({pe.label: ((p, None),)}, m)

    if isinstance(pe, InFlight):
        _, x1, m = step_rule(pe.body, a, p)
        if isinstance(x1, Bottom):
            return "L-fail", BOT, _NO_MAP
        if nullable(x1):
            return "L-end", EPS, _join(m, {pe.label: ((None, p),)})
        return "L-cont", InFlight(pe.label, x1), m

    if isinstance(pe, Epsilon):
        return "Eps", BOT, _NO_MAP
    if isinstance(pe, Bottom):
        return "Bot", BOT, _NO_MAP
    raise TypeError(f"not a prefix expression: {pe!r}")


class StepResult(NamedTuple):
    residual: Pe
    mmap: MMap


def step(pe: Pe, m: MMap, a: Event, p) -> StepResult:
    _, residual, delta = step_rule(pe, a, p)
    if isinstance(residual, Bottom):
        return StepResult(BOT, {})
    return StepResult(residual, mmap_concat(m, delta) if delta else m)


def evaluate(pe: Pe, w: Sequence[Event], start: int = 0) -> StepResult:
    """Fold ``step`` over ``w`` with positions ``start, start+1, ...``."""
    m: MMap = {}
    for i, a in enumerate(w):
        pe, m = step(pe, m, a, start + i)
    return StepResult(pe, m)


class Decomposition(NamedTuple):
    prefix: tuple
    mmap: MMap
    suffix: tuple


def decompose(pe: Pe, w: Sequence[Event], start: int = 0) -> Decomposition | None:
    """Split ``w`` into the prefix matched by ``pe`` and the rest.

    Returns ``None`` when no prefix matches (the evaluation fails or the word
    runs out first).
    """
    w = tuple(w)
    if isinstance(_strip_eps(pe), Epsilon):
        return Decomposition((), {}, w)
    m: MMap = {}
    for i, a in enumerate(w):
        pe, m = step(pe, m, a, start + i)
        if isinstance(_strip_eps(pe), Epsilon):
            return Decomposition(w[: i + 1], m, w[i + 1:])
        if isinstance(pe, Bottom):
            return None
    return None


class SliceRangeError(IndexError):
    pass


def slice_word(w: Sequence[Event], s: MString) -> tuple:
    """Concatenate the sub-words of ``w`` selected by the ranges of ``s``.

    Yields ε when any range has an undefined end.
    """
    if any(c is None or d is None for c, d in s):
        return ()
    out: list = []
    for c, d in s:
        if c >= len(w) or d >= len(w):
            raise SliceRangeError(f"range ({c},{d}) outside word of length {len(w)}")
        out.extend(w[c: d + 1])
    return tuple(out)


# -- rule audit -------------------------------------------------------------

def applicable_rules(pe: Pe, a: Event, p) -> list[str]:
    """Every rule whose premises hold at the root of ``pe``.

    Each premise is checked on its own, without reusing the choice made by
    ``step_rule``; the determinism property says the list has one element.
    """
    def sub(x: Pe) -> Pe:
        return step_rule(x, a, p)[1]

    if isinstance(pe, Concat) and isinstance(pe.left, Epsilon):
        return applicable_rules(pe.right, a, p)
    if isinstance(pe, Concat) and isinstance(pe.right, Epsilon):
        return applicable_rules(pe.left, a, p)
    rules = []
    if isinstance(pe, Epsilon):
        rules.append("Eps")
    if isinstance(pe, Bottom):
        rules.append("Bot")
    if isinstance(pe, Atom):
        if pe.pattern.matches(a):
            rules.append("Ltr")
        if not pe.pattern.matches(a):
            rules.append("Ltr-fail")
    if isinstance(pe, Concat):
        x1 = sub(pe.left)
        if not isinstance(x1, Bottom) and not nullable(x1):
            rules.append("Concat")
        if nullable(x1):
            rules.append("Concat-ε")
        if isinstance(x1, Bottom):
            rules.append("Concat-⊥")
    if isinstance(pe, Or):
        x0, x1 = sub(pe.left), sub(pe.right)
        if nullable(x0) or nullable(x1):
            rules.append("OR-end")
        if not nullable(x0) and not nullable(x1):
            rules.append("OR")
    if isinstance(pe, Iter):
        b1 = sub(pe.until)
        if nullable(b1):
            rules.append("Iter-end")
        if not nullable(b1):
            rules.append("Iter")
    if isinstance(pe, (Labeled, InFlight)):
        x1 = sub(pe.body)
        fresh = isinstance(pe, Labeled)
        if not nullable(x1) and not isinstance(x1, Bottom):
            rules.append("L-start" if fresh else "L-cont")
        if nullable(x1):
            rules.append("L-ltr" if fresh else "L-end")
        if isinstance(x1, Bottom):
            rules.append("L-fail")
    return rules


def audit_step(pe: Pe, a: Event, p) -> list[tuple[Pe, list[str]]]:
    """Nodes visited by a step whose rule choice is not unique, or disagrees."""
    if isinstance(pe, Concat) and isinstance(pe.left, Epsilon):
        return audit_step(pe.right, a, p)
    if isinstance(pe, Concat) and isinstance(pe.right, Epsilon):
        return audit_step(pe.left, a, p)
    bad = []
    rules = applicable_rules(pe, a, p)
    if len(rules) != 1 or rules[0] != step_rule(pe, a, p)[0]:
        bad.append((pe, rules))
    if isinstance(pe, Concat):
        bad += audit_step(pe.left, a, p)
    elif isinstance(pe, Or):
        bad += audit_step(pe.left, a, p) + audit_step(pe.right, a, p)
    elif isinstance(pe, Iter):
        bad += audit_step(pe.until, a, p)
        if not nullable(step_rule(pe.until, a, p)[1]):
            bad += audit_step(pe.body, a, p)
    elif isinstance(pe, (Labeled, InFlight)):
        bad += audit_step(pe.body, a, p)
    return bad


__all__ = [
    "Pe", "Epsilon", "Bottom", "Atom", "Concat", "Or", "Iter", "Labeled", "InFlight",
    "EPS", "BOT", "PeError", "seq", "alt", "nullable", "labels", "is_single_letter",
    "validate", "size", "step_rule", "step", "StepResult", "evaluate", "Decomposition",
    "decompose", "slice_word", "SliceRangeError", "applicable_rules", "audit_step",
]
