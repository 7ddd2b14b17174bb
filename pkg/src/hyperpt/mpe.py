"""Multi-trace prefix expressions: one PE per trace variable plus a condition.

Conditions are boolean formulas over equalities of atomic terms. A term is a
label (evaluating to its m-string), a trace slice ``t[x]`` (the events of
trace ``t`` selected by the m-string ``x``), or a constant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

from .events import Event, EventPattern
from .mstring import MMap, MString, mmap_concat
from .pe import Pe, decompose, labels, slice_word


class UnboundTraceVar(KeyError):
    pass


class ConditionTypeError(TypeError):
    """Comparison between a word-valued and an m-string-valued term."""


# -- terms ------------------------------------------------------------------

@dataclass(frozen=True)
class LabelRef:
    label: str


@dataclass(frozen=True)
class TraceSlice:
    var: str
    inner: object  # LabelRef or MStringConst


@dataclass(frozen=True)
class WordConst:
    word: tuple[Event, ...]


@dataclass(frozen=True)
class MStringConst:
    mstring: MString


Term = object

WORD, MSTRING = "word", "mstring"


def term_type(t: Term) -> str:
    if isinstance(t, (LabelRef, MStringConst)):
        return MSTRING
    if isinstance(t, (TraceSlice, WordConst)):
        return WORD
    raise TypeError(f"not a term: {t!r}")


# -- conditions -------------------------------------------------------------

@dataclass(frozen=True)
class Truth:
    pass


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class MatchesPattern:
    """``t = P`` for an event class ``P``: ``t`` is one event matching ``P``."""

    term: Term
    pattern: EventPattern


@dataclass(frozen=True)
class Not:
    cond: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


Condition = object
TRUE = Truth()


def neq(a: Term, b: Term) -> Not:
    return Not(Eq(a, b))


def lor(c: Condition, d: Condition) -> Not:
    return Not(And(Not(c), Not(d)))


def implies(c: Condition, d: Condition) -> Not:
    return lor(Not(c), d)


def conj(*cs: Condition) -> Condition:
    if not cs:
        return TRUE
    out = cs[-1]
    for c in reversed(cs[:-1]):
        out = And(c, out)
    return out


def not_in(t: Term, patterns: Sequence[EventPattern]) -> Condition:
    return conj(*(Not(MatchesPattern(t, p)) for p in patterns))


def check_condition(c: Condition) -> None:
    """Reject comparisons of a word with an m-string."""
    if isinstance(c, Eq):
        lt, rt = term_type(c.left), term_type(c.right)
        if lt != rt:
            raise ConditionTypeError(f"cannot compare {lt} with {rt}")
        for t in (c.left, c.right):
            _check_term(t)
    elif isinstance(c, MatchesPattern):
        if term_type(c.term) != WORD:
            raise ConditionTypeError("only word terms can be matched against an event class")
        _check_term(c.term)
    elif isinstance(c, Not):
        check_condition(c.cond)
    elif isinstance(c, And):
        check_condition(c.left)
        check_condition(c.right)
    elif not isinstance(c, Truth):
        raise TypeError(f"not a condition: {c!r}")


def _check_term(t: Term) -> None:
    if isinstance(t, TraceSlice) and term_type(t.inner) != MSTRING:
        raise ConditionTypeError("a trace is sliced by an m-string, not a word")


def condition_vars(c: Condition) -> set[str]:
    if isinstance(c, Eq):
        return _term_vars(c.left) | _term_vars(c.right)
    if isinstance(c, MatchesPattern):
        return _term_vars(c.term)
    if isinstance(c, Not):
        return condition_vars(c.cond)
    if isinstance(c, And):
        return condition_vars(c.left) | condition_vars(c.right)
    return set()


def _term_vars(t: Term) -> set[str]:
    return {t.var} if isinstance(t, TraceSlice) else set()


# -- evaluation -------------------------------------------------------------

def eval_term(t: Term, sigma: Mapping[str, Sequence[Event]], m: Mapping[str, MString]):
    if isinstance(t, LabelRef):
        return m.get(t.label, ())
    if isinstance(t, TraceSlice):
        try:
            w = sigma[t.var]
        except KeyError:
            raise UnboundTraceVar(t.var) from None
        return slice_word(w, eval_term(t.inner, sigma, m))
    if isinstance(t, WordConst):
        return t.word
    if isinstance(t, MStringConst):
        return t.mstring
    raise TypeError(f"not a term: {t!r}")


def eval_condition(c: Condition, sigma: Mapping[str, Sequence[Event]], m: Mapping[str, MString]) -> bool:
    if isinstance(c, Eq):
        return tuple(eval_term(c.left, sigma, m)) == tuple(eval_term(c.right, sigma, m))
    if isinstance(c, MatchesPattern):
        v = eval_term(c.term, sigma, m)
        return len(v) == 1 and isinstance(v[0], Event) and c.pattern.matches(v[0])
    if isinstance(c, Not):
        return not eval_condition(c.cond, sigma, m)
    if isinstance(c, And):
        return eval_condition(c.left, sigma, m) and eval_condition(c.right, sigma, m)
    if isinstance(c, Truth):
        return True
    raise TypeError(f"not a condition: {c!r}")


# -- MPEs -------------------------------------------------------------------

class MpeError(ValueError):
    pass


@dataclass(frozen=True)
class Mpe:
    bindings: tuple[tuple[str, Pe], ...]
    condition: Condition = TRUE

    def __post_init__(self):
        seen: dict[str, str] = {}
        for var, pe in self.bindings:
            for label in labels(pe):
                if label in seen and seen[label] != var:
                    raise MpeError(f"label {label!r} used for both {seen[label]} and {var}")
                seen[label] = var

    @property
    def vars(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.bindings)

    def pe(self, var: str) -> Pe:
        for v, pe in self.bindings:
            if v == var:
                return pe
        raise KeyError(var)


class MpeMatch(NamedTuple):
    verdict: bool
    mmap: MMap
    prefixes: dict  # var -> (matched prefix, rest)


def mpe_satisfied(mpe: Mpe, sigma: Mapping[str, Sequence[Event]]) -> MpeMatch | None:
    """Match each bound PE against its trace independently, then the condition.

    ``None`` when some PE matches no prefix.
    """
    m: MMap = {}
    prefixes = {}
    for var, pe in mpe.bindings:
        try:
            w = sigma[var]
        except KeyError:
            raise UnboundTraceVar(var) from None
        d = decompose(pe, w)
        if d is None:
            return None
        m = mmap_concat(m, d.mmap)
        prefixes[var] = (d.prefix, d.suffix)
    return MpeMatch(eval_condition(mpe.condition, sigma, m), m, prefixes)
