"""Translate a prefix expression into a finite transducer.

States are the expressions reachable by rewriting (up to a canonical form),
edges are labeled by a letter class and emit the m-map of one rewrite with
the position kept symbolic.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .events import ANY, Event, EventPattern
from .mstring import MMap, format_mmap, mmap_concat
from .pe import (
    BOT, Atom, Bottom, Concat, Epsilon, InFlight, Iter, Labeled, Or, Pe,
    step_rule,
)


class AlphabetIncomplete(ValueError):
    pass


class _Position:
    """The symbolic position parameter carried by edge templates."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "p"

    __str__ = __repr__


P = _Position()


# -- canonical forms ----------------------------------------------------------

@lru_cache(maxsize=None)
def canon(pe: Pe) -> Pe:
    """Flatten and sort disjunctions; drop ε operands of concatenation."""
    if isinstance(pe, Or):
        ops = sorted((canon(x) for x in _or_operands(pe)), key=repr)
        out = ops[-1]
        for x in reversed(ops[:-1]):
            out = Or(x, out)
        return out
    if isinstance(pe, Concat):
        left, right = canon(pe.left), canon(pe.right)
        if isinstance(left, Bottom):
            return BOT
        if isinstance(left, Epsilon):
            return right
        if isinstance(right, Epsilon):
            return left
        return Concat(left, right)
    if isinstance(pe, Iter):
        return Iter(canon(pe.body), canon(pe.until))
    if isinstance(pe, Labeled):
        return Labeled(pe.label, canon(pe.body))
    if isinstance(pe, InFlight):
        return InFlight(pe.label, canon(pe.body))
    return pe


def _or_operands(pe: Pe) -> list[Pe]:
    out, stack = [], [pe]
    while stack:
        x = stack.pop()
        if isinstance(x, Or):
            stack += [x.right, x.left]
        else:
            out.append(x)
    return out


# -- letter classes -----------------------------------------------------------

def atom_patterns(pe: Pe) -> list[EventPattern]:
    out: list[EventPattern] = []
    stack = [pe]
    while stack:
        x = stack.pop()
        if isinstance(x, Atom):
            if x.pattern not in out:
                out.append(x.pattern)
        elif isinstance(x, (Concat, Or)):
            stack += [x.right, x.left]
        elif isinstance(x, Iter):
            stack += [x.until, x.body]
        elif isinstance(x, (Labeled, InFlight)):
            stack.append(x.body)
    return out


_FRESH = "\x00other"


def letter_classes(pe: Pe, extra: Iterable[Event] = ()) -> list[Event]:
    """One representative event per combination of atoms it satisfies.

    Candidates are the events the patterns name (wildcards filled with a fresh
    value) plus an event matching nothing; only the first representative of
    each match signature is kept.
    """
    pats = atom_patterns(pe)
    candidates = list(extra)
    for pt in pats:
        tag = _FRESH if pt.tag is ANY else pt.tag
        args = () if pt.args is None else tuple(_FRESH if a is ANY else a for a in pt.args)
        candidates.append(Event(tag, args))
    candidates.append(Event(_FRESH))
    seen, reps = set(), []
    for e in candidates:
        sig = tuple(pt.matches(e) for pt in pats)
        if sig not in seen:
            seen.add(sig)
            reps.append(e)
    return reps


# -- closure ------------------------------------------------------------------

@dataclass
class PeTransducer:
    """States ``states[0]`` (initial) … with ε accepting and ⊥ the sink.

    ``edges[(i, k)] = (j, template)`` for state ``i`` and letter ``alphabet[k]``.
    Neither ε nor ⊥ has outgoing edges; reading past them lands in ⊥.
    """

    states: list[Pe]
    alphabet: list[Event]
    edges: dict = field(default_factory=dict)
    patterns: list[EventPattern] = field(default_factory=list)

    @property
    def initial(self) -> Pe:
        return self.states[0]

    def index(self, pe: Pe) -> int:
        return self.states.index(pe)

    def classify(self, a: Event) -> int:
        sig = tuple(pt.matches(a) for pt in self.patterns)
        for k, rep in enumerate(self.alphabet):
            if tuple(pt.matches(rep) for pt in self.patterns) == sig:
                return k
        raise AlphabetIncomplete(f"event {a} falls outside every letter class")

    def run(self, w: Sequence[Event], start: int = 0) -> tuple[Pe, MMap]:
        i = 0
        m: MMap = {}
        for n, a in enumerate(w):
            hit = self.edges.get((i, self.classify(a)))
            if hit is None:
                return BOT, {}
            i, template = hit
            if isinstance(self.states[i], Bottom):
                return BOT, {}
            m = mmap_concat(m, instantiate(template, start + n))
        return self.states[i], m

    def transitions(self) -> list[tuple[int, int, list[int], MMap]]:
        """Edges grouped by (source, target, m-map): ``(i, j, letters, template)``."""
        groups: dict = {}
        for (i, k), (j, t) in sorted(self.edges.items()):
            key = (i, j, format_mmap(t))
            groups.setdefault(key, (i, j, [], t))[2].append(k)
        return list(groups.values())

    def live_states(self) -> list[Pe]:
        return [s for s in self.states if not isinstance(s, Bottom)]


def instantiate(template: MMap, p: int) -> MMap:
    return {
        label: tuple(tuple(p if x is P else x for x in pair) for pair in s)
        for label, s in template.items()
    }


def derivative_closure(pe: Pe, alphabet: Sequence[Event] | None = None,
                       max_states: int = 100_000) -> PeTransducer:
    """Explore every expression reachable from ``pe`` by single steps."""
    pats = atom_patterns(pe)
    if alphabet is None:
        alphabet = letter_classes(pe)
    alphabet = list(alphabet)
    for pt in pats:
        if not any(pt.matches(a) for a in alphabet):
            raise AlphabetIncomplete(f"no letter of the alphabet matches {pt}")
    start = canon(pe)
    t = PeTransducer([start], alphabet, {}, pats)
    ids = {start: 0}
    todo = deque([0])
    while todo:
        i = todo.popleft()
        src = t.states[i]
        if isinstance(src, (Epsilon, Bottom)):
            continue
        for k, a in enumerate(alphabet):
            _, dst, delta = step_rule(src, a, P)
            dst = canon(dst)
            if isinstance(dst, Bottom):
                delta = {}
            j = ids.get(dst)
            if j is None:
                if len(t.states) >= max_states:
                    raise RuntimeError(f"more than {max_states} derivatives")
                j = ids[dst] = len(t.states)
                t.states.append(dst)
                todo.append(j)
            t.edges[(i, k)] = (j, dict(delta))
    return t


def compile_pe(pe: Pe, alphabet: Sequence[Event] | None = None) -> PeTransducer:
    return derivative_closure(pe, alphabet)


# -- export -------------------------------------------------------------------

def _letters(t: PeTransducer, ks: list[int]) -> str:
    if len(ks) == len(t.alphabet) and len(ks) > 1:
        return "*"
    return ",".join(_letter_name(t.alphabet[k]) for k in ks)


def _letter_name(e: Event) -> str:
    return "other" if e.tag == _FRESH else str(e).replace(_FRESH, "*")


def edge_label(t: PeTransducer, ks: list[int], template: MMap) -> str:
    return f"{_letters(t, ks)},p/{format_mmap(template)}"


def _state_name(pe: Pe) -> str:
    return str(pe)


def export_dot(t: PeTransducer, hide_sink: bool = False) -> str:
    lines = ["digraph pe {", "  rankdir=LR;", '  start [shape=point];']
    for i, s in enumerate(t.states):
        if hide_sink and isinstance(s, Bottom):
            continue
        shape = "doublecircle" if isinstance(s, Epsilon) else "box"
        lines.append(f"  n{i} [shape={shape}, label={json.dumps(_state_name(s), ensure_ascii=False)}];")
    lines.append("  start -> n0;")
    for i, j, ks, tmpl in t.transitions():
        if hide_sink and isinstance(t.states[j], Bottom):
            continue
        label = json.dumps(edge_label(t, ks, tmpl), ensure_ascii=False)
        lines.append(f"  n{i} -> n{j} [label={label}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_json(t: PeTransducer) -> str:
    return json.dumps({
        "alphabet": [_letter_name(a) for a in t.alphabet],
        "states": [
            {"id": i, "expr": _state_name(s), "accepting": isinstance(s, Epsilon),
             "sink": isinstance(s, Bottom)}
            for i, s in enumerate(t.states)
        ],
        "initial": 0,
        "edges": [
            {"from": i, "to": j, "letters": [_letter_name(t.alphabet[k]) for k in ks],
             "mmap": format_mmap(tmpl)}
            for i, j, ks, tmpl in t.transitions()
        ],
    }, ensure_ascii=False, indent=2)
