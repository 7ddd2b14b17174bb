"""Text formats: prefix expressions, conditions, MPT files and trace files.

PE grammar, loosest to tightest::

    sum   := cat ('+' cat)*
    cat   := iter (['.'] iter)*          juxtaposition needs whitespace
    iter  := unit ['U' iter]             the right operand must be one letter
    unit  := '(' sum ')' | '[' sum ']@' NAME | atom | 'eps' | 'ε'
    atom  := '_' | '$' | TAG | TAG '(' arg (',' arg)* ')' | X_y

``X_y`` with a single upper-case ``X`` is the class ``X(y,_)``. Identifiers are
whole tags, so ``ab`` is one letter; write ``a b`` or ``a.b`` for two.

Conditions::

    cond  := disj [('->' | '=>') cond]
    disj  := conj (('||' | 'or') conj)*
    conj  := neg (('&&' | 'and') neg)*
    neg   := ('!' | 'not') neg | '(' cond ')' | 'true' | 'false' | cmp
    cmp   := term ('=' | '!=') term | term ['not'] 'in' '{' term (',' term)* '}'
    term  := VAR '[' LABEL ']' | LABEL | pattern | 'eps' | '<' ... '>'

A term that is a pattern (``O_l``, ``$``, ``I(l,_)``) turns the comparison
into an event-class test. A bare name is a label if the edge declares one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .events import ANY, END, U64_MAX, Event, EventPattern, klass, letter
from .mpe import (
    TRUE, And, ConditionTypeError, Eq, LabelRef, MatchesPattern, Mpe, MpeError,
    MStringConst, Not, TraceSlice, Truth, WordConst, check_condition,
    implies, lor,
)
from .mstring import format_mstring
from .pe import (
    BOT, EPS, Atom, Bottom, Concat, Epsilon, InFlight, Iter, Labeled, Or, Pe,
    alt, is_single_letter, labels, seq,
)


class DslSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


class SemanticError(ValueError):
    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


# -- lexer --------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<int>\d+)
  | (?P<id>[^\W\d]\w*)
  | (?P<sym>!=|&&|\|\||->|=>|\+=|[()\[\]{}@^+.,$=!<>;:⊥⊤≠¬∧∨⟹→∈∉])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Tok:
    kind: str  # "int", "id", "sym", "eof"
    text: str
    pos: int
    end: int


def tokenize(text: str, base: int = 0) -> list[Tok]:
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            raise _err(text, i, f"unexpected character {text[i]!r}", base)
        if m.lastgroup != "ws":
            out.append(Tok(m.lastgroup, m.group(), base + i, base + m.end()))
        i = m.end()
    out.append(Tok("eof", "", base + len(text), base + len(text)))
    return out


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _err(text: str, pos: int, msg: str, base: int = 0) -> DslSyntaxError:
    line, col = _line_col(text, pos)
    return DslSyntaxError(msg, line, col)


_SYNONYMS = {"≠": "!=", "¬": "!", "∧": "&&", "∨": "||", "⟹": "->", "→": "->", "=>": "->"}
_MACRO = re.compile(r"^([A-Z])_(\w+)$")


class _Parser:
    def __init__(self, text: str, source: str | None = None, base: int = 0):
        self.source = text if source is None else source
        self.toks = tokenize(text, base)
        self.i = 0

    # helpers
    def peek(self, k: int = 0) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Tok:
        t = self.peek()
        self.i += 1
        return t

    def at(self, *texts: str) -> bool:
        t = self.peek()
        return t.kind in ("sym", "id") and _SYNONYMS.get(t.text, t.text) in texts

    def accept(self, *texts: str) -> Tok | None:
        if self.at(*texts):
            return self.next()
        return None

    def expect(self, text: str) -> Tok:
        t = self.accept(text)
        if t is None:
            raise self.error(f"expected {text!r}, found {self.peek().text or 'end of input'!r}")
        return t

    def error(self, msg: str, tok: Tok | None = None) -> DslSyntaxError:
        tok = tok or self.peek()
        line, col = _line_col(self.source, tok.pos)
        return DslSyntaxError(msg, line, col)

    def done(self) -> None:
        if self.peek().kind != "eof":
            raise self.error(f"unexpected {self.peek().text!r}")

    # event patterns and values
    def value(self):
        t = self.next()
        if t.kind == "int":
            v = int(t.text)
            if v > U64_MAX:
                raise self.error("integer does not fit in 64 bits", t)
            return v
        if t.kind == "id" and t.text != "_":
            return t.text
        raise self.error(f"expected a value, found {t.text!r}", t)

    def args(self, allow_any: bool) -> tuple:
        self.expect("(")
        out = []
        if not self.at(")"):
            while True:
                if allow_any and self.peek().kind == "id" and self.peek().text == "_":
                    self.next()
                    out.append(ANY)
                else:
                    out.append(self.value())
                if not self.accept(","):
                    break
        self.expect(")")
        return tuple(out)

    def glued_paren(self, t: Tok) -> bool:
        n = self.peek()
        return n.kind == "sym" and n.text == "(" and n.pos == t.end

    def pattern(self) -> EventPattern:
        t = self.next()
        if t.kind == "sym" and t.text == "$":
            return letter("$")
        if t.kind != "id":
            raise self.error(f"expected an event pattern, found {t.text!r}", t)
        tag = ANY if t.text == "_" else t.text
        if self.glued_paren(t):
            return EventPattern(tag, self.args(True))
        if tag is ANY:
            return EventPattern()
        m = _MACRO.match(t.text)
        if m:
            v = m.group(2)
            return klass(m.group(1), int(v) if v.isdigit() else v)
        return letter(t.text)

    def event(self) -> Event:
        t = self.next()
        if t.kind != "id" or t.text == "_":
            raise self.error(f"expected an event, found {t.text!r}", t)
        if self.glued_paren(t):
            return Event(t.text, self.args(False))
        return Event(t.text)


# -- prefix expressions -------------------------------------------------------

_RESERVED = {"U", "eps", "ε"}


class _PeParser(_Parser):
    def __init__(self, text: str, internal: bool = False, **kw):
        super().__init__(text, **kw)
        self.internal = internal

    def starts_unit(self) -> bool:
        t = self.peek()
        if t.kind == "id":
            return t.text != "U"
        return t.kind == "sym" and t.text in ("(", "[", "$") or (self.internal and t.text == "⊥")

    def sum(self) -> Pe:
        parts = [self.cat()]
        while self.accept("+"):
            parts.append(self.cat())
        return alt(*parts)

    def cat(self) -> Pe:
        parts = [self.iter()]
        while True:
            if self.accept("."):
                parts.append(self.iter())
            elif self.starts_unit():
                parts.append(self.iter())
            else:
                break
        return seq(*parts)

    def iter(self) -> Pe:
        left = self.unit()
        u = self.accept("U")
        if u is None:
            return left
        if not self.starts_unit():
            raise self.error("missing right operand of U")
        right = self.iter()
        if not is_single_letter(right):
            line, col = _line_col(self.source, u.pos)
            raise SemanticError("InvalidIterRhs", f"{line}:{col}: right operand of U must match exactly one letter")
        return Iter(left, right)

    def unit(self) -> Pe:
        if self.accept("("):
            pe = self.sum()
            self.expect(")")
            return pe
        if self.accept("["):
            body = self.sum()
            self.expect("]")
            if self.accept("@"):
                return Labeled(self.label(), body)
            if self.internal and self.accept("^"):
                return InFlight(self.label(), body)
            raise self.error("expected '@label' after ']'")
        t = self.peek()
        if t.kind == "id" and t.text in ("eps", "ε"):
            self.next()
            return EPS
        if self.internal and t.kind == "sym" and t.text == "⊥":
            self.next()
            return BOT
        if t.kind == "id" and t.text == "U":
            raise self.error("missing left operand of U")
        if t.kind == "id" or (t.kind == "sym" and t.text == "$"):
            return Atom(self.pattern())
        raise self.error(f"unexpected {t.text or 'end of input'!r}")

    def label(self) -> str:
        t = self.next()
        if t.kind != "id" or t.text in _RESERVED or t.text == "_":
            raise self.error("expected a label name", t)
        return t.text


def parse_pe(text: str, *, internal: bool = False) -> Pe:
    """Parse a prefix expression.

    ``internal`` also admits ``⊥`` and in-flight ``[..]^l`` nodes, which only
    arise during evaluation.
    """
    p = _PeParser(text, internal=internal)
    if p.peek().kind == "eof":
        raise p.error("empty expression")
    pe = p.sum()
    p.done()
    _check_labels(pe)
    return pe


def _parse_pe_at(source: str, start: int, end: int) -> Pe:
    p = _PeParser(source[start:end], source=source, base=start)
    if p.peek().kind == "eof":
        raise p.error("empty expression")
    pe = p.sum()
    p.done()
    _check_labels(pe)
    return pe


def _check_labels(pe: Pe) -> None:
    seen = set()
    for label in labels(pe):
        if label in seen:
            raise SemanticError("DuplicateLabel", f"label {label!r} occurs twice")
        seen.add(label)


_SUM, _CAT, _ITER, _UNIT = range(4)


def format_pe(pe: Pe, prec: int = _SUM) -> str:
    """Print ``pe`` so that ``parse_pe`` gives it back."""
    if isinstance(pe, Epsilon):
        return "eps"
    if isinstance(pe, Bottom):
        return "⊥"
    if isinstance(pe, Atom):
        return str(pe.pattern)
    if isinstance(pe, Labeled):
        return f"[{format_pe(pe.body)}]@{pe.label}"
    if isinstance(pe, InFlight):
        return f"[{format_pe(pe.body)}]^{pe.label}"
    if isinstance(pe, Concat):
        s, own = f"{format_pe(pe.left, _ITER)} {format_pe(pe.right, _CAT)}", _CAT
    elif isinstance(pe, Or):
        s, own = f"{format_pe(pe.left, _CAT)} + {format_pe(pe.right, _SUM)}", _SUM
    elif isinstance(pe, Iter):
        s, own = f"{format_pe(pe.body, _UNIT)} U {format_pe(pe.until, _ITER)}", _ITER
    else:
        raise TypeError(f"not a prefix expression: {pe!r}")
    return f"({s})" if prec > own else s


# -- conditions ---------------------------------------------------------------

class _Pattern:
    """Parse-time wrapper: a term position holding an event class."""

    def __init__(self, pattern: EventPattern):
        self.pattern = pattern


class _CondParser(_Parser):
    def __init__(self, text: str, labels: Iterable[str], trace_vars: Iterable[str] | None, **kw):
        super().__init__(text, **kw)
        self.labels = set(labels)
        self.trace_vars = None if trace_vars is None else set(trace_vars)

    def cond(self):
        left = self.disj()
        if self.accept("->"):
            return implies(left, self.cond())
        return left

    def disj(self):
        out = self.conj()
        while self.accept("||", "or"):
            out = lor(out, self.conj())
        return out

    def conj(self):
        parts = [self.neg()]
        while self.accept("&&", "and"):
            parts.append(self.neg())
        out = parts[-1]
        for c in reversed(parts[:-1]):
            out = And(c, out)
        return out

    def neg(self):
        if self.at("not") and not (self.peek(1).kind == "id" and self.peek(1).text == "in"):
            self.next()
            return Not(self.neg())
        if self.accept("!"):
            return Not(self.neg())
        if self.accept("("):
            c = self.cond()
            self.expect(")")
            return c
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return Not(TRUE)
        return self.cmp()

    def cmp(self):
        start = self.peek()
        left = self.term()
        if self.accept("="):
            return self.compare(left, self.term(), start)
        if self.accept("!="):
            return Not(self.compare(left, self.term(), start))
        negate = False
        if self.accept("∉"):
            negate = True
        elif self.accept("not"):
            self.expect("in")
            negate = True
        elif not self.accept("in", "∈"):
            raise self.error("expected a comparison operator")
        self.expect("{")
        options = [self.term()]
        while self.accept(","):
            options.append(self.term())
        self.expect("}")
        tests = [self.compare(left, o, start) for o in options]
        if negate:
            out = Not(tests[-1])
            for t in reversed(tests[:-1]):
                out = And(Not(t), out)
            return out
        out = tests[-1]
        for t in reversed(tests[:-1]):
            out = lor(t, out)
        return out

    def compare(self, a, b, at: Tok):
        if isinstance(a, _Pattern) and isinstance(b, _Pattern):
            raise self.error("cannot compare two event classes", at)
        if isinstance(b, _Pattern):
            return MatchesPattern(a, b.pattern)
        if isinstance(a, _Pattern):
            return MatchesPattern(b, a.pattern)
        return Eq(a, b)

    def term(self):
        t = self.peek()
        if t.kind == "sym" and t.text == "<":
            return self.literal()
        if t.kind == "id" and t.text in ("eps", "ε"):
            self.next()
            return WordConst(())
        if t.kind == "id" and self.peek(1).kind == "sym" and self.peek(1).text == "[":
            self.next()
            if self.trace_vars is not None and t.text not in self.trace_vars:
                raise SemanticError("UnknownTraceVar", f"unknown trace variable {t.text!r}")
            self.expect("[")
            if self.at("<"):
                inner = self.literal()
            else:
                n = self.next()
                if n.kind != "id" or n.text not in self.labels:
                    raise SemanticError("UnknownLabel", f"{n.text!r} is not a label of this edge")
                inner = LabelRef(n.text)
            self.expect("]")
            return TraceSlice(t.text, inner)
        if t.kind == "id" and t.text in self.labels and not self.glued_paren(t):
            self.next()
            return LabelRef(t.text)
        return _Pattern(self.pattern())

    def literal(self):
        self.expect("<")
        if self.accept(">"):
            return MStringConst(())
        if self.at("("):
            pairs = []
            while self.accept("("):
                c = self.bound()
                self.expect(",")
                d = self.bound()
                self.expect(")")
                pairs.append((c, d))
            self.expect(">")
            return MStringConst(tuple(pairs))
        events = []
        while not self.at(">"):
            events.append(self.event())
        self.expect(">")
        return WordConst(tuple(events))

    def bound(self):
        if self.accept("⊥"):
            return None
        t = self.next()
        if t.kind != "int":
            raise self.error("expected a position", t)
        return int(t.text)


def parse_condition(text: str, labels: Iterable[str] = (), trace_vars: Iterable[str] | None = None):
    p = _CondParser(text, labels, trace_vars)
    c = p.cond()
    p.done()
    _typecheck(c)
    return c


def _parse_condition_at(source: str, start: int, end: int, labels, trace_vars):
    p = _CondParser(source[start:end], labels, trace_vars, source=source, base=start)
    c = p.cond()
    p.done()
    _typecheck(c)
    return c


def _typecheck(c) -> None:
    try:
        check_condition(c)
    except ConditionTypeError as e:
        raise SemanticError("TypeMismatch", str(e)) from None


def format_term(t) -> str:
    if isinstance(t, LabelRef):
        return t.label
    if isinstance(t, TraceSlice):
        return f"{t.var}[{format_term(t.inner)}]"
    if isinstance(t, WordConst):
        return "<" + " ".join(str(e) for e in t.word) + ">" if t.word else "eps"
    if isinstance(t, MStringConst):
        return "<" + (format_mstring(t.mstring) if t.mstring else "") + ">"
    raise TypeError(f"not a term: {t!r}")


def format_condition(c, _nested: bool = False) -> str:
    if isinstance(c, Truth):
        return "true"
    if isinstance(c, Eq):
        return f"{format_term(c.left)} = {format_term(c.right)}"
    if isinstance(c, MatchesPattern):
        return f"{format_term(c.term)} = {c.pattern}"
    if isinstance(c, Not):
        inner = c.cond
        if isinstance(inner, Eq):
            return f"{format_term(inner.left)} != {format_term(inner.right)}"
        if isinstance(inner, MatchesPattern):
            return f"{format_term(inner.term)} != {inner.pattern}"
        if isinstance(inner, Truth):
            return "false"
        return f"!({format_condition(inner)})"
    if isinstance(c, And):
        left = format_condition(c.left)
        if isinstance(c.left, And):
            left = f"({left})"
        s = f"{left} && {format_condition(c.right)}"
        return s
    raise TypeError(f"not a condition: {c!r}")


# -- MPT files ----------------------------------------------------------------

_SYMBOLS = {"⊥": Event("⊥"), "BOT": Event("⊥"), "⊤": Event("⊤"), "TOP": Event("⊤")}


def _strip_comments(text: str) -> str:
    # keep offsets stable: blank out comments instead of deleting them
    return re.sub(r"#[^\n]*", lambda m: " " * len(m.group()), text)


def parse_mpt(text: str):
    from .mpt import Edge, Mpt

    src = _strip_comments(text.replace("\r\n", "\n"))
    header: dict[str, tuple[str, int]] = {}
    edges_raw = []
    i = 0
    edge_head = re.compile(r"\s*(\w+)\s*->\s*(\w+)\s*\{")
    header_line = re.compile(r"[ \t]*(\w+)[ \t]*:[ \t]*([^\n]*)")
    blank = re.compile(r"\s+")
    while i < len(src):
        m = blank.match(src, i)
        if m:
            i = m.end()
            continue
        m = edge_head.match(src, i)
        if m:
            body_start = m.end()
            body_end = _matching_brace(src, body_start)
            edges_raw.append((m.group(1), m.group(2), body_start, body_end, m.start(1)))
            i = body_end + 1
            continue
        m = header_line.match(src, i)
        if m:
            key = m.group(1)
            if key in header:
                raise _err(src, i, f"duplicate header {key!r}")
            header[key] = (m.group(2).strip(), i)
            i = m.end()
            continue
        raise _err(src, i, "expected a header line or an edge")

    for key in ("in", "out", "states", "init"):
        if key not in header:
            raise DslSyntaxError(f"missing header {key!r}")
    known = {"in", "out", "states", "init", "deterministic", "alphabet_in", "alphabet_out", "name"}
    for key, (_, pos) in header.items():
        if key not in known:
            raise _err(src, pos, f"unknown header {key!r}")

    def names(key):
        raw, pos = header[key]
        items = [x.strip() for x in raw.split(",") if x.strip()]
        for x in items:
            if not re.fullmatch(r"[^\W\d]\w*", x):
                raise _err(src, pos, f"bad name {x!r} in {key!r}")
        return tuple(items)

    in_vars, out_vars, states = names("in"), names("out"), names("states")
    init = header["init"][0]
    if init not in states:
        raise SemanticError("UnknownState", f"initial state {init!r} is not declared")
    det_raw = header.get("deterministic", ("yes", 0))[0].lower()
    if det_raw not in ("yes", "no", "true", "false"):
        raise _err(src, header["deterministic"][1], "deterministic must be yes or no")

    edges = []
    for source, target, b0, b1, pos in edges_raw:
        for st in (source, target):
            if st not in states:
                raise SemanticError("UnknownState", f"state {st!r} is not declared")
        edges.append(_parse_edge(src, source, target, b0, b1, in_vars, out_vars, Edge))

    return Mpt(
        in_vars=in_vars,
        out_vars=out_vars,
        states=states,
        initial=init,
        edges=tuple(edges),
        deterministic=det_raw in ("yes", "true"),
        in_alphabet=header.get("alphabet_in", ("", 0))[0],
        out_alphabet=header.get("alphabet_out", ("", 0))[0],
        name=header.get("name", ("", 0))[0],
    )


def _matching_brace(src: str, i: int) -> int:
    depth = 1
    while i < len(src):
        if src[i] == "{":
            depth += 1
        elif src[i] == "}":
            depth -= 1
            if depth == 0:
                return i
        i += 1
    raise _err(src, len(src), "unterminated edge block")


def _split_items(src: str, start: int, end: int) -> list[tuple[int, int]]:
    out = []
    depth = 0
    s = start
    for i in range(start, end):
        ch = src[i]
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        elif ch == ";" and depth == 0:
            out.append((s, i))
            s = i + 1
    out.append((s, end))
    return [(a, b) for a, b in out if src[a:b].strip()]


def _parse_edge(src, source, target, b0, b1, in_vars, out_vars, Edge):
    item = re.compile(r"\s*(\w+)\s*:")
    bindings = []
    cond_span = None
    outputs: dict[str, list] = {}
    prio = 0
    for a, b in _split_items(src, b0, b1):
        m = item.match(src, a)
        if m is None or m.end() > b:
            raise _err(src, a, "expected 'name: ...'")
        key, rest = m.group(1), m.end()
        if key == "cond":
            if cond_span is not None:
                raise _err(src, a, "duplicate cond")
            cond_span = (rest, b)
        elif key == "out":
            var, items = _parse_output(src, rest, b, in_vars, out_vars)
            outputs.setdefault(var, []).extend(items)
        elif key == "prio":
            raw = src[rest:b].strip()
            if not re.fullmatch(r"-?\d+", raw):
                raise _err(src, rest, "prio must be an integer")
            prio = int(raw)
        else:
            if key not in in_vars:
                raise SemanticError("UnknownTraceVar", f"{key!r} is not an input trace variable")
            if any(v == key for v, _ in bindings):
                raise _err(src, a, f"{key!r} bound twice")
            bindings.append((key, _parse_pe_at(src, rest, b)))
    try:
        mpe_labels = [l for _, pe in bindings for l in labels(pe)]
        cond = TRUE
        if cond_span is not None:
            cond = _parse_condition_at(src, cond_span[0], cond_span[1], mpe_labels, in_vars)
        mpe = Mpe(tuple(bindings), cond)
    except MpeError as e:
        raise SemanticError("DuplicateLabelAcrossTraces", str(e)) from None
    return Edge(source, target, mpe, tuple((v, tuple(xs)) for v, xs in outputs.items()), prio)


def _parse_output(src, start, end, in_vars, out_vars):
    m = re.compile(r"\s*(\w+)\s*\+=").match(src, start)
    if m is None or m.end() > end:
        raise _err(src, start, "expected 'var += symbols'")
    var = m.group(1)
    if var not in out_vars:
        raise SemanticError("UnknownTraceVar", f"{var!r} is not an output trace variable")
    p = _Parser(src[m.end():end], source=src, base=m.end())
    items = []
    while p.peek().kind != "eof":
        t = p.peek()
        if t.text in _SYMBOLS:
            p.next()
            items.append(_SYMBOLS[t.text])
        elif t.kind == "id" and p.peek(1).text == "[" and p.peek(1).kind == "sym":
            p.next()
            if t.text not in in_vars:
                raise SemanticError("UnknownTraceVar", f"{t.text!r} is not an input trace variable")
            p.expect("[")
            n = p.next()
            p.expect("]")
            items.append(TraceSlice(t.text, LabelRef(n.text)))
        else:
            items.append(p.event())
    return var, items


def format_mpt(mpt) -> str:
    lines = []
    if mpt.name:
        lines.append(f"name: {mpt.name}")
    lines.append(f"in: {', '.join(mpt.in_vars)}")
    lines.append(f"out: {', '.join(mpt.out_vars)}")
    if mpt.in_alphabet:
        lines.append(f"alphabet_in: {mpt.in_alphabet}")
    if mpt.out_alphabet:
        lines.append(f"alphabet_out: {mpt.out_alphabet}")
    lines.append(f"states: {', '.join(mpt.states)}")
    lines.append(f"init: {mpt.initial}")
    lines.append(f"deterministic: {'yes' if mpt.deterministic else 'no'}")
    for e in mpt.edges:
        lines.append("")
        lines.append(f"{e.source} -> {e.target} {{")
        for var, pe in e.mpe.bindings:
            lines.append(f"  {var}: {format_pe(pe)};")
        if not isinstance(e.mpe.condition, Truth):
            lines.append(f"  cond: {format_condition(e.mpe.condition)};")
        for var, items in e.output:
            text = " ".join(format_term(x) if isinstance(x, TraceSlice) else str(x) for x in items)
            lines.append(f"  out: {var} += {text};")
        if e.priority:
            lines.append(f"  prio: {e.priority};")
        lines.append("}")
    return "\n".join(lines) + "\n"


# -- trace files --------------------------------------------------------------

_EVENT_LINE = re.compile(r"([^\W\d]\w*)(?:\(([^()]*)\))?")
_IDENT = re.compile(r"[^\W\d]\w*")


def parse_trace(text: str) -> tuple[Event, ...]:
    """One event per line: ``TAG`` or ``TAG(arg,...)``; ``#`` starts a comment."""
    out = []
    for n, raw in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "$":
            raise DslSyntaxError("'$' is reserved for the end marker", n, 1)
        m = _EVENT_LINE.fullmatch(line)
        if m is None:
            raise DslSyntaxError(f"malformed event {line!r}", n, 1)
        args = ()
        if m.group(2) is not None:
            args = tuple(_trace_value(a.strip(), n) for a in m.group(2).split(",")) if m.group(2).strip() else ()
        out.append(Event(m.group(1), args))
    return tuple(out)


def _trace_value(raw: str, line: int):
    if raw.isdigit():
        v = int(raw)
        if v > U64_MAX:
            raise DslSyntaxError(f"{raw} does not fit in 64 bits", line, 1)
        return v
    if _IDENT.fullmatch(raw) and raw != "_":
        return raw
    raise DslSyntaxError(f"bad argument {raw!r}", line, 1)


def format_trace(word: Sequence[Event]) -> str:
    return "".join(f"{e}\n" for e in word if e != END)


__all__ = [
    "DslSyntaxError", "SemanticError", "parse_pe", "format_pe", "parse_condition",
    "format_condition", "format_term", "parse_mpt", "format_mpt", "parse_trace",
    "format_trace", "tokenize",
]
