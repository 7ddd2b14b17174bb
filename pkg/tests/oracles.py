"""Reference implementations used only by the tests.

``oracle_decompose`` computes the shortest-prefix match of a prefix expression
by a big-step recursion over positions: each sub-expression reports where it
completes or fails and which label events it produced at which position. It
never builds residual expressions, so it shares no code path with the
small-step evaluator in the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from hyperpt.pe import Atom, Concat, Epsilon, Iter, Labeled, Or

DONE, FAIL, PENDING = "done", "fail", "pending"


@dataclass
class Outcome:
    kind: str
    at: int = 0          # DONE: position after the last letter read; FAIL: failing position
    tail: object = None  # DONE: None when the residual is exactly ε, else a nullable expression
    marks: list = field(default_factory=list)  # (position, label, "open" | "close" | "single")

    @property
    def last_step(self) -> float:
        if self.kind == DONE:
            return self.at - 1
        if self.kind == FAIL:
            return self.at
        return float("inf")


def _unit(e):
    # concatenation with ε is the other operand
    while isinstance(e, Concat) and (isinstance(e.left, Epsilon) or isinstance(e.right, Epsilon)):
        e = e.right if isinstance(e.left, Epsilon) else e.left
    return e


def _nullable(e) -> bool:
    e = _unit(e)
    if isinstance(e, Epsilon):
        return True
    if isinstance(e, Or):
        return _nullable(e.left) or _nullable(e.right)
    if isinstance(e, Labeled) and isinstance(e.body, Or):
        return _nullable(e.body)
    return False


class _Runner:
    def __init__(self, w):
        self.w = list(w)

    def run(self, e, i: int) -> Outcome:
        e = _unit(e)
        if isinstance(e, Epsilon):
            return Outcome(PENDING) if i >= len(self.w) else Outcome(FAIL, i)
        if isinstance(e, Atom):
            if i >= len(self.w):
                return Outcome(PENDING)
            return Outcome(DONE, i + 1) if e.pattern.matches(self.w[i]) else Outcome(FAIL, i)
        if isinstance(e, Concat):
            return self.concat(e, i)
        if isinstance(e, Or):
            return self.alt(e, i)
        if isinstance(e, Iter):
            return self.iterate(e, i)
        if isinstance(e, Labeled):
            return self.labeled(e, i)
        raise TypeError(e)

    def concat(self, e, i):
        a = self.run(e.left, i)
        if a.kind != DONE:
            return a
        if isinstance(e.right, Epsilon):
            return Outcome(DONE, a.at, None, a.marks)
        if _nullable(e.right):
            return Outcome(DONE, a.at, e.right, a.marks)
        b = self.run(e.right, a.at)
        return Outcome(b.kind, b.at, b.tail, a.marks + b.marks)

    def alt(self, e, i):
        a, b = self.run(e.left, i), self.run(e.right, i)
        done = [o for o in (a, b) if o.kind == DONE]
        if done:
            win = min(done, key=lambda o: o.last_step)
            other = b if win is a else a
            s = win.last_step
            if other.kind == FAIL and other.at < s:
                # the other branch died first; the survivor stands alone
                return Outcome(DONE, win.at, win.tail, win.marks + other.marks)
            kept = [m for m in other.marks if m[0] <= s]
            return Outcome(DONE, win.at, None, win.marks + kept)
        if a.kind == FAIL and b.kind == FAIL:
            return Outcome(FAIL, max(a.at, b.at), None, a.marks + b.marks)
        return Outcome(PENDING, 0, None, a.marks + b.marks)

    def iterate(self, e, i):
        marks = []
        while True:
            if i >= len(self.w):
                return Outcome(PENDING, 0, None, marks)
            stop = self.run(e.until, i)
            if stop.kind == DONE:
                return Outcome(DONE, i + 1, None, marks + stop.marks)
            body = self.run(e.body, i)
            marks = marks + body.marks
            if body.kind != DONE:
                return Outcome(body.kind, body.at, None, marks)
            j = body.at
            if j == i + 1 and body.tail is not None:
                rest = self.run(body.tail, j)
                marks = marks + rest.marks
                if rest.kind != DONE:
                    return Outcome(rest.kind, rest.at, None, marks)
                j = rest.at
            i = j

    def labeled(self, e, i):
        inner = self.run(e.body, i)
        if inner.kind == FAIL:
            opened = [(i, e.label, "open")] if inner.at > i else []
            return Outcome(FAIL, inner.at, None, opened + inner.marks)
        if inner.kind == PENDING:
            opened = [(i, e.label, "open")] if i < len(self.w) else []
            return Outcome(PENDING, 0, None, opened + inner.marks)
        if inner.at == i + 1:
            return Outcome(DONE, inner.at, None, inner.marks + [(i, e.label, "single")])
        return Outcome(DONE, inner.at, None,
                       [(i, e.label, "open")] + inner.marks + [(inner.at - 1, e.label, "close")])


def _fold(marks) -> dict:
    """Accumulate label events into m-strings, applying the concatenation rules."""
    out: dict = {}
    for pos, label, kind in sorted(marks, key=lambda m: m[0]):
        pair = {"open": (pos, None), "close": (None, pos), "single": (pos, pos)}[kind]
        s = list(out.get(label, []))
        if not s:
            if pair[0] is None:
                raise ValueError("close without open")
            s.append(pair)
        elif s[-1][1] is not None:
            s.append(pair)
        elif pair[0] is None:
            s[-1] = (s[-1][0], pair[1])
        else:
            s[-1] = pair
        out[label] = tuple(s)
    return out


def oracle_decompose(e, w):
    """``(prefix length, m-map)`` of the shortest match, or ``None``."""
    if isinstance(_unit(e), Epsilon):
        return 0, {}
    r = _Runner(w)
    marks = []
    i = 0
    cur = e
    while True:
        o = r.run(cur, i)
        marks += o.marks
        if o.kind != DONE:
            return None
        if o.tail is None:
            return o.at, _fold(marks)
        cur, i = o.tail, o.at
