"""Observational determinism: the bundled transducers and a direct checker.

The direct checker interprets the asynchronous OD transducer by hand on pairs
of complete traces, without prefix expressions or configurations, and serves
as an independent reference for the monitor.
"""

from __future__ import annotations

import itertools
from importlib.resources import files
from typing import Iterable, Iterator, Mapping, Sequence

from .events import END, Event
from .dsl import parse_mpt


def load_spec(name: str):
    """A bundled MPT by file stem, e.g. ``od_async`` or ``example2``."""
    return parse_mpt(files("hyperpt.specs").joinpath(f"{name}.mpt").read_text(encoding="utf-8"))


def od_async():
    return load_spec("od_async")


def od_intro():
    return load_spec("od_intro")


def _is_low_in(e: Event) -> bool:
    return e.tag == "I" and len(e.args) == 2 and e.args[0] == "l"


def _is_low_out(e: Event) -> bool:
    return e.tag == "O" and len(e.args) == 2 and e.args[0] == "l"


E = Event("E")


def abstract_event(e: Event) -> Event:
    """Map every event that is neither a low input nor a low output to ``E``."""
    return e if _is_low_in(e) or _is_low_out(e) or e == END else E


def abstract_trace(trace: Sequence[Event]) -> tuple:
    return tuple(abstract_event(e) for e in trace)


def abstract_source(source: Iterable) -> Iterator:
    """Apply ``abstract_event`` to every event of a monitor event source."""
    for b in source:
        yield b._replace(events=tuple((t, abstract_event(e)) for t, e in b.events))


def _heads(trace: Sequence[Event]) -> list[Event]:
    # the low-I/O subsequence, ending in $; every edge skips the rest
    w = [e for e in trace if _is_low_in(e) or _is_low_out(e)]
    return w + [END]


def od_pair_violates(t1: Sequence[Event], t2: Sequence[Event]) -> bool:
    h1, h2 = _heads(t1), _heads(t2)
    i = 0
    while i < len(h1) and i < len(h2):
        a, b = h1[i], h2[i]
        io_a, io_b = _is_low_in(a) or _is_low_out(a), _is_low_in(b) or _is_low_out(b)
        out_a, out_b = _is_low_out(a) or a == END, _is_low_out(b) or b == END
        if io_a and io_b and a == b:
            i += 1
            continue
        if out_a and out_b and a != b:
            return True
        # any other situation either emits ⊤ or gets stuck; neither is a violation
        return False
    return False


def brute_force_od(traces: Mapping[str, Sequence[Event]]) -> set[tuple[str, str]]:
    """Violating pairs ``(a, b)`` with ``a`` before ``b`` in the mapping's order."""
    return {(a, b) for a, b in itertools.combinations(list(traces), 2)
            if od_pair_violates(traces[a], traces[b])}
