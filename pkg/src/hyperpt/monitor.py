"""Online monitoring of k-safety hyperproperties with MPTs.

Every k-tuple of traces runs its own instance of the transducer. An instance
is a set of configurations, one per outgoing edge of its current state, each
holding the edge's partially rewritten PEs. Traces and their events arrive
incrementally from an event source.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .compiler import P, instantiate
from .events import BOT, END, TOP, Event
from .mpe import eval_condition
from .mpt import Edge, Mpt, arbitrate, strictly_smaller
from .mstring import MMap, mmap_concat
from .pe import Bottom, Epsilon, Pe, step_rule


class UnknownTrace(KeyError):
    pass


class AppendAfterClose(RuntimeError):
    pass


# -- event sources ------------------------------------------------------------

class Batch(NamedTuple):
    new: tuple = ()       # trace ids appearing now, in arrival order
    events: tuple = ()    # (trace id, Event) appended in order
    closed: tuple = ()    # trace ids that received their last event


def batch_source(traces: Mapping[str, Sequence[Event]]) -> Iterator[Batch]:
    """Every trace complete and closed in a single batch."""
    ids = tuple(traces)
    events = tuple((t, e) for t in ids for e in traces[t])
    yield Batch(ids, events, ids)


def staggered_source(traces: Mapping[str, Sequence[Event]]) -> Iterator[Batch]:
    """One new trace per round; every open trace gets one event per round."""
    ids = list(traces)
    cursor: dict[str, int] = {}
    pending = list(ids)
    while pending or cursor:
        new = (pending.pop(0),) if pending else ()
        for t in new:
            cursor[t] = 0
        events, closed = [], []
        for t in list(cursor):
            w = traces[t]
            if cursor[t] < len(w):
                events.append((t, w[cursor[t]]))
                cursor[t] += 1
            if cursor[t] >= len(w):
                closed.append(t)
                del cursor[t]
        yield Batch(new, tuple(events), tuple(closed))


def random_source(traces: Mapping[str, Sequence[Event]], rng, max_chunk: int = 3) -> Iterator[Batch]:
    """A random interleaving of arrivals, events and closes."""
    ids = list(traces)
    cursor: dict[str, int] = {}
    while ids or cursor:
        new = []
        if ids and (not cursor or rng.random() < 0.3):
            new.append(ids.pop(0))
            cursor[new[-1]] = 0
        events, closed = [], []
        for t in list(cursor):
            if t in new and rng.random() < 0.5:
                continue
            if rng.random() < 0.4:
                continue
            w = traces[t]
            for _ in range(rng.randint(1, max_chunk)):
                if cursor[t] >= len(w):
                    break
                events.append((t, w[cursor[t]]))
                cursor[t] += 1
            if cursor[t] >= len(w) and rng.random() < 0.7:
                closed.append(t)
                del cursor[t]
        yield Batch(tuple(new), tuple(events), tuple(closed))


# -- configurations -----------------------------------------------------------

@dataclass
class Configuration:
    edge: Edge
    pes: list            # residual PE per input variable, None when unbound
    positions: list      # absolute read offsets per input variable
    mmap: MMap = field(default_factory=dict)
    matched: bool = False


@dataclass
class ConfigSet:
    state: str
    tuple_ids: tuple     # trace id per input variable
    origin: tuple        # positions at spawn time
    configs: list
    history: tuple = ()  # (source, target, positions after the step) per taken edge
    output: tuple = ()


def cfgs(mpt: Mpt, state: str, tuple_ids: tuple, positions: Sequence[int],
         history: tuple = (), output: tuple = ()) -> ConfigSet:
    out = []
    for e in mpt.outgoing(state):
        bound = dict(e.mpe.bindings)
        out.append(Configuration(e, [bound.get(v) for v in mpt.in_vars], list(positions)))
    return ConfigSet(state, tuple_ids, tuple(positions), out, history, output)


@lru_cache(maxsize=1 << 16)
def _step_cached(pe: Pe, a: Event):
    _, residual, delta = step_rule(pe, a, P)
    return residual, (dict(delta) if delta else None)


def step_at(pe: Pe, m: MMap, a: Event, p: int) -> tuple[Pe, MMap]:
    residual, template = _step_cached(pe, a)
    if isinstance(residual, Bottom):
        return residual, {}
    if template is None:
        return residual, m
    return residual, mmap_concat(m, instantiate(template, p))


# -- results ------------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    traces: tuple        # trace ids, one per input variable
    positions: tuple     # read offsets when the violating edge was taken
    mmap: MMap
    boundaries: tuple    # positions after each taken edge, the last one violating


@dataclass
class Stats:
    iterations: int = 0
    tuples: int = 0
    max_workbag: int = 0
    max_configs: int = 0
    steps: int = 0


@dataclass
class Verdict:
    violation: Witness | None
    stats: Stats
    violations: list = field(default_factory=list)   # every witness in collect mode
    runs: dict = field(default_factory=dict)         # tuple -> history, when recorded

    @property
    def clean(self) -> bool:
        return self.violation is None

    @property
    def status(self) -> str:
        return "clean" if self.clean else "violation"

    def report(self) -> str:
        if self.clean:
            return f"status=clean tuples={self.stats.tuples}"
        w = self.violation
        return (f"status=violation witness={','.join(map(str, w.traces))} "
                f"positions={','.join(map(str, w.positions))}")


@dataclass
class MonitorOptions:
    reduce_symmetric: bool = False  # only tuples of distinct traces, in arrival order
    early_accept: bool = False      # stop an instance once it emits ⊤
    append_end: bool = False        # append $ to every trace when it closes
    nondet: bool = False            # explore every matching edge
    permissive: bool = False        # resolve ties by edge order instead of failing
    collect_all: bool = False       # keep going after a violation
    record_runs: bool = False
    max_iterations: int = 10_000_000

    @classmethod
    def od_profile(cls, **kw) -> "MonitorOptions":
        kw.setdefault("reduce_symmetric", True)
        kw.setdefault("early_accept", True)
        kw.setdefault("append_end", True)
        return cls(**kw)


class _Found(Exception):
    def __init__(self, witness: Witness):
        self.witness = witness


# -- the monitor --------------------------------------------------------------

class Monitor:
    def __init__(self, mpt: Mpt, options: MonitorOptions | None = None):
        self.mpt = mpt
        self.opts = options or MonitorOptions()
        self.k = len(mpt.in_vars)
        self.traces: dict[str, list] = {}
        self.order: list[str] = []
        self.online: set[str] = set()
        self.workbag: list[ConfigSet] = []
        self.spawned: set[tuple] = set()
        self.stats = Stats()
        self.violations: list[Witness] = []
        self.runs: dict[tuple, tuple] = {}
        self.source_closed = False

    # trace store ------------------------------------------------------------
    def add_trace(self, t: str) -> None:
        if t in self.traces:
            raise ValueError(f"trace {t!r} already exists")
        self.traces[t] = []
        self.online.add(t)
        self.order.append(t)
        for tup in self._tuples_with(t):
            if tup in self.spawned:
                raise AssertionError(f"tuple {tup} spawned twice")
            self.spawned.add(tup)
            self.stats.tuples += 1
            cs = cfgs(self.mpt, self.mpt.initial, tup, (0,) * self.k)
            if self.opts.record_runs:
                self.runs[tup] = ()
            if cs.configs:
                self.workbag.append(cs)

    def _tuples_with(self, t: str) -> Iterable[tuple]:
        if self.opts.reduce_symmetric:
            older = self.order[:-1]
            for combo in itertools.combinations(older, self.k - 1):
                yield combo + (t,)
        else:
            for tup in itertools.product(self.order, repeat=self.k):
                if t in tup:
                    yield tup

    def append(self, t: str, e: Event) -> None:
        if t not in self.traces:
            raise UnknownTrace(t)
        if t not in self.online:
            raise AppendAfterClose(t)
        self.traces[t].append(e)

    def close(self, t: str) -> None:
        if t not in self.traces:
            raise UnknownTrace(t)
        if t not in self.online:
            return
        if self.opts.append_end:
            self.traces[t].append(END)
        self.online.discard(t)

    def update_traces(self, batch: Batch | None) -> None:
        if batch is None:
            self.source_closed = True
            for t in list(self.online):
                self.close(t)
            return
        for t in batch.new:
            self.add_trace(t)
        for t, e in batch.events:
            self.append(t, e)
        for t in batch.closed:
            self.close(t)

    # one configuration -------------------------------------------------------
    def _progress(self, c: Configuration, ids: tuple) -> str:
        """One step on every trace that has an unread event. Returns the outcome."""
        for i in range(self.k):
            pe = c.pes[i]
            if pe is None or isinstance(pe, Epsilon):
                continue
            w = self.traces[ids[i]]
            p = c.positions[i]
            if p >= len(w):
                continue
            pe, c.mmap = step_at(pe, c.mmap, w[p], p)
            self.stats.steps += 1
            c.pes[i] = pe
            c.positions[i] = p + 1
            if isinstance(pe, Bottom):
                return "failed"
        if all(pe is None or isinstance(pe, Epsilon) for pe in c.pes):
            sigma = {v: self.traces[ids[i]] for i, v in enumerate(self.mpt.in_vars)}
            if eval_condition(c.edge.mpe.condition, sigma, c.mmap):
                c.matched = True
                return "matched"
            return "failed"
        return "pending"

    def _can_progress(self, c: Configuration, ids: tuple) -> bool:
        for i in range(self.k):
            pe = c.pes[i]
            if pe is None or isinstance(pe, Epsilon):
                continue
            t = ids[i]
            if c.positions[i] >= len(self.traces[t]) and t not in self.online:
                return False
        return True

    # taking an edge -----------------------------------------------------------
    def _take(self, cs: ConfigSet, c: Configuration, queue: list) -> None:
        sigma = {v: self.traces[cs.tuple_ids[i]] for i, v in enumerate(self.mpt.in_vars)}
        out = c.edge.emit(sigma, c.mmap)
        emitted = tuple(x for w in out.values() for x in w)
        history = cs.history + ((cs.state, c.edge.target, tuple(c.positions)),)
        output = cs.output + emitted
        if self.opts.record_runs:
            self.runs[cs.tuple_ids] = history
        if BOT in emitted:
            w = Witness(cs.tuple_ids, tuple(c.positions), dict(c.mmap), tuple(h[2] for h in history))
            self.violations.append(w)
            if not self.opts.collect_all:
                raise _Found(w)
            return
        if self.opts.early_accept and TOP in emitted:
            return
        nxt = cfgs(self.mpt, c.edge.target, cs.tuple_ids, c.positions, history, output)
        if nxt.configs:
            queue.append(nxt)

    def _process(self, cs: ConfigSet, queue: list) -> None:
        ids = cs.tuple_ids
        alive = list(cs.configs)
        kept: list[Configuration] = []
        i = 0
        while i < len(alive):
            c = alive[i]
            if not c.matched:
                outcome = self._progress(c, ids)
                if outcome == "failed":
                    alive.pop(i)
                    continue
            if c.matched:
                if self.opts.nondet:
                    self._take(cs, c, queue)
                    alive.pop(i)
                    continue
                others = [o.positions for o in alive if o is not c]
                if all(strictly_smaller(c.positions, o) for o in others):
                    self._take(cs, c, queue)
                    return
                kept.append(c)
            elif self._can_progress(c, ids):
                kept.append(c)
            else:
                alive.pop(i)
                continue
            i += 1
        if not kept:
            return
        if not self.opts.nondet and all(c.matched for c in kept):
            # nothing can move any more: no strictly shortest match exists
            k = arbitrate([c.edge for c in kept], [tuple(c.positions) for c in kept],
                          deterministic=self.mpt.deterministic, permissive=self.opts.permissive)
            self._take(cs, kept[k], queue)
            return
        cs.configs = kept
        queue.append(cs)

    # main loop ----------------------------------------------------------------
    def run(self, source: Iterable[Batch]) -> Verdict:
        it = iter(source)
        try:
            while True:
                self.stats.iterations += 1
                if self.stats.iterations > self.opts.max_iterations:
                    raise RuntimeError("iteration limit reached")
                self.update_traces(None if self.source_closed else next(it, None))
                self._observe()
                queue: list[ConfigSet] = []
                for cs in self.workbag:
                    self._process(cs, queue)
                self.workbag = queue
                if not self.workbag and self.source_closed:
                    break
        except _Found as found:
            return Verdict(found.witness, self.stats, list(self.violations), self.runs)
        first = self.violations[0] if self.violations else None
        return Verdict(first, self.stats, list(self.violations), self.runs)

    def _observe(self) -> None:
        self.stats.max_workbag = max(self.stats.max_workbag, len(self.workbag))
        n = sum(len(cs.configs) for cs in self.workbag)
        self.stats.max_configs = max(self.stats.max_configs, n)


def monitor_loop(mpt: Mpt, source: Iterable[Batch], options: MonitorOptions | None = None) -> Verdict:
    return Monitor(mpt, options).run(source)


def nondet_monitor_loop(mpt: Mpt, source: Iterable[Batch], options: MonitorOptions | None = None) -> Verdict:
    opts = MonitorOptions(**{**(options or MonitorOptions()).__dict__, "nondet": True})
    return Monitor(mpt, opts).run(source)


def is_shortest_match(c: Configuration, others: Iterable[Configuration]) -> bool:
    return all(strictly_smaller(c.positions, o.positions) for o in others if o is not c)
