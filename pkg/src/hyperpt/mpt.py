"""Multi-trace prefix transducers and their offline runs over complete words."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .events import Event
from .mpe import Mpe, MpeMatch, TraceSlice, eval_term, mpe_satisfied
from .mstring import MMap, format_mmap

OutputAssignment = dict  # out var -> tuple of events


class NondeterministicChoice(RuntimeError):
    """Several edges match and nothing decides between them."""


class MptError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    mpe: Mpe
    # (out var, items); an item is an Event or a TraceSlice evaluated on firing
    output: tuple = ()
    priority: int = 0

    def emit(self, sigma: Mapping[str, Sequence[Event]], m: MMap) -> OutputAssignment:
        out = {}
        for var, items in self.output:
            word: list = []
            for x in items:
                if isinstance(x, TraceSlice):
                    word.extend(eval_term(x, sigma, m))
                else:
                    word.append(x)
            out[var] = tuple(word)
        return out

    def emits(self, symbol: Event) -> bool:
        return any(x == symbol for _, items in self.output for x in items)


@dataclass(frozen=True)
class Mpt:
    in_vars: tuple[str, ...]
    out_vars: tuple[str, ...]
    states: tuple[str, ...]
    initial: str
    edges: tuple[Edge, ...]
    deterministic: bool = True
    in_alphabet: str = ""
    out_alphabet: str = ""
    name: str = ""

    def __post_init__(self):
        if self.initial not in self.states:
            raise MptError(f"initial state {self.initial!r} is not declared")
        for e in self.edges:
            for q in (e.source, e.target):
                if q not in self.states:
                    raise MptError(f"edge endpoint {q!r} is not declared")
            for v in e.mpe.vars:
                if v not in self.in_vars:
                    raise MptError(f"edge binds unknown trace variable {v!r}")
            for v, _ in e.output:
                if v not in self.out_vars:
                    raise MptError(f"edge writes unknown output variable {v!r}")

    def outgoing(self, state: str) -> list[Edge]:
        return [e for e in self.edges if e.source == state]


def output_concat(n1: Mapping[str, tuple], n2: Mapping[str, tuple]) -> OutputAssignment:
    out = dict(n1)
    for var, w in n2.items():
        out[var] = tuple(out.get(var, ())) + tuple(w)
    return out


def consumption(mpe: Mpe, match: MpeMatch, in_vars: Sequence[str]) -> tuple[int, ...]:
    return tuple(len(match.prefixes[v][0]) if v in match.prefixes else 0 for v in in_vars)


def strictly_smaller(c: Sequence[int], d: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(c, d)) and any(x < y for x, y in zip(c, d))


def arbitrate(candidates: list, vectors: list, *, deterministic: bool, permissive: bool) -> int:
    """Index of the edge to take among several satisfied ones.

    The winner is the one whose consumption vector is strictly smaller than
    every other; otherwise the highest priority among the non-dominated ones;
    otherwise the first listed (permissive) or an error.
    """
    n = len(candidates)
    for i in range(n):
        if all(strictly_smaller(vectors[i], vectors[j]) for j in range(n) if j != i):
            return i
    minimal = [i for i in range(n)
               if not any(strictly_smaller(vectors[j], vectors[i]) for j in range(n) if j != i)]
    best = max(candidates[i].priority for i in minimal)
    top = [i for i in minimal if candidates[i].priority == best]
    if len(top) == 1 or permissive or not deterministic:
        return top[0]
    raise NondeterministicChoice(
        f"{len(top)} edges from {candidates[top[0]].source} match with no shortest one: "
        + ", ".join(f"->{candidates[i].target} {vectors[i]}" for i in top)
    )


@dataclass
class RunStep:
    state: str
    edge: int  # index into mpt.edges
    target: str
    ranges: dict  # var -> (start, end) half-open offsets into the original word
    output: OutputAssignment
    mmap: MMap


@dataclass
class Run:
    steps: list = field(default_factory=list)
    output: OutputAssignment = field(default_factory=dict)
    stuck: bool = False
    final_state: str = ""
    final_sigma: dict = field(default_factory=dict)
    exhausted_steps: bool = False

    def consumed(self, var: str) -> list[int]:
        return [s.ranges[var][1] - s.ranges[var][0] if var in s.ranges else 0 for s in self.steps]

    def to_json(self) -> str:
        return json.dumps({
            "final_state": self.final_state,
            "stuck": self.stuck,
            "output": {k: [str(e) for e in v] for k, v in self.output.items()},
            "steps": [
                {
                    "from": s.state,
                    "to": s.target,
                    "edge": s.edge,
                    "consumed": {k: list(v) for k, v in s.ranges.items()},
                    "output": {k: [str(e) for e in v] for k, v in s.output.items()},
                    "mmap": format_mmap(s.mmap),
                }
                for s in self.steps
            ],
        }, ensure_ascii=False, indent=2)


def check_edge(edge: Edge, sigma: Mapping[str, Sequence[Event]]) -> MpeMatch | None:
    return mpe_satisfied(edge.mpe, sigma)


def run_offline(mpt: Mpt, sigma0: Mapping[str, Sequence[Event]], max_steps: int = 100_000,
                permissive: bool = False) -> Run:
    """Run ``mpt`` on complete words until it is stuck or every word is consumed.

    Label positions refer to the remaining words at each step, so conditions
    compare ranges relative to where the step started.
    """
    missing = [v for v in mpt.in_vars if v not in sigma0]
    if missing:
        raise MptError(f"no word for {', '.join(missing)}")
    sigma = {v: tuple(sigma0[v]) for v in mpt.in_vars}
    offset = {v: 0 for v in mpt.in_vars}
    run = Run()
    state = mpt.initial
    index = {id(e): i for i, e in enumerate(mpt.edges)}
    while True:
        if all(not w for w in sigma.values()):
            break
        if len(run.steps) >= max_steps:
            run.exhausted_steps = True
            break
        sat = []
        for e in mpt.outgoing(state):
            r = check_edge(e, sigma)
            if r is not None and r.verdict:
                sat.append((e, r))
        if not sat:
            run.stuck = True
            break
        vectors = [consumption(e.mpe, r, mpt.in_vars) for e, r in sat]
        k = arbitrate([e for e, _ in sat], vectors, deterministic=mpt.deterministic, permissive=permissive)
        edge, match = sat[k]
        out = edge.emit(sigma, match.mmap)
        ranges = {}
        for v, (prefix, suffix) in match.prefixes.items():
            ranges[v] = (offset[v], offset[v] + len(prefix))
            offset[v] += len(prefix)
            sigma[v] = suffix
        run.steps.append(RunStep(state, index[id(edge)], edge.target, ranges, out, match.mmap))
        run.output = output_concat(run.output, out)
        state = edge.target
    run.final_state = state
    run.final_sigma = sigma
    return run
