"""Timing and memory measurements of the OD monitor on generated corpora."""

from __future__ import annotations

import csv
import io
import time
import tracemalloc
from dataclasses import dataclass, replace

from .gen import GenParams, generate
from .monitor import MonitorOptions, monitor_loop, staggered_source

COLUMNS = ["profile", "traces", "events", "cpuSeconds", "peakBytes", "maxWorkbag", "tuples", "verdict", "violations"]


@dataclass
class BenchRow:
    profile: str
    traces: int
    events: int
    cpu_seconds: float
    peak_bytes: int
    max_workbag: float
    tuples: int
    verdict: str
    violations: int

    def as_list(self) -> list:
        return [self.profile, self.traces, self.events, f"{self.cpu_seconds:.6f}", self.peak_bytes,
                f"{self.max_workbag:g}", self.tuples, self.verdict, self.violations]


def measure(mpt, params: GenParams, options: MonitorOptions, repeat: int = 1,
            track_memory: bool = True) -> BenchRow:
    """Average over ``repeat`` runs; the corpus is regenerated from the same seed."""
    traces = generate(params)
    cpu = peak = wb = 0.0
    verdicts = set()
    v = None
    for _ in range(repeat):
        if track_memory:
            tracemalloc.start()
        t0 = time.process_time()
        v = monitor_loop(mpt, staggered_source(traces), options)
        cpu += time.process_time() - t0
        if track_memory:
            peak += tracemalloc.get_traced_memory()[1]
            tracemalloc.stop()
        wb += v.stats.max_workbag
        verdicts.add(v.status)
    if len(verdicts) != 1:
        raise AssertionError(f"verdict changed between repeats: {verdicts}")
    return BenchRow(params.profile, params.count, params.length, cpu / repeat, int(peak / repeat),
                    wb / repeat, v.stats.tuples, v.status, len(v.violations))


def grid(mpt, base: GenParams, counts, lengths, options: MonitorOptions, repeat: int = 1,
         track_memory: bool = True) -> list[BenchRow]:
    rows = []
    for length in lengths:
        for n in counts:
            rows.append(measure(mpt, replace(base, count=n, length=length), options, repeat, track_memory))
    return rows


def to_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow(r.as_list())
    return buf.getvalue()
