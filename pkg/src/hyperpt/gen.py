"""Synthetic traces for the observational-determinism experiments."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .events import Event

E = Event("E")


class InvalidParams(ValueError):
    pass


def low_in(v) -> Event:
    return Event("I", ("l", v))


def low_out(v) -> Event:
    return Event("O", ("l", v))


@dataclass
class GenParams:
    profile: str = "random"        # "random" or "periodic"
    count: int = 20
    length: int = 50
    low_in_pct: float = 10.0
    low_out_pct: float = 10.0
    values: tuple = (0, 1)
    period: int = 5
    out_offset: int | None = None  # periodic: offset of the output inside a period
    seed: int = 0

    def validate(self) -> None:
        if self.profile not in ("random", "periodic"):
            raise InvalidParams(f"unknown profile {self.profile!r}")
        if self.count < 0 or self.length < 0:
            raise InvalidParams("count and length must be non-negative")
        if not (0 <= self.low_in_pct and 0 <= self.low_out_pct and self.low_in_pct + self.low_out_pct <= 100):
            raise InvalidParams("percentages must be non-negative and sum to at most 100")
        if not self.values:
            raise InvalidParams("empty value range")
        if self.profile == "periodic":
            if self.period < 2:
                raise InvalidParams("period must be at least 2")
            off = self.period // 2 if self.out_offset is None else self.out_offset
            if not 0 < off < self.period:
                raise InvalidParams("output offset must lie strictly inside the period")


def random_trace(length: int, low_in_pct: float, low_out_pct: float, values, rng: random.Random) -> tuple:
    """Event kinds drawn independently; everything else is ``E``."""
    out = []
    pi, po = low_in_pct / 100, low_out_pct / 100
    for _ in range(length):
        r = rng.random()
        if r < pi:
            out.append(low_in(rng.choice(values)))
        elif r < pi + po:
            out.append(low_out(rng.choice(values)))
        else:
            out.append(E)
    return tuple(out)


def periodic_trace(length: int, period: int, out_offset: int | None = None, value=0) -> tuple:
    """Low input at every multiple of ``period``, low output ``out_offset`` later."""
    off = period // 2 if out_offset is None else out_offset
    out = []
    for i in range(length):
        if i % period == 0:
            out.append(low_in(value))
        elif i % period == off:
            out.append(low_out(value))
        else:
            out.append(E)
    return tuple(out)


def generate(params: GenParams) -> dict[str, tuple]:
    params.validate()
    width = max(3, len(str(max(params.count - 1, 0))))
    names = [f"t{i:0{width}d}" for i in range(params.count)]
    if params.profile == "periodic":
        template = periodic_trace(params.length, params.period, params.out_offset, params.values[0])
        return {n: template for n in names}
    rng = random.Random(params.seed)
    return {n: random_trace(params.length, params.low_in_pct, params.low_out_pct, params.values, rng)
            for n in names}
