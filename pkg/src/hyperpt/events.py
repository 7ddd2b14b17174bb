"""Events (letters of the trace alphabet) and the patterns atoms match against."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

Value = Union[str, int]

U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class Event:
    """A structured letter: a tag plus positional argument values.

    Equality is structural over the tag and the full argument tuple.
    """

    tag: str
    args: tuple[Value, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.tag
        return f"{self.tag}({','.join(str(a) for a in self.args)})"


END = Event("$")

# verdict symbols of the monitoring transducers' output alphabet
BOT = Event("⊥")
TOP = Event("⊤")


class _Wildcard:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ANY"

    def __reduce__(self):
        return (_Wildcard, ())


ANY = _Wildcard()


@dataclass(frozen=True)
class EventPattern:
    """Constraint on an event.

    ``tag`` is a tag name or ``ANY``. ``args`` is ``None`` when any argument
    list is accepted (bare tags such as ``E`` or ``Dbg``), otherwise a tuple of
    per-position constraints, each a value or ``ANY``.
    """

    tag: object = ANY
    args: tuple | None = None

    def matches(self, event: Event) -> bool:
        if self.tag is not ANY and self.tag != event.tag:
            return False
        if self.args is None:
            return True
        if len(self.args) != len(event.args):
            return False
        return all(c is ANY or c == v for c, v in zip(self.args, event.args))

    @property
    def is_universal(self) -> bool:
        return self.tag is ANY and self.args is None

    def __str__(self) -> str:
        if self.is_universal:
            return "_"
        tag = "_" if self.tag is ANY else str(self.tag)
        if self.args is None:
            return tag
        return f"{tag}({','.join('_' if a is ANY else str(a) for a in self.args)})"


WILDCARD = EventPattern()


def letter(name: str) -> EventPattern:
    """Pattern for an abstract zero-argument letter such as ``a``."""
    return EventPattern(name, None)


def klass(tag: str, first: Value) -> EventPattern:
    """Class macro ``I_l``: tag ``I``, first argument ``l``, second anything."""
    return EventPattern(tag, (first, ANY))


def word(text: str) -> tuple[Event, ...]:
    """Abstract word from a string of single-character letters: ``"abba"``."""
    return tuple(Event(ch) for ch in text if not ch.isspace())
