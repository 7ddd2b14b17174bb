"""Prefix expressions, multi-trace prefix transducers and an online monitor
for k-safety hyperproperties."""

from .events import ANY, BOT, END, TOP, WILDCARD, Event, EventPattern, klass, letter, word
from .mstring import DomainError, mmap_concat, mstring
from .pe import decompose, evaluate, step
from .mpe import Mpe, eval_condition, eval_term, mpe_satisfied
from .mpt import Edge, Mpt, NondeterministicChoice, output_concat, run_offline
from .dsl import parse_condition, parse_mpt, parse_pe, parse_trace

__version__ = "0.1.0"
