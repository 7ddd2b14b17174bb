import json

import pytest
from hypothesis import given, settings

from hyperpt.compiler import (
    AlphabetIncomplete, P, canon, compile_pe, derivative_closure, edge_label, export_dot,
    export_json, instantiate, letter_classes,
)
from hyperpt.dsl import parse_pe
from hyperpt.events import Event, word
from hyperpt.pe import BOT, EPS, Concat, Epsilon, InFlight, evaluate
from strategies import ALPHABET, pes, words

ABC = tuple(Event(x) for x in "abc")
AB = tuple(Event(x) for x in "ab")


def _graph(t):
    """Edges as (source expr, letters, target expr, m-map text)."""
    return {(t.states[i], "".join(t.alphabet[k].tag for k in ks), t.states[j], edge_label(t, ks, m).split("/")[1])
            for i, j, ks, m in t.transitions()}


def test_nested_iteration_closure():
    outer = parse_pe("((a b) U c) U c")
    inner = outer.body
    s1 = Concat(Concat(parse_pe("b"), inner), outer)
    s2 = Concat(inner, outer)
    t = derivative_closure(outer, ABC)
    assert set(t.states) == {outer, s1, s2, EPS, BOT}
    assert {(s, ls, d) for s, ls, d, _ in _graph(t)} == {
        (outer, "a", s1), (outer, "c", EPS), (outer, "b", BOT),
        (s1, "b", s2), (s1, "ac", BOT),
        (s2, "a", s1), (s2, "c", outer), (s2, "b", BOT),
    }


def test_labeled_block_transducer():
    pe = parse_pe("b (([a b]@l) U b) (b + a)")
    t = compile_pe(pe, AB)
    assert len(t.live_states()) == 5
    g = {(s, ls, d, m) for s, ls, d, m in _graph(t) if d != BOT}
    it = pe.right.left
    after_b = canon(pe.right)
    tail = canon(pe.right.right)
    opened = canon(Concat(Concat(InFlight("l", parse_pe("b")), it), pe.right.right))
    assert g == {
        (canon(pe), "b", after_b, "∅"),
        (after_b, "b", tail, "∅"),
        (after_b, "a", opened, "{l↦(p,⊥)}"),
        (opened, "b", after_b, "{l↦(⊥,p)}"),
        (tail, "ab", EPS, "∅"),
    }
    assert 'label="b,p/{l↦(⊥,p)}"' in export_dot(t)
    assert 'label="a,p/{l↦(p,⊥)}"' in export_dot(t)
    assert '"*,p/∅"' in export_dot(t)


def test_labeled_block_runs():
    pe = parse_pe("b (([a b]@l) U b) (b + a)")
    t = compile_pe(pe, AB)
    assert t.run(word("babbb")) == (EPS, {"l": ((1, 2),)})
    assert t.run(word("bb")) == (canon(parse_pe("b + a")), {})
    assert t.run(word("bba"))[0] == EPS
    assert t.run(word("a")) == (BOT, {})
    # the letter after "ba" must be b, so this word dies
    assert t.run(word("baab")) == (BOT, {})
    for w in ("babbb", "bb", "bba", "a", "baab", "bababab"):
        r = evaluate(pe, word(w))
        assert t.run(word(w)) == (canon(r.residual), r.mmap)


def test_atom_closure():
    t = compile_pe(parse_pe("a"), AB)
    assert set(t.states) == {parse_pe("a"), EPS, BOT}
    dot = export_dot(t)
    assert sum(1 for line in dot.splitlines() if "[shape=" in line and "->" not in line and "point" not in line) == 3
    assert "doublecircle" in dot


def test_dot_is_deterministic():
    pe = parse_pe("b (([a b]@l) U b) (b + a)")
    assert export_dot(compile_pe(pe, AB)) == export_dot(compile_pe(pe, AB))
    assert export_json(compile_pe(pe, AB)) == export_json(compile_pe(pe, AB))
    assert 'label="⊥"' in export_dot(compile_pe(pe, AB))
    assert 'label="⊥"' not in export_dot(compile_pe(pe, AB), hide_sink=True)


def test_json_export():
    data = json.loads(export_json(compile_pe(parse_pe("a"), AB)))
    assert [s["accepting"] for s in data["states"]] == [False, True, False]
    assert data["edges"][0] == {"from": 0, "to": 1, "letters": ["a"], "mmap": "∅"}


def test_alphabet_incomplete():
    with pytest.raises(AlphabetIncomplete):
        compile_pe(parse_pe("a c"), AB)
    # c is indistinguishable from b for the atom a, so it shares b's class
    t = compile_pe(parse_pe("a"), AB)
    assert t.run(word("c")) == (BOT, {})


def test_letter_classes_for_structured_events():
    pe = parse_pe("E U [I_l + O_l]@e")
    t = compile_pe(pe)
    assert len(t.alphabet) == len(letter_classes(pe))
    w = (Event("E"), Event("Dbg", (1,)), Event("I", ("h", 3)), Event("O", ("l", 1)))
    # Dbg is not E, not a low event: the iteration fails on it
    assert t.run(w[:2])[0] == BOT
    w2 = (Event("E"), Event("O", ("l", 1)))
    assert t.run(w2) == (EPS, {"e": ((1, 1),)})
    for u in (w, w2):
        r = evaluate(pe, u)
        assert t.run(u) == (canon(r.residual), r.mmap)


def test_instantiate():
    assert instantiate({"l": ((P, None),)}, 7) == {"l": ((7, None),)}


def test_three_deep_nesting_terminates():
    pe = parse_pe("(((a b) U c) U c) U c")
    t = compile_pe(pe, ABC)
    assert len(t.states) <= 8
    pe = parse_pe("((([a]@x b) U c) U (a + c)) U b")
    t = compile_pe(pe, ABC)
    assert len(t.states) <= 12


@given(pes(), words)
@settings(max_examples=300)
def test_compiled_run_equals_evaluate(pe, w):
    t = compile_pe(pe, ALPHABET)
    r = evaluate(pe, w)
    assert t.run(w) == (canon(r.residual), r.mmap)


@given(pes())
def test_prefix_free(pe):
    t = compile_pe(pe, ALPHABET)
    for (i, _k), _ in t.edges.items():
        assert not isinstance(t.states[i], Epsilon)
