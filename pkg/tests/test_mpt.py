import json
import random
import re

import pytest
from hypothesis import given, strategies as st

from hyperpt.dsl import parse_pe
from hyperpt.events import BOT, TOP, Event, word
from hyperpt.mpe import Mpe
from hyperpt.mpt import (
    Edge, Mpt, MptError, NondeterministicChoice, arbitrate, check_edge, output_concat, run_offline,
)
from hyperpt.od import load_spec

EX2 = load_spec("example2")
EX2_NOCOND = load_spec("example2_nocond")
OD = load_spec("od_async")


def _sigma(u, v):
    return {"t1": word(u), "t2": word(v)}


def test_output_concat_cases():
    assert output_concat({"to": (BOT,)}, {"to": (TOP,)}) == {"to": (BOT, TOP)}
    assert output_concat({"to": (BOT,)}, {}) == {"to": (BOT,)}
    assert output_concat({}, {"to": (TOP,)}) == {"to": (TOP,)}


assignments = st.dictionaries(st.sampled_from(["x", "y", "z"]),
                              st.lists(st.sampled_from([BOT, TOP]), max_size=3).map(tuple), max_size=3)


@given(assignments, assignments, assignments)
def test_output_concat_is_a_monoid(a, b, c):
    assert output_concat(output_concat(a, b), c) == output_concat(a, output_concat(b, c))
    assert output_concat(a, {}) == a == output_concat({}, a)


def test_example2_run():
    run = run_offline(EX2, _sigma("ababcaba", "babacbab"))
    assert run.output == {"to": (BOT, TOP, TOP, TOP)}
    assert [s.ranges["t1"] for s in run.steps] == [(0, 5), (5, 6), (6, 7), (7, 8)]
    assert [s.ranges["t2"] for s in run.steps] == [(0, 5), (5, 6), (6, 7), (7, 8)]
    assert run.consumed("t1") == [5, 1, 1, 1]
    assert not run.stuck and not run.exhausted_steps


def test_example2_length_mismatch_is_stuck():
    run = run_offline(EX2, _sigma("abababcaba", "babacbab"))
    assert run.stuck and run.final_state == "q0"
    assert run.output == {} and run.steps == []


def test_example2_without_condition():
    run = run_offline(EX2_NOCOND, _sigma("abababcaba", "babacbab"))
    assert run.consumed("t1")[0] == 7 and run.consumed("t2")[0] == 5
    assert run.output == {"to": (BOT, TOP, TOP, TOP)}


def test_run_json_export():
    data = json.loads(run_offline(EX2, _sigma("ababcaba", "babacbab")).to_json())
    assert data["steps"][0]["consumed"] == {"t1": [0, 5], "t2": [0, 5]}
    assert data["output"]["to"] == ["⊥", "⊤", "⊤", "⊤"]


def test_consumption_soundness():
    run = run_offline(EX2, _sigma("ababcaba", "babacbab"))
    w = _sigma("ababcaba", "babacbab")
    for s in run.steps:
        for v, (lo, hi) in s.ranges.items():
            assert w[v][lo:hi] + w[v][hi:] == w[v][lo:]
    assert run.final_sigma == {"t1": (), "t2": ()}


def test_missing_word():
    with pytest.raises(MptError):
        run_offline(EX2, {"t1": word("ab")})


_SHAPE1 = re.compile(r"^((?:ab)*)c([ab]*)$")
_SHAPE2 = re.compile(r"^((?:ba)*)c([ab]*)$")


def _example2_pair(rng):
    n, k = rng.randint(0, 3), rng.randint(0, 4)
    x = "".join(rng.choice("ab") for _ in range(k))
    y = "".join("b" if ch == "a" else "a" for ch in x)
    u, v = "ab" * n + "c" + x, "ba" * n + "c" + y
    if rng.random() < 0.5:  # perturb
        u, v = list(u), list(v)
        target = rng.choice([u, v])
        if target:
            target[rng.randrange(len(target))] = rng.choice("abc")
        u, v = "".join(u), "".join(v)
    return u, v


@pytest.mark.parametrize("seed", range(5))
def test_example2_accepted_pairs_have_the_shape(seed):
    rng = random.Random(seed)
    accepted = 0
    for _ in range(400):
        if rng.random() < 0.3:
            u = "".join(rng.choice("abc") for _ in range(rng.randint(0, 9)))
            v = "".join(rng.choice("abc") for _ in range(rng.randint(0, 9)))
        else:
            u, v = _example2_pair(rng)
        run = run_offline(EX2, _sigma(u, v))
        assert not run.exhausted_steps
        if run.stuck or any(run.final_sigma.values()) or not run.steps:
            continue
        accepted += 1
        m1, m2 = _SHAPE1.match(u), _SHAPE2.match(v)
        assert m1 and m2
        assert len(m1.group(1)) == len(m2.group(1))
        x, y = m1.group(2), m2.group(2)
        assert len(x) == len(y) and all(p != q for p, q in zip(x, y))
    assert accepted > 50


def _od_edge(target):
    return next(e for e in OD.edges if e.target == target)


def test_od_self_loop_on_equal_events():
    sigma = {"t1": (Event("I", ("l", 1)),), "t2": (Event("E"), Event("I", ("l", 1)))}
    assert check_edge(_od_edge("q0"), sigma).verdict


def test_od_violation_edge():
    sigma = {"t1": (Event("O", ("l", 1)),), "t2": (Event("O", ("l", 2)),)}
    assert check_edge(_od_edge("q1"), sigma).verdict


def test_edge_over_empty_word():
    assert check_edge(_od_edge("q0"), {"t1": (), "t2": ()}) is None


def _always(target, prio=0, out=()):
    mpe = Mpe((("t", parse_pe("_")),))
    return Edge("q", target, mpe, (("o", out),) if out else (), prio)


def test_tie_without_priority_is_an_error():
    m = Mpt(("t",), ("o",), ("q", "r", "s"), "q", (_always("r"), _always("s")))
    with pytest.raises(NondeterministicChoice):
        run_offline(m, {"t": word("a")})


def test_tie_broken_by_priority_or_permissive():
    m = Mpt(("t",), ("o",), ("q", "r", "s"), "q", (_always("r"), _always("s", prio=1)))
    assert run_offline(m, {"t": word("a")}).final_state == "s"
    m = Mpt(("t",), ("o",), ("q", "r", "s"), "q", (_always("r"), _always("s")))
    assert run_offline(m, {"t": word("a")}, permissive=True).final_state == "r"


def test_arbitrate_prefers_strictly_shorter():
    edges = [_always("r", prio=5), _always("s")]
    assert arbitrate(edges, [(3, 3), (2, 2)], deterministic=True, permissive=False) == 1
    # incomparable vectors fall back to priority
    assert arbitrate(edges, [(3, 1), (1, 3)], deterministic=True, permissive=False) == 0


def test_max_steps_guard():
    m = Mpt(("t",), ("o",), ("q",), "q", (Edge("q", "q", Mpe((("t", parse_pe("a")),))),))
    run = run_offline(m, {"t": word("aaaa")}, max_steps=2)
    assert run.exhausted_steps and len(run.steps) == 2


def test_invalid_mpts():
    e = Edge("q", "zz", Mpe((("t", parse_pe("a")),)))
    with pytest.raises(MptError):
        Mpt(("t",), (), ("q",), "q", (e,))
    with pytest.raises(MptError):
        Mpt(("t",), (), ("q",), "nope", ())
    e = Edge("q", "q", Mpe((("u", parse_pe("a")),)))
    with pytest.raises(MptError):
        Mpt(("t",), (), ("q",), "q", (e,))
