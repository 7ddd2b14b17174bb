"""Reproduce the worked examples: PE matches, the two-word MPT runs, the OD runs."""

import argparse
import sys

from hyperpt.compiler import compile_pe, export_dot
from hyperpt.dsl import parse_pe, parse_trace
from hyperpt.events import word
from hyperpt.monitor import MonitorOptions, batch_source, monitor_loop
from hyperpt.mpt import run_offline
from hyperpt.od import abstract_trace, load_spec, od_async, od_intro
from hyperpt.pe import decompose

T1 = "I(l,1)\nI(h,1)\nO(l,1)\nO(l,1)\n"
T2 = "I(l,1)\nI(h,2)\nO(l,2)\nO(l,1)\n"
T3 = "I(l,1)\nDbg(1)\nI(h,2)\nO(l,1)\nO(l,1)\n"


def _w(ws) -> str:
    return "".join(e.tag for e in ws) or "ε"


def show_matches() -> None:
    print("== prefix expressions")
    for src, w in [("[a+b]@l U a", "bbbaba"), ("[a U b]@l1 . [(b+c) U (a+d)]@l2", "aabbbada")]:
        pre, m, suf = decompose(parse_pe(src), word(w))
        print(f"{src:36} on {w}: prefix {_w(pre)}, rest {_w(suf)}, {m}")


def show_mpt() -> None:
    print("== two-word transducer")
    ex2 = load_spec("example2")
    for w1, w2 in [("ababcaba", "babacbab"), ("abababcaba", "babacbab")]:
        run = run_offline(ex2, {"t1": word(w1), "t2": word(w2)})
        out = {k: _w(v) for k, v in run.output.items()}
        print(f"{w1}/{w2}: output {out}, final {run.final_state}, stuck={run.stuck}")
    run = run_offline(load_spec("example2_nocond"), {"t1": word("abababcaba"), "t2": word("babacbab")})
    print(f"without the condition: consumed t1 {run.consumed('t1')}, t2 {run.consumed('t2')}")


def show_od() -> None:
    print("== observational determinism")
    traces = {k: parse_trace(v) for k, v in (("t1", T1), ("t2", T2), ("t3", T3))}
    v = monitor_loop(od_intro(), batch_source(traces), MonitorOptions(reduce_symmetric=True, record_runs=True, collect_all=True))
    print("intro transducer:", v.report())
    for pair, hist in sorted(v.runs.items()):
        print(f"  {pair}: boundaries {[h[2] for h in hist]}")
    abstract = {k: abstract_trace(w) for k, w in traces.items()}
    v = monitor_loop(od_async(), batch_source(abstract), MonitorOptions.od_profile(collect_all=True))
    print("asynchronous transducer:", v.report())


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dot", action="store_true", help="also print the transducer of (ab U c) U c")
    args = ap.parse_args(argv)
    show_matches()
    show_mpt()
    show_od()
    if args.dot:
        print(export_dot(compile_pe(parse_pe("((a b) U c) U c"), list(word("abc")))), end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
