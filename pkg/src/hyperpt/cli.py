"""Command-line interface.

Exit codes: 0 clean / success, 1 violation, 2 usage or input error, 3 no match.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .compiler import AlphabetIncomplete, compile_pe, export_dot, export_json
from .dsl import DslSyntaxError, SemanticError, parse_mpt, parse_pe, parse_trace, format_trace
from .gen import GenParams, InvalidParams, generate
from .mpe import MpeError
from .mpt import MptError, NondeterministicChoice, run_offline
from .mstring import format_mstring
from .pe import decompose, slice_word

EXIT_OK, EXIT_VIOLATION, EXIT_ERROR, EXIT_NOMATCH = 0, 1, 2, 3
REPORT_VERSION = 1


class CliError(Exception):
    pass


def _text_or_file(arg: str) -> str:
    p = Path(arg)
    if p.is_file():
        return p.read_text(encoding="utf-8")
    return arg


def _load_mpt(arg: str):
    p = Path(arg)
    if p.is_file():
        return parse_mpt(p.read_text(encoding="utf-8"))
    from .od import load_spec

    try:
        return load_spec(arg)
    except FileNotFoundError:
        raise CliError(f"no such MPT file or bundled spec: {arg}") from None


def _read_trace(path: str) -> tuple:
    try:
        return parse_trace(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CliError(f"no such trace file: {path}") from None


def _inline_word(text: str) -> tuple:
    return parse_trace("\n".join(text.split()))


def _fmt_word(w) -> str:
    return " ".join(str(e) for e in w) if w else "ε"


# -- match --------------------------------------------------------------------

def cmd_match(args) -> int:
    pe = parse_pe(_text_or_file(args.pe))
    w = _inline_word(args.word) if args.word is not None else _read_trace(args.trace)
    d = decompose(pe, w)
    if d is None:
        print("status=nomatch")
        return EXIT_NOMATCH
    print(f"status=match prefix={len(d.prefix)} suffix={len(d.suffix)}")
    for label in sorted(d.mmap):
        s = d.mmap[label]
        print(f"{label} = {format_mstring(s)}  slice: {_fmt_word(slice_word(w, s))}")
    return EXIT_OK


# -- run ----------------------------------------------------------------------

def _assignments(pairs, inline: bool) -> dict:
    out = {}
    for item in pairs or ():
        if "=" not in item:
            raise CliError(f"expected VAR=..., got {item!r}")
        var, val = item.split("=", 1)
        out[var] = _inline_word(val) if inline else _read_trace(val)
    return out


def cmd_run(args) -> int:
    mpt = _load_mpt(args.mpt)
    sigma = {**_assignments(args.trace, False), **_assignments(args.word, True)}
    missing = [v for v in mpt.in_vars if v not in sigma]
    if missing:
        raise CliError(f"no word given for {', '.join(missing)}")
    run = run_offline(mpt, sigma, max_steps=args.max_steps, permissive=args.permissive)
    if args.json:
        print(run.to_json())
        return EXIT_OK
    for i, s in enumerate(run.steps):
        ranges = " ".join(f"{v}[{a}:{b})" for v, (a, b) in s.ranges.items())
        out = " ".join(f"{v}+={''.join(str(e) for e in w)}" for v, w in s.output.items())
        print(f"step {i}: {s.state} -> {s.target}  {ranges}  {out}".rstrip())
    for v in mpt.out_vars:
        print(f"output {v} = {''.join(str(e) for e in run.output.get(v, ())) or 'ε'}")
    status = "stuck" if run.stuck else "done"
    print(f"status={status} state={run.final_state}")
    return EXIT_OK


# -- monitor ------------------------------------------------------------------

def _trace_dir(path: str) -> dict:
    p = Path(path)
    if not p.is_dir():
        raise CliError(f"not a directory: {path}")
    files = sorted(f for f in p.iterdir() if f.is_file() and not f.name.startswith("."))
    return {f.stem: parse_trace(f.read_text(encoding="utf-8")) for f in files}


def _stream_batches(lines):
    """``new ID`` / ``ev ID EVENT`` / ``close ID`` lines; a blank line ends a batch."""
    from .monitor import Batch

    new, events, closed = [], [], []
    for n, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            if new or events or closed:
                yield Batch(tuple(new), tuple(events), tuple(closed))
                new, events, closed = [], [], []
            continue
        parts = line.split(None, 2)
        if parts[0] == "new" and len(parts) == 2:
            new.append(parts[1])
        elif parts[0] == "close" and len(parts) == 2:
            closed.append(parts[1])
        elif parts[0] == "ev" and len(parts) == 3:
            ev = parse_trace(parts[2])
            if len(ev) != 1:
                raise DslSyntaxError("expected one event", n, 1)
            events.append((parts[1], ev[0]))
        else:
            raise DslSyntaxError(f"bad stream line {line!r}", n, 1)
    if new or events or closed:
        yield Batch(tuple(new), tuple(events), tuple(closed))


def cmd_monitor(args) -> int:
    from .monitor import MonitorOptions, Monitor, batch_source, staggered_source

    mpt = _load_mpt(args.mpt)
    if args.k is not None and args.k != len(mpt.in_vars):
        raise CliError(f"--k {args.k} does not match the {len(mpt.in_vars)} input variables")
    if args.od:
        opts = MonitorOptions.od_profile()
    else:
        opts = MonitorOptions()
    for flag in ("reduce_symmetric", "early_accept", "append_end", "nondet", "permissive", "collect_all"):
        if getattr(args, flag):
            setattr(opts, flag, True)
    if args.stream:
        fh = sys.stdin if args.stream == "-" else open(args.stream, encoding="utf-8")
        source = _stream_batches(fh)
    else:
        if not args.traces:
            raise CliError("give a trace directory or --stream")
        traces = _trace_dir(args.traces)
        source = staggered_source(traces) if args.stagger else batch_source(traces)
    if args.od:
        from .od import abstract_source

        source = abstract_source(source)
    v = Monitor(mpt, opts).run(source)
    if args.json:
        print(json.dumps({
            "version": REPORT_VERSION,
            "status": v.status,
            "witness": list(v.violation.traces) if v.violation else None,
            "positions": list(v.violation.positions) if v.violation else None,
            "boundaries": [list(b) for b in v.violation.boundaries] if v.violation else None,
            "violations": [list(w.traces) for w in v.violations],
            "stats": v.stats.__dict__,
        }, ensure_ascii=False))
    else:
        print(v.report())
        if opts.collect_all and len(v.violations) > 1:
            for w in v.violations[1:]:
                print(f"also witness={','.join(w.traces)}")
    return EXIT_OK if v.clean else EXIT_VIOLATION


# -- gen ----------------------------------------------------------------------

def _values(text: str) -> tuple:
    return tuple(int(x) if x.strip().isdigit() else x.strip() for x in text.split(",") if x.strip())


def cmd_gen(args) -> int:
    params = GenParams(profile=args.profile, count=args.count, length=args.length,
                       low_in_pct=args.low_in, low_out_pct=args.low_out, values=_values(args.values),
                       period=args.period, out_offset=args.out_offset, seed=args.seed)
    traces = generate(params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, w in traces.items():
        (out / f"{name}.trace").write_text(format_trace(w), encoding="utf-8")
    print(f"wrote {len(traces)} traces to {out}")
    return EXIT_OK


# -- compile ------------------------------------------------------------------

def cmd_compile(args) -> int:
    pe = parse_pe(_text_or_file(args.pe))
    alphabet = None
    if args.alphabet:
        alphabet = list(_inline_word(args.alphabet.replace(",", " ")))
    t = compile_pe(pe, alphabet)
    if args.json:
        sys.stdout.write(export_json(t) + "\n")
    else:
        sys.stdout.write(export_dot(t, hide_sink=args.hide_sink))
    return EXIT_OK


# -- bench --------------------------------------------------------------------

def cmd_bench(args) -> int:
    from .bench import grid, to_csv
    from .monitor import MonitorOptions

    mpt = _load_mpt(args.mpt)
    base = GenParams(profile=args.profile, low_in_pct=args.low_in, low_out_pct=args.low_out,
                     values=_values(args.values), period=args.period, seed=args.seed)
    opts = MonitorOptions.od_profile(collect_all=not args.stop_at_violation)
    rows = grid(mpt, base, _ints(args.counts), _ints(args.lengths), opts, args.repeat,
                track_memory=not args.no_memory)
    text = to_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyperpt", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("match", help="match a prefix expression against a trace")
    p.add_argument("pe", help="expression text or a file containing it")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("trace", nargs="?", help="trace file")
    g.add_argument("--word", help="inline events separated by whitespace, e.g. 'b b a'")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("run", help="run an MPT offline on complete words")
    p.add_argument("mpt", help="MPT file or bundled spec name")
    p.add_argument("--trace", action="append", metavar="VAR=FILE")
    p.add_argument("--word", action="append", metavar="VAR=EVENTS")
    p.add_argument("--max-steps", type=int, default=100_000)
    p.add_argument("--permissive", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("monitor", help="monitor a trace corpus or an event stream")
    p.add_argument("mpt", help="MPT file or bundled spec name")
    p.add_argument("traces", nargs="?", help="directory with one trace file per trace")
    p.add_argument("--stream", help="event stream file, '-' for stdin")
    p.add_argument("--k", type=int)
    p.add_argument("--od", action="store_true", help="reduction, early accept and $ on; non-low events read as E")
    p.add_argument("--reduce-symmetric", action="store_true")
    p.add_argument("--early-accept", action="store_true")
    p.add_argument("--append-end", action="store_true")
    p.add_argument("--nondet", action="store_true")
    p.add_argument("--permissive", action="store_true")
    p.add_argument("--all", dest="collect_all", action="store_true", help="report every violating tuple")
    p.add_argument("--stagger", action="store_true", help="deliver traces one per round")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("gen", help="generate trace files")
    _gen_flags(p)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--length", type=int, default=50)
    p.add_argument("--out-offset", type=int)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("compile", help="compile a prefix expression to a transducer")
    p.add_argument("pe", help="expression text or a file containing it")
    p.add_argument("--alphabet", help="letters, e.g. 'a,b,c' (default: derived classes)")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--dot", action="store_true", help="DOT output (default)")
    fmt.add_argument("--json", action="store_true")
    p.add_argument("--hide-sink", action="store_true")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("bench", help="CSV of monitor cost over a grid of corpora")
    p.add_argument("mpt", nargs="?", default="od_async")
    _gen_flags(p)
    p.add_argument("--counts", default="10,20,40")
    p.add_argument("--lengths", default="50")
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--stop-at-violation", action="store_true")
    p.add_argument("--no-memory", action="store_true", help="skip tracemalloc (faster)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return ap


def _gen_flags(p) -> None:
    p.add_argument("--profile", choices=["random", "periodic"], default="random")
    p.add_argument("--low-in", type=float, default=10.0)
    p.add_argument("--low-out", type=float, default=10.0)
    p.add_argument("--values", default="0,1")
    p.add_argument("--period", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, DslSyntaxError, SemanticError, MpeError, MptError, InvalidParams,
            AlphabetIncomplete, NondeterministicChoice, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
