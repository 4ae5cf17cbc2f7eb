"""Command line front end: ``resetword {check,solve,generate,experiment,fit}``.

Exit codes: 0 ok, 1 not synchronizing, 2 parse or usage error, 3 resource
exhaustion, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .dfa import Dfa, ParseError, apply_word, format_dfa, is_synchronizing, parse_dfas
from .experiment import (
    emit_report,
    power_model,
    rss,
    run_batch,
    sink_components,
    stats_from_json,
)
from .estimators import SqrtLengthModel
from .generators import FAMILIES, RngSpec, random_dfa
from .oracle import MAX_ORACLE_STATES, brute_force_shortest
from .search import NotSynchronizingError, SearchConfig, SearchResourceError, shortest_reset_word

EXIT_OK, EXIT_NOT_SYNC, EXIT_PARSE, EXIT_RESOURCE, EXIT_IO = 0, 1, 2, 3, 4


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _seed(text: str) -> int:
    if text == "entropy":
        return int.from_bytes(os.urandom(8), "little")
    v = int(text)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="resetword", description="Shortest reset words of finite automata.")
    sub = p.add_subparsers(dest="command", required=True)

    def search_flags(sp):
        sp.add_argument("--memory-limit", type=int, default=1 << 30, help="bytes before the depth-first fallback")
        sp.add_argument("--ibfs-weight", type=float, default=None, help="backward list weight (default: k)")
        sp.add_argument("--warmup-steps", type=int, default=3)

    def input_flags(sp):
        sp.add_argument("--input", "-i", default="-", help="automaton file, '-' for stdin")
        sp.add_argument("--output", "-o", default=None)

    sp = sub.add_parser("check", help="report whether automata synchronize")
    input_flags(sp)
    sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = sub.add_parser("solve", help="shortest reset word of each automaton")
    input_flags(sp)
    search_flags(sp)
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.add_argument("--word", action=argparse.BooleanOptionalAction, default=True)
    sp.add_argument("--oracle", action="store_true", help=f"cross-check by power-set BFS (n <= {MAX_ORACLE_STATES})")

    sp = sub.add_parser("generate", help="write automata")
    sp.add_argument("family", choices=sorted(FAMILIES) + ["random"])
    sp.add_argument("--states", "-n", type=_positive, required=True)
    sp.add_argument("--letters", "-k", type=_positive, default=2)
    sp.add_argument("--seed", type=_seed, default=0, help="integer or 'entropy'")
    sp.add_argument("--samples", "-m", type=int, default=1)
    sp.add_argument("--output", "-o", default=None)

    sp = sub.add_parser("experiment", help="solve a batch of random automata")
    sp.add_argument("--states", "-n", type=_positive, required=True)
    sp.add_argument("--letters", "-k", type=_positive, default=2)
    sp.add_argument("--samples", "-m", type=int, required=True)
    sp.add_argument("--seed", type=_seed, default=0, help="integer or 'entropy'")
    sp.add_argument("--rng", choices=("pcg64", "philox", "sfc64"), default="pcg64")
    sp.add_argument("--jobs", "-j", type=_positive, default=1)
    sp.add_argument("--output", "-o", default=None, help="records CSV; stats go next to it as .json")
    sp.add_argument("--format", choices=("csv", "json"), default="json", help="what to print without --output")
    sp.add_argument("--timings", action=argparse.BooleanOptionalAction, default=False,
                    help="fill the wall_ms column (makes output run-dependent)")
    search_flags(sp)

    sp = sub.add_parser("fit", help="fit a*sqrt(n-b) to stats JSON files")
    sp.add_argument("--input", "-i", nargs="+", required=True)
    sp.add_argument("--format", choices=("text", "json"), default="text")
    return p


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        return Path(path).read_text()
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot write {path}: {exc.strerror}") from exc


def _load(path: str) -> list[Dfa]:
    text = _read(path)
    try:
        automata = parse_dfas(text)
    except ParseError as exc:
        raise _Exit(EXIT_PARSE, f"{path}: {exc}") from exc
    if not automata:
        raise _Exit(EXIT_PARSE, f"{path}: no automaton found")
    return automata


def _config(args) -> SearchConfig:
    try:
        return SearchConfig(
            ibfs_weight=args.ibfs_weight,
            warmup_steps=args.warmup_steps,
            memory_limit=args.memory_limit,
            reconstruct_word=getattr(args, "word", True),
        )
    except ValueError as exc:
        raise _Exit(EXIT_PARSE, str(exc)) from exc


def cmd_check(args) -> int:
    reports = []
    for d in _load(args.input):
        sync = is_synchronizing(d)
        sinks = sink_components(d)
        reports.append({"states": d.n, "letters": d.k, "synchronizing": sync,
                        "sink_components": [len(c) for c in sinks]})
    if args.format == "json":
        _write(args.output, json.dumps(reports if len(reports) > 1 else reports[0], indent=2) + "\n")
    else:
        blocks = []
        for r in reports:
            lines = [f"synchronizing: {'yes' if r['synchronizing'] else 'no'}"]
            if len(r["sink_components"]) == 1:
                lines.append(f"sink component size: {r['sink_components'][0]}")
            else:
                lines.append(f"sink components: {len(r['sink_components'])} "
                             f"(sizes {' '.join(map(str, r['sink_components']))})")
            blocks.append("\n".join(lines) + "\n")
        _write(args.output, "\n".join(blocks))
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = _config(args)
    automata = _load(args.input)
    if args.oracle and any(d.n > MAX_ORACLE_STATES for d in automata):
        raise _Exit(EXIT_PARSE, f"--oracle refuses automata with more than {MAX_ORACLE_STATES} states")
    reports, status = [], EXIT_OK
    for d in automata:
        try:
            res = shortest_reset_word(d, cfg)
        except NotSynchronizingError:
            reports.append({"synchronizing": False})
            status = EXIT_NOT_SYNC
            continue
        except SearchResourceError as exc:
            raise _Exit(EXIT_RESOURCE, f"search exhausted its resources: {exc}") from exc
        if res.word is not None:
            img = apply_word(d, d.states, res.word)
            if img & (img - 1):
                raise AssertionError("solver produced a word that does not reset the automaton")
        r = {
            "synchronizing": True,
            "length": res.length,
            "word": list(res.word) if args.word and res.word is not None else None,
            "stats": {
                "forward_steps": res.stats.forward_steps,
                "backward_steps": res.stats.backward_steps,
                "warmup_steps": res.stats.warmup_steps,
                "reduced_states": res.stats.reduced_states,
                "peak_sets": res.stats.peak_sets,
                "trie_visits": res.stats.trie_visits,
                "fallback": res.stats.used_fallback,
                "seconds": round(res.stats.wall_time, 6),
            },
        }
        if args.oracle:
            found = brute_force_shortest(d)
            r["oracle_length"] = found[0]
            if found[0] != res.length:
                raise AssertionError(f"oracle length {found[0]} differs from solver length {res.length}")
        reports.append(r)
    if args.format == "json":
        _write(args.output, json.dumps(reports if len(reports) > 1 else reports[0], indent=2) + "\n")
    else:
        blocks = []
        for r in reports:
            if not r["synchronizing"]:
                blocks.append("synchronizing: no\n")
                continue
            lines = [f"length: {r['length']}"]
            if r["word"] is not None:
                lines.append("word: " + " ".join(map(str, r["word"])))
            if "oracle_length" in r:
                lines.append(f"oracle length: {r['oracle_length']}")
            lines += [f"  {key}: {val}" for key, val in r["stats"].items()]
            blocks.append("\n".join(lines) + "\n")
        _write(args.output, "\n".join(blocks))
    if status == EXIT_NOT_SYNC:
        print("automaton is not synchronizing", file=sys.stderr)
    return status


def cmd_generate(args) -> int:
    if args.samples < 1:
        raise _Exit(EXIT_PARSE, "--samples must be >= 1")
    if args.family == "random":
        rng = RngSpec(args.seed)
        automata = [random_dfa(args.states, args.letters, rng.offset(i)) for i in range(args.samples)]
    else:
        automata = [FAMILIES[args.family](args.states)] * args.samples
    _write(args.output, "\n".join(format_dfa(d) for d in automata))
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.samples < 1:
        raise _Exit(EXIT_PARSE, "--samples must be >= 1")
    cfg = _config(args)
    cfg.reconstruct_word = False
    records, stats = run_batch(args.states, args.letters, args.samples, RngSpec(args.seed, args.rng), args.jobs, cfg)
    if any(r.error for r in records):
        print(f"{sum(bool(r.error) for r in records)} samples ran out of resources", file=sys.stderr)
    if args.output is None:
        _write(None, emit_report(records, stats, args.format, args.timings))
        return EXIT_OK
    out = Path(args.output)
    _write(str(out), emit_report(records, stats, "csv", args.timings))
    _write(str(out.with_suffix(".json")), emit_report(records, stats, "json"))
    return EXIT_OK


def cmd_fit(args) -> int:
    try:
        stats = [stats_from_json(_read(path)) for path in args.input]
    except (ValueError, KeyError) as exc:
        raise _Exit(EXIT_PARSE, f"bad stats file: {exc}") from exc
    ns = [[s.n] for s in stats]
    ys = [s.mean_length for s in stats]
    try:
        model = SqrtLengthModel().fit(ns, ys)
    except ValueError as exc:
        raise _Exit(EXIT_PARSE, str(exc)) from exc
    baseline = rss(ys, power_model([n[0] for n in ns]))
    if args.format == "json":
        print(json.dumps({"a": model.a_, "b": model.b_, "rss": model.rss_, "power_rss": baseline}, indent=2))
    else:
        print(f"a: {model.a_:.6g}\nb: {model.b_:.6g}\nrss: {model.rss_:.6g}\nrss of 1.95*n^0.55: {baseline:.6g}")
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "solve": cmd_solve,
    "generate": cmd_generate,
    "experiment": cmd_experiment,
    "fit": cmd_fit,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except _Exit as exc:
        print(f"resetword: {exc}", file=sys.stderr)
        return exc.code
    except MemoryError as exc:
        print(f"resetword: out of memory: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
