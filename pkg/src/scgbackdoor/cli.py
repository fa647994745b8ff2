"""Command-line front end.

    scgbackdoor decide GRAPH --do K@-1 --do L@-1 --effect O@0 [--consistency]
    scgbackdoor adjust GRAPH ...
    scgbackdoor oracle-check GRAPH ... [--window -3:0] [--max-lag 2] [--budget N]
    scgbackdoor random --seed 1 --count 20 --series 5 --p 0.3 [--out DIR]
    scgbackdoor explain GRAPH ... [--show-nc] [--show-access O@0]

GRAPH is a file path or "-" for stdin.  Exit codes: 0 identifiable (or
success), 3 not identifiable, 1 usage, parse or budget error, 2 internal
invariant violation or oracle disagreement.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import oracle
from .accessibility import COMBINED, compute_accessibility, compute_accessibility_combined
from .agreement import oracle_check
from .cone import CausalQuery, compute_t_nc
from .decider import decide, emit_formula, preprocess
from .errors import BudgetExceeded, SCGError
from .extint import to_json
from .graph import TV, parse_scg, serialize_scg
from .randgen import corpus

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INTERNAL = 2
EXIT_NOT_IDENTIFIABLE = 3

FORMATS = ("edgelist", "json", "dot-subset")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _vertex(text):
    series, sep, time = text.rpartition("@")
    if not sep or not series:
        raise argparse.ArgumentTypeError(f"expected SERIES@TIME, got {text!r}")
    try:
        return TV(series, int(time))
    except ValueError:
        raise argparse.ArgumentTypeError(f"time in {text!r} is not an integer") from None


def _window(text):
    lo, sep, hi = text.partition(":")
    try:
        if not sep:
            raise ValueError
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError("window start after its end")
    return lo, hi


def _positive(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser():
    p = _Parser(prog="scgbackdoor", description="Identifiability by common backdoor in summary causal graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_cmd(name, help):
        c = sub.add_parser(name, help=help)
        c.add_argument("graph", help="SCG file, or - for stdin")
        c.add_argument("--format", choices=FORMATS, default=None,
                       help="input format (default: from the file extension, else edgelist)")
        c.add_argument("--do", dest="interventions", action="append", type=_vertex, default=[],
                       metavar="SERIES@TIME", help="intervention, TIME <= 0; repeatable")
        c.add_argument("--effect", dest="effects", action="append", type=_vertex, default=[],
                       metavar="SERIES@TIME", help="effect; repeatable")
        c.add_argument("--consistency", action="store_true", help="assume consistency throughout time")
        c.add_argument("--output", choices=("json", "text"), default="json")
        return c

    graph_cmd("decide", "decide identifiability by common backdoor")
    graph_cmd("adjust", "print the adjustment formula")
    c = graph_cmd("oracle-check", "compare the decision with the brute-force oracle")
    c.add_argument("--window", type=_window, default=None, metavar="LO:HI",
                   help="oracle window relative to the effect time")
    c.add_argument("--max-lag", type=int, default=None)
    c.add_argument("--budget", type=_positive, default=None,
                   help=f"oracle step budget (default: ${oracle.BUDGET_ENV} or {oracle.DEFAULT_BUDGET})")
    c.add_argument("--engine", choices=("auto", "paths", "enumerate"), default="auto")
    c = graph_cmd("explain", "show the verdict with the quantities behind it")
    c.add_argument("--show-nc", action="store_true", help="print t_NC per series")
    c.add_argument("--show-access", action="append", default=[], metavar="ANCHOR",
                   help=f"print accessibility ceilings toward SERIES@TIME, or {COMBINED}")

    r = sub.add_parser("random", help="write a seeded corpus of random SCGs and queries")
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--count", type=_positive, default=20)
    r.add_argument("--series", type=_positive, default=5, help="maximum number of series")
    r.add_argument("--min-series", type=_positive, default=2)
    r.add_argument("--p", type=float, default=0.3, help="edge probability")
    r.add_argument("--p-self", type=float, default=None, help="self-loop probability (default: --p)")
    r.add_argument("--max-interventions", type=_positive, default=3)
    r.add_argument("--max-gamma", type=int, default=2)
    r.add_argument("--out", default=None, help="directory to write into (default: JSON on stdout)")
    r.add_argument("--output", choices=("json", "text"), default="json")
    return p


# ---------------------------------------------------------------- helpers


def _read_graph(args):
    if args.graph == "-":
        text = sys.stdin.read()
    else:
        with open(args.graph, encoding="utf-8") as fh:
            text = fh.read()
    fmt = args.format
    if fmt is None:
        ext = os.path.splitext(args.graph)[1].lower()
        fmt = {".json": "json", ".dot": "dot-subset", ".gv": "dot-subset"}.get(ext, "edgelist")
    return parse_scg(text, fmt)


def _query(args):
    if not args.effects:
        raise UsageError("at least one --effect is required")
    for v in args.interventions:
        if v.time > 0:
            raise UsageError(f"intervention time must be <= 0, got {v}")
    return CausalQuery(args.interventions, args.effects)


def _emit(args, payload, text):
    if args.output == "json":
        print(json.dumps(payload, ensure_ascii=False, indent=2))
    else:
        print(text)


def _verdict_text(v):
    lines = [f"query: {v.query}",
             f"consistency: {'assumed' if v.consistency else 'not assumed'}"]
    if v.pruned:
        lines.append("pruned: " + ", ".join(str(x) for x in v.pruned))
    if v.identifiable:
        lines.append("identifiable by common backdoor: yes")
        lines.append(f"adjustment: {v.adjustment.describe()}")
        lines.append(f"formula: {emit_formula(v)}")
    else:
        w = v.witness
        lines.append("identifiable by common backdoor: no")
        where = "no fork" if w.kind == "directed-no-fork" else f"fork at {w.fork}"
        lines.append(f"witness from {w.intervention} ({where}, rule {w.rule}): {w.path}")
    return "\n".join(lines)


def _exit_for(v):
    return EXIT_OK if v.identifiable else EXIT_NOT_IDENTIFIABLE


# ---------------------------------------------------------------- commands


def cmd_decide(args):
    g = _read_graph(args)
    v = decide(g, _query(args), args.consistency)
    _emit(args, v.to_json(), _verdict_text(v))
    return _exit_for(v)


def cmd_adjust(args):
    g = _read_graph(args)
    v = decide(g, _query(args), args.consistency)
    if not v.identifiable:
        _emit(args, v.to_json(), _verdict_text(v))
        return EXIT_NOT_IDENTIFIABLE
    formula = emit_formula(v)
    _emit(args, {"formula": formula, "adjustment": v.adjustment.to_json()}, formula)
    return EXIT_OK


def cmd_oracle_check(args):
    g = _read_graph(args)
    q = _query(args)
    res = oracle_check(g, q, args.consistency, args.window, args.max_lag, args.budget, args.engine)
    word = "AGREE" if res.agree else "DISAGREE"
    text = [f"{word}: decider says {'identifiable' if res.verdict.identifiable else 'not identifiable'},"
            f" oracle says {'identifiable' if res.oracle_identifiable else 'not identifiable'}"
            f" ({res.explored} candidates/steps explored)"]
    if res.reason:
        text.append(f"reason: {res.reason}")
    if res.oracle_witness is not None:
        text.append(f"oracle witness: {res.oracle_witness}")
    payload = {"result": word, **res.to_json()}
    _emit(args, payload, "\n".join(text))
    return EXIT_OK if res.agree else EXIT_INTERNAL


def cmd_explain(args):
    g = _read_graph(args)
    q = _query(args)
    v = decide(g, q, args.consistency)
    payload = {"verdict": v.to_json()}
    text = [_verdict_text(v)]
    if len(q.effects) == 1:
        core, _ = preprocess(g, q)
    else:
        core = q
    p = compute_t_nc(g, core)
    if args.show_nc:
        payload["t_nc"] = p.to_json()
        text.append("t_NC: " + ", ".join(f"{s}={to_json(t)}" for s, t in sorted(p.thresholds.items())))
    for a in args.show_access:
        if a == COMBINED:
            prof = compute_accessibility_combined(g, p, core)
        else:
            try:
                anchor = _vertex(a)
            except argparse.ArgumentTypeError as exc:
                raise UsageError(str(exc)) from None
            prof = compute_accessibility(g, p, anchor)
        payload.setdefault("access", {})[a] = prof.to_json()
        text.append(f"ceilings toward {a}: " +
                    ", ".join(f"{s}={to_json(t)}" for s, t in sorted(prof.ceilings.items())))
    _emit(args, payload, "\n".join(text))
    return _exit_for(v)


def cmd_random(args):
    for name, prob in (("--p", args.p), ("--p-self", args.p_self)):
        if prob is not None and not 0 <= prob <= 1:
            raise UsageError(f"{name} must lie in [0, 1]")
    if args.max_gamma < 0:
        raise UsageError("--max-gamma must be non-negative")
    if args.min_series > args.series:
        raise UsageError("--min-series larger than --series")
    cases = corpus(args.seed, args.count, args.series, args.p, args.p_self,
                   args.max_interventions, args.max_gamma, args.min_series)
    records = []
    for inst in cases:
        records.append({"name": inst.name, "graph": serialize_scg(inst.scg, "edgelist"),
                        "query": inst.query.to_json()})
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for rec in records:
            with open(os.path.join(args.out, rec["name"] + ".edgelist"), "w", encoding="utf-8") as fh:
                fh.write(rec["graph"])
            with open(os.path.join(args.out, rec["name"] + ".query.json"), "w", encoding="utf-8") as fh:
                json.dump(rec["query"], fh, sort_keys=True)
                fh.write("\n")
        manifest = {"seed": args.seed, "count": args.count, "series": args.series, "p": args.p,
                    "p_self": args.p_self, "max_interventions": args.max_interventions,
                    "max_gamma": args.max_gamma, "cases": [r["name"] for r in records]}
        with open(os.path.join(args.out, "manifest.json"), "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        _emit(args, {"written": len(records), "out": args.out}, f"wrote {len(records)} cases to {args.out}")
    else:
        _emit(args, {"seed": args.seed, "cases": records},
              "\n".join(f"# {r['name']}\n{r['graph']}" for r in records))
    return EXIT_OK


COMMANDS = {"decide": cmd_decide, "adjust": cmd_adjust, "oracle-check": cmd_oracle_check,
            "explain": cmd_explain, "random": cmd_random}


def _fail(args, code, kind, message):
    print(f"scgbackdoor: {kind}: {message}", file=sys.stderr)
    if getattr(args, "output", "json") == "json":
        print(json.dumps({"error": {"type": kind, "message": message}}))
    return code


def main(argv=None):
    parser = build_parser()
    args = None
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail(args, EXIT_USAGE, "usage", str(exc))
    except BudgetExceeded as exc:
        return _fail(args, EXIT_USAGE, "BudgetExceeded", str(exc))
    except SCGError as exc:
        return _fail(args, EXIT_USAGE, type(exc).__name__, str(exc))
    except OSError as exc:
        return _fail(args, EXIT_USAGE, "io", str(exc))
    except Exception as exc:  # invariant violations and bugs
        return _fail(args, EXIT_INTERNAL, "internal", f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    sys.exit(main())
