"""Command-line front end.

Every report is one JSON document (or CSV table) carrying ``schema`` and the
fully resolved run configuration, so identical invocations produce identical
bytes. Exit status: 0 on success, 2 on usage or precondition failures, 1 on
anything unexpected.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import codes as codes_mod
from .bitstring import BitString, ParseError, read_any, write_text
from .flags import FlagColor, ParamSet, b_values, count_flags
from .matching import (Matching, blue_yellow_balanced, blue_yellow_match, green_match,
                       imbalanced_match, naive_match, strategy_lcs_bound, validate)
from .oracle import DEFAULT_BUDGET_CELLS, BudgetExceeded, lcs_exact, lcs_fast
from .regularity import balance_scan
from .statistics import (StatisticsMismatch, find_collision, pipeline_lcs,
                         statistics_table)
from .structure import EXACT, FAST, classify_report

SCHEMA_VERSION = 1


class UsageError(Exception):
    """Bad input or an unmet precondition; maps to exit status 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from None


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _common() -> argparse.ArgumentParser:
    c = _Parser(add_help=False)
    c.add_argument("--epsilon", type=_rational, default=None)
    c.add_argument("--gamma", type=_rational, default=None)
    c.add_argument("--loose", action="store_true",
                   help="allow gamma up to epsilon^2 (desk-scale experiments)")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default=None)
    c.add_argument("--format", choices=("json", "csv"), default="json")
    c.add_argument("--budget-cells", type=int, default=DEFAULT_BUDGET_CELLS)
    c.add_argument("--sweep-cap", type=int, default=2**16)
    c.add_argument("--span-floor", type=_rational, default=codes_mod.DEFAULT_SPAN_FLOOR)
    c.add_argument("--n0-override", type=int, default=None)
    c.add_argument("--mode", choices=(EXACT, FAST), default=EXACT)
    c.add_argument("--workers", type=int, default=1)
    return c


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="lcsflags", description="Flag analysis and LCS constructions "
                     "for binary strings.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add("flags", "b-values and per-colour flag counts")
    p.add_argument("input")
    p.add_argument("--length", type=int, action="append", default=None)

    p = add("classify", "type of each string")
    p.add_argument("input")

    p = add("balance", "per-scale Blue-flag balance scan")
    p.add_argument("input")
    p.add_argument("--beta", type=_rational, default=None)
    p.add_argument("--variant", choices=("interval", "substring"), default="interval")

    p = add("match", "run one matching construction")
    p.add_argument("strategy", choices=("naive", "imbalanced", "green", "blue-yellow",
                                        "balanced", "stitch-imbalanced", "stitch-green",
                                        "stitch-blue-yellow"))
    p.add_argument("s")
    p.add_argument("t")
    p.add_argument("--delta", type=int, default=0)
    p.add_argument("--ell", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--b-cap", type=int, default=None)

    p = add("lcs", "exact LCS with witness")
    p.add_argument("s")
    p.add_argument("t")
    p.add_argument("--fast", action="store_true", help="length only")

    p = add("table", "statistics table of each string")
    p.add_argument("input")

    p = add("collide", "first pair of strings sharing a collision key")
    p.add_argument("input")

    p = add("pipeline", "end-to-end case analysis on a pair")
    p.add_argument("s")
    p.add_argument("t")
    p.add_argument("--window", type=int, nargs=2, default=None, metavar=("LO", "HI"))
    p.add_argument("--b-cap", type=int, default=None)

    p = add("codes", "generate a code family, optionally measuring every pair")
    p.add_argument("family", choices=("bukh-ma", "random", "qary"))
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--length", type=int, default=None)
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--input", default=None, help="q-ary code, one digit string per line")
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--measure", action="store_true")
    p.add_argument("--with-span", action="store_true")
    p.add_argument("--write", default=None, help="also write the code as text")

    p = add("cs-estimate", "Monte-Carlo LCS/n of random pairs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)

    p = add("span", "minimum substring ratio (|s'|+|t'|)/LCS")
    p.add_argument("s")
    p.add_argument("t")

    p = add("verify-matching", "re-check a matching from a report")
    p.add_argument("s")
    p.add_argument("t")
    p.add_argument("matching")
    return parser


# -- helpers ---------------------------------------------------------------

def _params(args) -> ParamSet:
    kw = {}
    if args.epsilon is not None:
        kw["epsilon"] = args.epsilon
    if args.gamma is not None:
        kw["gamma"] = args.gamma
    try:
        return ParamSet(strict=not args.loose, **kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _read(path: str) -> list[BitString]:
    try:
        strings = read_any(path)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except (ParseError, ValueError, UnicodeDecodeError) as exc:
        raise UsageError(f"{path}: {exc}") from None
    if not strings:
        raise UsageError(f"{path}: no strings")
    return strings


def _one(path: str) -> BitString:
    return _read(path)[0]


def _map(fn, items, workers: int) -> list:
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))  # map keeps input order


def _config(args, p: ParamSet) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("epsilon", "gamma", "loose")}
    cfg["params"] = p.snapshot()
    # worker count never changes results, so it stays out of the report
    cfg.pop("workers", None)
    return cfg


def _precondition(fn):
    try:
        return fn()
    except (ValueError, BudgetExceeded) as exc:
        raise UsageError(str(exc)) from None


# -- subcommands -------------------------------------------------------------

def cmd_flags(args, p):
    strings = _read(args.input)
    rows, out = [], []
    for k, w in enumerate(strings):
        b = b_values(w, p)
        L = w.n_ones
        lengths = args.length or [2**j for j in range(max(1, L).bit_length())]
        counts = {str(ell): {c.name.lower(): count_flags(w, ell, c, p) for c in FlagColor}
                  for ell in lengths}
        out.append({"index": k, "L": L, "b": b.tolist(), "counts": counts})
        rows.extend({"string": k, "i": i + 1, "b": int(v)} for i, v in enumerate(b))
    return {"strings": out}, rows


def cmd_classify(args, p):
    strings = _read(args.input)
    reps = _map(lambda w: _precondition(lambda: classify_report(w, p, args.mode)),
                strings, args.workers)
    out = [{"index": k, **r.to_json()} for k, r in enumerate(reps)]
    rows = [{"string": r["index"], "label": r["label"]} for r in out]
    return {"strings": out}, rows


def cmd_balance(args, p):
    strings = _read(args.input)
    beta = args.beta if args.beta is not None else p.balance_beta
    scans = _map(lambda w: _precondition(lambda: balance_scan(w, beta, p, args.variant)),
                 strings, args.workers)
    rows = [{"string": k, "m": r.m, "unbalanced": r.unbalanced, "blocks": len(r.balanced)}
            for k, sc in enumerate(scans) for r in sc.reports]
    return {"strings": [sc.to_json() for sc in scans]}, rows


def cmd_match(args, p):
    s, t = _one(args.s), _one(args.t)
    kind = args.strategy

    def run():
        if kind == "naive":
            return naive_match(s, t, args.delta), None
        if kind == "imbalanced":
            return imbalanced_match(s, t), None
        if kind == "green":
            if args.ell is None:
                raise ValueError("green needs --ell")
            return green_match(s, t, args.ell, args.delta, p), None
        if kind == "blue-yellow":
            return blue_yellow_match(s, t, args.delta, p, args.m or 0, args.b_cap), None
        if kind == "balanced":
            return blue_yellow_balanced(s, t, args.delta, p, args.m or 0, None, args.b_cap), None
        res = strategy_lcs_bound(kind.removeprefix("stitch-"), s, t, p, m=args.m, ell=args.ell,
                                 b_cap=args.b_cap, sweep_cap=args.sweep_cap, seed=args.seed)
        return res.matching, res

    mt, res = _precondition(run)
    report = {"strategy": kind, "size": mt.size, "valid": validate(mt, s, t),
              "matching": mt.to_json()}
    if res is not None:
        report["strategy_result"] = {k: v for k, v in res.to_json().items() if k != "matching"}
    return report, [{"a": a, "b": b} for a, b in mt.pairs]


def cmd_lcs(args, p):
    s, t = _one(args.s), _one(args.t)
    if args.fast:
        return {"length": lcs_fast(s, t)}, [{"length": lcs_fast(s, t)}]
    res = _precondition(lambda: lcs_exact(s, t, args.budget_cells))
    return res.to_json(), [{"a": a, "b": b} for a, b in res.witness.pairs]


def cmd_table(args, p):
    strings = _read(args.input)
    tables = _map(lambda w: _precondition(
        lambda: statistics_table(w, p, args.n0_override, args.mode)), strings, args.workers)
    out = [{"index": k, "digest": tb.digest(), "table": tb.to_json()}
           for k, tb in enumerate(tables)]
    rows = [{"string": k, "m": blk["m"], "i": blk["i"], "zeros": blk["zeros"],
             "ones": blk["ones"], "type": "" if blk["type"] is None else
             json.dumps(blk["type"], sort_keys=True)}
            for k, o in enumerate(out) for blk in o["table"]["blocks"]]
    return {"strings": out}, rows


def cmd_collide(args, p):
    strings = _read(args.input)
    rep = _precondition(lambda: find_collision(strings, p, args.n0_override, args.mode))
    return rep.to_json(), [{"pair": "" if rep.pair is None else f"{rep.pair[0]},{rep.pair[1]}",
                            "distinct_keys": rep.distinct}]


def cmd_pipeline(args, p):
    s, t = _one(args.s), _one(args.t)
    try:
        res = pipeline_lcs(s, t, p, args.n0_override, args.window, args.mode, args.b_cap,
                           args.sweep_cap, args.seed)
    except StatisticsMismatch as exc:
        raise UsageError(f"statistics disagree ({exc.which}):\n  " + "\n  ".join(exc.diff))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = res.to_json()
    report["valid"] = validate(res.matching, s, t)
    return report, [{"case": res.case, "size": res.size}]


def cmd_codes(args, p):
    fam = args.family
    if fam == "bukh-ma":
        if args.k is None:
            raise UsageError("bukh-ma needs --k")
        bm = _precondition(lambda: codes_mod.bukh_ma_code(args.k))
        code = bm.periods
        extra = {"concatenation_length": len(bm.concatenation)}
    elif fam == "random":
        if args.length is None or args.size is None:
            raise UsageError("random needs --length and --size")
        code = _precondition(lambda: codes_mod.random_code(args.length, args.size, args.seed))
        extra = {}
    else:
        if args.input is None or args.q is None:
            raise UsageError("qary needs --input and --q")
        try:
            words = [ln.strip() for ln in Path(args.input).read_text().splitlines() if ln.strip()]
        except FileNotFoundError:
            raise UsageError(f"no such file: {args.input}") from None
        qr = _precondition(lambda: codes_mod.qary_restrict(words, args.q))
        code = qr.code
        extra = {k: v for k, v in qr.to_json().items() if k != "strings"}
    if args.write:
        write_text(args.write, code.strings)
    report = {"code": code.metadata(), **extra, "strings": [w.bits for w in code]}
    rows = []
    if args.measure:
        floor = args.span_floor if args.with_span else None
        rows = _precondition(lambda: codes_mod.pair_measurements(code, floor))
        for r in rows:
            r["runtime"] = round(r["runtime"], 6)
        report["pairs"] = [{k: v for k, v in r.items() if k != "runtime"} for r in rows]
    return report, rows


def cmd_cs_estimate(args, p):
    est = _precondition(lambda: codes_mod.cs_estimate(args.n, args.trials, args.seed))
    return est.to_json(), [{"trial": k, "value": v} for k, v in enumerate(est.values)]


def cmd_span(args, p):
    s, t = _one(args.s), _one(args.t)
    res = _precondition(lambda: codes_mod.span(s, t, args.span_floor, args.budget_cells))
    row = {"s_start": None, "s_end": None, "t_start": None, "t_end": None}
    if res.s_range is not None:
        row = {"s_start": res.s_range[0], "s_end": res.s_range[1],
               "t_start": res.t_range[0], "t_end": res.t_range[1]}
    row.update(lcs=res.lcs, ratio="unbounded" if res.ratio is None else res.ratio,
               c=res.c, granularity=res.granularity)
    return res.to_json(), [row]


def _find_matching(obj):
    if isinstance(obj, dict):
        if "pairs" in obj and isinstance(obj["pairs"], list):
            return obj
        for v in obj.values():
            found = _find_matching(v)
            if found is not None:
                return found
    elif isinstance(obj, list):
        for v in obj:
            found = _find_matching(v)
            if found is not None:
                return found
    return None


def cmd_verify(args, p):
    s, t = _one(args.s), _one(args.t)
    try:
        obj = json.loads(Path(args.matching).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"{args.matching}: {exc}") from None
    found = _find_matching(obj)
    if found is None:
        raise UsageError(f"{args.matching}: no matching found")
    mt = Matching.from_json(found)
    ok = validate(mt, s, t)
    if not ok:
        raise UsageError(f"matching of size {mt.size} does not validate")
    return {"valid": ok, "size": mt.size}, [{"valid": ok, "size": mt.size}]


COMMANDS = {
    "flags": cmd_flags, "classify": cmd_classify, "balance": cmd_balance,
    "match": cmd_match, "lcs": cmd_lcs, "table": cmd_table, "collide": cmd_collide,
    "pipeline": cmd_pipeline, "codes": cmd_codes, "cs-estimate": cmd_cs_estimate,
    "span": cmd_span, "verify-matching": cmd_verify,
}


def _render(args, p, report, rows) -> str:
    if args.format == "csv":
        if not rows:
            raise UsageError(f"{args.command} has no tabular output")
        buf = io.StringIO()
        fields = list(dict.fromkeys(k for r in rows for k in r))
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: str(v) if isinstance(v, Fraction) else v for k, v in r.items()})
        return buf.getvalue()
    doc = {"schema": SCHEMA_VERSION, "config": _config(args, p), "report": report}
    return json.dumps(doc, default=_jsonable, sort_keys=True, indent=2) + "\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        p = _params(args)
        report, rows = COMMANDS[args.command](args, p)
        text = _render(args, p, report, rows)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    if args.out:
        Path(args.out).write_text(text)
    else:
        stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())
