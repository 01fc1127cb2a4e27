"""Command-line front end.

Every command prints a JSON document (``schema_version`` included) or a
short text summary, and can write the same JSON to a file.  Library errors
become a JSON error object on stdout with exit status 2.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import SubseriesError
from .fn32 import enumerate_classes, qualifying_count
from .series.catalog import INSTANCES, get_instance, get_stream
from .series.indexsets import ALL, EMPTY_SET, Residues, SignCell, evens, odds
from .series.oracle import VerdictOracle
from .series.tameness import cell_unions, nonempty_cells, pattern_string, sign_partition, tame_phi_family
from .series.traces import TrendPolicy, decade_checkpoints

SCHEMA_VERSION = 1
COMMANDS = ("enumerate-fn32", "partition", "classify", "two-series", "balance", "construct-three",
            "counterexample", "regression")


@dataclasses.dataclass
class RunConfig:
    depth: int = 1_000_000
    epsilon: float = 0.01
    threshold: float = 2.0
    margin: float = 0.5
    checkpoints: tuple | None = None
    json_out: str | None = None
    csv_out: str | None = None
    cx_mode: str = "paper"
    blocks_M: int = 4
    seed: int = 0
    fixtures: str | None = None

    def validate(self):
        if self.depth < 1000:
            raise ValueError("depth must be >= 1000")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")

    def policy(self) -> TrendPolicy:
        return TrendPolicy(self.threshold, self.margin, self.checkpoints)

    def fixture_dir(self) -> Path:
        return Path(self.fixtures or os.environ.get("SUBSERIES_LAB_FIXTURES") or "fixtures")


_CONFIG_KEYS = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def load_config(path) -> dict:
    """Flat ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def _coerce(key, value):
    if key in ("depth", "blocks_M", "seed"):
        return int(float(value)) if "e" in value.lower() else int(value)
    if key in ("epsilon", "threshold", "margin"):
        return float(value)
    if key == "checkpoints":
        return tuple(int(float(v)) for v in value.split(",") if v.strip())
    return value


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _dump(doc: dict, path: str | None) -> str:
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    text = json.dumps(doc, indent=2, sort_keys=True, default=str)
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text + "\n")
    return text


def _streams(args):
    if getattr(args, "streams", None):
        return [get_stream(s.strip()) for s in args.streams.split(",")]
    return get_instance(args.instance)


def parse_set(text: str, streams=None):
    """``all``, ``empty``, ``odds``, ``evens``, ``mod4:1,3`` or ``cell:+-+``."""
    t = text.strip().lower()
    if t == "all":
        return ALL
    if t == "empty":
        return EMPTY_SET
    if t == "odds":
        return odds()
    if t == "evens":
        return evens()
    if t.startswith("mod") and ":" in t:
        m, rs = t[3:].split(":", 1)
        return Residues(int(m), [int(r) for r in rs.split(",")])
    if t.startswith("cell:"):
        if not streams:
            raise ValueError("cell sets need streams")
        pat = tuple(c == "+" for c in t[5:])
        if len(pat) != len(streams):
            raise ValueError(f"pattern {t[5:]!r} does not match {len(streams)} streams")
        return SignCell(pat, streams)
    raise ValueError(f"cannot parse index set {text!r}")


def _cells_json(cells, oracle, streams):
    out = []
    for p, c in nonempty_cells(cells).items():
        row = {"pattern": pattern_string(p), "set": c.describe(),
               "verdicts": [oracle.verdict(s, c).value for s in streams]}
        res = c.residues()
        if res is not None:
            row["residues"] = {"modulus": res[0], "classes": sorted(res[1])}
        out.append(row)
    return out


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_enumerate(args, cfg):
    classes = enumerate_classes()
    doc = {"command": "enumerate-fn32", "classes": [c.to_json() for c in classes],
           "qualifying_families": qualifying_count()}
    text = _dump(doc, cfg.json_out)
    if args.text:
        for c in classes:
            print(f"{c.family_type.value:8s} orbit {c.orbit_size:3d}  " + " ".join(c.representative.sorted_strings()))
    else:
        print(text)
    return 0


def cmd_partition(args, cfg):
    streams = _streams(args)
    oracle = VerdictOracle()
    cells = sign_partition(streams)
    doc = {"command": "partition", "streams": [s.label for s in streams],
           "cells": _cells_json(cells, oracle, streams)}
    print(_dump(doc, cfg.json_out))
    return 0


def cmd_classify(args, cfg):
    streams = _streams(args)
    oracle = VerdictOracle()
    cells = sign_partition(streams)
    fam = tame_phi_family(cells, streams, oracle)
    from .fn32 import classify
    doc = {"command": "classify", "streams": [s.label for s in streams],
           "family": fam.sorted_strings(), "family_type": classify(fam).value}
    status = 0
    if args.check_15:
        unions = cell_unions(cells, streams, oracle)
        totals = [u for u in unions if u.phi and u.phi.is_total]
        doc["check_15"] = {"unions": len(unions), "total_phi": [u.to_json() for u in totals],
                           "passed": len(unions) == 15 and not totals}
        status = 0 if doc["check_15"]["passed"] else 1
    print(_dump(doc, cfg.json_out))
    return status


def cmd_two_series(args, cfg):
    from .constructions.two_series import two_series_select
    streams = _streams(args)
    if len(streams) != 2:
        raise ValueError("two-series needs exactly two streams")
    oracle = VerdictOracle()
    cells = sign_partition(streams)
    res = two_series_select(cells, streams, oracle)
    doc = {"command": "two-series", "streams": [s.label for s in streams],
           "cells": _cells_json(cells, oracle, streams), "result": res.to_json()}
    print(_dump(doc, cfg.json_out))
    return 0


def cmd_balance(args, cfg):
    from .constructions.balance import balance_split, greedy_balance, rule_violations
    from .series.traces import envelope_start
    stream = get_stream(args.stream)
    oracle = VerdictOracle()
    A = parse_set(args.set, [stream])
    doc = {"command": "balance", "mode": args.mode, "stream": stream.label, "set": A.describe()}
    if args.mode == "split":
        sp = balance_split(A, stream, blocks=args.blocks, depth_cap=cfg.depth, oracle=oracle)
        sched = sp.schedule
        doc["schedule"] = sched.to_json()
        doc["block_abs_sums"] = [float(sched.block_abs_sum(m)) for m in range(1, args.blocks + 1)]
        doc["B"], doc["rest"] = sp.B.describe(), sp.rest.describe()
    else:
        C = parse_set(args.C, [stream]) if args.C else A
        g = greedy_balance(C, A, stream, cfg.depth, oracle=oracle if args.check_verdicts else None)
        tr = g.trace
        in_a = A.mask(cfg.depth)
        viol = rule_violations(g.B.mask(cfg.depth), in_a, g.trace.float_sums)
        eps = cfg.epsilon
        doc["greedy"] = {
            "C": C.describe(), "depth": cfg.depth, "sign": g.sign,
            "final": float(tr.final), "rule_violations": int(viol.size),
            "epsilon": eps, "envelope_start": envelope_start(tr, eps),
            "trace": tr.to_json(cfg.checkpoints),
        }
        if cfg.csv_out:
            Path(cfg.csv_out).parent.mkdir(parents=True, exist_ok=True)
            tr.write_csv(cfg.csv_out, every=args.every, checkpoints=cfg.checkpoints if args.checkpoint_rows else None)
    print(_dump(doc, cfg.json_out))
    return 0


def cmd_construct_three(args, cfg):
    from .constructions.three_series import three_series_select
    streams = _streams(args)
    policy = cfg.policy()
    try:
        rep = three_series_select(streams, depth=cfg.depth, blocks=args.blocks,
                                  evidence_depth=cfg.depth if not args.no_traces else None,
                                  policy=policy)
    except SubseriesError as exc:
        partial = getattr(exc, "partial_report", None)
        err = {**exc.to_json(), "partial_report": partial.to_json() if partial else None}
        print(_dump({"command": "construct-three", **err}, cfg.json_out))
        return 2
    doc = {"command": "construct-three", "streams": [s.label for s in streams],
           "report": rep.to_json(), "certificate_problems": rep.validate()}
    if args.csv_prefix and getattr(rep, "_traces", None):
        prefix = args.csv_prefix
        if prefix.endswith("/"):
            Path(prefix).mkdir(parents=True, exist_ok=True)
        cps = cfg.checkpoints or decade_checkpoints(cfg.depth)
        for s, tr in zip(streams, rep._traces):
            tr.write_csv(f"{prefix}{s.label}.csv", every=args.every,
                         checkpoints=cps if args.checkpoint_rows else None)
    print(_dump(doc, cfg.json_out))
    return 0


def _selection(args, cfg, table):
    from . import counterexample as cx
    M = cfg.blocks_M
    if args.selection == "odds":
        return cx.witness_odds(M, table)
    if args.selection == "empty":
        return cx.empty_selection(M)
    return cx.random_selection(table, random.Random(cfg.seed), M)


def cmd_counterexample(args, cfg):
    from . import counterexample as cx
    table = cx.b_sequence(cfg.blocks_M, cfg.cx_mode)
    doc = {"command": "counterexample", "mode": table.mode.value, "M": table.M,
           "b": [str(b) for b in table.lengths]}
    if args.print_b:
        for m, b in enumerate(table.lengths, start=1):
            print(f"b_{m} = {b}")
        _dump(doc, cfg.json_out)
        return 0
    sel = _selection(args, cfg, table)
    T = Fraction(args.cx_threshold)
    rep = cx.oscillation_report(sel, args.series, table.M, T, table)
    doc["selection"] = args.selection
    doc["report"] = rep.to_json()
    doc["dominance"] = [{k: (str(v) if isinstance(v, Fraction) else v) for k, v in r.items()}
                        for r in cx.dominance_check(sel, table.M, table)]
    if cfg.csv_out:
        import csv
        Path(cfg.csv_out).parent.mkdir(parents=True, exist_ok=True)
        with open(cfg.csv_out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["m", "b_m", "delta", "block_sum", "boundary_sum"])
            for m in range(1, table.M + 1):
                w.writerow([m, table.b(m), cx.delta(m, sel), str(cx.block_sum(args.series, m, sel, table)),
                            str(rep.boundary_sums[m - 1])])
    print(_dump(doc, cfg.json_out))
    return 0


def cmd_regression(args, cfg):
    from .regression import compare, derived_constants
    d = cfg.fixture_dir()
    path = d / "derived.json"
    current = derived_constants()
    if args.update or not path.exists():
        d.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(current, indent=2, sort_keys=True) + "\n")
        print(_dump({"command": "regression", "mode": "generated", "path": str(path),
                     "constants": len(current)}, cfg.json_out))
        return 0
    frozen = json.loads(path.read_text())
    drift = compare(frozen, current)
    print(_dump({"command": "regression", "mode": "replay", "path": str(path),
                 "constants": len(frozen), "drift": drift}, cfg.json_out))
    return 1 if drift else 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--depth", type=lambda s: int(float(s)))
    common.add_argument("--epsilon", type=float)
    common.add_argument("--checkpoints", help="comma-separated checkpoint indices")
    common.add_argument("--json", dest="json_out")
    common.add_argument("--seed", type=int)

    trend = argparse.ArgumentParser(add_help=False)
    trend.add_argument("--threshold", type=float, help="trend policy threshold T")
    trend.add_argument("--margin", type=float)

    def inst(default="intro"):
        # parents share Action objects, so each subcommand gets its own
        q = argparse.ArgumentParser(add_help=False)
        q.add_argument("--instance", default=default, choices=sorted(INSTANCES))
        q.add_argument("--streams", help="comma-separated stream names (overrides --instance)")
        return q

    p = argparse.ArgumentParser(prog="subseries-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate-fn32", parents=[common], help="classes of full union-closed families")
    e.add_argument("--text", action="store_true", help="one line per class instead of JSON")

    sub.add_parser("partition", parents=[common, trend, inst()], help="nonempty sign cells of an instance")

    c = sub.add_parser("classify", parents=[common, trend, inst()], help="tame phi family and its type")
    c.add_argument("--check-15", action="store_true", help="no nonempty cell union has a total phi")

    sub.add_parser("two-series", parents=[common, trend, inst("opposite")],
                   help="one set sending two series to infinity")

    b = sub.add_parser("balance", parents=[common, trend], help="block split or greedy balancing")
    b.add_argument("--mode", choices=("split", "greedy"), required=True)
    b.add_argument("--stream", default="altharm")
    b.add_argument("--set", default="odds", help="A (all, odds, evens, modM:r,..)")
    b.add_argument("--C", help="C for greedy mode (defaults to A)")
    b.add_argument("--blocks", type=int, default=4)
    b.add_argument("--csv", dest="csv_out")
    b.add_argument("--every", type=int, help="write every k-th trace row")
    b.add_argument("--checkpoint-rows", action="store_true", help="write only checkpoint rows")
    b.add_argument("--check-verdicts", action="store_true", help="check the verdicts on A and its complement")

    k = sub.add_parser("construct-three", parents=[common, trend, inst()], help="the three-series case analysis")
    k.add_argument("--blocks", type=int, default=4)
    k.add_argument("--csv-prefix")
    k.add_argument("--every", type=int)
    k.add_argument("--checkpoint-rows", action="store_true")
    k.add_argument("--no-traces", action="store_true")

    x = sub.add_parser("counterexample", parents=[common], help="four-series block construction")
    x.add_argument("--mode", dest="cx_mode", choices=("paper", "strict"))
    x.add_argument("--blocks", dest="blocks_M", type=int)
    x.add_argument("--selection", choices=("odds", "empty", "random"), default="odds")
    x.add_argument("--series", type=int, default=2, choices=(1, 2, 3, 4))
    x.add_argument("--threshold", default="1", dest="cx_threshold")
    x.add_argument("--csv", dest="csv_out")
    x.add_argument("--print-b", action="store_true")

    r = sub.add_parser("regression", parents=[common], help="replay or generate frozen constants")
    r.add_argument("--fixtures")
    r.add_argument("--update", action="store_true")
    return p


def make_config(args) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(load_config(args.config))
    for key in _CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = _coerce(key, v) if isinstance(v, str) and key == "checkpoints" else v
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


_HANDLERS = {
    "enumerate-fn32": cmd_enumerate,
    "partition": cmd_partition,
    "classify": cmd_classify,
    "two-series": cmd_two_series,
    "balance": cmd_balance,
    "construct-three": cmd_construct_three,
    "counterexample": cmd_counterexample,
    "regression": cmd_regression,
}


def run(command: str, argv=None) -> int:
    return main([command, *(argv or [])])


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
        return _HANDLERS[args.command](args, cfg)
    except SubseriesError as exc:
        print(json.dumps({"schema_version": SCHEMA_VERSION, **exc.to_json()}, sort_keys=True))
        return 2
    except (ValueError, KeyError) as exc:
        print(json.dumps({"schema_version": SCHEMA_VERSION, "error": type(exc).__name__,
                          "message": str(exc)}, sort_keys=True))
        return 2


if __name__ == "__main__":
    sys.exit(main())
