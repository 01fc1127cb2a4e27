"""Derived constants frozen as fixtures and replayed to detect drift."""

from __future__ import annotations

import math

FLOAT_TOL = 1e-12


def derived_constants() -> dict:
    from . import counterexample as cx
    from .constructions.balance import balance_split, greedy_balance
    from .constructions.three_series import three_series_select
    from .fn32 import enumerate_classes, qualifying_count
    from .series.catalog import get_instance, get_stream
    from .series.indexsets import evens, odds
    from .series.oracle import VerdictOracle
    from .series.tameness import nonempty_cells, pattern_string, phi, sign_partition
    from .series.traces import partial_sum_trace

    out = {}
    out["fn32.qualifying_families"] = qualifying_count()
    out["fn32.classes"] = [[c.family_type.value, len(c.representative), c.orbit_size]
                           for c in enumerate_classes()]
    out["cx.b.paper.5"] = [str(b) for b in cx.b_sequence(5, "paper").lengths]
    out["cx.b.strict.4"] = [str(b) for b in cx.b_sequence(4, "strict").lengths]
    table = cx.b_sequence(4, "paper")
    out["cx.series2.odds.4"] = [str(s) for s in cx.boundary_sums(cx.witness_odds(4, table), 2, 4, table)]

    alt = get_stream("altharm")
    out["split.altharm.odds.cutpoints"] = [
        str(k) for k in balance_split(odds(), alt, blocks=8).schedule.cutpoints[1:]]
    out["trace.altharm.odds.1e6"] = float(partial_sum_trace(alt, odds(), 10**6).final)
    out["greedy.parity.evens.1e6"] = float(
        greedy_balance(evens(), evens(), get_stream("parity"), 10**6).trace.final)

    intro = get_instance("intro")
    oracle = VerdictOracle()
    cells = nonempty_cells(sign_partition(intro))
    out["intro.cell_phis"] = {pattern_string(p): str(phi(c, intro, oracle)) for p, c in cells.items()}
    for name in ("intro", "type1", "type1junk"):
        rep = three_series_select(get_instance(name))
        out[f"three.{name}.case"] = rep.case
        out[f"three.{name}.numeric_steps"] = rep.numeric_steps
    return out


def compare(frozen: dict, current: dict) -> list:
    """Keys whose values moved; floats compare to FLOAT_TOL."""
    drift = []
    for key in sorted(set(frozen) | set(current)):
        a, b = frozen.get(key), current.get(key)
        if isinstance(a, float) and isinstance(b, float):
            if not math.isclose(a, b, rel_tol=0, abs_tol=FLOAT_TOL):
                drift.append({"key": key, "frozen": a, "current": b})
        elif a != b:
            drift.append({"key": key, "frozen": a, "current": b})
    return drift
