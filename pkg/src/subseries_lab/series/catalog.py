"""Built-in streams and instances.

Periodic entries are given as ``(coefficient, power)`` per residue
``r = n mod period``, listed for r = 0, 1, ..., period - 1.
"""

from __future__ import annotations

from functools import lru_cache

from .streams import PeriodicStream, TermStream, parse_term

_PERIODIC = {
    # (-1)^(n+1)/n
    "altharm": [(-1, 1), (1, 1)],
    # +1/n on evens, -1/n on odds
    "parity": [(1, 1), (-1, 1)],
    # three-series example whose sign cells are the classes mod 4
    "intro1": [(-1, 1), (1, 1), (-1, 1), (1, 1)],
    "intro2": [(0, 1), (1, 1), (0, 1), (-1, 1)],
    "intro3": [(-1, 1), (0, 1), (1, 1), (0, 1)],
    # synthetic Type 1 triple on the classes mod 3
    "type1a": [(0, 1), (1, 1), (-1, 1)],
    "type1b": [(1, 1), (-1, 1), (0, 1)],
    "type1c": [(-1, 1), (0, 1), (1, 1)],
    # Type 1 triple with an extra all-zero class (n = 0 mod 4)
    "junk1a": [(0, 1), (1, 1), (-1, 1), (0, 1)],
    "junk1b": [(0, 1), (-1, 1), (0, 1), (1, 1)],
    "junk1c": [(0, 1), (0, 1), (1, 1), (-1, 1)],
    # two-series endgames: cells ++, +-, -+, -- are n = 1, 2, 3, 0 mod 4
    "eg1a": [(-1, 1), (1, 1), (1, 2), (-1, 2)],
    "eg1b": [(-1, 2), (1, 2), (-1, 1), (1, 1)],
    "eg2a": [(-1, 2), (1, 2), (1, 1), (-1, 1)],
    "eg2b": [(-1, 1), (1, 1), (-1, 2), (1, 2)],
}

INSTANCES = {
    "intro": ("intro1", "intro2", "intro3"),
    "type1": ("type1a", "type1b", "type1c"),
    "type1junk": ("junk1a", "junk1b", "junk1c"),
    "copies": ("altharm", "altharm", "altharm"),
    "opposite": ("altharm", "parity"),
    "endgame1": ("eg1a", "eg1b"),
    "endgame2": ("eg2a", "eg2b"),
    "greedy": ("parity",),
    "cx": ("cx1", "cx2", "cx3", "cx4"),
}

STREAM_NAMES = tuple(_PERIODIC) + ("cx1", "cx2", "cx3", "cx4")


@lru_cache(maxsize=None)
def get_stream(name: str) -> TermStream:
    """Catalog lookup; anything else is parsed with the closed-form term grammar."""
    if name in _PERIODIC:
        entry = _PERIODIC[name]
        return PeriodicStream(name, [c for c, _ in entry], [k for _, k in entry])
    if name in ("cx1", "cx2", "cx3", "cx4"):
        from ..counterexample import catalog_stream
        return catalog_stream(int(name[2]))
    if name.startswith("-") and (name[1:] in _PERIODIC or name[1:] in STREAM_NAMES):
        return get_stream(name[1:]).negated()
    try:
        return parse_term(name)
    except ValueError as exc:
        raise KeyError(f"unknown stream {name!r}: not in catalog and {exc}") from None


def get_instance(name: str) -> list[TermStream]:
    if name not in INSTANCES:
        raise KeyError(f"unknown instance {name!r}; choose from {sorted(INSTANCES)}")
    return [get_stream(s) for s in INSTANCES[name]]
