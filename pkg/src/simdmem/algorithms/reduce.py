"""Section-parallel reductions: sums, global extrema, threshold flags.

The shared shape is *section accumulate + serial combine*: every PE
accumulates a window of ``section`` items concurrently (3 macros per
round: read the right neighbor's published accumulator, fold in the own
item, re-publish), then the controller enumerates the section heads and
folds their values serially over the exclusive bus.  Choosing the
section size M balances the two phases — macro cycles scale as
c·(M + N/M) in 1-D and c·(Mx + My + (Nx/Mx)(Ny/My)) in 2-D — so the
best M sits near the square root (cube root per axis in 2-D) of the
array size.

``threshold_flags`` is the degenerate case with no accumulation at all:
one broadcast predicate plus a constant tail of flag bookkeeping, so
its macro-cycle count is independent of the array size entirely (the
per-item flag readout rides the exclusive-operation meter instead).
"""

from __future__ import annotations

from ..errors import ArgumentError
from ..microcode import MacroOp
from .common import AlgorithmReport

__all__ = ["sum_1d", "sum_2d", "global_limit", "threshold_flags"]

_PUBLISH = MacroOp("copy", src="op", dst=("neighbor",))
_SAVE = MacroOp("copy", src="op", dst=("data", 0))
_RESTORE = MacroOp("copy", src=("data", 0), dst="op")


def _check_section(section, limit, what="section size"):
    section = int(section)
    if section <= 0:
        raise ArgumentError(f"{what} must be positive, got {section}")
    if section > limit:
        raise ArgumentError(f"{what} {section} exceeds axis length {limit}")
    return section


def _accumulate(mem, rounds, fold, direction="right"):
    """``rounds`` three-macro rounds growing each PE's window by one:
    pull the neighbor's published accumulator into op, fold the own
    item (kept in data 0), publish the new accumulator."""
    for _ in range(rounds):
        mem.run_macro(MacroOp("read_neighbor", direction=direction))
        mem.run_macro(MacroOp(fold, reg=("data", 0)))
        mem.run_macro(_PUBLISH)


def _read_heads(mem):
    """Enumerate the matched section heads and read their published
    accumulators over the exclusive bus (ascending addresses)."""
    heads = mem.enumerate_matches().matched
    return heads, [mem.exclusive_read(a) for a in heads]


def sum_1d(mem, section) -> AlgorithmReport:
    """Sum of the whole array, exact modulo 2**width.

    Every PE builds the sum of the ``section`` items starting at its own
    address; the controller then adds up the section heads' windows.
    Macro cycles: 3·section + ceil(n/section) + 4.
    """
    section = _check_section(section, mem.n_pe)
    before = mem.ledger.snapshot()
    mem.activate_all()
    mem.run_macro(_SAVE)
    mem.run_macro(_PUBLISH)
    _accumulate(mem, section - 1, "add")
    mem.run_macro(MacroOp("clear_flags"))
    mem.activate(0, mem.n_pe - 1, section)
    mem.run_macro(MacroOp("identify", value=1))
    heads, sums = _read_heads(mem)
    mem.activate_all()
    total = sum(sums) & mem.word_mask
    return AlgorithmReport(
        result=total,
        params={"section": section, "n": mem.n_pe,
                "sections": len(heads)},
        ledger_delta=mem.ledger.snapshot().delta(before))


def sum_2d(mem, section_x, section_y) -> AlgorithmReport:
    """2-D sum: row windows first, then column windows of row windows,
    then a serial combine over the section-corner heads."""
    if mem.dims is None:
        raise ArgumentError("sum_2d needs a 2-D array (dims set)")
    nx, ny = mem.dims
    mx = _check_section(section_x, nx, "x section size")
    my = _check_section(section_y, ny, "y section size")
    before = mem.ledger.snapshot()
    mem.activate_all()
    mem.run_macro(_SAVE)
    mem.run_macro(_PUBLISH)
    _accumulate(mem, mx - 1, "add", "right")
    # the row windows become the items of the column pass
    mem.run_macro(MacroOp("copy", src=("neighbor",), dst="op"))
    mem.run_macro(_SAVE)
    _accumulate(mem, my - 1, "add", "up")
    mem.run_macro(MacroOp("clear_flags"))
    mem.activate_2d((0, nx - 1, mx), (0, ny - 1, my))
    mem.run_macro(MacroOp("identify", value=1))
    heads, sums = _read_heads(mem)
    mem.activate_all()
    total = sum(sums) & mem.word_mask
    return AlgorithmReport(
        result=total,
        params={"section_x": mx, "section_y": my, "nx": nx, "ny": ny,
                "sections": len(heads)},
        ledger_delta=mem.ledger.snapshot().delta(before))


def global_limit(mem, section, which) -> AlgorithmReport:
    """Global extremum and the lowest address holding it.

    Section extrema are accumulated concurrently as in :func:`sum_1d`
    with maximum as the fold, the controller reduces the heads, and one
    concurrent equality probe plus the priority line yields the lowest
    witness address.  A minimum runs as the maximum of the complemented
    words (three extra broadcasts): windows clipped at the array edge
    read the fill word 0, which is the identity of an unsigned maximum
    but would poison a direct minimum.
    """
    if which not in ("min", "max"):
        raise ArgumentError(f"which must be 'min' or 'max', got {which!r}")
    section = _check_section(section, mem.n_pe)
    before = mem.ledger.snapshot()
    mem.activate_all()
    mem.run_macro(MacroOp("copy", src="op", dst=("data", 1)))  # originals
    if which == "min":
        mem.run_macro(MacroOp("load_immediate", value=mem.word_mask))
        mem.run_macro(MacroOp("sub", reg=("data", 1)))         # op := ~v
    mem.run_macro(_SAVE)                                        # fold item
    mem.run_macro(_PUBLISH)
    _accumulate(mem, section - 1, "maximum")
    mem.run_macro(MacroOp("clear_flags"))
    mem.activate(0, mem.n_pe - 1, section)
    mem.run_macro(MacroOp("identify", value=1))
    _, extrema = _read_heads(mem)
    value = max(extrema)
    if which == "min":
        value = mem.word_mask - value
    # lowest address holding the extremum, via one equality broadcast
    mem.activate_all()
    mem.run_macro(MacroOp("clear_flags"))
    mem.run_macro(MacroOp("load_immediate", value=value))
    mem.run_macro(MacroOp("copy", src="op", dst=("data", 2)))
    mem.run_macro(MacroOp("copy", src=("data", 1), dst="op"))  # originals
    mem.run_macro(MacroOp("compare_eq", reg=("data", 2)))
    mem.run_macro(MacroOp("identify"))
    address = mem.first_match()
    return AlgorithmReport(
        result={"value": value, "address": address},
        params={"section": section, "n": mem.n_pe, "which": which},
        ledger_delta=mem.ledger.snapshot().delta(before))


_COMPARATORS = ("lt", "le", "gt", "ge", "eq", "ne")


def threshold_flags(mem, value, cmp="ge") -> AlgorithmReport:
    """Per-item 0/1 flags for ``item <cmp> value`` plus their count.

    The predicate costs a constant number of broadcasts (at most six),
    the flag words are materialized and published in two more, so the
    macro-cycle count never depends on the array size; reading the N
    flag words back is exclusive-bus traffic only.
    """
    if cmp not in _COMPARATORS:
        raise ArgumentError(f"cmp must be one of {_COMPARATORS}, got {cmp!r}")
    value = int(value)
    if not 0 <= value <= mem.word_mask:
        raise ArgumentError(
            f"threshold {value} out of range for width {mem.width}")
    before = mem.ledger.snapshot()
    mem.activate_all()
    mem.run_macro(_SAVE)
    mem.run_macro(MacroOp("clear_flags"))
    top = mem.word_mask
    if cmp in ("eq", "ne"):
        mem.run_macro(MacroOp("load_immediate", value=value))
        mem.run_macro(MacroOp("copy", src="op", dst=("data", 1)))
        mem.run_macro(_RESTORE)
        mem.run_macro(MacroOp("compare_eq", reg=("data", 1)))
        if cmp == "ne":
            mem.run_macro(MacroOp("invert_m"))
    elif cmp == "ge":
        mem.run_macro(MacroOp("threshold", value=value))
    elif cmp == "lt":
        mem.run_macro(MacroOp("threshold", value=value))
        mem.run_macro(MacroOp("invert_m"))
    elif cmp == "gt":
        if value == top:
            mem.run_macro(MacroOp("threshold", value=0))
            mem.run_macro(MacroOp("invert_m"))
        else:
            mem.run_macro(MacroOp("threshold", value=value + 1))
    else:  # le
        if value == top:
            mem.run_macro(MacroOp("threshold", value=0))
        else:
            mem.run_macro(MacroOp("threshold", value=value + 1))
            mem.run_macro(MacroOp("invert_m"))
    mem.run_macro(MacroOp("flag_word"))
    mem.run_macro(_PUBLISH)
    mem.run_macro(MacroOp("identify"))
    count = mem.count_matches()
    mem.run_macro(_RESTORE)
    flags = [mem.exclusive_read(i) for i in range(mem.n_pe)]
    return AlgorithmReport(
        result={"count": count, "flags": flags},
        params={"value": value, "cmp": cmp, "n": mem.n_pe},
        ledger_delta=mem.ledger.snapshot().delta(before))
