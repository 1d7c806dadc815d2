"""Sorting by defect repair: disorder scans, exchange rounds, moves.

The machinery exploits that a *nearly* sorted array can be finished in
time proportional to its defect count rather than its length:

* ``count_disorder``  — one concurrent pair comparison marks every
  adjacent pair that breaks the order; the match-count line returns how
  many, in a constant number of broadcasts.
* ``classify_defects`` — enumerates those edges and reads a four-item
  neighborhood per edge to name the defect: an intruding ``peak``, an
  intruding ``valley``, or an adjacent-swap ``fault``.
* ``local_exchange_round`` — one odd-even transposition step: pairs of
  a given parity publish, each side pulls the partner, and min/max
  writebacks put the pair in order (constant broadcasts for the whole
  array).
* ``global_moving_sort`` — repeatedly takes the first disorder edge,
  lifts the culprit item out (one activation-gated shift), finds its
  insertion point with one threshold broadcast, and reinserts it
  (another gated shift): a constant number of broadcasts per defect,
  independent of the array length.  A safety valve falls back to
  exchange rounds whenever a removal fails to shrink the disorder
  count, so arbitrary inputs still terminate.
* ``hybrid_sort``      — counts disorder in both directions, picks the
  cheaper direction, runs a fixed number of exchange rounds to clear
  dense local disorder, then lets the global mover finish.
"""

from __future__ import annotations

from ..errors import ArgumentError
from ..microcode import MacroOp
from .common import AlgorithmReport

__all__ = ["count_disorder", "classify_defects", "local_exchange_round",
           "global_moving_sort", "hybrid_sort"]

_PUBLISH = MacroOp("copy", src="op", dst=("neighbor",))
_ORDERS = ("ascending", "descending")


def _check_order(order):
    if order not in _ORDERS:
        raise ArgumentError(f"order must be one of {_ORDERS}, got {order!r}")
    return order == "ascending"


def _disorder_scan(mem, order, harvest="count"):
    """Mark every index i whose pair (i, i+1) breaks the order and
    harvest the marks before they perish.

    Returns (count, first, edges): ``first`` is the lowest marked
    address when ``harvest="first"``, ``edges`` the full ascending list
    when ``harvest="edges"`` (one broadcast per edge).  The harvest
    happens inside the scan because every later macro re-latches the
    match lines.  Exits with op restored to the original values, the
    originals still published in the neighbor registers, and the whole
    array active."""
    asc = _check_order(order)
    n = mem.n_pe
    if n == 1:
        mem.activate_all()
        mem.run_macro(MacroOp("clear_flags"))
        return 0, None, []
    mem.activate_all()
    mem.run_macro(MacroOp("copy", src="op", dst=("data", 1)))
    mem.run_macro(_PUBLISH)
    if asc:
        # disorder: right neighbor below the own item
        mem.run_macro(MacroOp("read_neighbor", direction="right"))
        mem.run_macro(MacroOp("compare_lt", reg=("data", 1)))
    else:
        # disorder: own item below the right neighbor
        mem.run_macro(MacroOp("read_neighbor", direction="right",
                              dst=("data", 2)))
        mem.run_macro(MacroOp("copy", src=("data", 1), dst="op"))
        mem.run_macro(MacroOp("compare_lt", reg=("data", 2)))
    # the last PE compared against the edge fill: discard its verdict,
    # then report only the n-1 real pairs
    mem.activate(n - 1, n - 1)
    mem.run_macro(MacroOp("clear_flags"))
    mem.activate(0, n - 2)
    mem.run_macro(MacroOp("identify"))
    mem.activate_all()
    count = mem.count_matches()
    first = mem.first_match() if harvest == "first" and count else None
    edges = mem.enumerate_matches().matched if harvest == "edges" else []
    mem.run_macro(MacroOp("copy", src=("data", 1), dst="op"))
    return count, first, edges


def count_disorder(mem, order="ascending") -> AlgorithmReport:
    """Number of adjacent pairs breaking the order, in a constant
    number of broadcasts (at most 13)."""
    before = mem.ledger.snapshot()
    count, _, _ = _disorder_scan(mem, order)
    return AlgorithmReport(
        result=count,
        params={"order": order, "n": mem.n_pe},
        ledger_delta=mem.ledger.snapshot().delta(before))


def _classify_edge(v, i, n, asc):
    """Name the defect behind disorder edge i from its neighborhood."""
    def le(a, b):
        return a <= b if asc else a >= b

    has_l, has_r = i - 1 >= 0, i + 2 <= n - 1
    if not has_l and not has_r:
        return ("fault", (i, i + 1))
    if has_l and has_r and le(v[i - 1], v[i + 1]) and le(v[i], v[i + 2]):
        return ("fault", (i, i + 1))
    if has_r:
        if not le(v[i], v[i + 2]):
            return ("peak", i)
        return ("valley", i + 1)
    # no right context: the left flank decides which member intrudes
    if le(v[i - 1], v[i + 1]):
        return ("peak", i)
    return ("valley", i + 1)


def _read_neighborhood(mem, i, n):
    """Exclusive reads of the published words around edge i."""
    return {a: mem.exclusive_read(a)
            for a in range(max(0, i - 1), min(n - 1, i + 2) + 1)}


def classify_defects(mem, order="ascending") -> AlgorithmReport:
    """Locate and name every disorder defect.

    The concurrent scan marks the edges, the priority enumeration
    yields their addresses (one broadcast each), and at most four
    exclusive reads per edge give the controller the neighborhood it
    needs to apply the taxonomy.  The taxonomy assumes isolated point
    defects; edges closer than four positions apart make neighborhoods
    overlap, which the report flags as unreliable.
    """
    asc = _check_order(order)
    n = mem.n_pe
    before = mem.ledger.snapshot()
    _, _, edges = _disorder_scan(mem, order, harvest="edges")
    defects = []
    for i in edges:
        v = _read_neighborhood(mem, i, n)
        kind, at = _classify_edge(v, i, n, asc)
        defects.append({"kind": kind, "at": at})
    reliable = all(b - a >= 4 for a, b in zip(edges, edges[1:]))
    return AlgorithmReport(
        result={"defects": defects, "reliable": reliable},
        params={"order": order, "n": n},
        ledger_delta=mem.ledger.snapshot().delta(before))


def _exchange_round(mem, parity, order):
    """One odd-even transposition step over pairs (p, p+1), p ≡ parity
    (mod 2).  Constant broadcasts; pulls go through published words so
    both sides see pre-round values."""
    asc = _check_order(order)
    n = mem.n_pe
    if parity not in (0, 1):
        raise ArgumentError(f"parity must be 0 or 1, got {parity!r}")
    last_left = n - 2 - ((n - 2 - parity) % 2) if n - 2 >= parity else None
    mem.activate_all()
    if last_left is None:
        return
    mem.run_macro(_PUBLISH)
    keep_low, keep_high = ("minimum", "maximum") if asc else \
        ("maximum", "minimum")
    mem.activate(parity, last_left, 2)
    mem.run_macro(MacroOp("copy", src="op", dst=("data", 0)))
    mem.run_macro(MacroOp("read_neighbor", direction="right"))
    mem.run_macro(MacroOp(keep_low, reg=("data", 0)))
    mem.activate(parity + 1, last_left + 1, 2)
    mem.run_macro(MacroOp("copy", src="op", dst=("data", 0)))
    mem.run_macro(MacroOp("read_neighbor", direction="left"))
    mem.run_macro(MacroOp(keep_high, reg=("data", 0)))
    mem.activate_all()


def local_exchange_round(mem, parity, order="ascending") -> AlgorithmReport:
    before = mem.ledger.snapshot()
    _exchange_round(mem, parity, order)
    return AlgorithmReport(
        result=mem.words("op"),
        params={"parity": parity, "order": order, "n": mem.n_pe},
        ledger_delta=mem.ledger.snapshot().delta(before))


def _move_culprit(mem, a, x, asc):
    """Lift the word x out of address a, then reinsert it where it
    belongs: remove-shift, one threshold probe for the insertion point,
    insert-shift, one exclusive write.  Constant broadcasts."""
    n = mem.n_pe
    top = mem.word_mask
    # close the gap: everything right of a steps one left
    mem.run_macro(_PUBLISH)
    if a < n - 1:
        mem.activate(a, n - 2)
        mem.run_macro(MacroOp("read_neighbor", direction="right"))
    mem.activate_all()
    mem.run_macro(MacroOp("clear_flags"))
    # insertion point: first of the n-1 remaining items that belongs
    # after x (ascending: item > x; descending: item < x)
    if (asc and x == top) or (not asc and x == 0):
        dest = n - 1
    else:
        mem.activate(0, n - 2)
        if asc:
            mem.run_macro(MacroOp("threshold", value=x + 1))
        else:
            mem.run_macro(MacroOp("threshold", value=x))
            mem.run_macro(MacroOp("invert_m"))
        mem.run_macro(MacroOp("identify"))
        mem.activate_all()
        first = mem.first_match()
        dest = n - 1 if first is None else first
    # open a gap at dest: items dest.. step one right
    mem.run_macro(_PUBLISH)
    if dest < n - 1:
        mem.activate(dest + 1, n - 1)
        mem.run_macro(MacroOp("read_neighbor", direction="left"))
    # drop x into the gap over the exclusive bus
    mem.exclusive_write(dest, x)
    mem.activate(dest, dest)
    mem.run_macro(MacroOp("copy", src=("neighbor",), dst="op"))
    mem.activate_all()


def _global_moving(mem, order):
    """Repair defects one at a time; returns (moves, valve_rounds)."""
    asc = _check_order(order)
    n = mem.n_pe
    moves = valve_rounds = 0
    prev = None
    parity = 0
    budget = 2 * n + 4
    while True:
        count, i, _ = _disorder_scan(mem, order, harvest="first")
        if count == 0:
            return moves, valve_rounds
        stuck = prev is not None and count >= prev
        if stuck or moves >= budget:
            # exchange rounds always make progress eventually: one of
            # the two parities fixes at least one adjacent inversion
            _exchange_round(mem, parity, order)
            parity ^= 1
            valve_rounds += 1
            continue
        prev = count
        v = _read_neighborhood(mem, i, n)
        kind, at = _classify_edge(v, i, n, asc)
        culprit = at[0] if kind == "fault" else at
        _move_culprit(mem, culprit, v[culprit], asc)
        moves += 1


def global_moving_sort(mem, order="ascending") -> AlgorithmReport:
    """Sort by lifting defective items out and reinserting them where
    they belong: broadcasts proportional to the defect count, not the
    array length."""
    before = mem.ledger.snapshot()
    moves, valve_rounds = _global_moving(mem, order)
    return AlgorithmReport(
        result=mem.words("op"),
        params={"order": order, "n": mem.n_pe, "moves": moves,
                "valve_rounds": valve_rounds},
        ledger_delta=mem.ledger.snapshot().delta(before))


def hybrid_sort(mem, local_rounds) -> AlgorithmReport:
    """Exchange rounds for dense local disorder, the global mover for
    what remains; the sort direction is whichever the data is already
    closer to (fewer disorder edges), and the report records it."""
    local_rounds = int(local_rounds)
    if local_rounds < 0:
        raise ArgumentError(
            f"local round count must be >= 0, got {local_rounds}")
    before = mem.ledger.snapshot()
    asc_count, _, _ = _disorder_scan(mem, "ascending")
    desc_count, _, _ = _disorder_scan(mem, "descending")
    order = "ascending" if asc_count <= desc_count else "descending"
    if min(asc_count, desc_count) > 0:
        for r in range(local_rounds):
            _exchange_round(mem, r % 2, order)
        moves, valve_rounds = _global_moving(mem, order)
    else:
        moves = valve_rounds = 0
    return AlgorithmReport(
        result={"direction": order, "values": mem.words("op")},
        params={"local_rounds": local_rounds, "n": mem.n_pe,
                "moves": moves, "valve_rounds": valve_rounds},
        ledger_delta=mem.ledger.snapshot().delta(before))
