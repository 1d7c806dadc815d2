"""Concurrent template matching by streamed sum-of-absolute-differences.

Every PE scores the window that starts at its own address, all windows
at once: the array's values stream through the lattice one hop per
template cell (publish + neighbor pull), and each PE folds
|streamed value - template value| into its running score.  The
template values ride the broadcast immediate, so the whole search costs
a constant number of broadcasts per template cell — independent of the
array size.

The walk is monotone on purpose.  A stream hop toward higher addresses
moves every published word toward lower addresses, so a value needed by
a window based at p is always held by some PE ≥ 0; a walk that ever
backtracked would ask for words that had already fallen off the low
edge and been replaced by the fill.  In 2-D this means a row-anchor
stream that only hops up plus a per-row scan stream that only hops
right; only positions whose window hangs off the high edges ever see
fill words, and those are excluded by geometry anyway.

The best match (lowest score, lowest address on ties) is picked by the
controller from the published scores over the exclusive bus.
"""

from __future__ import annotations

from ..errors import ArgumentError
from ..microcode import MacroOp
from .common import AlgorithmReport

__all__ = ["template_search_1d", "template_search_2d"]

_PUBLISH = MacroOp("copy", src="op", dst=("neighbor",))

_SCORE = ("data", 0)
_ANCHOR = ("data", 1)
_SCAN = ("data", 2)


def _check_template_values(values, mem):
    for t in values:
        if not 0 <= int(t) <= mem.word_mask:
            raise ArgumentError(
                f"template value {t} out of range for width {mem.width}")


def _fold_tap(mem, value, stream_reg):
    """score += |template value - streamed value| in four broadcasts."""
    mem.run_macro(MacroOp("load_immediate", value=int(value)))
    mem.run_macro(MacroOp("abs_diff", reg=stream_reg))
    mem.run_macro(MacroOp("add", reg=_SCORE))
    mem.run_macro(MacroOp("copy", src="op", dst=_SCORE))


def _hop(mem, direction, stream_reg):
    """Advance a stream register one lattice hop in three broadcasts."""
    mem.run_macro(MacroOp("copy", src=stream_reg, dst="op"))
    mem.run_macro(_PUBLISH)
    mem.run_macro(MacroOp("read_neighbor", direction=direction,
                          dst=stream_reg))


def _publish_scores(mem):
    mem.run_macro(MacroOp("copy", src=_SCORE, dst="op"))
    mem.run_macro(_PUBLISH)


def template_search_1d(mem, template) -> AlgorithmReport:
    """Sum-of-absolute-differences of ``template`` against every window.

    Broadcast cost: 7·M + 3 macros for an M-item template, whatever the
    array length; reading the scores back is per-item exclusive
    traffic.  Returns the scores for all valid start addresses and the
    best one (lowest score, then lowest address).
    """
    template = [int(t) for t in template]
    if not template:
        raise ArgumentError("template must not be empty")
    if len(template) > mem.n_pe:
        raise ArgumentError(
            f"template of {len(template)} exceeds array of {mem.n_pe}")
    _check_template_values(template, mem)
    before = mem.ledger.snapshot()
    mem.activate_all()
    mem.run_macro(MacroOp("copy", src="op", dst=_ANCHOR))
    mem.run_macro(MacroOp("load_immediate", value=0))
    mem.run_macro(MacroOp("copy", src="op", dst=_SCORE))
    for j, t in enumerate(template):
        if j:
            _hop(mem, "right", _ANCHOR)
        _fold_tap(mem, t, _ANCHOR)
    _publish_scores(mem)
    valid = mem.n_pe - len(template) + 1
    scores = [mem.exclusive_read(i) for i in range(valid)]
    best = min(range(valid), key=lambda i: (scores[i], i))
    return AlgorithmReport(
        result={"sad": scores, "best": best},
        params={"template": template, "n": mem.n_pe},
        ledger_delta=mem.ledger.snapshot().delta(before))


def template_search_2d(mem, template) -> AlgorithmReport:
    """2-D SAD of ``template`` (rows ascending with y) against every
    window base; 7·Mx·My + 2·My + 3 broadcasts regardless of the image
    size."""
    if mem.dims is None:
        raise ArgumentError("template_search_2d needs a 2-D array")
    rows = [[int(t) for t in row] for row in template]
    if not rows or not rows[0]:
        raise ArgumentError("template must not be empty")
    if len({len(r) for r in rows}) != 1:
        raise ArgumentError("template rows must have equal length")
    mx, my = len(rows[0]), len(rows)
    nx, ny = mem.dims
    if mx > nx or my > ny:
        raise ArgumentError(
            f"template {mx}x{my} exceeds image {nx}x{ny}")
    for row in rows:
        _check_template_values(row, mem)
    before = mem.ledger.snapshot()
    mem.activate_all()
    mem.run_macro(MacroOp("copy", src="op", dst=_ANCHOR))
    mem.run_macro(MacroOp("load_immediate", value=0))
    mem.run_macro(MacroOp("copy", src="op", dst=_SCORE))
    for jy, row in enumerate(rows):
        if jy:
            _hop(mem, "up", _ANCHOR)
        # the scan stream restarts each row from the row anchor
        mem.run_macro(MacroOp("copy", src=_ANCHOR, dst="op"))
        mem.run_macro(MacroOp("copy", src="op", dst=_SCAN))
        for jx, t in enumerate(row):
            if jx:
                _hop(mem, "right", _SCAN)
            _fold_tap(mem, t, _SCAN)
    _publish_scores(mem)
    valid_x, valid_y = nx - mx + 1, ny - my + 1
    scores = [[mem.exclusive_read(x + y * nx) for x in range(valid_x)]
              for y in range(valid_y)]
    best = min(((x, y) for y in range(valid_y) for x in range(valid_x)),
               key=lambda p: (scores[p[1]][p[0]], p[1], p[0]))
    return AlgorithmReport(
        result={"sad": scores, "best": best},
        params={"template_shape": (mx, my), "dims": (nx, ny)},
        ledger_delta=mem.ledger.snapshot().delta(before))
