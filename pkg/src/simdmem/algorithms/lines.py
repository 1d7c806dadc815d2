"""Concurrent line-segment detection by signed messenger walks.

Every pixel scores the ideal line of slope My/Mx anchored at itself,
all pixels at once.  A *messenger* value starts at the far corner of
the (Mx x My) area and walks cell by cell back to the origin along the
midpoint traversal of the ideal segment; at each visited cell the
pixel's intensity is added if the cell's center lies on the left of the
segment and subtracted if on the right (side = sign of the cross
product of the direction (Mx, My) with the cell offset).  Cell centers
exactly on the segment alternate add/subtract in visit order; the two
endpoints are never signed.  A bright edge along the ideal line thus
yields a large positive value, an edge of opposite polarity a large
negative one, and on a constant image adds and subtracts cancel
whenever the walk signs balance.

The walk is message passing on the lattice: each hop is one publish
plus one neighbor read toward higher addresses, and the add/subtract
uses the pixel's own stored intensity — so the whole detector costs
3(Mx+My)+4 broadcasts regardless of the image size.  Axis-aligned
detectors (Mx=0 or My=0) have no area to walk; they instead subtract
the flanking layer on the right of the direction from the one on its
left (bottom from top for a horizontal detector) and accumulate the
per-pixel difference over the segment length in 3 broadcasts per item.

A family of detectors covering all orientations at angular resolution
about sqrt(2)/D comes from ``build_slope_set``: the first-quadrant
lattice points within half a pixel of the radius-D circle.  Running the
whole family (``detect_all_lines``) costs O(D^2) broadcasts, again
independent of the image size.
"""

from __future__ import annotations

import math

from ..errors import ArgumentError
from ..microcode import MacroOp
from .common import AlgorithmReport, signed_value

__all__ = ["midpoint_path", "detect_line_segment", "build_slope_set",
           "detect_all_lines"]

_PUBLISH = MacroOp("copy", src="op", dst=("neighbor",))
_IMAGE = ("data", 1)        # saved intensities, restored to op on exit
_FOLD = ("data", 0)         # per-pixel layer difference (axis case)


def midpoint_path(mx, my):
    """Cells of the midpoint traversal from (0, 0) to (mx, my).

    Consecutive cells differ by a unit +x or +y step.  When the segment
    crosses a cell corner exactly, the two unit steps are threaded
    alternately x-first then y-first along the path.
    """
    mx, my = int(mx), int(my)
    if mx < 1 or my < 1:
        raise ArgumentError("midpoint_path needs mx >= 1 and my >= 1")
    path = [(0, 0)]
    i = j = 0
    x_first = True
    while i < mx or j < my:
        # next half-grid crossings, compared exactly by cross-multiplying
        tx = (2 * i + 1) * my if i < mx else None
        ty = (2 * j + 1) * mx if j < my else None
        if ty is None or (tx is not None and tx < ty):
            i += 1
        elif tx is None or ty < tx:
            j += 1
        else:                          # corner crossing: thread both steps
            path.append((i + 1, j) if x_first else (i, j + 1))
            x_first = not x_first
            i += 1
            j += 1
        path.append((i, j))
    return path


def _signed_visits(mx, my):
    """Visit list far corner -> origin with per-cell signs.

    Sign +1 adds the pixel's intensity (cell left of the ideal line),
    -1 subtracts (right); endpoints are 0, and on-line interior cells
    alternate +1/-1 in visit order.
    """
    visits = list(reversed(midpoint_path(mx, my)))
    signs = []
    flip = 1
    for k, (cx, cy) in enumerate(visits):
        if k == 0 or k == len(visits) - 1:
            signs.append(0)
            continue
        cross = mx * cy - my * cx
        if cross:
            signs.append(1 if cross > 0 else -1)
        else:
            signs.append(flip)
            flip = -flip
    return visits, signs


def _diagonal_cells(mx, my):
    visits, signs = _signed_visits(mx, my)
    return [(cx, cy, s) for (cx, cy), s in zip(visits, signs)]


def _axis_cells(mx, my):
    """Signed flanking layers for an axis-aligned detector."""
    if my == 0:      # horizontal: top layer minus bottom layer
        return [(j, dy, dy) for j in range(mx) for dy in (1, -1)]
    return [(dx * -1, j, dx) for j in range(my) for dx in (1, -1)]


def _run_diagonal(mem, mx, my):
    visits, signs = _signed_visits(mx, my)
    mem.run_macro(MacroOp("load_immediate", value=0))
    for k in range(1, len(visits)):
        dx = visits[k - 1][0] - visits[k][0]
        mem.run_macro(_PUBLISH)
        mem.run_macro(MacroOp("read_neighbor",
                              direction="right" if dx else "up"))
        if signs[k] > 0:
            mem.run_macro(MacroOp("add", reg=_IMAGE))
        elif signs[k] < 0:
            mem.run_macro(MacroOp("sub", reg=_IMAGE))
    mem.run_macro(_PUBLISH)


def _run_axis(mem, mx, my):
    if my == 0:
        first, second, along, length = "up", "down", "right", mx
    else:
        first, second, along, length = "left", "right", "up", my
    mem.run_macro(_PUBLISH)                      # intensities for flank reads
    mem.run_macro(MacroOp("read_neighbor", direction=first))
    mem.run_macro(MacroOp("sub", reg=("neighbor_of", second)))
    mem.run_macro(MacroOp("copy", src="op", dst=_FOLD))
    mem.run_macro(_PUBLISH)
    for _ in range(length - 1):                  # window of `length` items
        mem.run_macro(MacroOp("read_neighbor", direction=along))
        mem.run_macro(MacroOp("add", reg=_FOLD))
        mem.run_macro(_PUBLISH)


def _valid_box(mx, my, nx, ny):
    """Inclusive pixel ranges whose whole signed-cell area is on-image."""
    if my == 0:
        return (0, nx - mx), (1, ny - 2)
    if mx == 0:
        return (1, nx - 2), (0, ny - my)
    return (0, nx - 1 - mx), (0, ny - 1 - my)


def detect_line_segment(mem, mx, my) -> AlgorithmReport:
    """Score the line of slope my/mx at every pixel concurrently.

    Returns per-pixel signed messenger values (row-major) plus a
    validity mask: a pixel is valid when its whole signed-cell area lies
    on the image; elsewhere edge fill leaks in and the value is
    meaningless.  Broadcast cost 3(mx+my)+4 for the diagonal walk and
    3L+5 for an axis detector of length L, independent of image size.
    """
    if mem.dims is None:
        raise ArgumentError("detect_line_segment needs a 2-D array")
    mx, my = int(mx), int(my)
    nx, ny = mem.dims
    if mx < 0 or my < 0 or (mx == 0 and my == 0):
        raise ArgumentError(
            f"slope ({mx}, {my}) must be non-negative and not (0, 0)")
    if my == 0:
        if mx > nx or ny < 3:
            raise ArgumentError(
                f"horizontal detector of {mx} with flanks does not fit "
                f"{nx}x{ny}")
        kind = "horizontal"
    elif mx == 0:
        if my > ny or nx < 3:
            raise ArgumentError(
                f"vertical detector of {my} with flanks does not fit "
                f"{nx}x{ny}")
        kind = "vertical"
    else:
        if mx > nx - 1 or my > ny - 1:
            raise ArgumentError(
                f"({mx}, {my}) area does not fit image {nx}x{ny}")
        kind = "diagonal"
    cells = (_axis_cells(mx, my) if kind != "diagonal"
             else _diagonal_cells(mx, my))
    before = mem.ledger.snapshot()
    mem.activate_all()
    mem.run_macro(MacroOp("copy", src="op", dst=_IMAGE))
    if kind == "diagonal":
        _run_diagonal(mem, mx, my)
    else:
        _run_axis(mem, mx, my)
    mem.run_macro(MacroOp("copy", src=_IMAGE, dst="op"))
    values = [signed_value(mem.exclusive_read(i), mem.width)
              for i in range(mem.n_pe)]
    (x0, x1), (y0, y1) = _valid_box(mx, my, nx, ny)
    valid = [x0 <= i % nx <= x1 and y0 <= i // nx <= y1
             for i in range(mem.n_pe)]
    return AlgorithmReport(
        result={"values": values, "valid": valid},
        params={"Mx": mx, "My": my, "kind": kind,
                "signed_cells": [list(c) for c in cells],
                "n_add": sum(1 for c in cells if c[2] > 0),
                "n_sub": sum(1 for c in cells if c[2] < 0)},
        ledger_delta=mem.ledger.snapshot().delta(before))


def build_slope_set(D):
    """First-quadrant lattice slopes hugging the radius-D circle.

    Members (mx, my) satisfy |hypot(mx, my) - D| <= 1/2 and are sorted
    by angle, so consecutive detectors differ by roughly sqrt(2)/D
    radians; the set size grows linearly with D.
    """
    if int(D) != D or D < 1:
        raise ArgumentError(f"radius must be a positive integer, got {D}")
    D = int(D)
    members = [(mx, my)
               for mx in range(D + 1) for my in range(D + 1)
               if (mx, my) != (0, 0)
               and abs(math.hypot(mx, my) - D) <= 0.5]
    members.sort(key=lambda m: math.atan2(m[1], m[0]))
    return members


def detect_all_lines(mem, D) -> AlgorithmReport:
    """Best line orientation per pixel over the radius-D slope set.

    Runs every detector of ``build_slope_set(D)`` and keeps, per pixel,
    the largest absolute messenger value and the slope that produced it
    (earliest member on ties; ``None`` where no detector's area fits).
    Total broadcast cost is O(D^2), independent of image size.
    """
    if mem.dims is None:
        raise ArgumentError("detect_all_lines needs a 2-D array")
    members = build_slope_set(D)
    before = mem.ledger.snapshot()
    best_value = [0] * mem.n_pe
    best_member = [None] * mem.n_pe
    for member in members:
        report = detect_line_segment(mem, *member)
        values, valid = report.result["values"], report.result["valid"]
        for i in range(mem.n_pe):
            if not valid[i]:
                continue
            if best_member[i] is None or abs(values[i]) > abs(best_value[i]):
                best_value[i] = values[i]
                best_member[i] = list(member)
    return AlgorithmReport(
        result={"best_value": best_value, "best_member": best_member},
        params={"D": D, "members": [list(m) for m in members]},
        ledger_delta=mem.ledger.snapshot().delta(before))
