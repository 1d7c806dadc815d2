"""Local-kernel algebra and constant-cycle stencil execution.

A kernel is a window of integer taps indexed by signed offsets from the
home position (1-D) or by signed (dx, dy) offsets (2-D, rows ascending
with y).  Kernels form an algebra:

* ``kernel_plus``    — pointwise sum over the common span ("run both
  windows and add the results").
* ``kernel_compose`` — the kernel of one window applied after another,
  which over offset space is exactly discrete convolution.

Stencil programs are straight-line macro plans over the computable
memory: publish to the neighbor register, accumulate neighbors' words
(``add`` with a ``("neighbor_of", dir)`` operand reads a neighbor's
published word in the same macro), and optionally bank a partial in a
layer via ``exchange``.  ``run_local_op`` proves a plan equals its
claimed kernel by symbolic execution over the algebra before running
it, so the metered macro count (one per plan step, activation excluded)
is attached to a verified function.

Built-in plans and their exact macro counts:

    three_point      (1 2 1)                         4 macros
    five_point       (1 2 3 2 1)                     6 macros
    wide_five_point  (1 2 4 2 1)                     7 macros
    nine_point       [[1,2,1],[2,4,2],[1,2,1]]       8 macros
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError, ConfigError
from ..microcode import MacroOp
from .common import AlgorithmReport

__all__ = [
    "Kernel1D", "Kernel2D", "kernel_plus", "kernel_compose",
    "run_local_op", "BUILTIN_PLANS",
]


@dataclass(frozen=True)
class Kernel1D:
    """Odd-length tap window; taps[i] weighs the value at offset i - r."""

    taps: tuple

    def __post_init__(self):
        taps = tuple(int(t) for t in self.taps)
        object.__setattr__(self, "taps", taps)
        if len(taps) % 2 != 1:
            raise ConfigError("kernel must have an odd number of taps")

    @property
    def radius(self) -> int:
        return len(self.taps) // 2

    def apply(self, values) -> list:
        """Serial oracle: zero-padded application to a value row."""
        v = np.asarray(values, dtype=np.int64)
        out = np.zeros_like(v)
        r = self.radius
        for i, t in enumerate(self.taps):
            d = i - r
            if t == 0:
                continue
            src = slice(max(0, d), len(v) + min(0, d))
            dst = slice(max(0, -d), len(v) + min(0, -d))
            out[dst] += t * v[src]
        return out.tolist()

    def __str__(self):
        return "(" + " ".join(str(t) for t in self.taps) + ")"


@dataclass(frozen=True)
class Kernel2D:
    """Odd-by-odd tap grid; taps[dy + ry][dx + rx], rows ascend with y."""

    taps: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(t) for t in row) for row in self.taps)
        object.__setattr__(self, "taps", rows)
        if len(rows) % 2 != 1 or not rows:
            raise ConfigError("kernel must have an odd number of rows")
        widths = {len(r) for r in rows}
        if len(widths) != 1 or next(iter(widths)) % 2 != 1:
            raise ConfigError("kernel rows must share one odd width")

    @property
    def radius(self) -> tuple:
        return (len(self.taps[0]) // 2, len(self.taps) // 2)

    def apply(self, grid) -> list:
        """Serial oracle: zero-padded application to a 2-D value grid
        (``grid[y][x]``, rows ascending with y)."""
        g = np.asarray(grid, dtype=np.int64)
        out = np.zeros_like(g)
        rx, ry = self.radius
        for r, row in enumerate(self.taps):
            for c, t in enumerate(row):
                if t == 0:
                    continue
                dy, dx = r - ry, c - rx
                ys = slice(max(0, dy), g.shape[0] + min(0, dy))
                yd = slice(max(0, -dy), g.shape[0] + min(0, -dy))
                xs = slice(max(0, dx), g.shape[1] + min(0, dx))
                xd = slice(max(0, -dx), g.shape[1] + min(0, -dx))
                out[yd, xd] += t * g[ys, xs]
        return out.tolist()

    def __str__(self):
        return "[" + "; ".join("(" + " ".join(str(t) for t in row) + ")"
                               for row in self.taps) + "]"


def _to_grid(kernel):
    """Kernel -> (2-D int array, rx, ry); 1-D promotes to a single row."""
    if isinstance(kernel, Kernel1D):
        return (np.array([kernel.taps], dtype=np.int64),
                kernel.radius, 0)
    if isinstance(kernel, Kernel2D):
        rx, ry = kernel.radius
        return np.array(kernel.taps, dtype=np.int64), rx, ry
    raise ArgumentError(f"not a kernel: {kernel!r}")


def _from_grid(grid, want_1d):
    grid = _trim(grid)
    if want_1d and grid.shape[0] == 1:
        return Kernel1D(tuple(int(t) for t in grid[0]))
    return Kernel2D(tuple(tuple(int(t) for t in row) for row in grid))


def _trim(grid):
    """Strip all-zero row and column PAIRS so the window stays centred;
    a lone zero wing (e.g. the trailing 0 of (1 1 0)) is preserved."""
    while grid.shape[0] > 1 and not grid[0].any() and not grid[-1].any():
        grid = grid[1:-1]
    while grid.shape[1] > 1 and not grid[:, 0].any() and not grid[:, -1].any():
        grid = grid[:, 1:-1]
    return grid


def _pad_to(grid, rx, ry):
    gy, gx = grid.shape[0] // 2, grid.shape[1] // 2
    return np.pad(grid, ((ry - gy, ry - gy), (rx - gx, rx - gx)))


def kernel_plus(a, b):
    """Pointwise sum of two kernels over their common (padded) span."""
    ga, rxa, rya = _to_grid(a)
    gb, rxb, ryb = _to_grid(b)
    rx, ry = max(rxa, rxb), max(rya, ryb)
    out = _pad_to(ga, rx, ry) + _pad_to(gb, rx, ry)
    return _from_grid(out, isinstance(a, Kernel1D) and isinstance(b, Kernel1D))


def kernel_compose(a, b):
    """Kernel of applying ``a`` and then ``b``: convolution of the taps."""
    ga, rxa, rya = _to_grid(a)
    gb, rxb, ryb = _to_grid(b)
    out = np.zeros((ga.shape[0] + gb.shape[0] - 1,
                    ga.shape[1] + gb.shape[1] - 1), dtype=np.int64)
    for r in range(ga.shape[0]):
        for c in range(ga.shape[1]):
            if ga[r, c]:
                out[r:r + gb.shape[0], c:c + gb.shape[1]] += ga[r, c] * gb
    return _from_grid(out, isinstance(a, Kernel1D) and isinstance(b, Kernel1D))


def kernels_equal(a, b) -> bool:
    ga, *_ = _to_grid(a)
    gb, *_ = _to_grid(b)
    ga, gb = _trim(ga), _trim(gb)
    return ga.shape == gb.shape and bool((ga == gb).all())


# --- symbolic plan validation -------------------------------------------

_UNIT = np.array([[1]], dtype=np.int64)
_DELTAS = {"left": (-1, 0), "right": (1, 0), "down": (0, -1), "up": (0, 1)}


def _shift(grid, dx, dy):
    """Kernel of reading, at offset (dx, dy), a value with kernel ``grid``."""
    out = np.zeros((grid.shape[0] + 2 * abs(dy),
                    grid.shape[1] + 2 * abs(dx)), dtype=np.int64)
    oy, ox = abs(dy) + dy, abs(dx) + dx
    out[oy:oy + grid.shape[0], ox:ox + grid.shape[1]] = grid
    return out


class _PlanChecker:
    """Executes a plan over symbolic kernels to prove its value."""

    def __init__(self, directions, n_data_regs):
        self.directions = directions
        self.regs = {"op": _UNIT, ("neighbor",): None}
        for j in range(n_data_regs):
            self.regs[("data", j)] = None

    def _get(self, key):
        if key not in self.regs:
            raise ArgumentError(f"plan names unknown register {key!r}")
        val = self.regs[key]
        if val is None:
            raise ArgumentError(
                f"plan reads register {key!r} before writing it")
        return val

    def _delta(self, direction):
        if direction not in self.directions:
            raise ArgumentError(
                f"direction {direction!r} not available on this geometry")
        return _DELTAS[direction]

    def _operand(self, reg):
        if reg and reg[0] == "neighbor_of":
            dx, dy = self._delta(reg[1])
            return _shift(self._get(("neighbor",)), dx, dy)
        return self._get(tuple(reg))

    def step(self, mac: MacroOp):
        if mac.opcode == "copy":
            src = "op" if mac.src == "op" else tuple(mac.src)
            dst = "op" if mac.dst == "op" else tuple(mac.dst)
            self.regs[dst] = self._get(src)
        elif mac.opcode == "exchange":
            reg = tuple(mac.reg)
            other = self._get(reg)
            self.regs[reg] = self._get("op")
            self.regs["op"] = other
        elif mac.opcode in ("add", "sub"):
            term = self._operand(mac.reg)
            op = self.regs["op"]
            ry = max(op.shape[0], term.shape[0]) // 2
            rx = max(op.shape[1], term.shape[1]) // 2
            sign = 1 if mac.opcode == "add" else -1
            self.regs["op"] = _pad_to(op, rx, ry) + sign * _pad_to(term, rx, ry)
        elif mac.opcode == "read_neighbor":
            dx, dy = self._delta(mac.direction)
            got = _shift(self._get(("neighbor",)), dx, dy)
            self.regs["op"] = got
            if mac.dst is not None and mac.dst != "op":
                self.regs[tuple(mac.dst)] = got
        elif mac.opcode == "load_immediate":
            if mac.value != 0:
                raise ArgumentError(
                    "only a zero immediate has a kernel value")
            self.regs["op"] = np.zeros((1, 1), dtype=np.int64)
        else:
            raise ArgumentError(
                f"opcode {mac.opcode!r} has no kernel value; local-op "
                "plans are limited to the linear data-movement subset")

    def op_kernel(self):
        return self.regs["op"]


def plan_kernel(plan, *, directions=("left", "right"), n_data_regs=4):
    """The kernel a macro plan computes into op, by symbolic execution."""
    chk = _PlanChecker(tuple(directions), n_data_regs)
    for mac in plan:
        chk.step(mac)
    grid = _trim(chk.op_kernel())
    return _from_grid(grid, grid.shape[0] == 1)


def run_local_op(mem, kernel, plan) -> AlgorithmReport:
    """Validate that ``plan`` computes ``kernel``, then run it.

    The plan is first executed symbolically over the kernel algebra;
    if its algebraic value differs from ``kernel`` the run is refused
    (ArgumentError).  Execution assumes the whole array was made active
    beforehand; the activation broadcast is charged before the metered
    window, so the reported macro cycles equal exactly one per plan
    step.  Edges read as zero.
    """
    plan = tuple(plan)
    computed = plan_kernel(plan, directions=mem.directions(),
                           n_data_regs=mem.n_data_regs)
    if not kernels_equal(computed, kernel):
        raise ArgumentError(
            f"plan computes {computed}, not the requested {kernel}")
    mem.activate_all()
    before = mem.ledger.snapshot()
    for mac in plan:
        mem.run_macro(mac)
    delta = mem.ledger.snapshot().delta(before)
    return AlgorithmReport(
        result=mem.words("op"),
        params={"kernel": str(kernel), "plan_macros": len(plan)},
        ledger_delta=delta)


def _p(*macs):
    return tuple(macs)


_PUBLISH = MacroOp("copy", src="op", dst=("neighbor",))

BUILTIN_PLANS = {
    "three_point": (
        Kernel1D((1, 2, 1)),
        _p(_PUBLISH,
           MacroOp("add", reg=("neighbor",)),
           MacroOp("add", reg=("neighbor_of", "left")),
           MacroOp("add", reg=("neighbor_of", "right")))),
    "five_point": (
        Kernel1D((1, 2, 3, 2, 1)),
        _p(_PUBLISH,
           MacroOp("add", reg=("neighbor_of", "left")),
           MacroOp("add", reg=("neighbor_of", "right")),
           _PUBLISH,
           MacroOp("add", reg=("neighbor_of", "left")),
           MacroOp("add", reg=("neighbor_of", "right")))),
    "wide_five_point": (
        Kernel1D((1, 2, 4, 2, 1)),
        _p(_PUBLISH,
           MacroOp("add", reg=("neighbor_of", "left")),
           MacroOp("add", reg=("neighbor_of", "right")),
           MacroOp("exchange", reg=("neighbor",)),
           MacroOp("add", reg=("neighbor",)),
           MacroOp("add", reg=("neighbor_of", "left")),
           MacroOp("add", reg=("neighbor_of", "right")))),
    "nine_point": (
        Kernel2D(((1, 2, 1), (2, 4, 2), (1, 2, 1))),
        _p(_PUBLISH,
           MacroOp("add", reg=("neighbor",)),
           MacroOp("add", reg=("neighbor_of", "left")),
           MacroOp("add", reg=("neighbor_of", "right")),
           _PUBLISH,
           MacroOp("add", reg=("neighbor",)),
           MacroOp("add", reg=("neighbor_of", "down")),
           MacroOp("add", reg=("neighbor_of", "up")))),
}
