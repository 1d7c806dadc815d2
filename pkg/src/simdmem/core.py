"""Shared PE-array framework: activation, buses, match lines, cycle ledger.

A memory is an array of identical processing elements driven by three
mechanisms with very different costs:

* concurrent broadcast — every PE selected by the current activation mask
  executes the same instruction in one synchronous two-phase step (all
  reads see pre-step state, then all writes commit); costs 1 macro cycle,
* exclusive bus — one PE's addressable register is read or written like
  ordinary RAM; costs 1 exclusive op and no broadcast cycles,
* match lines — every PE drives a wired line; a priority encoder reports
  asserted PEs one address per macro cycle, a parallel counter totals
  them in one.

Activation masks come from the strided hardware decoder: the triple
(start, end, carry) selects addresses start, start+carry, ... ≤ end in a
single macro cycle regardless of array size. Two-dimensional arrays are
activated by independent per-axis triples whose masks combine as an
outer product, still in one macro cycle.

Memory families subclass PeArray and provide `_apply` (instruction
semantics), `_exclusive_get` and `_exclusive_set` (the addressable
register). The base class owns the ledger, the mask, the match lines
and the edge bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .decoder import activation_mask
from .errors import AddressError, ConfigError, InstructionError

__all__ = ["CycleLedger", "LedgerSnapshot", "MatchReport", "PeArray"]


@dataclass(frozen=True)
class LedgerSnapshot:
    """Immutable ledger reading; differences compose additively."""

    macro_cycles: int
    micro_cycles: int
    exclusive_ops: int

    def delta(self, earlier: "LedgerSnapshot") -> "LedgerSnapshot":
        return LedgerSnapshot(
            self.macro_cycles - earlier.macro_cycles,
            self.micro_cycles - earlier.micro_cycles,
            self.exclusive_ops - earlier.exclusive_ops,
        )


class CycleLedger:
    """Monotone counters for the three instruction-cycle currencies.

    macro_cycles: word-level concurrent broadcasts (incl. activations).
    micro_cycles: bit-serial steps inside word-level macro expansions.
    exclusive_ops: single-PE exclusive-bus accesses.

    micro_cycles ≥ macro_cycles is NOT an invariant: families without a
    bit-serial layer issue macro cycles with no micro expansion at all.
    """

    __slots__ = ("macro_cycles", "micro_cycles", "exclusive_ops")

    def __init__(self) -> None:
        self.macro_cycles = 0
        self.micro_cycles = 0
        self.exclusive_ops = 0

    @staticmethod
    def _check(n: int) -> int:
        if n < 0:
            raise ValueError(f"cycle charges are non-negative, got {n}")
        return n

    def charge_macro(self, n: int = 1) -> None:
        self.macro_cycles += self._check(n)

    def charge_micro(self, n: int = 1) -> None:
        self.micro_cycles += self._check(n)

    def charge_exclusive(self, n: int = 1) -> None:
        self.exclusive_ops += self._check(n)

    def snapshot(self) -> LedgerSnapshot:
        return LedgerSnapshot(self.macro_cycles, self.micro_cycles,
                              self.exclusive_ops)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (f"CycleLedger(macro={self.macro_cycles}, "
                f"micro={self.micro_cycles}, excl={self.exclusive_ops})")


@dataclass
class MatchReport:
    """Priority-encoder output: asserted PE addresses in ascending order."""

    matched: list = field(default_factory=list)
    count: int = 0


def _mask_to_bool(mask: int, n: int) -> np.ndarray:
    nbytes = max(1, (n + 7) // 8)
    raw = mask.to_bytes(nbytes, "little")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
    return bits[:n].astype(bool)


class PeArray:
    """Array of identical PEs with mask, buses, match lines and ledger.

    Subclasses implement `_apply(instruction)` using `self.active` (bool
    mask) with two-phase semantics (numpy whole-array expressions give
    this naturally: compute new state from old state, then assign), plus
    `_exclusive_get(addr)` / `_exclusive_set(addr, value)` for the
    addressable register on the exclusive bus.
    """

    def __init__(self, n_pe: int, *, dims=None, fill: int = 0, ledger=None):
        if n_pe <= 0:
            raise ConfigError(f"PE count must be positive, got {n_pe}")
        if dims is not None:
            nx, ny = dims
            if nx <= 0 or ny <= 0 or nx * ny != n_pe:
                raise ConfigError(
                    f"dims {dims} do not factor PE count {n_pe}")
        self.n_pe = n_pe
        self.dims = tuple(dims) if dims is not None else None
        self.fill = fill
        self.ledger = ledger if ledger is not None else CycleLedger()
        self.active = np.zeros(n_pe, dtype=bool)
        self.match = np.zeros(n_pe, dtype=bool)

    # -- activation ---------------------------------------------------------

    def _check_addr(self, a: int, limit: int, what: str) -> None:
        if not 0 <= a < limit:
            raise ConfigError(f"{what} {a} out of range [0, {limit})")

    def activate(self, start: int, end: int, carry: int = 1) -> np.ndarray:
        """Select start, start+carry, ... ≤ end; one macro cycle.

        start > end selects nothing (a decoded empty mask is still a
        mask); carry = 0 degenerates to the single start address.
        """
        self._check_addr(start, self.n_pe, "start address")
        self._check_addr(end, self.n_pe, "end address")
        mask = activation_mask(start, end, carry, self.n_pe)
        self.active = _mask_to_bool(mask, self.n_pe)
        self.ledger.charge_macro(1)
        return self.active

    def activate_2d(self, x_triple, y_triple) -> np.ndarray:
        """Per-axis (start, end, carry) triples; one macro cycle total."""
        if self.dims is None:
            raise ConfigError("activate_2d requires a 2-D array (dims set)")
        nx, ny = self.dims
        sx, ex, cx = x_triple
        sy, ey, cy = y_triple
        self._check_addr(sx, nx, "x start")
        self._check_addr(ex, nx, "x end")
        self._check_addr(sy, ny, "y start")
        self._check_addr(ey, ny, "y end")
        xm = _mask_to_bool(activation_mask(sx, ex, cx, nx), nx)
        ym = _mask_to_bool(activation_mask(sy, ey, cy, ny), ny)
        self.active = (ym[:, None] & xm[None, :]).reshape(self.n_pe)
        self.ledger.charge_macro(1)
        return self.active

    def activate_all(self) -> np.ndarray:
        return self.activate(0, self.n_pe - 1, 1)

    # -- concurrent broadcast -----------------------------------------------

    def broadcast(self, instruction) -> None:
        """Apply one instruction at every active PE; one macro cycle."""
        self.ledger.charge_macro(1)
        self._apply(instruction)

    def _apply(self, instruction) -> None:
        raise InstructionError(
            f"{type(self).__name__} does not implement {instruction!r}")

    # -- exclusive bus --------------------------------------------------------

    def _check_excl(self, addr: int) -> None:
        if not 0 <= addr < self.n_pe:
            raise AddressError(
                f"exclusive address {addr} out of range [0, {self.n_pe})")

    def exclusive_read(self, addr: int):
        self._check_excl(addr)
        self.ledger.charge_exclusive(1)
        return self._exclusive_get(addr)

    def exclusive_write(self, addr: int, value) -> None:
        self._check_excl(addr)
        self.ledger.charge_exclusive(1)
        self._exclusive_set(addr, value)

    def _exclusive_get(self, addr: int):  # pragma: no cover - abstract
        raise AddressError(
            f"{type(self).__name__} has no addressable register")

    def _exclusive_set(self, addr: int, value) -> None:  # pragma: no cover
        raise AddressError(
            f"{type(self).__name__} has no addressable register")

    # -- match lines ----------------------------------------------------------

    def enumerate_matches(self) -> MatchReport:
        """Priority-encoder walk: one macro cycle per reported address."""
        idx = [int(i) for i in np.flatnonzero(self.match)]
        self.ledger.charge_macro(len(idx))
        return MatchReport(matched=idx, count=len(idx))

    def count_matches(self) -> int:
        """Parallel counter: one macro cycle regardless of match count."""
        self.ledger.charge_macro(1)
        return int(np.count_nonzero(self.match))

    def first_match(self):
        """Lowest asserted address (one priority-encode step) or None."""
        self.ledger.charge_macro(1)
        idx = np.flatnonzero(self.match)
        return int(idx[0]) if len(idx) else None

    # -- topology -------------------------------------------------------------

    def edge_mask(self, direction) -> np.ndarray:
        """PEs whose neighbor read in `direction` falls off the array.

        1-D: direction is a signed integer offset. 2-D: (dx, dy). Edge
        reads return the configured fill word; this query exposes the
        accompanying edge flag for algorithms that need their own policy.
        """
        if self.dims is None:
            d = int(direction)
            i = np.arange(self.n_pe)
            return ~((0 <= i + d) & (i + d < self.n_pe))
        nx, ny = self.dims
        dx, dy = direction
        i = np.arange(self.n_pe)
        x, y = i % nx, i // nx
        ok = (0 <= x + dx) & (x + dx < nx) & (0 <= y + dy) & (y + dy < ny)
        return ~ok
