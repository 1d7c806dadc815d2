"""Content-movable memory: one-cycle-order block moves and an object manager.

Each PE holds one addressable word and one temporary register that is
only meaningful inside a single two-broadcast move (copy into temp from
the neighbor, then commit temp). A block of any length therefore moves
one cell in 2 macro cycles regardless of block size, and the object
manager's insert/delete/resize costs scale with the gap size alone,
never with how much data sits behind the gap.

Boundary rule: a cell whose source neighbor falls off the array retains
its old value (the hardware copy has nothing to drive, so the register
keeps its content).

Object layout: objects are contiguous and packed from address 0 with no
holes; free space is exactly the tail. Moving an object is a sequence of
single-cell rotations of the spanned region (2 macro cycles and 2
exclusive accesses per cell of distance).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import PeArray
from .errors import (AddressError, AllocationError, ArgumentError,
                     InstructionError, UnknownObjectError)

__all__ = ["MovableMemory", "ObjectEntry"]


@dataclass
class ObjectEntry:
    start: int
    length: int

    @property
    def end(self) -> int:
        return self.start + self.length


class MovableMemory(PeArray):
    """Array of (addr_reg, temp_reg) PEs plus the object lookup table."""

    def __init__(self, n_pe: int, **kw):
        super().__init__(n_pe, **kw)
        self.values = np.zeros(n_pe, dtype=np.uint64)
        self._temp = np.zeros(n_pe, dtype=np.uint64)
        self.table: dict = {}

    # -- exclusive bus ------------------------------------------------------

    def _exclusive_get(self, addr: int) -> int:
        return int(self.values[addr])

    def _exclusive_set(self, addr: int, value) -> None:
        self.values[addr] = value

    def words(self, start: int, end: int) -> list:
        """Unmetered snapshot of raw cells (oracle/debug view)."""
        return [int(x) for x in self.values[start:end]]

    # -- broadcast instructions ----------------------------------------------

    def _apply(self, instruction) -> None:
        op = instruction[0]
        if op == "copy_to_temp":
            direction = instruction[1]
            offset = 1 if direction == "right" else -1
            shifted = kernels.shift_words(self.values, offset, None, self.fill)
            edge = self.edge_mask(-offset)
            shifted[edge] = self.values[edge]  # boundary retains
            self._temp = np.where(self.active, shifted, self._temp)
        elif op == "commit_temp":
            self.values = np.where(self.active, self._temp, self.values)
        else:
            raise InstructionError(f"movable memory cannot {op!r}")

    def _select(self, start: int, end: int) -> None:
        """Reload the held activation latch for a sub-step of one compound
        move (the decoded mask is part of the move instruction itself, so
        no separate activation cycle is charged)."""
        mask = np.zeros(self.n_pe, dtype=bool)
        if start <= end:
            mask[start:end + 1] = True
        self.active = mask

    # -- block shifts ----------------------------------------------------------

    def shift_block(self, start: int, end: int, direction: str) -> None:
        """Move [start, end] one cell toward `direction`; 2 macro cycles.

        Every selected PE takes its direction-side neighbor's pre-step
        word: right means cell i reads cell i-1. Cost is independent of
        block length.
        """
        if direction not in ("left", "right"):
            raise ArgumentError(f"direction must be left/right, not {direction!r}")
        if not (0 <= start < self.n_pe) or not (0 <= end < self.n_pe):
            raise AddressError(
                f"shift range [{start}, {end}] outside array of {self.n_pe}")
        self._select(start, end)
        self.broadcast(("copy_to_temp", direction))
        self.broadcast(("commit_temp",))

    # -- object manager --------------------------------------------------------

    def used_cells(self) -> int:
        return sum(e.length for e in self.table.values())

    def free_cells(self) -> int:
        return self.n_pe - self.used_cells()

    def object_contents(self, oid) -> list:
        e = self._entry(oid)
        return self.words(e.start, e.end)

    def _entry(self, oid) -> ObjectEntry:
        try:
            return self.table[oid]
        except KeyError:
            raise UnknownObjectError(f"no object {oid!r}") from None

    def _open_gap(self, pos: int, k: int, owner: ObjectEntry) -> None:
        """Shift everything at or after pos right by k cells (2k macro);
        the owner keeps its start — the gap belongs to it."""
        if k == 0:
            return
        hi = self.used_cells() + k - 1
        for _ in range(k):
            self.shift_block(pos, hi, "right")
        for e in self.table.values():
            if e is not owner and e.start >= pos:
                e.start += k

    def _close_gap(self, pos: int, k: int) -> None:
        """Shift everything after the k cells at pos left over them; 2k
        macro cycles."""
        if k == 0:
            return
        hi = self.used_cells() + k - 1
        for _ in range(k):
            self.shift_block(pos, hi, "left")
        for e in self.table.values():
            if e.start > pos:
                e.start -= k

    def insert(self, oid, offset: int, data) -> None:
        """Insert words inside an object (creating it if new)."""
        data = list(data)
        if len(data) > self.free_cells():
            raise AllocationError(
                f"{len(data)} cells requested, {self.free_cells()} free")
        if oid not in self.table:
            if offset != 0:
                raise ArgumentError(
                    f"new object {oid!r} must be inserted at offset 0")
            self.table[oid] = ObjectEntry(self.used_cells(), 0)
        entry = self.table[oid]
        if not 0 <= offset <= entry.length:
            raise ArgumentError(
                f"offset {offset} outside object of {entry.length} cells")
        pos = entry.start + offset
        self._open_gap(pos, len(data), owner=entry)
        for i, w in enumerate(data):
            self.exclusive_write(pos + i, w)
        entry.length += len(data)

    def delete(self, oid, offset: int, count: int) -> None:
        entry = self._entry(oid)
        if count == 0:
            return
        if count < 0 or offset < 0 or offset + count > entry.length:
            raise ArgumentError(
                f"delete [{offset}, {offset + count}) outside object of "
                f"{entry.length} cells")
        pos = entry.start + offset
        entry.length -= count
        self._close_gap(pos, count)

    def resize(self, oid, new_length: int) -> None:
        entry = self._entry(oid)
        if new_length < 0:
            raise ArgumentError("length must be non-negative")
        if new_length > entry.length:
            k = new_length - entry.length
            if k > self.free_cells():
                raise AllocationError(
                    f"{k} cells requested, {self.free_cells()} free")
            pos = entry.end
            self._open_gap(pos, k, owner=entry)
            for i in range(k):
                self.exclusive_write(pos + i, 0)
            entry.length = new_length
        elif new_length < entry.length:
            k = entry.length - new_length
            entry.length = new_length
            self._close_gap(entry.start + new_length, k)

    def move_object(self, oid, new_start: int) -> None:
        """Relocate an object by single-cell rotations of the spanned
        region; 2 macro cycles + 2 exclusive accesses per cell of travel.
        Objects in between slide the other way; packing is preserved."""
        entry = self._entry(oid)
        used = self.used_cells()
        if not 0 <= new_start <= used - entry.length:
            raise ArgumentError(
                f"start {new_start} leaves the packed region [0, {used})")
        old = entry.start
        if new_start == old:
            return
        length = entry.length
        if new_start > old:
            lo, hi = old, new_start + length - 1
            for _ in range(new_start - old):
                wrapped = self.exclusive_read(hi)
                self.shift_block(lo + 1, hi, "right")
                self.exclusive_write(lo, wrapped)
            for e in self.table.values():
                if e is not entry and old < e.start <= hi:
                    e.start -= length
        else:
            lo, hi = new_start, old + length - 1
            for _ in range(old - new_start):
                wrapped = self.exclusive_read(lo)
                self.shift_block(lo, hi - 1, "left")
                self.exclusive_write(hi, wrapped)
            for e in self.table.values():
                if e is not entry and new_start <= e.start < old:
                    e.start += length
        entry.start = new_start

    def refresh(self) -> None:
        """One right then one left move over the used region (plus a guard
        cell when available, so the rightmost used cell round-trips);
        exactly 4 macro cycles. Unused guard content is not preserved."""
        end = min(self.used_cells(), self.n_pe - 1)
        self.shift_block(0, end, "right")
        self.shift_block(0, end, "left")
