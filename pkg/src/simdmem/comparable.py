"""Content-comparable memory: masked predicate steps and field comparison.

Each PE owns one byte (the addressable register) and one storage bit. A
compare step broadcasts a mask, a datum and one of six comparison codes;
every active PE evaluates predicate(byte AND mask, datum) and may update
its storage bit from one of two sources:

* use_selected     — a neighbor's pre-step storage bit (select_code picks
  the side; edge reads see 0),
* use_nand_combine — NAND(comparison, own pre-step bit), which toggles
  the bit exactly where the comparison holds.

The update is gated on update_code AND the comparison result; the gate
lives alone in `_update_gate` so the alternative comparison-independent
reading is a one-line change.

Multi-byte fields compare via a ripple over byte positions in increasing
significance. With the most significant byte leftmost, the running `lt`
verdict hops leftward:

    seed     storage[LSB] := (byte < value_LSB)
    per byte position s toward the MSB:
        set    storage[s] := 1            where byte < value_s
        carry  storage[s] := storage[s-1] where byte = value_s
        sweep  storage[s-1] := 0 — pull the already-swept zero one cell
               to its right, or at the LSB re-issue the seed comparison,
               which toggles its own bits back off

so the verdict lands at the leftmost PE of each field. `eq` needs no set
step (a chain of equality-gated pulls), `gt` mirrors `lt`, and ne/ge/le
add one inversion broadcast at the verdict position. Every plan leaves
all non-verdict bits zero, so a follow-up predicate only has to clear
the verdict column (one remembered broadcast) before it runs. The whole
compare phase costs at most four broadcasts per field byte — independent
of how many records the array holds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MatchReport, PeArray, _mask_to_bool
from .decoder import activation_mask
from .errors import ArgumentError, ConfigError, InstructionError

__all__ = ["CompareStep", "ComparableMemory", "FieldLayout"]

_CMP = {
    "eq": np.equal,
    "ne": np.not_equal,
    "lt": np.less,
    "gt": np.greater,
    "le": np.less_equal,
    "ge": np.greater_equal,
}


def _update_gate(update_code: bool, cmp_result: np.ndarray) -> np.ndarray:
    """Storage updates only where the comparison held AND updates were
    enabled (the strict conjunction; kept separate so relaxing it to
    update_code alone stays a local edit)."""
    if not update_code:
        return np.zeros_like(cmp_result)
    return cmp_result


@dataclass(frozen=True)
class CompareStep:
    """One broadcast word: compare (byte AND mask) against datum, then
    maybe route a new value into the storage bit."""

    mask: int
    datum: int
    cmp_code: str
    select_code: str = "right"
    self_code: str = "use_nand_combine"
    update_code: bool = True

    def __post_init__(self):
        if self.cmp_code not in _CMP:
            raise ArgumentError(f"cmp_code {self.cmp_code!r}")
        if self.select_code not in ("left", "right"):
            raise ArgumentError(f"select_code {self.select_code!r}")
        if self.self_code not in ("use_selected", "use_nand_combine"):
            raise ArgumentError(f"self_code {self.self_code!r}")
        if not (0 <= self.mask <= 0xFF and 0 <= self.datum <= 0xFF):
            raise ArgumentError("mask and datum are bytes")

    @classmethod
    def load(cls, cmp_code: str, datum: int, mask: int = 0xFF):
        """Write the comparison result into zeroed storage (the NAND
        path sets a clean bit exactly where the comparison holds;
        issued twice, it clears what it set)."""
        return cls(mask=mask, datum=datum, cmp_code=cmp_code)

    @classmethod
    def pull(cls, side: str):
        """Copy the `side` neighbor's pre-step bit unconditionally
        (masked byte 0 always equals datum 0)."""
        return cls(mask=0, datum=0, cmp_code="eq", select_code=side,
                   self_code="use_selected")

    @classmethod
    def toggle(cls):
        """Invert the storage bit at every active PE."""
        return cls(mask=0, datum=0, cmp_code="eq")


@dataclass(frozen=True)
class FieldLayout:
    """Fixed-size records of `record_size` PEs holding one unsigned
    field of `field_width` bytes at `field_offset`, most significant
    byte leftmost. record_size doubles as the activation carry that
    strides over one byte position of every record at once."""

    record_size: int
    field_offset: int = 0
    field_width: int = 1

    def __post_init__(self):
        if self.record_size < 1:
            raise ConfigError(
                f"record size must be positive, got {self.record_size}")
        if self.field_width < 1 or self.field_offset < 0:
            raise ConfigError("field needs width and a non-negative offset")
        if self.field_offset + self.field_width > self.record_size:
            raise ConfigError(
                f"field [{self.field_offset}, "
                f"+{self.field_width}) exceeds record "
                f"size {self.record_size}")

    def position(self, significance: int) -> int:
        """Record-relative address of the byte with this significance
        (0 = least significant = rightmost field byte)."""
        return self.field_offset + self.field_width - 1 - significance


class ComparableMemory(PeArray):
    """PE array whose broadcast instruction is the CompareStep.

    `last_phase_cycles` holds the measured macro cost of the most recent
    field predicate's compare phase (everything except enumeration).
    """

    def __init__(self, n_pe: int, **kw):
        super().__init__(n_pe, **kw)
        self.values = np.zeros(n_pe, dtype=np.uint8)
        self.storage = np.zeros(n_pe, dtype=bool)
        self.last_phase_cycles = 0
        self._sweep_plan = None  # resolved (triple, step) clearing verdicts

    # -- exclusive bus ---------------------------------------------------------

    def _exclusive_get(self, addr: int) -> int:
        return int(self.values[addr])

    def _exclusive_set(self, addr: int, value) -> None:
        self.values[addr] = value

    # -- broadcast instruction -------------------------------------------------

    def _apply(self, instruction) -> None:
        op = instruction[0]
        if op != "compare_step":
            raise InstructionError(f"comparable memory cannot {op!r}")
        step: CompareStep = instruction[1]
        cmp = _CMP[step.cmp_code](self.values & step.mask, step.datum)
        if step.self_code == "use_selected":
            if step.select_code == "left":
                candidate = np.concatenate(([False], self.storage[:-1]))
            else:
                candidate = np.concatenate((self.storage[1:], [False]))
        else:
            candidate = ~(cmp & self.storage)
        gate = self.active & _update_gate(step.update_code, cmp)
        self.storage = np.where(gate, candidate, self.storage)
        self.match = self.storage.copy()

    def compare_step(self, step: CompareStep, activation=None) -> None:
        """One compare broadcast; 1 macro cycle. An optional activation
        triple rides along inside the instruction word (no separate
        activation cycle), like the compound block moves elsewhere."""
        if activation is not None:
            self._select_triple(*activation)
        self.broadcast(("compare_step", step))

    def _select_triple(self, start: int, end: int, carry: int = 1) -> None:
        self.active = _mask_to_bool(
            activation_mask(start, end, carry, self.n_pe), self.n_pe)

    # -- field layout helpers ----------------------------------------------------

    def _record_count(self, layout: FieldLayout) -> int:
        if self.n_pe % layout.record_size:
            raise ConfigError(
                f"{self.n_pe} PEs do not divide into records "
                f"of {layout.record_size}")
        return self.n_pe // layout.record_size

    def _triple(self, layout: FieldLayout, significance: int,
                n_records: int):
        rel = layout.position(significance)
        return (rel, (n_records - 1) * layout.record_size + rel,
                layout.record_size)

    @staticmethod
    def _value_bytes(layout: FieldLayout, value: int) -> list:
        width = layout.field_width
        if not 0 <= value < (1 << (8 * width)):
            raise ArgumentError(
                f"value {value:#x} does not fit {width} byte(s)")
        return [(value >> (8 * s)) & 0xFF for s in range(width)]

    # -- predicate plans -----------------------------------------------------------

    @staticmethod
    def _sweep_step(significance: int, seed_code: str, seed_datum: int):
        if significance == 0:
            return (0, CompareStep.load(seed_code, seed_datum))
        return (significance, CompareStep.pull("right"))

    def _phase_plan(self, layout: FieldLayout, cmp_code: str, value: int):
        """(significance, step) list that leaves the verdict at each
        record's leftmost field PE and zeros everywhere else."""
        if cmp_code not in _CMP:
            raise ArgumentError(f"cmp_code {cmp_code!r}")
        vb = self._value_bytes(layout, value)
        width = layout.field_width
        if width == 1:
            return [(0, CompareStep.load(cmp_code, vb[0]))]
        ripple = {"lt": "lt", "ge": "lt", "gt": "gt", "le": "gt"}
        plan = []
        if cmp_code in ripple:
            seed = ripple[cmp_code]
            plan.append((0, CompareStep.load(seed, vb[0])))
            for s in range(1, width):
                plan.append((s, CompareStep.load(seed, vb[s])))
                plan.append((s, CompareStep(mask=0xFF, datum=vb[s],
                                            cmp_code="eq",
                                            select_code="right",
                                            self_code="use_selected")))
                plan.append(self._sweep_step(s - 1, seed, vb[0]))
        else:  # eq / ne: chain of equality-gated pulls
            plan.append((0, CompareStep.load("eq", vb[0])))
            for s in range(1, width):
                plan.append((s, CompareStep(mask=0xFF, datum=vb[s],
                                            cmp_code="eq",
                                            select_code="right",
                                            self_code="use_selected")))
                plan.append(self._sweep_step(s - 1, "eq", vb[0]))
        if cmp_code in ("ne", "ge", "le"):
            plan.append((width - 1, CompareStep.toggle()))
        return plan

    def _run_phase(self, layout: FieldLayout, cmp_code: str,
                   value: int) -> int:
        n_records = self._record_count(layout)
        plan = self._phase_plan(layout, cmp_code, value)
        before = self.ledger.macro_cycles
        self.clear_results()
        for significance, step in plan:
            self.compare_step(
                step, activation=self._triple(layout, significance,
                                              n_records))
        self.last_phase_cycles = self.ledger.macro_cycles - before
        verdict = self._triple(layout, layout.field_width - 1, n_records)
        if layout.field_width == 1:
            self._sweep_plan = [(verdict, plan[0][1])]
        else:
            self._sweep_plan = [(verdict, CompareStep.pull("right"))]
        return n_records

    # -- public operations -----------------------------------------------------------

    def clear_results(self) -> None:
        """Zero the verdict column left by the last field predicate (one
        broadcast); free when the array is already clean."""
        if self._sweep_plan:
            for triple, step in self._sweep_plan:
                self.compare_step(step, activation=triple)
            self._sweep_plan = None

    def field_predicate(self, layout: FieldLayout, cmp_code: str,
                        value: int) -> MatchReport:
        """Compare every record's field against `value` at once.

        Verdict bits rise on the match lines at each record's leftmost
        field PE and are enumerated into ascending record indexes. Macro
        cost: the compare phase (`last_phase_cycles`, at most 4
        broadcasts per field byte, record-count independent) plus one
        enumeration cycle per matching record.
        """
        self._run_phase(layout, cmp_code, value)
        addresses = self.enumerate_matches()
        matched = [(a - layout.field_offset) // layout.record_size
                   for a in addresses.matched]
        return MatchReport(matched=matched, count=addresses.count)

    def histogram(self, layout: FieldLayout, limits) -> list:
        """Bin counts over lower-closed intervals
        (-inf, l1), [l1, l2), ..., [lM, +inf).

        One `lt` compare phase plus one parallel match count per limit;
        the differenced counters always sum to the record count.
        """
        n_records = self._record_count(layout)
        limits = list(limits)
        for a, b in zip(limits, limits[1:]):
            if a >= b:
                raise ArgumentError("limits must increase strictly")
        below = []
        for limit in limits:
            self._run_phase(layout, "lt", limit)
            below.append(self.count_matches())
        counts, prev = [], 0
        for edge in below + [n_records]:
            counts.append(edge - prev)
            prev = edge
        return counts

    # -- loading ------------------------------------------------------------------------

    def load_records(self, records, layout: FieldLayout) -> None:
        """Write field values over the exclusive bus, one op per field
        byte; no broadcast cycles."""
        n_records = self._record_count(layout)
        records = list(records)
        if len(records) > n_records:
            raise ArgumentError(
                f"{len(records)} records exceed capacity {n_records}")
        columns = [self._value_bytes(layout, r) for r in records]
        base = np.arange(len(records)) * layout.record_size
        for s in range(layout.field_width):
            self.values[base + layout.position(s)] = [c[s] for c in columns]
        self.ledger.charge_exclusive(len(records) * layout.field_width)

    def records(self, layout: FieldLayout) -> list:
        """Unmetered field read-back (oracle/debug view)."""
        out = []
        for r in range(self._record_count(layout)):
            base = r * layout.record_size
            value = 0
            for s in range(layout.field_width):
                value |= int(self.values[base + layout.position(s)]) << (8 * s)
            out.append(value)
        return out
