"""Content-searchable memory: masked byte compare with chained storage bits.

Each PE owns one byte and one storage bit. A match step compares the
byte (under a mask) against a broadcast datum and either stores the
result directly (self mode) or ANDs it with a neighbor PE's pre-step
storage bit (chain mode). Anchoring each pattern byte to the previous
byte's match one cell over makes an M-byte unanchored substring search
cost exactly M broadcast cycles regardless of text length; storage bits
end up set at the LAST byte of every occurrence.

Chain direction: with text stored left-to-right at ascending addresses,
byte i of the pattern at address p needs byte i-1 matched at p-1, so
the chain reads the lower-address neighbor by default. `chain="higher"`
flips it for right-to-left layouts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MatchReport, PeArray
from .errors import ArgumentError, InstructionError

__all__ = ["SearchStep", "SearchableMemory"]


@dataclass(frozen=True)
class SearchStep:
    """One broadcast compare: ((byte AND mask) == datum) for cmp_code
    'equal' (inverted for 'not_equal'), optionally chained."""

    mask: int
    datum: int
    cmp_code: str = "equal"
    self_code: bool = True

    def __post_init__(self):
        if self.cmp_code not in ("equal", "not_equal"):
            raise ArgumentError(f"cmp_code {self.cmp_code!r}")
        if not (0 <= self.mask <= 0xFF and 0 <= self.datum <= 0xFF):
            raise ArgumentError("mask and datum are bytes")


class SearchableMemory(PeArray):
    def __init__(self, n_pe: int, *, chain: str = "lower", **kw):
        super().__init__(n_pe, **kw)
        if chain not in ("lower", "higher"):
            raise ArgumentError(f"chain must be lower/higher, not {chain!r}")
        self.chain = chain
        self.values = np.zeros(n_pe, dtype=np.uint8)
        self.storage = np.zeros(n_pe, dtype=bool)

    # -- exclusive bus -------------------------------------------------------

    def _exclusive_get(self, addr: int) -> int:
        return int(self.values[addr])

    def _exclusive_set(self, addr: int, value) -> None:
        self.values[addr] = value

    def storage_positions(self) -> list:
        """Unmetered snapshot of set storage bits (oracle/debug view)."""
        return [int(i) for i in np.flatnonzero(self.storage)]

    # -- broadcast instruction -------------------------------------------------

    def _apply(self, instruction) -> None:
        op = instruction[0]
        if op != "match_step":
            raise InstructionError(f"searchable memory cannot {op!r}")
        step: SearchStep = instruction[1]
        cmp = (self.values & step.mask) == step.datum
        if step.cmp_code == "not_equal":
            cmp = ~cmp
        if not step.self_code:
            if self.chain == "lower":
                pred = np.concatenate(([False], self.storage[:-1]))
            else:
                pred = np.concatenate((self.storage[1:], [False]))
            cmp = cmp & pred
        self.storage = np.where(self.active, cmp, self.storage)
        self.match = self.storage.copy()

    def match_step(self, step: SearchStep) -> None:
        """One compare broadcast over the current activation; 1 macro."""
        self.broadcast(("match_step", step))

    # -- substring search --------------------------------------------------------

    def _steps_for(self, pattern, masks):
        pattern = bytes(pattern)
        if not pattern:
            raise ArgumentError("pattern must be non-empty")
        masks = list(masks) if masks is not None else [0xFF] * len(pattern)
        if len(masks) != len(pattern):
            raise ArgumentError(
                f"{len(masks)} masks for {len(pattern)} pattern bytes")
        return [
            SearchStep(mask=mk, datum=by & mk, cmp_code="equal",
                       self_code=(i == 0))
            for i, (by, mk) in enumerate(zip(pattern, masks))
        ]

    def find_substring(self, pattern, masks=None, activation=None) -> MatchReport:
        """Mark the last byte of every occurrence and enumerate them.

        Costs 1 activation cycle + len(pattern) match cycles + one
        enumeration cycle per reported address. `activation` is an
        optional (start, end, carry) triple for structured layouts
        (default: all PEs).
        """
        steps = self._steps_for(pattern, masks)
        if activation is None:
            self.activate_all()
        else:
            self.activate(*activation)
        for step in steps:
            self.match_step(step)
        return self.enumerate_matches()

    def match_phase_cycles(self, pattern, masks=None) -> int:
        """Macro cycles of the match phase alone (the text-length-free
        part): measured, not computed, so tests can pin it."""
        self.activate_all()
        before = self.ledger.macro_cycles
        for step in self._steps_for(pattern, masks):
            self.match_step(step)
        return self.ledger.macro_cycles - before
