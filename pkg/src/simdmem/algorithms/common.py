"""Shared plumbing for the concurrent algorithms.

Every algorithm in this package drives a preloaded memory, meters its
own work on the memory's cycle ledger, and returns an
:class:`AlgorithmReport` carrying the functional result plus the exact
ledger delta for the run.  Loading data into the array goes over the
exclusive bus (one exclusive operation per word) and is charged before
the algorithm's metering window opens, mirroring how a host would fill
the memory before starting a computation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..core import LedgerSnapshot
from ..errors import ArgumentError
from ..microcode import MacroOp

__all__ = ["AlgorithmReport", "load_op_words", "signed_value"]


@dataclass(frozen=True)
class AlgorithmReport:
    """Outcome of one algorithm run.

    ``result`` is the algorithm-specific payload, ``params`` the
    parameters it ran with, and ``ledger_delta`` the exact instruction
    cycles the run cost (macro cycles, micro cycles, exclusive
    operations) measured on the memory's ledger.
    """

    result: Any
    params: dict = field(default_factory=dict)
    ledger_delta: LedgerSnapshot = LedgerSnapshot(0, 0, 0)

    def to_dict(self) -> dict:
        return {
            "result": self.result,
            "params": dict(self.params),
            "macro_cycles": self.ledger_delta.macro_cycles,
            "micro_cycles": self.ledger_delta.micro_cycles,
            "exclusive_ops": self.ledger_delta.exclusive_ops,
        }


def load_op_words(mem, values) -> None:
    """Fill the op registers with ``values`` over the exclusive bus.

    One exclusive operation per word lands the data in the neighbor
    registers (the exclusive bus's window), then a single broadcast
    moves the block into the op registers.  Positions past the end of
    ``values`` are zero-filled.
    """
    values = list(values)
    if len(values) > mem.n_pe:
        raise ArgumentError(
            f"{len(values)} values do not fit in {mem.n_pe} members")
    mask = mem.word_mask
    for v in values:
        if not 0 <= int(v) <= mask:
            raise ArgumentError(f"word {v} out of range for width {mem.width}")
    block = np.zeros(mem.n_pe, dtype=np.uint64)
    block[:len(values)] = np.asarray(values, dtype=np.uint64)
    mem.neighbor[:] = block
    mem.ledger.charge_exclusive(len(values))
    mem.activate_all()
    mem.run_macro(MacroOp("copy", src=("neighbor",), dst="op"))


def signed_value(word: int, width: int) -> int:
    """Interpret a word as a two's-complement signed integer."""
    word = int(word) & ((1 << width) - 1)
    if word >= 1 << (width - 1):
        word -= 1 << width
    return word
