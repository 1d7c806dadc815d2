"""Content-computable memory: bit-serial PEs under a word-wide broadcast bus.

Each PE holds W-bit registers — several data registers, one neighbor
register (the only word neighbors can read), one operation register —
plus three single-bit registers m, s and c. One broadcast micro
instruction makes every active PE:

1. select one condition bit V: a chosen op-register bit, a register bit
   (own data register, own neighbor register, or a specific neighbor's
   neighbor register), the s bit or the c bit, optionally negated;
2. evaluate the one-bit ALU  B = M OR (C ? (V == D) : V)  with the
   broadcast compare bit C and datum bit D;
3. commit an enabled subset of writebacks, all reading pre-step state:
   save_m   m := B                    (unconditional when enabled)
   load_m   m := B with the M input held 0 (i.e. the condition term)
   s_if_b   s := pre-step m, only where B
   c_if_b   c := pre-step m, only where B
   op_if_b  op[op_bit] := pre-step m, only where B
   reg_if_b reg[reg_bit] := pre-step op[op_bit], only where B
4. latch B onto its match line (held until that PE's next step).

`load_m` is this simulator's one liberty beyond the published writeback
set: with save_m alone m is monotone (B includes M in its OR), so no
multi-step program could ever lower m and word arithmetic would be
unprogrammable. The liberty is the smallest that restores programs:
m := the condition term itself.

Neighbor reads are two-phase (pre-step words) and edge reads yield the
configured fill word; `edge_mask` exposes which PEs saw an edge. In 1-D
the directions are left/right (lower/higher address); on a 2-D lattice
also down/up (lower/higher row, row-major addressing).

Word-level operations enter through `run_macro`, which expands a MacroOp
into a fixed micro program (see `microcode`): one macro cycle on the
ledger plus one micro cycle per expanded step. A raw `micro_step` costs
one micro cycle — it is the instruction the macro layer is made of.

A trace writer (`set_trace`) receives one formatted line per executed
micro step:

    [!]<cond> C=<0|1> D=<0|1> op[<i>] reg=<sel>[<j>] wb=<flags|->

where <cond> is op/reg/s/c ('!' marks negation), <sel> is data<k>, nbr,
or nbr:<direction>, and wb lists the enabled writebacks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import PeArray
from .errors import ConfigError, InstructionError

__all__ = ["ComputableMemory", "MicroInstruction", "alu_eval",
           "format_micro"]


def alu_eval(m_bit: int, compare_bit: int, v: int, datum_bit: int) -> int:
    """The PE's one-bit ALU: B = M or (C ? (V == D) : V).

    Scalar reference form of the function the array kernels apply
    vector-wide at every micro step.
    """
    if m_bit:
        return 1
    if compare_bit:
        return int(v == datum_bit)
    return int(v)

_CONDITIONS = ("op_bit", "reg_bit", "s_bit", "c_bit")

_WB_FLAGS = {
    "save_m": kernels.WB_SAVE_M,
    "load_m": kernels.WB_LOAD_M,
    "s_if_b": kernels.WB_S_IF_B,
    "c_if_b": kernels.WB_C_IF_B,
    "op_if_b": kernels.WB_OP_IF_B,
    "reg_if_b": kernels.WB_REG_IF_B,
}

_COND_SHORT = {"op_bit": "op", "reg_bit": "reg", "s_bit": "s", "c_bit": "c"}


@dataclass(frozen=True)
class MicroInstruction:
    """One broadcast word of the bit-serial ISA."""

    condition: str = "s_bit"
    negate: bool = False
    compare_bit: int = 0
    datum_bit: int = 0
    op_bit_index: int = 0
    reg: tuple = ("data", 0)
    reg_bit_index: int = 0
    writeback: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "reg", tuple(self.reg))
        object.__setattr__(self, "writeback", frozenset(self.writeback))
        if self.condition not in _CONDITIONS:
            raise InstructionError(f"condition {self.condition!r}")
        if self.compare_bit not in (0, 1) or self.datum_bit not in (0, 1):
            raise InstructionError("compare and datum are single bits")
        unknown = self.writeback - set(_WB_FLAGS)
        if unknown:
            raise InstructionError(f"unknown writeback(s) {sorted(unknown)}")
        if {"save_m", "load_m"} <= self.writeback:
            raise InstructionError("save_m and load_m are exclusive")
        kind = self.reg[0] if self.reg else None
        if kind == "data":
            if len(self.reg) != 2 or not isinstance(self.reg[1], int):
                raise InstructionError(f"register selector {self.reg!r}")
        elif kind == "neighbor":
            if len(self.reg) != 1:
                raise InstructionError(f"register selector {self.reg!r}")
        elif kind == "neighbor_of":
            if len(self.reg) != 2:
                raise InstructionError(f"register selector {self.reg!r}")
        else:
            raise InstructionError(f"register selector {self.reg!r}")

    @property
    def wb_flags(self) -> int:
        flags = 0
        for name in self.writeback:
            flags |= _WB_FLAGS[name]
        return flags


def format_micro(instr: MicroInstruction) -> str:
    """Stable one-line trace rendering of a micro instruction."""
    neg = "!" if instr.negate else ""
    kind = instr.reg[0]
    if kind == "data":
        sel = f"data{instr.reg[1]}"
    elif kind == "neighbor":
        sel = "nbr"
    else:
        sel = f"nbr:{instr.reg[1]}"
    wb = ",".join(sorted(instr.writeback)) or "-"
    return (f"{neg}{_COND_SHORT[instr.condition]} C={instr.compare_bit} "
            f"D={instr.datum_bit} op[{instr.op_bit_index}] "
            f"reg={sel}[{instr.reg_bit_index}] wb={wb}")


class ComputableMemory(PeArray):
    """PE array whose broadcast instructions are bit-serial micro words.

    Public state (numpy arrays indexed by PE): `op`, `neighbor`,
    `data[k]` (W-bit words, W = `width`), and the bit registers `m`,
    `s`, `c` (uint8 0/1). The exclusive bus addresses the neighbor
    register — the PE's one externally visible word.
    """

    def __init__(self, n_pe: int, *, width: int = 32, n_data_regs: int = 4,
                 **kw):
        super().__init__(n_pe, **kw)
        if not 1 <= width <= 64:
            raise ConfigError(f"width {width} outside [1, 64]")
        if n_data_regs < 2:
            raise ConfigError(f"need at least 2 data registers, "
                              f"got {n_data_regs}")
        self.width = width
        self.n_data_regs = n_data_regs
        self.word_mask = (1 << width) - 1
        self.fill &= self.word_mask
        self.op = np.zeros(n_pe, dtype=np.uint64)
        self.neighbor = np.zeros(n_pe, dtype=np.uint64)
        self.data = np.zeros((n_data_regs, n_pe), dtype=np.uint64)
        self.m = np.zeros(n_pe, dtype=np.uint8)
        self.s = np.zeros(n_pe, dtype=np.uint8)
        self.c = np.zeros(n_pe, dtype=np.uint8)
        self._trace = None

    # -- topology ---------------------------------------------------------------

    def directions(self) -> tuple:
        return (("left", "right") if self.dims is None
                else ("left", "right", "down", "up"))

    def _direction_delta(self, direction: str):
        """(flat index delta, edge flags) for a neighbor direction."""
        if self.dims is None:
            table = {"left": -1, "right": 1}
            if direction not in table:
                raise InstructionError(
                    f"1-D arrays have no {direction!r} neighbor")
            d = table[direction]
            return d, self.edge_mask(d)
        table = {"left": (-1, 0), "right": (1, 0),
                 "down": (0, -1), "up": (0, 1)}
        if direction not in table:
            raise InstructionError(f"no {direction!r} neighbor")
        dx, dy = table[direction]
        return dx + dy * self.dims[0], self.edge_mask((dx, dy))

    def neighbor_view(self, direction: str) -> np.ndarray:
        """Each PE's `direction` neighbor's pre-step neighbor register
        (fill word at edges). Pure read used by the condition mux."""
        delta, edges = self._direction_delta(direction)
        return kernels.shift_words(self.neighbor, -delta, edges, self.fill)

    # -- exclusive bus ------------------------------------------------------------

    def _exclusive_get(self, addr: int) -> int:
        return int(self.neighbor[addr])

    def _exclusive_set(self, addr: int, value) -> None:
        self.neighbor[addr] = int(value) & self.word_mask

    # -- micro execution ------------------------------------------------------------

    def _check_bit(self, index: int, what: str) -> None:
        if not 0 <= index < self.width:
            raise InstructionError(
                f"{what} {index} outside word width {self.width}")

    def _reg_words(self, selector, *, writing: bool) -> np.ndarray:
        kind = selector[0]
        if kind == "data":
            j = selector[1]
            if not 0 <= j < self.n_data_regs:
                raise InstructionError(
                    f"data register {j} of {self.n_data_regs}")
            return self.data[j]
        if kind == "neighbor":
            return self.neighbor
        if writing:
            raise InstructionError(
                "a PE cannot write a neighbor's register")
        return self.neighbor_view(selector[1])

    def _condition_v(self, instr: MicroInstruction) -> np.ndarray:
        if instr.condition == "s_bit":
            v = self.s.copy()
        elif instr.condition == "c_bit":
            v = self.c.copy()
        elif instr.condition == "op_bit":
            self._check_bit(instr.op_bit_index, "op bit")
            v = ((self.op >> np.uint64(instr.op_bit_index))
                 & np.uint64(1)).astype(np.uint8)
        else:
            self._check_bit(instr.reg_bit_index, "register bit")
            words = self._reg_words(instr.reg, writing=False)
            v = ((words >> np.uint64(instr.reg_bit_index))
                 & np.uint64(1)).astype(np.uint8)
        if instr.negate:
            v = (v ^ 1).astype(np.uint8)
        return v

    def _execute(self, instr: MicroInstruction) -> np.ndarray:
        v = self._condition_v(instr)
        reg_words = None
        if "reg_if_b" in instr.writeback:
            self._check_bit(instr.reg_bit_index, "register bit")
            reg_words = self._reg_words(instr.reg, writing=True)
        if "op_if_b" in instr.writeback:
            self._check_bit(instr.op_bit_index, "op bit")
        if self._trace is not None:
            self._trace.write(format_micro(instr) + "\n")
        return kernels.micro_step(
            self.active, self.m, self.s, self.c, self.op, v,
            instr.compare_bit, instr.datum_bit, instr.wb_flags,
            instr.op_bit_index, reg_words, instr.reg_bit_index, self.match)

    def micro_step(self, instr: MicroInstruction) -> np.ndarray:
        """One bit-serial broadcast at the active PEs; 1 micro cycle.
        Returns the per-PE B vector (whatever the match lines latched)."""
        self.ledger.charge_micro(1)
        return self._execute(instr)

    def run_macro(self, macro) -> None:
        """Word-level operation: expand to a fixed micro program and run
        it under one macro cycle plus one micro cycle per step."""
        from .microcode import expand
        steps = expand(macro, width=self.width,
                       n_data_regs=self.n_data_regs,
                       directions=self.directions())
        self.ledger.charge_macro(1)
        for instr in steps:
            self.ledger.charge_micro(1)
            self._execute(instr)

    # -- diagnostics ---------------------------------------------------------------

    def set_trace(self, writer) -> None:
        """Emit one line per executed micro step to writer.write(); pass
        None to stop tracing."""
        self._trace = writer

    def words(self, which="op") -> list:
        """Unmetered register snapshot (oracle/debug view): 'op',
        'neighbor', or a data register index."""
        if which == "op":
            arr = self.op
        elif which == "neighbor":
            arr = self.neighbor
        else:
            arr = self.data[int(which)]
        return [int(x) for x in arr]
