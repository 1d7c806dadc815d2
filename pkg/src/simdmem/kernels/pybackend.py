"""Vectorized (numpy) implementations of the hot per-PE kernels.

Every function here treats its input arrays as pre-step state and either
returns fresh arrays or performs one synchronous commit, so array-wide
two-phase semantics hold by construction. The compiled backend mirrors
these signatures exactly; tests/refbackend re-derive them one PE at a
time in randomized order to prove commit-order independence.
"""

from __future__ import annotations

import numpy as np

# writeback flag bits for micro_step (one micro instruction's subset)
WB_SAVE_M = 1 << 0   # M := B
WB_LOAD_M = 1 << 1   # M := B evaluated with the M input forced to 0
WB_S_IF_B = 1 << 2   # S := pre-step M, gated on B
WB_C_IF_B = 1 << 3   # C := pre-step M, gated on B
WB_OP_IF_B = 1 << 4  # op_reg[op_bit] := pre-step M, gated on B
WB_REG_IF_B = 1 << 5  # reg[reg_bit] := pre-step op_reg[op_bit], gated on B


def shift_words(values: np.ndarray, offset: int, invalid: np.ndarray,
                fill: int) -> np.ndarray:
    """Gather values[i - offset] into position i.

    Sources outside the array and positions flagged in `invalid` (the
    caller's topology-aware edge mask) both read the fill word.
    """
    n = len(values)
    if offset == 0:
        out = values.copy()
    else:
        out = np.roll(values, offset)
        if offset > 0:
            out[:min(offset, n)] = fill
        else:
            out[max(n + offset, 0):] = fill
    if invalid is not None:
        out[invalid] = fill
    return out


def alu_eval_vec(m, v, compare_bit: int, datum_bit: int):
    """Vector form of the one-bit ALU: B = M OR (C ? (V==D) : V)."""
    if compare_bit:
        term = (v == datum_bit)
    else:
        term = v.astype(bool)
    return m.astype(bool) | term


def micro_step(active, m, s, c, op_words, v, compare_bit, datum_bit,
               wb_flags, op_bit_index, reg_words=None, reg_bit_index=0,
               match=None):
    """One bit-serial step, committed simultaneously across active PEs.

    active: bool[N]; m, s, c: uint8[N] (mutated); op_words: uint[N]
    (mutated); v: uint8[N] pre-selected, pre-negated condition input;
    reg_words: target register for the op→reg writeback (mutated);
    match: bool[N] latched from B at active PEs (mutated).
    Returns the B vector (bool[N]) for inspection.
    """
    m_pre = m.copy()
    op_pre_bit = ((op_words >> op_bit_index) & 1).astype(np.uint8)
    b0 = alu_eval_vec(np.zeros_like(m), v, compare_bit, datum_bit)
    big_b = b0 | m.astype(bool)
    gate = active & big_b
    if wb_flags & WB_SAVE_M:
        m[active] = big_b[active]
    elif wb_flags & WB_LOAD_M:
        m[active] = b0[active]
    if wb_flags & WB_S_IF_B:
        s[gate] = m_pre[gate]
    if wb_flags & WB_C_IF_B:
        c[gate] = m_pre[gate]
    if wb_flags & WB_OP_IF_B:
        bit = np.uint64(1) << np.uint64(op_bit_index)
        set_mask = gate & (m_pre == 1)
        clr_mask = gate & (m_pre == 0)
        op_words[set_mask] |= bit
        op_words[clr_mask] &= ~bit
    if wb_flags & WB_REG_IF_B:
        bit = np.uint64(1) << np.uint64(reg_bit_index)
        set_mask = gate & (op_pre_bit == 1)
        clr_mask = gate & (op_pre_bit == 0)
        reg_words[set_mask] |= bit
        reg_words[clr_mask] &= ~bit
    if match is not None:
        match[active] = big_b[active]
    return big_b
