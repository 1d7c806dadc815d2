"""Scalar single-PE reference twins of the hot kernels.

Each function re-derives a kernel's result by visiting PEs one at a time
in a caller-chosen order, reading only pre-step snapshots. Tests run
them with randomized orders against the vectorized backend to prove the
synchronous-commit contract (result independent of PE evaluation order).
Not a selectable runtime backend — a test oracle.
"""

from __future__ import annotations

from .pybackend import (WB_C_IF_B, WB_LOAD_M, WB_OP_IF_B, WB_REG_IF_B,
                        WB_S_IF_B, WB_SAVE_M)


def alu_eval(m: int, compare_bit: int, v: int, datum_bit: int) -> int:
    """One-bit ALU: B = M OR C·(V == D) OR (NOT C)·V."""
    return m | (compare_bit & (1 if v == datum_bit else 0)) | ((1 - compare_bit) & v)


def shift_words(values, offset, invalid, fill, order):
    pre = list(values)
    out = list(values)
    n = len(values)
    for i in order:
        if invalid is not None and invalid[i]:
            out[i] = fill
        else:
            src = i - offset
            out[i] = pre[src] if 0 <= src < n else fill
    return out


def micro_step(active, m, s, c, op_words, v, compare_bit, datum_bit,
               wb_flags, op_bit_index, reg_words=None, reg_bit_index=0,
               match=None, order=None):
    """Scalar twin of pybackend.micro_step; mutates the given lists."""
    n = len(m)
    order = range(n) if order is None else order
    m_pre = list(m)
    op_pre = list(op_words)
    bs = [0] * n
    for i in order:
        if not active[i]:
            continue
        b0 = alu_eval(0, compare_bit, int(v[i]), datum_bit)
        b = m_pre[i] | b0
        bs[i] = b
        if wb_flags & WB_SAVE_M:
            m[i] = b
        elif wb_flags & WB_LOAD_M:
            m[i] = b0
        if b:
            if wb_flags & WB_S_IF_B:
                s[i] = m_pre[i]
            if wb_flags & WB_C_IF_B:
                c[i] = m_pre[i]
            if wb_flags & WB_OP_IF_B:
                if m_pre[i]:
                    op_words[i] = op_pre[i] | (1 << op_bit_index)
                else:
                    op_words[i] = op_pre[i] & ~(1 << op_bit_index)
            if wb_flags & WB_REG_IF_B:
                src_bit = (op_pre[i] >> op_bit_index) & 1
                if src_bit:
                    reg_words[i] |= 1 << reg_bit_index
                else:
                    reg_words[i] &= ~(1 << reg_bit_index)
        if match is not None:
            match[i] = bool(b)
    return bs
