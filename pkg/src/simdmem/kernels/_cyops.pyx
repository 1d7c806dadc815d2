# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twins of the hot per-PE kernels (see pybackend for contracts).

Same pre-step-snapshot semantics: every read below uses values captured
before any write of the same step, so the commit is order-independent.
"""

import numpy as np

from libc.stdint cimport uint64_t, uint8_t


def shift_words(values, long offset, invalid, unsigned long long fill):
    """Gather values[i - offset] into position i; invalid sources → fill."""
    cdef uint64_t[:] src = values
    cdef Py_ssize_t n = src.shape[0]
    out_arr = np.empty(n, dtype=np.uint64)
    cdef uint64_t[:] out = out_arr
    cdef uint8_t[:] bad
    cdef Py_ssize_t i, j
    for i in range(n):
        j = i - offset
        if 0 <= j < n:
            out[i] = src[j]
        else:
            out[i] = <uint64_t> fill
    if invalid is not None:
        bad = invalid
        for i in range(n):
            if bad[i]:
                out[i] = <uint64_t> fill
    return out_arr


def micro_step(active, m, s, c, op_words, v, int compare_bit, int datum_bit,
               int wb_flags, int op_bit_index, reg_words=None,
               int reg_bit_index=0, match=None):
    """One bit-serial ALU step committed across all active PEs."""
    cdef uint8_t[:] act = active
    cdef uint8_t[:] mv = m
    cdef uint8_t[:] sv = s
    cdef uint8_t[:] cv = c
    cdef uint64_t[:] op = op_words
    cdef uint8_t[:] vv = v
    cdef Py_ssize_t n = mv.shape[0]
    out_arr = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[:] bs = out_arr
    cdef uint64_t[:] reg
    cdef uint8_t[:] mt
    cdef bint have_reg = reg_words is not None
    cdef bint have_match = match is not None
    if have_reg:
        reg = reg_words
    if have_match:
        mt = match
    cdef int save_m = wb_flags & 1       # WB_SAVE_M
    cdef int load_m = wb_flags & 2       # WB_LOAD_M
    cdef int s_if_b = wb_flags & 4       # WB_S_IF_B
    cdef int c_if_b = wb_flags & 8       # WB_C_IF_B
    cdef int op_if_b = wb_flags & 16     # WB_OP_IF_B
    cdef int reg_if_b = wb_flags & 32    # WB_REG_IF_B
    cdef uint64_t op_bit = (<uint64_t> 1) << op_bit_index
    cdef uint64_t reg_bit = (<uint64_t> 1) << reg_bit_index
    cdef Py_ssize_t i
    cdef int b0, b, m_pre, op_pre_bit
    for i in range(n):
        if not act[i]:
            continue
        m_pre = mv[i]
        op_pre_bit = 1 if (op[i] & op_bit) else 0
        if compare_bit:
            b0 = 1 if vv[i] == datum_bit else 0
        else:
            b0 = vv[i]
        b = m_pre | b0
        bs[i] = b
        if save_m:
            mv[i] = b
        elif load_m:
            mv[i] = b0
        if b:
            if s_if_b:
                sv[i] = m_pre
            if c_if_b:
                cv[i] = m_pre
            if op_if_b:
                if m_pre:
                    op[i] = op[i] | op_bit
                else:
                    op[i] = op[i] & ~op_bit
            if reg_if_b and have_reg:
                if op_pre_bit:
                    reg[i] = reg[i] | reg_bit
                else:
                    reg[i] = reg[i] & ~reg_bit
        if have_match:
            mt[i] = b
    return out_arr
