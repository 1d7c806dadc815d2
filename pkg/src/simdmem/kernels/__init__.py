"""Hot per-PE kernels with a compiled core and a pure-Python fallback.

At import time this package selects between the optional Cython
extension (_cyops) and the vectorized numpy implementations
(pybackend). Set SIMDMEM_PURE=1 to force the fallback. `BACKEND` names
the selection; `refbackend` (scalar, order-parameterized) exists purely
as a test oracle for commit-order independence and is never selected.
"""

from __future__ import annotations

import os

import numpy as np

from . import pybackend
from .pybackend import (WB_C_IF_B, WB_LOAD_M, WB_OP_IF_B, WB_REG_IF_B,
                        WB_S_IF_B, WB_SAVE_M, alu_eval_vec)
from .refbackend import alu_eval

__all__ = [
    "BACKEND", "alu_eval", "alu_eval_vec", "shift_words", "micro_step",
    "WB_SAVE_M", "WB_LOAD_M", "WB_S_IF_B", "WB_C_IF_B", "WB_OP_IF_B",
    "WB_REG_IF_B",
]

_cyops = None
if os.environ.get("SIMDMEM_PURE", "") in ("", "0"):
    try:
        import importlib

        _cyops = importlib.import_module("._cyops", __name__)
    except ImportError:
        _cyops = None

BACKEND = "compiled" if _cyops is not None else "python"

if _cyops is None:
    shift_words = pybackend.shift_words
    micro_step = pybackend.micro_step
else:
    def _as_u8(a):
        return a.view(np.uint8) if a is not None and a.dtype == np.bool_ else a

    def shift_words(values, offset, invalid, fill):
        return _cyops.shift_words(values, offset, _as_u8(invalid), fill)

    def micro_step(active, m, s, c, op_words, v, compare_bit, datum_bit,
                   wb_flags, op_bit_index, reg_words=None, reg_bit_index=0,
                   match=None):
        b = _cyops.micro_step(_as_u8(active), m, s, c, op_words, v,
                              int(compare_bit), int(datum_bit), int(wb_flags),
                              int(op_bit_index), reg_words,
                              int(reg_bit_index), _as_u8(match))
        return b.view(bool)
