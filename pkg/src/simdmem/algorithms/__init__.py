"""Concurrent algorithms over the in-memory PE arrays.

Each algorithm drives a preloaded memory through broadcast macros,
meters itself on the memory's cycle ledger, and returns an
:class:`AlgorithmReport` with the functional result and the exact
ledger delta.
"""

from .common import AlgorithmReport, load_op_words, signed_value
from .lines import (build_slope_set, detect_all_lines, detect_line_segment,
                    midpoint_path)
from .reduce import global_limit, sum_1d, sum_2d, threshold_flags
from .sort import (classify_defects, count_disorder, global_moving_sort,
                   hybrid_sort, local_exchange_round)
from .stencil import (BUILTIN_PLANS, Kernel1D, Kernel2D, kernel_compose,
                      kernel_plus, kernels_equal, plan_kernel, run_local_op)
from .template import template_search_1d, template_search_2d

__all__ = [
    "AlgorithmReport", "load_op_words", "signed_value",
    "Kernel1D", "Kernel2D", "kernel_plus", "kernel_compose",
    "kernels_equal", "plan_kernel", "run_local_op", "BUILTIN_PLANS",
    "sum_1d", "sum_2d", "global_limit", "threshold_flags",
    "count_disorder", "classify_defects", "local_exchange_round",
    "global_moving_sort", "hybrid_sort",
    "template_search_1d", "template_search_2d",
    "midpoint_path", "detect_line_segment", "build_slope_set",
    "detect_all_lines",
]
