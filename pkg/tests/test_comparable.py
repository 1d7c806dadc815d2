"""Content-comparable memory: masked predicates, field ripple, histogram.

Oracles: plain-Python unsigned comparison of whole records, and a direct
binning loop for histograms. The memory under test must agree bit-for-bit
while staying within its broadcast-cycle budget.
"""

import pytest
from hypothesis import given, settings, strategies as st

from simdmem.comparable import ComparableMemory, CompareStep, FieldLayout
from simdmem.errors import ArgumentError, ConfigError
from simdmem.rng import SplitMix64

CMP_CODES = ("eq", "ne", "lt", "gt", "le", "ge")


def cmp_oracle(code, a, b):
    return {
        "eq": a == b, "ne": a != b, "lt": a < b,
        "gt": a > b, "le": a <= b, "ge": a >= b,
    }[code]


def predicate_oracle(records, code, pivot):
    return [cmp_oracle(code, r, pivot) for r in records]


def bin_oracle(records, limits):
    """Lower-closed bins: (-inf, l1), [l1, l2), ..., [lM, +inf)."""
    bounds = list(limits) + [None]
    counts = [0] * (len(limits) + 1)
    for r in records:
        i = 0
        while i < len(limits) and r >= limits[i]:
            i += 1
        counts[i] += 1
    return counts


def make_loaded(records, layout, *, junk_seed=None):
    mem = ComparableMemory(layout.record_size * len(records))
    mem.load_records(records, layout)
    if junk_seed is not None:
        rng = SplitMix64(junk_seed)
        in_field = set()
        for r in range(len(records)):
            for k in range(layout.field_width):
                in_field.add(r * layout.record_size + layout.field_offset + k)
        for a in range(mem.n_pe):
            if a not in in_field:
                mem.values[a] = rng.bounded(256)
    return mem


# -- single compare steps -----------------------------------------------------


def test_load_step_writes_predicate_bits():
    mem = ComparableMemory(3)
    mem.load_records([3, 5, 7], FieldLayout(record_size=1))
    mem.activate_all()
    before = mem.ledger.snapshot()
    mem.compare_step(CompareStep.load("lt", 6))
    delta = mem.ledger.snapshot().delta(before)
    assert list(mem.storage) == [True, True, False]
    assert delta.macro_cycles == 1 and delta.exclusive_ops == 0


def test_update_code_false_is_conditional_noop():
    mem = ComparableMemory(4)
    mem.load_records([1, 2, 3, 4], FieldLayout(record_size=1))
    mem.activate_all()
    mem.compare_step(CompareStep.load("ge", 3))
    held = list(mem.storage)
    for step in (
        CompareStep(mask=0xFF, datum=2, cmp_code="gt", update_code=False),
        CompareStep(mask=0, datum=0, cmp_code="eq", select_code="left",
                    self_code="use_selected", update_code=False),
    ):
        mem.compare_step(step)
        assert list(mem.storage) == held


def test_select_left_copies_neighbor_pattern_shifted():
    mem = ComparableMemory(4)
    mem.load_records([1, 1, 0, 1], FieldLayout(record_size=1))
    mem.activate_all()
    mem.compare_step(CompareStep.load("eq", 1))
    assert list(mem.storage) == [True, True, False, True]
    mem.compare_step(CompareStep.pull("left"))
    assert list(mem.storage) == [False, True, True, False]


def test_select_right_copies_neighbor_pattern_shifted():
    mem = ComparableMemory(4)
    mem.load_records([1, 0, 1, 1], FieldLayout(record_size=1))
    mem.activate_all()
    mem.compare_step(CompareStep.load("eq", 1))
    mem.compare_step(CompareStep.pull("right"))
    assert list(mem.storage) == [False, True, True, False]


def test_update_gate_requires_true_comparison():
    # With the comparison false, the storage bit must hold even though
    # update_code is set and the neighbor offers a 1.
    mem = ComparableMemory(2)
    mem.load_records([9, 2], FieldLayout(record_size=1))
    mem.activate_all()
    mem.compare_step(CompareStep.load("eq", 2))
    assert list(mem.storage) == [False, True]
    mem.compare_step(CompareStep(mask=0xFF, datum=5, cmp_code="lt",
                                 select_code="right",
                                 self_code="use_selected"))
    # PE 0: 9 < 5 fails, right neighbor's 1 must NOT land.
    # PE 1: 2 < 5 holds, right neighbor is the edge fill (0).
    assert list(mem.storage) == [False, False]


def test_nand_step_toggles_exactly_where_comparison_holds():
    mem = ComparableMemory(6)
    vals = [4, 9, 1, 7, 3, 8]
    mem.load_records(vals, FieldLayout(record_size=1))
    mem.activate_all()
    mem.compare_step(CompareStep.load("lt", 5))
    assert list(mem.storage) == [v < 5 for v in vals]
    mem.compare_step(CompareStep.load("lt", 8))
    assert list(mem.storage) == [(v < 5) ^ (v < 8) for v in vals]


def test_inactive_pes_never_update():
    mem = ComparableMemory(6)
    mem.load_records([1, 1, 1, 1, 1, 1], FieldLayout(record_size=1))
    mem.activate(0, 5, 2)
    mem.compare_step(CompareStep.load("eq", 1))
    assert list(mem.storage) == [True, False, True, False, True, False]


def test_masked_comparison():
    mem = ComparableMemory(3)
    mem.load_records([0x1A, 0x2A, 0x3B], FieldLayout(record_size=1))
    mem.activate_all()
    mem.compare_step(CompareStep.load("eq", 0x0A, mask=0x0F))
    assert list(mem.storage) == [True, True, False]


# -- field predicates ---------------------------------------------------------


def test_lt_two_byte_fields_pinned():
    layout = FieldLayout(record_size=2, field_offset=0, field_width=2)
    mem = make_loaded([0x0100, 0x0102, 0x0200], layout)
    before = mem.ledger.snapshot()
    rep = mem.field_predicate(layout, "lt", 0x0102)
    delta = mem.ledger.snapshot().delta(before)
    assert rep.matched == [0] and rep.count == 1
    assert mem.last_phase_cycles <= 4 * layout.field_width
    assert delta.macro_cycles == mem.last_phase_cycles + rep.count
    # results live at the leftmost PE of each field; the rest is swept clean
    assert list(mem.storage) == [True, False, False, False, False, False]


def test_eq_two_byte_fields_pinned():
    layout = FieldLayout(record_size=2, field_width=2)
    mem = make_loaded([0x0100, 0x0102, 0x0200], layout)
    rep = mem.field_predicate(layout, "eq", 0x0200)
    assert rep.matched == [2]
    assert list(mem.storage) == [False, False, False, False, True, False]


def test_ge_is_complement_of_lt():
    layout = FieldLayout(record_size=2, field_width=2)
    mem = make_loaded([0x0100, 0x0102, 0x0200], layout)
    rep = mem.field_predicate(layout, "ge", 0x0102)
    assert rep.matched == [1, 2]


@pytest.mark.parametrize("width", [1, 2, 3, 4, 8])
def test_phase_cost_model(width):
    layout = FieldLayout(record_size=width, field_width=width)
    records = [0] * 5
    ripple = 1 if width == 1 else 3 * width - 2
    chain = 1 if width == 1 else 2 * width - 1
    for code, expect in [("lt", ripple), ("gt", ripple), ("eq", chain),
                         ("ge", ripple if width == 1 else ripple + 1),
                         ("le", ripple if width == 1 else ripple + 1),
                         ("ne", chain if width == 1 else chain + 1)]:
        mem = make_loaded(records, layout)
        mem.field_predicate(layout, code, 0)
        assert mem.last_phase_cycles == expect, code
        assert mem.last_phase_cycles <= 4 * width


def test_phase_cycles_independent_of_record_count():
    layout = FieldLayout(record_size=3, field_width=3)
    small = make_loaded(list(range(40)), layout)
    large = make_loaded(list(range(160)), layout)
    small.field_predicate(layout, "lt", 77)
    large.field_predicate(layout, "lt", 77)
    assert small.last_phase_cycles == large.last_phase_cycles


def test_all_six_predicates_on_random_four_byte_records():
    rng = SplitMix64(0xC0117A51)
    n = 10_000
    records = [rng.bounded(1 << 32) for _ in range(n)]
    pivot = records[rng.bounded(n)]  # guarantee eq/ne boundary traffic
    layout = FieldLayout(record_size=4, field_width=4)
    mem = make_loaded(records, layout)
    for code in CMP_CODES:
        want = [i for i, flag
                in enumerate(predicate_oracle(records, code, pivot)) if flag]
        rep = mem.field_predicate(layout, code, pivot)
        assert rep.matched == want, code
        assert mem.last_phase_cycles <= 4 * layout.field_width + 1


def test_predicate_algebra_complements():
    rng = SplitMix64(7)
    records = [rng.bounded(1 << 24) for _ in range(257)]
    pivot = records[100]
    layout = FieldLayout(record_size=3, field_width=3)
    mem = make_loaded(records, layout)
    for plain, flipped in [("eq", "ne"), ("lt", "ge"), ("gt", "le")]:
        lhs = set(mem.field_predicate(layout, plain, pivot).matched)
        rhs = set(mem.field_predicate(layout, flipped, pivot).matched)
        assert lhs | rhs == set(range(len(records))) and not (lhs & rhs)


def test_fields_embedded_in_wider_records():
    # Field bytes sit inside larger records surrounded by junk bytes the
    # predicate must never read.
    layout = FieldLayout(record_size=6, field_offset=2, field_width=2)
    records = [0x0100, 0x0102, 0x0200, 0x0102]
    mem = make_loaded(records, layout, junk_seed=99)
    rep = mem.field_predicate(layout, "le", 0x0102)
    assert rep.matched == [0, 1, 3]


def test_back_to_back_predicates_share_one_array():
    layout = FieldLayout(record_size=2, field_width=2)
    records = [5, 300, 7, 300, 600]
    mem = make_loaded(records, layout)
    assert mem.field_predicate(layout, "eq", 300).matched == [1, 3]
    assert mem.field_predicate(layout, "lt", 300).matched == [0, 2]
    assert mem.field_predicate(layout, "gt", 300).matched == [4]
    assert mem.last_phase_cycles <= 4 * layout.field_width + 1


def test_single_byte_adjacent_records_chain_cleanly():
    # record_size == field_width == 1: every PE is a result position, so
    # the sweep before a follow-up predicate relies on re-issuing the
    # previous comparison rather than pulling a neighbor's zero.
    layout = FieldLayout(record_size=1)
    records = [5, 12, 25, 28, 31]
    mem = make_loaded(records, layout)
    assert mem.field_predicate(layout, "ne", 25).matched == [0, 1, 3, 4]
    assert mem.field_predicate(layout, "lt", 26).matched == [0, 1, 2]
    assert mem.field_predicate(layout, "ge", 12).matched == [1, 2, 3, 4]


def test_clear_results_restores_all_zero():
    layout = FieldLayout(record_size=2, field_width=2)
    mem = make_loaded([1, 2, 3], layout)
    mem.field_predicate(layout, "ge", 2)
    assert any(mem.storage)
    mem.clear_results()
    assert not any(mem.storage)
    before = mem.ledger.snapshot()
    mem.clear_results()  # idempotent and free when already clean
    assert mem.ledger.snapshot().delta(before).macro_cycles == 0


@settings(max_examples=120, deadline=None)
@given(data=st.data())
def test_field_predicate_matches_oracle(data):
    width = data.draw(st.integers(1, 8), label="width")
    offset = data.draw(st.integers(0, 2), label="offset")
    tail = data.draw(st.integers(0, 2), label="tail")
    layout = FieldLayout(record_size=offset + width + tail,
                         field_offset=offset, field_width=width)
    top = (1 << (8 * width)) - 1
    records = data.draw(
        st.lists(st.integers(0, top), min_size=1, max_size=12),
        label="records")
    pivot = data.draw(
        st.one_of(st.sampled_from(records), st.integers(0, top)),
        label="pivot")
    code = data.draw(st.sampled_from(CMP_CODES), label="code")
    mem = make_loaded(records, layout, junk_seed=offset + tail + 1)
    rep = mem.field_predicate(layout, code, pivot)
    want = predicate_oracle(records, code, pivot)
    assert rep.matched == [i for i, f in enumerate(want) if f]
    assert rep.count == sum(want)
    assert mem.last_phase_cycles <= 4 * width
    # only leftmost field PEs may hold a bit
    msb = {r * layout.record_size + offset for r in range(len(records))}
    assert all(bool(mem.storage[a]) == (a in msb and want[
        (a - offset) // layout.record_size]) for a in range(mem.n_pe))
    mem.clear_results()
    assert not any(mem.storage)


# -- histogram ----------------------------------------------------------------


def test_histogram_pinned():
    layout = FieldLayout(record_size=1)
    mem = make_loaded([5, 12, 25, 28, 31], layout)
    before = mem.ledger.snapshot()
    assert mem.histogram(layout, [10, 20, 30]) == [1, 1, 2, 1]
    delta = mem.ledger.snapshot().delta(before)
    assert delta.macro_cycles <= 4 * 3 * layout.field_width


def test_histogram_no_limits_single_bin():
    layout = FieldLayout(record_size=1)
    mem = make_loaded([9, 9, 9, 9], layout)
    assert mem.histogram(layout, []) == [4]


def test_histogram_equal_values_on_the_limit():
    layout = FieldLayout(record_size=2, field_width=2)
    mem = make_loaded([777] * 6, layout)
    assert mem.histogram(layout, [777]) == [0, 6]


def test_histogram_rejects_unsorted_limits():
    layout = FieldLayout(record_size=1)
    mem = make_loaded([1, 2, 3], layout)
    for bad in ([20, 10], [10, 10]):
        with pytest.raises(ArgumentError):
            mem.histogram(layout, bad)


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_histogram_matches_binning_oracle(data):
    width = data.draw(st.integers(1, 3), label="width")
    top = (1 << (8 * width)) - 1
    records = data.draw(
        st.lists(st.integers(0, top), min_size=1, max_size=30),
        label="records")
    limits = sorted(data.draw(
        st.sets(st.integers(0, top), max_size=5), label="limits"))
    layout = FieldLayout(record_size=width, field_width=width)
    mem = make_loaded(records, layout)
    before = mem.ledger.snapshot()
    counts = mem.histogram(layout, limits)
    delta = mem.ledger.snapshot().delta(before)
    assert counts == bin_oracle(records, limits)
    assert sum(counts) == len(records)
    assert delta.macro_cycles <= 4 * max(len(limits), 1) * width


# -- loading and validation ---------------------------------------------------


def test_load_records_roundtrip_and_accounting():
    layout = FieldLayout(record_size=5, field_offset=1, field_width=3)
    records = [0, 1, 0xABCDEF, 0x010203]
    mem = ComparableMemory(20)
    before = mem.ledger.snapshot()
    mem.load_records(records, layout)
    delta = mem.ledger.snapshot().delta(before)
    assert mem.records(layout) == records
    assert delta.exclusive_ops == len(records) * layout.field_width
    assert delta.macro_cycles == 0


def test_layout_validation():
    with pytest.raises(ConfigError):
        FieldLayout(record_size=2, field_offset=1, field_width=2)
    with pytest.raises(ConfigError):
        FieldLayout(record_size=0)
    mem = ComparableMemory(10)
    with pytest.raises(ConfigError):  # 10 PEs cannot hold 3-PE records
        mem.field_predicate(FieldLayout(record_size=3), "eq", 1)


def test_value_and_code_validation():
    layout = FieldLayout(record_size=2, field_width=2)
    mem = make_loaded([1, 2], layout)
    with pytest.raises(ArgumentError):
        mem.field_predicate(layout, "lt", 1 << 16)
    with pytest.raises(ArgumentError):
        mem.field_predicate(layout, "between", 5)
    with pytest.raises(ArgumentError):
        mem.load_records([1 << 16], layout)
    with pytest.raises(ArgumentError):
        CompareStep(mask=0x100, datum=0, cmp_code="eq")
    with pytest.raises(ArgumentError):
        CompareStep(mask=0, datum=0, cmp_code="eq", select_code="up")
