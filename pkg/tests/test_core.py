"""Framework contracts: activation, buses, match lines, and the cycle ledger.

These tests drive PeArray through a deliberately tiny in-test memory family
(one word register per PE, a copy-left broadcast) so the framework rules are
checked independently of any real memory family.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simdmem.core import CycleLedger, MatchReport, PeArray
from simdmem.errors import AddressError, ConfigError, InstructionError


class WordArray(PeArray):
    """Minimal family: one word per PE; instructions are ('copy_left',) or
    ('add_const', k); match drives from value equality via ('match_eq', v)."""

    def __init__(self, n_pe, **kw):
        super().__init__(n_pe, **kw)
        self.values = np.zeros(n_pe, dtype=np.int64)

    def _apply(self, instruction):
        op = instruction[0]
        if op == "copy_left":
            left = np.roll(self.values, 1)
            left[0] = self.fill
            self.values = np.where(self.active, left, self.values)
        elif op == "add_const":
            self.values = np.where(
                self.active, self.values + instruction[1], self.values)
        elif op == "match_eq":
            self.match = self.active & (self.values == instruction[1])
        else:
            raise InstructionError(op)

    def _exclusive_get(self, addr):
        return int(self.values[addr])

    def _exclusive_set(self, addr, value):
        self.values[addr] = value


def copy_left_scalar(values, active, fill, order):
    """Two-phase oracle evaluated one PE at a time in an arbitrary order."""
    pre = list(values)
    out = list(values)
    for i in order:
        if active[i]:
            out[i] = pre[i - 1] if i > 0 else fill
    return out


# ---------------------------------------------------------------------------
# ledger
# ---------------------------------------------------------------------------


def test_ledger_starts_zero_and_accumulates():
    led = CycleLedger()
    assert (led.macro_cycles, led.micro_cycles, led.exclusive_ops) == (0, 0, 0)
    led.charge_macro()
    led.charge_micro(24)
    led.charge_exclusive()
    assert (led.macro_cycles, led.micro_cycles, led.exclusive_ops) == (1, 24, 1)


def test_ledger_rejects_negative_charges():
    led = CycleLedger()
    with pytest.raises(ValueError):
        led.charge_macro(-1)
    with pytest.raises(ValueError):
        led.charge_micro(-3)


def test_ledger_snapshot_delta_linearity():
    arr = WordArray(8)
    s0 = arr.ledger.snapshot()
    arr.activate(0, 7, 1)
    arr.broadcast(("add_const", 1))
    s1 = arr.ledger.snapshot()
    arr.broadcast(("copy_left",))
    for i in range(4):
        arr.exclusive_write(i, i)
    s2 = arr.ledger.snapshot()
    part1 = s1.delta(s0)
    part2 = s2.delta(s1)
    total = s2.delta(s0)
    assert total.macro_cycles == part1.macro_cycles + part2.macro_cycles
    assert total.micro_cycles == part1.micro_cycles + part2.micro_cycles
    assert total.exclusive_ops == part1.exclusive_ops + part2.exclusive_ops
    assert total == s2.delta(s0)


# ---------------------------------------------------------------------------
# activation
# ---------------------------------------------------------------------------


def test_activate_strided_mask_and_single_macro_cycle():
    arr = WordArray(16)
    mask = arr.activate(0, 15, 4)
    assert sorted(np.flatnonzero(mask)) == [0, 4, 8, 12]
    assert arr.ledger.macro_cycles == 1


def test_activate_single_pe():
    arr = WordArray(16)
    mask = arr.activate(3, 3, 1)
    assert sorted(np.flatnonzero(mask)) == [3]
    assert arr.ledger.macro_cycles == 1


def test_activate_2d_even_lattice():
    arr = WordArray(64, dims=(8, 8))
    mask = arr.activate_2d((0, 7, 2), (0, 7, 2))
    got = sorted(np.flatnonzero(mask))
    want = sorted(y * 8 + x for x in range(0, 8, 2) for y in range(0, 8, 2))
    assert got == want
    assert len(got) == 16
    assert arr.ledger.macro_cycles == 1


def test_activate_out_of_bounds_raises_config_error():
    arr = WordArray(8)
    with pytest.raises(ConfigError):
        arr.activate(0, 8, 1)
    with pytest.raises(ConfigError):
        arr.activate(-1, 3, 1)
    arr2 = WordArray(64, dims=(8, 8))
    with pytest.raises(ConfigError):
        arr2.activate_2d((0, 8, 1), (0, 7, 1))


def test_activation_cost_independent_of_pe_count():
    for n in (4, 256, 4096):
        arr = WordArray(n)
        arr.activate(0, n - 1, 1)
        assert arr.ledger.macro_cycles == 1


def test_each_activate_recharges():
    arr = WordArray(8)
    arr.activate(0, 7, 1)
    arr.activate(0, 7, 1)
    assert arr.ledger.macro_cycles == 2


# ---------------------------------------------------------------------------
# broadcast: two-phase, masking, cost
# ---------------------------------------------------------------------------


def test_broadcast_copy_left_is_two_phase():
    arr = WordArray(6)
    for i in range(6):
        arr.exclusive_write(i, 10 + i)
    arr.activate(1, 5, 1)
    arr.broadcast(("copy_left",))
    # every active PE sees its left neighbor's PRE-step value
    assert list(arr.values) == [10, 10, 11, 12, 13, 14]


def test_broadcast_charges_one_macro_even_for_empty_mask():
    arr = WordArray(8)
    arr.activate(2, 1, 1)  # start > end → empty mask, still a decoded mask
    before = arr.values.copy()
    macros = arr.ledger.macro_cycles
    arr.broadcast(("add_const", 5))
    assert list(arr.values) == list(before)
    assert arr.ledger.macro_cycles == macros + 1


def test_masked_pes_never_change():
    arr = WordArray(12)
    for i in range(12):
        arr.exclusive_write(i, i)
    arr.activate(0, 11, 3)  # {0,3,6,9}
    arr.broadcast(("add_const", 100))
    for i in range(12):
        expect = i + 100 if i % 3 == 0 else i
        assert arr.values[i] == expect


def test_broadcast_before_activate_uses_empty_mask():
    arr = WordArray(4)
    arr.broadcast(("add_const", 1))
    assert list(arr.values) == [0, 0, 0, 0]


def test_unknown_instruction_raises():
    arr = WordArray(4)
    arr.activate(0, 3, 1)
    with pytest.raises(InstructionError):
        arr.broadcast(("no_such_op",))


@settings(max_examples=150, deadline=None)
@given(
    data=st.lists(st.integers(-50, 50), min_size=2, max_size=24),
    seed=st.integers(0, 2**32 - 1),
    triple=st.tuples(st.integers(0, 23), st.integers(0, 23), st.integers(1, 5)),
)
def test_two_phase_result_is_order_independent(data, seed, triple):
    n = len(data)
    start, end, carry = triple
    start, end = start % n, end % n
    arr = WordArray(n)
    for i, v in enumerate(data):
        arr.exclusive_write(i, v)
    mask = arr.activate(start, end, carry)
    arr.broadcast(("copy_left",))
    order = list(range(n))
    rng = np.random.default_rng(seed)
    rng.shuffle(order)
    expect = copy_left_scalar(data, mask, 0, order)
    assert list(arr.values) == expect


# ---------------------------------------------------------------------------
# exclusive bus
# ---------------------------------------------------------------------------


def test_exclusive_read_after_write():
    arr = WordArray(16)
    arr.exclusive_write(7, 0xAB)
    assert arr.exclusive_read(7) == 0xAB


def test_bulk_load_costs_exclusive_ops_not_macro_cycles():
    arr = WordArray(16)
    for i in range(16):
        arr.exclusive_write(i, i + 1)
    assert arr.ledger.exclusive_ops == 16
    assert arr.ledger.macro_cycles == 0


def test_exclusive_write_outside_mask_does_not_disturb_broadcasts():
    arr = WordArray(8)
    arr.activate(0, 3, 1)
    arr.broadcast(("add_const", 1))
    arr.exclusive_write(6, 99)
    arr.broadcast(("add_const", 1))
    assert list(arr.values[:4]) == [2, 2, 2, 2]
    assert arr.values[6] == 99
    assert arr.values[4] == 0 and arr.values[5] == 0 and arr.values[7] == 0


def test_exclusive_out_of_bounds_raises_address_error():
    arr = WordArray(4)
    with pytest.raises(AddressError):
        arr.exclusive_read(4)
    with pytest.raises(AddressError):
        arr.exclusive_write(-1, 0)


# ---------------------------------------------------------------------------
# match lines
# ---------------------------------------------------------------------------


def test_enumerate_and_count_matches():
    arr = WordArray(12)
    arr.exclusive_write(2, 7)
    arr.exclusive_write(9, 7)
    arr.activate(0, 11, 1)
    arr.broadcast(("match_eq", 7))
    base = arr.ledger.macro_cycles
    report = arr.enumerate_matches()
    assert isinstance(report, MatchReport)
    assert report.matched == [2, 9]
    assert report.count == 2
    assert arr.ledger.macro_cycles == base + 2  # one per reported address
    assert arr.count_matches() == 2
    assert arr.ledger.macro_cycles == base + 3  # parallel counter: one cycle


def test_no_matches_is_empty_and_free_to_enumerate():
    arr = WordArray(8)
    arr.activate(0, 7, 1)
    arr.broadcast(("match_eq", 123))
    base = arr.ledger.macro_cycles
    report = arr.enumerate_matches()
    assert report.matched == [] and report.count == 0
    assert arr.ledger.macro_cycles == base


def test_all_match_ledger_accounting():
    n = 10
    arr = WordArray(n)
    arr.activate(0, n - 1, 1)
    arr.broadcast(("match_eq", 0))
    base = arr.ledger.macro_cycles
    assert arr.count_matches() == n
    assert arr.ledger.macro_cycles == base + 1
    report = arr.enumerate_matches()
    assert report.matched == list(range(n))
    assert arr.ledger.macro_cycles == base + 1 + n


def test_first_match_priority_order():
    arr = WordArray(8)
    arr.exclusive_write(5, 3)
    arr.exclusive_write(1, 3)
    arr.activate(0, 7, 1)
    arr.broadcast(("match_eq", 3))
    base = arr.ledger.macro_cycles
    assert arr.first_match() == 1
    assert arr.ledger.macro_cycles == base + 1
    arr.broadcast(("match_eq", 999))
    assert arr.first_match() is None


# ---------------------------------------------------------------------------
# edges and determinism
# ---------------------------------------------------------------------------


def test_edge_mask_1d():
    arr = WordArray(5)
    assert list(np.flatnonzero(arr.edge_mask(-1))) == [0]
    assert list(np.flatnonzero(arr.edge_mask(+1))) == [4]


def test_edge_mask_2d():
    arr = WordArray(12, dims=(4, 3))
    assert sorted(np.flatnonzero(arr.edge_mask((-1, 0)))) == [0, 4, 8]
    assert sorted(np.flatnonzero(arr.edge_mask((+1, 0)))) == [3, 7, 11]
    assert sorted(np.flatnonzero(arr.edge_mask((0, -1)))) == [0, 1, 2, 3]
    assert sorted(np.flatnonzero(arr.edge_mask((0, +1)))) == [8, 9, 10, 11]


def test_copy_left_fill_word_at_edge():
    arr = WordArray(4, fill=77)
    for i in range(4):
        arr.exclusive_write(i, i + 1)
    arr.activate(0, 3, 1)
    arr.broadcast(("copy_left",))
    assert list(arr.values) == [77, 1, 2, 3]


def test_determinism_state_and_ledger():
    def run():
        arr = WordArray(10)
        for i in range(10):
            arr.exclusive_write(i, 3 * i + 1)
        arr.activate(0, 9, 2)
        arr.broadcast(("add_const", 4))
        arr.broadcast(("copy_left",))
        arr.broadcast(("match_eq", 5))
        rep = arr.enumerate_matches()
        return list(arr.values), rep.matched, arr.ledger.snapshot()

    a, b = run(), run()
    assert a == b


def test_dims_must_factor_pe_count():
    with pytest.raises(ConfigError):
        WordArray(10, dims=(3, 3))
