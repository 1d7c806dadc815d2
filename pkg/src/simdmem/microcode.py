"""Word-level macro operations expanded into bit-serial micro programs.

Every macro is a fixed sequence of MicroInstructions processing the word
one bit column at a time, least significant first. The op register is
the implicit left operand and result of word arithmetic; `reg` operands
name ("data", j) or the PE's own ("neighbor",) register.

Register conventions (the macro-level programming contract):

* The highest data register (index n_data_regs - 1) is the arithmetic
  scratch: add, sub, abs_diff, compare_lt, compare_eq, threshold,
  maximum and minimum overwrite it, and naming it as their operand
  raises.
* abs_diff and compare_eq also overwrite the neighbor register, so
  their operand must be a plain data register.
* The s bit is 0 on entry to every macro and 0 on exit (it is the
  bodies' constant source and no template touches it); c and the
  scratch register carry no meaning between macros.
* compare_lt, compare_eq and threshold leave m = predicate, and
  select_if stores op into its destination exactly where m is set —
  copy (op to register) and select_if preserve m, everything else may
  clobber it.

Word arithmetic (add, sub, compare_lt, maximum, minimum) also accepts a
("neighbor_of", direction) operand — the named neighbor's register read
live. That is sound because none of those expansions writes any
neighbor register, so the value is constant for the whole macro; it is
what lets a stencil accumulate a neighbor's word in a single macro.

Cost model (micro steps, word width W):

    copy op->reg   W       copy reg->op  2W      exchange   2W + 1
    load_immediate 2W      select_if     W       read_neighbor 2W
    (3W into a data register)
    add  12W - 7           sub           12W + 2
    compare_lt 24W - 4     compare_eq    12W + 3
    threshold  24W - 4     abs_diff      30W + 8  (14 when W = 1)
    maximum / minimum 25W - 4
    identify 1             clear_flags 2          invert_m 2
    flag_word  W + 4

No expansion exceeds MACRO_BUDGET * W steps.

Flag macros: identify latches the match line from m (value=0) or at
every active PE (value=1) without touching any register; clear_flags
zeroes both m and the match line; invert_m complements m (through c);
flag_word materializes m as a 0/1 word in op while preserving m itself
(parked in c for the duration), which is how a predicate becomes data
that the exclusive bus can read out.
maximum/minimum keep the larger/smaller of op and the operand in op,
by zeroing the subtraction's difference on one side of the borrow and
adding the operand back.

The arithmetic core is a 12-step full-adder column over (op bit, operand
bit, carry in c) built from three moves: an OR is written into the op
bit and then carved down to XOR where the AND product holds, the AND
products are formed by a gated self-read of the scratch bit (writing
op's pre-step value into the scratch exactly where the scratch itself
gates), and the carry is accumulated in c from those products.
Subtraction is the same column with the operand literal negated and the
carry seeded to 1; comparisons subtract, add back, and read the carry;
abs_diff conditionally complements via an all-ones mask sprayed into
the neighbor register.
"""

from __future__ import annotations

from dataclasses import dataclass

from .computable import MicroInstruction
from .errors import ArgumentError, InstructionError

__all__ = ["MacroOp", "expand", "macro_budget", "MACRO_BUDGET", "OPCODES"]

MACRO_BUDGET = 35

OPCODES = ("copy", "exchange", "add", "sub", "abs_diff", "compare_lt",
           "compare_eq", "threshold", "select_if", "load_immediate",
           "read_neighbor", "multiply", "maximum", "minimum", "identify",
           "clear_flags", "invert_m", "flag_word")


def macro_budget(opcode: str, width: int) -> int:
    """Hard ceiling on the expansion length of one macro: linear in the
    word width for everything except the shift-add multiply, which is
    quadratic."""
    if opcode == "multiply":
        return MACRO_BUDGET * width * width
    return MACRO_BUDGET * width


@dataclass(frozen=True)
class MacroOp:
    """One word-level operation for ComputableMemory.run_macro."""

    opcode: str
    src: object = None
    dst: object = None
    reg: object = None
    value: int = 0
    direction: str = "left"


def _mi(condition="s_bit", negate=False, C=0, D=0, q=0,
        reg=("data", 0), p=0, wb=()):
    return MicroInstruction(
        condition=condition, negate=negate, compare_bit=C, datum_bit=D,
        op_bit_index=q, reg=reg, reg_bit_index=p, writeback=frozenset(wb))


# Condition terms, relying on s = 0: _T1 is the constant 1, _T0 the
# constant 0, _tconst(b) the broadcast bit b, _treg a register literal.
_T1 = dict(condition="s_bit", negate=True)
_T0 = dict(condition="s_bit")


def _tconst(bit):
    return dict(condition="s_bit", negate=True, C=1, D=bit)


def _treg(sel, i, negate=False):
    return dict(condition="reg_bit", reg=sel, p=i, negate=negate)


def _neg(term):
    flipped = dict(term)
    flipped["negate"] = not flipped.get("negate", False)
    return flipped


def _xor_column(i, y_term):
    """op[i] ^= y over 5 steps; exits c = old op[i] AND y, m = 0."""
    return [
        _mi(condition="op_bit", q=i, wb={"load_m"}),
        _mi(**y_term, wb={"load_m", "c_if_b"}),
        _mi(**_T0, q=i, wb={"load_m", "op_if_b"}),
        _mi(**_neg(y_term), wb={"c_if_b"}),
        _mi(condition="c_bit", q=i, wb={"op_if_b"}),
    ]


def _add_column(i, y_term, scratch):
    """Full-adder column: op[i], c := sum, carry of (op[i], y, c).

    12 steps; uses scratch bit i; entry m is irrelevant, exit m = 0.
    """
    t = _treg(scratch, i)
    return [
        # Stash the op bit, then bring the carry into the op bit.
        _mi(**_T1, q=i, reg=scratch, p=i, wb={"load_m", "reg_if_b"}),
        _mi(condition="c_bit", wb={"load_m"}),
        _mi(**_T1, q=i, wb={"op_if_b"}),
        # op[i] := carry XOR y, leaving their AND in c.
        _mi(**y_term, wb={"load_m"}),
        _mi(**_T0, q=i, wb={"load_m", "op_if_b"}),
        _mi(**_neg(y_term), wb={"c_if_b"}),
        _mi(condition="c_bit", q=i, wb={"load_m", "op_if_b"}),
        # One step both ORs the stashed bit into op and turns the
        # scratch into the product stash AND (carry XOR y); the product
        # then completes the carry and carves the sum down from the OR.
        _mi(**t, wb={"load_m"}),
        _mi(**t, q=i, wb={"op_if_b", "reg_if_b"}),
        _mi(**t, wb={"load_m"}),
        _mi(**_T0, wb={"load_m", "c_if_b"}),
        _mi(**t, q=i, wb={"op_if_b"}),
    ]


def _set_carry(bit):
    """c := bit at every active PE (2 steps)."""
    return [
        _mi(**_tconst(bit), wb={"load_m"}),
        _mi(**_T1, wb={"c_if_b"}),
    ]


def _add_body(width, term_of, scratch):
    """op := op + operand; c exits as the carry out."""
    steps = list(_xor_column(0, term_of(0)))
    for i in range(1, width):
        steps += _add_column(i, term_of(i), scratch)
    return steps


def _sub_body(width, term_of, scratch):
    """op := op - operand; c exits 1 exactly when op >= operand held."""
    steps = _set_carry(1)
    for i in range(width):
        steps += _add_column(i, _neg(term_of(i)), scratch)
    return steps


class _Expansion:
    """Validation context for one macro expansion."""

    def __init__(self, width, n_data_regs, directions):
        self.width = width
        self.n_data_regs = n_data_regs
        self.directions = directions
        self.scratch = ("data", n_data_regs - 1)

    def check_register(self, sel, what):
        if (isinstance(sel, tuple) and len(sel) == 2 and sel[0] == "data"
                and isinstance(sel[1], int)):
            if not 0 <= sel[1] < self.n_data_regs:
                raise InstructionError(
                    f"{what} names data register {sel[1]} of "
                    f"{self.n_data_regs}")
            return ("data", sel[1])
        if sel == ("neighbor",):
            return sel
        raise InstructionError(f"{what} {sel!r} is not a register")

    def check_operand(self, sel, opcode, *, data_only=False):
        if (isinstance(sel, tuple) and len(sel) == 2
                and sel[0] == "neighbor_of"):
            if data_only:
                raise InstructionError(
                    f"{opcode} needs its operand in a data register, "
                    f"not a neighbor's")
            if sel[1] not in self.directions:
                raise InstructionError(
                    f"{opcode} operand direction {sel[1]!r} not in "
                    f"{self.directions}")
            return ("neighbor_of", sel[1])
        sel = self.check_register(sel, f"{opcode} operand")
        if sel == self.scratch:
            raise InstructionError(
                f"{opcode} operand collides with the arithmetic scratch "
                f"register {self.scratch}")
        if data_only and sel == ("neighbor",):
            raise InstructionError(
                f"{opcode} overwrites the neighbor register and needs "
                f"its operand in a data register")
        return sel

    def check_value(self, value):
        if not 0 <= value < (1 << self.width):
            raise ArgumentError(
                f"immediate {value} outside the {self.width}-bit word")
        return value

    def term_of(self, operand):
        if isinstance(operand, int):
            return lambda i: _tconst((operand >> i) & 1)
        return lambda i: _treg(operand, i)


def _copy_steps(ctx, src, dst):
    if src == "op":
        dst = ctx.check_register(dst, "copy destination")
        return [_mi(**_T1, q=i, reg=dst, p=i, wb={"reg_if_b"})
                for i in range(ctx.width)]
    if dst == "op":
        src = ctx.check_register(src, "copy source")
        steps = []
        for i in range(ctx.width):
            steps.append(_mi(**_treg(src, i), wb={"load_m"}))
            steps.append(_mi(**_T1, q=i, wb={"op_if_b"}))
        return steps
    raise InstructionError(
        "copy moves between the op register and a register")


def _expand_copy(mac, ctx):
    return _copy_steps(ctx, mac.src, mac.dst)


def _expand_exchange(mac, ctx):
    reg = ctx.check_register(mac.reg, "exchange register")
    steps = [_mi(**_T1, wb={"save_m"})]
    for i in range(ctx.width):
        steps.append(_mi(**_treg(reg, i), q=i, wb={"load_m", "reg_if_b"}))
        steps.append(_mi(**_T1, q=i, wb={"save_m", "op_if_b"}))
    return steps


def _expand_load_immediate(mac, ctx):
    value = ctx.check_value(mac.value)
    steps = []
    for i in range(ctx.width):
        steps.append(_mi(**_tconst((value >> i) & 1), wb={"load_m"}))
        steps.append(_mi(**_T1, q=i, wb={"op_if_b"}))
    return steps


def _expand_select_if(mac, ctx):
    dst = ctx.check_register(mac.dst, "select_if destination")
    return [_mi(**_T0, q=i, reg=dst, p=i, wb={"reg_if_b"})
            for i in range(ctx.width)]


def _expand_read_neighbor(mac, ctx):
    if mac.direction not in ctx.directions:
        raise InstructionError(
            f"read_neighbor direction {mac.direction!r} not in "
            f"{ctx.directions}")
    src = ("neighbor_of", mac.direction)
    steps = []
    for i in range(ctx.width):
        steps.append(_mi(**_treg(src, i), wb={"load_m"}))
        steps.append(_mi(**_T1, q=i, wb={"op_if_b"}))
    if mac.dst not in (None, "op"):
        steps += _copy_steps(ctx, "op", mac.dst)
    return steps


def _expand_add(mac, ctx):
    operand = ctx.check_operand(mac.reg, "add")
    return _add_body(ctx.width, ctx.term_of(operand), ctx.scratch)


def _expand_sub(mac, ctx):
    operand = ctx.check_operand(mac.reg, "sub")
    return _sub_body(ctx.width, ctx.term_of(operand), ctx.scratch)


def _expand_compare_lt(mac, ctx):
    operand = ctx.check_operand(mac.reg, "compare_lt")
    term = ctx.term_of(operand)
    # Subtract, add back to restore op; the add-back's carry out is 1
    # exactly when the subtraction wrapped, i.e. when op < operand.
    return (_sub_body(ctx.width, term, ctx.scratch)
            + _add_body(ctx.width, term, ctx.scratch)
            + [_mi(condition="c_bit", wb={"load_m"})])


def _expand_threshold(mac, ctx):
    value = ctx.check_value(mac.value)
    term = ctx.term_of(value)
    return (_sub_body(ctx.width, term, ctx.scratch)
            + _add_body(ctx.width, term, ctx.scratch)
            + [_mi(condition="c_bit", negate=True, wb={"load_m"})])


def _expand_compare_eq(mac, ctx):
    operand = ctx.check_operand(mac.reg, "compare_eq", data_only=True)
    term = ctx.term_of(operand)
    nbr = ("neighbor",)
    steps = []
    for i in range(ctx.width):
        # XOR the operand in, capture the difference bit, XOR it back out.
        steps += _xor_column(i, term(i))
        steps.append(_mi(**_T1, q=i, reg=nbr, p=i, wb={"reg_if_b"}))
        steps += _xor_column(i, term(i))
    # OR-scan the captured bits, then invert through c: m = all-equal.
    steps.append(_mi(**_T0, wb={"load_m"}))
    for i in range(ctx.width):
        steps.append(_mi(**_treg(nbr, i), wb={"save_m"}))
    steps.append(_mi(**_T1, wb={"c_if_b"}))
    steps.append(_mi(condition="c_bit", negate=True, wb={"load_m"}))
    return steps


def _expand_abs_diff(mac, ctx):
    operand = ctx.check_operand(mac.reg, "abs_diff", data_only=True)
    term = ctx.term_of(operand)
    steps = _sub_body(ctx.width, term, ctx.scratch)
    if ctx.width == 1:
        return steps            # one-bit |a - b| is already a XOR b
    nbr = ("neighbor",)
    # m := borrow, then spray it into every neighbor-register bit via
    # op bit 0 (parking that bit in nbr[0] and swapping it back).
    steps.append(_mi(condition="c_bit", negate=True, wb={"load_m"}))
    steps.append(_mi(**_T1, q=0, reg=nbr, p=0, wb={"reg_if_b"}))
    steps.append(_mi(**_T1, q=0, wb={"op_if_b"}))
    for i in range(1, ctx.width):
        steps.append(_mi(**_T1, q=0, reg=nbr, p=i, wb={"reg_if_b"}))
    steps.append(_mi(**_treg(nbr, 0), wb={"load_m"}))
    steps.append(_mi(**_T1, q=0, reg=nbr, p=0, wb={"op_if_b", "reg_if_b"}))
    # op := (op XOR mask) - mask, which is op when the mask is zero and
    # the two's-complement negation when the mask is all ones.
    for i in range(ctx.width):
        steps += _xor_column(i, _treg(nbr, i))
    steps += _sub_body(ctx.width, ctx.term_of(nbr), ctx.scratch)
    return steps


def _expand_multiply(mac, ctx):
    """Shift-add multiply: op := op * operand (mod 2**W).

    The multiplicand is parked in the neighbor register, the running
    product lives in data register k-2, and op serves as the bus: each
    round builds the shifted multiplicand in op, zeroes it where the
    multiplier bit is clear, and adds it into the product.
    """
    if ctx.n_data_regs < 3:
        raise InstructionError(
            "multiply needs at least 3 data registers (operand, product "
            "scratch, arithmetic scratch)")
    acc = ("data", ctx.n_data_regs - 2)
    operand = ctx.check_operand(mac.reg, "multiply", data_only=True)
    if operand == acc:
        raise InstructionError(
            f"multiply operand collides with the product scratch "
            f"register {acc}")
    nbr = ("neighbor",)
    width = ctx.width
    steps = _copy_steps(ctx, "op", nbr)
    steps += _expand_load_immediate(
        MacroOp("load_immediate", value=0), ctx)
    steps += _copy_steps(ctx, "op", acc)
    for i in range(width):
        # op := multiplicand << i, then op := 0 where multiplier bit i
        # is clear, so the following add is unconditional.
        steps.append(_mi(**_T0, wb={"load_m"}))
        for j in range(i):
            steps.append(_mi(**_T1, q=j, wb={"op_if_b"}))
        for j in range(i, width):
            steps.append(_mi(**_treg(nbr, j - i), wb={"load_m"}))
            steps.append(_mi(**_T1, q=j, wb={"op_if_b"}))
        steps.append(_mi(**_T0, wb={"load_m"}))
        for j in range(width):
            steps.append(_mi(**_neg(_treg(operand, i)), q=j,
                             wb={"op_if_b"}))
        steps += _expand_exchange(MacroOp("exchange", reg=acc), ctx)
        steps += _add_body(width, ctx.term_of(acc), ctx.scratch)
        if i < width - 1:
            steps += _copy_steps(ctx, "op", acc)
    return steps


def _expand_extremum(mac, ctx):
    operand = ctx.check_operand(mac.reg, mac.opcode)
    term = ctx.term_of(operand)
    steps = _sub_body(ctx.width, term, ctx.scratch)
    # The borrow-complement c says op >= operand; zero the difference on
    # the losing side, then add the operand back: op + 0 where it wins,
    # or the wrapped difference canceling back to op where it loses.
    steps.append(_mi(**_T0, wb={"load_m"}))
    keep_high = mac.opcode == "maximum"
    for i in range(ctx.width):
        steps.append(_mi(condition="c_bit", negate=keep_high, q=i,
                         wb={"op_if_b"}))
    steps += _add_body(ctx.width, term, ctx.scratch)
    return steps


def _expand_flag_word(mac, ctx):
    """op := m as a 0/1 word; m itself survives (parked in c)."""
    steps = [_mi(**_T1, wb={"c_if_b"}),             # c := m
             _mi(**_T0, wb={"load_m"})]             # m := 0
    for i in range(ctx.width):
        steps.append(_mi(**_T1, q=i, wb={"op_if_b"}))   # op[i] := 0
    steps.append(_mi(condition="c_bit", wb={"load_m"})) # m := flag back
    steps.append(_mi(**_T1, q=0, wb={"op_if_b"}))       # op[0] := flag
    return steps


def _expand_identify(mac, ctx):
    if mac.value not in (0, 1):
        raise ArgumentError(
            "identify raises the match line from m (value 0) or at "
            "every active PE (value 1)")
    return [_mi(**(_T1 if mac.value else _T0))]


def _expand_clear_flags(mac, ctx):
    return [_mi(**_T0, wb={"load_m"}), _mi(**_T0)]


def _expand_invert_m(mac, ctx):
    return [_mi(**_T1, wb={"c_if_b"}),
            _mi(condition="c_bit", negate=True, wb={"load_m"})]


_EXPANDERS = {
    "copy": _expand_copy,
    "exchange": _expand_exchange,
    "add": _expand_add,
    "sub": _expand_sub,
    "abs_diff": _expand_abs_diff,
    "compare_lt": _expand_compare_lt,
    "compare_eq": _expand_compare_eq,
    "threshold": _expand_threshold,
    "select_if": _expand_select_if,
    "load_immediate": _expand_load_immediate,
    "read_neighbor": _expand_read_neighbor,
    "multiply": _expand_multiply,
    "maximum": _expand_extremum,
    "minimum": _expand_extremum,
    "identify": _expand_identify,
    "clear_flags": _expand_clear_flags,
    "invert_m": _expand_invert_m,
    "flag_word": _expand_flag_word,
}


def expand(macro: MacroOp, *, width: int, n_data_regs: int,
           directions) -> tuple:
    """Fixed micro program for one macro; raises InstructionError for
    opcodes outside this microarchitecture."""
    expander = _EXPANDERS.get(macro.opcode)
    if expander is None:
        raise InstructionError(f"no expansion for opcode {macro.opcode!r}")
    ctx = _Expansion(width, n_data_regs, tuple(directions))
    steps = tuple(expander(macro, ctx))
    assert len(steps) <= macro_budget(macro.opcode, width)
    return steps
