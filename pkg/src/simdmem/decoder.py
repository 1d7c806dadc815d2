"""Strided activation decoder.

Activation triples (start, end, carry) select the PE addresses

    { a : start <= a <= end,  (a - start) is a multiple of carry }

with carry = 0 selecting only `start`. The decode is built from three
hardware-shaped stages, each of which is independently testable:

1. carry_pattern: bit a is set iff a is a non-negative multiple of carry.
   Structurally each output line ORs a one-hot comparator with the lines of
   its proper divisors, which is why prime lines reuse only line 1.
2. parallel_shift: moves the pattern up by `start` lines, zero-filling below.
3. all_line_decode: bit a set iff a <= end, via the binary recursion on the
   address MSB (low half ORs the MSB, high half ANDs it).

general_decode ANDs stage 2 with stage 3. For carry = 1 a cheaper
unit_stride_decode composes two all-line decoders instead (one complemented
on the start side) and must be bit-identical to the general path.

Masks are plain Python ints (bit a = PE a). Decoder widths are powers of
two; arbitrary array sizes round the width up and truncate the result.
"""

from __future__ import annotations

from simdmem.errors import AddressError, ArgumentError


def _check_width(width: int) -> None:
    if width < 1 or (width & (width - 1)) != 0:
        raise ArgumentError(f"decoder width must be a power of two, got {width}")


def decoder_width(n_lines: int) -> int:
    """Smallest power of two >= n_lines."""
    if n_lines < 1:
        raise ArgumentError(f"need at least one line, got {n_lines}")
    return 1 << (n_lines - 1).bit_length()


def carry_pattern(carry: int, width: int) -> int:
    """Stride pattern: bit a set iff a is a non-negative multiple of carry."""
    _check_width(width)
    if carry < 0:
        raise ArgumentError(f"carry must be >= 0, got {carry}")
    bits = 1
    if carry > 0:
        for a in range(carry, width, carry):
            bits |= 1 << a
    return bits


def parallel_shift(pattern: int, shift: int, width: int) -> int:
    """Shift a pattern toward higher addresses, zero-filling from below."""
    _check_width(width)
    if shift < 0:
        raise ArgumentError(f"shift must be >= 0, got {shift}")
    return (pattern << shift) & ((1 << width) - 1)


def all_line_decode(end: int, width: int) -> int:
    """Upper-bound decoder: bit a set iff a <= end.

    Implemented as the structural recursion on the address MSB rather than
    by closed formula; the closed form is the test oracle.
    """
    _check_width(width)
    if not 0 <= end < width:
        raise AddressError(f"end address {end} outside decoder width {width}")
    return _all_line(end, width)


def _all_line(end: int, width: int) -> int:
    if width == 1:
        return 1
    half = width >> 1
    sub = _all_line(end & (half - 1), half)
    if end & half:
        # MSB set: every low line fires, high lines follow the sub-decode.
        return ((1 << half) - 1) | (sub << half)
    # MSB clear: low lines follow the sub-decode, high lines stay off.
    return sub


def general_decode(start: int, end: int, carry: int, width: int) -> int:
    """Full triple decode: shifted stride pattern AND upper-bound decode."""
    _check_width(width)
    for name, addr in (("start", start), ("end", end)):
        if not 0 <= addr < width:
            raise AddressError(f"{name} address {addr} outside decoder width {width}")
    return parallel_shift(carry_pattern(carry, width), start, width) & all_line_decode(
        end, width
    )


def unit_stride_decode(start: int, end: int, width: int) -> int:
    """carry = 1 fast path: two upper-bound decoders, start side complemented."""
    _check_width(width)
    if not 0 <= start < width:
        raise AddressError(f"start address {start} outside decoder width {width}")
    full = (1 << width) - 1
    at_least = full if start == 0 else full ^ all_line_decode(start - 1, width)
    return all_line_decode(end, width) & at_least


def activation_mask(start: int, end: int, carry: int, n_pe: int) -> int:
    """Decode a triple for an array of n_pe PEs (width rounds up, mask truncates)."""
    if not 0 <= start < n_pe:
        raise AddressError(f"start address {start} outside array of {n_pe} PEs")
    if not 0 <= end < n_pe:
        raise AddressError(f"end address {end} outside array of {n_pe} PEs")
    width = decoder_width(n_pe)
    if carry == 1:
        mask = unit_stride_decode(start, end, width)
    else:
        mask = general_decode(start, end, carry, width)
    return mask & ((1 << n_pe) - 1)
