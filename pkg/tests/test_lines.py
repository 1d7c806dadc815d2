"""Line detection against signed-sum oracles and pinned walk facts."""

import math

import pytest

from simdmem.algorithms.common import load_op_words
from simdmem.algorithms.lines import (build_slope_set, detect_all_lines,
                                      detect_line_segment, midpoint_path)
from simdmem.computable import ComputableMemory
from simdmem.errors import ArgumentError
from simdmem.rng import SplitMix64


def image_memory(grid, width=16):
    ny, nx = len(grid), len(grid[0])
    mem = ComputableMemory(nx * ny, width=width, dims=(nx, ny))
    load_op_words(mem, [grid[y][x] for y in range(ny) for x in range(nx)])
    return mem


def signed_sum_oracle(grid, cells, px, py):
    """Direct-indexing evaluation of the signed cell sum at one pixel."""
    return sum(s * grid[py + cy][px + cx] for cx, cy, s in cells)


def check_valid_pixels(grid, report):
    nx = len(grid[0])
    cells = report.params["signed_cells"]
    values, valid = report.result["values"], report.result["valid"]
    for i, ok in enumerate(valid):
        if ok:
            x, y = i % nx, i // nx
            assert values[i] == signed_sum_oracle(grid, cells, x, y), (x, y)


def segment_distance(c, mx, my):
    """Distance from cell center c to the segment (0,0)-(mx,my)."""
    t = (c[0] * mx + c[1] * my) / (mx * mx + my * my)
    t = min(1.0, max(0.0, t))
    return math.hypot(c[0] - t * mx, c[1] - t * my)


# ---------------------------------------------------------------- paths

def test_midpoint_path_shape_and_proximity():
    for mx in range(1, 8):
        for my in range(1, 8):
            path = midpoint_path(mx, my)
            assert path[0] == (0, 0) and path[-1] == (mx, my)
            assert len(path) == mx + my + 1
            for a, b in zip(path, path[1:]):
                step = (b[0] - a[0], b[1] - a[1])
                assert step in ((1, 0), (0, 1))
            # every visited cell hugs the ideal segment
            for c in path:
                assert segment_distance(c, mx, my) <= math.sqrt(2) / 2 + 1e-9


def test_midpoint_path_pinned_examples():
    assert midpoint_path(4, 3) == [(0, 0), (1, 0), (1, 1), (2, 1),
                                   (2, 2), (3, 2), (3, 3), (4, 3)]
    # corner crossings threaded alternately x-first / y-first
    assert midpoint_path(3, 3) == [(0, 0), (1, 0), (1, 1), (1, 2),
                                   (2, 2), (3, 2), (3, 3)]


# -------------------------------------------------- diagonal detectors

def test_slope_4_3_synthetic_edge_scores_plus_three():
    # intensity 1 strictly left of the ideal slope-3/4 line, 0 elsewhere
    nx, ny = 12, 10
    grid = [[1 if 4 * y - 3 * x > 0 else 0 for x in range(nx)]
            for y in range(ny)]
    report = detect_line_segment(image_memory(grid), 4, 3)
    assert report.params["n_add"] == 3
    assert report.params["n_sub"] == 3
    assert report.result["values"][0] == 3          # origin pixel
    assert report.result["valid"][0]
    check_valid_pixels(grid, report)


def test_constant_image_balances_for_the_balanced_walk():
    grid = [[7] * 9 for _ in range(8)]
    report = detect_line_segment(image_memory(grid), 4, 3)
    nx = 9
    for i, ok in enumerate(report.result["valid"]):
        if ok:
            assert report.result["values"][i] == 0
    # unbalanced walks shift a constant image by (adds - subs) * value
    report = detect_line_segment(image_memory(grid), 3, 3)
    shift = (report.params["n_add"] - report.params["n_sub"]) * 7
    for i, ok in enumerate(report.result["valid"]):
        if ok:
            assert report.result["values"][i] == shift


def test_diagonal_detectors_match_signed_sum_oracle():
    rng = SplitMix64(0x11E5)
    for mx, my in ((1, 1), (2, 1), (1, 3), (4, 3), (3, 3), (2, 4)):
        nx, ny = 11, 9
        grid = [[int(rng.bounded(40)) for _ in range(nx)]
                for _ in range(ny)]
        report = detect_line_segment(image_memory(grid), mx, my)
        check_valid_pixels(grid, report)
        # validity box matches the walked area
        for i, ok in enumerate(report.result["valid"]):
            x, y = i % nx, i // nx
            assert ok == (x + mx <= nx - 1 and y + my <= ny - 1)


# ------------------------------------------------------ axis detectors

def test_horizontal_detector_finds_a_rising_edge():
    nx, ny, k, L = 12, 9, 4, 5
    grid = [[9 if y >= k else 0 for _ in range(nx)] for y in range(ny)]
    report = detect_line_segment(image_memory(grid), L, 0)
    check_valid_pixels(grid, report)
    values, valid = report.result["values"], report.result["valid"]
    best = max(abs(values[i]) for i in range(len(values)) if valid[i])
    assert best == 9 * L
    for i, ok in enumerate(valid):
        if ok and abs(values[i]) == best:
            assert i // nx in (k - 1, k)     # straddles the step
            assert values[i] > 0             # rising along +y


def test_vertical_detector_signs_and_oracle():
    rng = SplitMix64(0xA71)
    nx, ny, L = 10, 11, 4
    grid = [[int(rng.bounded(30)) for _ in range(nx)] for _ in range(ny)]
    report = detect_line_segment(image_memory(grid), 0, L)
    check_valid_pixels(grid, report)
    # left layer brighter -> positive
    bright_left = [[9 if x <= 3 else 0 for x in range(nx)]
                   for _ in range(ny)]
    report = detect_line_segment(image_memory(bright_left), 0, L)
    values, valid = report.result["values"], report.result["valid"]
    i = 4 + 2 * nx                           # pixel just right of the edge
    assert valid[i] and values[i] == 9 * L


# ------------------------------------------------------------- cycles

def test_detector_broadcasts_independent_of_image_size():
    rng = SplitMix64(0xC4C)
    seen_diag, seen_axis = set(), set()
    for nx, ny in ((16, 12), (32, 24)):
        vals = [int(rng.bounded(50)) for _ in range(nx * ny)]
        mem = ComputableMemory(nx * ny, width=16, dims=(nx, ny))
        load_op_words(mem, vals)
        seen_diag.add(detect_line_segment(mem, 4, 3)
                      .ledger_delta.macro_cycles)
        seen_axis.add(detect_line_segment(mem, 5, 0)
                      .ledger_delta.macro_cycles)
    assert seen_diag == {3 * (4 + 3) + 4}
    assert seen_axis == {3 * 5 + 5}


# ---------------------------------------------------------- slope sets

def test_slope_set_pinned_members():
    assert build_slope_set(1) == [(1, 0), (1, 1), (0, 1)]
    five = build_slope_set(5)
    assert len(five) == 8
    for member in ((5, 0), (4, 3), (3, 4), (0, 5)):
        assert member in five
    assert five == sorted(five, key=lambda m: math.atan2(m[1], m[0]))


def test_slope_set_angular_resolution_and_size():
    for D in range(1, 13):
        members = build_slope_set(D)
        assert D <= len(members) <= 2 * D + 2
        angles = [math.atan2(my, mx) for mx, my in members]
        assert angles[0] == 0.0 and abs(angles[-1] - math.pi / 2) < 1e-12
        for a, b in zip(angles, angles[1:]):
            assert b - a <= math.sqrt(2) / D + 0.01


def test_slope_set_rejects_bad_radius():
    with pytest.raises(ArgumentError):
        build_slope_set(0)
    with pytest.raises(ArgumentError):
        build_slope_set(2.5)


# ------------------------------------------------------- all detectors

def test_all_lines_blank_image_reports_zero():
    grid = [[0] * 12 for _ in range(10)]
    report = detect_all_lines(image_memory(grid), 2)
    assert set(report.result["best_value"]) == {0}


def test_all_lines_marks_edge_with_nearby_slope():
    nx, ny = 16, 12
    grid = [[1 if 4 * y - 3 * x > 0 else 0 for x in range(nx)]
            for y in range(ny)]
    D = 5
    report = detect_all_lines(image_memory(grid), D)
    target = math.atan2(3, 4)
    for px, py in ((4, 3), (8, 6), (0, 0)):    # pixels on the ideal edge
        member = report.result["best_member"][px + py * nx]
        assert member is not None
        angle = math.atan2(member[1], member[0])
        assert abs(angle - target) <= math.sqrt(2) / D + 1e-9


def test_all_lines_broadcasts_bounded_and_size_independent():
    rng = SplitMix64(0xD0D)
    D = 3
    seen = set()
    for nx, ny in ((16, 12), (32, 24)):
        vals = [int(rng.bounded(50)) for _ in range(nx * ny)]
        mem = ComputableMemory(nx * ny, width=16, dims=(nx, ny))
        load_op_words(mem, vals)
        seen.add(detect_all_lines(mem, D).ledger_delta.macro_cycles)
    assert len(seen) == 1
    assert seen.pop() <= 16 * D * D


def test_line_segment_validation():
    mem = image_memory([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    flat = ComputableMemory(9, width=16)
    with pytest.raises(ArgumentError):
        detect_line_segment(flat, 1, 1)          # not 2-D
    with pytest.raises(ArgumentError):
        detect_line_segment(mem, 0, 0)
    with pytest.raises(ArgumentError):
        detect_line_segment(mem, -1, 2)
    with pytest.raises(ArgumentError):
        detect_line_segment(mem, 3, 1)           # area off the image
    with pytest.raises(ArgumentError):
        detect_line_segment(mem, 4, 0)           # axis run too long
    with pytest.raises(ArgumentError):
        detect_all_lines(flat, 2)
