"""Routing-layer delay estimate: pinned worked numbers and scaling."""

import math

import pytest

from simdmem.errors import ArgumentError
from simdmem.feasibility import (FeasibilityParams, max_layer_size,
                                 propagation_delay)

MM = 1e-3
NM = 1e-9


def test_half_millimeter_layer_runs_at_sub_nanosecond():
    delay = propagation_delay(FeasibilityParams(0.5 * MM, 25 * NM, 10 * NM))
    assert delay == pytest.approx(0.6e-9, rel=1e-12)


def test_doubling_the_layer_quadruples_the_delay():
    small = propagation_delay(FeasibilityParams(0.5 * MM, 25 * NM, 10 * NM))
    large = propagation_delay(FeasibilityParams(1.0 * MM, 25 * NM, 10 * NM))
    assert large == pytest.approx(4 * small, rel=1e-12)


def test_wide_layer_lands_in_the_hundred_megahertz_class():
    delay = propagation_delay(FeasibilityParams(1.5 * MM, 25 * NM, 10 * NM))
    assert delay == pytest.approx(5.4e-9, rel=1e-12)


def test_inverting_a_half_nanosecond_budget_gives_half_a_millimeter():
    layer = max_layer_size(0.5e-9, 25 * NM, 10 * NM)
    assert abs(layer - 0.5 * MM) <= 0.2 * 0.5 * MM
    # and the inversion is exact against the forward formula
    delay = propagation_delay(FeasibilityParams(layer, 25 * NM, 10 * NM))
    assert delay == pytest.approx(0.5e-9, rel=1e-12)
    assert math.isclose(layer, 4.5644e-4, rel_tol=1e-4)


def test_rejects_non_positive_geometry():
    for bad in ((0, 25 * NM, 10 * NM), (0.5 * MM, -1, 10 * NM),
                (0.5 * MM, 25 * NM, float("nan"))):
        with pytest.raises(ArgumentError):
            FeasibilityParams(*bad)
    with pytest.raises(ArgumentError):
        max_layer_size(0, 25 * NM, 10 * NM)
