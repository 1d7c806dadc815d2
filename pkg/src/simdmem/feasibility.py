"""Concurrent-bus feasibility: RC delay of the broadcast routing layer.

The lockstep model stands or falls with one number: how fast a signal
crosses the routing layer that carries a broadcast to every PE.  For a
square layer of side L wired in copper of thickness T over an oxide of
thickness D, the distributed RC delay scales with resistance-per-square
times capacitance-per-area times L squared; with bulk copper
resistivity and SiO2 permittivity folded in, the constant works out to
0.6e-18 s*m per (L^2 / D / T).

``propagation_delay`` evaluates that estimate, and ``max_layer_size``
inverts it to the largest layer a given cycle budget allows — the
knob that decides how many PEs can share one concurrent bus domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ArgumentError

__all__ = ["FeasibilityParams", "propagation_delay", "max_layer_size",
           "RC_CONSTANT"]

# seconds * meter, for delay = RC_CONSTANT * L^2 / (D_ox * T_cu)
RC_CONSTANT = 0.6e-18


@dataclass(frozen=True)
class FeasibilityParams:
    """Routing-layer geometry, all in meters."""

    L: float          # side of the square routing layer
    D_ox: float       # oxide (dielectric) thickness
    T_cu: float       # copper (conductor) thickness

    def __post_init__(self):
        for name in ("L", "D_ox", "T_cu"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0
                    and math.isfinite(value)):
                raise ArgumentError(
                    f"{name} must be a positive finite length, got {value!r}")


def propagation_delay(params: FeasibilityParams) -> float:
    """Broadcast propagation delay across the routing layer, seconds."""
    return RC_CONSTANT * params.L ** 2 / params.D_ox / params.T_cu


def max_layer_size(budget_s: float, d_ox: float, t_cu: float) -> float:
    """Largest layer side (meters) whose delay fits ``budget_s``."""
    probe = FeasibilityParams(1.0, d_ox, t_cu)   # validates thicknesses
    if not (isinstance(budget_s, (int, float)) and budget_s > 0
            and math.isfinite(budget_s)):
        raise ArgumentError(
            f"budget must be a positive finite time, got {budget_s!r}")
    return math.sqrt(budget_s * probe.D_ox * probe.T_cu / RC_CONSTANT)
