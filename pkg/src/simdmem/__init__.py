"""Deterministic simulator for massive-SIMD in-memory processing arrays.

Four memory families share one control model (broadcast bus, strided
activation, match lines, exclusive word access) and differ in per-PE
behaviour:

- movable:    block shifts of stored words
- searchable: masked-compare match chains over byte streams
- comparable: conditional storage updates for field predicates
- computable: bit-serial ALU PEs running macro instruction expansions

Every broadcast is metered, so algorithm cycle complexity is a measured
quantity, not an estimate.
"""

from simdmem.errors import (
    AddressError,
    AllocationError,
    ArgumentError,
    ConfigError,
    InstructionError,
    SimdMemError,
    UnknownObjectError,
)

__version__ = "0.1.0"

__all__ = [
    "AddressError",
    "AllocationError",
    "ArgumentError",
    "ConfigError",
    "InstructionError",
    "SimdMemError",
    "UnknownObjectError",
    "__version__",
]
