"""Exception hierarchy for the simulator.

Every error raised by this package derives from SimdMemError so callers can
catch simulator failures without masking unrelated bugs.
"""


class SimdMemError(Exception):
    """Base class for all simulator errors."""


class ConfigError(SimdMemError):
    """Invalid workload or machine configuration."""


class AddressError(SimdMemError):
    """PE address, activation triple, or bit index out of range."""


class InstructionError(SimdMemError):
    """Malformed or unsupported instruction for the target memory type."""


class AllocationError(SimdMemError):
    """Object store cannot satisfy an allocation request."""


class UnknownObjectError(SimdMemError):
    """Reference to an object id that does not exist."""


class ArgumentError(SimdMemError):
    """API called with inconsistent or out-of-domain arguments."""
