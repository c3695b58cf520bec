"""
Exceptions raised by the simulator. Configuration problems derive from
ConfigError and end the command line with exit code 1, every other
XLMIMOError ends it with exit code 2.

Licensed under The MIT License
Written by Jean Da Rolt
"""


class XLMIMOError(Exception):
    """Base class of all simulator errors."""


class ConfigError(XLMIMOError):
    """Invalid, unknown or unreadable configuration."""


class InvalidGeometry(XLMIMOError):
    def __init__(self, reason):
        Exception.__init__(self, f"Invalid geometry: {reason}.")


class UndefinedAngle(XLMIMOError):
    def __init__(self, ue, subarray):
        Exception.__init__(self, f"UE {ue} coincides with the center of "
                                 f"subarray {subarray}, angle undefined.")


class InvalidChannelModel(XLMIMOError):
    def __init__(self, reason):
        Exception.__init__(self, f"Invalid channel model: {reason}.")


class IndexOutOfRange(XLMIMOError):
    def __init__(self, name, index, size):
        Exception.__init__(self, f"{name} index {index} out of range "
                                 f"[0, {size}).")


class SelectionError(XLMIMOError):
    """Invalid subarray selection request."""


class IndefiniteCovariance(XLMIMOError):
    def __init__(self, min_eig, max_eig):
        Exception.__init__(self, f"Covariance is indefinite: smallest "
                                 f"eigenvalue {min_eig:.3e}, largest "
                                 f"{max_eig:.3e}.")


class SolveFailure(XLMIMOError):
    def __init__(self, reason='matrix is not positive definite'):
        Exception.__init__(self, f"Hermitian solve failed: {reason}.")


class PilotError(XLMIMOError):
    """Inconsistent pilot configuration."""


class ZeroGain(XLMIMOError):
    def __init__(self, ue):
        Exception.__init__(self, f"UE {ue} has zero channel gain, NMSE "
                                 f"undefined.")


class AllocationError(XLMIMOError):
    """Invalid allocation request."""


class MetricError(XLMIMOError):
    """Metric cannot be computed from the given series."""
