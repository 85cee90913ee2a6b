"""
Exception types shared across the toolkit
"""


class DimensionError(ValueError):
    """Operand shapes or register dimensions do not match"""


class ValidationError(ValueError):
    """A physical invariant (hermiticity, trace, positivity, unitarity) is violated"""


class ConfigError(ValueError):
    """Malformed configuration or an unknown gate, identity or experiment name"""
