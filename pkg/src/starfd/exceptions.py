"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit 1,
numeric/infeasibility problems exit 2.
"""


class ConfigError(ValueError):
    """A configuration file or parameter set failed validation."""


class NumericError(RuntimeError):
    """A numerical procedure failed to converge or exceeded its budget.

    Carries a human-readable diagnostic (last term magnitude, subdivision
    depth, ...) so the caller can decide whether a fallback applies.
    """


class InfeasibleError(RuntimeError):
    """A power-allocation target cannot be met with the given budget.

    The message names the binding target.
    """


class DegenerateGeometryError(InfeasibleError):
    """The closed-form allocation hit a vanishing denominator.

    Happens when the two downlink defining equations are (numerically)
    linearly dependent, e.g. identical moment ratios for both users.
    """
