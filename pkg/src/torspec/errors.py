"""Exception types shared across the toolkit.

Grouped so the command-line layer can map failures to exit codes:
model-hypothesis violations, structural mistakes, numerical failures, and
configuration problems.
"""


class TorspecError(Exception):
    """Base class for all toolkit errors."""


# -- hypothesis violations (the analyzed model is outside the guaranteed regime)

class DegenerateKernel(TorspecError):
    """Kernel carries no usable mass (zero samples, or a vanishing row integral)."""


class NotPrimitive(TorspecError):
    """No kernel-matrix power up to the configured cap is entrywise positive."""


class PositivePotential(TorspecError):
    """Potential has a strictly positive sample."""


class IneligiblePotential(TorspecError):
    """Analysis requires a potential that is strictly negative somewhere."""


class NotNormalized(TorspecError):
    """Convolution kernel does not carry unit quadrature mass."""


class DegenerateSymbol(TorspecError):
    """All mass of the kernel symbol is concentrated: no nonzero-mode contraction."""


# -- structural mistakes ------------------------------------------------------

class GridMismatch(TorspecError):
    """Operands sampled on different grids."""


class DimensionMismatch(TorspecError):
    """Array shapes incompatible with the operator or grid."""


# -- numerical failures -------------------------------------------------------

class TailNotResolved(TorspecError):
    """Winding truncation cap reached before the tail bound met the tolerance."""


class MuBelowEdge(TorspecError):
    """Spectral shift at or below the admissible edge of the denominator."""


class NegativeEntry(TorspecError):
    """Matrix handed to a nonnegative-matrix routine has a negative entry."""


class NonPositiveVector(TorspecError):
    """Certificate vector must be entrywise positive."""


class NotConverged(TorspecError):
    """Iteration cap reached before the convergence criterion was met."""


class QRNotConverged(NotConverged):
    """Dense eigensolver failed to converge."""


class BracketFailure(TorspecError):
    """Could not bracket the unit spectral radius near the essential edge."""


class MethodDisagreement(TorspecError):
    """Independent eigenvalue methods differ beyond the cross-check tolerance."""


class Unstable(TorspecError):
    """Time integration grew beyond the dissipativity guard."""


class ZeroNorm(TorspecError):
    """Trace norm vanished inside the requested fit window."""


HYPOTHESIS_ERRORS = (
    DegenerateKernel,
    NotPrimitive,
    PositivePotential,
    IneligiblePotential,
    NotNormalized,
    DegenerateSymbol,
)

NUMERICAL_ERRORS = (
    TailNotResolved,
    MuBelowEdge,
    NegativeEntry,
    NonPositiveVector,
    NotConverged,
    BracketFailure,
    MethodDisagreement,
    Unstable,
    ZeroNorm,
    GridMismatch,
    DimensionMismatch,
)


# -- configuration ------------------------------------------------------------

class ConfigError(Exception):
    """Base class for configuration problems (maps to exit code 1)."""


class ParseError(ConfigError):
    """Config or CSV file is structurally malformed (bad syntax, unknown key)."""


class ValidationError(ConfigError):
    """Config parses but violates an invariant; message lists every violation."""
