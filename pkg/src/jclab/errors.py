"""Exception types raised across the package."""


class JCLabError(Exception):
    """Base class for all package errors."""


class DegenerateBasis(JCLabError):
    """|alpha| is too small for the two coherent states to span two dimensions."""


class TruncationTooSmall(JCLabError):
    """The Fock cutoff leaves more than the allowed probability in the tail."""


class StepFailure(JCLabError):
    """The integrator could not meet the requested local tolerance."""


class ExcessLeakage(JCLabError):
    """A Fock-space state has too much weight outside span{|alpha>, |-alpha>}."""


class NonPhysicalState(JCLabError):
    """Matrix is not Hermitian, not unit trace, or not positive semidefinite."""


class NoViolation(JCLabError):
    """The CHSH violation condition never changes sign inside the search bracket."""


class ConfigError(JCLabError):
    """Invalid scenario configuration."""
