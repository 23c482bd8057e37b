"""Exception hierarchy.

Two families matter for the CLI exit codes: ValidationError (bad inputs or
configuration, exit 1) and NumericalError (a computation failed or exceeded
a tolerance, exit 2).  I/O problems surface as ordinary OSError (exit 3).
"""


class MinksurfError(Exception):
    """Base class for all library errors."""


class ValidationError(MinksurfError):
    """Input data or configuration violates a precondition."""


class NumericalError(MinksurfError):
    """A numerical computation failed or left tolerance."""


class GridTooSmall(ValidationError):
    """Grid has fewer than 5 nodes along an axis."""


class OutOfDomain(ValidationError):
    """Resampling nodes fall outside the source domain."""


class ConfigError(ValidationError):
    """Malformed job configuration (unknown keys, bad values)."""


class NearZeroField(NumericalError):
    """A field that must stay away from zero came too close (or changed sign)."""


class BlowUp(NumericalError):
    """Marched quantity left the trust region (|ln mu| > 50)."""


class NoConvergence(NumericalError):
    """Iterative sweep failed to converge within the sweep budget."""


class SingularDegreeSystem(NumericalError):
    """Per-degree linear system of the jet recursion is singular."""

    def __init__(self, degree: int, message: str = ""):
        self.degree = degree
        super().__init__(message or f"singular coefficient system at total degree {degree}")


class BothMuZero(NumericalError):
    """mu1 and mu2 both vanish: inflection configuration, surface lies in a 3-space."""


class ResidualTooLarge(NumericalError):
    """Natural-system residual exceeds the build tolerance for reconstruction."""

    def __init__(self, measured: float, tol: float):
        self.measured = measured
        self.tol = tol
        super().__init__(f"natural-system residual {measured:.3e} exceeds tol_build {tol:.3e}")


class StepUnstable(NumericalError):
    """Frame entries exceeded 1e8 during transport."""


class DegenerateMetric(NumericalError):
    """|EG - F^2| is numerically zero: the induced metric is degenerate."""


class MinimalOrTotallyGeodesic(NumericalError):
    """Mean curvature vector numerically vanishes; geometric frame undefined."""


class NotIsotropic(ValidationError):
    """Immersion is not given in isotropic (null) parameters.

    Constructing isotropic coordinates from a generic timelike parametrization
    is out of scope; re-parametrize before analysis.
    """


class NotSeparable(NumericalError):
    """f^2|mu_i| does not separate into phi(u), psi(v) within tolerance."""
