"""Exception types shared across the package."""


class ShocklabError(Exception):
    """Base class for all package-specific failures."""


class HyperbolicityError(ShocklabError):
    """The stress law has non-positive slope at the requested state."""


class StressRangeError(ShocklabError):
    """A stress value lies outside the invertible range of the law."""


class DegenerateShockError(ShocklabError):
    """Left and right states coincide; no shock is defined."""


class NonPhysicalJumpError(ShocklabError):
    """The stress/strain jump ratio is non-positive."""


class QuadratureError(ShocklabError):
    """Period-average quadrature failed to reach the requested tolerance."""


class CFLError(ShocklabError):
    """A time step violating the CFL constraint was requested."""


class FrontNotFoundError(ShocklabError):
    """No midpoint crossing exists in the scanned profile."""


class ConfigError(ShocklabError):
    """A configuration file or field is malformed."""
