"""Exception types shared across the package."""


class TaxelSimError(Exception):
    """Base class for all taxelsim errors."""


class InvalidStateError(TaxelSimError):
    """A kinematic state violates its invariants (e.g. non-unit quaternion)."""


class InvalidModelError(TaxelSimError):
    """An object model is unusable (non-positive volume/density, degenerate dimensions)."""


class ConfigError(TaxelSimError):
    """A configuration value is missing or out of its valid range."""
