"""Exception types shared across the package."""


class BlockageError(Exception):
    """Base class for all package-specific errors."""


class GeometryError(BlockageError):
    """Degenerate or invalid link/zone geometry."""


class DomainError(BlockageError):
    """Inputs outside the domain of an operation (bad table, zone outside
    sidewalk, mismatched grids)."""


class NumericalError(BlockageError):
    """A numerical procedure failed to converge within its budget."""


class InfeasibleError(BlockageError):
    """A requested target cannot be met anywhere in the search range."""


class ConfigError(BlockageError):
    """Configuration file violates the schema.  ``field`` names the
    offending entry as ``section.key``."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
