"""Exception types shared across the package."""


class ContactNetError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(ContactNetError):
    """Invalid configuration value, file syntax, or unknown key."""


class DegenerateGraphError(ContactNetError):
    """Metric requested on a graph too small or empty to support it."""


class UndefinedAssortativityError(ContactNetError):
    """Assortativity is undefined (zero excess-degree variance, e.g. regular graphs)."""


class InsufficientSupportError(ContactNetError):
    """Power-law fit requested with fewer than three usable degree points."""
