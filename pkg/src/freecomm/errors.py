class ResourceBoundError(ValueError):
    """A request exceeds the configured enumeration or expansion bound."""
