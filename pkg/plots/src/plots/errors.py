class SchemaError(Exception):
    """A CSV input is missing, malformed, or lacks required columns."""


class SpecError(Exception):
    """A figure spec file is missing, malformed, or inconsistent."""
