"""Common exception root so the CLI can map domain failures to one exit code."""


class NegspaceError(Exception):
    """Base class for all domain errors raised by this package."""
