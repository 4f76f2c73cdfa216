"""Shared exception bases.

Concrete errors live next to the code that raises them; these bases exist
so the CLI can map any failure onto its exit-code contract (1 usage,
2 data, 3 backend) without enumerating every subclass.
"""


class ZslreqError(Exception):
    """Base class for all errors raised by this package."""


class DataError(ZslreqError):
    """Invalid or inconsistent input data (files, tables, arguments)."""


class BackendError(ZslreqError):
    """An embedding backend failed (transport or protocol)."""
