"""Exception types shared across the package."""

from __future__ import annotations


class VarkitError(Exception):
    """Base class for all errors raised by this package."""


class StructureError(VarkitError):
    """A value violates a structural precondition.

    Raised for things like substituting with an incomplete assignment,
    zipping contexts with mismatched domains, or asking about a
    constructor that is not declared.  These are programming errors in
    the caller, not diagnostics about user input.
    """


class CapExceeded(VarkitError):
    """A universe enumeration outgrew its population guard."""

    def __init__(self, count: int, cap: int) -> None:
        super().__init__(
            f"universe population exceeded the cap: {count} > {cap}"
        )
        self.count = count
        self.cap = cap
