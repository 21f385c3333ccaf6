"""Exception types raised across the package."""
from __future__ import annotations


class NevanlinnaError(Exception):
    """Base class for all package errors."""


class AtomOnCircle(NevanlinnaError):
    """An atom of the Riesz charge lies (numerically) on a quadrature circle."""

    def __init__(self, radius: float, location: complex):
        super().__init__(
            f"atom at {location!r} lies on the circle |z| = {radius!r}"
        )
        self.radius = radius
        self.location = location


class DegenerateSet(NevanlinnaError):
    """The planar measure of a set is not distinguishable from zero."""


class SetOutsideBound(NevanlinnaError):
    """A planar set has member points outside its declared bounding disc."""


class EntireRequired(NevanlinnaError):
    """An inequality for entire functions was requested for a function with poles."""


class ProposalMismatch(NevanlinnaError):
    """Rejection sampling accepted too few proposals to be meaningful."""


class ParseError(NevanlinnaError):
    """A scenario file could not be parsed."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field


class ValidationError(NevanlinnaError):
    """A scenario violates a hypothesis of the claim it asks to check."""
