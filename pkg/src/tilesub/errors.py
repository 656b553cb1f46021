"""Exception types shared across the package."""


class TilesubError(Exception):
    """Base class for all package errors."""


class InvalidSystem(TilesubError):
    """A substitution system failed structural validation."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class IndexOutOfRange(TilesubError):
    """A tile or facet index fell outside its numbering."""


class InvalidNetwork(TilesubError):
    """A network failed validation, or a network precondition broke."""


class MissingNetwork(TilesubError):
    """A rule has no attached network where one is required."""


class NoMacroTiles(TilesubError):
    """Macro-tile enumeration came back empty for a degenerate system."""


class InconsistentGluing(TilesubError):
    """Macro-adjacency entries cannot assemble the requested image."""


class PartialBlock(TilesubError):
    """A patch decomposition left cells outside complete blocks."""


class NonSquareSystem(TilesubError):
    """An operation restricted to the unit-square convention got another shape."""


class AmbiguousSignature(TilesubError):
    """Two template positions share the same macro-index signature."""


class InvalidParams(TilesubError):
    """Counting parameters violate their validity constraints."""


class BoundViolated(TilesubError):
    """A generated tileset exceeded its counting bound (implementation bug)."""


class ParseError(TilesubError):
    """A spec document line could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnresolvedReference(ParseError):
    """An identifier in a spec document does not resolve."""
