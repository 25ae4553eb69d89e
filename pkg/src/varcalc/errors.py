class VarcalcError(Exception):
    pass


class SpecMismatchError(VarcalcError, ValueError):
    """Objects built on incompatible field specs, or a dimension mismatch."""


class PreconditionError(VarcalcError, ValueError):
    """An operation's precondition failed, e.g. a non-skew operator was supplied."""


class KindError(VarcalcError, TypeError):
    """Tensor of the wrong kind or degree for the requested operation."""


class ParseError(VarcalcError, ValueError):
    def __init__(self, message: str, src: str = "", pos: int = 0):
        self.src = src
        self.pos = pos
        line = src.count("\n", 0, pos) + 1
        col = pos - (src.rfind("\n", 0, pos) + 1) + 1
        self.line, self.col = line, col
        super().__init__(f"{message} (line {line}, column {col})")


class InvariantError(VarcalcError, RuntimeError):
    """An internal consistency check failed; indicates a bug."""
