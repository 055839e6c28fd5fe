"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class FdsasError(Exception):
    exit_code = 1


class ConfigError(FdsasError, ValueError):
    exit_code = 2


class GeometryError(FdsasError, ValueError):
    exit_code = 6


class BandError(FdsasError, ValueError):
    """Requested bandwidth slice does not fit the frequency grid."""

    exit_code = 2


class DegenerateBandError(BandError):
    pass


class InfeasibleWindowError(FdsasError, ValueError):
    exit_code = 4


class GridCapError(FdsasError, RuntimeError):
    exit_code = 5

    def __init__(self, grid_size, cap):
        super().__init__(
            f"exhaustive grid has {grid_size} points, above the cap of {cap}; "
            "increase the angle step or raise the cap"
        )
        self.grid_size = grid_size
        self.cap = cap


class FormatError(FdsasError, ValueError):
    """Malformed tensor file. ``offset`` is the byte position of the fault."""

    exit_code = 7

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class TruncationError(FormatError):
    def __init__(self, expected, actual, offset):
        super().__init__(
            f"truncated file: expected {expected} bytes, found {actual}", offset
        )
        self.expected = expected
        self.actual = actual
