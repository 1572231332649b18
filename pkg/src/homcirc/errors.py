"""Exception taxonomy shared by the engine, the CLI and the HTTP service.

Every error carries a ``category`` used to pick CLI exit codes and API
error payloads: parse (2), patch (3), degenerate (4), dimension/internal (5).
"""


class CircuitError(Exception):
    category = "internal"


class ParseError(CircuitError):
    """Netlist syntax or consistency error; remembers the offending line."""

    category = "parse"

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateBranch(ParseError):
    pass


class DimensionMismatch(CircuitError):
    category = "dimension"


class CardinalityMismatch(DimensionMismatch):
    pass


class SingularMatrix(CircuitError):
    """Coefficient matrix is singular at the working tolerance."""

    category = "degenerate"

    def __init__(self, message, ratio=None):
        self.ratio = ratio
        super().__init__(message)


class SingularPivotBlock(SingularMatrix):
    pass


class PatchViolation(CircuitError):
    """A reduced model was requested outside its parameter patch."""

    category = "patch"

    def __init__(self, message, branches=()):
        self.branches = tuple(branches)
        super().__init__(message)


class GraphError(CircuitError):
    pass


class UnknownNode(GraphError):
    pass


class NotASpanningTree(GraphError):
    pass


class TreeCountExceedsCap(GraphError):
    def __init__(self, message, partial_count=0):
        self.partial_count = partial_count
        super().__init__(message)


class ZeroTreeDeterminant(GraphError):
    pass


class NotProjectivelyEqual(CircuitError):
    pass


EXIT_CODES = {
    "parse": 2,
    "patch": 3,
    "degenerate": 4,
    "dimension": 5,
    "internal": 5,
}
