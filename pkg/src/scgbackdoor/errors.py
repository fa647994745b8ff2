"""Exception hierarchy shared by every module."""


class SCGError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SCGError):
    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class DuplicateEdge(SCGError):
    def __init__(self, edge):
        self.edge = tuple(edge)
        super().__init__(f"duplicate edge {edge[0]} -> {edge[1]}")


class UnknownVertex(SCGError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown vertex {name!r}")


class OutOfWindow(SCGError):
    def __init__(self, vertex, window):
        self.vertex = vertex
        self.window = window
        super().__init__(f"{vertex} lies outside window {list(window)}")


class OverlapError(SCGError):
    """Two interventions on the same instant, or an intervention on the effect."""


class InvalidGraph(SCGError):
    """An FTCG violates acyclicity or time ordering."""


class BudgetExceeded(SCGError):
    def __init__(self, limit, what="candidates"):
        self.limit = limit
        super().__init__(f"budget of {limit} {what} exceeded")


class NotAncestor(SCGError):
    def __init__(self, x, y):
        super().__init__(f"{x} is not an ancestor of {y}")


class NotIdentifiable(SCGError):
    pass
