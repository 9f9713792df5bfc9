"""Exception hierarchy shared by every depnet module."""


class DepNetError(Exception):
    """Base class for all library errors."""


class InvalidParameter(DepNetError, ValueError):
    pass


# graph construction ---------------------------------------------------------

class GraphError(DepNetError):
    pass


class DuplicateId(GraphError):
    def __init__(self, entity_id):
        super().__init__(f"entity id {entity_id!r} already registered with different content")
        self.entity_id = entity_id


class SelfLoop(GraphError):
    def __init__(self, entity_id):
        super().__init__(f"self-dependency on {entity_id!r}")
        self.entity_id = entity_id


class UnknownNode(GraphError, KeyError):
    def __init__(self, entity_id):
        super().__init__(entity_id)
        self.entity_id = entity_id

    def __str__(self):
        return f"unknown node {self.entity_id!r}"


class EmptySelection(GraphError, ValueError):
    pass


class SealError(GraphError):
    """Validation failures found while sealing a builder.

    ``problems`` lists every offending ``(category, id)`` pair, not only the
    ones of the raised subclass.
    """

    def __init__(self, message, problems):
        super().__init__(message)
        self.problems = list(problems)

    @property
    def ids(self):
        return [p[1] for p in self.problems]


class UnknownEndpoint(SealError):
    pass


class DanglingParent(SealError):
    pass


# ingestion ------------------------------------------------------------------

class IngestError(DepNetError):
    pass


class BadRow(IngestError):
    def __init__(self, line_no, reason):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class UnknownEdgeKind(BadRow):
    pass


class ParseError(IngestError):
    def __init__(self, position, expected):
        super().__init__(f"offset {position}: expected {expected}")
        self.position = position
        self.expected = expected


class MissingBegin(ParseError):
    def __init__(self, position):
        super().__init__(position, "'begin'")


class IoError(DepNetError, OSError):
    def __init__(self, path, reason=""):
        super().__init__(f"{path}: {reason}" if reason else str(path))
        self.path = path


# analysis -------------------------------------------------------------------

class AnalysisError(DepNetError):
    pass


class EmptyDistribution(AnalysisError):
    pass


class EmptyTail(AnalysisError):
    pass


class DegenerateTail(AnalysisError):
    pass


class InsufficientPoints(AnalysisError):
    pass


class EmptyGraph(AnalysisError):
    pass


class IncompletePartition(AnalysisError):
    pass


class NodeSetMismatch(AnalysisError):
    pass
