"""Exception hierarchy shared by all treebench modules."""

from __future__ import annotations


class TreebenchError(Exception):
    """Base class for all treebench errors."""


# --- graph construction / lookup ---

class EmptyInputError(TreebenchError):
    pass


class SelfLoopError(TreebenchError):
    def __init__(self, node: int):
        self.node = node
        super().__init__(f"self-loop at node {node}")


class DisconnectedError(TreebenchError):
    def __init__(self, component_count: int):
        self.component_count = component_count
        super().__init__(f"graph is disconnected ({component_count} components)")


class IndexOutOfRangeError(TreebenchError):
    def __init__(self, index: int, num_nodes: int):
        self.index = index
        self.num_nodes = num_nodes
        super().__init__(f"node index {index} out of range [0, {num_nodes})")


class NotAnEdgeError(TreebenchError):
    def __init__(self, u: int, v: int):
        self.u, self.v = u, v
        super().__init__(f"({u}, {v}) is not an edge")


class NotATreeError(TreebenchError):
    pass


class SizeLimitError(TreebenchError):
    def __init__(self, size: int, limit: int, what: str = "graph"):
        self.size = size
        self.limit = limit
        super().__init__(f"{what} size {size} exceeds limit {limit}")


# --- numerics ---

class DimensionMismatchError(TreebenchError):
    pass


class NotTangentError(TreebenchError):
    pass


class OffManifoldError(TreebenchError):
    pass


class NonFiniteError(TreebenchError):
    pass


class MissingNodeError(TreebenchError):
    def __init__(self, node: int):
        self.node = node
        super().__init__(f"embedding is missing node {node}")


class SolverFailureError(TreebenchError):
    pass


class ShapeMismatchError(TreebenchError):
    pass


class SingleClassError(TreebenchError):
    pass


# --- datasets / io ---

class InsufficientEdgesError(TreebenchError):
    pass


class DatasetIOError(TreebenchError):
    pass


class FormatError(TreebenchError):
    """On-disk format violation.

    ``kind`` is one of ``"bad_magic"``, ``"version_mismatch"``,
    ``"checksum_mismatch"``, ``"shape_mismatch"``.
    """

    def __init__(self, kind: str, detail: str = ""):
        self.kind = kind
        super().__init__(f"{kind}: {detail}" if detail else kind)
