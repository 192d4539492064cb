class GraphValidationError(Exception):
    """Base class for rejected graph instances."""
    pass

class EmptyGraphError(GraphValidationError):
    """Raised when an instance has no vertices."""
    pass

class VertexOutOfRangeError(GraphValidationError):
    """Raised when an edge names a vertex id outside 0..n-1."""
    pass

class SelfLoopError(GraphValidationError):
    """Raised when an edge joins a vertex to itself."""
    pass

class DuplicateEdgeError(GraphValidationError):
    """Raised when the same undirected edge is listed twice."""
    pass

class DisconnectedGraphError(GraphValidationError):
    """Raised when some vertex is unreachable from vertex 0."""
    pass

class EmptySetError(ValueError):
    """Raised when a nearest-neighbor query is made against an empty vertex set."""
    pass

class BudgetExceededError(Exception):
    """Raised when a search exceeds its configured budget."""
    pass
