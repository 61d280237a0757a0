"""Exception hierarchy. Each carries the offending indices/vertices as attributes."""


class RbpError(Exception):
    """Base class for all library errors."""


class GraphError(RbpError, ValueError):
    """Malformed graph input (self-loop, duplicate edge, disconnected, bad id)."""


class SchemaError(RbpError, ValueError):
    """A document does not match its expected format."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class ChainMalformed(RbpError):
    def __init__(self, chain, reason):
        self.chain = chain
        super().__init__(f"malformed chain {chain.source}->{chain.target}: {reason}")


class TransportFailed(RbpError):
    def __init__(self, pair, witness=None):
        self.pair = pair
        self.witness = witness
        super().__init__(f"transported chain for pair {pair} does not verify")


class NotTreeGraded(RbpError):
    def __init__(self, pair, reason):
        self.pair = pair
        super().__init__(f"not tree-graded at {pair}: {reason}")


class PreconditionError(RbpError):
    """The input does not satisfy the requirements of the construction."""


class CuttingBall(PreconditionError):
    def __init__(self, piece, center, radius, diameter):
        self.piece = piece
        self.center = center
        self.radius = radius
        self.diameter = diameter
        super().__init__(
            f"ball B({center};{radius}) meets piece {piece} in a set of diameter "
            f"{diameter} and disconnects it (thicken the input first)"
        )


class ConstructionError(RbpError):
    """A runtime lemma check failed; the input violates the construction's hypotheses."""


class MissingCertificate(ConstructionError):
    def __init__(self, piece):
        self.piece = piece
        super().__init__(f"no bottleneck chain from piece {piece} to the base piece")


class BasepointBoundViolated(ConstructionError):
    def __init__(self, piece, dist, bound):
        self.piece = piece
        super().__init__(f"piece {piece}: d(e, e_i) = {dist} exceeds d(e, X_i) + M = {bound}")


class BaseStratumNotSingleton(ConstructionError):
    def __init__(self, piece):
        self.piece = piece
        super().__init__(f"piece {piece} has its basepoint at e; level 0 must be the base piece alone")


class SlackExceeded(ConstructionError):
    def __init__(self, piece, vertex, length, bound):
        self.piece = piece
        self.vertex = vertex
        super().__init__(f"slack path from {vertex} via piece {piece} has length {length} > {bound}")


class NotTransitive(ConstructionError):
    def __init__(self, triple, paths):
        self.triple = triple
        self.paths = paths
        super().__init__(f"level relation not transitive on {triple}")


class GlueViolated(ConstructionError):
    def __init__(self, member, parent):
        self.member = member
        self.parent = parent
        super().__init__(f"c-point of piece {member} is not within 4M of parent piece {parent}")


class PieceDisconnected(ConstructionError):
    def __init__(self, piece):
        self.piece = piece
        super().__init__(f"4M-neighbourhood of piece {piece} induces a disconnected subgraph")


class ParentCycle(ConstructionError):
    pass


class LipschitzViolation(RbpError):
    def __init__(self, edge, dist):
        self.edge = edge
        super().__init__(f"collapse maps edge {edge} to points at distance {dist}")


class BoundViolated(RbpError):
    def __init__(self, pair, d_tree, d_base, bound):
        self.pair = pair
        super().__init__(f"pair {pair}: d_T = {d_tree}, d_X = {d_base}, bound {bound}")


class CoordinateMismatch(RbpError):
    pass


class AttachPointUnmapped(RbpError):
    def __init__(self, piece, vertex):
        self.piece = piece
        self.vertex = vertex
        super().__init__(f"attach vertex {vertex} of piece {piece} has no image in its embedding")


class CycleInCoordinateTree(RbpError):
    def __init__(self, coordinate):
        self.coordinate = coordinate
        super().__init__(f"coordinate tree {coordinate} is not a tree")


class NonDecreasingViolated(RbpError):
    def __init__(self, pair, product, source):
        self.pair = pair
        super().__init__(f"pair {pair}: max_j d_Tj = {product} < d = {source}")


class EmbeddingInvalid(RbpError):
    """A per-piece embedding does not satisfy its declared bounds."""
