"""Exact metric primitives on finite connected graphs with unit-length edges.

Point sets are ``frozenset`` of vertex ids; paths are lists of vertex ids.
Balls are open (``d < r``), neighbourhoods closed (``d <= r``).
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import GraphError
from .sampling import select_pairs

# all-pairs matrices are only materialised up to this many vertices
MATRIX_LIMIT = 4000


class MetricGraph:
    """Immutable undirected simple graph on vertices ``0..n-1``.

    Adjacency is stored in CSR form (``indptr``, ``indices``) with each
    neighbour list sorted ascending, which is what the kernels consume.
    """

    def __init__(self, n, edges, require_connected=True):
        n = int(n)
        if n < 1:
            raise GraphError("graph needs at least one vertex")
        seen = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
        self.n = n
        self.edges = tuple(sorted(seen))
        deg = np.zeros(n + 1, dtype=np.int64)
        if self.edges:
            arr = np.array(self.edges, dtype=np.int64)
            np.add.at(deg, arr[:, 0] + 1, 1)
            np.add.at(deg, arr[:, 1] + 1, 1)
            src = np.concatenate([arr[:, 0], arr[:, 1]])
            dst = np.concatenate([arr[:, 1], arr[:, 0]])
            order = np.lexsort((dst, src))
            indices = dst[order]
        else:
            indices = np.zeros(0, dtype=np.int64)
        self.indptr = np.cumsum(deg).astype(np.int32)
        self.indices = indices.astype(np.int32)
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        self._rows = {}
        self._matrix = None
        if require_connected and n > 1:
            labels = kernels.component_labels(self.indptr, self.indices)
            if labels.max() != 0:
                raise GraphError("graph is not connected")

    def __repr__(self):
        return f"MetricGraph(n={self.n}, m={len(self.edges)})"

    def __eq__(self, other):
        return isinstance(other, MetricGraph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    @property
    def vertices(self):
        return range(self.n)

    def neighbors(self, v):
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u, v):
        nb = self.neighbors(u)
        k = np.searchsorted(nb, v)
        return bool(k < len(nb) and nb[k] == v)

    def mask(self, points):
        m = np.zeros(self.n, dtype=np.uint8)
        if points:
            m[np.fromiter(points, dtype=np.int64)] = 1
        return m

    def distance_matrix(self):
        """All-pairs distances (int32, n x n); cached."""
        if self._matrix is None:
            if self.n > MATRIX_LIMIT:
                raise MemoryError(f"refusing all-pairs matrix for n={self.n} > {MATRIX_LIMIT}")
            self._matrix = kernels.distance_rows(self.indptr, self.indices, np.arange(self.n))
            self._matrix.setflags(write=False)
        return self._matrix

    def row(self, src):
        if self._matrix is not None:
            return self._matrix[src]
        r = self._rows.get(src)
        if r is None:
            r = kernels.bfs(self.indptr, self.indices, [src])[0]
            r.setflags(write=False)
            if len(self._rows) > 4096:
                self._rows.clear()
            self._rows[src] = r
        return r

    def distance(self, u, v):
        return int(self.row(u)[v])

    def distance_to_set(self, points, blocked=None):
        """Multi-source BFS distances from a vertex set (-1 if unreachable)."""
        return kernels.bfs(self.indptr, self.indices, sorted(points), blocked)[0]

    def set_distance(self, a, b):
        d = self.distance_to_set(a)
        return int(d[sorted(b)].min())

    def induced(self, vertices):
        """Induced subgraph on ``vertices`` relabelled in ascending order.

        Returns ``(subgraph, order)`` where ``order[k]`` is the original id of
        the subgraph's vertex ``k``. The subgraph need not be connected.
        """
        order = sorted(vertices)
        index = {v: k for k, v in enumerate(order)}
        sub_edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return MetricGraph(len(order), sub_edges, require_connected=False), order

    def is_connected(self):
        return self.n == 1 or int(kernels.component_labels(self.indptr, self.indices).max()) == 0


def point_set(points, g=None):
    s = frozenset(int(p) for p in points)
    if g is not None and any(not 0 <= p < g.n for p in s):
        raise GraphError("point set outside the vertex range")
    return s


def is_path(g, path):
    return len(path) > 0 and all(g.has_edge(a, b) for a, b in zip(path, path[1:]))


def distances_from(g, src):
    """Single-source shortest-path distances as a dict ``{v: d(src, v)}``."""
    return dict(enumerate(g.row(src).tolist()))


def open_ball(g, w, r):
    """``{x : d(w, x) < r}``; ``r`` may be any real (e.g. a Fraction)."""
    if r <= 0:
        return frozenset()
    return frozenset(np.flatnonzero(g.row(w) < r).tolist())


def closed_neighborhood(g, points, r):
    """``{x : d(x, A) <= r}`` for a nonempty set ``A``."""
    if not points:
        raise ValueError("closed_neighborhood needs a nonempty set")
    if r == 0:
        return frozenset(points)
    d = kernels.bfs(g.indptr, g.indices, sorted(points), None, int(r))[0]
    return frozenset(np.flatnonzero(d >= 0).tolist())


def geodesic_vertices(g, x, y):
    """Union of all geodesics from ``x`` to ``y``."""
    dx, dy = g.row(x), g.row(y)
    return frozenset(np.flatnonzero(dx + dy == dx[y]).tolist())


def canonical_geodesic(g, x, y):
    """The geodesic from ``x`` to ``y`` that always steps to the smallest-id
    neighbour one unit closer to ``y``."""
    dy = g.row(y)
    path = [x]
    v = x
    while v != y:
        nb = g.neighbors(v)
        v = int(nb[dy[nb] == dy[v] - 1][0])
        path.append(v)
    return path


def _walk_back(parent, end):
    path = [int(end)]
    while parent[path[-1]] != -1:
        path.append(int(parent[path[-1]]))
    path.reverse()
    return path


def avoiding_path(g, a, b, blocked_mask):
    """Shortest path from ``a`` to ``b`` inside the unblocked vertices, or None."""
    srcs = [v for v in sorted(a) if not blocked_mask[v]]
    if not srcs:
        return None
    dist, parent = kernels.bfs(g.indptr, g.indices, srcs, blocked_mask)
    targets = np.fromiter(sorted(b), dtype=np.int64)
    targets = targets[dist[targets] >= 0]
    if len(targets) == 0:
        return None
    end = targets[np.argmin(dist[targets])]
    return _walk_back(parent, end)


def blocks_all_paths(g, a, b, ball):
    """Whether every path from ``a`` to ``b`` meets ``ball``.

    Returns ``(True, None)`` or ``(False, path)`` with a concrete avoiding path.
    """
    if not a or not b:
        raise ValueError("blocks_all_paths needs nonempty endpoint sets")
    if a <= ball or b <= ball:
        return True, None
    path = avoiding_path(g, a, b, g.mask(ball))
    return (path is None), path


@dataclass
class BpFailure:
    x: int
    y: int
    midpoint: int
    witness: list


@dataclass
class BpReport:
    delta: object
    pairs_checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def to_dict(self):
        return {
            "kind": "manning_bp",
            "delta": str(self.delta),
            "pairs_checked": self.pairs_checked,
            "passed": self.passed,
            "failures": [
                {"x": f.x, "y": f.y, "midpoint": f.midpoint, "witness": f.witness}
                for f in self.failures
            ],
        }


def geodesic_midpoint(g, x, y):
    path = canonical_geodesic(g, x, y)
    return path[(len(path) - 1) // 2]


def check_manning_bp(g, delta, pairs="all", seed=None, max_failures=None):
    """Check the bottleneck property at scale ``delta`` on selected pairs.

    For each pair the midpoint of the canonical geodesic (rounded toward
    ``x``) is taken and every ``x``-``y`` path must meet ``B(m; delta)``.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    report = BpReport(delta=delta)
    for x, y in select_pairs(range(g.n), pairs, seed):
        report.pairs_checked += 1
        m = geodesic_midpoint(g, x, y)
        ok, witness = blocks_all_paths(g, frozenset([x]), frozenset([y]), open_ball(g, m, delta))
        if not ok:
            report.failures.append(BpFailure(x, y, m, witness))
            if max_failures is not None and len(report.failures) >= max_failures:
                break
    return report
