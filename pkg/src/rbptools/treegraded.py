"""Tree-graded spaces: disjoint piece graphs joined by arcs along a rooted tree.

A :class:`TreeGradedSpace` is realised as a single :class:`MetricGraph` whose
ids list the piece copies first (in index order) and then the interior
vertices of every arc. Distances can be computed either on that graph or by
walking the underlying tree (:func:`tg_distance`).
"""

import os
from collections import Counter
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .errors import BoundViolated, LipschitzViolation, ParentCycle, PieceDisconnected
from .metric_graph import MetricGraph
from .sampling import select_pairs

BOUND_FACTOR = 3552


def exhaustive_limit():
    """Vertex count up to which all-pairs scans are the default."""
    return int(os.environ.get("RBPTOOLS_EXHAUSTIVE_MAX", "800"))


@dataclass(frozen=True)
class TgPoint:
    """A point of the space: ``("piece", i, local_vertex)`` or ``("arc", i, offset)``.

    Arc ``i`` runs from offset 0 (in piece ``i``) to ``len`` (in its parent).
    """

    kind: str
    index: int
    position: int


class TreeGradedSpace:
    """Pieces (connected graphs) glued along a rooted tree by arcs.

    Parameters
    ----------
    pieces : list of MetricGraph
        One connected graph per tree node.
    parent : dict
        ``child -> parent`` for every non-root index.
    attach : dict
        ``child -> (vertex in child, vertex in parent)``, the arc endpoints.
    arc_lengths : dict
        ``child -> length >= 1``.
    root : int
        Index of the root piece.
    labels : list of sequences, optional
        Per piece, an external id for each local vertex (used by collapse maps).
    arc_images : dict, optional
        ``child -> list`` of ``len + 1`` external ids, one per arc offset.
    """

    def __init__(self, pieces, parent, attach, arc_lengths, root=0, labels=None, arc_images=None):
        self.pieces = list(pieces)
        k = len(self.pieces)
        self.root = root
        self.parent = {int(c): int(p) for c, p in parent.items()}
        if set(self.parent) != set(range(k)) - {root}:
            raise ValueError("parent must be defined exactly on the non-root pieces")
        self.attach = {int(c): (int(a), int(b)) for c, (a, b) in attach.items()}
        self.arc_lengths = {int(c): int(v) for c, v in arc_lengths.items()}
        for c in self.parent:
            if self.arc_lengths[c] < 1:
                raise ValueError(f"arc of piece {c} must have length >= 1")
            a, b = self.attach[c]
            if not (0 <= a < self.pieces[c].n and 0 <= b < self.pieces[self.parent[c]].n):
                raise ValueError(f"attach points of piece {c} out of range")
        for i, p in enumerate(self.pieces):
            if not p.is_connected():
                raise PieceDisconnected(i)
        self.labels = labels
        self.arc_images = arc_images or {}
        self._order_tree()
        self._realize()

    def _order_tree(self):
        k = len(self.pieces)
        children = {i: [] for i in range(k)}
        for c, p in sorted(self.parent.items()):
            children[p].append(c)
        self.children = children
        self.depth = {self.root: 0}
        self.tin, self.tout = {}, {}
        clock = 0
        stack = [(self.root, False)]
        while stack:
            v, done = stack.pop()
            if done:
                self.tout[v] = clock
                continue
            self.tin[v] = clock
            clock += 1
            stack.append((v, True))
            for c in reversed(children[v]):
                self.depth[c] = self.depth[v] + 1
                stack.append((c, False))
        if len(self.tin) != k:
            raise ParentCycle("parent map does not form a tree rooted at the base piece")

    def _realize(self):
        self.offsets = []
        total = 0
        for p in self.pieces:
            self.offsets.append(total)
            total += p.n
        self.n_piece_vertices = total
        self.arc_start = {}
        edges = []
        for i, p in enumerate(self.pieces):
            o = self.offsets[i]
            edges += [(u + o, v + o) for u, v in p.edges]
        for c in sorted(self.parent):
            self.arc_start[c] = total
            total += self.arc_lengths[c] - 1
            chain = [self.vertex(TgPoint("arc", c, t)) for t in range(self.arc_lengths[c] + 1)]
            edges += list(zip(chain, chain[1:]))
        self.realized = MetricGraph(total, edges)
        self._arc_of = np.full(total, -1, dtype=np.int64)
        for c, s in self.arc_start.items():
            self._arc_of[s:s + self.arc_lengths[c] - 1] = c

    # -- ids --------------------------------------------------------------
    def vertex(self, pt):
        """Realised vertex id of a point (arc ends resolve to piece vertices)."""
        if pt.kind == "piece":
            if not 0 <= pt.position < self.pieces[pt.index].n:
                raise ValueError(f"{pt} out of range")
            return self.offsets[pt.index] + pt.position
        c, t = pt.index, pt.position
        L = self.arc_lengths[c]
        if not 0 <= t <= L:
            raise ValueError(f"{pt} out of range")
        if t == 0:
            return self.offsets[c] + self.attach[c][0]
        if t == L:
            return self.offsets[self.parent[c]] + self.attach[c][1]
        return self.arc_start[c] + t - 1

    def point(self, v):
        v = int(v)
        if v < self.n_piece_vertices:
            i = int(np.searchsorted(self.offsets, v, side="right")) - 1
            return TgPoint("piece", i, v - self.offsets[i])
        c = int(self._arc_of[v])
        return TgPoint("arc", c, v - self.arc_start[c] + 1)

    def tree_edges(self):
        return sorted((min(c, p), max(c, p)) for c, p in self.parent.items())

    def arc_vertices(self, c):
        return [self.vertex(TgPoint("arc", c, t)) for t in range(self.arc_lengths[c] + 1)]

    def piece_vertex_sets(self):
        return [frozenset(range(o, o + p.n)) for o, p in zip(self.offsets, self.pieces)]

    def in_subtree(self, a, root):
        return self.tin[root] <= self.tin[a] and self.tout[a] <= self.tout[root]

    def tree_path(self, a, b):
        up, down = [a], [b]
        while up[-1] != down[-1]:
            if self.depth[up[-1]] >= self.depth[down[-1]]:
                up.append(self.parent[up[-1]])
            else:
                down.append(self.parent[down[-1]])
        return up + down[-2::-1]

    @classmethod
    def from_pieces(cls, g, pieces, base_piece=0, arc_length=1):
        """Split a graph whose pieces meet in single vertices along a tree.

        Every piece becomes a disjoint copy; a child is tied to its parent by an
        arc of ``arc_length`` between the two copies of their shared vertex.
        The piece tree is explored breadth-first from ``base_piece``.
        """
        sets = [frozenset(p) for p in pieces]
        member = {}
        for i, p in enumerate(sets):
            for v in p:
                member.setdefault(v, []).append(i)
        copies, labels, local = [], [], []
        for p in sets:
            sub, order = g.induced(p)
            copies.append(MetricGraph(sub.n, sub.edges))
            labels.append(order)
            local.append({v: k for k, v in enumerate(order)})
        parent, attach, lengths, images = {}, {}, {}, {}
        seen, queue = {base_piece}, [base_piece]
        for p in queue:
            for v in sorted(sets[p]):
                for c in member[v]:
                    if c not in seen:
                        seen.add(c)
                        queue.append(c)
                        parent[c] = p
                        attach[c] = (local[c][v], local[p][v])
                        lengths[c] = arc_length
                        images[c] = [v] * (arc_length + 1)
        if len(seen) != len(sets):
            raise ValueError("pieces are not linked into a single tree by shared vertices")
        return cls(copies, parent, attach, lengths, base_piece, labels, images)

    @classmethod
    def from_generated(cls, gen, arc_length=1):
        return cls.from_pieces(gen.graph, gen.decomposition.pieces, gen.decomposition.base_piece, arc_length)


def build_tree_graded(state):
    """Assemble the space from a finished construction.

    Piece ``i`` is a copy of ``N_{4M}(X_i)``; for ``i != e`` an arc of length
    ``d(e_i, c_i)`` joins the copy of ``e_i`` to the copy of ``c_i`` inside
    piece ``c(i)``. Arc offsets map to the vertices of ``g_i``.
    """
    g = state.graph
    k = len(state.structure.pieces)
    pieces, labels, local = [], [], []
    for i in range(k):
        sub, order = g.induced(state.neighborhood(i))
        if not sub.is_connected():
            raise PieceDisconnected(i)
        pieces.append(MetricGraph(sub.n, sub.edges))
        labels.append(order)
        local.append({v: t for t, v in enumerate(order)})
    attach, lengths, images = {}, {}, {}
    for i, p in state.parent.items():
        ei, ci = state.basepoints[i], state.c_points[i]
        L = g.distance(ei, ci)
        attach[i] = (local[i][ei], local[p][ci])
        lengths[i] = L
        images[i] = list(state.geodesics[i][: L + 1])
    return TreeGradedSpace(pieces, state.parent, attach, lengths, state.e_piece, labels, images)


def tg_distance(t, x, y):
    """Distance between two points by walking the underlying tree."""
    if x.kind == "arc" and y.kind == "arc" and x.index == y.index:
        return abs(x.position - y.position)
    if x.kind == "arc":
        (px, ux), ex = _resolve(t, x, _host(t, y))
    else:
        (px, ux), ex = (x.index, x.position), 0
    if y.kind == "arc":
        (py, uy), ey = _resolve(t, y, px)
    else:
        (py, uy), ey = (y.index, y.position), 0
    return ex + ey + _piece_walk(t, px, ux, py, uy)


def _host(t, pt):
    return pt.index


def _resolve(t, pt, other_host):
    """Move an arc point to the arc end facing ``other_host``."""
    c, s = pt.index, pt.position
    if t.in_subtree(other_host, c):
        return (c, t.attach[c][0]), s
    return (t.parent[c], t.attach[c][1]), t.arc_lengths[c] - s


def _piece_walk(t, a, u, b, v):
    path = t.tree_path(a, b)
    total = 0
    cur = u
    for here, nxt in zip(path, path[1:]):
        if t.parent.get(nxt) == here:
            exit_v, enter_v = t.attach[nxt][1], t.attach[nxt][0]
            L = t.arc_lengths[nxt]
        else:
            exit_v, enter_v = t.attach[here][0], t.attach[here][1]
            L = t.arc_lengths[here]
        total += t.pieces[here].distance(cur, exit_v) + L
        cur = enter_v
    return total + t.pieces[b].distance(cur, v)


@dataclass
class TreeGradedReport:
    intersections_ok: bool = True
    tree_ok: bool = True
    cycles_ok: bool = True
    problems: list = field(default_factory=list)

    @property
    def passed(self):
        return self.intersections_ok and self.tree_ok and self.cycles_ok

    def to_dict(self):
        return {
            "kind": "tree_graded_check",
            "passed": self.passed,
            "intersections_ok": self.intersections_ok,
            "tree_ok": self.tree_ok,
            "cycles_ok": self.cycles_ok,
            "problems": self.problems,
        }


def check_tree_graded_layout(graph, pieces, tree_edges=None, n_nodes=None):
    """Structural tree-graded check of a graph covered by vertex sets.

    (a) pieces pairwise share at most one vertex; (b) ``tree_edges`` (if given)
    form a tree on ``n_nodes`` nodes; (c) every biconnected block containing a
    cycle lies inside one piece.
    """
    rep = TreeGradedReport()
    member = {}
    for i, p in enumerate(pieces):
        for v in p:
            member.setdefault(v, []).append(i)
    shared = Counter()
    for v, ms in member.items():
        for a in range(len(ms)):
            for b in range(a + 1, len(ms)):
                shared[(ms[a], ms[b])] += 1
    for pair, cnt in sorted(shared.items()):
        if cnt > 1:
            rep.intersections_ok = False
            rep.problems.append({"check": "intersection", "pair": list(pair), "shared": cnt})
    if tree_edges is not None:
        n_nodes = len(pieces) if n_nodes is None else n_nodes
        T = nx.Graph()
        T.add_nodes_from(range(n_nodes))
        T.add_edges_from(tree_edges)
        if T.number_of_edges() != n_nodes - 1 or not nx.is_connected(T):
            rep.tree_ok = False
            rep.problems.append({"check": "tree", "edges": T.number_of_edges(), "nodes": n_nodes})
    G = nx.Graph()
    G.add_nodes_from(range(graph.n))
    G.add_edges_from(graph.edges)
    sets = [frozenset(p) for p in pieces]
    for block in nx.biconnected_components(G):
        if len(block) < 3:
            continue
        v0 = min(block)
        if not any(block <= sets[i] for i in member.get(v0, ())):
            rep.cycles_ok = False
            rep.problems.append({"check": "cycle", "block": sorted(block)[:12]})
    return rep


def verify_tree_graded(t):
    """Run :func:`check_tree_graded_layout` on piece copies plus arcs (as pieces)."""
    sets = t.piece_vertex_sets() + [frozenset(t.arc_vertices(c)) for c in sorted(t.parent)]
    return check_tree_graded_layout(t.realized, sets, t.tree_edges(), len(t.pieces))


@dataclass
class CollapseMap:
    """Vertex map from the realised space to the base graph."""

    phi: np.ndarray
    target: MetricGraph

    def __call__(self, v):
        return int(self.phi[v])


def collapse(t, state=None):
    """Piece copies go to their originals, arc offsets to the stored geodesic.

    ``state`` is accepted for symmetry with the construction pipeline and used
    only to fetch the base graph. Raises :class:`LipschitzViolation` if some
    edge is stretched.
    """
    if t.labels is None:
        raise ValueError("space has no labels; cannot collapse")
    target = state.graph if state is not None else None
    phi = np.empty(t.realized.n, dtype=np.int64)
    for i, order in enumerate(t.labels):
        phi[t.offsets[i]:t.offsets[i] + len(order)] = order
    for c in sorted(t.parent):
        img = t.arc_images[c]
        for s in range(1, t.arc_lengths[c]):
            phi[t.arc_start[c] + s - 1] = img[s]
    if target is None:
        raise ValueError("need the base graph (pass the construction state)")
    for u, v in t.realized.edges:
        a, b = int(phi[u]), int(phi[v])
        if a != b and not target.has_edge(a, b):
            raise LipschitzViolation((u, v), target.distance(a, b))
    return CollapseMap(phi, target)


@dataclass
class DistortionReport:
    M: int
    R: int = None
    pairs: int = 0
    exhaustive: bool = True
    max_excess: int = 0
    max_over_twice: int = None
    worst_pair: tuple = None
    lipschitz_violations: int = 0
    bound_violations: int = 0
    histogram: dict = field(default_factory=dict)
    examples: list = field(default_factory=list)

    @property
    def bound(self):
        return BOUND_FACTOR * self.M

    @property
    def bound_ok(self):
        return self.bound_violations == 0

    def to_dict(self):
        return {
            "kind": "distortion",
            "M": self.M,
            "R": self.R,
            "additive_constant": self.bound,
            "pairs": self.pairs,
            "exhaustive": self.exhaustive,
            "max_excess": self.max_excess,
            "max_excess_over_twice": self.max_over_twice,
            "worst_pair": list(self.worst_pair) if self.worst_pair else None,
            "lipschitz_violations": self.lipschitz_violations,
            "bound_violations": self.bound_violations,
            "bound_ok": self.bound_ok,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "examples": self.examples,
        }


def measure_distortion(t, cmap, M, pairs=None, seed=None, R=None, strict=True):
    """Compare ``d_T(x, y)`` with ``d_X(phi x, phi y)`` over pairs of realised vertices.

    Checks ``d_X(phi x, phi y) <= d_T(x, y) <= 2 d_X(phi x, phi y) + 3552 M``.
    ``pairs`` defaults to all pairs up to :func:`exhaustive_limit` vertices and
    must otherwise be a sample spec with a seed. With ``strict`` the first
    violation raises :class:`BoundViolated`.
    """
    G = t.realized
    phi = cmap.phi
    X = cmap.target
    if pairs is None:
        if G.n > exhaustive_limit():
            raise ValueError(f"{G.n} vertices exceed the exhaustive limit; pass pairs='sample:K' and a seed")
        pairs = "all"
    rep = DistortionReport(M=M, R=R)
    add = BOUND_FACTOR * M
    if pairs == "all":
        rep.exhaustive = True
        DT = G.distance_matrix()
        if X.n <= 4000:
            DX = X.distance_matrix()[np.ix_(phi, phi)]
        else:
            DX = np.stack([X.row(int(a))[phi] for a in phi])
        iu = np.triu_indices(G.n, 1)
        dt, dx = DT[iu].astype(np.int64), DX[iu].astype(np.int64)
        xs, ys = iu
    else:
        rep.exhaustive = False
        sel = select_pairs(range(G.n), pairs, seed)
        xs = np.array([p[0] for p in sel], dtype=np.int64)
        ys = np.array([p[1] for p in sel], dtype=np.int64)
        dt = np.array([G.row(int(x))[int(y)] for x, y in sel], dtype=np.int64)
        dx = np.array([X.row(int(phi[x]))[int(phi[y])] for x, y in sel], dtype=np.int64)
    rep.pairs = len(dt)
    if rep.pairs == 0:
        return rep
    excess = dt - dx
    low = np.flatnonzero(dx > dt)
    high = np.flatnonzero(dt > 2 * dx + add)
    rep.lipschitz_violations = len(low)
    rep.bound_violations = len(high)
    for idx in list(low[:5]) + list(high[:5]):
        rep.examples.append({"pair": [int(xs[idx]), int(ys[idx])], "d_T": int(dt[idx]), "d_X": int(dx[idx])})
    if strict and (len(low) or len(high)):
        idx = int(low[0]) if len(low) else int(high[0])
        raise BoundViolated((int(xs[idx]), int(ys[idx])), int(dt[idx]), int(dx[idx]), add)
    w = int(np.argmax(excess))
    rep.max_excess = int(excess[w])
    rep.worst_pair = (int(xs[w]), int(ys[w]))
    rep.max_over_twice = int((dt - 2 * dx).max())
    vals, counts = np.unique(excess, return_counts=True)
    rep.histogram = {int(a): int(b) for a, b in zip(vals, counts)}
    return rep


__all__ = [
    "BOUND_FACTOR",
    "CollapseMap",
    "DistortionReport",
    "TgPoint",
    "TreeGradedReport",
    "TreeGradedSpace",
    "build_tree_graded",
    "check_tree_graded_layout",
    "collapse",
    "exhaustive_limit",
    "measure_distortion",
    "tg_distance",
    "verify_tree_graded",
]
