"""Piece decompositions, bottleneck chains and relative-bottleneck verification.

Besides checking stored chains this module can search for chains, transport a
structure along a quasi-isometry, thicken pieces so that small balls never cut
them, and produce certificates for tree-graded graphs.
"""

import math
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from . import kernels
from .errors import ChainMalformed, GraphError, NotTreeGraded, TransportFailed
from .metric_graph import MetricGraph, avoiding_path, closed_neighborhood
from .sampling import select_pairs


@dataclass(frozen=True)
class PieceDecomposition:
    """Indexed cover of the vertex set; ``basepoint`` optionally pins ``e``."""

    pieces: tuple
    base_piece: int = 0
    basepoint: int = None

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(frozenset(int(v) for v in p) for p in self.pieces))

    def __len__(self):
        return len(self.pieces)

    def __getitem__(self, i):
        return self.pieces[i]

    def validate(self, g):
        if not self.pieces:
            raise GraphError("decomposition has no pieces")
        for i, p in enumerate(self.pieces):
            if not p:
                raise GraphError(f"piece {i} is empty")
            if min(p) < 0 or max(p) >= g.n:
                raise GraphError(f"piece {i} has vertices outside 0..{g.n - 1}")
        if not 0 <= self.base_piece < len(self.pieces):
            raise GraphError(f"base piece {self.base_piece} out of range")
        covered = frozenset().union(*self.pieces)
        if len(covered) != g.n:
            missing = sorted(set(range(g.n)) - covered)[:5]
            raise GraphError(f"pieces do not cover the graph, e.g. {missing}")
        if self.basepoint is not None and self.basepoint not in self.pieces[self.base_piece]:
            raise GraphError("basepoint is not in the base piece")

    def membership(self, n):
        """List of piece indices containing each vertex."""
        out = [[] for _ in range(n)]
        for i, p in enumerate(self.pieces):
            for v in p:
                out[v].append(i)
        return out


@dataclass(frozen=True)
class BottleneckChain:
    """Pieces ``i_0 .. i_s`` with witnesses ``w_r`` in consecutive intersections."""

    pieces: tuple
    witnesses: tuple

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(int(p) for p in self.pieces))
        object.__setattr__(self, "witnesses", tuple(int(w) for w in self.witnesses))

    @property
    def source(self):
        return self.pieces[0]

    @property
    def target(self):
        return self.pieces[-1]

    def reversed(self):
        return BottleneckChain(self.pieces[::-1], self.witnesses[::-1])

    def to_dict(self):
        return {"pieces": list(self.pieces), "witnesses": list(self.witnesses)}


class RbpStructure:
    """Graph + decomposition + constant ``M`` + certificate chains.

    Chains are stored under ``(i, j)`` with ``i < j``; :meth:`chain` returns
    the reversed chain for ``i > j``.
    """

    def __init__(self, graph, decomposition, M, certificates=None, meta=None):
        if int(M) != M or M <= 0:
            raise ValueError(f"M must be a positive integer, got {M}")
        decomposition.validate(graph)
        self.graph = graph
        self.decomposition = decomposition
        self.M = int(M)
        self.certificates = {}
        if isinstance(certificates, dict):
            certificates = certificates.values()
        for chain in certificates or ():
            self.add_chain(chain)
        # provenance, e.g. {"thickened": True, "b": 15}
        self.meta = dict(meta or {})
        self._sep = None

    @property
    def pieces(self):
        return self.decomposition.pieces

    def add_chain(self, chain):
        i, j = chain.source, chain.target
        if i > j:
            chain = chain.reversed()
            i, j = j, i
        self.certificates[(i, j)] = chain

    def chain(self, i, j):
        if i < j:
            return self.certificates.get((i, j))
        c = self.certificates.get((j, i))
        return None if c is None else c.reversed()

    def separation(self):
        if self._sep is None:
            self._sep = SeparationCache(self.graph, self.M, self.pieces)
        return self._sep

    def replace(self, decomposition=None, M=None, certificates=None):
        return RbpStructure(
            self.graph,
            decomposition or self.decomposition,
            M or self.M,
            self.certificates if certificates is None else certificates,
            self.meta,
        )


class SeparationCache:
    """Component labellings of ``G - B(w; M)`` per witness, with per-piece label sets."""

    def __init__(self, graph, M, pieces):
        self.graph = graph
        self.M = M
        self.piece_arrays = [np.array(sorted(p), dtype=np.int64) for p in pieces]
        self._labels = {}
        self._piece_labels = {}

    @property
    def labellings(self):
        # distinct witnesses labelled; unaffected by thread interleaving
        return len(self._labels)

    def labels(self, w):
        lab = self._labels.get(w)
        if lab is None:
            ball = self.graph.row(w) < self.M
            lab = kernels.component_labels(self.graph.indptr, self.graph.indices, ball.view(np.uint8))
            self._labels[w] = lab
        return lab

    def piece_labels(self, w, i):
        key = (w, i)
        s = self._piece_labels.get(key)
        if s is None:
            lab = self.labels(w)[self.piece_arrays[i]]
            s = frozenset(lab[lab >= 0].tolist())
            self._piece_labels[key] = s
        return s

    def separates(self, w, i, j):
        """Whether ``B(w; M)`` meets every path between pieces ``i`` and ``j``."""
        return self.piece_labels(w, i).isdisjoint(self.piece_labels(w, j))

    def swallows(self, w, i):
        return not self.piece_labels(w, i)


def _check_chain_shape(s, chain):
    k = len(s.pieces)
    if len(chain.pieces) < 2 or len(chain.witnesses) != len(chain.pieces) - 1:
        raise ChainMalformed(chain, "need s >= 1 witnesses for s + 1 pieces")
    for a, b in zip(chain.pieces, chain.pieces[1:]):
        if not (0 <= a < k and 0 <= b < k):
            raise ChainMalformed(chain, "piece index out of range")
        if a == b:
            raise ChainMalformed(chain, f"consecutive pieces repeat ({a})")
    for r, w in enumerate(chain.witnesses):
        a, b = chain.pieces[r], chain.pieces[r + 1]
        if w not in s.pieces[a] or w not in s.pieces[b]:
            raise ChainMalformed(chain, f"witness {w} not in X_{a} and X_{b}")


def verify_bottleneck_chain(s, chain):
    """Check every witness ball of ``chain`` separates its end pieces.

    Returns ``(True, None)`` or ``(False, path)`` where ``path`` avoids the
    first failing witness ball.
    """
    _check_chain_shape(s, chain)
    sep = s.separation()
    i, j = chain.source, chain.target
    for w in chain.witnesses:
        if not sep.separates(w, i, j):
            ball = (s.graph.row(w) < s.M).view(np.uint8)
            return False, avoiding_path(s.graph, s.pieces[i], s.pieces[j], ball)
    return True, None


def candidate_witnesses(s):
    """Vertices lying in at least two pieces."""
    member = s.decomposition.membership(s.graph.n)
    return [v for v in range(s.graph.n) if len(member[v]) >= 2], member


def search_certificate(s, i, j, M=None):
    """Find a chain from piece ``i`` to piece ``j`` or return ``None``.

    Every separating witness in a piece intersection links the pieces that
    contain it; a breadth-first search over pieces, expanding witnesses in
    order of their distance to ``X_i``, yields a shortest chain. Since every
    valid chain is a path in this link graph the search is complete for the
    given ``M``.
    """
    if i == j:
        raise ValueError("search_certificate needs i != j")
    if M is not None and M != s.M:
        s = RbpStructure(s.graph, s.decomposition, M)
    sep = s.separation()
    cands, member = candidate_witnesses(s)
    if not cands:
        return None
    dist_i = s.graph.distance_to_set(s.pieces[i])
    cands.sort(key=lambda w: (int(dist_i[w]), w))
    links = {}
    for w in cands:
        if not sep.separates(w, i, j):
            continue
        for a in member[w]:
            for b in member[w]:
                if a != b:
                    links.setdefault(a, []).append((w, b))
    prev = {i: None}
    queue = deque([i])
    while queue:
        a = queue.popleft()
        if a == j:
            break
        for w, b in links.get(a, ()):
            if b not in prev:
                prev[b] = (a, w)
                queue.append(b)
    if j not in prev:
        return None
    pieces, witnesses = [j], []
    cur = j
    while prev[cur] is not None:
        a, w = prev[cur]
        pieces.append(a)
        witnesses.append(w)
        cur = a
    return BottleneckChain(pieces[::-1], witnesses[::-1])


@dataclass
class PairVerdict:
    i: int
    j: int
    verdict: str  # verified | refuted | unknown
    chain: BottleneckChain = None
    witness: list = None
    searched: bool = False
    degenerate: bool = False
    note: str = ""

    def to_dict(self):
        d = {"pair": [self.i, self.j], "verdict": self.verdict, "searched": self.searched}
        if self.chain is not None:
            d["chain"] = self.chain.to_dict()
        if self.witness is not None:
            d["witness"] = list(self.witness)
        if self.degenerate:
            d["degenerate"] = True
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class VerificationReport:
    M: int
    entries: list = field(default_factory=list)
    counters: dict = field(default_factory=dict)
    seconds: float = 0.0

    def count(self, verdict):
        return sum(1 for e in self.entries if e.verdict == verdict)

    @property
    def all_verified(self):
        return all(e.verdict == "verified" for e in self.entries)

    @property
    def exit_code(self):
        if self.count("refuted"):
            return 1
        if self.count("unknown"):
            return 2
        return 0

    def certificates(self):
        return [e.chain for e in self.entries if e.verdict == "verified" and e.chain is not None]

    def to_dict(self):
        return {
            "kind": "rbp_verification",
            "M": self.M,
            "pairs": len(self.entries),
            "verified": self.count("verified"),
            "refuted": self.count("refuted"),
            "unknown": self.count("unknown"),
            "degenerate": sum(1 for e in self.entries if e.degenerate),
            "counters": dict(sorted(self.counters.items())),
            "entries": [e.to_dict() for e in self.entries],
        }


def _refutation_path(s, i, j):
    """A path from X_i to X_j avoiding the balls of every candidate witness."""
    cands, _ = candidate_witnesses(s)
    blocked = np.zeros(s.graph.n, dtype=np.uint8)
    if cands:
        d = s.graph.distance_to_set(cands)
        blocked = ((d >= 0) & (d < s.M)).view(np.uint8).astype(np.uint8)
    return avoiding_path(s.graph, s.pieces[i], s.pieces[j], blocked)


def _verify_pair(s, i, j):
    sep = s.separation()
    chain = s.chain(i, j)
    note = ""
    if chain is not None:
        ok, _ = verify_bottleneck_chain(s, chain)
        if ok:
            degenerate = any(sep.swallows(w, i) or sep.swallows(w, j) for w in chain.witnesses)
            return PairVerdict(i, j, "verified", chain, degenerate=degenerate)
        note = "stored chain failed; searched"
    found = search_certificate(s, i, j)
    if found is not None:
        degenerate = any(sep.swallows(w, i) or sep.swallows(w, j) for w in found.witnesses)
        return PairVerdict(i, j, "verified", found, searched=True, degenerate=degenerate, note=note)
    path = _refutation_path(s, i, j)
    if path is not None:
        return PairVerdict(i, j, "refuted", witness=path, searched=True, note="path avoids every candidate ball")
    return PairVerdict(i, j, "unknown", searched=True, note="no chain among candidate witnesses")


def verify_rbp(s, pairs="all", seed=None, threads=1):
    """Verify (or search and verify) a chain for every selected piece pair."""
    t0 = time.perf_counter()
    sel = select_pairs(range(len(s.pieces)), pairs, seed)
    if threads > 1 and len(sel) > 1:
        with ThreadPoolExecutor(threads) as pool:
            entries = list(pool.map(lambda p: _verify_pair(s, *p), sel))
    else:
        entries = [_verify_pair(s, i, j) for i, j in sel]
    report = VerificationReport(M=s.M, entries=entries)
    report.counters = {
        "ball_labellings": s.separation().labellings,
        "searches": sum(1 for e in entries if e.searched),
    }
    report.seconds = time.perf_counter() - t0
    return report


def with_verified_certificates(s, report):
    """Copy of ``s`` whose certificates are the chains verified in ``report``."""
    return RbpStructure(s.graph, s.decomposition, s.M, report.certificates(), s.meta)


@dataclass
class QuasiConvexityResult:
    piece: int
    radius: int
    ok: bool
    worst_vertex: int
    worst_distance: int
    worst_pair: tuple


def check_quasi_convexity(s, i, C=0, radius=None):
    """Check geodesics between points of ``N_C(X_i)`` stay in ``N_radius(X_i)``.

    ``radius`` defaults to ``2M + 2 max(M, C)``. Reports the geodesic vertex
    farthest from the piece.
    """
    g = s.graph
    if radius is None:
        radius = 2 * s.M + 2 * max(s.M, C)
    region = sorted(closed_neighborhood(g, s.pieces[i], C))
    to_piece = g.distance_to_set(s.pieces[i])
    idx = np.array(region, dtype=np.int64)
    if g._matrix is not None or g.n <= 1500:
        rows = g.distance_matrix()[idx]
    else:
        rows = kernels.distance_rows(g.indptr, g.indices, idx)
    worst = (-1, region[0], (region[0], region[0]))
    for a, x in enumerate(region):
        dxy = rows[a, idx]
        on_geo = rows[a][None, :] + rows == dxy[:, None]
        vals = np.where(on_geo, to_piece[None, :], -1)
        far = vals.max(axis=1)
        b = int(np.argmax(far))
        if far[b] > worst[0]:
            v = int(np.argmax(vals[b]))
            worst = (int(far[b]), v, (x, region[b]))
    return QuasiConvexityResult(i, radius, worst[0] <= radius, worst[1], worst[0], worst[2])


@dataclass
class QiMap:
    """Vertex map ``q`` between graphs with declared constants ``(K, C)``."""

    source: MetricGraph
    target: MetricGraph
    mapping: tuple
    K: float
    C: float

    def __post_init__(self):
        self.mapping = tuple(int(v) for v in self.mapping)
        if len(self.mapping) != self.source.n:
            raise ValueError("mapping must cover every source vertex")
        if self.K < 1 or self.C < 0:
            raise ValueError("need K >= 1 and C >= 0")

    def __call__(self, v):
        return self.mapping[v]

    def check(self, pairs="all", seed=None):
        """List of violated inequalities (empty when the declared constants hold)."""
        bad = []
        for x, y in select_pairs(range(self.source.n), pairs, seed):
            d = self.source.distance(x, y)
            dq = self.target.distance(self.mapping[x], self.mapping[y])
            if not (d / self.K - self.C <= dq <= self.K * d + self.C):
                bad.append(("distance", x, y, d, dq))
        image = sorted(set(self.mapping))
        near = self.target.distance_to_set(image)
        far = np.flatnonzero(near > self.C)
        if len(far):
            bad.append(("codensity", int(far[0]), int(near[far[0]])))
        return bad


def quasi_inverse(q, K, C):
    """Map each target vertex to the preimage of a nearest image point.

    Nearest points come from one multi-source BFS over the image, so ties
    resolve deterministically. The constants ``(K, C)`` are declared by the
    caller; :meth:`QiMap.check` confirms them.
    """
    image = {}
    for v, t in enumerate(q.mapping):
        image.setdefault(t, v)
    dist, parent = kernels.bfs(q.target.indptr, q.target.indices, sorted(image))
    back = []
    for t in range(q.target.n):
        root = t
        while parent[root] != -1:
            root = int(parent[root])
        back.append(image[root])
    return QiMap(q.target, q.source, back, K, C)


def transported_constant(M, K, C):
    return math.ceil(K * (K * C + 2 * C + M) + C)


def transport_qi(s, q):
    """Push ``s`` forward along ``q``: pieces ``N_C(q(X_i))``, witnesses ``q(w)``."""
    if q.source != s.graph:
        raise ValueError("QiMap source is not the structure's graph")
    C = math.ceil(q.C)
    pieces = [closed_neighborhood(q.target, {q(v) for v in p}, C) for p in s.pieces]
    dec = PieceDecomposition(pieces, s.decomposition.base_piece)
    M2 = transported_constant(s.M, q.K, q.C)
    chains = [BottleneckChain(c.pieces, [q(w) for w in c.witnesses]) for c in s.certificates.values()]
    out = RbpStructure(q.target, dec, M2, chains)
    for (i, j), chain in sorted(out.certificates.items()):
        ok, witness = verify_bottleneck_chain(out, chain)
        if not ok:
            raise TransportFailed((i, j), witness)
    return out


@dataclass
class ThickenInfo:
    b: int
    M_in: int
    basepoint: int
    anchor: int
    levels: int
    layer_ids: dict  # piece -> array of shape (levels, |X''_i|); row 0 holds original ids
    piece_vertices: dict  # piece -> sorted original vertices of X''_i


def thicken(s, b=None):
    """Make pieces robust against small cutting balls.

    Steps: take ``4 M`` neighbourhoods of the pieces; attach a fresh basepoint
    ``e`` by one edge to the base piece; replace each piece by its strong
    product with the path ``0 .. 2b+1`` and glue the level-0 copies of every
    original vertex. Witnesses keep their ids (level 0), the constant becomes
    ``9 M``. Returns ``(structure, info)``.
    """
    g = s.graph
    M = s.M
    if b is None:
        b = 15 * M
    if b < 0:
        raise ValueError("b must be nonnegative")
    levels = 2 * b + 2
    e = g.n
    base = s.decomposition.base_piece
    anchor = min(s.pieces[base])
    thick = [set(closed_neighborhood(g, p, 4 * M)) for p in s.pieces]
    thick[base].add(e)
    base_edges = list(g.edges) + [(anchor, e)]
    adj = {}
    for u, v in base_edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)

    next_id = g.n + 1
    edges = set()
    layer_ids = {}
    piece_vertices = {}
    out_pieces = []
    for i, members in enumerate(thick):
        order = sorted(members)
        piece_vertices[i] = order
        pos = {v: k for k, v in enumerate(order)}
        ids = np.empty((levels, len(order)), dtype=np.int64)
        ids[0] = order
        for t in range(1, levels):
            ids[t] = np.arange(next_id, next_id + len(order))
            next_id += len(order)
        layer_ids[i] = ids
        local = [(pos[u], pos[v]) for u in order for v in adj.get(u, ()) if v in pos and u < v]
        for t in range(levels):
            for k in range(len(order)):
                if t + 1 < levels:
                    edges.add(_edge(ids[t, k], ids[t + 1, k]))
            for a, c in local:
                edges.add(_edge(ids[t, a], ids[t, c]))
                if t + 1 < levels:
                    edges.add(_edge(ids[t, a], ids[t + 1, c]))
                    edges.add(_edge(ids[t + 1, a], ids[t, c]))
        out_pieces.append(frozenset(ids.ravel().tolist()))
    g2 = MetricGraph(next_id, sorted(edges))
    dec = PieceDecomposition(out_pieces, base, basepoint=e)
    chains = list(s.certificates.values())
    out = RbpStructure(g2, dec, 9 * M, chains, {"thickened": True, "b": b, "M_in": M})
    info = ThickenInfo(b, M, e, anchor, levels, layer_ids, piece_vertices)
    return out, info


@dataclass
class CutReport:
    piece: int
    center: int
    radius: int
    diameter: int


def find_cutting_ball(s, b=None, max_radius=None, pieces=None):
    """Exhaustive scan for a ball that cuts a piece.

    Looks for a centre ``c`` and radius ``1 <= r <= max_radius`` (default
    ``b``) such that ``X_i - B(c; r)`` is nonempty and disconnected while
    ``B(c; r) & X_i`` has diameter at most ``2b``. ``b`` defaults to ``15M``.
    Returns the first such :class:`CutReport` in (piece, centre, radius)
    order, or ``None``.
    """
    g = s.graph
    if b is None:
        b = 15 * s.M
    if max_radius is None:
        max_radius = b
    indices = range(len(s.pieces)) if pieces is None else pieces
    for i in indices:
        members = np.array(sorted(s.pieces[i]), dtype=np.int64)
        outside = np.ones(g.n, dtype=np.uint8)
        outside[members] = 0
        near = g.distance_to_set(s.pieces[i])
        centers = np.flatnonzero((near >= 0) & (near < max_radius))
        for c in centers.tolist():
            dc = g.row(c)[members]
            for t in np.unique(dc).tolist():
                r = t + 1
                if r > max_radius:
                    break
                inside = members[dc <= t]
                if len(inside) == len(members):
                    break
                blocked = outside.copy()
                blocked[inside] = 1
                lab = kernels.component_labels(g.indptr, g.indices, blocked)
                if lab[members[dc > t]].max() == 0:
                    continue
                diam = _set_diameter(g, inside)
                if diam <= 2 * b:
                    return CutReport(i, c, r, diam)
    return None


def _set_diameter(g, vertices):
    if len(vertices) <= 1:
        return 0
    if g._matrix is not None:
        sub = g._matrix[np.ix_(vertices, vertices)]
    else:
        sub = kernels.distance_rows(g.indptr, g.indices, vertices)[:, vertices]
    return int(sub.max())


def _edge(u, v):
    u, v = int(u), int(v)
    return (u, v) if u < v else (v, u)


def check_tree_graded(g, pieces):
    """Raise :class:`NotTreeGraded` unless pieces pairwise share at most one
    vertex, the piece/shared-vertex incidence graph is a forest, and every
    biconnected block with a cycle lies in a single piece."""
    pieces = [frozenset(p) for p in pieces]
    member = [[] for _ in range(g.n)]
    for i, p in enumerate(pieces):
        for v in p:
            member[v].append(i)
    shared = {}
    for v, ms in enumerate(member):
        for a in range(len(ms)):
            for c in range(a + 1, len(ms)):
                key = (ms[a], ms[c])
                if key in shared:
                    raise NotTreeGraded(key, f"pieces share vertices {shared[key]} and {v}")
                shared[key] = v
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for v, ms in enumerate(member):
        if len(ms) < 2:
            continue
        for i in ms:
            a, c = find(("v", v)), find(("p", i))
            if a == c:
                raise NotTreeGraded((ms[0], ms[1]), f"piece incidences around vertex {v} form a cycle")
            parent[a] = c
    G = nx.Graph(list(g.edges))
    G.add_nodes_from(range(g.n))
    for block in nx.biconnected_components(G):
        if len(block) < 3:
            continue
        v0 = min(block)
        if not any(block <= pieces[i] for i in member[v0]):
            owners = sorted({i for v in block for i in member[v]})
            raise NotTreeGraded(tuple(owners[:2]), f"cycle through {sorted(block)[:6]} spans several pieces")


def tree_graded_certificate(g, pieces, base_piece=0):
    """RBP structure for a tree-graded graph: pieces ``N_1(X_i)``, ``M = 2``.

    Each chain walks a geodesic from ``X_i`` to the nearest point of ``X_j``,
    recording a piece the first time the walk enters it; the witness for the
    step into a new piece is the last vertex before entering it.
    """
    check_tree_graded(g, pieces)
    raw = [frozenset(p) for p in pieces]
    member = [[] for _ in range(g.n)]
    for i, p in enumerate(raw):
        for v in p:
            member[v].append(i)
    chains = []
    k = len(raw)
    for i in range(k):
        dist, parent = kernels.bfs(g.indptr, g.indices, sorted(raw[i]))
        for j in range(i + 1, k):
            targets = np.array(sorted(raw[j]), dtype=np.int64)
            y = int(targets[np.argmin(dist[targets])])
            path = [y]
            while parent[path[-1]] != -1:
                path.append(int(parent[path[-1]]))
            path.reverse()
            chains.append(_walk_chain(path, raw, member, i, j))
    nbhd = [closed_neighborhood(g, p, 1) for p in raw]
    return RbpStructure(g, PieceDecomposition(nbhd, base_piece), 2, chains)


def _walk_chain(path, raw, member, i, j):
    seq, wit = [i], []
    cur = i
    for t in range(1, len(path)):
        v = path[t]
        if v in raw[cur]:
            continue
        opts = member[v]
        owners = [p for p in opts if path[t - 1] in raw[p]]
        if j in opts:
            nxt = j
        elif owners:
            # the piece holding the traversed edge
            nxt = min(owners)
        else:
            fresh = [p for p in opts if p not in seq]
            nxt = min(fresh) if fresh else min(opts)
        seq.append(nxt)
        wit.append(path[t - 1])
        cur = nxt
        if cur == j:
            break
    if cur != j:
        seq.append(j)
        wit.append(path[-1])
    return BottleneckChain(seq, wit)


__all__ = [
    "BottleneckChain",
    "CutReport",
    "PairVerdict",
    "PieceDecomposition",
    "QiMap",
    "QuasiConvexityResult",
    "RbpStructure",
    "SeparationCache",
    "ThickenInfo",
    "VerificationReport",
    "candidate_witnesses",
    "check_quasi_convexity",
    "check_tree_graded",
    "find_cutting_ball",
    "quasi_inverse",
    "search_certificate",
    "thicken",
    "transport_qi",
    "transported_constant",
    "tree_graded_certificate",
    "verify_bottleneck_chain",
    "verify_rbp",
    "with_verified_certificates",
]
