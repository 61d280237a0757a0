"""Embedding tree-graded spaces into products of trees, one piece at a time.

Each piece gets a :class:`PieceTreeEmbedding` into ``l`` trees. Replacing every
piece by the (strong, i.e. sup-metric) product of its trees gives a new
tree-graded space; collapsing that space onto the ``j``-th factor of every
piece gives a tree ``T_j``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (
    AttachPointUnmapped,
    CoordinateMismatch,
    CycleInCoordinateTree,
    EmbeddingInvalid,
    NonDecreasingViolated,
)
from .metric_graph import MetricGraph
from .sampling import select_pairs
from .treegraded import TgPoint, TreeGradedSpace, exhaustive_limit

POINT = MetricGraph(1, [])


def is_tree(g):
    return len(g.edges) == g.n - 1 and g.is_connected()


@dataclass
class PieceTreeEmbedding:
    """Map of a piece into ``l`` trees with certified constants ``(K, C)``.

    ``maps[j, v]`` is the vertex of ``trees[j]`` assigned to piece vertex ``v``.
    At construction the bound
    ``d(x, y) / K - C <= max_j d_j(x_j, y_j) <= K d(x, y) + C`` is checked on
    every pair.
    """

    piece: MetricGraph
    trees: list
    maps: np.ndarray
    K: float = 1
    C: float = 0
    name: str = "tabulated"
    check: bool = True

    def __post_init__(self):
        self.maps = np.asarray(self.maps, dtype=np.int64).reshape(len(self.trees), self.piece.n)
        for j, tr in enumerate(self.trees):
            if not is_tree(tr):
                raise EmbeddingInvalid(f"coordinate {j} of {self.name} embedding is not a tree")
            if self.maps[j].min(initial=0) < 0 or self.maps[j].max(initial=0) >= tr.n:
                raise EmbeddingInvalid(f"coordinate {j} maps outside its tree")
        if self.check:
            bad = self.violations()
            if bad:
                x, y, d, m = bad[0]
                raise EmbeddingInvalid(
                    f"{self.name} embedding breaks its ({self.K}, {self.C}) bound at ({x}, {y}): d={d}, sup={m}"
                )

    @property
    def l(self):
        return len(self.trees)

    def sup_matrix(self):
        out = np.zeros((self.piece.n, self.piece.n), dtype=np.int64)
        for j, tr in enumerate(self.trees):
            idx = self.maps[j]
            out = np.maximum(out, tr.distance_matrix()[np.ix_(idx, idx)])
        return out

    def violations(self):
        D = self.piece.distance_matrix().astype(np.float64)
        S = self.sup_matrix()
        bad = (D / self.K - self.C > S) | (S > self.K * D + self.C)
        return [(int(x), int(y), int(D[x, y]), int(S[x, y])) for x, y in zip(*np.nonzero(bad)) if x < y]

    def padded(self, l):
        """Append single-vertex trees up to ``l`` coordinates (adds zero distance)."""
        if l < self.l:
            raise CoordinateMismatch(f"cannot pad {self.l} coordinates down to {l}")
        extra = l - self.l
        maps = np.vstack([self.maps, np.zeros((extra, self.piece.n), dtype=np.int64)])
        return PieceTreeEmbedding(self.piece, self.trees + [POINT] * extra, maps, self.K, self.C, self.name, False)

    def to_dict(self):
        return {
            "name": self.name,
            "K": self.K,
            "C": self.C,
            "trees": [{"n": t.n, "edges": [list(e) for e in t.edges]} for t in self.trees],
            "map": self.maps.tolist(),
        }


def identity_embedding(piece):
    """A tree piece embeds isometrically into itself (``l = 1``)."""
    if not is_tree(piece):
        raise EmbeddingInvalid("identity embedding needs a tree piece")
    return PieceTreeEmbedding(piece, [piece], np.arange(piece.n)[None, :], 1, 0, "identity")


def cycle_order(piece):
    """Vertices of a cycle graph in cyclic order starting at 0, or ``None``."""
    if piece.n < 3 or len(piece.edges) != piece.n or not piece.is_connected():
        return None
    if any(len(piece.neighbors(v)) != 2 for v in range(piece.n)):
        return None
    order = [0, int(piece.neighbors(0)[0])]
    while len(order) < piece.n:
        a, b = (int(x) for x in piece.neighbors(order[-1]))
        order.append(a if a != order[-2] else b)
    return order


def cycle_embedding(piece):
    """Two folds of a cycle ``C_n`` onto paths: distances to ``v_0`` and to ``v_q``
    with ``q = (n + 1) // 4``. Certified with ``(K, C) = (2, 1)``."""
    order = cycle_order(piece)
    if order is None:
        raise EmbeddingInvalid("cycle embedding needs a cycle piece")
    n = piece.n
    half = n // 2
    path = MetricGraph(half + 1, [(k, k + 1) for k in range(half)])
    q = (n + 1) // 4
    maps = np.vstack([piece.row(order[0]), piece.row(order[q])])
    return PieceTreeEmbedding(piece, [path, path], maps, 2, 1, "cycle_fold")


def bfs_tree_embedding(piece):
    """Any connected piece into its breadth-first tree from a central vertex.

    Tree distances never shrink and exceed graph distances by at most twice
    the root eccentricity, so ``(K, C) = (1, 2 ecc)``.
    """
    D = piece.distance_matrix()
    ecc = D.max(axis=1)
    root = int(np.argmin(ecc))
    _, parent = kernels.bfs(piece.indptr, piece.indices, [root])
    edges = [(v, int(parent[v])) for v in range(piece.n) if parent[v] >= 0]
    tree = MetricGraph(piece.n, edges)
    return PieceTreeEmbedding(piece, [tree], np.arange(piece.n)[None, :], 1, 2 * int(ecc[root]), "bfs_tree")


def default_embedding(piece):
    if is_tree(piece):
        return identity_embedding(piece)
    if cycle_order(piece) is not None:
        return cycle_embedding(piece)
    return bfs_tree_embedding(piece)


def strong_product(graphs):
    """Strong product (sup metric) with mixed-radix ids, first factor most significant."""
    sizes = [g.n for g in graphs]
    closed = [np.array([0], dtype=np.int64)]  # closed neighbourhoods, built factor by factor
    for g in graphs:
        cg = [np.concatenate([[v], g.neighbors(v)]).astype(np.int64) for v in range(g.n)]
        closed = [(nb[:, None] * g.n + cg[b][None, :]).ravel() for nb in closed for b in range(g.n)]
    edges = [(idx, int(o)) for idx, nb in enumerate(closed) for o in nb.tolist() if o > idx]
    return MetricGraph(len(closed), edges), sizes


def _product_id(sizes, coords):
    return int(np.ravel_multi_index(tuple(int(c) for c in coords), sizes))


@dataclass
class ProductTreeEmbedding:
    source: TreeGradedSpace
    product: TreeGradedSpace
    embeds: list
    embed_map: np.ndarray  # source realised id -> product realised id
    factor_sizes: list
    trees: list = field(default_factory=list)  # T_j as TreeGradedSpace
    psi: list = field(default_factory=list)  # product realised id -> T_j realised id

    @property
    def l(self):
        return len(self.trees) if self.trees else self.embeds[0].l


def replace_pieces(t, embeds, pad=False):
    """Swap every piece of ``t`` for the product of its embedding's trees.

    Arcs keep their lengths and reattach at the images of their endpoints.
    """
    if len(embeds) != len(t.pieces):
        raise CoordinateMismatch("need exactly one embedding per piece")
    ls = {e.l for e in embeds}
    if len(ls) > 1:
        if not pad:
            raise CoordinateMismatch(f"embeddings have different numbers of coordinates {sorted(ls)}")
        embeds = [e.padded(max(ls)) for e in embeds]
    for i, (e, p) in enumerate(zip(embeds, t.pieces)):
        if e.piece.n != p.n:
            raise CoordinateMismatch(f"embedding {i} is for a piece with {e.piece.n} vertices, not {p.n}")
    products, sizes = [], []
    for e in embeds:
        g, sz = strong_product(e.trees)
        products.append(g)
        sizes.append(sz)
    attach = {}
    for c, (a, b) in t.attach.items():
        p = t.parent[c]
        ma, mb = embeds[c].maps[:, a], embeds[p].maps[:, b]
        if (ma < 0).any():
            raise AttachPointUnmapped(c, a)
        if (mb < 0).any():
            raise AttachPointUnmapped(p, b)
        attach[c] = (_product_id(sizes[c], ma), _product_id(sizes[p], mb))
    tp = TreeGradedSpace(products, t.parent, attach, t.arc_lengths, t.root)
    emap = np.empty(t.realized.n, dtype=np.int64)
    for v in range(t.realized.n):
        pt = t.point(v)
        if pt.kind == "piece":
            img = _product_id(sizes[pt.index], embeds[pt.index].maps[:, pt.position])
            emap[v] = tp.vertex(TgPoint("piece", pt.index, img))
        else:
            emap[v] = tp.vertex(pt)
    return ProductTreeEmbedding(t, tp, list(embeds), emap, sizes)


def coordinate_trees(pe):
    """Build ``T_1 .. T_l`` and the coordinate maps ``psi_j`` in place."""
    tp = pe.product
    l = pe.embeds[0].l
    trees, psi = [], []
    for j in range(l):
        pieces = [e.trees[j] for e in pe.embeds]
        attach = {}
        for c, (a, b) in tp.attach.items():
            ca = np.unravel_index(a, pe.factor_sizes[c])[j]
            cb = np.unravel_index(b, pe.factor_sizes[tp.parent[c]])[j]
            attach[c] = (int(ca), int(cb))
        tj = TreeGradedSpace(pieces, tp.parent, attach, tp.arc_lengths, tp.root)
        if not is_tree(tj.realized):
            raise CycleInCoordinateTree(j)
        m = np.empty(tp.realized.n, dtype=np.int64)
        for v in range(tp.realized.n):
            pt = tp.point(v)
            if pt.kind == "piece":
                cj = np.unravel_index(pt.position, pe.factor_sizes[pt.index])[j]
                m[v] = tj.vertex(TgPoint("piece", pt.index, int(cj)))
            else:
                m[v] = tj.vertex(pt)
        trees.append(tj)
        psi.append(m)
    pe.trees, pe.psi = trees, psi
    return trees, psi


def embed_tree_graded(t, embeds=None, pad=True):
    """Replace pieces (default embeddings when ``embeds`` is None) and build ``T_j``."""
    if embeds is None:
        embeds = [default_embedding(p) for p in t.pieces]
    pe = replace_pieces(t, embeds, pad=pad)
    coordinate_trees(pe)
    return pe


@dataclass
class EmbeddingReport:
    l: int
    pairs: int = 0
    exhaustive: bool = True
    edge_lipschitz_violations: int = 0
    pair_lipschitz_violations: int = 0
    sup_violations: int = 0
    sum_violations: int = 0
    scaled_sup_violations: int = 0
    worst_sup_deficit: int = 0
    sup_examples: list = field(default_factory=list)
    composite: dict = field(default_factory=dict)
    trees_ok: bool = True

    @property
    def passed(self):
        return (
            self.trees_ok
            and self.edge_lipschitz_violations == 0
            and self.pair_lipschitz_violations == 0
            and self.sup_violations == 0
        )

    def to_dict(self):
        return {
            "kind": "product_embedding",
            "l": self.l,
            "pairs": self.pairs,
            "exhaustive": self.exhaustive,
            "trees_ok": self.trees_ok,
            "edge_lipschitz_violations": self.edge_lipschitz_violations,
            "pair_lipschitz_violations": self.pair_lipschitz_violations,
            "sup_violations": self.sup_violations,
            "worst_sup_deficit": self.worst_sup_deficit,
            "sum_violations": self.sum_violations,
            "scaled_sup_violations": self.scaled_sup_violations,
            "sup_examples": self.sup_examples,
            "composite": self.composite,
            "passed": self.passed,
        }


def _pair_arrays(n, pairs, seed):
    if pairs is None:
        if n > exhaustive_limit():
            raise ValueError(f"{n} vertices exceed the exhaustive limit; pass pairs='sample:K' and a seed")
        pairs = "all"
    if pairs == "all":
        xs, ys = np.triu_indices(n, 1)
        return xs, ys, True
    sel = select_pairs(range(n), pairs, seed)
    return np.array([p[0] for p in sel], dtype=np.int64), np.array([p[1] for p in sel], dtype=np.int64), False


def _dist(g, xs, ys, exhaustive):
    if exhaustive:
        return g.distance_matrix()[xs, ys].astype(np.int64)
    return np.array([g.row(int(x))[int(y)] for x, y in zip(xs, ys)], dtype=np.int64)


def measure_embedding(pe, pairs=None, seed=None, strict=True):
    """Check the coordinate maps on the product space ``T(X)'``.

    Per pair ``(x, y)`` of realised vertices: every ``psi_j`` is 1-Lipschitz,
    and ``max_j d_{T_j} >= d_{T(X)'}`` (the sup check). The weaker
    ``sum_j d_{T_j} >= d`` and ``l * max_j d_{T_j} >= d`` are counted too.
    Also measures the composite map from the original space into the product
    of the ``T_j`` (sup metric). With ``strict`` a sup violation raises
    :class:`NonDecreasingViolated`.
    """
    tp = pe.product
    G = tp.realized
    l = len(pe.trees)
    rep = EmbeddingReport(l=l)
    rep.trees_ok = all(is_tree(tj.realized) for tj in pe.trees)
    for tj, m in zip(pe.trees, pe.psi):
        for u, v in G.edges:
            a, b = int(m[u]), int(m[v])
            if a != b and not tj.realized.has_edge(a, b):
                rep.edge_lipschitz_violations += 1
    xs, ys, rep.exhaustive = _pair_arrays(G.n, pairs, seed)
    rep.pairs = len(xs)
    d = _dist(G, xs, ys, rep.exhaustive)
    coord = [_coord_dist(tj, m, xs, ys) for tj, m in zip(pe.trees, pe.psi)]
    sup = np.max(coord, axis=0) if coord else np.zeros_like(d)
    tot = np.sum(coord, axis=0) if coord else np.zeros_like(d)
    rep.pair_lipschitz_violations = int(sum((c > d).sum() for c in coord))
    bad = np.flatnonzero(sup < d)
    rep.sup_violations = len(bad)
    rep.sum_violations = int((tot < d).sum())
    rep.scaled_sup_violations = int((l * sup < d).sum())
    if len(bad):
        rep.worst_sup_deficit = int((d - sup).max())
        for idx in bad[:5]:
            rep.sup_examples.append(
                {"pair": [int(xs[idx]), int(ys[idx])], "d": int(d[idx]), "coords": [int(c[idx]) for c in coord]}
            )
        if strict:
            idx = int(bad[0])
            raise NonDecreasingViolated((int(xs[idx]), int(ys[idx])), int(sup[idx]), int(d[idx]))
    rep.composite = composite_constants(pe, pairs, seed)
    return rep


def _coord_dist(tj, m, xs, ys):
    g = tj.realized
    if g.n <= 4000:
        return g.distance_matrix()[m[xs], m[ys]].astype(np.int64)
    return np.array([g.row(int(m[x]))[int(m[y])] for x, y in zip(xs, ys)], dtype=np.int64)


def composite_constants(pe, pairs=None, seed=None):
    """Measured constants of ``T(X) -> prod_j T_j`` (sup metric on the product)."""
    t = pe.source
    n = t.realized.n
    xs, ys, exhaustive = _pair_arrays(n, pairs, seed)
    d = _dist(t.realized, xs, ys, exhaustive)
    px, py = pe.embed_map[xs], pe.embed_map[ys]
    coord = [_coord_dist(tj, m, px, py) for tj, m in zip(pe.trees, pe.psi)]
    sup = np.max(coord, axis=0)
    K = max(max(e.K for e in pe.embeds), 1)
    C_meas = float(max(0.0, (d / K - sup).max(initial=0), (sup - K * d).max(initial=0)))
    dp = _dist(pe.product.realized, px, py, False) if not exhaustive else pe.product.realized.distance_matrix()[px, py]
    pos = d > 0
    return {
        "image_sup_violations": int((sup < dp).sum()),
        "pairs": int(len(d)),
        "K": K,
        "C": C_meas,
        "max_expansion": float((sup[pos] / d[pos]).max(initial=0)),
        "max_contraction": float((d[pos] / np.maximum(sup[pos], 1)).max(initial=0)),
        "piece_C": max(e.C for e in pe.embeds),
    }


__all__ = [
    "EmbeddingReport",
    "PieceTreeEmbedding",
    "ProductTreeEmbedding",
    "bfs_tree_embedding",
    "composite_constants",
    "coordinate_trees",
    "cycle_embedding",
    "cycle_order",
    "default_embedding",
    "embed_tree_graded",
    "identity_embedding",
    "is_tree",
    "measure_embedding",
    "replace_pieces",
    "strong_product",
]
