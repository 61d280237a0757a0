"""Seeded generators for positive (tree-graded) and negative test families."""

import random
from dataclasses import dataclass, field

from .metric_graph import MetricGraph
from .rbp import PieceDecomposition, QiMap

TEMPLATES = ("cycle", "path", "complete", "edge")
FAMILIES = ("tree_of_pieces", "cycle_chain", "grid", "random_tree_graded", "subdivision")


@dataclass
class Generated:
    graph: MetricGraph
    decomposition: PieceDecomposition
    meta: dict = field(default_factory=dict)


def path_graph(n):
    return MetricGraph(n, [(k, k + 1) for k in range(n - 1)])


def cycle_graph(n):
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return MetricGraph(n, [(k, (k + 1) % n) for k in range(n)])


def template_edges(kind, size):
    """Local edge list of a piece template on vertices ``0..size-1``."""
    if kind == "cycle":
        if size < 3:
            raise ValueError("cycle pieces need size >= 3")
        return [(k, (k + 1) % size) for k in range(size)]
    if kind == "path":
        return [(k, k + 1) for k in range(size - 1)]
    if kind == "complete":
        return [(a, c) for a in range(size) for c in range(a + 1, size)]
    if kind == "edge":
        return [(0, 1)]
    raise ValueError(f"unknown template {kind!r}")


def prufer_tree(k, rng):
    """Uniform random labelled tree on ``0..k-1`` as an edge list."""
    if k == 1:
        return []
    if k == 2:
        return [(0, 1)]
    seq = [rng.randrange(k) for _ in range(k - 2)]
    degree = [1] * k
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(v for v in range(k) if degree[v] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, w = [v for v in range(k) if degree[v] == 1]
    edges.append((u, w))
    return edges


def _depth_tree(k, depth, rng):
    level = [0]
    edges = []
    for t in range(1, k):
        parent = rng.choice([p for p in range(t) if level[p] < depth])
        level.append(level[parent] + 1)
        edges.append((parent, t))
    return edges


def gen_tree_of_pieces(n_pieces, templates=("cycle",), sizes=(3, 8), seed=0, depth=None):
    """Pieces glued along a random tree at single shared vertices.

    The piece tree is a uniform labelled tree (Prüfer) rooted at piece 0, or a
    random recursive tree of bounded ``depth``. Each child is glued to its
    parent by identifying one uniformly chosen vertex of each. Piece 0 is the
    base piece.
    """
    if n_pieces < 1:
        raise ValueError("need at least one piece")
    rng = random.Random(seed)
    kinds = [rng.choice(list(templates)) for _ in range(n_pieces)]
    lo, hi = sizes
    piece_sizes = []
    for kind in kinds:
        if kind == "edge":
            piece_sizes.append(2)
        else:
            piece_sizes.append(rng.randint(max(lo, 3 if kind == "cycle" else 2), max(hi, 3)))
    tree = prufer_tree(n_pieces, rng) if depth is None else _depth_tree(n_pieces, depth, rng)
    adj = {p: [] for p in range(n_pieces)}
    for a, c in tree:
        adj[a].append(c)
        adj[c].append(a)
    order, parent_of, seen = [0], {0: None}, {0}
    for p in order:
        for c in sorted(adj[p]):
            if c not in seen:
                seen.add(c)
                parent_of[c] = p
                order.append(c)
    local_ids = {}
    next_id = 0
    glue = []
    for p in order:
        size = piece_sizes[p]
        ids = [None] * size
        if parent_of[p] is not None:
            at = rng.choice(local_ids[parent_of[p]])
            ids[rng.randrange(size)] = at
            glue.append({"piece": p, "parent": parent_of[p], "vertex": at})
        for k in range(size):
            if ids[k] is None:
                ids[k] = next_id
                next_id += 1
        local_ids[p] = ids
    edges = set()
    for p in range(n_pieces):
        ids = local_ids[p]
        for a, c in template_edges(kinds[p], piece_sizes[p]):
            u, v = ids[a], ids[c]
            edges.add((min(u, v), max(u, v)))
    graph = MetricGraph(next_id, sorted(edges))
    pieces = [frozenset(local_ids[p]) for p in range(n_pieces)]
    meta = {
        "family": "tree_of_pieces",
        "seed": seed,
        "templates": kinds,
        "sizes": piece_sizes,
        "piece_tree": sorted((parent_of[c], c) for c in parent_of if parent_of[c] is not None),
        "glue": sorted(glue, key=lambda d: d["piece"]),
    }
    return Generated(graph, PieceDecomposition(pieces, 0), meta)


def gen_cycle_chain(n_pieces, size=8):
    """Cycles ``C_size`` in a line, each glued to the antipode of the previous one."""
    ids_prev = None
    next_id = 0
    edges, pieces = [], []
    for _ in range(n_pieces):
        ids = []
        for k in range(size):
            if k == 0 and ids_prev is not None:
                ids.append(ids_prev[size // 2])
            else:
                ids.append(next_id)
                next_id += 1
        edges += [tuple(sorted((ids[k], ids[(k + 1) % size]))) for k in range(size)]
        pieces.append(frozenset(ids))
        ids_prev = ids
    meta = {"family": "cycle_chain", "n_pieces": n_pieces, "size": size}
    return Generated(MetricGraph(next_id, edges), PieceDecomposition(pieces, 0), meta)


def gen_grid(n):
    """``n x n`` grid with one piece per row (a space with no tree behaviour)."""
    if n < 3:
        raise ValueError("grid needs n >= 3")
    edges = []
    for r in range(n):
        for c in range(n):
            v = r * n + c
            if c + 1 < n:
                edges.append((v, v + 1))
            if r + 1 < n:
                edges.append((v, v + n))
    pieces = [frozenset(range(r * n, (r + 1) * n)) for r in range(n)]
    return Generated(MetricGraph(n * n, edges), PieceDecomposition(pieces, 0), {"family": "grid", "n": n})


def subdivide(g, k):
    """Replace every edge by a path of ``k`` edges.

    Original vertices keep their ids; the returned map is the inclusion, a
    ``(k, k - 1)`` quasi-isometry.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    edges = []
    next_id = g.n
    for u, v in g.edges:
        chain = [u] + list(range(next_id, next_id + k - 1)) + [v]
        next_id += k - 1
        edges += [(a, c) for a, c in zip(chain, chain[1:])]
    h = MetricGraph(next_id, edges)
    return h, QiMap(g, h, range(g.n), k, k - 1)


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    params: tuple = ()
    seed: int = 0

    @classmethod
    def make(cls, family, seed=0, **params):
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}")
        for key, val in params.items():
            if isinstance(val, int) and not isinstance(val, bool) and val <= 0 and key != "depth":
                raise ValueError(f"parameter {key} must be positive")
        return cls(family, tuple(sorted(params.items())), seed)


def generate(spec, base=None):
    """Dispatch a :class:`GeneratorSpec`; ``subdivision`` needs a ``base`` graph."""
    p = dict(spec.params)
    if spec.family == "tree_of_pieces":
        return gen_tree_of_pieces(
            p.get("pieces", 5),
            tuple(p.get("templates", ("cycle",))),
            tuple(p.get("sizes", (3, 8))),
            spec.seed,
            p.get("depth"),
        )
    if spec.family == "random_tree_graded":
        return gen_tree_of_pieces(p.get("pieces", 5), ("cycle", "path", "complete"), tuple(p.get("sizes", (3, 8))), spec.seed, p.get("depth"))
    if spec.family == "cycle_chain":
        return gen_cycle_chain(p.get("pieces", 3), p.get("size", 8))
    if spec.family == "grid":
        return gen_grid(p.get("n", 20))
    if spec.family == "subdivision":
        if base is None:
            raise ValueError("subdivision needs a base graph")
        h, q = subdivide(base.graph, p.get("k", 2))
        return Generated(h, None, {"family": "subdivision", "k": p.get("k", 2), "qimap": q})
    raise ValueError(f"unknown family {spec.family!r}")
