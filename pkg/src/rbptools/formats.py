"""JSON documents for graphs, decompositions and piece embeddings, plus DOT export.

All writers sort keys and end with a newline so equal inputs give equal bytes.
"""

import json

import numpy as np

from .errors import GraphError, SchemaError
from .metric_graph import MetricGraph
from .rbp import BottleneckChain, PieceDecomposition

VERSION = 1
GRAPH = "rbptools.graph"
PIECES = "rbptools.pieces"
EMBEDDINGS = "rbptools.embeddings"


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


def write(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def load(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as ex:
        raise SchemaError(str(ex), field=str(path)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as ex:
        raise SchemaError(f"invalid JSON at line {ex.lineno}, column {ex.colno}: {ex.msg}", field=str(path)) from None


def _need(doc, key, kind, where=""):
    if not isinstance(doc, dict):
        raise SchemaError("expected an object", field=where or "<root>")
    if key not in doc:
        raise SchemaError("missing field", field=f"{where}{key}")
    val = doc[key]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise SchemaError(f"expected an integer, got {val!r}", field=f"{where}{key}")
    if kind is list and not isinstance(val, list):
        raise SchemaError("expected an array", field=f"{where}{key}")
    return val


def _check_header(doc, fmt):
    got = doc.get("format") if isinstance(doc, dict) else None
    if got != fmt:
        raise SchemaError(f"expected format {fmt!r}, got {got!r}", field="format")
    if doc.get("version") != VERSION:
        raise SchemaError(f"unsupported version {doc.get('version')!r}", field="version")


def _int_pair(item, field):
    if not (isinstance(item, list) and len(item) == 2 and all(isinstance(x, int) and not isinstance(x, bool) for x in item)):
        raise SchemaError(f"expected [u, v] integers, got {item!r}", field=field)
    return item[0], item[1]


# -- graphs ---------------------------------------------------------------
def graph_to_doc(g):
    return {"format": GRAPH, "version": VERSION, "n": g.n, "edges": [list(e) for e in g.edges]}


def graph_from_doc(doc):
    _check_header(doc, GRAPH)
    n = _need(doc, "n", int)
    edges = [_int_pair(e, f"edges[{k}]") for k, e in enumerate(_need(doc, "edges", list))]
    try:
        return MetricGraph(n, edges)
    except GraphError as ex:
        raise SchemaError(str(ex), field="edges") from None


# -- decompositions -------------------------------------------------------
def pieces_to_doc(dec, M=None, certificates=None):
    doc = {
        "format": PIECES,
        "version": VERSION,
        "base_piece": dec.base_piece,
        "pieces": [sorted(p) for p in dec.pieces],
    }
    if dec.basepoint is not None:
        doc["basepoint"] = dec.basepoint
    if M is not None:
        doc["M"] = M
    if certificates:
        doc["certificates"] = [c.to_dict() for c in certificates]
    return doc


def pieces_from_doc(doc, g=None):
    """Returns ``(decomposition, M or None, [chains])``."""
    _check_header(doc, PIECES)
    raw = _need(doc, "pieces", list)
    pieces = []
    for k, p in enumerate(raw):
        if not isinstance(p, list) or not p:
            raise SchemaError("piece must be a nonempty array of vertex ids", field=f"pieces[{k}]")
        for t, v in enumerate(p):
            if isinstance(v, bool) or not isinstance(v, int):
                raise SchemaError(f"vertex id must be an integer, got {v!r}", field=f"pieces[{k}][{t}]")
            if g is not None and not 0 <= v < g.n:
                raise SchemaError(f"vertex {v} outside 0..{g.n - 1}", field=f"pieces[{k}][{t}]")
        pieces.append(p)
    base = doc.get("base_piece", 0)
    if isinstance(base, bool) or not isinstance(base, int) or not 0 <= base < len(pieces):
        raise SchemaError(f"base piece {base!r} out of range", field="base_piece")
    basepoint = doc.get("basepoint")
    M = doc.get("M")
    if M is not None and (isinstance(M, bool) or not isinstance(M, int) or M <= 0):
        raise SchemaError(f"M must be a positive integer, got {M!r}", field="M")
    chains = []
    for k, c in enumerate(doc.get("certificates", [])):
        ps = _need(c, "pieces", list, f"certificates[{k}].")
        ws = _need(c, "witnesses", list, f"certificates[{k}].")
        if len(ws) != len(ps) - 1:
            raise SchemaError("need one witness per consecutive piece pair", field=f"certificates[{k}]")
        chains.append(BottleneckChain(ps, ws))
    dec = PieceDecomposition(pieces, base, basepoint)
    if g is not None:
        try:
            dec.validate(g)
        except GraphError as ex:
            raise SchemaError(str(ex), field="pieces") from None
    return dec, M, chains


# -- embeddings -----------------------------------------------------------
def embeddings_from_doc(doc, piece_graphs):
    """Tabulated per-piece embeddings; each is verified exhaustively on load."""
    from .embedding import PieceTreeEmbedding

    _check_header(doc, EMBEDDINGS)
    out = {}
    for k, item in enumerate(_need(doc, "pieces", list)):
        where = f"pieces[{k}]."
        i = _need(item, "piece", int, where)
        if not 0 <= i < len(piece_graphs):
            raise SchemaError(f"piece {i} out of range", field=f"{where}piece")
        trees = []
        for t, tr in enumerate(_need(item, "trees", list, where)):
            n = _need(tr, "n", int, f"{where}trees[{t}].")
            edges = [_int_pair(e, f"{where}trees[{t}].edges[{q}]") for q, e in enumerate(_need(tr, "edges", list, f"{where}trees[{t}]."))]
            trees.append(MetricGraph(n, edges))
        maps = _need(item, "map", list, where)
        if len(maps) != len(trees) or any(len(row) != piece_graphs[i].n for row in maps):
            raise SchemaError("map needs one row per tree and one entry per piece vertex", field=f"{where}map")
        out[i] = PieceTreeEmbedding(piece_graphs[i], trees, maps, item.get("K", 1), item.get("C", 0), "tabulated")
    return out


def embeddings_to_doc(embeds):
    items = []
    for i, e in enumerate(embeds):
        d = e.to_dict()
        d["piece"] = i
        items.append(d)
    return {"format": EMBEDDINGS, "version": VERSION, "pieces": items}


# -- DOT ------------------------------------------------------------------
def to_dot(g, name="G", groups=None):
    """Undirected DOT text; ``groups`` optionally maps vertex -> cluster label."""
    lines = [f"graph {name} {{"]
    if groups:
        for v in range(g.n):
            if v in groups:
                lines.append(f'  {v} [label="{v}\\n{groups[v]}"];')
    lines += [f"  {u} -- {v};" for u, v in g.edges]
    if g.n and not g.edges:
        lines.append("  0;")
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "dumps",
    "embeddings_from_doc",
    "embeddings_to_doc",
    "graph_from_doc",
    "graph_to_doc",
    "load",
    "pieces_from_doc",
    "pieces_to_doc",
    "to_dot",
    "write",
]
