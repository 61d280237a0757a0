"""Stratified construction of the data needed to assemble the tree-graded space.

Given a verified :class:`~rbptools.rbp.RbpStructure` this computes basepoints
``e_i`` with geodesics ``g_i`` to the global basepoint ``e``, stratum levels at
scale ``R``, the points ``c_i``, the level relation and the parent map. Every
intermediate claim that can be checked is checked and logged in ``trace``.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import kernels
from .errors import (
    BaseStratumNotSingleton,
    BasepointBoundViolated,
    CuttingBall,
    GlueViolated,
    MissingCertificate,
    NotTransitive,
    PreconditionError,
    SlackExceeded,
)
from .metric_graph import avoiding_path, canonical_geodesic, closed_neighborhood
from .rbp import find_cutting_ball, search_certificate, verify_bottleneck_chain


@dataclass
class LemmaCheck:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return {"check": self.name, "passed": self.passed, **self.detail}


@dataclass
class SlackGeodesic:
    """Path ``x -> x' -> e_i -> e`` with its slack and containment data."""

    piece: int
    path: list
    distance: int  # d(x, e)
    bound: int  # d(x, e) + 10M
    region_ok: bool

    @property
    def length(self):
        return len(self.path) - 1

    @property
    def slack(self):
        return self.length - self.distance


@dataclass
class ConstructionState:
    structure: object
    R: int
    e_piece: int
    e: int
    basepoints: dict = field(default_factory=dict)
    chains: dict = field(default_factory=dict)
    geodesics: dict = field(default_factory=dict)
    levels: dict = field(default_factory=dict)
    c_points: dict = field(default_factory=dict)
    classes: dict = field(default_factory=dict)  # level -> list of sorted tuples
    parent: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)
    _nbhd: dict = field(default_factory=dict, repr=False)

    @property
    def M(self):
        return self.structure.M

    @property
    def graph(self):
        return self.structure.graph

    def dist_e(self):
        return self.graph.row(self.e)

    def neighborhood(self, i):
        """Cached ``N_{4M}(X_i)``."""
        nb = self._nbhd.get(i)
        if nb is None:
            nb = closed_neighborhood(self.graph, self.structure.pieces[i], 4 * self.M)
            self._nbhd[i] = nb
        return nb

    def pieces_at(self, level):
        return sorted(i for i, lv in self.levels.items() if lv == level)

    def pieces_upto(self, level):
        return sorted(i for i, lv in self.levels.items() if lv <= level)

    def log(self, name, passed, **detail):
        self.trace.append(LemmaCheck(name, bool(passed), detail))

    def to_dict(self):
        de = self.dist_e()
        return {
            "kind": "construction_trace",
            "M": self.M,
            "R": self.R,
            "base_piece": self.e_piece,
            "basepoint": self.e,
            "pieces": [
                {
                    "piece": i,
                    "e_i": self.basepoints.get(i, self.e),
                    "d_e_ei": int(de[self.basepoints[i]]) if i in self.basepoints else 0,
                    "level": self.levels.get(i),
                    "c_i": self.c_points.get(i),
                    "parent": self.parent.get(i),
                }
                for i in range(len(self.structure.pieces))
            ],
            "classes": {str(k): [list(c) for c in v] for k, v in sorted(self.classes.items())},
            "checks": [c.to_dict() for c in self.trace],
        }


def choose_basepoint(s):
    """The pinned basepoint, else the smallest vertex lying only in the base piece."""
    dec = s.decomposition
    if dec.basepoint is not None:
        return dec.basepoint, dec.base_piece
    member = dec.membership(s.graph.n)
    own = [v for v in sorted(dec.pieces[dec.base_piece]) if len(member[v]) == 1]
    if not own:
        raise PreconditionError(
            f"no vertex lies in the base piece {dec.base_piece} alone; thicken the input to add one"
        )
    return own[0], dec.base_piece


def check_preconditions(s, b=None, check_cuts=True, trace=None):
    """Thickened structures pass by provenance; others get the exhaustive cut scan."""
    b = 15 * s.M if b is None else b
    if s.meta.get("thickened"):
        if trace is not None:
            trace.log("no_small_cuts", True, via="thicken", b=s.meta.get("b"))
        return
    if not check_cuts:
        if trace is not None:
            trace.log("no_small_cuts", True, via="skipped")
        return
    cut = find_cutting_ball(s, b)
    if cut is not None:
        raise CuttingBall(cut.piece, cut.center, cut.radius, cut.diameter)
    if trace is not None:
        trace.log("no_small_cuts", True, via="scan", b=b)


def _chain_to_base(s, i, e_piece):
    chain = s.chain(i, e_piece)
    if chain is not None and verify_bottleneck_chain(s, chain)[0]:
        return chain
    return search_certificate(s, i, e_piece)


def compute_basepoints(state):
    """``e_i`` is the first witness of the chain from ``X_i`` to ``X_e``."""
    s = state.structure
    de = state.dist_e()
    g = s.graph
    for i in range(len(s.pieces)):
        if i == state.e_piece:
            continue
        chain = _chain_to_base(s, i, state.e_piece)
        if chain is None:
            raise MissingCertificate(i)
        bound = int(de[sorted(s.pieces[i])].min()) + s.M
        if de[chain.witnesses[0]] > bound:
            chain = search_certificate(s, i, state.e_piece)
            if chain is None or de[chain.witnesses[0]] > bound:
                raise BasepointBoundViolated(i, int(de[chain.witnesses[0]]) if chain else None, bound)
        ei = chain.witnesses[0]
        state.chains[i] = chain
        state.basepoints[i] = ei
        state.geodesics[i] = canonical_geodesic(g, ei, state.e)
    state.log("basepoint_bound", True, pieces=len(state.basepoints))
    return state.basepoints, state.geodesics


def compute_strata(state):
    """``lv(i) = ceil(d(e, e_i) / R)``, with ``lv(e) = 0``."""
    de = state.dist_e()
    state.levels = {state.e_piece: 0}
    for i, ei in sorted(state.basepoints.items()):
        d = int(de[ei])
        if d == 0:
            raise BaseStratumNotSingleton(i)
        state.levels[i] = math.ceil(d / state.R)
    return state.levels


def compute_c_points(state):
    """``c_i`` is the vertex of ``g_i`` at distance ``(lv(i) - 1) R`` from ``e``."""
    de = state.dist_e()
    for i, path in sorted(state.geodesics.items()):
        d = int(de[state.basepoints[i]])
        target = (state.levels[i] - 1) * state.R
        state.c_points[i] = path[d - target]
    return state.c_points


def slack_geodesic(state, x, i):
    """Concatenate a geodesic ``x -> x'`` (``x'`` nearest in ``X_i``), a geodesic
    ``x' -> e_i`` and ``g_i``; check the ``10M`` slack and the containment in
    ``N_{4M}(X_i)`` union the closed ball ``B(e; lv(i) R)``."""
    g = state.graph
    M = state.M
    piece = state.structure.pieces[i]
    to_piece = g.distance_to_set(piece)
    if to_piece[x] > 4 * M:
        raise ValueError(f"vertex {x} is farther than 4M from piece {i}")
    row = g.row(x)
    members = np.array(sorted(piece), dtype=np.int64)
    xp = int(members[np.argmin(row[members])])
    if i == state.e_piece:
        ei, gi = state.e, [state.e]
    else:
        ei, gi = state.basepoints[i], state.geodesics[i]
    path = canonical_geodesic(g, x, xp)
    path += canonical_geodesic(g, xp, ei)[1:]
    path += gi[1:]
    de = state.dist_e()
    dist = int(de[x])
    bound = dist + 10 * M
    radius = state.levels.get(i, 0) * state.R
    nb = state.neighborhood(i)
    region_ok = all(v in nb or de[v] <= radius for v in path)
    out = SlackGeodesic(i, path, dist, bound, region_ok)
    if out.length > bound or not region_ok:
        raise SlackExceeded(i, x, out.length, bound)
    return out


def _open_ball_mask(row, r):
    return (row >= 0) & (row < r)


def level_equivalence(state, level):
    """Partition the pieces at ``level = n + 1``.

    ``i ~ j`` when ``X_i`` reaches ``X_j`` inside
    ``(V - B(e; nR + 11M)) | (N_{4M}(X_k) & B(e; nR + 11M))`` for some ``k`` with
    ``lv(k) <= n``. The raw relation must already be transitive.
    Returns ``(classes, related)`` where ``related`` maps pairs to the ``k`` used.
    """
    g = state.graph
    s = state.structure
    n = level - 1
    members = state.pieces_at(level)
    if len(members) <= 1:
        state.classes[level] = [tuple(members)] if members else []
        return state.classes[level], {}
    ball = _open_ball_mask(state.dist_e(), n * state.R + 11 * state.M)
    related = {}
    arrays = {i: np.array(sorted(s.pieces[i]), dtype=np.int64) for i in members}
    for k in state.pieces_upto(n):
        region = ~ball
        region[np.fromiter(state.neighborhood(k), dtype=np.int64)] = True
        blocked = (~region).astype(np.uint8)
        lab = kernels.component_labels(g.indptr, g.indices, blocked)
        sets = {}
        for i in members:
            li = lab[arrays[i]]
            sets[i] = set(li[li >= 0].tolist())
        for i, j in combinations(members, 2):
            if (i, j) not in related and not sets[i].isdisjoint(sets[j]):
                related[(i, j)] = k
    rel = lambda a, c: a == c or (min(a, c), max(a, c)) in related  # noqa: E731
    for i, j, l in combinations(members, 3):
        for a, b, c in ((i, j, l), (j, i, l), (i, l, j)):
            if rel(a, b) and rel(b, c) and not rel(a, c):
                paths = [_relation_path(state, level, a, b, related), _relation_path(state, level, b, c, related)]
                state.log("relation_transitive", False, level=level, triple=[a, b, c])
                raise NotTransitive((a, b, c), paths)
    classes, seen = [], set()
    for i in members:
        if i in seen:
            continue
        cls = tuple(j for j in members if rel(i, j))
        seen.update(cls)
        classes.append(cls)
    state.classes[level] = classes
    state.log("relation_transitive", True, level=level, classes=len(classes))
    return classes, related


def _relation_path(state, level, i, j, related):
    """A path realising ``i ~ j`` through the region of the recorded ``k``."""
    k = related[(min(i, j), max(i, j))]
    n = level - 1
    ball = _open_ball_mask(state.dist_e(), n * state.R + 11 * state.M)
    region = ~ball
    region[np.fromiter(state.neighborhood(k), dtype=np.int64)] = True
    s = state.structure
    return avoiding_path(state.graph, s.pieces[i], s.pieces[j], (~region).astype(np.uint8))


def parent_map(state):
    """Choose ``c(i)`` for every class at every level.

    Candidates are pairs ``(w, k)`` where ``w`` is a witness on the chain from
    some class member to ``X_e``, ``k`` is a piece of that chain containing
    ``w`` with ``lv(k) < lv(i)``, and ``d(e, w) >= nR - M``. The candidate
    farthest from ``e`` wins; ties go to the smallest ``k``.
    """
    de = state.dist_e()
    s = state.structure
    for level in sorted(state.classes):
        n = level - 1
        for cls in state.classes[level]:
            best = None
            for i in cls:
                chain = state.chains[i]
                for w in chain.witnesses:
                    dw = int(de[w])
                    if dw < n * state.R - state.M:
                        continue
                    for k in set(chain.pieces):
                        if state.levels[k] < level and w in s.pieces[k]:
                            ek = state.basepoints.get(k, state.e)
                            key = (-dw, k, int(de[ek]))
                            if best is None or key < best[0]:
                                best = (key, k, w)
            if best is None:
                k = state.e_piece
                state.log("parent_candidate", False, level=level, members=list(cls), fallback=k)
            else:
                k = best[1]
            nb = state.neighborhood(k)
            for j in cls:
                if state.c_points[j] not in nb:
                    state.log("glue_containment", False, member=j, parent=k)
                    raise GlueViolated(j, k)
                state.parent[j] = k
    state.log("glue_containment", True, pieces=len(state.parent))
    state.log("parent_level_decreasing", all(state.levels[state.parent[i]] < state.levels[i] for i in state.parent))
    return state.parent


def check_bottleneck_at_basepoints(state):
    """For ``d(e_i, e) >= d(e_j, e)`` every ``X_i - X_j`` path meets ``B(e_i; 4M)``.

    Returns the list of failing pairs (empty when the claim holds).
    """
    g = state.graph
    s = state.structure
    de = state.dist_e()
    ept = {i: state.basepoints.get(i, state.e) for i in range(len(s.pieces))}
    arrays = [np.array(sorted(p), dtype=np.int64) for p in s.pieces]
    failures = []
    for i in range(len(s.pieces)):
        blocked = _open_ball_mask(g.row(ept[i]), 4 * state.M).astype(np.uint8)
        lab = kernels.component_labels(g.indptr, g.indices, blocked)
        li = lab[arrays[i]]
        si = set(li[li >= 0].tolist())
        for j in range(len(s.pieces)):
            if j == i or de[ept[i]] < de[ept[j]]:
                continue
            lj = lab[arrays[j]]
            if not si.isdisjoint(lj[lj >= 0].tolist()):
                failures.append((i, j))
    return failures


def check_parent_shortcut(state):
    """If ``lv(i) = n + 1 > lv(j)`` and some path from ``X_i`` to ``X_j`` avoids
    ``B(e; nR + 7M)`` then ``c(i) = j``. Returns violating ``(i, j, c(i))``."""
    g = state.graph
    s = state.structure
    arrays = [np.array(sorted(p), dtype=np.int64) for p in s.pieces]
    bad = []
    for level in sorted(set(state.levels.values())):
        if level == 0:
            continue
        n = level - 1
        blocked = _open_ball_mask(state.dist_e(), n * state.R + 7 * state.M).astype(np.uint8)
        lab = kernels.component_labels(g.indptr, g.indices, blocked)
        sets = []
        for a in arrays:
            la = lab[a]
            sets.append(set(la[la >= 0].tolist()))
        for i in state.pieces_at(level):
            for j in state.pieces_upto(n):
                if not sets[i].isdisjoint(sets[j]) and state.parent[i] != j:
                    bad.append((i, j, state.parent[i]))
    return bad


def construct(s, R=None, b=None, check_cuts=True):
    """Run the whole construction on a verified structure.

    ``R`` defaults to ``160 M`` and must be a positive multiple of ``M``;
    ``b`` (default ``15 M``) sets the cut-scan threshold.
    """
    M = s.M
    R = 160 * M if R is None else int(R)
    if R <= 0 or R % M:
        raise ValueError(f"R must be a positive multiple of M={M}, got {R}")
    e, e_piece = choose_basepoint(s)
    state = ConstructionState(s, R, e_piece, e)
    check_preconditions(s, b, check_cuts, state)
    compute_basepoints(state)
    compute_strata(state)
    compute_c_points(state)
    for level in range(1, max(state.levels.values()) + 1):
        level_equivalence(state, level)
    parent_map(state)
    fails = check_bottleneck_at_basepoints(state)
    state.log("basepoint_ball_separates", not fails, failures=[list(p) for p in fails[:20]])
    bad = check_parent_shortcut(state)
    state.log("parent_shortcut", not bad, violations=[list(t) for t in bad[:20]])
    return state


__all__ = [
    "ConstructionState",
    "LemmaCheck",
    "SlackGeodesic",
    "check_bottleneck_at_basepoints",
    "check_parent_shortcut",
    "check_preconditions",
    "choose_basepoint",
    "compute_basepoints",
    "compute_c_points",
    "compute_strata",
    "construct",
    "level_equivalence",
    "parent_map",
    "slack_geodesic",
]
