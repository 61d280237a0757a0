import random
from collections import deque

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import graphs_with_cover
from oracles import adjacency, chain_holds, every_path_meets, floyd_warshall, open_ball, dfs_distances, quasi_convex_by_paths
from rbptools.errors import ChainMalformed, GraphError, NotTreeGraded, TransportFailed
from rbptools.generators import cycle_graph, gen_cycle_chain, gen_grid, gen_tree_of_pieces, path_graph, subdivide
from rbptools.metric_graph import MetricGraph, is_path
from rbptools.rbp import (
    BottleneckChain,
    PieceDecomposition,
    QiMap,
    RbpStructure,
    check_quasi_convexity,
    check_tree_graded,
    find_cutting_ball,
    quasi_inverse,
    search_certificate,
    thicken,
    transport_qi,
    transported_constant,
    tree_graded_certificate,
    verify_bottleneck_chain,
    verify_rbp,
    with_verified_certificates,
)


def _piece_path(pieces, i, j):
    """Shortest sequence of pieces from i to j with consecutive ones intersecting."""
    prev = {i: None}
    q = deque([i])
    while q:
        a = q.popleft()
        for b in range(len(pieces)):
            if b not in prev and pieces[a] & pieces[b]:
                prev[b] = a
                q.append(b)
    if j not in prev:
        return None
    seq = [j]
    while prev[seq[-1]] is not None:
        seq.append(prev[seq[-1]])
    return seq[::-1]


@given(graphs_with_cover(), st.integers(1, 3), st.data())
def test_chain_verification_matches_enumeration(gc, M, data):
    g, pieces = gc
    i, j = data.draw(st.sampled_from([(a, b) for a in range(len(pieces)) for b in range(len(pieces)) if a != b]))
    seq = _piece_path(pieces, i, j)
    assume(seq is not None and len(seq) >= 2)
    wit = [data.draw(st.sampled_from(sorted(pieces[a] & pieces[b]))) for a, b in zip(seq, seq[1:])]
    s = RbpStructure(g, PieceDecomposition(pieces), M)
    ok, path = verify_bottleneck_chain(s, BottleneckChain(seq, wit))
    adj = adjacency(g.n, g.edges)
    assert ok == chain_holds(adj, pieces, M, seq, wit)
    if not ok:
        assert path[0] in pieces[i] and path[-1] in pieces[j] and is_path(g, path)


@given(graphs_with_cover(max_n=12, max_pieces=4), st.integers(1, 2))
def test_search_is_complete(gc, M):
    """A chain exists iff the link graph of separating witnesses joins the pieces."""
    g, pieces = gc
    adj = adjacency(g.n, g.edges)
    s = RbpStructure(g, PieceDecomposition(pieces), M)
    for i in range(len(pieces)):
        for j in range(i + 1, len(pieces)):
            found = search_certificate(s, i, j)
            links = {a: set() for a in range(len(pieces))}
            for w in range(g.n):
                owners = [a for a in range(len(pieces)) if w in pieces[a]]
                if len(owners) < 2:
                    continue
                if every_path_meets(adj, pieces[i], pieces[j], open_ball(dfs_distances(adj, w), M)):
                    for a in owners:
                        links[a].update(owners)
            reach, q = {i}, [i]
            while q:
                a = q.pop()
                for b in links[a] - reach:
                    reach.add(b)
                    q.append(b)
            assert (found is not None) == (j in reach)
            if found is not None:
                assert chain_holds(adj, pieces, M, found.pieces, found.witnesses)


class TestChains:
    def setup_method(self):
        gen = gen_cycle_chain(3, 6)
        self.s = RbpStructure(gen.graph, gen.decomposition, 1)

    def test_malformed_shapes(self):
        with pytest.raises(ChainMalformed):
            verify_bottleneck_chain(self.s, BottleneckChain([0], []))
        with pytest.raises(ChainMalformed):
            verify_bottleneck_chain(self.s, BottleneckChain([0, 0], [0]))
        with pytest.raises(ChainMalformed, match="not in"):
            verify_bottleneck_chain(self.s, BottleneckChain([0, 1], [0]))

    def test_glue_points_are_bottlenecks(self):
        p0, p1, p2 = self.s.pieces
        w01 = min(p0 & p1)
        w12 = min(p1 & p2)
        ok, _ = verify_bottleneck_chain(self.s, BottleneckChain([0, 1, 2], [w01, w12]))
        assert ok

    def test_reversed_chain(self):
        c = BottleneckChain([0, 1, 2], [3, 8])
        assert c.reversed().pieces == (2, 1, 0)
        assert c.reversed().witnesses == (8, 3)

    def test_stored_chain_lookup_is_symmetric(self):
        self.s.add_chain(BottleneckChain([2, 1], [9]))
        assert self.s.chain(1, 2).pieces == (1, 2)
        assert self.s.chain(2, 1).pieces == (2, 1)


class TestVerifyRbp:
    def test_cycle_chain_verifies(self):
        gen = gen_cycle_chain(4, 8)
        rep = verify_rbp(RbpStructure(gen.graph, gen.decomposition, 1))
        assert rep.exit_code == 0 and rep.count("verified") == 6

    def test_grid_is_refuted_with_replayable_path(self):
        gen = gen_grid(6)
        s = RbpStructure(gen.graph, gen.decomposition, 2)
        rep = verify_rbp(s)
        bad = [e for e in rep.entries if e.verdict == "refuted"]
        assert bad and rep.exit_code == 1
        e = bad[0]
        cands = [v for v in range(s.graph.n) if sum(v in p for p in s.pieces) >= 2]
        assert not cands  # rows are disjoint: no witness can exist at all
        assert e.witness[0] in s.pieces[e.i] and e.witness[-1] in s.pieces[e.j]
        assert is_path(s.graph, e.witness)

    def test_stored_chain_failure_falls_back_to_search(self):
        # C_8 split into two arcs sharing 0 and 4, plus a pendant edge 4-8
        g = MetricGraph(9, [(k, (k + 1) % 8) for k in range(8)] + [(4, 8)])
        pieces = [{0, 1, 2, 3, 4}, {4, 5, 6, 7, 0}, {4, 8}]
        s = RbpStructure(g, PieceDecomposition(pieces), 1, [BottleneckChain([0, 1, 2], [0, 4])])
        entry = next(e for e in verify_rbp(s).entries if (e.i, e.j) == (0, 2))
        assert entry.verdict == "verified" and entry.searched
        assert entry.note.startswith("stored chain failed")
        assert entry.chain.witnesses == (4,)

    def test_malformed_stored_chain_raises(self):
        gen = gen_cycle_chain(3, 8)
        s = RbpStructure(gen.graph, gen.decomposition, 1)
        shared = min(s.pieces[0] & s.pieces[1])
        s.add_chain(BottleneckChain([0, 1, 2], [shared, shared]))
        with pytest.raises(ChainMalformed):
            verify_rbp(s)

    def test_sampling_needs_seed_and_is_reproducible(self):
        gen = gen_tree_of_pieces(8, ("cycle",), seed=4)
        s = RbpStructure(gen.graph, gen.decomposition, 1)
        a = verify_rbp(s, "sample:5", seed=1).to_dict()
        b = verify_rbp(s, "sample:5", seed=1).to_dict()
        assert a == b and a["pairs"] == 5
        with pytest.raises(ValueError):
            verify_rbp(s, "sample:5")

    def test_threads_give_same_report(self):
        gen = gen_tree_of_pieces(10, ("cycle", "complete"), seed=2)
        s = RbpStructure(gen.graph, gen.decomposition, 1)
        one = verify_rbp(s).to_dict()
        s2 = RbpStructure(gen.graph, gen.decomposition, 1)
        four = verify_rbp(s2, threads=4).to_dict()
        assert one == four

    def test_with_verified_certificates_needs_no_search(self):
        gen = gen_tree_of_pieces(6, ("cycle",), seed=9)
        s = RbpStructure(gen.graph, gen.decomposition, 1)
        s2 = with_verified_certificates(s, verify_rbp(s))
        rep = verify_rbp(s2)
        assert rep.all_verified and rep.counters["searches"] == 0


@given(graphs_with_cover(max_n=12, max_pieces=3), st.integers(1, 2))
def test_quasi_convexity_matches_geodesic_enumeration(gc, M):
    g, pieces = gc
    s = RbpStructure(g, PieceDecomposition(pieces), M)
    adj = adjacency(g.n, g.edges)
    dist = floyd_warshall(g.n, g.edges)
    for i, p in enumerate(pieces):
        for radius in (0, 1, 2):
            res = check_quasi_convexity(s, i, C=0, radius=radius)
            assert res.ok == quasi_convex_by_paths(adj, dist, p, radius)


def test_quasi_convexity_default_radius():
    gen = gen_cycle_chain(2, 6)
    s = RbpStructure(gen.graph, gen.decomposition, 1)
    assert check_quasi_convexity(s, 0).radius == 4
    assert check_quasi_convexity(s, 0, C=3).radius == 8


class TestTransport:
    def test_constant(self):
        assert transported_constant(1, 2, 1) == 11
        assert transported_constant(2, 1, 0) == 2

    def test_subdivision_map_is_declared_qi(self):
        g = gen_cycle_chain(3, 6).graph
        for k in (2, 3):
            h, q = subdivide(g, k)
            assert q.check() == []
            assert (q.K, q.C) == (k, k - 1)

    def test_quasi_inverse(self):
        g = cycle_graph(7)
        h, q = subdivide(g, 2)
        back = quasi_inverse(q, 2, 1)
        assert back.check() == []

    def test_transport_verifies(self):
        gen = gen_tree_of_pieces(5, ("cycle", "edge"), seed=3)
        s = RbpStructure(gen.graph, gen.decomposition, 1)
        s = with_verified_certificates(s, verify_rbp(s))
        h, q = subdivide(gen.graph, 2)
        t = transport_qi(s, q)
        assert t.M == transported_constant(1, 2, 1)
        assert verify_rbp(t).count("refuted") == 0

    def test_wrong_source_rejected(self):
        gen = gen_cycle_chain(2, 6)
        s = RbpStructure(gen.graph, gen.decomposition, 1)
        _, q = subdivide(path_graph(3), 2)
        with pytest.raises(ValueError):
            transport_qi(s, q)

    def test_transport_failure_is_reported(self):
        g = cycle_graph(8)
        pieces = [frozenset({0, 1, 2, 3, 4}), frozenset({4, 5, 6, 7, 0})]
        s = RbpStructure(g, PieceDecomposition(pieces), 1, [BottleneckChain([0, 1], [4])])
        ident = QiMap(g, g, range(8), 1, 0)
        with pytest.raises(TransportFailed):
            transport_qi(s, ident)


class TestThicken:
    def test_shape_and_constant(self):
        gen = gen_cycle_chain(2, 4)
        s = RbpStructure(gen.graph, gen.decomposition, 1)
        s = with_verified_certificates(s, verify_rbp(s))
        t, info = thicken(s, b=2)
        assert t.M == 9 and t.meta == {"thickened": True, "b": 2, "M_in": 1}
        assert info.levels == 6
        assert t.decomposition.basepoint == gen.graph.n
        for i, ids in info.layer_ids.items():
            assert ids[0].tolist() == info.piece_vertices[i]
            assert len(t.pieces[i]) == ids.size
        assert verify_rbp(t).all_verified

    def test_strong_product_edges_present(self):
        g = path_graph(2)
        s = RbpStructure(g, PieceDecomposition([{0, 1}]), 1)
        t, info = thicken(s, b=0)
        ids = info.layer_ids[0]
        # base {0,1} plus e=2 (attached to 0): three columns, two levels, full king moves
        assert t.graph.n == 3 + 3
        assert t.graph.has_edge(int(ids[0, 0]), int(ids[1, 1]))
        assert t.graph.has_edge(int(ids[1, 0]), int(ids[0, 1]))

    def test_negative_b(self):
        s = RbpStructure(path_graph(2), PieceDecomposition([{0, 1}]), 1)
        with pytest.raises(ValueError):
            thicken(s, -1)


class TestCuttingBalls:
    def test_path_piece_is_cut(self):
        s = RbpStructure(path_graph(9), PieceDecomposition([set(range(9))]), 1)
        cut = find_cutting_ball(s, b=2)
        assert cut is not None and cut.piece == 0 and cut.diameter <= 4

    @pytest.mark.parametrize("g", [cycle_graph(12), MetricGraph(5, [(a, c) for a in range(5) for c in range(a + 1, 5)])])
    def test_cycles_and_cliques_are_never_cut(self, g):
        s = RbpStructure(g, PieceDecomposition([set(range(g.n))]), 1)
        assert find_cutting_ball(s, b=g.n) is None

    def test_cut_report_is_genuine(self):
        gen = gen_tree_of_pieces(4, ("path",), sizes=(5, 7), seed=0)
        s = RbpStructure(gen.graph, gen.decomposition, 1)
        cut = find_cutting_ball(s, b=3)
        assert cut is not None
        piece = s.pieces[cut.piece]
        d = s.graph.row(cut.center)
        rest = {v for v in piece if d[v] >= cut.radius}
        sub, ids = s.graph.induced(rest)
        assert rest and not sub.is_connected()


class TestTreeGraded:
    def test_accepts_generated(self):
        for seed in range(5):
            gen = gen_tree_of_pieces(12, ("cycle", "complete", "edge", "path"), seed=seed)
            check_tree_graded(gen.graph, gen.decomposition.pieces)

    def test_rejects_double_intersection(self):
        g = cycle_graph(6)
        with pytest.raises(NotTreeGraded, match="share"):
            check_tree_graded(g, [{0, 1, 2, 3}, {3, 4, 5, 0}])

    def test_rejects_cycle_across_pieces(self):
        g = cycle_graph(6)
        with pytest.raises(NotTreeGraded):
            check_tree_graded(g, [{0, 1, 2}, {2, 3, 4}, {4, 5, 0}])

    def test_certificate_chains_verify_without_search(self):
        for seed in range(8):
            gen = gen_tree_of_pieces(15, ("cycle", "complete", "edge"), sizes=(3, 9), seed=seed)
            s = tree_graded_certificate(gen.graph, gen.decomposition.pieces)
            rep = verify_rbp(s)
            assert s.M == 2 and rep.all_verified and rep.counters["searches"] == 0


def test_decomposition_validation():
    g = path_graph(4)
    with pytest.raises(GraphError, match="cover"):
        RbpStructure(g, PieceDecomposition([{0, 1}, {1, 2}]), 1)
    with pytest.raises(GraphError, match="empty"):
        RbpStructure(g, PieceDecomposition([set(), {0, 1, 2, 3}]), 1)
    with pytest.raises(GraphError, match="basepoint"):
        RbpStructure(g, PieceDecomposition([{0, 1}, {1, 2, 3}], 0, 3), 1)
    with pytest.raises(ValueError):
        RbpStructure(g, PieceDecomposition([{0, 1, 2, 3}]), 0)


def test_random_seeds_are_independent_of_global_state():
    random.seed(1)
    a = gen_tree_of_pieces(7, seed=5).graph
    random.seed(2)
    b = gen_tree_of_pieces(7, seed=5).graph
    assert a == b


class TestWorkedExamples:
    """Small hand-checked instances: the path example and friends."""

    @staticmethod
    def path_example(M=1):
        return RbpStructure(path_graph(9), PieceDecomposition([set(range(5)), set(range(4, 9))]), M)

    def test_path_chain(self):
        s = self.path_example()
        assert verify_bottleneck_chain(s, BottleneckChain([0, 1], [4])) == (True, None)
        assert search_certificate(s, 0, 1) == BottleneckChain([0, 1], [4])

    def test_cycle_chain_fails_on_other_arc(self):
        g = cycle_graph(8)
        pieces = [{0, 1, 2}, {2, 3, 4}, set(range(8))]
        s = RbpStructure(g, PieceDecomposition(pieces), 1)
        ok, path = verify_bottleneck_chain(s, BottleneckChain([0, 1], [2]))
        assert not ok and path == [0, 7, 6, 5, 4]
        # a ball swallowing the source piece is a degenerate but valid bottleneck
        s3 = RbpStructure(g, PieceDecomposition(pieces), 3)
        assert verify_bottleneck_chain(s3, BottleneckChain([0, 1], [2]))[0]

    def test_grid_has_no_certificate(self):
        gen = gen_grid(20)
        s = RbpStructure(gen.graph, gen.decomposition, 2)
        assert search_certificate(s, 0, 1) is None

    def test_star_of_paths(self):
        # three paths of length 3 meeting at hub 0
        g = MetricGraph(10, [(0, 1), (1, 2), (2, 3), (0, 4), (4, 5), (5, 6), (0, 7), (7, 8), (8, 9)])
        s = RbpStructure(g, PieceDecomposition([{0, 1, 2, 3}, {0, 4, 5, 6}, {0, 7, 8, 9}]), 1)
        assert search_certificate(s, 0, 2) == BottleneckChain([0, 2], [0])

    def test_single_piece_vacuous(self):
        rep = verify_rbp(RbpStructure(path_graph(4), PieceDecomposition([set(range(4))]), 1))
        assert rep.entries == [] and rep.exit_code == 0

    def test_quasi_convex_path(self):
        s = RbpStructure(path_graph(9), PieceDecomposition([set(range(9))]), 1)
        for C in (0, 2, 5):
            res = check_quasi_convexity(s, 0, C)
            assert res.ok and res.worst_distance <= C

    def test_identity_transport(self):
        s = self.path_example()
        s = with_verified_certificates(s, verify_rbp(s))
        t = transport_qi(s, QiMap(s.graph, s.graph, range(9), 1, 0))
        assert t.M == 1 and t.pieces == s.pieces

    def test_subdivided_path_transport(self):
        s = self.path_example()
        s = with_verified_certificates(s, verify_rbp(s))
        h, q = subdivide(s.graph, 2)
        t = transport_qi(s, q)
        assert t.M == 11 and verify_rbp(t).all_verified

    def test_transport_and_back(self):
        gen = gen_tree_of_pieces(4, ("cycle",), seed=1)
        s = RbpStructure(gen.graph, gen.decomposition, 1)
        s = with_verified_certificates(s, verify_rbp(s))
        h, q = subdivide(gen.graph, 2)
        there = transport_qi(s, q)
        back = transport_qi(there, quasi_inverse(q, 2, 1))
        assert back.M > there.M and verify_rbp(back).all_verified

    def test_thicken_b0_level0_isometric(self):
        s = self.path_example()
        s = with_verified_certificates(s, verify_rbp(s))
        t, info = thicken(s, b=0)
        assert info.levels == 2
        level0 = sorted(set().union(*[set(ids[0].tolist()) for ids in info.layer_ids.values()]))
        # input vertices plus e, with the input metric (the sup metric never helps on one layer)
        for u in range(9):
            for v in range(9):
                assert t.graph.distance(u, v) == s.graph.distance(u, v)
        assert level0 == list(range(10))

    def test_thicken_b2_no_radius1_cut(self):
        s = self.path_example()
        s = with_verified_certificates(s, verify_rbp(s))
        t, _ = thicken(s, b=2)
        assert verify_rbp(t).all_verified
        assert find_cutting_ball(t, b=2, max_radius=1) is None

    def test_two_cycles_certificate(self):
        g = MetricGraph(15, [(k, (k + 1) % 8) for k in range(8)] + [(0, 8), (8, 9), (9, 10), (10, 11), (11, 12), (12, 13), (13, 14), (14, 0)])
        pieces = [set(range(8)), {0} | set(range(8, 15))]
        s = tree_graded_certificate(g, pieces)
        assert s.chain(0, 1) == BottleneckChain([0, 1], [0])
        assert verify_rbp(s).all_verified

    def test_tree_of_edges_certificate(self):
        g = MetricGraph(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)])
        s = tree_graded_certificate(g, [set(e) for e in g.edges])
        assert verify_rbp(s).all_verified

    def test_overlap_two_rejected(self):
        with pytest.raises(NotTreeGraded) as ex:
            tree_graded_certificate(cycle_graph(6), [{0, 1, 2, 3}, {3, 4, 5, 0}])
        assert ex.value.pair == (0, 1)
