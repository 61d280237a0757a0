import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import floyd_warshall
from rbptools.formats import dumps, graph_to_doc, pieces_to_doc
from rbptools.metric_graph import closed_neighborhood
from rbptools.generators import (
    GeneratorSpec,
    gen_cycle_chain,
    gen_grid,
    gen_tree_of_pieces,
    generate,
    path_graph,
    prufer_tree,
    subdivide,
    template_edges,
)
from rbptools.rbp import PieceDecomposition, RbpStructure, transport_qi, tree_graded_certificate, verify_rbp, with_verified_certificates


class TestTreeOfPieces:
    def test_one_piece_is_template(self):
        gen = gen_tree_of_pieces(1, ("cycle",), sizes=(6, 6))
        assert gen.graph.n == 6 and sorted(gen.graph.edges) == sorted(tuple(sorted(e)) for e in template_edges("cycle", 6))

    def test_two_c8(self):
        gen = gen_tree_of_pieces(2, ("cycle",), sizes=(8, 8), seed=11)
        assert gen.graph.n == 15
        a, b = gen.decomposition.pieces
        assert len(a & b) == 1
        assert verify_rbp(tree_graded_certificate(gen.graph, gen.decomposition.pieces)).all_verified

    def test_depth_three_mixed(self):
        gen = gen_tree_of_pieces(10, ("cycle", "path", "complete"), seed=7, depth=3)
        assert len(gen.decomposition.pieces) == 10
        T = nx.Graph(gen.meta["piece_tree"])
        assert max(nx.shortest_path_length(T, 0).values()) <= 3
        assert verify_rbp(tree_graded_certificate(gen.graph, gen.decomposition.pieces)).all_verified

    @given(st.integers(1, 12), st.integers(0, 10_000))
    def test_certificate_always_verifies(self, k, seed):
        gen = gen_tree_of_pieces(k, ("cycle", "path", "complete", "edge"), sizes=(3, 6), seed=seed)
        rep = verify_rbp(tree_graded_certificate(gen.graph, gen.decomposition.pieces))
        assert rep.all_verified

    def test_glue_metadata_matches_pieces(self):
        gen = gen_tree_of_pieces(8, ("cycle", "path"), seed=5)
        P = gen.decomposition.pieces
        for g in gen.meta["glue"]:
            assert P[g["piece"]] & P[g["parent"]] == {g["vertex"]}
        assert len(gen.meta["piece_tree"]) == 7

    def test_reproducible_bytes(self):
        def text(seed):
            gen = gen_tree_of_pieces(9, ("cycle", "complete"), seed=seed)
            return dumps(graph_to_doc(gen.graph)) + dumps(pieces_to_doc(gen.decomposition))

        assert text(3) == text(3)
        assert text(3) != text(4)

    def test_rejects_zero_pieces(self):
        with pytest.raises(ValueError):
            gen_tree_of_pieces(0)


@given(st.integers(1, 30), st.integers(0, 1000))
def test_prufer_tree_is_tree(k, seed):
    import random

    edges = prufer_tree(k, random.Random(seed))
    T = nx.Graph(edges)
    T.add_nodes_from(range(k))
    assert nx.is_tree(T)


class TestGrid:
    def test_small(self):
        gen = gen_grid(3)
        assert gen.graph.n == 9 and len(gen.decomposition.pieces) == 3

    @pytest.mark.parametrize("n", [3, 5, 8])
    def test_diameter(self, n):
        g = gen_grid(n).graph
        assert g.is_connected()
        assert max(max(r) for r in floyd_warshall(g.n, g.edges)) == 2 * (n - 1)

    def test_rows_refuted(self):
        gen = gen_grid(20)
        rep = verify_rbp(RbpStructure(gen.graph, gen.decomposition, 2), pairs="sample:5", seed=0)
        assert all(e.verdict in ("refuted", "unknown") for e in rep.entries)

    def test_disjoint_rows_never_chain(self):
        # no witness can sit in two disjoint rows, whatever M is
        gen = gen_grid(3)
        rep = verify_rbp(RbpStructure(gen.graph, gen.decomposition, 10))
        assert not rep.all_verified

    def test_huge_m_is_flagged_degenerate(self):
        gen = gen_grid(3)
        thick = [closed_neighborhood(gen.graph, p, 1) for p in gen.decomposition.pieces]
        rep = verify_rbp(RbpStructure(gen.graph, PieceDecomposition(thick), 10))
        assert rep.all_verified and rep.to_dict()["degenerate"] == 3

    def test_needs_three(self):
        with pytest.raises(ValueError):
            gen_grid(2)


class TestSubdivide:
    def test_k1_identity(self):
        g = gen_cycle_chain(2, 6).graph
        h, q = subdivide(g, 1)
        assert h == g and (q.K, q.C) == (1, 0)

    def test_path_doubles(self):
        h, q = subdivide(path_graph(9), 2)
        assert h.n == 17 and len(h.edges) == 16
        for a in range(9):
            for b in range(9):
                assert h.distance(a, b) == 2 * abs(a - b)
        assert (q.K, q.C) == (2, 1)

    def test_tree_of_cycles_k3_transports(self):
        gen = gen_tree_of_pieces(4, ("cycle",), sizes=(4, 6), seed=2)
        s = tree_graded_certificate(gen.graph, gen.decomposition.pieces)
        s = with_verified_certificates(s, verify_rbp(s))
        h, q = subdivide(gen.graph, 3)
        t = transport_qi(s, q)
        assert t.M == 3 * (3 * 2 + 2 * 2 + 2) + 2
        assert verify_rbp(t).all_verified

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            subdivide(path_graph(3), 0)


class TestSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            GeneratorSpec.make("bogus")
        with pytest.raises(ValueError):
            GeneratorSpec.make("grid", n=0)

    def test_dispatch(self):
        assert generate(GeneratorSpec.make("grid", n=4)).graph.n == 16
        assert generate(GeneratorSpec.make("cycle_chain", pieces=3, size=6)).graph.n == 16
        a = generate(GeneratorSpec.make("tree_of_pieces", seed=1, pieces=6))
        b = generate(GeneratorSpec.make("tree_of_pieces", seed=1, pieces=6))
        assert a.graph == b.graph and a.decomposition.pieces == b.decomposition.pieces
        r = generate(GeneratorSpec.make("random_tree_graded", seed=2, pieces=5))
        assert len(r.decomposition.pieces) == 5

    def test_subdivision_needs_base(self):
        spec = GeneratorSpec.make("subdivision", k=2)
        with pytest.raises(ValueError):
            generate(spec)
        out = generate(spec, base=gen_grid(3))
        assert out.graph.n == 9 + 12 and out.meta["qimap"].K == 2


def test_cycle_chain_glues_antipodes():
    gen = gen_cycle_chain(3, 8)
    P = gen.decomposition.pieces
    assert gen.graph.n == 22
    assert len(P[0] & P[1]) == 1 and not P[0] & P[2]
    assert isinstance(gen.decomposition, PieceDecomposition)
