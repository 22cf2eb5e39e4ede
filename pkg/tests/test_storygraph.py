import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from storytrack.entitylink import AnnotatedDocument, EntityAnnotation
from storytrack.storygraph import (
    EntityGraph,
    GraphConfig,
    GraphError,
    GraphUpdateError,
    window_length,
)
from conftest import make_doc


def annotated(entries, text_len=1000, doc_id="d"):
    """entries: list of (entity_id, position)."""
    doc = make_doc(doc_id=doc_id, text="x" * text_len)
    anns = [EntityAnnotation(eid, pos, 0.9) for eid, pos in sorted(entries, key=lambda e: e[1])]
    return AnnotatedDocument(doc=doc, annotations=anns)


def dense_pagerank_oracle(adj, bias, damping=0.85, tol=1e-12, iters=200000):
    """Independent dense-matrix power iteration."""
    nodes = sorted(adj)
    index = {u: i for i, u in enumerate(nodes)}
    n = len(nodes)
    P = np.zeros((n, n))
    degree = np.zeros(n)
    for u, nb in adj.items():
        degree[index[u]] = sum(nb.values())
        for v, c in nb.items():
            P[index[v], index[u]] = c
    for j in range(n):
        if degree[j] > 0:
            P[:, j] /= degree[j]
    members = [b for b in bias if b in adj] or nodes
    t = np.zeros(n)
    for m in members:
        t[index[m]] = 1.0 / len(members)
    x = np.full(n, 1.0 / n)
    for _ in range(iters):
        dangling = float(x[degree == 0].sum())
        nxt = (1 - damping) * t + damping * (P @ x + dangling * t)
        if np.abs(nxt - x).sum() < tol:
            x = nxt
            break
        x = nxt
    x = x / x.sum()
    return {u: float(x[index[u]]) for u in nodes}


class TestWindowLength:
    def test_document_start(self):
        assert window_length(0, 1000) == 500.0

    def test_document_end(self):
        assert window_length(1000, 1000) == 100.0

    def test_midpoint(self):
        assert window_length(500, 1000) == 300.0

    def test_zero_length_document(self):
        with pytest.raises(GraphError):
            window_length(0, 0)

    @given(st.integers(min_value=1, max_value=10**6),
           st.data())
    def test_strictly_decreasing_in_position(self, m_len, data):
        p1 = data.draw(st.integers(min_value=0, max_value=m_len - 1))
        p2 = data.draw(st.integers(min_value=p1 + 1, max_value=m_len))
        assert window_length(p1, m_len) > window_length(p2, m_len)


class TestAddDocument:
    def test_empty_annotations_noop(self):
        g = EntityGraph()
        g.add_document(annotated([]))
        assert g.n_nodes == 0 and g.n_edges == 0

    def test_pair_within_start_window(self):
        g = EntityGraph()
        g.add_document(annotated([("A", 0), ("B", 50)]))
        assert g.edge_count("A", "B") == 1

    def test_late_pair_inside_shrunken_window(self):
        # window at p=900 in a 1000-char doc is 500 - 400*0.9 = 140 >= gap 90
        g = EntityGraph()
        g.add_document(annotated([("A", 900), ("B", 990)], text_len=1000))
        assert g.edge_count("A", "B") == 1

    def test_late_pair_in_longer_doc(self):
        # window at p=900 in a 1100-char doc is 500 - 400*900/1100 ~= 172.7 >= gap 145
        g = EntityGraph()
        g.add_document(annotated([("A", 900), ("B", 1045)], text_len=1100))
        assert g.edge_count("A", "B") == 1

    def test_late_pair_outside_window(self):
        # same document, gap 180 > 172.7: no edge
        g = EntityGraph()
        g.add_document(annotated([("A", 900), ("C", 1080)], text_len=1100))
        assert g.edge_count("A", "C") == 0
        assert g.n_nodes == 0

    def test_no_self_edges(self):
        g = EntityGraph()
        g.add_document(annotated([("A", 0), ("A", 10)]))
        assert g.n_edges == 0

    def test_repeated_pair_counts_each_cooccurrence(self):
        g = EntityGraph()
        g.add_document(annotated([("A", 0), ("B", 10), ("A", 20), ("B", 30)]))
        # pairs within window: (A0,B10), (A0,B30), (B10,A20), (A20,B30)
        assert g.edge_count("A", "B") == 4

    def test_early_position_dominance(self):
        # uniformly spaced entities: the first entity reaches at least as
        # many neighbours as the last one
        entries = [(f"E{i}", i * 120) for i in range(9)]
        g = EntityGraph()
        g.add_document(annotated(entries, text_len=1000))
        first = sum(g._adj.get("E0", {}).values())
        last = sum(g._adj.get("E8", {}).values())
        assert first >= last


class TestRemoveDocument:
    def test_add_remove_restores_empty(self):
        g = EntityGraph()
        doc = annotated([("A", 0), ("B", 50), ("C", 90)])
        g.add_document(doc)
        g.remove_document(doc)
        assert g.n_nodes == 0 and g.n_edges == 0

    def test_shared_edge_survives(self):
        g = EntityGraph()
        d1 = annotated([("A", 0), ("B", 50)], doc_id="d1")
        d2 = annotated([("A", 0), ("B", 40)], doc_id="d2")
        g.add_document(d1)
        g.add_document(d2)
        g.remove_document(d1)
        assert g.edge_count("A", "B") == 1

    def test_remove_unknown_document_errors(self):
        g = EntityGraph()
        g.add_document(annotated([("A", 0), ("B", 50)]))
        with pytest.raises(GraphUpdateError):
            g.remove_document(annotated([("X", 0), ("Y", 50)]))

    def test_failed_remove_leaves_graph_untouched(self):
        g = EntityGraph()
        d1 = annotated([("A", 0), ("B", 50)])
        g.add_document(d1)
        with pytest.raises(GraphUpdateError):
            g.remove_document(annotated([("A", 0), ("B", 50), ("C", 90)]))
        assert g.edge_count("A", "B") == 1

    @settings(max_examples=100, deadline=None)
    @given(st.data())
    def test_add_remove_inverse_random(self, data):
        rng_seed = data.draw(st.integers(0, 10**6))
        rng = random.Random(rng_seed)
        docs = []
        for d in range(rng.randint(1, 6)):
            text_len = rng.randint(50, 800)
            n_ents = rng.randint(0, 8)
            entries = [
                (f"E{rng.randint(0, 9)}", rng.randint(0, text_len))
                for _ in range(n_ents)
            ]
            docs.append(annotated(entries, text_len=text_len, doc_id=f"d{d}"))
        g = EntityGraph()
        base = annotated([("K1", 0), ("K2", 30)], doc_id="base")
        g.add_document(base)
        before_edges = {k: dict(v) for k, v in g._adj.items()}
        for doc in docs:
            g.add_document(doc)
        removal_order = docs[:]
        rng.shuffle(removal_order)
        for doc in removal_order:
            g.remove_document(doc)
        after_edges = {k: dict(v) for k, v in g._adj.items()}
        assert after_edges == before_edges


class TestPageRank:
    def test_single_node_gets_unit_weight(self):
        g = EntityGraph()
        g._adj["solo"] = {}
        weights = g.pagerank()
        assert weights == {"solo": 1.0}

    def test_two_nodes_symmetric(self):
        g = EntityGraph()
        g.add_document(annotated([("A", 0), ("B", 50)]))
        g.bias = ["A", "B"]
        weights = g.pagerank()
        assert weights["A"] == pytest.approx(0.5, abs=1e-12)
        assert weights["B"] == pytest.approx(0.5, abs=1e-12)

    def test_path_graph_matches_frozen_oracle_values(self):
        # A-B-C with unit counts, damping 0.85, teleport {A}; expected
        # weights are 12.775/37, 17/37 and 7.225/37 (dense-oracle verified)
        g = EntityGraph()
        g.add_document(annotated([("A", 0), ("B", 50)], doc_id="d1"))
        g.add_document(annotated([("B", 0), ("C", 50)], doc_id="d2"))
        g.bias = ["A"]
        weights = g.pagerank()
        assert weights["A"] == pytest.approx(0.3452702702702703, abs=1e-8)
        assert weights["B"] == pytest.approx(0.4594594594594595, abs=1e-8)
        assert weights["C"] == pytest.approx(0.1952702702702703, abs=1e-8)

    def test_matches_dense_oracle_on_random_graphs(self):
        for seed in range(25):
            rng = random.Random(seed)
            n = rng.randint(2, 6)
            names = [f"N{i}" for i in range(n)]
            g = EntityGraph()
            for i in range(n):
                for j in range(i + 1, n):
                    if rng.random() < 0.6:
                        g._inc_edge(names[i], names[j], rng.randint(1, 5))
            if g.n_nodes == 0:
                continue
            present = sorted(g.nodes())
            g.bias = rng.sample(present, k=rng.randint(0, len(present)))
            mine = g.pagerank()
            oracle = dense_pagerank_oracle(
                {u: dict(nb) for u, nb in g._adj.items()}, g.bias)
            assert sum(mine.values()) == pytest.approx(1.0, abs=1e-9)
            for node, w in oracle.items():
                assert mine[node] == pytest.approx(w, abs=1e-8)

    def test_weights_sum_to_one(self):
        g = EntityGraph()
        g.add_document(annotated([("A", 0), ("B", 50), ("C", 90), ("D", 130)]))
        weights = g.pagerank()
        assert sum(weights.values()) == pytest.approx(1.0, abs=1e-9)

    def test_bias_ignored_when_members_pruned(self):
        g = EntityGraph()
        d1 = annotated([("A", 0), ("B", 50)], doc_id="d1")
        d2 = annotated([("C", 0), ("D", 50)], doc_id="d2")
        g.add_document(d1)
        g.add_document(d2)
        g.bias = ["A", "B"]
        g.remove_document(d1)
        weights = g.pagerank()  # bias members vanished: uniform teleport
        assert weights["C"] == pytest.approx(0.5, abs=1e-9)


class TestInitializeBias:
    def test_small_graph_takes_all_nodes(self):
        g = EntityGraph()
        entries = [(f"E{i}", i * 30) for i in range(7)]
        g.add_document(annotated(entries, text_len=400))
        g.initialize_bias()
        assert sorted(g.bias) == sorted(f"E{i}" for i in range(7))

    def test_seven_node_nineteen_edge_seed_keeps_all_seven(self):
        # a one-article seed graph of 7 nodes / 19 edges: the bias set is
        # the whole graph, since it is smaller than the top-10 cut
        g = EntityGraph()
        names = [f"E{i}" for i in range(7)]
        skipped = {("E0", "E6"), ("E1", "E5")}  # K7 minus two pairs
        for i in range(7):
            for j in range(i + 1, 7):
                if (names[i], names[j]) not in skipped:
                    g._inc_edge(names[i], names[j], 1)
        assert (g.n_nodes, g.n_edges) == (7, 19)
        g.initialize_bias()
        assert sorted(g.bias) == names

    def test_caps_at_ten(self):
        g = EntityGraph()
        entries = [(f"E{i:02d}", i * 8) for i in range(14)]
        g.add_document(annotated(entries, text_len=200))
        g.initialize_bias()
        assert len(g.bias) == 10

    def test_equal_weights_tie_break_lexicographic(self):
        g = EntityGraph()
        # six disconnected symmetric pairs: all twelve nodes weigh the same
        for i in range(6):
            g._inc_edge(f"P{i}a", f"P{i}b", 1)
        g.initialize_bias()
        expected = sorted(g.nodes())[:10]
        assert sorted(g.bias) == sorted(expected)

    def test_second_call_errors(self):
        g = EntityGraph()
        g.add_document(annotated([("A", 0), ("B", 10)]))
        g.initialize_bias()
        with pytest.raises(GraphError, match="frozen"):
            g.initialize_bias()

    def test_bootstrap_is_unbiased_then_frozen(self):
        g = EntityGraph()
        g.add_document(annotated([("A", 0), ("B", 10), ("C", 25)], text_len=100))
        g.initialize_bias()
        assert set(g.bias) == {"A", "B", "C"}


class TestSnapshot:
    def test_snapshot_shape(self):
        g = EntityGraph()
        g.add_document(annotated([("B", 0), ("A", 50)]))
        g.initialize_bias()
        g.pagerank()
        snap = g.snapshot()
        assert [n["id"] for n in snap["nodes"]] == ["A", "B"]
        assert snap["edges"] == [{"u": "A", "v": "B", "count": 1}]
        assert set(snap["bias"]) == {"A", "B"}
        assert sum(n["weight"] for n in snap["nodes"]) == pytest.approx(1.0)

    def test_config_defaults(self):
        cfg = GraphConfig()
        assert cfg.window_start == 500.0
        assert cfg.window_shrink == 400.0
        assert cfg.damping == 0.85
