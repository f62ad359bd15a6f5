import json

import pytest

from credgraph.graph import (ARTICLE, CITATION, FOLLOWERSHIP, PUBLICATION,
                             STANCE, GraphFormatError, NodeId, SocialGraph,
                             Stance, load_graph, save_graph)
from tests.conftest import write_jsonl


def art(key, label="unlabeled", **kw):
    return {"kind": "article", "key": key, "label": label, **kw}


def src(key, **kw):
    return {"kind": "source", "key": key, **kw}


def usr(key, **kw):
    return {"kind": "user", "key": key, **kw}


def edge(sk, s, dk, d, label, **kw):
    return {"src_kind": sk, "src_key": s, "dst_kind": dk, "dst_key": d,
            "label": label, **kw}


BASIC_ENTITIES = [
    art("a1", "fake", text="body one", title="t1"),
    art("a2", "real", text="body two", title="t2"),
    src("s1", text="about us"),
    usr("u1", text="profile"),
    usr("u2"),
    usr("u3"),
]
BASIC_EDGES = [
    edge("source", "s1", "article", "a1", "publication"),
    edge("source", "s1", "article", "a2", "publication"),
    edge("user", "u1", "user", "u2", "followership"),
    edge("user", "u1", "article", "a1", "stance", stance="deny", elapsed_hours=3.0),
    edge("user", "u2", "article", "a1", "stance", stance="report", elapsed_hours=1.0),
]


class TestLoadGraph:
    def test_identity_ingestion_counts(self, make_graph):
        g = make_graph(BASIC_ENTITIES, BASIC_EDGES)
        counts = g.counts()
        assert counts["article"] == 2
        assert counts["source"] == 1
        assert counts["user"] == 3
        assert counts["publication"] == 2
        assert counts["followership"] == 1
        assert counts["stance"] == 2

    def test_mistyped_citation_names_line(self, tmp_path):
        ents = write_jsonl(tmp_path / "e.jsonl", [usr("u1"), src("s1")])
        edgs = write_jsonl(tmp_path / "g.jsonl", [
            edge("user", "u1", "source", "s1", "citation"),
        ])
        with pytest.raises(GraphFormatError) as err:
            load_graph(ents, edgs)
        assert err.value.category == "mistyped-edge"
        assert err.value.line_no == 1

    def test_corpus_scale_cardinalities(self, tmp_path):
        # Node counts mirror the reference corpus: 448 fake + 606 real
        # articles, 442 sources, 54461 users.
        entities = []
        for i in range(448):
            entities.append(art(f"f{i}", "fake"))
        for i in range(606):
            entities.append(art(f"r{i}", "real"))
        for i in range(442):
            entities.append(src(f"s{i}"))
        for i in range(54461):
            entities.append(usr(f"u{i}"))
        edges = [
            edge("source", f"s{i % 442}", "article", f"f{i}", "publication")
            for i in range(448)
        ] + [
            edge("user", f"u{i}", "user", f"u{i + 1}", "followership")
            for i in range(0, 2000, 2)
        ]
        ents = write_jsonl(tmp_path / "big_e.jsonl", entities)
        edgs = write_jsonl(tmp_path / "big_g.jsonl", edges)
        g = load_graph(ents, edgs)
        counts = g.counts()
        assert counts["article"] == 448 + 606
        assert counts["source"] == 442
        assert counts["user"] == 54461

    def test_error_classes(self, tmp_path):
        ents = write_jsonl(tmp_path / "ok_e.jsonl", BASIC_ENTITIES)

        bad_line = tmp_path / "bad1.jsonl"
        bad_line.write_text('{"src_kind": "user"\n', encoding="utf-8")
        with pytest.raises(GraphFormatError) as err:
            load_graph(ents, bad_line)
        assert err.value.category == "malformed-line"
        assert err.value.line_no == 1

        dangling = write_jsonl(tmp_path / "bad2.jsonl", [
            edge("user", "nobody", "article", "a1", "stance",
                 stance="deny", elapsed_hours=1.0),
        ])
        with pytest.raises(GraphFormatError) as err:
            load_graph(ents, dangling)
        assert err.value.category == "dangling-endpoint"

        negative = write_jsonl(tmp_path / "bad3.jsonl", [
            edge("user", "u1", "article", "a1", "stance",
                 stance="deny", elapsed_hours=-2.0),
        ])
        with pytest.raises(GraphFormatError) as err:
            load_graph(ents, negative)
        assert err.value.category == "negative-elapsed"

        selfloop = write_jsonl(tmp_path / "bad4.jsonl", [
            edge("user", "u1", "user", "u1", "followership"),
        ])
        with pytest.raises(GraphFormatError) as err:
            load_graph(ents, selfloop)
        assert err.value.category == "self-loop"

    def test_publication_defaults_to_hour_zero(self, make_graph):
        g = make_graph([art("a1"), src("s1")],
                       [edge("source", "s1", "article", "a1", "publication")])
        pub = [e for e in g.edges if e.label == PUBLICATION][0]
        assert pub.elapsed_hours == 0.0

    def test_followership_with_elapsed_rejected(self, make_graph):
        with pytest.raises(GraphFormatError) as err:
            make_graph([usr("u1"), usr("u2")],
                       [edge("user", "u1", "user", "u2", "followership",
                             elapsed_hours=1.0)])
        assert err.value.category == "mistyped-edge"


class TestNeighbors:
    def test_followership_is_symmetric(self, make_graph):
        g = make_graph([usr("u1"), usr("u2")],
                       [edge("user", "u1", "user", "u2", "followership")])
        assert g.neighbors(NodeId("user", "u2"), FOLLOWERSHIP) == [NodeId("user", "u1")]
        assert g.neighbors(NodeId("user", "u1"), FOLLOWERSHIP) == [NodeId("user", "u2")]

    def test_isolated_node_empty(self, make_graph):
        g = make_graph([usr("u1")], [])
        assert g.neighbors(NodeId("user", "u1"), FOLLOWERSHIP) == []

    def test_three_citations_sorted(self, make_graph):
        # 5-source fixture; hand enumeration: s1 touches s2, s3, s4 but not s5.
        g = make_graph(
            [src(f"s{i}") for i in range(1, 6)],
            [edge("source", "s1", "source", "s2", "citation"),
             edge("source", "s3", "source", "s1", "citation"),
             edge("source", "s1", "source", "s4", "citation"),
             edge("source", "s2", "source", "s5", "citation")],
        )
        got = g.neighbors(NodeId("source", "s1"), CITATION)
        assert got == [NodeId("source", "s2"), NodeId("source", "s3"),
                       NodeId("source", "s4")]

    def test_unknown_node_raises(self, make_graph):
        g = make_graph([usr("u1")], [])
        with pytest.raises(KeyError):
            g.neighbors(NodeId("user", "ghost"), FOLLOWERSHIP)


class TestEngagements:
    def test_zero_engagements(self, make_graph):
        g = make_graph([art("a1")], [])
        assert len(g.engagements(NodeId("article", "a1"))) == 0

    def test_sorted_by_elapsed(self, make_graph):
        g = make_graph(
            [art("a1"), usr("u1"), usr("u2"), usr("u3")],
            [edge("user", "u1", "article", "a1", "stance", stance="deny", elapsed_hours=6.0),
             edge("user", "u2", "article", "a1", "stance", stance="report", elapsed_hours=1.0),
             edge("user", "u3", "article", "a1", "stance", stance="neutral_support", elapsed_hours=3.0)],
        )
        seq = g.engagements(NodeId("article", "a1"))
        assert [e.elapsed_hours for e in seq.items] == [1.0, 3.0, 6.0]

    def test_tie_breaks_on_user_key(self, make_graph):
        g = make_graph(
            [art("a1"), usr("b"), usr("a")],
            [edge("user", "b", "article", "a1", "stance", stance="deny", elapsed_hours=2.0),
             edge("user", "a", "article", "a1", "stance", stance="deny", elapsed_hours=2.0)],
        )
        seq = g.engagements(NodeId("article", "a1"))
        assert [e.user.key for e in seq.items] == ["a", "b"]

    def test_non_article_rejected(self, make_graph):
        g = make_graph([usr("u1")], [])
        with pytest.raises(ValueError):
            g.engagements(NodeId("user", "u1"))

    def test_length_equals_stance_edges(self, make_graph):
        g = make_graph(BASIC_ENTITIES, BASIC_EDGES)
        for a in g.nodes(ARTICLE):
            n_edges = sum(1 for e in g.edges if e.label == STANCE and e.dst == a)
            assert len(g.engagements(a)) == n_edges


MIXED_ENTITIES = [
    art("a1", "fake"), art("a2", "real"),
    src("s1"), src("s2"),
    usr("u1"), usr("u2"), usr("u3"),
]
MIXED_EDGES = [
    edge("source", "s1", "article", "a1", "publication"),
    edge("source", "s2", "article", "a2", "publication"),
    edge("source", "s1", "source", "s2", "citation"),
    edge("user", "u1", "user", "u2", "followership"),
    edge("user", "u2", "user", "u3", "followership"),
    edge("user", "u1", "user", "u3", "followership"),
    edge("user", "u1", "article", "a1", "stance", stance="deny", elapsed_hours=1.0),
    edge("user", "u2", "article", "a1", "stance", stance="report", elapsed_hours=2.0),
    edge("user", "u3", "article", "a2", "stance", stance="neutral_support", elapsed_hours=3.0),
    edge("user", "u1", "article", "a2", "stance", stance="negative_support", elapsed_hours=4.0),
]


class TestSplitSubgraphs:
    def test_followership_only(self, make_graph):
        g = make_graph([usr("u1"), usr("u2"), art("a1")],
                       [edge("user", "u1", "user", "u2", "followership")])
        ns, users = g.split_subgraphs()
        assert users.counts()["followership"] == 1
        assert users.counts()["user"] == 2
        assert ns.counts()["article"] == 1
        assert sum(ns.counts()[lb] for lb in (FOLLOWERSHIP, CITATION, PUBLICATION, STANCE)) == 0

    def test_publication_vs_stance(self, make_graph):
        g = make_graph(
            [art("a1"), src("s1"), usr("u1")],
            [edge("source", "s1", "article", "a1", "publication"),
             edge("user", "u1", "article", "a1", "stance", stance="deny", elapsed_hours=0.5)],
        )
        ns, users = g.split_subgraphs()
        assert ns.counts()["publication"] == 1
        assert ns.counts()["stance"] == 0
        assert users.counts()["stance"] == 0

    def test_mixed_partition_by_label_filter(self, make_graph):
        g = make_graph(MIXED_ENTITIES, MIXED_EDGES)
        ns, users = g.split_subgraphs()
        # Oracle: filter the input edge list by label.
        want_ns = sorted((e.src, e.dst, e.label) for e in g.edges
                         if e.label in (CITATION, PUBLICATION))
        want_u = sorted((e.src, e.dst, e.label) for e in g.edges
                        if e.label == FOLLOWERSHIP)
        assert sorted((e.src, e.dst, e.label) for e in ns.edges) == want_ns
        assert sorted((e.src, e.dst, e.label) for e in users.edges) == want_u
        n_stance = sum(1 for e in g.edges if e.label == STANCE)
        assert len(ns.edges) + len(users.edges) + n_stance == len(g.edges)

    def test_edge_typing_closure(self, make_graph):
        from credgraph.graph import EDGE_TYPING
        g = make_graph(MIXED_ENTITIES, MIXED_EDGES)
        for e in g.edges:
            assert (e.src.kind, e.dst.kind) == EDGE_TYPING[e.label]


class TestRoundTrip:
    def test_serialize_reparses_isomorphic(self, make_graph, tmp_path):
        g = make_graph(MIXED_ENTITIES, MIXED_EDGES)
        e2, g2 = tmp_path / "rt_e.jsonl", tmp_path / "rt_g.jsonl"
        save_graph(g, e2, g2)
        back = load_graph(e2, g2)
        assert back.nodes() == g.nodes()
        key = lambda e: (e.label, e.src, e.dst, e.stance, e.elapsed_hours)
        assert sorted(back.edges, key=key) == sorted(g.edges, key=key)
        for n in g.nodes():
            assert back.record(n) == g.record(n)

    def test_canonical_serialization_idempotent(self, make_graph, tmp_path):
        g = make_graph(MIXED_ENTITIES, MIXED_EDGES)
        e1, g1 = tmp_path / "c1_e.jsonl", tmp_path / "c1_g.jsonl"
        e2, g2 = tmp_path / "c2_e.jsonl", tmp_path / "c2_g.jsonl"
        save_graph(g, e1, g1)
        save_graph(load_graph(e1, g1), e2, g2)
        assert e1.read_bytes() == e2.read_bytes()
        assert g1.read_bytes() == g2.read_bytes()

    def test_repeated_stance_edges_allowed(self, make_graph):
        g = make_graph(
            [art("a1"), usr("u1")],
            [edge("user", "u1", "article", "a1", "stance", stance="deny", elapsed_hours=1.0),
             edge("user", "u1", "article", "a1", "stance", stance="report", elapsed_hours=5.0)],
        )
        assert len(g.engagements(NodeId("article", "a1"))) == 2
