#include <doctest.h>

#include "kgbench/graph.hpp"
#include "kgbench/snapshot.hpp"
#include "support.hpp"

using namespace kgbench;
using kgtest::TempDir;

TEST_CASE("node kinds: exactly 13, names round-trip") {
    CHECK(kNumKinds == 13);
    for (std::size_t i = 0; i < kNumKinds; ++i) {
        auto kind = static_cast<NodeKind>(i);
        auto parsed = parse_kind(kind_name(kind));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == kind);
    }
    CHECK(!parse_kind("related_work").has_value());
    CHECK(is_key_info(NodeKind::datasets));
    CHECK(!is_key_info(NodeKind::title));
}

TEST_CASE("full record adds 13 nodes and 12 edges") {
    KnowledgeGraph g;
    NodeId title = g.add_node(NodeKind::title, "t", Modality::text, "p1");
    for (std::size_t i = 0; i < kNumKinds; ++i) {
        auto kind = static_cast<NodeKind>(i);
        if (!is_key_info(kind)) continue;
        NodeId n = g.add_node(kind, "payload", Modality::text, "p1");
        g.add_edge(title, n);
    }
    CHECK(g.num_nodes() == 13);
    CHECK(g.num_edges() == 12);
    CHECK(g.neighbors(title).size() == 12);
    CHECK(g.articles().size() == 1);
    CHECK(g.keyinfo().size() == 12);
}

TEST_CASE("minimal record: title + datasets -> 2 nodes, 1 edge") {
    KnowledgeGraph g;
    NodeId title = g.add_node(NodeKind::title, "t", Modality::text, "p1");
    NodeId ds = g.add_node(NodeKind::datasets, "ImageNet", Modality::text, "p1");
    g.add_edge(title, ds);
    CHECK(g.num_nodes() == 2);
    CHECK(g.num_edges() == 1);
    CHECK(g.neighbors(ds) == std::vector<NodeId>{title});
}

TEST_CASE("duplicate paper id is rejected by name") {
    KnowledgeGraph g;
    g.add_node(NodeKind::title, "t", Modality::text, "p1");
    try {
        g.add_node(NodeKind::title, "t2", Modality::text, "p1");
        FAIL("expected GraphError");
    } catch (const GraphError& e) {
        CHECK(std::string(e.what()).find("p1") != std::string::npos);
    }
}

TEST_CASE("partition invariant and belongs-to shape on the fixture corpus") {
    KnowledgeGraph g = kgtest::fixture_graph();
    CHECK(g.articles().size() == 3);

    std::size_t adjacency_total = 0;
    for (NodeId id : g.sorted_node_ids()) {
        bool in_articles = g.articles().count(id) != 0;
        bool in_keyinfo = g.keyinfo().count(id) != 0;
        CHECK(in_articles != in_keyinfo); // exactly one partition
        adjacency_total += g.degree(id);
    }
    CHECK(adjacency_total == 2 * g.num_edges());

    // Pre-merge: every key-info node hangs off exactly one title node.
    for (NodeId id : g.sorted_keyinfo()) {
        REQUIRE(g.degree(id) == 1);
        CHECK(g.articles().count(g.neighbors(id).front()) == 1);
    }
    CHECK(g.adjacency_coherent());
}

TEST_CASE("neighbors equal brute-force edge scan") {
    KnowledgeGraph g = kgtest::fixture_graph();
    for (NodeId id : g.sorted_node_ids()) {
        std::vector<NodeId> expected;
        for (const auto& e : g.edges()) {
            if (e.a == id) expected.push_back(e.b);
            if (e.b == id) expected.push_back(e.a);
        }
        std::sort(expected.begin(), expected.end());
        CHECK(g.neighbors(id) == expected);
    }
}

TEST_CASE("unknown node lookups fail") {
    KnowledgeGraph g;
    CHECK_THROWS_AS(g.node(42), GraphError);
    CHECK_THROWS_AS(g.neighbors(42), GraphError);
    CHECK_THROWS_AS((void)g.title_node("nope"), GraphError);
}

TEST_CASE("freeze forbids mutation and permits reads") {
    KnowledgeGraph g = kgtest::fixture_graph();
    g.freeze();
    CHECK(g.frozen());
    CHECK_THROWS_AS(g.add_node(NodeKind::datasets, "x", Modality::text, "p9"), GraphError);
    CHECK_THROWS_AS(g.add_edge(0, 1), GraphError);
    CHECK(g.num_nodes() > 0);
    CHECK(g.neighbors(g.sorted_node_ids().front()).size() >= 1);
}

TEST_CASE("absorb_node rewires edges, drops self-loops, accumulates provenance") {
    KnowledgeGraph g;
    NodeId t1 = g.add_node(NodeKind::title, "t1", Modality::text, "p1");
    NodeId t2 = g.add_node(NodeKind::title, "t2", Modality::text, "p2");
    NodeId d1 = g.add_node(NodeKind::datasets, "ImageNet", Modality::text, "p1");
    NodeId d2 = g.add_node(NodeKind::datasets, "ImageNet", Modality::text, "p2");
    g.add_edge(t1, d1);
    g.add_edge(t2, d2);

    g.absorb_node(d1, d2);
    CHECK(!g.has_node(d2));
    CHECK(g.has_edge(t1, d1));
    CHECK(g.has_edge(t2, d1));
    CHECK(g.degree(d1) == 2);
    const Node& canon = g.node(d1);
    CHECK(canon.source_paper_ids == std::set<std::string>{"p1", "p2"});
    REQUIRE(canon.provenance.size() == 2);
    CHECK(canon.provenance[0].original_id == d1);
    CHECK(canon.provenance[1].original_id == d2);

    // Cross-kind absorption is rejected.
    NodeId m1 = g.add_node(NodeKind::metrics, "acc", Modality::text, "p1");
    CHECK_THROWS_AS(g.absorb_node(d1, m1), GraphError);
}

TEST_CASE("empty graph snapshot round-trip") {
    KnowledgeGraph g;
    std::string bytes = serialize_graph(g);
    KnowledgeGraph back = deserialize_graph(bytes);
    CHECK(back.num_nodes() == 0);
    CHECK(back.num_edges() == 0);
    CHECK(serialize_graph(back) == bytes);
}

TEST_CASE("fixture snapshot round-trip is byte-identical and structure-preserving") {
    KnowledgeGraph g = kgtest::fixture_graph();
    g.set_high_frequency({g.sorted_keyinfo().front()});
    std::string bytes = serialize_graph(g);
    KnowledgeGraph back = deserialize_graph(bytes);

    CHECK(back.num_nodes() == g.num_nodes());
    CHECK(back.num_edges() == g.num_edges());
    CHECK(back.articles().size() == g.articles().size());
    CHECK(back.high_frequency() == g.high_frequency());
    CHECK(back.next_id() == g.next_id());
    for (NodeId id : g.sorted_node_ids()) {
        const Node& a = g.node(id);
        const Node& b = back.node(id);
        CHECK(a.kind == b.kind);
        CHECK(a.content == b.content);
        CHECK(a.modality == b.modality);
        CHECK(a.source_paper_ids == b.source_paper_ids);
        CHECK(a.vector_key == b.vector_key);
        CHECK(a.media_ref == b.media_ref);
        CHECK(a.provenance == b.provenance);
    }
    // save . load . save produces identical bytes
    CHECK(serialize_graph(back) == bytes);
}

TEST_CASE("snapshot load failures are distinct") {
    KnowledgeGraph g = kgtest::fixture_graph();
    std::string bytes = serialize_graph(g);

    SUBCASE("corrupted trailing checksum") {
        std::string bad = bytes;
        bad.back() = static_cast<char>(bad.back() ^ 0x5a);
        try {
            deserialize_graph(bad);
            FAIL("expected checksum failure");
        } catch (const SnapshotError& e) {
            CHECK(e.status() == SnapshotStatus::checksum_mismatch);
        }
    }
    SUBCASE("flipped payload byte") {
        std::string bad = bytes;
        bad[bytes.size() / 2] = static_cast<char>(bad[bytes.size() / 2] ^ 0x5a);
        try {
            deserialize_graph(bad);
            FAIL("expected checksum failure");
        } catch (const SnapshotError& e) {
            CHECK(e.status() == SnapshotStatus::checksum_mismatch);
        }
    }
    SUBCASE("truncation") {
        std::string bad = bytes.substr(0, bytes.size() / 2);
        try {
            deserialize_graph(bad);
            FAIL("expected truncation failure");
        } catch (const SnapshotError& e) {
            CHECK((e.status() == SnapshotStatus::truncated ||
                   e.status() == SnapshotStatus::checksum_mismatch));
        }
    }
    SUBCASE("wrong magic") {
        std::string bad = bytes;
        bad[0] = 'X';
        try {
            deserialize_graph(bad);
            FAIL("expected bad magic");
        } catch (const SnapshotError& e) {
            CHECK(e.status() == SnapshotStatus::bad_magic);
        }
    }
    SUBCASE("version bump") {
        std::string bad = bytes;
        bad[4] = 9; // version byte follows the 4-byte magic
        // re-stamp the checksum so only the version differs
        std::uint64_t sum = fnv1a64(bad.data(), bad.size() - 8);
        for (int i = 0; i < 8; ++i)
            bad[bad.size() - 8 + i] = static_cast<char>((sum >> (8 * i)) & 0xff);
        try {
            deserialize_graph(bad);
            FAIL("expected version mismatch");
        } catch (const SnapshotError& e) {
            CHECK(e.status() == SnapshotStatus::version_mismatch);
        }
    }
    SUBCASE("missing file") {
        try {
            load_graph("/nonexistent/kgbench.snap");
            FAIL("expected io error");
        } catch (const SnapshotError& e) {
            CHECK(e.status() == SnapshotStatus::io_error);
        }
    }
}

TEST_CASE("snapshot file round-trip") {
    TempDir dir("snap");
    KnowledgeGraph g = kgtest::fixture_graph();
    save_graph(g, dir.file("g.snap"));
    KnowledgeGraph back = load_graph(dir.file("g.snap"));
    CHECK(serialize_graph(back) == serialize_graph(g));
}
