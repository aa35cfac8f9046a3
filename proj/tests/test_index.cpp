#include <doctest.h>

#include "kgbench/vector_index.hpp"
#include "kgbench/vector_store.hpp"
#include "support.hpp"

#include <algorithm>
#include <set>

using namespace kgbench;
using kgtest::TempDir;

namespace {

IndexConfig small_config(std::size_t dim) {
    IndexConfig cfg;
    cfg.dim = dim;
    return cfg;
}

} // namespace

TEST_CASE("vector store holds fixed-dimension rows") {
    VectorStore store(3);
    store.put("a", {1.0f, 2.0f, 3.0f});
    store.put("b", {4.0f, 5.0f, 6.0f});
    CHECK(store.size() == 2);
    CHECK(store.dim() == 3);
    CHECK(store.contains("a"));
    CHECK(!store.contains("c"));
    auto v = store.get("b");
    REQUIRE(v.size() == 3);
    CHECK(v[0] == 4.0f);

    CHECK_THROWS(store.put("c", {1.0f}));          // wrong dimension
    CHECK_THROWS(store.put("a", {7.0f, 8.0f, 9.0f})); // duplicate key
    CHECK_THROWS(store.get("missing"));
    CHECK(store.sorted_keys() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("vector store file round-trip is byte-identical") {
    VectorStore store(4);
    kgbench::Rng rng(11);
    for (int i = 0; i < 20; ++i)
        store.put("key-" + std::to_string(i), kgtest::random_vector(rng, 4));

    std::string bytes = store.serialize();
    VectorStore back = VectorStore::deserialize(bytes);
    CHECK(back.size() == store.size());
    CHECK(back.dim() == store.dim());
    for (const auto& key : store.sorted_keys()) {
        auto a = store.get(key);
        auto b = back.get(key);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }
    CHECK(back.serialize() == bytes);

    TempDir dir("store");
    store.save(dir.file("v.bin"));
    VectorStore loaded = VectorStore::load(dir.file("v.bin"));
    CHECK(loaded.serialize() == bytes);
}

TEST_CASE("vector store rejects tampered files with the shared taxonomy") {
    VectorStore store(2);
    store.put("k", {0.5f, 0.5f});
    std::string good = store.serialize();

    SUBCASE("flipped payload byte") {
        std::string bad = good;
        bad[bad.size() / 2] ^= 0x01;
        try {
            VectorStore::deserialize(bad);
            FAIL("expected checksum failure");
        } catch (const SnapshotError& e) {
            CHECK(e.status() == SnapshotStatus::checksum_mismatch);
        }
    }
    SUBCASE("wrong magic") {
        std::string bad = good;
        bad[0] = 'X';
        try {
            VectorStore::deserialize(bad);
            FAIL("expected magic failure");
        } catch (const SnapshotError& e) {
            CHECK(e.status() == SnapshotStatus::bad_magic);
        }
    }
    SUBCASE("truncation") {
        std::string bad = good.substr(0, good.size() / 2);
        CHECK_THROWS_AS(VectorStore::deserialize(bad), SnapshotError);
    }
    SUBCASE("missing file") {
        try {
            VectorStore::load("/nonexistent/path/v.bin");
            FAIL("expected io failure");
        } catch (const SnapshotError& e) {
            CHECK(e.status() == SnapshotStatus::io_error);
        }
    }
}

TEST_CASE("normalization makes inner product cosine") {
    std::vector<float> v{3.0f, 4.0f};
    auto u = unit_normalized(v);
    CHECK(std::abs(dot(u, u) - 1.0f) < 1e-6f);
    CHECK(u[0] == doctest::Approx(0.6f));
    CHECK(u[1] == doctest::Approx(0.8f));
    // zero vector stays zero instead of dividing by zero
    std::vector<float> z{0.0f, 0.0f};
    auto uz = unit_normalized(z);
    CHECK(uz == z);
}

TEST_CASE("self query returns similarity one") {
    for (const char* backend : {"flat", "hnsw"}) {
        CAPTURE(backend);
        auto index = make_index(backend, small_config(8));
        kgbench::Rng rng(5);
        auto v = kgtest::random_vector(rng, 8);
        index->add(1, v);
        auto res = index->query(unit_normalized(v), 1);
        REQUIRE(res.size() == 1);
        CHECK(res[0].id == 1);
        CHECK(res[0].similarity == doctest::Approx(1.0f).epsilon(1e-4));
    }
}

TEST_CASE("query returns at most k and never more than the population") {
    for (const char* backend : {"flat", "hnsw"}) {
        CAPTURE(backend);
        auto index = make_index(backend, small_config(4));
        kgbench::Rng rng(6);
        for (NodeId id = 0; id < 10; ++id) index->add(id, kgtest::random_vector(rng, 4));
        auto q = kgtest::random_vector(rng, 4);
        CHECK(index->query(q, 20).size() == 10);
        CHECK(index->query(q, 3).size() == 3);
        CHECK(index->size() == 10);
    }
}

TEST_CASE("results are sorted by similarity then ascending id") {
    // four identical vectors force a pure id tie-break
    auto index = make_index("flat", small_config(2));
    std::vector<float> v{1.0f, 0.0f};
    for (NodeId id : {7, 3, 9, 1}) index->add(id, v);
    auto res = index->query(v, 4);
    REQUIRE(res.size() == 4);
    CHECK(res[0].id == 1);
    CHECK(res[1].id == 3);
    CHECK(res[2].id == 7);
    CHECK(res[3].id == 9);
    for (const auto& n : res) CHECK(n.similarity == doctest::Approx(1.0f));

    auto hnsw = make_index("hnsw", small_config(2));
    for (NodeId id : {7, 3, 9, 1}) hnsw->add(id, v);
    auto hres = hnsw->query(v, 4);
    REQUIRE(hres.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(hres[i].id == res[i].id);
}

TEST_CASE("query_node excludes the probe itself") {
    for (const char* backend : {"flat", "hnsw"}) {
        CAPTURE(backend);
        auto index = make_index(backend, small_config(4));
        kgbench::Rng rng(7);
        for (NodeId id = 0; id < 8; ++id) index->add(id, kgtest::random_vector(rng, 4));
        auto res = index->query_node(3, 8);
        CHECK(res.size() == 7);
        for (const auto& n : res) CHECK(n.id != 3);
        CHECK_THROWS_AS(index->query_node(99, 3), IndexError);
    }
}

TEST_CASE("indexes reject dimension mismatches and duplicate ids") {
    for (const char* backend : {"flat", "hnsw"}) {
        CAPTURE(backend);
        auto index = make_index(backend, small_config(4));
        std::vector<float> v{1.0f, 0.0f, 0.0f, 0.0f};
        index->add(1, v);
        CHECK_THROWS_AS(index->add(2, std::vector<float>{1.0f}), IndexError);
        CHECK_THROWS_AS(index->add(1, v), IndexError);
        CHECK_THROWS_AS((void)index->query(std::vector<float>{1.0f}, 1), IndexError);
        CHECK_THROWS_AS((void)index->vector_of(42), IndexError);
        CHECK(index->contains(1));
        CHECK(!index->contains(2));
    }
}

TEST_CASE("vector_of returns the stored (normalized) row") {
    auto index = make_index("hnsw", small_config(2));
    index->add(5, std::vector<float>{3.0f, 4.0f});
    auto row = index->vector_of(5);
    REQUIRE(row.size() == 2);
    CHECK(row[0] == doctest::Approx(0.6f));
    CHECK(row[1] == doctest::Approx(0.8f));
}

TEST_CASE("approximate index matches the exact scan on random data") {
    IndexConfig cfg = small_config(16);
    cfg.search_beam = 120; // beam > population makes the search effectively exact
    cfg.build_beam = 120;
    FlatIndex flat(cfg);
    HnswIndex hnsw(cfg);
    kgbench::Rng rng(20240915);
    for (NodeId id = 0; id < 100; ++id) {
        auto v = kgtest::random_vector(rng, 16);
        flat.add(id, v);
        hnsw.add(id, v);
    }
    std::size_t top1_hits = 0;
    for (int t = 0; t < 100; ++t) {
        auto q = unit_normalized(kgtest::random_vector(rng, 16));
        auto exact = flat.query(q, 10);
        auto approx = hnsw.query(q, 10);
        REQUIRE(exact.size() == 10);
        REQUIRE(approx.size() == 10);
        if (approx[0].id == exact[0].id) ++top1_hits;
    }
    CHECK(top1_hits >= 99);
}

TEST_CASE("index construction is deterministic for a fixed seed") {
    IndexConfig cfg = small_config(8);
    HnswIndex a(cfg), b(cfg);
    kgbench::Rng rng(99);
    std::vector<std::vector<float>> vecs;
    for (int i = 0; i < 50; ++i) vecs.push_back(kgtest::random_vector(rng, 8));
    for (NodeId id = 0; id < 50; ++id) {
        a.add(id, vecs[id]);
        b.add(id, vecs[id]);
    }
    auto q = unit_normalized(kgtest::random_vector(rng, 8));
    auto ra = a.query(q, 20);
    auto rb = b.query(q, 20);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) {
        CHECK(ra[i].id == rb[i].id);
        CHECK(ra[i].similarity == rb[i].similarity);
    }
}

TEST_CASE("make_index knows its backends") {
    CHECK(make_index("flat", small_config(2)) != nullptr);
    CHECK(make_index("hnsw", small_config(2)) != nullptr);
    CHECK_THROWS_AS(make_index("faiss", small_config(2)), IndexError);
}
