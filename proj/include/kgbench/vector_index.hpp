#pragma once
// Nearest-neighbor indexes over node embeddings. Two implementations share
// one interface: FlatIndex (exact scan, used in tests as the oracle and by
// the retrieval tools, where approximation is not allowed) and HnswIndex
// (layered small-world graph for the merge phase).
//
// Scores are inner products. With cosine enabled (the default) vectors are
// unit-normalized at add time so the inner product is cosine similarity.

#include "kgbench/ids.hpp"

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace kgbench {

struct IndexConfig {
    std::size_t max_links = 32;           // graph degree per layer (M)
    std::size_t build_beam = 50;          // candidate beam while inserting
    std::size_t search_beam = 30;         // candidate beam while querying
    std::size_t neighbors_per_query = 20; // default K
    std::size_t dim = 4096;
    bool cosine = true; // normalize at add time
    std::uint64_t seed = 42;
};

struct Neighbor {
    NodeId id = kInvalidNode;
    float similarity = 0.0f;
};

class IndexError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline float dot(std::span<const float> a, std::span<const float> b) {
    float s = 0.0f;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline std::vector<float> unit_normalized(std::span<const float> v) {
    double norm2 = 0.0;
    for (float x : v) norm2 += static_cast<double>(x) * x;
    std::vector<float> out(v.begin(), v.end());
    if (norm2 > 0.0) {
        float inv = static_cast<float>(1.0 / std::sqrt(norm2));
        for (float& x : out) x *= inv;
    }
    return out;
}

class NearestNeighborIndex {
  public:
    virtual ~NearestNeighborIndex() = default;

    virtual void add(NodeId id, std::span<const float> v) = 0;
    // <= k results, sorted by descending similarity, ties by ascending id.
    virtual std::vector<Neighbor> query(std::span<const float> v, std::size_t k) const = 0;
    virtual std::size_t size() const = 0;
    virtual bool contains(NodeId id) const = 0;
    virtual std::span<const float> vector_of(NodeId id) const = 0;

    // Neighbors of an already-indexed node, self excluded.
    std::vector<Neighbor> query_node(NodeId id, std::size_t k) const;
};

class FlatIndex : public NearestNeighborIndex {
  public:
    explicit FlatIndex(IndexConfig cfg) : cfg_(cfg) {}

    void add(NodeId id, std::span<const float> v) override;
    std::vector<Neighbor> query(std::span<const float> v, std::size_t k) const override;
    std::size_t size() const override { return ids_.size(); }
    bool contains(NodeId id) const override { return rows_.count(id) != 0; }
    std::span<const float> vector_of(NodeId id) const override;

  private:
    IndexConfig cfg_;
    std::vector<NodeId> ids_;
    std::vector<float> data_;
    std::unordered_map<NodeId, std::size_t> rows_;
};

class HnswIndex : public NearestNeighborIndex {
  public:
    explicit HnswIndex(IndexConfig cfg);

    void add(NodeId id, std::span<const float> v) override;
    std::vector<Neighbor> query(std::span<const float> v, std::size_t k) const override;
    std::size_t size() const override { return ids_.size(); }
    bool contains(NodeId id) const override { return rows_.count(id) != 0; }
    std::span<const float> vector_of(NodeId id) const override;

  private:
    std::span<const float> row(std::size_t i) const {
        return {data_.data() + i * cfg_.dim, cfg_.dim};
    }
    float score_rows(std::size_t i, std::span<const float> q) const { return dot(row(i), q); }
    int draw_level();
    // Beam search on one layer starting from `entry`; returns candidates as
    // (similarity, row) sorted descending, at most `beam` of them.
    std::vector<std::pair<float, std::size_t>> search_layer(std::span<const float> q,
                                                            std::size_t entry, int level,
                                                            std::size_t beam) const;
    // Diversity-preserving neighbor selection (keeps a candidate only if it
    // is closer to the query than to every already-selected neighbor; the
    // candidate scores are already similarities to the query).
    std::vector<std::size_t> select_neighbors(std::vector<std::pair<float, std::size_t>> cand,
                                              std::size_t m) const;
    void link(std::size_t from, std::size_t to, int level);

    IndexConfig cfg_;
    double level_scale_;
    std::uint64_t level_state_;
    std::vector<NodeId> ids_;
    std::vector<float> data_;
    std::unordered_map<NodeId, std::size_t> rows_;
    // links_[row][level] -> neighbor rows; links_[row].size() = node level + 1
    std::vector<std::vector<std::vector<std::size_t>>> links_;
    std::size_t entry_ = 0;
    int max_level_ = -1;
};

std::unique_ptr<NearestNeighborIndex> make_index(const std::string& backend, IndexConfig cfg);

} // namespace kgbench
