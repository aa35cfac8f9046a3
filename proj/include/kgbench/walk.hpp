#pragma once
// Stratified biased random walks over the frozen graph and the
// article/key-info pair aggregation they produce.
//
// Walks are embarrassingly parallel: walk i draws from its own random
// stream keyed on (seed, i), so the aggregate is identical for any worker
// count; worker-local counters merge by commutative addition.

#include "kgbench/flatmap.hpp"
#include "kgbench/graph.hpp"
#include "kgbench/hashing.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace kgbench {

class WalkError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct WalkConfig {
    std::size_t walk_length = 100;       // L: transitions per walk
    std::size_t num_walks = 10000;       // W
    double bias = 0.3;                   // β: article -> high-frequency pull
    double article_start_fraction = 0.7; // share of starts drawn from V_a
    double hf_quantile = 0.90;           // degree quantile defining V_h
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

// Key-info nodes whose degree sits at or above the given quantile of the
// V_e degree distribution (ascending order statistic at floor(q*n), ties
// at the threshold included). Empty V_e yields an empty set plus warning.
struct HighFrequencyResult {
    std::vector<NodeId> ids;
    std::string warning;
};
HighFrequencyResult compute_high_frequency_set(const KnowledgeGraph& g, double quantile);

// Computes and installs V_h unless the graph already carries one.
void ensure_high_frequency(KnowledgeGraph& g, double quantile);

// Immutable dense-row view of a frozen graph: row-indexed adjacency plus
// the cached neighbors-within-V_h lists the biased step needs.
class FrozenGraphView {
  public:
    explicit FrozenGraphView(const KnowledgeGraph& g);

    std::uint32_t num_rows() const { return static_cast<std::uint32_t>(ids_.size()); }
    NodeId id_of(std::uint32_t row) const { return ids_[row]; }
    std::uint32_t row_of(NodeId id) const;

    bool is_article(std::uint32_t row) const { return article_[row]; }
    bool is_high_frequency(std::uint32_t row) const { return high_freq_[row]; }

    std::span<const std::uint32_t> neighbors(std::uint32_t row) const {
        return {adj_.data() + adj_start_[row], adj_start_[row + 1] - adj_start_[row]};
    }
    std::span<const std::uint32_t> hf_neighbors(std::uint32_t row) const {
        return {hf_adj_.data() + hf_start_[row], hf_start_[row + 1] - hf_start_[row]};
    }
    std::size_t degree(std::uint32_t row) const { return neighbors(row).size(); }

    const std::vector<std::uint32_t>& article_rows() const { return article_rows_; }
    const std::vector<std::uint32_t>& hf_rows() const { return hf_rows_; }
    const std::vector<std::uint32_t>& keyinfo_rows() const { return keyinfo_rows_; }
    const KnowledgeGraph& graph() const { return *graph_; }

  private:
    const KnowledgeGraph* graph_;
    std::vector<NodeId> ids_; // row -> id, ascending
    std::unordered_map<NodeId, std::uint32_t> rows_;
    std::vector<bool> article_;
    std::vector<bool> high_freq_;
    std::vector<std::size_t> adj_start_;
    std::vector<std::uint32_t> adj_;
    std::vector<std::size_t> hf_start_;
    std::vector<std::uint32_t> hf_adj_;
    std::vector<std::uint32_t> article_rows_;
    std::vector<std::uint32_t> hf_rows_;
    std::vector<std::uint32_t> keyinfo_rows_;
};

// floor(article_start_fraction * W) starts uniform over V_a, the remainder
// uniform over V_h, in that order; with-replacement draws from one stream.
// Empty V_h falls back to all-article starts with a warning.
struct StartList {
    std::vector<std::uint32_t> rows;
    std::string warning;
};
StartList stratified_starts(const FrozenGraphView& view, const WalkConfig& cfg);

struct WalkPath {
    std::vector<std::uint32_t> rows;
    bool truncated = false; // hit a neighborless node before L transitions
};
WalkPath random_walk(const FrozenGraphView& view, std::uint32_t start, const WalkConfig& cfg,
                     Rng& rng);

// Aggregated (article, key-info) co-occurrences: a pair is counted once per
// path that contains both nodes.
class PairAggregate {
  public:
    void add_path(std::span<const std::uint32_t> path, const FrozenGraphView& view);
    void merge_from(const PairAggregate& other) { pairs_.merge_from(other.pairs_); }
    // Direct insertion, for rebuilding an aggregate from its file form.
    void add_pair(std::uint32_t article_row, std::uint32_t keyinfo_row, std::uint32_t count) {
        pairs_.add(pack(article_row, keyinfo_row), count);
    }

    std::size_t num_pairs() const { return pairs_.size(); }
    std::uint32_t count(std::uint32_t article_row, std::uint32_t keyinfo_row) const {
        return pairs_.get(pack(article_row, keyinfo_row));
    }

    struct PairCount {
        std::uint32_t article_row;
        std::uint32_t keyinfo_row;
        std::uint32_t count;
    };
    // Ascending (article_row, keyinfo_row); the canonical iteration order.
    std::vector<PairCount> sorted_pairs() const;

    static std::uint64_t pack(std::uint32_t article_row, std::uint32_t keyinfo_row) {
        return (static_cast<std::uint64_t>(article_row) << 32) | keyinfo_row;
    }

  private:
    PairCounter pairs_;
};

// Reference single-threaded fold over explicit paths (also the oracle the
// parallel runner is tested against).
PairAggregate aggregate(const std::vector<WalkPath>& paths, const FrozenGraphView& view);

struct WalkRunStats {
    std::size_t walks = 0;
    std::size_t truncated_walks = 0;
    std::size_t transitions = 0;
    double wall_ms = 0.0;
    std::string warning;
};

// Full walk stage: starts, walks and aggregation, parallel over cfg.workers.
std::pair<PairAggregate, WalkRunStats> run_walks(const FrozenGraphView& view,
                                                 const WalkConfig& cfg);

// Aggregate file io (checksummed binary, node-id keyed).
void save_aggregate(const PairAggregate& agg, const FrozenGraphView& view,
                    const std::string& path);
// Returns (article id, keyinfo id, count) rows sorted by ids.
struct AggregateFile {
    struct Row {
        NodeId article;
        NodeId keyinfo;
        std::uint32_t count;
    };
    std::vector<Row> rows;
};
AggregateFile load_aggregate(const std::string& path);

} // namespace kgbench
