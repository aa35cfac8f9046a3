#pragma once
// Structural statistics: closed-form density / average degree, node-kind
// histogram, and BFS-based path statistics (exact or source-sampled) over
// the largest connected component.

#include "kgbench/graph.hpp"
#include "kgbench/ids.hpp"

#include <array>
#include <cstdint>
#include <string>

namespace kgbench {

class StatsError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct BasicStats {
    std::size_t num_nodes = 0;
    std::size_t num_edges = 0;
    double density = 0.0;    // 2E / (N(N-1))
    double avg_degree = 0.0; // 2E / N
    std::array<std::size_t, kNumKinds> kind_histogram{};
};

// Closed-form values from raw counts (no graph needed).
BasicStats stats_from_counts(std::size_t num_nodes, std::size_t num_edges);
BasicStats basic_stats(const KnowledgeGraph& g);

struct PathStats {
    std::size_t diameter = 0;
    double avg_path_length = 0.0;
    // True when sampled: the diameter is then only a lower bound.
    bool diameter_is_lower_bound = false;
    std::size_t component_count = 0;
    std::size_t largest_component = 0;
};

// Exact mode: all-sources BFS over the largest component. Sampled mode:
// `sources` seeded uniform draws without replacement.
PathStats path_stats_exact(const KnowledgeGraph& g);
PathStats path_stats_sampled(const KnowledgeGraph& g, std::size_t sources,
                             std::uint64_t seed);

std::string stats_text(const BasicStats& basic, const PathStats* paths);

} // namespace kgbench
