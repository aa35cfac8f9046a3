#pragma once
// Constrained combination enumeration over the walk aggregate and the
// composite ranking (coverage / diversity / consistency / redundancy).
//
// Enumeration groups the aggregate by key-info node: a k-subset of the
// articles co-visited with (and graph-adjacent to) one node shares that
// node by construction. Groups larger than max_group_size are skipped and
// reported — unbounded hub groups would drown the output in near-identical
// hub combinations. Output order is deterministic: groups by ascending
// node id, subsets in lexicographic order, first max_combinations kept.

#include "kgbench/ids.hpp"
#include "kgbench/walk.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kgbench {

struct SelectionConfig {
    std::size_t combo_size = 3;           // k
    std::size_t max_combinations = 10000; // C
    double w_coverage = 1.0;
    double w_diversity = 1.0;
    double w_consistency = 1.0;
    double w_redundancy = 0.5; // subtracted
    std::size_t max_group_size = 32;      // 0 disables the ceiling
    std::size_t max_candidate_memory = 512ull << 20;
};

struct ScoreBreakdown {
    double coverage = 0.0;
    double diversity = 0.0;
    double consistency = 0.0;
    double redundancy = 0.0;
};

struct CandidateCombination {
    std::vector<NodeId> papers;            // article node ids
    std::vector<std::string> paper_names;  // sorted paper ids; the tie-break key
    std::vector<NodeId> shared_nodes;      // key-info adjacent to >= 2 members
    ScoreBreakdown breakdown;
    double provisional = 0.0; // coverage+diversity+consistency terms, weighted
    double score = 0.0;       // provisional minus weighted redundancy
};

// Empirical CDF over the key-info degree distribution; the coverage term
// weighs each shared node by quantile(degree) ("importance").
class DegreeQuantiles {
  public:
    explicit DegreeQuantiles(const FrozenGraphView& view);
    double quantile(std::size_t degree) const;

  private:
    std::vector<std::size_t> sorted_degrees_;
};

struct EnumerationResult {
    std::vector<CandidateCombination> combos;
    std::size_t emitted = 0; // includes later-evicted candidates
    std::size_t skipped_groups = 0;
    std::size_t evicted = 0;
    bool capped = false;
    std::string warning;
};

EnumerationResult enumerate_combinations(const PairAggregate& agg, const FrozenGraphView& view,
                                         const SelectionConfig& cfg);

// Fills breakdown/provisional/score for one combination. `used` holds
// shared nodes of higher-ranked combinations for the redundancy term.
void score_combination(CandidateCombination& combo, const FrozenGraphView& view,
                       const DegreeQuantiles& dq, const SelectionConfig& cfg,
                       const std::vector<NodeId>& used);

// Provisional ordering, redundancy pass, final ordering (score descending,
// ties by lexicographic paper ids).
void rank_combinations(std::vector<CandidateCombination>& combos,
                       const SelectionConfig& cfg);

struct SelectReport {
    std::size_t unique_combinations = 0;
    std::size_t truncated_walks = 0;
    std::size_t skipped_groups = 0;
    std::size_t evicted_candidates = 0;
    bool enumeration_capped = false;
    double quality_score = 0.0; // unweighted coverage summed over output
    double walk_ms = 0.0;
    double enumerate_ms = 0.0;
    double score_ms = 0.0;
    std::string warnings;

    std::string to_text() const;
};

// Full pipeline over a frozen graph: starts -> walks -> aggregate ->
// enumerate -> score -> rank.
std::pair<std::vector<CandidateCombination>, SelectReport>
select_paper_sets(const FrozenGraphView& view, const WalkConfig& wcfg,
                  const SelectionConfig& scfg);

// As above but over a pre-computed aggregate (the `--agg` path).
std::pair<std::vector<CandidateCombination>, SelectReport>
select_from_aggregate(const PairAggregate& agg, const FrozenGraphView& view,
                      const SelectionConfig& scfg, const WalkRunStats* walk_stats);

// One combination per line: papers, shared nodes with kinds, score terms.
std::string combination_lines(const std::vector<CandidateCombination>& combos,
                              const FrozenGraphView& view);
void save_combinations(const std::vector<CandidateCombination>& combos,
                       const FrozenGraphView& view, const std::string& path);

// Inverse of combination_lines against the graph the file was written from;
// paper names and shared-node ids must resolve, kinds must match.
std::vector<CandidateCombination> parse_combination_lines(const std::string& text,
                                                          const KnowledgeGraph& g);

} // namespace kgbench
