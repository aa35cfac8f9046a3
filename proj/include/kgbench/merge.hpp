#pragma once
// Semantic node merging: per-kind nearest-neighbor retrieval, union-find
// over pairs whose similarity exceeds the threshold, and graph rewiring
// with provenance. Kinds are processed coarse-to-fine; the index is hard
// partitioned by kind, so cross-kind merges are impossible by construction.

#include "kgbench/graph.hpp"
#include "kgbench/ids.hpp"
#include "kgbench/vector_index.hpp"
#include "kgbench/vector_store.hpp"

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace kgbench {

class MergeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Coarse, widely shared kinds first; rich or media-bound kinds last.
std::vector<NodeKind> default_merge_schedule();

struct MergeConfig {
    double threshold = 0.90;
    std::map<NodeKind, double> per_kind_threshold; // overrides for single kinds
    std::vector<NodeKind> schedule = default_merge_schedule();
    std::string backend = "hnsw"; // or "flat"
    IndexConfig index;
    // Scale of the per-kind offset added to content vectors before indexing.
    // 0 disables the offset; the hard kind partition holds either way.
    double type_offset_scale = 0.0;

    double theta_for(NodeKind kind) const {
        auto it = per_kind_threshold.find(kind);
        return it == per_kind_threshold.end() ? threshold : it->second;
    }
};

// Per-kind indexes behind one lookup surface.
class TypedIndex {
  public:
    TypedIndex(IndexConfig cfg, std::string backend, double type_offset_scale);

    void add(NodeId id, NodeKind kind, std::span<const float> v);
    bool has_kind(NodeKind kind) const;
    const NearestNeighborIndex* index_for(NodeKind kind) const;
    NodeKind kind_of(NodeId id) const;
    std::size_t size() const { return kinds_.size(); }

    // <= K same-kind neighbors of an indexed node, self excluded, sorted by
    // descending similarity.
    std::vector<Neighbor> topk_same_type(NodeId id, std::size_t K) const;

  private:
    std::vector<float> offset_vector(NodeKind kind) const;

    IndexConfig cfg_;
    std::string backend_;
    double offset_scale_;
    std::unordered_map<NodeId, NodeKind> kinds_;
    std::map<NodeKind, std::unique_ptr<NearestNeighborIndex>> indexes_;
};

struct ProvenanceRecord {
    NodeId original_id = kInvalidNode;
    std::string paper_id;
    NodeKind kind = NodeKind::title;

    bool operator==(const ProvenanceRecord&) const = default;
    bool operator<(const ProvenanceRecord& o) const {
        return original_id != o.original_id ? original_id < o.original_id
                                            : paper_id < o.paper_id;
    }
};

struct MergeResolution {
    std::unordered_map<NodeId, NodeId> canonical;
    std::unordered_map<NodeId, std::vector<ProvenanceRecord>> provenance;

    NodeId resolve(NodeId id) const {
        auto it = canonical.find(id);
        return it == canonical.end() ? id : it->second;
    }
    // Originals mapped onto a different canonical node.
    std::size_t merged_away() const;
    std::size_t provenance_entries() const;
};

struct KindMergeStats {
    NodeKind kind = NodeKind::title;
    double theta = 0.0;
    std::size_t nodes_before = 0;
    std::size_t nodes_after = 0;
    std::size_t merged_away() const { return nodes_before - nodes_after; }
};

struct MergeReport {
    std::vector<KindMergeStats> kinds;
    std::string to_text() const;
};

// One pass over a single kind: unions every indexed pair with similarity
// strictly above theta, rewires the graph, and returns the delta resolution
// covering exactly the nodes of that kind.
MergeResolution merge_pass(KnowledgeGraph& g, const TypedIndex& index, NodeKind kind,
                           const MergeConfig& cfg);

// Runs merge_pass per scheduled kind, building each kind's index from the
// sidecar store. The returned resolution covers every pre-merge key-info
// node (identity entries included).
std::pair<MergeResolution, MergeReport>
run_merge_schedule(KnowledgeGraph& g, const VectorStore& store, const MergeConfig& cfg);

} // namespace kgbench
