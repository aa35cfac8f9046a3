#pragma once
// Heterogeneous graph core: typed nodes, an undirected edge set, the
// article / key-information partitions, and a cached adjacency view.
//
// Mutation happens only during the build/merge phases under a single
// writer. freeze() makes the graph immutable; afterwards it is safe to
// share across any number of concurrent readers.

#include "kgbench/ids.hpp"

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace kgbench {

// Where a node's payload came from. Merging accumulates these; an
// unmerged node carries exactly one entry pointing at itself.
struct ProvenanceEntry {
    NodeId original_id = kInvalidNode;
    std::string paper_id;

    bool operator==(const ProvenanceEntry&) const = default;
};

struct Node {
    NodeId id = kInvalidNode;
    NodeKind kind = NodeKind::title;
    std::string content;
    Modality modality = Modality::text;
    std::set<std::string> source_paper_ids;
    // Key into the sidecar vector store ("paper\x1fkind\x1fordinal" by
    // default, or an explicit reference from the record).
    std::string vector_key;
    // Path reference for figure/table/formula/algorithm media; empty for
    // plain text nodes.
    std::string media_ref;
    std::vector<ProvenanceEntry> provenance;
};

struct EdgeKey {
    NodeId a = 0; // always a < b
    NodeId b = 0;

    EdgeKey() = default;
    EdgeKey(NodeId x, NodeId y) : a(x < y ? x : y), b(x < y ? y : x) {}
    bool operator==(const EdgeKey&) const = default;
    bool operator<(const EdgeKey& o) const {
        return a != o.a ? a < o.a : b < o.b;
    }
};

struct EdgeKeyHash {
    std::size_t operator()(const EdgeKey& e) const {
        std::uint64_t h = e.a * 0x9E3779B97F4A7C15ULL + 0x165667B19E3779F9ULL;
        h ^= e.b + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
        h = (h ^ (h >> 30)) * 0xBF58476D1CE4E5B9ULL;
        return static_cast<std::size_t>(h ^ (h >> 27));
    }
};

class GraphError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class KnowledgeGraph {
  public:
    KnowledgeGraph() = default;

    // --- construction (single writer, pre-freeze) ---

    NodeId add_node(NodeKind kind, std::string content, Modality modality,
                    const std::string& paper_id, std::string vector_key = "");
    void add_edge(NodeId u, NodeId v);
    void remove_edge(NodeId u, NodeId v);

    // Detaches `absorbed`, rewiring its edges onto `canonical`. Self loops
    // and duplicate edges collapse. Provenance and source papers accumulate
    // on the canonical node. Used by the merge phase.
    void absorb_node(NodeId canonical, NodeId absorbed);

    void set_media_ref(NodeId id, std::string media_ref);
    void set_high_frequency(std::vector<NodeId> ids);

    void freeze();
    bool frozen() const { return frozen_; }

    // --- lookups ---

    bool has_node(NodeId id) const { return nodes_.count(id) != 0; }
    const Node& node(NodeId id) const;
    bool has_edge(NodeId u, NodeId v) const { return edges_.count(EdgeKey(u, v)) != 0; }
    bool has_paper(const std::string& paper_id) const {
        return paper_index_.count(paper_id) != 0;
    }
    NodeId title_node(const std::string& paper_id) const;

    // Cached sorted neighbor list; builds the cache on first use after a
    // mutation, then answers from it.
    const std::vector<NodeId>& neighbors(NodeId id) const;
    std::size_t degree(NodeId id) const { return neighbors(id).size(); }

    std::size_t num_nodes() const { return nodes_.size(); }
    std::size_t num_edges() const { return edges_.size(); }

    const std::unordered_map<NodeId, Node>& nodes() const { return nodes_; }
    const std::unordered_set<EdgeKey, EdgeKeyHash>& edges() const { return edges_; }
    const std::unordered_set<NodeId>& articles() const { return articles_; }
    const std::unordered_set<NodeId>& keyinfo() const { return keyinfo_; }
    const std::unordered_set<NodeId>& high_frequency() const { return high_frequency_; }

    // Ids in ascending order; the deterministic iteration order used by
    // serialization, merging and sampling.
    std::vector<NodeId> sorted_node_ids() const;
    std::vector<NodeId> sorted_articles() const;
    std::vector<NodeId> sorted_keyinfo() const;
    std::vector<NodeId> sorted_keyinfo_of_kind(NodeKind kind) const;

    // Recomputes adjacency from the edge set and compares with the cache.
    bool adjacency_coherent() const;

    // Used by snapshot load to reconstruct a graph verbatim.
    void restore_node(Node n);
    void restore_edge(NodeId u, NodeId v);
    void set_next_id(NodeId next) { next_id_ = next; }
    NodeId next_id() const { return next_id_; }

  private:
    void require_mutable() const;
    void require_node(NodeId id) const;
    void invalidate_adjacency() { adjacency_dirty_ = true; }
    void build_adjacency() const;

    std::unordered_map<NodeId, Node> nodes_;
    std::unordered_set<EdgeKey, EdgeKeyHash> edges_;
    std::unordered_set<NodeId> articles_;
    std::unordered_set<NodeId> keyinfo_;
    std::unordered_set<NodeId> high_frequency_;
    std::unordered_map<std::string, NodeId> paper_index_;

    mutable std::unordered_map<NodeId, std::vector<NodeId>> adjacency_;
    mutable bool adjacency_dirty_ = true;

    NodeId next_id_ = 0;
    bool frozen_ = false;
};

} // namespace kgbench
