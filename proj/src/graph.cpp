#include "kgbench/graph.hpp"

#include <algorithm>

namespace kgbench {

void KnowledgeGraph::require_mutable() const {
    if (frozen_) throw GraphError("graph is frozen");
}

void KnowledgeGraph::require_node(NodeId id) const {
    if (!nodes_.count(id)) throw GraphError("unknown node id " + std::to_string(id));
}

NodeId KnowledgeGraph::add_node(NodeKind kind, std::string content, Modality modality,
                                const std::string& paper_id, std::string vector_key) {
    require_mutable();
    if (paper_id.empty()) throw GraphError("node requires a paper id");
    if (kind == NodeKind::title) {
        auto [it, inserted] = paper_index_.emplace(paper_id, next_id_);
        if (!inserted) throw GraphError("duplicate paper id: " + paper_id);
    }
    NodeId id = next_id_++;
    Node n;
    n.id = id;
    n.kind = kind;
    n.content = std::move(content);
    n.modality = modality;
    n.source_paper_ids.insert(paper_id);
    n.vector_key = std::move(vector_key);
    n.provenance.push_back({id, paper_id});
    nodes_.emplace(id, std::move(n));
    (kind == NodeKind::title ? articles_ : keyinfo_).insert(id);
    invalidate_adjacency();
    return id;
}

void KnowledgeGraph::add_edge(NodeId u, NodeId v) {
    require_mutable();
    require_node(u);
    require_node(v);
    if (u == v) throw GraphError("self loops are not allowed");
    edges_.insert(EdgeKey(u, v));
    invalidate_adjacency();
}

void KnowledgeGraph::remove_edge(NodeId u, NodeId v) {
    require_mutable();
    edges_.erase(EdgeKey(u, v));
    invalidate_adjacency();
}

void KnowledgeGraph::absorb_node(NodeId canonical, NodeId absorbed) {
    require_mutable();
    require_node(canonical);
    require_node(absorbed);
    if (canonical == absorbed) throw GraphError("cannot absorb a node into itself");
    Node& canon = nodes_.at(canonical);
    Node& gone = nodes_.at(absorbed);
    if (canon.kind != gone.kind) throw GraphError("cannot merge nodes of different kinds");

    // Rewire: collect first, then mutate the edge set.
    std::vector<NodeId> adj;
    for (const auto& e : edges_) {
        if (e.a == absorbed) adj.push_back(e.b);
        else if (e.b == absorbed) adj.push_back(e.a);
    }
    for (NodeId n : adj) {
        edges_.erase(EdgeKey(absorbed, n));
        if (n != canonical) edges_.insert(EdgeKey(canonical, n));
    }

    canon.source_paper_ids.insert(gone.source_paper_ids.begin(), gone.source_paper_ids.end());
    canon.provenance.insert(canon.provenance.end(), gone.provenance.begin(), gone.provenance.end());
    std::sort(canon.provenance.begin(), canon.provenance.end(),
              [](const ProvenanceEntry& a, const ProvenanceEntry& b) {
                  return a.original_id < b.original_id;
              });

    keyinfo_.erase(absorbed);
    articles_.erase(absorbed);
    high_frequency_.erase(absorbed);
    nodes_.erase(absorbed);
    invalidate_adjacency();
}

void KnowledgeGraph::set_media_ref(NodeId id, std::string media_ref) {
    require_mutable();
    require_node(id);
    nodes_.at(id).media_ref = std::move(media_ref);
}

void KnowledgeGraph::set_high_frequency(std::vector<NodeId> ids) {
    require_mutable();
    high_frequency_.clear();
    for (NodeId id : ids) {
        require_node(id);
        if (!keyinfo_.count(id))
            throw GraphError("high-frequency set must contain key-information nodes only");
        high_frequency_.insert(id);
    }
}

void KnowledgeGraph::freeze() {
    if (frozen_) return;
    build_adjacency();
    adjacency_dirty_ = false;
    frozen_ = true;
}

const Node& KnowledgeGraph::node(NodeId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw GraphError("unknown node id " + std::to_string(id));
    return it->second;
}

NodeId KnowledgeGraph::title_node(const std::string& paper_id) const {
    auto it = paper_index_.find(paper_id);
    if (it == paper_index_.end()) throw GraphError("unknown paper id: " + paper_id);
    return it->second;
}

const std::vector<NodeId>& KnowledgeGraph::neighbors(NodeId id) const {
    require_node(id);
    if (adjacency_dirty_) {
        build_adjacency();
        adjacency_dirty_ = false;
    }
    static const std::vector<NodeId> kEmpty;
    auto it = adjacency_.find(id);
    return it == adjacency_.end() ? kEmpty : it->second;
}

void KnowledgeGraph::build_adjacency() const {
    adjacency_.clear();
    adjacency_.reserve(nodes_.size());
    for (const auto& e : edges_) {
        adjacency_[e.a].push_back(e.b);
        adjacency_[e.b].push_back(e.a);
    }
    for (auto& [id, adj] : adjacency_) std::sort(adj.begin(), adj.end());
}

std::vector<NodeId> KnowledgeGraph::sorted_node_ids() const {
    std::vector<NodeId> ids;
    ids.reserve(nodes_.size());
    for (const auto& [id, n] : nodes_) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

static std::vector<NodeId> sorted_of(const std::unordered_set<NodeId>& s) {
    std::vector<NodeId> ids(s.begin(), s.end());
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<NodeId> KnowledgeGraph::sorted_articles() const { return sorted_of(articles_); }
std::vector<NodeId> KnowledgeGraph::sorted_keyinfo() const { return sorted_of(keyinfo_); }

std::vector<NodeId> KnowledgeGraph::sorted_keyinfo_of_kind(NodeKind kind) const {
    std::vector<NodeId> ids;
    for (NodeId id : keyinfo_)
        if (nodes_.at(id).kind == kind) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

bool KnowledgeGraph::adjacency_coherent() const {
    std::size_t total = 0;
    for (const auto& [id, n] : nodes_) total += neighbors(id).size();
    if (total != 2 * edges_.size()) return false;
    for (const auto& e : edges_) {
        const auto& na = neighbors(e.a);
        const auto& nb = neighbors(e.b);
        if (!std::binary_search(na.begin(), na.end(), e.b)) return false;
        if (!std::binary_search(nb.begin(), nb.end(), e.a)) return false;
    }
    return true;
}

void KnowledgeGraph::restore_node(Node n) {
    require_mutable();
    NodeId id = n.id;
    if (nodes_.count(id)) throw GraphError("duplicate node id on restore");
    (n.kind == NodeKind::title ? articles_ : keyinfo_).insert(id);
    if (n.kind == NodeKind::title) {
        if (n.source_paper_ids.empty()) throw GraphError("title node without a paper id");
        paper_index_.emplace(*n.source_paper_ids.begin(), id);
    }
    nodes_.emplace(id, std::move(n));
    if (id >= next_id_) next_id_ = id + 1;
    invalidate_adjacency();
}

void KnowledgeGraph::restore_edge(NodeId u, NodeId v) {
    require_mutable();
    require_node(u);
    require_node(v);
    if (u == v) throw GraphError("self loops are not allowed");
    edges_.insert(EdgeKey(u, v));
    invalidate_adjacency();
}

} // namespace kgbench
