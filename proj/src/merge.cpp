#include "kgbench/merge.hpp"

#include "kgbench/hashing.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace kgbench {

std::vector<NodeKind> default_merge_schedule() {
    return {
        NodeKind::classification_tags, NodeKind::datasets, NodeKind::metrics,
        NodeKind::results, NodeKind::methodology, NodeKind::key_contributions,
        NodeKind::research_background, NodeKind::limitations, NodeKind::tables,
        NodeKind::figures, NodeKind::algorithms, NodeKind::formulas,
    };
}

// --- TypedIndex ---

TypedIndex::TypedIndex(IndexConfig cfg, std::string backend, double type_offset_scale)
    : cfg_(cfg), backend_(std::move(backend)), offset_scale_(type_offset_scale) {}

std::vector<float> TypedIndex::offset_vector(NodeKind kind) const {
    // A fixed pseudorandom direction per kind, scaled by the configured
    // factor; zero scale yields the zero vector.
    std::vector<float> off(cfg_.dim, 0.0f);
    if (offset_scale_ == 0.0) return off;
    std::uint64_t state = 0x5EEDULL + static_cast<std::uint64_t>(kind) * 1000003ULL;
    Rng rng(state);
    for (auto& x : off) x = static_cast<float>(rng.next_double() * 2.0 - 1.0);
    std::vector<float> unit = unit_normalized(off);
    for (auto& x : unit) x = static_cast<float>(x * offset_scale_);
    return unit;
}

void TypedIndex::add(NodeId id, NodeKind kind, std::span<const float> v) {
    if (!is_key_info(kind)) throw MergeError("only key-information nodes are indexed");
    auto [it, inserted] = kinds_.emplace(id, kind);
    if (!inserted) throw IndexError("duplicate node id " + std::to_string(id));
    auto idx = indexes_.find(kind);
    if (idx == indexes_.end())
        idx = indexes_.emplace(kind, make_index(backend_, cfg_)).first;
    if (offset_scale_ == 0.0) {
        idx->second->add(id, v);
        return;
    }
    std::vector<float> shifted(v.begin(), v.end());
    if (shifted.size() != cfg_.dim)
        throw IndexError("vector has dimension " + std::to_string(shifted.size()) +
                         ", index expects " + std::to_string(cfg_.dim));
    std::vector<float> off = offset_vector(kind);
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += off[i];
    idx->second->add(id, shifted);
}

bool TypedIndex::has_kind(NodeKind kind) const { return indexes_.count(kind) != 0; }

const NearestNeighborIndex* TypedIndex::index_for(NodeKind kind) const {
    auto it = indexes_.find(kind);
    return it == indexes_.end() ? nullptr : it->second.get();
}

NodeKind TypedIndex::kind_of(NodeId id) const {
    auto it = kinds_.find(id);
    if (it == kinds_.end())
        throw IndexError("node " + std::to_string(id) + " is not indexed");
    return it->second;
}

std::vector<Neighbor> TypedIndex::topk_same_type(NodeId id, std::size_t K) const {
    NodeKind kind = kind_of(id);
    return indexes_.at(kind)->query_node(id, K);
}

// --- union-find keyed on node id, canonical = smallest member ---

namespace {

class UnionFind {
  public:
    void ensure(NodeId id) { parent_.emplace(id, id); }

    NodeId find(NodeId id) {
        NodeId root = id;
        while (parent_.at(root) != root) root = parent_.at(root);
        while (parent_.at(id) != root) {
            NodeId next = parent_.at(id);
            parent_.at(id) = root;
            id = next;
        }
        return root;
    }

    void unite(NodeId a, NodeId b) {
        NodeId ra = find(a), rb = find(b);
        if (ra == rb) return;
        // Smaller id becomes the root, making canonicals order-independent.
        if (rb < ra) std::swap(ra, rb);
        parent_.at(rb) = ra;
    }

    const std::unordered_map<NodeId, NodeId>& parents() const { return parent_; }

  private:
    std::unordered_map<NodeId, NodeId> parent_;
};

} // namespace

std::size_t MergeResolution::merged_away() const {
    std::size_t n = 0;
    for (const auto& [orig, canon] : canonical)
        if (orig != canon) ++n;
    return n;
}

std::size_t MergeResolution::provenance_entries() const {
    std::size_t n = 0;
    for (const auto& [canon, records] : provenance) n += records.size();
    return n;
}

std::string MergeReport::to_text() const {
    std::ostringstream out;
    out << "merge report\n";
    std::size_t total = 0;
    for (const auto& k : kinds) {
        out << "  " << kind_name(k.kind) << ": theta=" << k.theta << " nodes "
            << k.nodes_before << " -> " << k.nodes_after << " (merged "
            << k.merged_away() << ")\n";
        total += k.merged_away();
    }
    out << "  total merged away: " << total << "\n";
    return out.str();
}

MergeResolution merge_pass(KnowledgeGraph& g, const TypedIndex& index, NodeKind kind,
                           const MergeConfig& cfg) {
    if (!is_key_info(kind)) throw MergeError("cannot merge the title kind");
    const NearestNeighborIndex* idx = index.index_for(kind);
    if (idx == nullptr)
        throw MergeError(std::string("kind not in index: ") + std::string(kind_name(kind)));

    double theta = cfg.theta_for(kind);
    std::vector<NodeId> members = g.sorted_keyinfo_of_kind(kind);

    UnionFind uf;
    for (NodeId id : members) uf.ensure(id);
    std::size_t K = cfg.index.neighbors_per_query;
    for (NodeId id : members) {
        if (!idx->contains(id)) continue;
        for (const Neighbor& n : idx->query_node(id, K)) {
            if (n.similarity > theta && idx->contains(n.id)) uf.unite(id, n.id);
        }
    }

    // Components in deterministic order: members ascending, so canonical
    // (the smallest id) is met first.
    std::unordered_map<NodeId, std::vector<NodeId>> components;
    for (NodeId id : members) components[uf.find(id)].push_back(id);

    MergeResolution delta;
    for (NodeId id : members) {
        NodeId canon = uf.find(id);
        delta.canonical[id] = canon;
    }
    for (auto& [canon, ids] : components) {
        std::sort(ids.begin(), ids.end());
        for (NodeId id : ids) {
            if (id != canon) g.absorb_node(canon, id);
        }
        std::vector<ProvenanceRecord> records;
        for (const ProvenanceEntry& pe : g.node(canon).provenance) {
            // Keep only entries of this kind's originals: absorbed nodes are
            // same-kind by construction, so all entries qualify.
            records.push_back({pe.original_id, pe.paper_id, kind});
        }
        std::sort(records.begin(), records.end());
        delta.provenance[canon] = std::move(records);
    }
    return delta;
}

std::pair<MergeResolution, MergeReport>
run_merge_schedule(KnowledgeGraph& g, const VectorStore& store, const MergeConfig& cfg) {
    {
        std::set<NodeKind> seen;
        for (NodeKind kind : cfg.schedule) {
            if (!is_key_info(kind))
                throw MergeError("schedule may contain key-information kinds only");
            if (!seen.insert(kind).second)
                throw MergeError(std::string("schedule repeats kind ") +
                                 std::string(kind_name(kind)));
        }
    }
    if (store.size() > 0 && store.dim() != cfg.index.dim)
        throw MergeError("vector store dimension " + std::to_string(store.dim()) +
                         " does not match index dimension " + std::to_string(cfg.index.dim));

    std::vector<NodeId> pre_merge = g.sorted_keyinfo();

    MergeReport report;
    MergeResolution composed;
    for (NodeKind kind : cfg.schedule) {
        std::vector<NodeId> members = g.sorted_keyinfo_of_kind(kind);
        KindMergeStats stats;
        stats.kind = kind;
        stats.theta = cfg.theta_for(kind);
        stats.nodes_before = members.size();
        if (members.empty()) {
            stats.nodes_after = 0;
            report.kinds.push_back(stats);
            continue;
        }
        TypedIndex index(cfg.index, cfg.backend, cfg.type_offset_scale);
        for (NodeId id : members) {
            const Node& n = g.node(id);
            if (n.vector_key.empty() || !store.contains(n.vector_key))
                throw MergeError(std::string("missing embedding for kind ") +
                                 std::string(kind_name(kind)) + " (node " +
                                 std::to_string(id) + ", key '" + n.vector_key + "')");
            index.add(id, kind, store.get(n.vector_key));
        }
        MergeResolution delta = merge_pass(g, index, kind, cfg);
        for (const auto& [orig, canon] : delta.canonical) composed.canonical[orig] = canon;
        stats.nodes_after = g.sorted_keyinfo_of_kind(kind).size();
        report.kinds.push_back(stats);
    }

    // Rebuild the full resolution from surviving graph provenance so every
    // pre-merge key-info node appears exactly once (identity for singletons
    // and for kinds outside the schedule).
    MergeResolution full;
    for (NodeId id : pre_merge) full.canonical[id] = id;
    for (NodeId id : g.sorted_keyinfo()) {
        const Node& n = g.node(id);
        std::vector<ProvenanceRecord> records;
        for (const ProvenanceEntry& pe : n.provenance)
            records.push_back({pe.original_id, pe.paper_id, n.kind});
        std::sort(records.begin(), records.end());
        for (const auto& r : records) full.canonical[r.original_id] = id;
        full.provenance[id] = std::move(records);
    }
    return {std::move(full), std::move(report)};
}

} // namespace kgbench
