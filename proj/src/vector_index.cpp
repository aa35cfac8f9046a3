#include "kgbench/vector_index.hpp"

#include "kgbench/hashing.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_set>

namespace kgbench {

namespace {

void sort_hits(std::vector<Neighbor>& hits) {
    std::sort(hits.begin(), hits.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.id < b.id;
    });
}

} // namespace

std::vector<Neighbor> NearestNeighborIndex::query_node(NodeId id, std::size_t k) const {
    if (!contains(id)) throw IndexError("node " + std::to_string(id) + " is not indexed");
    std::vector<Neighbor> hits = query(vector_of(id), k + 1);
    std::vector<Neighbor> out;
    out.reserve(k);
    for (const Neighbor& h : hits) {
        if (h.id == id) continue;
        out.push_back(h);
        if (out.size() == k) break;
    }
    return out;
}

// --- FlatIndex ---

void FlatIndex::add(NodeId id, std::span<const float> v) {
    if (v.size() != cfg_.dim)
        throw IndexError("vector has dimension " + std::to_string(v.size()) +
                         ", index expects " + std::to_string(cfg_.dim));
    auto [it, inserted] = rows_.emplace(id, ids_.size());
    if (!inserted) throw IndexError("duplicate node id " + std::to_string(id));
    ids_.push_back(id);
    std::vector<float> stored = cfg_.cosine ? unit_normalized(v)
                                            : std::vector<float>(v.begin(), v.end());
    data_.insert(data_.end(), stored.begin(), stored.end());
}

std::vector<Neighbor> FlatIndex::query(std::span<const float> v, std::size_t k) const {
    if (v.size() != cfg_.dim)
        throw IndexError("query has dimension " + std::to_string(v.size()) +
                         ", index expects " + std::to_string(cfg_.dim));
    std::vector<float> q = cfg_.cosine ? unit_normalized(v)
                                       : std::vector<float>(v.begin(), v.end());
    std::vector<Neighbor> hits;
    hits.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        std::span<const float> row{data_.data() + i * cfg_.dim, cfg_.dim};
        hits.push_back({ids_[i], dot(row, q)});
    }
    sort_hits(hits);
    if (hits.size() > k) hits.resize(k);
    return hits;
}

std::span<const float> FlatIndex::vector_of(NodeId id) const {
    auto it = rows_.find(id);
    if (it == rows_.end()) throw IndexError("node " + std::to_string(id) + " is not indexed");
    return {data_.data() + it->second * cfg_.dim, cfg_.dim};
}

// --- HnswIndex ---

HnswIndex::HnswIndex(IndexConfig cfg) : cfg_(cfg) {
    if (cfg_.max_links < 2) throw IndexError("max_links must be at least 2");
    level_scale_ = 1.0 / std::log(static_cast<double>(cfg_.max_links));
    level_state_ = cfg_.seed;
}

int HnswIndex::draw_level() {
    // Geometric-ish level distribution: floor(-ln(U) * mL).
    std::uint64_t r = splitmix64(level_state_);
    double u = (static_cast<double>(r >> 11) + 1.0) * 0x1.0p-53;
    return static_cast<int>(-std::log(u) * level_scale_);
}

void HnswIndex::add(NodeId id, std::span<const float> v) {
    if (v.size() != cfg_.dim)
        throw IndexError("vector has dimension " + std::to_string(v.size()) +
                         ", index expects " + std::to_string(cfg_.dim));
    auto [it, inserted] = rows_.emplace(id, ids_.size());
    if (!inserted) throw IndexError("duplicate node id " + std::to_string(id));
    std::size_t row_idx = ids_.size();
    ids_.push_back(id);
    std::vector<float> stored = cfg_.cosine ? unit_normalized(v)
                                            : std::vector<float>(v.begin(), v.end());
    data_.insert(data_.end(), stored.begin(), stored.end());

    int level = draw_level();
    links_.emplace_back(static_cast<std::size_t>(level) + 1);

    if (row_idx == 0) {
        entry_ = 0;
        max_level_ = level;
        return;
    }

    std::span<const float> q = row(row_idx);
    std::size_t entry = entry_;
    // Greedy descent through layers above the new node's level.
    for (int l = max_level_; l > level; --l) {
        bool improved = true;
        while (improved) {
            improved = false;
            float best = score_rows(entry, q);
            for (std::size_t n : links_[entry][static_cast<std::size_t>(l)]) {
                float s = score_rows(n, q);
                if (s > best) {
                    best = s;
                    entry = n;
                    improved = true;
                }
            }
        }
    }
    // Beam search and linking on each layer the node participates in.
    for (int l = std::min(level, max_level_); l >= 0; --l) {
        auto cand = search_layer(q, entry, l, cfg_.build_beam);
        std::size_t m = l == 0 ? cfg_.max_links * 2 : cfg_.max_links;
        std::vector<std::size_t> chosen = select_neighbors(cand, m);
        for (std::size_t n : chosen) {
            link(row_idx, n, l);
            link(n, row_idx, l);
        }
        if (!cand.empty()) entry = cand.front().second;
    }
    if (level > max_level_) {
        max_level_ = level;
        entry_ = row_idx;
    }
}

std::vector<std::pair<float, std::size_t>> HnswIndex::search_layer(std::span<const float> q,
                                                                   std::size_t entry, int level,
                                                                   std::size_t beam) const {
    // Max-heap of candidates to expand, min-heap of the best `beam` found.
    using Scored = std::pair<float, std::size_t>;
    auto cmp_desc = [](const Scored& a, const Scored& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second > b.second;
    };
    auto cmp_asc = [](const Scored& a, const Scored& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    };
    std::priority_queue<Scored, std::vector<Scored>, decltype(cmp_desc)> frontier(cmp_desc);
    std::priority_queue<Scored, std::vector<Scored>, decltype(cmp_asc)> best(cmp_asc);
    std::unordered_set<std::size_t> visited;

    float s0 = score_rows(entry, q);
    frontier.push({s0, entry});
    best.push({s0, entry});
    visited.insert(entry);

    while (!frontier.empty()) {
        auto [s, node] = frontier.top();
        frontier.pop();
        if (best.size() >= beam && s < best.top().first) break;
        for (std::size_t n : links_[node][static_cast<std::size_t>(level)]) {
            if (!visited.insert(n).second) continue;
            float sn = score_rows(n, q);
            if (best.size() < beam || sn > best.top().first) {
                frontier.push({sn, n});
                best.push({sn, n});
                if (best.size() > beam) best.pop();
            }
        }
    }
    std::vector<Scored> out;
    out.reserve(best.size());
    while (!best.empty()) {
        out.push_back(best.top());
        best.pop();
    }
    std::sort(out.begin(), out.end(), [](const Scored& a, const Scored& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    return out;
}

std::vector<std::size_t> HnswIndex::select_neighbors(
    std::vector<std::pair<float, std::size_t>> cand, std::size_t m) const {
    std::vector<std::size_t> chosen;
    for (const auto& [s, c] : cand) {
        if (chosen.size() >= m) break;
        bool dominated = false;
        for (std::size_t kept : chosen) {
            if (dot(row(c), row(kept)) > s) {
                dominated = true;
                break;
            }
        }
        if (!dominated) chosen.push_back(c);
    }
    // Backfill with dominated candidates if the heuristic was too strict.
    if (chosen.size() < m) {
        for (const auto& [s, c] : cand) {
            if (chosen.size() >= m) break;
            if (std::find(chosen.begin(), chosen.end(), c) == chosen.end())
                chosen.push_back(c);
        }
    }
    return chosen;
}

void HnswIndex::link(std::size_t from, std::size_t to, int level) {
    auto lvl = static_cast<std::size_t>(level);
    if (lvl >= links_[from].size()) return;
    auto& adj = links_[from][lvl];
    if (std::find(adj.begin(), adj.end(), to) != adj.end()) return;
    adj.push_back(to);
    std::size_t cap = level == 0 ? cfg_.max_links * 2 : cfg_.max_links;
    if (adj.size() <= cap) return;
    // Over capacity: re-select the best links for this node.
    std::span<const float> q = row(from);
    std::vector<std::pair<float, std::size_t>> cand;
    cand.reserve(adj.size());
    for (std::size_t n : adj) cand.push_back({score_rows(n, q), n});
    std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    adj = select_neighbors(std::move(cand), cap);
}

std::vector<Neighbor> HnswIndex::query(std::span<const float> v, std::size_t k) const {
    if (v.size() != cfg_.dim)
        throw IndexError("query has dimension " + std::to_string(v.size()) +
                         ", index expects " + std::to_string(cfg_.dim));
    if (ids_.empty()) return {};
    std::vector<float> qbuf = cfg_.cosine ? unit_normalized(v)
                                          : std::vector<float>(v.begin(), v.end());
    std::span<const float> q{qbuf.data(), qbuf.size()};

    std::size_t entry = entry_;
    for (int l = max_level_; l > 0; --l) {
        bool improved = true;
        while (improved) {
            improved = false;
            float best = score_rows(entry, q);
            for (std::size_t n : links_[entry][static_cast<std::size_t>(l)]) {
                float s = score_rows(n, q);
                if (s > best) {
                    best = s;
                    entry = n;
                    improved = true;
                }
            }
        }
    }
    std::size_t beam = std::max(cfg_.search_beam, k); // clamp: beam >= K
    auto found = search_layer(q, entry, 0, beam);
    std::vector<Neighbor> hits;
    hits.reserve(std::min(k, found.size()));
    for (const auto& [s, r] : found) {
        hits.push_back({ids_[r], s});
        if (hits.size() == k) break;
    }
    sort_hits(hits);
    return hits;
}

std::span<const float> HnswIndex::vector_of(NodeId id) const {
    auto it = rows_.find(id);
    if (it == rows_.end()) throw IndexError("node " + std::to_string(id) + " is not indexed");
    return row(it->second);
}

std::unique_ptr<NearestNeighborIndex> make_index(const std::string& backend, IndexConfig cfg) {
    if (backend == "flat") return std::make_unique<FlatIndex>(cfg);
    if (backend == "hnsw") return std::make_unique<HnswIndex>(cfg);
    throw IndexError("unknown index backend: " + backend);
}

} // namespace kgbench
