#pragma once
// Shared fixtures and oracles for the unit and acceptance suites.

#include "kgbench/graph.hpp"
#include "kgbench/hashing.hpp"
#include "kgbench/record.hpp"
#include "kgbench/vector_store.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <unistd.h>

namespace kgtest {

using namespace kgbench;

inline std::vector<float> random_vector(Rng& rng, std::size_t dim) {
    std::vector<float> v(dim);
    for (auto& x : v) x = static_cast<float>(rng.next_double() * 2.0 - 1.0);
    return v;
}

// A cluster member: the center plus bounded noise, so intra-cluster
// similarity stays high and inter-cluster similarity stays moderate.
inline std::vector<float> jitter(const std::vector<float>& center, Rng& rng, double eps) {
    std::vector<float> v = center;
    for (auto& x : v) x += static_cast<float>((rng.next_double() * 2.0 - 1.0) * eps);
    return v;
}

inline double cosine(const std::vector<float>& a, const std::vector<float>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return dot / std::sqrt(na * nb);
}

// Exact pairwise union-find over cosine similarity: the merge oracle.
// Returns for each input id its partition root (smallest id in the class).
inline std::map<NodeId, NodeId>
pairwise_union_find(const std::vector<std::pair<NodeId, std::vector<float>>>& vecs,
                    double theta) {
    std::map<NodeId, NodeId> parent;
    for (const auto& [id, v] : vecs) parent[id] = id;
    std::function<NodeId(NodeId)> find = [&](NodeId x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < vecs.size(); ++i)
        for (std::size_t j = i + 1; j < vecs.size(); ++j)
            if (cosine(vecs[i].second, vecs[j].second) > theta) {
                NodeId a = find(vecs[i].first), b = find(vecs[j].first);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
    std::map<NodeId, NodeId> roots;
    for (const auto& [id, v] : vecs) roots[id] = find(id);
    return roots;
}

// --- record fixtures -------------------------------------------------------

// Three well-formed papers sharing one dataset payload ("CIFAR-100") and one
// classification tag; paper-b carries a figure attachment.
inline std::vector<std::string> record_fixture_lines() {
    return {
        R"({"paper_id":"paper-a","title":"Graph sampling at scale","classification_tags":"sampling","datasets":"CIFAR-100","methodology":"random walk variants","results":"improves recall"})",
        R"({"paper_id":"paper-b","title":"Vision benchmarks revisited","classification_tags":"sampling","datasets":"CIFAR-100","key_contributions":"a new protocol","attachments":[{"kind":"figures","ref":"img/overview.png","caption":"system overview"}]})",
        R"({"paper_id":"paper-c","title":"Limits of retrieval","datasets":"WebText","research_background":"dense retrieval history","limitations":"english only","metrics":"recall at k"})",
    };
}

inline std::vector<NodeRecord> record_fixture() {
    std::vector<NodeRecord> records;
    std::size_t line = 1;
    for (const auto& text : record_fixture_lines())
        records.push_back(parse_node_record(text, line++));
    return records;
}

inline KnowledgeGraph fixture_graph() {
    KnowledgeGraph g;
    for (const auto& rec : record_fixture()) add_record_to_graph(g, rec);
    return g;
}

// --- scratch directories ---------------------------------------------------

class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("kgbench-test-" + tag + "-" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

// --- synthetic hub-heavy graph ---------------------------------------------

struct SyntheticSpec {
    std::size_t articles = 10000;
    std::size_t hubs = 1990;          // classification_tags, degree >= hub_min_degree
    std::size_t community = 10910;    // mixed kinds, degree 2..5
    std::size_t privates = 7000;      // degree 1
    std::size_t hub_min_degree = 40;
    std::size_t hub_max_degree = 170;
    std::size_t community_min_degree = 2;
    std::size_t community_max_degree = 5;
    double hubless_fraction = 0.15;   // articles with no hub edges
    std::uint64_t seed = 20240901;
};

struct SyntheticGraph {
    KnowledgeGraph g;
    std::vector<NodeId> article_ids;
    std::vector<NodeId> hub_ids;
    std::vector<NodeId> community_ids;
};

// Bipartite article / key-info graph with a hub-heavy degree distribution:
// a small set of tag hubs touching many articles, a mid layer of community
// nodes (degree 2..5) supplying combination groups, and private leaves.
inline SyntheticGraph make_synthetic_graph(const SyntheticSpec& spec) {
    SyntheticGraph out;
    KnowledgeGraph& g = out.g;
    Rng rng(spec.seed);

    out.article_ids.reserve(spec.articles);
    for (std::size_t i = 0; i < spec.articles; ++i) {
        std::string paper = "p" + std::to_string(i);
        out.article_ids.push_back(
            g.add_node(NodeKind::title, "title " + paper, Modality::text, paper));
    }

    std::size_t hubless = static_cast<std::size_t>(spec.hubless_fraction *
                                                   static_cast<double>(spec.articles));
    // Articles [0, hubful) may receive hub edges; [hubful, articles) never do.
    std::size_t hubful = spec.articles - hubless;

    static const NodeKind kCommunityKinds[] = {NodeKind::datasets, NodeKind::metrics,
                                               NodeKind::methodology, NodeKind::results,
                                               NodeKind::key_contributions};

    for (std::size_t h = 0; h < spec.hubs; ++h) {
        std::string owner = "p" + std::to_string(h % hubful);
        NodeId hub = g.add_node(NodeKind::classification_tags, "hub tag " + std::to_string(h),
                                Modality::text, owner);
        out.hub_ids.push_back(hub);
        std::size_t deg = spec.hub_min_degree +
                          rng.below(spec.hub_max_degree - spec.hub_min_degree + 1);
        std::unordered_set<std::size_t> picked;
        while (picked.size() < deg) {
            std::size_t a = rng.below(hubful);
            if (picked.insert(a).second) g.add_edge(out.article_ids[a], hub);
        }
    }

    for (std::size_t c = 0; c < spec.community; ++c) {
        NodeKind kind = kCommunityKinds[c % 5];
        std::string owner = "p" + std::to_string(c % spec.articles);
        NodeId node = g.add_node(kind, "community " + std::to_string(c), Modality::text, owner);
        out.community_ids.push_back(node);
        std::size_t deg =
            spec.community_min_degree +
            rng.below(spec.community_max_degree - spec.community_min_degree + 1);
        std::unordered_set<std::size_t> picked;
        while (picked.size() < deg) {
            std::size_t a = rng.below(spec.articles);
            if (picked.insert(a).second) g.add_edge(out.article_ids[a], node);
        }
    }

    for (std::size_t p = 0; p < spec.privates; ++p) {
        std::size_t a = rng.below(spec.articles);
        std::string owner = "p" + std::to_string(a);
        NodeId node = g.add_node(NodeKind::limitations, "private " + std::to_string(p),
                                 Modality::text, owner);
        g.add_edge(out.article_ids[a], node);
    }

    return out;
}

} // namespace kgtest
