#include "kgbench/stats.hpp"

#include "kgbench/hashing.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace kgbench {

BasicStats stats_from_counts(std::size_t num_nodes, std::size_t num_edges) {
    if (num_nodes < 2)
        throw StatsError("density is undefined for fewer than 2 nodes");
    BasicStats s;
    s.num_nodes = num_nodes;
    s.num_edges = num_edges;
    double n = static_cast<double>(num_nodes);
    double e = static_cast<double>(num_edges);
    s.density = 2.0 * e / (n * (n - 1.0));
    s.avg_degree = 2.0 * e / n;
    return s;
}

BasicStats basic_stats(const KnowledgeGraph& g) {
    BasicStats s = stats_from_counts(g.num_nodes(), g.num_edges());
    for (const auto& [id, node] : g.nodes())
        ++s.kind_histogram[static_cast<std::size_t>(node.kind)];
    return s;
}

namespace {

// Connected components over sorted node ids; returns the largest one
// (ties: the one containing the smallest id) plus the component count.
std::pair<std::vector<NodeId>, std::size_t> largest_component(const KnowledgeGraph& g) {
    std::vector<NodeId> ids = g.sorted_node_ids();
    std::unordered_map<NodeId, bool> visited;
    visited.reserve(ids.size());
    std::vector<NodeId> best;
    std::size_t components = 0;
    for (NodeId root : ids) {
        if (visited[root]) continue;
        ++components;
        std::vector<NodeId> comp;
        std::deque<NodeId> queue{root};
        visited[root] = true;
        while (!queue.empty()) {
            NodeId cur = queue.front();
            queue.pop_front();
            comp.push_back(cur);
            for (NodeId nb : g.neighbors(cur)) {
                if (!visited[nb]) {
                    visited[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
        if (comp.size() > best.size()) best = std::move(comp);
    }
    return {std::move(best), components};
}

// BFS distances from one source, restricted to the component it lives in.
void bfs_accumulate(const KnowledgeGraph& g, NodeId source,
                    std::unordered_map<NodeId, std::size_t>& dist_buf,
                    std::size_t& max_dist, std::uint64_t& dist_sum,
                    std::uint64_t& reachable_pairs) {
    dist_buf.clear();
    dist_buf[source] = 0;
    std::deque<NodeId> queue{source};
    while (!queue.empty()) {
        NodeId cur = queue.front();
        queue.pop_front();
        std::size_t d = dist_buf[cur];
        for (NodeId nb : g.neighbors(cur)) {
            if (dist_buf.count(nb)) continue;
            dist_buf[nb] = d + 1;
            max_dist = std::max(max_dist, d + 1);
            dist_sum += d + 1;
            ++reachable_pairs;
            queue.push_back(nb);
        }
    }
}

PathStats path_stats_impl(const KnowledgeGraph& g, const std::vector<NodeId>& sources,
                          bool sampled, std::size_t component_count,
                          std::size_t component_size) {
    PathStats s;
    s.component_count = component_count;
    s.largest_component = component_size;
    s.diameter_is_lower_bound = sampled;
    std::size_t max_dist = 0;
    std::uint64_t dist_sum = 0;
    std::uint64_t pairs = 0;
    std::unordered_map<NodeId, std::size_t> dist_buf;
    dist_buf.reserve(component_size);
    for (NodeId src : sources)
        bfs_accumulate(g, src, dist_buf, max_dist, dist_sum, pairs);
    s.diameter = max_dist;
    s.avg_path_length = pairs == 0 ? 0.0
                                   : static_cast<double>(dist_sum) /
                                         static_cast<double>(pairs);
    return s;
}

} // namespace

PathStats path_stats_exact(const KnowledgeGraph& g) {
    if (g.num_nodes() == 0) throw StatsError("path statistics need a non-empty graph");
    auto [component, count] = largest_component(g);
    return path_stats_impl(g, component, false, count, component.size());
}

PathStats path_stats_sampled(const KnowledgeGraph& g, std::size_t sources,
                             std::uint64_t seed) {
    if (g.num_nodes() == 0) throw StatsError("path statistics need a non-empty graph");
    if (sources == 0) throw StatsError("sampled mode needs at least one source");
    auto [component, count] = largest_component(g);
    std::vector<NodeId> picks = component;
    if (sources < picks.size()) {
        // Seeded partial Fisher-Yates: the first `sources` entries become a
        // uniform sample without replacement.
        Rng rng(seed);
        for (std::size_t i = 0; i < sources; ++i) {
            std::size_t j = i + rng.below(picks.size() - i);
            std::swap(picks[i], picks[j]);
        }
        picks.resize(sources);
        std::sort(picks.begin(), picks.end());
    }
    return path_stats_impl(g, picks, picks.size() < component.size(), count,
                           component.size());
}

std::string stats_text(const BasicStats& basic, const PathStats* paths) {
    std::ostringstream out;
    out << "nodes: " << basic.num_nodes << "\n";
    out << "edges: " << basic.num_edges << "\n";
    out << "density: " << basic.density << "\n";
    out << "avg_degree: " << basic.avg_degree << "\n";
    bool any_kind = false;
    for (std::size_t i = 0; i < kNumKinds; ++i)
        if (basic.kind_histogram[i] != 0) any_kind = true;
    if (any_kind) {
        out << "kinds:\n";
        for (std::size_t i = 0; i < kNumKinds; ++i) {
            if (basic.kind_histogram[i] == 0) continue;
            out << "  " << kKindNames[i] << ": " << basic.kind_histogram[i] << "\n";
        }
    }
    if (paths != nullptr) {
        out << "components: " << paths->component_count << "\n";
        out << "largest_component: " << paths->largest_component << "\n";
        out << "diameter" << (paths->diameter_is_lower_bound ? " (lower bound)" : "")
            << ": " << paths->diameter << "\n";
        out << "avg_path_length: " << paths->avg_path_length << "\n";
    }
    return out.str();
}

} // namespace kgbench
