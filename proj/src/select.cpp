#include "kgbench/select.hpp"

#include "kgbench/fileio.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>
#include <unordered_set>

namespace kgbench {

using nlohmann::json;

DegreeQuantiles::DegreeQuantiles(const FrozenGraphView& view) {
    sorted_degrees_.reserve(view.keyinfo_rows().size());
    for (std::uint32_t row : view.keyinfo_rows())
        sorted_degrees_.push_back(view.degree(row));
    std::sort(sorted_degrees_.begin(), sorted_degrees_.end());
}

double DegreeQuantiles::quantile(std::size_t degree) const {
    if (sorted_degrees_.empty()) return 0.0;
    auto it = std::upper_bound(sorted_degrees_.begin(), sorted_degrees_.end(), degree);
    return static_cast<double>(it - sorted_degrees_.begin()) /
           static_cast<double>(sorted_degrees_.size());
}

namespace {

struct SubsetHash {
    std::size_t operator()(const std::vector<std::uint32_t>& v) const {
        return fnv1a64(v.data(), v.size() * sizeof(std::uint32_t));
    }
};

std::vector<std::uint32_t> shared_keyinfo_rows(const FrozenGraphView& view,
                                               const std::vector<std::uint32_t>& members) {
    std::vector<std::uint32_t> shared;
    for (std::size_t i = 0; i < members.size(); ++i) {
        auto a = view.neighbors(members[i]);
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            auto b = view.neighbors(members[j]);
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(shared));
        }
    }
    std::sort(shared.begin(), shared.end());
    shared.erase(std::unique(shared.begin(), shared.end()), shared.end());
    shared.erase(std::remove_if(shared.begin(), shared.end(),
                                [&](std::uint32_t row) { return view.is_article(row); }),
                 shared.end());
    return shared;
}

std::string first_paper_id(const FrozenGraphView& view, std::uint32_t row) {
    const Node& n = view.graph().node(view.id_of(row));
    return n.source_paper_ids.empty() ? std::string() : *n.source_paper_ids.begin();
}

CandidateCombination make_combo(const FrozenGraphView& view,
                                const std::vector<std::uint32_t>& members,
                                const std::vector<std::uint32_t>& shared_rows) {
    CandidateCombination combo;
    std::vector<std::pair<std::string, NodeId>> named;
    named.reserve(members.size());
    for (std::uint32_t row : members)
        named.emplace_back(first_paper_id(view, row), view.id_of(row));
    std::sort(named.begin(), named.end());
    for (auto& [name, id] : named) {
        combo.paper_names.push_back(std::move(name));
        combo.papers.push_back(id);
    }
    combo.shared_nodes.reserve(shared_rows.size());
    for (std::uint32_t row : shared_rows) combo.shared_nodes.push_back(view.id_of(row));
    return combo;
}

std::size_t combo_bytes(const CandidateCombination& c) {
    std::size_t bytes = sizeof(CandidateCombination);
    bytes += c.papers.capacity() * sizeof(NodeId);
    bytes += c.shared_nodes.capacity() * sizeof(NodeId);
    for (const auto& s : c.paper_names) bytes += sizeof(std::string) + s.capacity();
    return bytes;
}

double weighted_provisional(const ScoreBreakdown& b, const SelectionConfig& cfg) {
    return cfg.w_coverage * b.coverage + cfg.w_diversity * b.diversity +
           cfg.w_consistency * b.consistency;
}

} // namespace

void score_combination(CandidateCombination& combo, const FrozenGraphView& view,
                       const DegreeQuantiles& dq, const SelectionConfig& cfg,
                       const std::vector<NodeId>& used) {
    ScoreBreakdown b;
    std::set<NodeKind> kinds;
    for (NodeId id : combo.shared_nodes) {
        std::uint32_t row = view.row_of(id);
        b.coverage += dq.quantile(view.degree(row));
        kinds.insert(view.graph().node(id).kind);
    }
    b.diversity = static_cast<double>(kinds.size()) / static_cast<double>(kNumKinds);

    double consistency_sum = 0.0;
    for (NodeId paper : combo.papers) {
        std::uint32_t row = view.row_of(paper);
        auto adj = view.neighbors(row);
        if (adj.empty()) continue;
        std::size_t hits = 0;
        for (std::uint32_t nb : adj) {
            NodeId nb_id = view.id_of(nb);
            if (std::binary_search(combo.shared_nodes.begin(), combo.shared_nodes.end(), nb_id))
                ++hits;
        }
        consistency_sum += static_cast<double>(hits) / static_cast<double>(adj.size());
    }
    b.consistency = combo.papers.empty()
                        ? 0.0
                        : consistency_sum / static_cast<double>(combo.papers.size());

    if (!combo.shared_nodes.empty() && !used.empty()) {
        std::size_t overlap = 0;
        for (NodeId id : combo.shared_nodes)
            if (std::binary_search(used.begin(), used.end(), id)) ++overlap;
        b.redundancy = static_cast<double>(overlap) /
                       static_cast<double>(combo.shared_nodes.size());
    }

    combo.breakdown = b;
    combo.provisional = weighted_provisional(b, cfg);
    combo.score = combo.provisional - cfg.w_redundancy * b.redundancy;
}

EnumerationResult enumerate_combinations(const PairAggregate& agg, const FrozenGraphView& view,
                                         const SelectionConfig& cfg) {
    EnumerationResult out;
    if (cfg.combo_size < 2) throw WalkError("combination size must be at least 2");

    // Adjacency-filtered aggregate pairs grouped by key-info node.
    auto pairs = agg.sorted_pairs();
    std::vector<std::pair<std::uint32_t, std::uint32_t>> by_keyinfo; // (e, article)
    std::unordered_set<std::uint32_t> article_pool;
    by_keyinfo.reserve(pairs.size());
    for (const auto& p : pairs) {
        article_pool.insert(p.article_row);
        auto nb = view.neighbors(p.keyinfo_row);
        if (std::binary_search(nb.begin(), nb.end(), p.article_row))
            by_keyinfo.emplace_back(p.keyinfo_row, p.article_row);
    }
    std::sort(by_keyinfo.begin(), by_keyinfo.end());

    std::size_t n_articles = article_pool.size();
    if (cfg.combo_size > n_articles) {
        out.warning = "combination size " + std::to_string(cfg.combo_size) +
                      " exceeds the " + std::to_string(n_articles) +
                      " aggregate articles: nothing to enumerate";
        return out;
    }

    DegreeQuantiles dq(view);
    std::unordered_set<std::vector<std::uint32_t>, SubsetHash> seen;
    std::size_t bytes_used = 0;
    // Candidates kept under the memory budget; lowest provisional score is
    // evicted first (ties: earliest emitted), which is deterministic.
    std::set<std::pair<double, std::size_t>> eviction_order;
    const std::size_t k = cfg.combo_size;

    std::size_t group_begin = 0;
    while (group_begin < by_keyinfo.size() &&
           (cfg.max_combinations == 0 || out.emitted < cfg.max_combinations)) {
        std::size_t group_end = group_begin;
        while (group_end < by_keyinfo.size() &&
               by_keyinfo[group_end].first == by_keyinfo[group_begin].first)
            ++group_end;
        std::vector<std::uint32_t> group;
        group.reserve(group_end - group_begin);
        for (std::size_t i = group_begin; i < group_end; ++i)
            group.push_back(by_keyinfo[i].second); // ascending within group
        group_begin = group_end;

        if (group.size() < k) continue;
        if (cfg.max_group_size != 0 && group.size() > cfg.max_group_size) {
            ++out.skipped_groups;
            continue;
        }

        // k-subsets in lexicographic order.
        std::vector<std::size_t> pick(k);
        for (std::size_t i = 0; i < k; ++i) pick[i] = i;
        while (true) {
            std::vector<std::uint32_t> subset(k);
            for (std::size_t i = 0; i < k; ++i) subset[i] = group[pick[i]];
            if (seen.insert(subset).second) {
                auto shared = shared_keyinfo_rows(view, subset);
                CandidateCombination combo = make_combo(view, subset, shared);
                score_combination(combo, view, dq, cfg, {});
                ++out.emitted;
                bytes_used += combo_bytes(combo);
                out.combos.push_back(std::move(combo));
                eviction_order.emplace(out.combos.back().provisional,
                                       out.combos.size() - 1);
                while (cfg.max_candidate_memory != 0 &&
                       bytes_used > cfg.max_candidate_memory && !eviction_order.empty()) {
                    auto lowest = eviction_order.begin();
                    std::size_t idx = lowest->second;
                    eviction_order.erase(lowest);
                    bytes_used -= combo_bytes(out.combos[idx]);
                    out.combos[idx].papers.clear(); // tombstone, compacted below
                    out.combos[idx].paper_names.clear();
                    out.combos[idx].shared_nodes.clear();
                    ++out.evicted;
                }
                if (cfg.max_combinations != 0 && out.emitted >= cfg.max_combinations) {
                    out.capped = true;
                    break;
                }
            }
            // Advance the combination odometer.
            std::size_t i = k;
            while (i > 0) {
                --i;
                if (pick[i] != i + group.size() - k) {
                    ++pick[i];
                    for (std::size_t j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
                    break;
                }
                if (i == 0) {
                    i = k; // odometer exhausted
                    break;
                }
            }
            if (i == k) break;
        }
    }

    if (out.evicted > 0) {
        std::vector<CandidateCombination> kept;
        kept.reserve(out.combos.size() - out.evicted);
        for (auto& c : out.combos)
            if (!c.papers.empty()) kept.push_back(std::move(c));
        out.combos = std::move(kept);
    }
    return out;
}

void rank_combinations(std::vector<CandidateCombination>& combos,
                       const SelectionConfig& cfg) {
    auto by_names = [](const CandidateCombination& a, const CandidateCombination& b) {
        return a.paper_names < b.paper_names;
    };
    std::sort(combos.begin(), combos.end(),
              [&](const CandidateCombination& a, const CandidateCombination& b) {
                  if (a.provisional != b.provisional) return a.provisional > b.provisional;
                  return by_names(a, b);
              });
    std::vector<NodeId> used; // sorted
    for (auto& combo : combos) {
        std::size_t overlap = 0;
        for (NodeId id : combo.shared_nodes)
            if (std::binary_search(used.begin(), used.end(), id)) ++overlap;
        combo.breakdown.redundancy =
            combo.shared_nodes.empty()
                ? 0.0
                : static_cast<double>(overlap) / static_cast<double>(combo.shared_nodes.size());
        combo.score = combo.provisional - cfg.w_redundancy * combo.breakdown.redundancy;
        std::size_t before = used.size();
        used.insert(used.end(), combo.shared_nodes.begin(), combo.shared_nodes.end());
        std::inplace_merge(used.begin(), used.begin() + static_cast<std::ptrdiff_t>(before),
                           used.end());
        used.erase(std::unique(used.begin(), used.end()), used.end());
    }
    std::sort(combos.begin(), combos.end(),
              [&](const CandidateCombination& a, const CandidateCombination& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return by_names(a, b);
              });
}

std::string SelectReport::to_text() const {
    std::ostringstream out;
    out << "selection report\n";
    out << "  unique combinations: " << unique_combinations << "\n";
    out << "  quality score (coverage sum): " << quality_score << "\n";
    out << "  truncated walks: " << truncated_walks << "\n";
    out << "  skipped oversized groups: " << skipped_groups << "\n";
    out << "  evicted candidates: " << evicted_candidates << "\n";
    out << "  enumeration capped: " << (enumeration_capped ? "yes" : "no") << "\n";
    out << "  walk stage: " << walk_ms << " ms\n";
    out << "  enumeration stage: " << enumerate_ms << " ms\n";
    out << "  scoring stage: " << score_ms << " ms\n";
    if (!warnings.empty()) out << "  warnings: " << warnings << "\n";
    return out.str();
}

std::pair<std::vector<CandidateCombination>, SelectReport>
select_from_aggregate(const PairAggregate& agg, const FrozenGraphView& view,
                      const SelectionConfig& scfg, const WalkRunStats* walk_stats) {
    SelectReport report;
    if (walk_stats != nullptr) {
        report.truncated_walks = walk_stats->truncated_walks;
        report.walk_ms = walk_stats->wall_ms;
        report.warnings = walk_stats->warning;
    }

    auto t0 = std::chrono::steady_clock::now();
    EnumerationResult enumerated = enumerate_combinations(agg, view, scfg);
    auto t1 = std::chrono::steady_clock::now();
    rank_combinations(enumerated.combos, scfg);
    auto t2 = std::chrono::steady_clock::now();

    report.unique_combinations = enumerated.emitted;
    report.skipped_groups = enumerated.skipped_groups;
    report.evicted_candidates = enumerated.evicted;
    report.enumeration_capped = enumerated.capped;
    for (const auto& c : enumerated.combos) report.quality_score += c.breakdown.coverage;
    report.enumerate_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    report.score_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
    if (!enumerated.warning.empty()) {
        if (!report.warnings.empty()) report.warnings += "; ";
        report.warnings += enumerated.warning;
    }
    return {std::move(enumerated.combos), std::move(report)};
}

std::pair<std::vector<CandidateCombination>, SelectReport>
select_paper_sets(const FrozenGraphView& view, const WalkConfig& wcfg,
                  const SelectionConfig& scfg) {
    auto [agg, stats] = run_walks(view, wcfg);
    return select_from_aggregate(agg, view, scfg, &stats);
}

std::string combination_lines(const std::vector<CandidateCombination>& combos,
                              const FrozenGraphView& view) {
    std::string out;
    for (const auto& c : combos) {
        json line;
        line["papers"] = c.paper_names;
        json shared = json::array();
        for (NodeId id : c.shared_nodes) {
            const Node& n = view.graph().node(id);
            shared.push_back({{"node", id}, {"kind", std::string(kind_name(n.kind))}});
        }
        line["shared"] = shared;
        line["score"] = c.score;
        line["breakdown"] = {{"coverage", c.breakdown.coverage},
                             {"diversity", c.breakdown.diversity},
                             {"consistency", c.breakdown.consistency},
                             {"redundancy", c.breakdown.redundancy}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

void save_combinations(const std::vector<CandidateCombination>& combos,
                       const FrozenGraphView& view, const std::string& path) {
    write_file_bytes(path, combination_lines(combos, view));
}

std::vector<CandidateCombination> parse_combination_lines(const std::string& text,
                                                          const KnowledgeGraph& g) {
    std::vector<CandidateCombination> combos;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw WalkError("combinations line " + std::to_string(lineno) + ": " + e.what());
        }
        CandidateCombination c;
        for (const auto& name : j.at("papers")) {
            c.paper_names.push_back(name.get<std::string>());
            if (!g.has_paper(c.paper_names.back()))
                throw WalkError("combinations line " + std::to_string(lineno) +
                                ": unknown paper " + c.paper_names.back());
            c.papers.push_back(g.title_node(c.paper_names.back()));
        }
        for (const auto& s : j.at("shared")) {
            NodeId id = s.at("node").get<NodeId>();
            if (!g.has_node(id))
                throw WalkError("combinations line " + std::to_string(lineno) +
                                ": unknown shared node " + std::to_string(id));
            auto kind = parse_kind(s.at("kind").get<std::string>());
            if (!kind || g.node(id).kind != *kind)
                throw WalkError("combinations line " + std::to_string(lineno) +
                                ": kind mismatch on node " + std::to_string(id));
            c.shared_nodes.push_back(id);
        }
        c.score = j.at("score").get<double>();
        const auto& b = j.at("breakdown");
        c.breakdown.coverage = b.at("coverage").get<double>();
        c.breakdown.diversity = b.at("diversity").get<double>();
        c.breakdown.consistency = b.at("consistency").get<double>();
        c.breakdown.redundancy = b.at("redundancy").get<double>();
        combos.push_back(std::move(c));
    }
    return combos;
}

} // namespace kgbench
