#include "kgbench/bundle.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>

namespace kgbench {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kFamilyNames = {
    "reasoning", "topic_induction", "summary", "solution"};

constexpr std::array<std::string_view, kNumSubTasks> kSubTaskNames = {
    "figure-table-chart comparison",
    "figure-table-chart reasoning",
    "formula reasoning",
    "algorithm reasoning",
    "full-paper reasoning",
    "implicit topic induction",
    "explicit topic induction",
    "trend summary",
    "method summary",
    "fine-grained summary",
    "solution generation",
};

constexpr std::array<TaskFamily, kNumSubTasks> kSubTaskFamilies = {
    TaskFamily::reasoning,       TaskFamily::reasoning, TaskFamily::reasoning,
    TaskFamily::reasoning,       TaskFamily::reasoning, TaskFamily::topic_induction,
    TaskFamily::topic_induction, TaskFamily::summary,   TaskFamily::summary,
    TaskFamily::summary,         TaskFamily::solution,
};

} // namespace

std::string_view family_name(TaskFamily f) {
    return kFamilyNames[static_cast<std::size_t>(f)];
}

std::string_view sub_task_name(SubTask s) {
    return kSubTaskNames[static_cast<std::size_t>(s)];
}

std::optional<TaskFamily> parse_family(std::string_view name) {
    for (std::size_t i = 0; i < kFamilyNames.size(); ++i)
        if (kFamilyNames[i] == name) return static_cast<TaskFamily>(i);
    return std::nullopt;
}

std::optional<SubTask> parse_sub_task(std::string_view name) {
    for (std::size_t i = 0; i < kSubTaskNames.size(); ++i)
        if (kSubTaskNames[i] == name) return static_cast<SubTask>(i);
    return std::nullopt;
}

TaskFamily family_of(SubTask s) { return kSubTaskFamilies[static_cast<std::size_t>(s)]; }

const std::vector<SubTask>& all_sub_tasks() {
    static const std::vector<SubTask> all = [] {
        std::vector<SubTask> v;
        for (std::size_t i = 0; i < kNumSubTasks; ++i) v.push_back(static_cast<SubTask>(i));
        return v;
    }();
    return all;
}

std::pair<TaskFamily, SubTask> route_task_family(const CandidateCombination& combo,
                                                 const KnowledgeGraph& g,
                                                 const RoutingConfig& cfg) {
    std::array<std::size_t, kNumKinds> kind_count{};
    for (NodeId id : combo.shared_nodes)
        ++kind_count[static_cast<std::size_t>(g.node(id).kind)];
    auto count = [&](NodeKind k) { return kind_count[static_cast<std::size_t>(k)]; };
    std::size_t total = combo.shared_nodes.size();
    auto majority = [&](std::size_t c) { return 2 * c > total; };

    std::size_t figures = count(NodeKind::figures);
    std::size_t tables = count(NodeKind::tables);
    if (majority(figures + tables)) {
        SubTask sub = (figures > 0 && tables > 0) ? SubTask::figure_table_chart_comparison
                                                  : SubTask::figure_table_chart_reasoning;
        return {TaskFamily::reasoning, sub};
    }
    if (majority(count(NodeKind::formulas)))
        return {TaskFamily::reasoning, SubTask::formula_reasoning};
    if (majority(count(NodeKind::algorithms)))
        return {TaskFamily::reasoning, SubTask::algorithm_reasoning};

    // A single shared theme node spanning every member paper: topic
    // induction. Checked before the summary rule so one-tag combinations
    // are not swallowed by tag-dominance.
    if (count(NodeKind::classification_tags) == 1 &&
        combo.papers.size() >= cfg.topic_min_papers) {
        NodeId tag = kInvalidNode;
        for (NodeId id : combo.shared_nodes)
            if (g.node(id).kind == NodeKind::classification_tags) tag = id;
        const auto& adj = g.neighbors(tag);
        bool spans_all = true;
        for (NodeId paper : combo.papers)
            if (!std::binary_search(adj.begin(), adj.end(), paper)) spans_all = false;
        if (spans_all) {
            SubTask sub = cfg.explicit_topics ? SubTask::explicit_topic_induction
                                              : SubTask::implicit_topic_induction;
            return {TaskFamily::topic_induction, sub};
        }
    }

    std::size_t tags = count(NodeKind::classification_tags);
    std::size_t methodology = count(NodeKind::methodology);
    if (majority(tags + methodology) && combo.papers.size() >= cfg.summary_min_papers) {
        if (count(NodeKind::results) > 0 || count(NodeKind::metrics) > 0)
            return {TaskFamily::summary, SubTask::fine_grained_summary};
        if (methodology >= tags) return {TaskFamily::summary, SubTask::method_summary};
        return {TaskFamily::summary, SubTask::trend_summary};
    }

    if (majority(count(NodeKind::research_background) + count(NodeKind::limitations)))
        return {TaskFamily::solution, SubTask::solution_generation};

    return {TaskFamily::reasoning, SubTask::full_paper_reasoning};
}

namespace {

EvidencePointer pointer_for(const KnowledgeGraph& g, NodeId id, bool shared) {
    const Node& n = g.node(id);
    EvidencePointer p;
    p.node = id;
    p.kind = n.kind;
    p.modality = n.modality;
    p.content = n.content;
    p.media_ref = n.media_ref;
    p.shared = shared;
    return p;
}

} // namespace

TaskBundle emit_bundle(const CandidateCombination& combo, TaskFamily family, SubTask sub_task,
                       const KnowledgeGraph& g, const std::string& bundle_id,
                       const std::string& provenance) {
    if (combo.shared_nodes.empty())
        throw BundleError("combination has no shared nodes; nothing to ask about");

    TaskBundle b;
    b.bundle_id = bundle_id;
    b.family = family;
    b.sub_task = sub_task;
    b.papers = combo.paper_names;
    b.provenance = provenance;

    // Answer-bearing shared nodes first, highest degree first so the most
    // connected evidence leads; question slots follow.
    std::vector<NodeId> shared = combo.shared_nodes;
    std::sort(shared.begin(), shared.end(), [&](NodeId a, NodeId c) {
        std::size_t da = g.degree(a), dc = g.degree(c);
        if (da != dc) return da > dc;
        return a < c;
    });
    for (NodeId id : shared) {
        b.evidence.push_back(pointer_for(g, id, true));
        b.modality_flags.insert(g.node(id).modality);
        b.question_seed.evidence_nodes.push_back(id);
    }

    if (family == TaskFamily::reasoning && !b.has_visual_modality()) {
        // Pull the member papers' own visual nodes in as supplementary
        // evidence; a reasoning bundle without any is rejected.
        std::vector<NodeId> extra;
        for (NodeId paper : combo.papers) {
            for (NodeId nb : g.neighbors(paper)) {
                const Node& n = g.node(nb);
                if (n.modality != Modality::text &&
                    !std::binary_search(combo.shared_nodes.begin(), combo.shared_nodes.end(),
                                        nb))
                    extra.push_back(nb);
            }
        }
        std::sort(extra.begin(), extra.end());
        extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
        if (extra.empty())
            throw BundleError(
                "reasoning bundle needs figure/table/formula/algorithm evidence and the "
                "member papers have none");
        for (NodeId id : extra) {
            b.evidence.push_back(pointer_for(g, id, false));
            b.modality_flags.insert(g.node(id).modality);
            b.question_seed.evidence_nodes.push_back(id);
        }
    }

    for (NodeId id : shared) {
        const Node& n = g.node(id);
        if (n.kind == NodeKind::classification_tags) {
            b.question_seed.theme = n.content;
            break;
        }
    }
    if (b.question_seed.theme.empty() && !shared.empty())
        b.question_seed.theme = g.node(shared.front()).content;
    return b;
}

BundleBatch emit_bundles(const std::vector<CandidateCombination>& combos,
                         const KnowledgeGraph& g, const RoutingConfig& cfg) {
    BundleBatch batch;
    for (std::size_t i = 0; i < combos.size(); ++i) {
        auto [family, sub] = route_task_family(combos[i], g, cfg);
        char id[32];
        std::snprintf(id, sizeof id, "bundle-%06zu", i);
        char prov[32];
        std::snprintf(prov, sizeof prov, "combo-%06zu", i);
        try {
            batch.bundles.push_back(emit_bundle(combos[i], family, sub, g, id, prov));
        } catch (const BundleError& e) {
            batch.rejected.emplace_back(i, e.what());
        }
    }
    return batch;
}

// --- shape ---

bool BenchmarkShape::consistent() const {
    std::size_t subs = 0;
    for (const auto& [sub, n] : sub_task_targets) subs += n;
    if (subs != total) return false;
    if (!doc_count_targets.empty()) {
        std::size_t docs = 0;
        for (const auto& [bucket, n] : doc_count_targets) docs += n;
        if (docs != total) return false;
    }
    return true;
}

std::string BenchmarkShape::to_json() const {
    json j;
    json subs = json::object();
    for (const auto& [sub, n] : sub_task_targets)
        subs[std::string(sub_task_name(sub))] = n;
    j["sub_tasks"] = subs;
    json docs = json::object();
    for (const auto& [bucket, n] : doc_count_targets)
        docs[bucket >= 5 ? "5+" : std::to_string(bucket)] = n;
    j["doc_counts"] = docs;
    j["total"] = total;
    j["tolerance"] = tolerance;
    return j.dump(2);
}

BenchmarkShape BenchmarkShape::from_json(const std::string& text) {
    json j = json::parse(text);
    BenchmarkShape shape;
    for (const auto& [name, n] : j.at("sub_tasks").items()) {
        auto sub = parse_sub_task(name);
        if (!sub) throw BundleError("unknown sub-task in shape: " + name);
        shape.sub_task_targets[*sub] = n.get<std::size_t>();
    }
    if (j.contains("doc_counts")) {
        for (const auto& [bucket, n] : j.at("doc_counts").items()) {
            std::size_t b = bucket == "5+" ? 5 : std::stoul(bucket);
            shape.doc_count_targets[b] = n.get<std::size_t>();
        }
    }
    shape.total = j.at("total").get<std::size_t>();
    shape.tolerance = j.value("tolerance", std::size_t{0});
    return shape;
}

BenchmarkShape BenchmarkShape::reference() {
    BenchmarkShape shape;
    for (SubTask sub : all_sub_tasks())
        shape.sub_task_targets[sub] = sub == SubTask::solution_generation ? 400 : 200;
    shape.doc_count_targets = {{1, 200}, {2, 200}, {3, 400}, {4, 200}, {5, 1400}};
    shape.total = 2400;
    return shape;
}

ShapeReport validate_benchmark_shape(const std::vector<TaskBundle>& bundles,
                                     const BenchmarkShape& shape) {
    ShapeReport report;
    std::ostringstream out;
    bool ok = true;

    if (!shape.consistent()) {
        out << "shape targets do not sum to the declared total " << shape.total << "\n";
        ok = false;
    }

    std::map<SubTask, std::size_t> sub_actual;
    std::map<std::size_t, std::size_t> doc_actual;
    for (const auto& b : bundles) {
        ++sub_actual[b.sub_task];
        ++doc_actual[std::min<std::size_t>(b.papers.size(), 5)];
    }

    out << "sub-task counts (actual / target):\n";
    for (const auto& [sub, target] : shape.sub_task_targets) {
        std::size_t actual = sub_actual.count(sub) ? sub_actual.at(sub) : 0;
        std::size_t diff = actual > target ? actual - target : target - actual;
        bool row_ok = diff <= shape.tolerance;
        out << "  " << sub_task_name(sub) << ": " << actual << " / " << target
            << (row_ok ? "" : "  MISMATCH") << "\n";
        if (!row_ok) ok = false;
    }
    for (const auto& [sub, actual] : sub_actual) {
        if (!shape.sub_task_targets.count(sub)) {
            out << "  " << sub_task_name(sub) << ": " << actual
                << " / 0  UNEXPECTED\n";
            ok = false;
        }
    }

    if (!shape.doc_count_targets.empty()) {
        out << "supporting-doc counts (actual / target):\n";
        for (const auto& [bucket, target] : shape.doc_count_targets) {
            std::size_t actual = doc_actual.count(bucket) ? doc_actual.at(bucket) : 0;
            std::size_t diff = actual > target ? actual - target : target - actual;
            bool row_ok = diff <= shape.tolerance;
            out << "  " << (bucket >= 5 ? "5+" : std::to_string(bucket)) << ": "
                << actual << " / " << target << (row_ok ? "" : "  MISMATCH") << "\n";
            if (!row_ok) ok = false;
        }
    }

    out << "total bundles: " << bundles.size() << " / " << shape.total << "\n";
    out << (ok ? "shape check: pass\n" : "shape check: FAIL\n");
    report.pass = ok;
    report.text = out.str();
    return report;
}

// --- bundle serialization ---

std::string bundle_lines(const std::vector<TaskBundle>& bundles) {
    std::string out;
    for (const auto& b : bundles) {
        json j;
        j["bundle_id"] = b.bundle_id;
        j["family"] = std::string(family_name(b.family));
        j["sub_task"] = std::string(sub_task_name(b.sub_task));
        j["papers"] = b.papers;
        json evidence = json::array();
        for (const auto& e : b.evidence) {
            json je = {{"node", e.node},
                       {"kind", std::string(kind_name(e.kind))},
                       {"modality", std::string(modality_name(e.modality))},
                       {"content", e.content},
                       {"shared", e.shared}};
            if (!e.media_ref.empty()) je["media_ref"] = e.media_ref;
            evidence.push_back(je);
        }
        j["evidence"] = evidence;
        json flags = json::array();
        for (Modality m : b.modality_flags) flags.push_back(std::string(modality_name(m)));
        j["modality_flags"] = flags;
        j["question_seed"] = {{"theme", b.question_seed.theme},
                              {"evidence_nodes", b.question_seed.evidence_nodes}};
        j["provenance"] = b.provenance;
        j["needs_difficulty_screen"] = b.needs_difficulty_screen;
        j["needs_human_verification"] = b.needs_human_verification;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<TaskBundle> parse_bundle_lines(const std::string& text) {
    std::vector<TaskBundle> bundles;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        TaskBundle b;
        b.bundle_id = j.at("bundle_id").get<std::string>();
        auto family = parse_family(j.at("family").get<std::string>());
        auto sub = parse_sub_task(j.at("sub_task").get<std::string>());
        if (!family || !sub) throw BundleError("bundle line names an unknown task");
        if (family_of(*sub) != *family)
            throw BundleError("bundle family does not match its sub-task");
        b.family = *family;
        b.sub_task = *sub;
        b.papers = j.at("papers").get<std::vector<std::string>>();
        if (j.contains("evidence")) {
            for (const auto& je : j.at("evidence")) {
                EvidencePointer e;
                e.node = je.at("node").get<NodeId>();
                auto kind = parse_kind(je.at("kind").get<std::string>());
                auto modality = parse_modality(je.at("modality").get<std::string>());
                if (!kind || !modality)
                    throw BundleError("bundle evidence names an unknown kind or modality");
                e.kind = *kind;
                e.modality = *modality;
                e.content = je.value("content", std::string());
                e.media_ref = je.value("media_ref", std::string());
                e.shared = je.value("shared", true);
                b.evidence.push_back(std::move(e));
                b.modality_flags.insert(*modality);
            }
        }
        if (j.contains("question_seed")) {
            b.question_seed.theme = j.at("question_seed").value("theme", std::string());
            if (j.at("question_seed").contains("evidence_nodes"))
                b.question_seed.evidence_nodes =
                    j.at("question_seed").at("evidence_nodes").get<std::vector<NodeId>>();
        }
        b.provenance = j.value("provenance", std::string());
        b.needs_difficulty_screen = j.value("needs_difficulty_screen", true);
        b.needs_human_verification = j.value("needs_human_verification", true);
        bundles.push_back(std::move(b));
    }
    return bundles;
}

} // namespace kgbench
