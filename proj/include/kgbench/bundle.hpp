#pragma once
// Task bundle generation: deterministic routing of scored combinations
// into the four task families / eleven sub-tasks, bundle emission with
// evidence pointers, and benchmark shape validation.

#include "kgbench/graph.hpp"
#include "kgbench/ids.hpp"
#include "kgbench/select.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace kgbench {

class BundleError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class TaskFamily : std::uint8_t { reasoning, topic_induction, summary, solution };

enum class SubTask : std::uint8_t {
    figure_table_chart_comparison,
    figure_table_chart_reasoning,
    formula_reasoning,
    algorithm_reasoning,
    full_paper_reasoning,
    implicit_topic_induction,
    explicit_topic_induction,
    trend_summary,
    method_summary,
    fine_grained_summary,
    solution_generation,
};

inline constexpr std::size_t kNumSubTasks = 11;

std::string_view family_name(TaskFamily f);
std::string_view sub_task_name(SubTask s);
std::optional<TaskFamily> parse_family(std::string_view name);
std::optional<SubTask> parse_sub_task(std::string_view name);
TaskFamily family_of(SubTask s);
const std::vector<SubTask>& all_sub_tasks();

struct RoutingConfig {
    std::size_t summary_min_papers = 4;
    std::size_t topic_min_papers = 5;
    // Sub-task picked for topic-induction combinations.
    bool explicit_topics = false;
};

// Deterministic total routing over shared-node kinds; see README for the
// rule table. Falls back to full-paper reasoning.
std::pair<TaskFamily, SubTask> route_task_family(const CandidateCombination& combo,
                                                 const KnowledgeGraph& g,
                                                 const RoutingConfig& cfg);

struct EvidencePointer {
    NodeId node = kInvalidNode;
    NodeKind kind = NodeKind::title;
    Modality modality = Modality::text;
    std::string content;
    std::string media_ref;
    bool shared = true; // false for supplementary visual evidence
};

struct QuestionSeed {
    std::string theme;
    std::vector<NodeId> evidence_nodes; // answer-bearing first
};

struct TaskBundle {
    std::string bundle_id;
    TaskFamily family = TaskFamily::reasoning;
    SubTask sub_task = SubTask::full_paper_reasoning;
    std::vector<std::string> papers;
    std::vector<EvidencePointer> evidence;
    std::set<Modality> modality_flags;
    QuestionSeed question_seed;
    std::string provenance; // originating combination id
    // External review hooks; this pipeline never judges difficulty itself.
    bool needs_difficulty_screen = true;
    bool needs_human_verification = true;

    bool has_visual_modality() const {
        for (Modality m : modality_flags)
            if (m != Modality::text) return true;
        return false;
    }
};

// Emits the bundle for an already-routed combination. Reasoning bundles
// must carry visual evidence; when the shared nodes have none, adjacent
// figure/table/formula/algorithm nodes of the member papers are appended,
// and the combination is rejected if none exist.
TaskBundle emit_bundle(const CandidateCombination& combo, TaskFamily family, SubTask sub_task,
                       const KnowledgeGraph& g, const std::string& bundle_id,
                       const std::string& provenance);

struct BundleBatch {
    std::vector<TaskBundle> bundles;
    // (combination index, reason) for combinations that could not be
    // bundled; counted, never silently dropped.
    std::vector<std::pair<std::size_t, std::string>> rejected;
};
BundleBatch emit_bundles(const std::vector<CandidateCombination>& combos,
                         const KnowledgeGraph& g, const RoutingConfig& cfg);

struct BenchmarkShape {
    std::map<SubTask, std::size_t> sub_task_targets;
    // Supporting-document count buckets 1..5, where bucket 5 means "5 or
    // more"; values are question counts.
    std::map<std::size_t, std::size_t> doc_count_targets;
    std::size_t total = 0;
    std::size_t tolerance = 0; // absolute per-bucket slack

    bool consistent() const;
    std::string to_json() const;
    static BenchmarkShape from_json(const std::string& text);
    // The benchmark's declared shape: 200 per sub-task, 400 for solution
    // generation, 2400 total; doc buckets {1:200, 2:200, 3:400, 4:200, 5+:1400}.
    static BenchmarkShape reference();
};

struct ShapeReport {
    bool pass = false;
    std::string text;
};
ShapeReport validate_benchmark_shape(const std::vector<TaskBundle>& bundles,
                                     const BenchmarkShape& shape);

std::string bundle_lines(const std::vector<TaskBundle>& bundles);
std::vector<TaskBundle> parse_bundle_lines(const std::string& text);

} // namespace kgbench
