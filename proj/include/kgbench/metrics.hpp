#pragma once
// Objective scorers and report aggregation: Recall@K over ranked document
// lists, normalized exact match, ingestion of external judge scores, and
// macro-averaged report tables.

#include "kgbench/bundle.hpp"

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace kgbench {

class MetricError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// |top-K(predicted) ∩ gold| / |gold|; duplicate predictions count once.
// Empty gold is an error (the metric is undefined).
double recall_at_k(const std::vector<std::string>& predicted,
                   const std::set<std::string>& gold, std::size_t k);

// Trim, ASCII case-fold, collapse internal whitespace, strip terminal
// punctuation (.,!?;:). No numeric coercion: "0.42" and "0.420" differ.
std::string normalize_answer(const std::string& s);

// 100 if the normalized strings match, else 0.
int exact_match(const std::string& prediction, const std::string& gold);

enum class JudgeScheme { summary_five_dims, solution_two_scores };

// Equal-weight mean over the scheme's required dimensions; a missing
// dimension is an error naming it. No judging happens here.
double aggregate_judge_scores(const std::map<std::string, double>& dims, JudgeScheme scheme);

struct TaskResult {
    std::string bundle_id;
    TaskFamily family = TaskFamily::reasoning;
    SubTask sub_task = SubTask::full_paper_reasoning;
    // Reasoning payload.
    std::string answer;
    std::string gold_answer;
    // Topic-induction payload.
    std::vector<std::string> ranked_docs;
    std::set<std::string> gold_docs;
    // Summary / solution payload.
    std::map<std::string, double> judge_scores;
};

// Scores one result on its family's metric, on a 0..100 scale.
double score_result(const TaskResult& r, std::size_t recall_k = 0);

struct MacroReport {
    std::map<SubTask, double> per_sub_task;
    std::map<SubTask, std::size_t> sub_task_counts;
    std::map<TaskFamily, double> per_family;
    double overall = 0.0;
    std::array<double, 4> weights{1.0, 1.0, 1.0, 1.0};

    std::string to_text() const;
};

// Sub-task means -> family macro means -> weighted overall across the
// families present. Weights order: reasoning, topic_induction, summary,
// solution; they are echoed in the report.
MacroReport macro_report(const std::vector<TaskResult>& results,
                         std::array<double, 4> weights = {1.0, 1.0, 1.0, 1.0},
                         std::size_t recall_k = 0);

// The overall aggregation alone, for precomputed per-family scores.
double overall_score(const std::map<TaskFamily, double>& family_scores,
                     const std::array<double, 4>& weights);

// Line-delimited io for results and judge-score files.
std::vector<TaskResult> parse_result_lines(const std::string& text);
void attach_judge_scores(std::vector<TaskResult>& results, const std::string& judge_text);

} // namespace kgbench
