#include "kgbench/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace kgbench {

using nlohmann::json;

double recall_at_k(const std::vector<std::string>& predicted,
                   const std::set<std::string>& gold, std::size_t k) {
    if (k < 1) throw MetricError("recall needs K >= 1");
    if (gold.empty()) throw MetricError("recall is undefined for an empty gold set");
    std::unordered_set<std::string> seen;
    std::size_t hits = 0;
    for (const auto& doc : predicted) {
        if (seen.size() == k) break;
        if (!seen.insert(doc).second) continue; // duplicates count once
        if (gold.count(doc)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(gold.size());
}

std::string normalize_answer(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += static_cast<char>(std::tolower(c));
    }
    while (!out.empty()) {
        char last = out.back();
        if (last == '.' || last == ',' || last == '!' || last == '?' || last == ';' ||
            last == ':' || last == ' ')
            out.pop_back();
        else
            break;
    }
    return out;
}

int exact_match(const std::string& prediction, const std::string& gold) {
    return normalize_answer(prediction) == normalize_answer(gold) ? 100 : 0;
}

double aggregate_judge_scores(const std::map<std::string, double>& dims, JudgeScheme scheme) {
    static const std::vector<std::string> kSummaryDims = {
        "fluency", "relevance", "accuracy", "creativity", "overall"};
    static const std::vector<std::string> kSolutionDims = {"analysis", "technical"};
    const auto& required =
        scheme == JudgeScheme::summary_five_dims ? kSummaryDims : kSolutionDims;
    double sum = 0.0;
    for (const auto& name : required) {
        auto it = dims.find(name);
        if (it == dims.end()) throw MetricError("missing judge dimension: " + name);
        sum += it->second;
    }
    return sum / static_cast<double>(required.size());
}

double score_result(const TaskResult& r, std::size_t recall_k) {
    switch (r.family) {
        case TaskFamily::reasoning:
            return static_cast<double>(exact_match(r.answer, r.gold_answer));
        case TaskFamily::topic_induction: {
            std::size_t k = recall_k != 0 ? recall_k : r.gold_docs.size();
            return 100.0 * recall_at_k(r.ranked_docs, r.gold_docs, k);
        }
        case TaskFamily::summary:
            return aggregate_judge_scores(r.judge_scores, JudgeScheme::summary_five_dims);
        case TaskFamily::solution:
            return aggregate_judge_scores(r.judge_scores, JudgeScheme::solution_two_scores);
    }
    throw MetricError("unknown task family");
}

double overall_score(const std::map<TaskFamily, double>& family_scores,
                     const std::array<double, 4>& weights) {
    double weighted = 0.0;
    double weight_sum = 0.0;
    for (const auto& [family, score] : family_scores) {
        double w = weights[static_cast<std::size_t>(family)];
        weighted += w * score;
        weight_sum += w;
    }
    if (weight_sum == 0.0) return 0.0;
    return weighted / weight_sum;
}

MacroReport macro_report(const std::vector<TaskResult>& results,
                         std::array<double, 4> weights, std::size_t recall_k) {
    MacroReport report;
    report.weights = weights;

    std::map<SubTask, double> sums;
    for (const auto& r : results) {
        if (family_of(r.sub_task) != r.family)
            throw MetricError("result family does not match its sub-task: " + r.bundle_id);
        sums[r.sub_task] += score_result(r, recall_k);
        ++report.sub_task_counts[r.sub_task];
    }
    for (const auto& [sub, sum] : sums)
        report.per_sub_task[sub] = sum / static_cast<double>(report.sub_task_counts[sub]);

    std::map<TaskFamily, double> family_sums;
    std::map<TaskFamily, std::size_t> family_counts;
    for (const auto& [sub, mean] : report.per_sub_task) {
        family_sums[family_of(sub)] += mean;
        ++family_counts[family_of(sub)];
    }
    for (const auto& [family, sum] : family_sums)
        report.per_family[family] = sum / static_cast<double>(family_counts[family]);

    report.overall = overall_score(report.per_family, weights);
    return report;
}

std::string MacroReport::to_text() const {
    std::ostringstream out;
    out << "per sub-task means:\n";
    for (const auto& [sub, mean] : per_sub_task)
        out << "  " << sub_task_name(sub) << ": " << mean << " (n="
            << sub_task_counts.at(sub) << ")\n";
    out << "family macro means:\n";
    static const TaskFamily kOrder[] = {TaskFamily::reasoning, TaskFamily::topic_induction,
                                        TaskFamily::summary, TaskFamily::solution};
    for (TaskFamily f : kOrder) {
        out << "  " << family_name(f) << ": ";
        if (per_family.count(f))
            out << per_family.at(f);
        else
            out << "absent";
        out << "\n";
    }
    out << "family weights (reasoning, topic_induction, summary, solution): ";
    for (std::size_t i = 0; i < weights.size(); ++i)
        out << (i > 0 ? ", " : "") << weights[i];
    out << "\n";
    out << "overall: " << overall << "\n";
    return out.str();
}

std::vector<TaskResult> parse_result_lines(const std::string& text) {
    std::vector<TaskResult> results;
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
            throw MetricError("results line " + std::to_string(lineno) + ": " + e.what());
        }
        TaskResult r;
        r.bundle_id = j.at("bundle_id").get<std::string>();
        auto sub = parse_sub_task(j.at("sub_task").get<std::string>());
        if (!sub)
            throw MetricError("results line " + std::to_string(lineno) +
                              ": unknown sub-task");
        r.sub_task = *sub;
        r.family = family_of(*sub);
        if (j.contains("answer")) r.answer = j.at("answer").get<std::string>();
        if (j.contains("gold_answer")) r.gold_answer = j.at("gold_answer").get<std::string>();
        if (j.contains("ranked_docs"))
            r.ranked_docs = j.at("ranked_docs").get<std::vector<std::string>>();
        if (j.contains("gold_docs"))
            for (const auto& d : j.at("gold_docs"))
                r.gold_docs.insert(d.get<std::string>());
        if (j.contains("judge_scores"))
            for (const auto& [name, v] : j.at("judge_scores").items())
                r.judge_scores[name] = v.get<double>();
        results.push_back(std::move(r));
    }
    return results;
}

void attach_judge_scores(std::vector<TaskResult>& results, const std::string& judge_text) {
    std::unordered_map<std::string, std::map<std::string, double>> by_bundle;
    std::istringstream in(judge_text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw MetricError("judge line " + std::to_string(lineno) + ": " + e.what());
        }
        auto& dims = by_bundle[j.at("bundle_id").get<std::string>()];
        for (const auto& [name, v] : j.at("scores").items())
            dims[name] = v.get<double>();
    }
    for (auto& r : results) {
        auto it = by_bundle.find(r.bundle_id);
        if (it != by_bundle.end())
            for (const auto& [name, v] : it->second) r.judge_scores[name] = v;
    }
}

} // namespace kgbench
