// kgbench command-line front end: one subcommand per pipeline stage.
//   build   records -> graph snapshot (+ vector sidecar)
//   ingest  validation report for a record directory
//   merge   semantic node merging over a snapshot + sidecar
//   stats   structural statistics of a snapshot
//   walk    biased random walks -> pair aggregate file
//   select  combinations from a snapshot (fresh walks or a saved aggregate)
//   bundle  combinations -> task bundles (+ shape validation)
//   shape   write the reference benchmark shape
//   serve   retrieval tool API over a markdown corpus
//   score   macro-averaged report over a results file

#include "kgbench/bundle.hpp"
#include "kgbench/corpus.hpp"
#include "kgbench/fileio.hpp"
#include "kgbench/merge.hpp"
#include "kgbench/metrics.hpp"
#include "kgbench/record.hpp"
#include "kgbench/select.hpp"
#include "kgbench/service.hpp"
#include "kgbench/snapshot.hpp"
#include "kgbench/stats.hpp"
#include "kgbench/vector_store.hpp"
#include "kgbench/walk.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <thread>

namespace {

using namespace kgbench;

std::string read_text(const std::string& path) { return read_file_bytes(path); }

std::vector<NodeKind> parse_schedule(const std::string& csv) {
    std::vector<NodeKind> kinds;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        std::size_t comma = csv.find(',', pos);
        std::string name = csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!name.empty()) {
            auto kind = parse_kind(name);
            if (!kind) throw std::runtime_error("unknown kind in schedule: " + name);
            kinds.push_back(*kind);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return kinds;
}

int cmd_build(const std::string& records_dir, const std::string& out,
              const std::string& vectors_out) {
    auto loaded = load_record_dir(records_dir);
    for (const auto& err : loaded.parse_errors) std::cerr << err << "\n";

    auto report = validate_batch(loaded.records);
    std::cout << report.to_text();
    if (!loaded.parse_errors.empty() || !report.accepted()) {
        std::cerr << "build aborted: invalid records\n";
        return 1;
    }

    KnowledgeGraph g;
    std::uint32_t dim = 0;
    std::vector<std::pair<std::string, std::vector<float>>> vectors;
    for (const auto& rec : loaded.records) {
        add_record_to_graph(g, rec);
        for (auto& [key, vec] : resolve_inline_embeddings(rec)) {
            if (dim == 0) dim = static_cast<std::uint32_t>(vec.size());
            vectors.emplace_back(key, std::move(vec));
        }
    }
    save_graph(g, out);
    std::cout << "snapshot: " << out << " (" << g.num_nodes() << " nodes, " << g.num_edges()
              << " edges, " << g.articles().size() << " papers)\n";

    if (!vectors_out.empty()) {
        if (vectors.empty()) {
            std::cerr << "no inline embeddings found; nothing to write to " << vectors_out
                      << "\n";
            return 1;
        }
        VectorStore store(dim);
        for (const auto& [key, vec] : vectors) store.put(key, vec);
        store.save(vectors_out);
        std::cout << "vectors: " << vectors_out << " (" << store.size() << " x " << dim
                  << ")\n";
    }
    return 0;
}

int cmd_ingest_check(const std::string& dir) {
    auto loaded = load_record_dir(dir);
    for (const auto& err : loaded.parse_errors) std::cout << err << "\n";
    auto report = validate_batch(loaded.records);
    std::cout << report.to_text();
    std::cout << "records: " << loaded.records.size() << ", parse errors: "
              << loaded.parse_errors.size() << "\n";
    return loaded.parse_errors.empty() && report.accepted() ? 0 : 1;
}

int cmd_merge(const std::string& snapshot, const std::string& vectors, const std::string& out,
              double theta, const std::string& schedule_csv, const std::string& backend) {
    KnowledgeGraph g = load_graph(snapshot);
    VectorStore store = VectorStore::load(vectors);
    MergeConfig cfg;
    cfg.threshold = theta;
    cfg.backend = backend;
    cfg.index.dim = store.dim();
    if (!schedule_csv.empty()) cfg.schedule = parse_schedule(schedule_csv);
    auto [resolution, report] = run_merge_schedule(g, store, cfg);
    std::cout << report.to_text();
    std::cout << "merged away: " << resolution.merged_away() << " nodes, provenance entries: "
              << resolution.provenance_entries() << "\n";
    save_graph(g, out);
    std::cout << "snapshot: " << out << " (" << g.num_nodes() << " nodes, " << g.num_edges()
              << " edges)\n";
    return 0;
}

int cmd_stats(const std::string& snapshot, bool exact, std::size_t sample,
              std::uint64_t seed) {
    KnowledgeGraph g = load_graph(snapshot);
    g.freeze();
    BasicStats basic = basic_stats(g);
    if (exact) {
        PathStats paths = path_stats_exact(g);
        std::cout << stats_text(basic, &paths);
    } else if (sample > 0) {
        PathStats paths = path_stats_sampled(g, sample, seed);
        std::cout << stats_text(basic, &paths);
    } else {
        std::cout << stats_text(basic, nullptr);
    }
    return 0;
}

int cmd_walk(const std::string& snapshot, const WalkConfig& cfg, const std::string& out) {
    KnowledgeGraph g = load_graph(snapshot);
    ensure_high_frequency(g, cfg.hf_quantile);
    g.freeze();
    FrozenGraphView view(g);
    auto [agg, stats] = run_walks(view, cfg);
    if (!stats.warning.empty()) std::cerr << "warning: " << stats.warning << "\n";
    save_aggregate(agg, view, out);
    std::cout << "walks: " << stats.walks << ", truncated: " << stats.truncated_walks
              << ", transitions: " << stats.transitions << ", pairs: " << agg.num_pairs()
              << ", wall ms: " << stats.wall_ms << "\n";
    std::cout << "aggregate: " << out << "\n";
    return 0;
}

int cmd_select(const std::string& snapshot, const std::string& agg_path, WalkConfig wcfg,
               const SelectionConfig& scfg, const std::string& out) {
    KnowledgeGraph g = load_graph(snapshot);
    ensure_high_frequency(g, wcfg.hf_quantile);
    g.freeze();
    FrozenGraphView view(g);

    std::vector<CandidateCombination> combos;
    SelectReport report;
    if (!agg_path.empty()) {
        AggregateFile file = load_aggregate(agg_path);
        PairAggregate agg;
        for (const auto& row : file.rows)
            agg.add_pair(view.row_of(row.article), view.row_of(row.keyinfo), row.count);
        std::tie(combos, report) = select_from_aggregate(agg, view, scfg, nullptr);
    } else {
        std::tie(combos, report) = select_paper_sets(view, wcfg, scfg);
    }
    std::cout << report.to_text();
    save_combinations(combos, view, out);
    std::cout << "combinations: " << out << " (" << combos.size() << " lines)\n";
    return 0;
}

int cmd_bundle(const std::string& combos_path, const std::string& snapshot,
               const std::string& shape_path, const std::string& out_dir,
               const RoutingConfig& rcfg) {
    KnowledgeGraph g = load_graph(snapshot);
    auto combos = parse_combination_lines(read_text(combos_path), g);
    auto batch = emit_bundles(combos, g, rcfg);

    std::filesystem::create_directories(out_dir);
    std::string bundles_path = out_dir + "/bundles.jsonl";
    write_file_bytes(bundles_path, bundle_lines(batch.bundles));
    std::cout << "bundles: " << bundles_path << " (" << batch.bundles.size() << " bundles, "
              << batch.rejected.size() << " rejected)\n";
    if (!batch.rejected.empty()) {
        std::string rejected_text;
        for (const auto& [index, reason] : batch.rejected)
            rejected_text += "combination " + std::to_string(index) + ": " + reason + "\n";
        write_file_bytes(out_dir + "/rejected.txt", rejected_text);
    }

    if (!shape_path.empty()) {
        BenchmarkShape shape = BenchmarkShape::from_json(read_text(shape_path));
        ShapeReport shape_report = validate_benchmark_shape(batch.bundles, shape);
        write_file_bytes(out_dir + "/shape_report.txt", shape_report.text);
        std::cout << shape_report.text;
        std::cout << (shape_report.pass ? "shape: PASS\n" : "shape: MISMATCH\n");
    }
    return 0;
}

std::atomic<bool> g_stop{false};
void handle_signal(int) { g_stop.store(true); }

int cmd_serve(const std::string& corpus_dir, const std::string& vectors, int port,
              std::size_t max_tokens, std::size_t max_batch, std::size_t max_top_k) {
    auto docs = load_corpus_dir(corpus_dir, max_tokens);
    VectorStore store = VectorStore::load(vectors);
    CorpusIndex index(docs, store);
    std::cout << "corpus: " << docs.size() << " documents, " << index.size()
              << " indexed items (dim " << index.dim() << ")\n";

    ServiceConfig cfg;
    cfg.port = port;
    cfg.max_batch = max_batch;
    cfg.max_top_k = max_top_k;
    ToolService service(index, cfg);
    service.start();
    std::cout << "listening on 127.0.0.1:" << service.port() << "\n";

    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    service.stop();
    std::cout << "stopped\n";
    return 0;
}

int cmd_score(const std::string& results_path, const std::string& judge_path,
              std::vector<double> weights, std::size_t recall_k) {
    auto results = parse_result_lines(read_text(results_path));
    if (!judge_path.empty()) attach_judge_scores(results, read_text(judge_path));
    std::array<double, 4> w{1.0, 1.0, 1.0, 1.0};
    for (std::size_t i = 0; i < weights.size() && i < 4; ++i) w[i] = weights[i];
    MacroReport report = macro_report(results, w, recall_k);
    std::cout << report.to_text();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"knowledge-graph benchmark construction pipeline"};
    app.require_subcommand(1);

    // build
    auto* build = app.add_subcommand("build", "build a graph snapshot from record files");
    std::string records_dir, build_out, vectors_out;
    build->add_option("--records", records_dir, "record directory (*.jsonl)")->required();
    build->add_option("--out", build_out, "output snapshot path")->required();
    build->add_option("--vectors-out", vectors_out, "write inline embeddings to this sidecar");

    // ingest --check
    auto* ingest = app.add_subcommand("ingest", "validate record files");
    std::string check_dir;
    ingest->add_option("--check", check_dir, "record directory to validate")->required();

    // merge
    auto* merge = app.add_subcommand("merge", "merge semantically duplicate nodes");
    std::string merge_snapshot, merge_vectors, merge_out, schedule_csv;
    std::string backend = "hnsw";
    double theta = 0.90;
    merge->add_option("--snapshot", merge_snapshot, "input snapshot")->required();
    merge->add_option("--vectors", merge_vectors, "vector sidecar")->required();
    merge->add_option("--out", merge_out, "output snapshot")->required();
    merge->add_option("--theta", theta, "similarity threshold (default 0.90)");
    merge->add_option("--schedule", schedule_csv, "comma-separated kind order");
    merge->add_option("--backend", backend, "index backend: hnsw or flat");

    // stats
    auto* stats = app.add_subcommand("stats", "structural statistics of a snapshot");
    std::string stats_snapshot;
    bool exact = false;
    std::size_t sample = 0;
    std::uint64_t stats_seed = 0;
    stats->add_option("--snapshot", stats_snapshot, "input snapshot")->required();
    auto* exact_flag = stats->add_flag("--exact", exact, "all-sources BFS path statistics");
    stats->add_option("--sample", sample, "BFS source sample size")->excludes(exact_flag);
    stats->add_option("--seed", stats_seed, "sampling seed");

    // walk
    auto* walk = app.add_subcommand("walk", "run biased walks and save the pair aggregate");
    std::string walk_snapshot, walk_out;
    WalkConfig wcfg;
    walk->add_option("--snapshot", walk_snapshot, "input snapshot")->required();
    walk->add_option("--L", wcfg.walk_length, "walk length (default 100)");
    walk->add_option("--W", wcfg.num_walks, "number of walks (default 10000)");
    walk->add_option("--beta", wcfg.bias, "high-frequency bias (default 0.3)");
    walk->add_option("--seed", wcfg.seed, "walk seed");
    walk->add_option("--workers", wcfg.workers, "worker threads (default 1)");
    walk->add_option("--quantile", wcfg.hf_quantile, "V_h degree quantile (default 0.90)");
    walk->add_option("--out", walk_out, "output aggregate path")->required();

    // select
    auto* select = app.add_subcommand("select", "enumerate and rank paper combinations");
    std::string select_snapshot, select_agg, select_out;
    WalkConfig swcfg;
    SelectionConfig scfg;
    std::vector<double> weights;
    select->add_option("--snapshot", select_snapshot, "input snapshot")->required();
    select->add_option("--agg", select_agg, "precomputed aggregate (skips the walk stage)");
    select->add_option("--k", scfg.combo_size, "combination size (default 3)");
    select->add_option("--cap", scfg.max_combinations, "max combinations (default 10000)");
    select->add_option("--weights", weights,
                       "coverage diversity consistency redundancy (default 1 1 1 0.5)")
        ->expected(4);
    select->add_option("--max-group", scfg.max_group_size,
                       "per-node group ceiling, 0 disables (default 32)");
    select->add_option("--L", swcfg.walk_length, "walk length (default 100)");
    select->add_option("--W", swcfg.num_walks, "number of walks (default 10000)");
    select->add_option("--beta", swcfg.bias, "high-frequency bias (default 0.3)");
    select->add_option("--seed", swcfg.seed, "walk seed");
    select->add_option("--workers", swcfg.workers, "worker threads (default 1)");
    select->add_option("--quantile", swcfg.hf_quantile, "V_h degree quantile (default 0.90)");
    select->add_option("--out", select_out, "output combinations path")->required();

    // bundle
    auto* bundle = app.add_subcommand("bundle", "emit task bundles from combinations");
    std::string combos_path, bundle_snapshot, shape_path, bundle_out;
    RoutingConfig rcfg;
    bundle->add_option("--combos", combos_path, "combinations file")->required();
    bundle->add_option("--snapshot", bundle_snapshot, "snapshot the combinations came from")
        ->required();
    bundle->add_option("--shape", shape_path, "benchmark shape to validate against");
    bundle->add_option("--out", bundle_out, "output directory")->required();
    bundle->add_flag("--explicit-topics", rcfg.explicit_topics,
                     "route topic combinations to the explicit sub-task");

    // shape
    auto* shape = app.add_subcommand("shape", "write the reference benchmark shape");
    std::string shape_out;
    shape->add_option("--out", shape_out, "output path")->required();

    // serve
    auto* serve = app.add_subcommand("serve", "serve the retrieval tool API");
    std::string corpus_dir, serve_vectors;
    int port = 0;
    std::size_t max_tokens = 256, max_batch = 32, max_top_k = 100;
    serve->add_option("--corpus", corpus_dir, "markdown corpus directory")->required();
    serve->add_option("--vectors", serve_vectors, "vector sidecar")->required();
    serve->add_option("--port", port, "port (0 picks a free one)");
    serve->add_option("--max-tokens", max_tokens, "chunk token budget (default 256)");
    serve->add_option("--max-batch", max_batch, "max queries per request (default 32)");
    serve->add_option("--max-top-k", max_top_k, "per-query result ceiling (default 100)");

    // score
    auto* score = app.add_subcommand("score", "macro-averaged report over results");
    std::string results_path, judge_path;
    std::vector<double> score_weights;
    std::size_t recall_k = 0;
    score->add_option("--results", results_path, "results file (JSON lines)")->required();
    score->add_option("--judge", judge_path, "judge-score file (JSON lines)");
    score->add_option("--weights", score_weights,
                      "family weights: reasoning topic_induction summary solution")
        ->expected(4);
    score->add_option("--recall-k", recall_k, "Recall@K cutoff (default |gold| per item)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) return cmd_build(records_dir, build_out, vectors_out);
        if (ingest->parsed()) return cmd_ingest_check(check_dir);
        if (merge->parsed())
            return cmd_merge(merge_snapshot, merge_vectors, merge_out, theta, schedule_csv,
                             backend);
        if (stats->parsed()) return cmd_stats(stats_snapshot, exact, sample, stats_seed);
        if (walk->parsed()) return cmd_walk(walk_snapshot, wcfg, walk_out);
        if (select->parsed()) {
            if (!weights.empty()) {
                scfg.w_coverage = weights[0];
                scfg.w_diversity = weights[1];
                scfg.w_consistency = weights[2];
                scfg.w_redundancy = weights[3];
            }
            return cmd_select(select_snapshot, select_agg, swcfg, scfg, select_out);
        }
        if (bundle->parsed())
            return cmd_bundle(combos_path, bundle_snapshot, shape_path, bundle_out, rcfg);
        if (shape->parsed()) {
            write_file_bytes(shape_out, BenchmarkShape::reference().to_json());
            std::cout << "shape: " << shape_out << "\n";
            return 0;
        }
        if (serve->parsed())
            return cmd_serve(corpus_dir, serve_vectors, port, max_tokens, max_batch, max_top_k);
        if (score->parsed()) return cmd_score(results_path, judge_path, score_weights, recall_k);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
