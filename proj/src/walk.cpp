#include "kgbench/walk.hpp"

#include "kgbench/binio.hpp"
#include "kgbench/fileio.hpp"
#include "kgbench/snapshot.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

namespace kgbench {

namespace {
// Stream key for the start-list draws, distinct from any walk index.
constexpr std::uint64_t kStartStream = 0x5354415254ULL;
} // namespace

HighFrequencyResult compute_high_frequency_set(const KnowledgeGraph& g, double quantile) {
    if (quantile < 0.0 || quantile > 1.0) throw WalkError("quantile must lie in [0, 1]");
    HighFrequencyResult out;
    std::vector<NodeId> keyinfo = g.sorted_keyinfo();
    if (keyinfo.empty()) {
        out.warning = "no key-information nodes: high-frequency set is empty";
        return out;
    }
    std::vector<std::size_t> degrees;
    degrees.reserve(keyinfo.size());
    for (NodeId id : keyinfo) degrees.push_back(g.degree(id));
    std::vector<std::size_t> sorted = degrees;
    std::sort(sorted.begin(), sorted.end());
    std::size_t pos = static_cast<std::size_t>(quantile * static_cast<double>(sorted.size()));
    if (pos >= sorted.size()) pos = sorted.size() - 1;
    std::size_t threshold = sorted[pos];
    for (std::size_t i = 0; i < keyinfo.size(); ++i)
        if (degrees[i] >= threshold) out.ids.push_back(keyinfo[i]);
    return out;
}

void ensure_high_frequency(KnowledgeGraph& g, double quantile) {
    if (!g.high_frequency().empty()) return;
    g.set_high_frequency(compute_high_frequency_set(g, quantile).ids);
}

FrozenGraphView::FrozenGraphView(const KnowledgeGraph& g) : graph_(&g) {
    if (!g.frozen()) throw WalkError("walks require a frozen graph");
    ids_ = g.sorted_node_ids();
    rows_.reserve(ids_.size());
    for (std::uint32_t row = 0; row < ids_.size(); ++row) rows_[ids_[row]] = row;

    std::size_t n = ids_.size();
    article_.assign(n, false);
    high_freq_.assign(n, false);
    adj_start_.assign(n + 1, 0);
    hf_start_.assign(n + 1, 0);

    for (std::uint32_t row = 0; row < n; ++row) {
        NodeId id = ids_[row];
        if (g.articles().count(id)) {
            article_[row] = true;
            article_rows_.push_back(row);
        } else {
            keyinfo_rows_.push_back(row);
        }
        if (g.high_frequency().count(id)) {
            high_freq_[row] = true;
            hf_rows_.push_back(row);
        }
    }
    for (std::uint32_t row = 0; row < n; ++row) {
        const auto& nb = g.neighbors(ids_[row]);
        adj_start_[row + 1] = adj_start_[row] + nb.size();
    }
    adj_.resize(adj_start_[n]);
    for (std::uint32_t row = 0; row < n; ++row) {
        const auto& nb = g.neighbors(ids_[row]);
        std::size_t base = adj_start_[row];
        for (std::size_t i = 0; i < nb.size(); ++i) adj_[base + i] = rows_.at(nb[i]);
        std::sort(adj_.begin() + static_cast<std::ptrdiff_t>(base),
                  adj_.begin() + static_cast<std::ptrdiff_t>(base + nb.size()));
    }
    // neighbors ∩ V_h, cached per row for the biased step.
    for (std::uint32_t row = 0; row < n; ++row) {
        std::size_t cnt = 0;
        for (std::uint32_t nb : neighbors(row))
            if (high_freq_[nb]) ++cnt;
        hf_start_[row + 1] = hf_start_[row] + cnt;
    }
    hf_adj_.resize(hf_start_[n]);
    for (std::uint32_t row = 0; row < n; ++row) {
        std::size_t at = hf_start_[row];
        for (std::uint32_t nb : neighbors(row))
            if (high_freq_[nb]) hf_adj_[at++] = nb;
    }
}

std::uint32_t FrozenGraphView::row_of(NodeId id) const {
    auto it = rows_.find(id);
    if (it == rows_.end()) throw WalkError("unknown node id " + std::to_string(id));
    return it->second;
}

StartList stratified_starts(const FrozenGraphView& view, const WalkConfig& cfg) {
    if (view.article_rows().empty()) throw WalkError("graph has no article nodes");
    if (cfg.article_start_fraction < 0.0 || cfg.article_start_fraction > 1.0)
        throw WalkError("article_start_fraction must lie in [0, 1]");

    StartList out;
    out.rows.reserve(cfg.num_walks);
    std::size_t from_articles = static_cast<std::size_t>(
        cfg.article_start_fraction * static_cast<double>(cfg.num_walks));
    if (view.hf_rows().empty()) {
        from_articles = cfg.num_walks;
        out.warning = "high-frequency set is empty: all starts drawn from articles";
    }

    Rng rng = Rng::for_stream(cfg.seed, kStartStream);
    const auto& articles = view.article_rows();
    for (std::size_t i = 0; i < from_articles; ++i)
        out.rows.push_back(articles[rng.below(articles.size())]);
    const auto& hf = view.hf_rows();
    for (std::size_t i = from_articles; i < cfg.num_walks; ++i)
        out.rows.push_back(hf[rng.below(hf.size())]);
    return out;
}

WalkPath random_walk(const FrozenGraphView& view, std::uint32_t start, const WalkConfig& cfg,
                     Rng& rng) {
    WalkPath path;
    path.rows.reserve(cfg.walk_length + 1);
    path.rows.push_back(start);
    std::uint32_t cur = start;
    for (std::size_t step = 0; step < cfg.walk_length; ++step) {
        auto all = view.neighbors(cur);
        if (all.empty()) {
            path.truncated = true;
            break;
        }
        std::span<const std::uint32_t> pool = all;
        if (view.is_article(cur) && cfg.bias > 0.0 && rng.next_double() < cfg.bias) {
            auto hf = view.hf_neighbors(cur);
            if (!hf.empty()) pool = hf; // empty intersection falls back to all
        }
        cur = pool[rng.below(pool.size())];
        path.rows.push_back(cur);
    }
    return path;
}

void PairAggregate::add_path(std::span<const std::uint32_t> path, const FrozenGraphView& view) {
    // Distinct articles x distinct key-info nodes on this path, once each.
    std::vector<std::uint32_t> articles, keyinfo;
    articles.reserve(path.size() / 2 + 1);
    keyinfo.reserve(path.size() / 2 + 1);
    for (std::uint32_t row : path)
        (view.is_article(row) ? articles : keyinfo).push_back(row);
    auto dedupe = [](std::vector<std::uint32_t>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedupe(articles);
    dedupe(keyinfo);
    for (std::uint32_t a : articles)
        for (std::uint32_t e : keyinfo) pairs_.add(pack(a, e));
}

std::vector<PairAggregate::PairCount> PairAggregate::sorted_pairs() const {
    std::vector<PairCount> out;
    out.reserve(pairs_.size());
    pairs_.for_each([&](std::uint64_t key, std::uint32_t count) {
        out.push_back({static_cast<std::uint32_t>(key >> 32),
                       static_cast<std::uint32_t>(key & 0xFFFFFFFFULL), count});
    });
    std::sort(out.begin(), out.end(), [](const PairCount& x, const PairCount& y) {
        if (x.article_row != y.article_row) return x.article_row < y.article_row;
        return x.keyinfo_row < y.keyinfo_row;
    });
    return out;
}

PairAggregate aggregate(const std::vector<WalkPath>& paths, const FrozenGraphView& view) {
    PairAggregate agg;
    for (const auto& p : paths) agg.add_path(p.rows, view);
    return agg;
}

std::pair<PairAggregate, WalkRunStats> run_walks(const FrozenGraphView& view,
                                                 const WalkConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    StartList starts = stratified_starts(view, cfg);
    WalkRunStats stats;
    stats.walks = cfg.num_walks;
    stats.warning = starts.warning;

    std::size_t workers = std::max<std::size_t>(1, cfg.workers);
    workers = std::min(workers, std::max<std::size_t>(1, cfg.num_walks));

    std::vector<PairAggregate> locals(workers);
    std::vector<std::size_t> truncated(workers, 0);
    std::vector<std::size_t> transitions(workers, 0);

    auto body = [&](std::size_t w) {
        PairAggregate& local = locals[w];
        for (std::size_t i = w; i < cfg.num_walks; i += workers) {
            Rng rng = Rng::for_stream(cfg.seed, i);
            WalkPath path = random_walk(view, starts.rows[i], cfg, rng);
            if (path.truncated) ++truncated[w];
            transitions[w] += path.rows.size() - 1;
            local.add_path(path.rows, view);
        }
    };
    if (workers == 1) {
        body(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(body, w);
        for (auto& t : threads) t.join();
    }

    PairAggregate agg = std::move(locals[0]);
    for (std::size_t w = 1; w < workers; ++w) agg.merge_from(locals[w]);
    for (std::size_t w = 0; w < workers; ++w) {
        stats.truncated_walks += truncated[w];
        stats.transitions += transitions[w];
    }
    auto t1 = std::chrono::steady_clock::now();
    stats.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return {std::move(agg), std::move(stats)};
}

namespace {
constexpr char kAggMagic[4] = {'K', 'G', 'A', 'G'};
constexpr std::uint32_t kAggVersion = 1;
} // namespace

void save_aggregate(const PairAggregate& agg, const FrozenGraphView& view,
                    const std::string& path) {
    ByteWriter w;
    w.raw(kAggMagic, sizeof kAggMagic);
    w.u32(kAggVersion);
    auto pairs = agg.sorted_pairs();
    w.u64(pairs.size());
    for (const auto& p : pairs) {
        w.u64(view.id_of(p.article_row));
        w.u64(view.id_of(p.keyinfo_row));
        w.u32(p.count);
    }
    std::string bytes = w.take();
    ByteWriter trailer;
    trailer.u64(fnv1a64(bytes.data(), bytes.size()));
    write_file_bytes(path, bytes + trailer.bytes());
}

AggregateFile load_aggregate(const std::string& path) {
    std::string bytes = read_file_bytes(path);
    if (bytes.size() < sizeof kAggMagic + 8)
        throw SnapshotError(SnapshotStatus::truncated, "aggregate file too short");
    if (std::memcmp(bytes.data(), kAggMagic, sizeof kAggMagic) != 0)
        throw SnapshotError(SnapshotStatus::bad_magic, "not an aggregate file");
    std::uint64_t stored;
    std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
    if (stored != fnv1a64(bytes.data(), bytes.size() - 8))
        throw SnapshotError(SnapshotStatus::checksum_mismatch,
                            "aggregate checksum mismatch: data is corrupt");
    ByteReader r(bytes);
    try {
        char magic[4];
        r.raw(magic, sizeof magic);
        std::uint32_t version = r.u32();
        if (version != kAggVersion)
            throw SnapshotError(SnapshotStatus::version_mismatch,
                                "unsupported aggregate version " + std::to_string(version));
        AggregateFile out;
        std::uint64_t n = r.u64();
        out.rows.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            AggregateFile::Row row;
            row.article = r.u64();
            row.keyinfo = r.u64();
            row.count = r.u32();
            out.rows.push_back(row);
        }
        if (r.remaining() != 8)
            throw SnapshotError(SnapshotStatus::truncated, "aggregate has malformed payload");
        return out;
    } catch (const std::out_of_range&) {
        throw SnapshotError(SnapshotStatus::truncated, "aggregate ends mid-record");
    }
}

} // namespace kgbench
