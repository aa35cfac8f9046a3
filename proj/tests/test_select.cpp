#include <doctest.h>

#include "kgbench/select.hpp"
#include "support.hpp"

#include <set>

using namespace kgbench;
using kgtest::TempDir;

namespace {

// Aggregate in which co-visitation equals adjacency: every graph edge
// (article, keyinfo) appears with count 1.
PairAggregate full_covisit(const FrozenGraphView& view) {
    PairAggregate agg;
    for (std::uint32_t e : view.keyinfo_rows())
        for (std::uint32_t a : view.neighbors(e)) agg.add_pair(a, e, 1);
    return agg;
}

// N articles all adjacent to one shared key-info hub.
struct HubFixture {
    KnowledgeGraph g;
    std::vector<NodeId> titles;
    NodeId hub;

    explicit HubFixture(std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            std::string paper = "p" + std::string(i < 10 ? "0" : "") + std::to_string(i);
            titles.push_back(g.add_node(NodeKind::title, "t" + paper, Modality::text, paper));
        }
        hub = g.add_node(NodeKind::datasets, "shared", Modality::text, "p00");
        for (NodeId t : titles) g.add_edge(t, hub);
    }
};

SelectionConfig config(std::size_t k, std::size_t cap) {
    SelectionConfig cfg;
    cfg.combo_size = k;
    cfg.max_combinations = cap;
    return cfg;
}

std::size_t choose(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    std::size_t r = 1;
    for (std::size_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

} // namespace

TEST_CASE("degree quantiles form the empirical CDF") {
    KnowledgeGraph g;
    std::vector<NodeId> t;
    for (int i = 0; i < 5; ++i)
        t.push_back(g.add_node(NodeKind::title, "t", Modality::text, "p" + std::to_string(i)));
    NodeId a = g.add_node(NodeKind::datasets, "a", Modality::text, "p0");
    NodeId b = g.add_node(NodeKind::metrics, "b", Modality::text, "p0");
    NodeId c = g.add_node(NodeKind::results, "c", Modality::text, "p1");
    NodeId d = g.add_node(NodeKind::methodology, "d", Modality::text, "p0");
    g.add_edge(t[0], a);                                // degree 1
    g.add_edge(t[0], b);
    g.add_edge(t[1], b);                                // degree 2
    g.add_edge(t[1], c);
    g.add_edge(t[2], c);                                // degree 2
    for (NodeId ti : t) g.add_edge(ti, d);              // degree 5
    g.freeze();
    FrozenGraphView view(g);
    DegreeQuantiles dq(view);

    // sorted degrees: 1 2 2 5
    CHECK(dq.quantile(0) == doctest::Approx(0.0));
    CHECK(dq.quantile(1) == doctest::Approx(0.25));
    CHECK(dq.quantile(2) == doctest::Approx(0.75));
    CHECK(dq.quantile(4) == doctest::Approx(0.75));
    CHECK(dq.quantile(5) == doctest::Approx(1.0));
    CHECK(dq.quantile(99) == doctest::Approx(1.0));
}

TEST_CASE("five articles on one hub give exactly C(5,3) combinations") {
    HubFixture fix(5);
    fix.g.freeze();
    FrozenGraphView view(fix.g);
    auto res = enumerate_combinations(full_covisit(view), view, config(3, 100));
    CHECK(res.emitted == 10);
    CHECK(res.combos.size() == 10);
    CHECK(!res.capped);
    CHECK(res.skipped_groups == 0);
    CHECK(res.warning.empty());

    std::set<std::vector<std::string>> unique;
    for (const auto& c : res.combos) {
        CHECK(c.papers.size() == 3);
        unique.insert(c.paper_names);
        CHECK(c.shared_nodes == std::vector<NodeId>{fix.hub});
    }
    CHECK(unique.size() == 10);
}

TEST_CASE("the cap stops enumeration exactly") {
    HubFixture fix(10);
    fix.g.freeze();
    FrozenGraphView view(fix.g);
    auto res = enumerate_combinations(full_covisit(view), view, config(3, 5));
    CHECK(res.emitted == 5);
    CHECK(res.combos.size() == 5);
    CHECK(res.capped);
}

TEST_CASE("combination size larger than the article pool warns and yields nothing") {
    HubFixture fix(2);
    fix.g.freeze();
    FrozenGraphView view(fix.g);
    auto res = enumerate_combinations(full_covisit(view), view, config(3, 100));
    CHECK(res.combos.empty());
    CHECK(!res.warning.empty());
}

TEST_CASE("combination size below two is rejected") {
    HubFixture fix(3);
    fix.g.freeze();
    FrozenGraphView view(fix.g);
    CHECK_THROWS_AS(enumerate_combinations(full_covisit(view), view, config(1, 10)), WalkError);
}

TEST_CASE("an empty aggregate enumerates nothing") {
    HubFixture fix(5);
    fix.g.freeze();
    FrozenGraphView view(fix.g);
    PairAggregate empty;
    auto res = enumerate_combinations(empty, view, config(3, 100));
    CHECK(res.combos.empty());
    CHECK(!res.warning.empty());
}

TEST_CASE("oversized groups are skipped and reported") {
    HubFixture fix(6);
    fix.g.freeze();
    FrozenGraphView view(fix.g);

    SelectionConfig cfg = config(3, 1000);
    cfg.max_group_size = 5;
    auto res = enumerate_combinations(full_covisit(view), view, cfg);
    CHECK(res.combos.empty());
    CHECK(res.skipped_groups == 1);

    cfg.max_group_size = 0; // ceiling disabled
    auto all = enumerate_combinations(full_covisit(view), view, cfg);
    CHECK(all.combos.size() == choose(6, 3));
    CHECK(all.skipped_groups == 0);
}

TEST_CASE("identical subsets from different groups emit once") {
    HubFixture fix(3);
    NodeId second = fix.g.add_node(NodeKind::metrics, "also shared", Modality::text, "p00");
    for (NodeId t : fix.titles) fix.g.add_edge(t, second);
    fix.g.freeze();
    FrozenGraphView view(fix.g);

    auto res = enumerate_combinations(full_covisit(view), view, config(3, 100));
    CHECK(res.emitted == 1);
    REQUIRE(res.combos.size() == 1);
    // both hubs are shared by the single surviving combination
    CHECK(res.combos[0].shared_nodes == std::vector<NodeId>{fix.hub, second});
}

TEST_CASE("aggregate pairs without a graph edge are ignored") {
    HubFixture fix(2);
    NodeId stray = fix.g.add_node(NodeKind::title, "stray", Modality::text, "p99");
    NodeId leaf = fix.g.add_node(NodeKind::metrics, "leaf", Modality::text, "p99");
    fix.g.add_edge(stray, leaf); // keeps the stray article connected
    fix.g.freeze();
    FrozenGraphView view(fix.g);

    PairAggregate agg = full_covisit(view);
    agg.add_pair(view.row_of(stray), view.row_of(fix.hub), 5); // co-visited, not adjacent

    auto res = enumerate_combinations(agg, view, config(2, 100));
    REQUIRE(res.combos.size() == 1);
    CHECK(res.combos[0].paper_names == std::vector<std::string>{"p00", "p01"});
}

TEST_CASE("shared nodes are the key-info adjacent to at least two members") {
    KnowledgeGraph g;
    NodeId a = g.add_node(NodeKind::title, "ta", Modality::text, "pa");
    NodeId b = g.add_node(NodeKind::title, "tb", Modality::text, "pb");
    NodeId c = g.add_node(NodeKind::title, "tc", Modality::text, "pc");
    NodeId s1 = g.add_node(NodeKind::datasets, "s1", Modality::text, "pa");
    NodeId s2 = g.add_node(NodeKind::metrics, "s2", Modality::text, "pa");
    NodeId s3 = g.add_node(NodeKind::results, "s3", Modality::text, "pa");
    g.add_edge(a, s1);
    g.add_edge(b, s1); // s1: two members
    g.add_edge(a, s2);
    g.add_edge(b, s2);
    g.add_edge(c, s2); // s2: all three
    g.add_edge(a, s3); // s3: one member only
    g.freeze();
    FrozenGraphView view(g);

    auto res = enumerate_combinations(full_covisit(view), view, config(3, 10));
    REQUIRE(res.combos.size() == 1);
    const auto& combo = res.combos[0];
    CHECK(combo.shared_nodes == std::vector<NodeId>{s1, s2});

    // hand-computed score terms (this fixture uses unit weights):
    // key-info degrees 2,3,1 -> quantile(2)=2/3, quantile(3)=1
    CHECK(combo.breakdown.coverage == doctest::Approx(2.0 / 3.0 + 1.0));
    // two kinds among thirteen
    CHECK(combo.breakdown.diversity == doctest::Approx(2.0 / 13.0));
    // per-member shared fraction: a 2/3, b 2/2, c 1/1
    CHECK(combo.breakdown.consistency == doctest::Approx((2.0 / 3.0 + 1.0 + 1.0) / 3.0));
    CHECK(combo.breakdown.redundancy == doctest::Approx(0.0));
    CHECK(combo.score ==
          doctest::Approx(combo.breakdown.coverage + combo.breakdown.diversity +
                          combo.breakdown.consistency));
}

TEST_CASE("redundancy discounts shared nodes already used by higher-ranked combos") {
    HubFixture fix(4);
    fix.g.freeze();
    FrozenGraphView view(fix.g);
    auto [combos, report] =
        select_from_aggregate(full_covisit(view), view, config(3, 100), nullptr);
    REQUIRE(combos.size() == 4);

    // symmetric fixture: every combo shares exactly the hub, so the first
    // (lexicographically smallest) keeps redundancy 0 and the rest pay full
    CHECK(combos[0].paper_names == std::vector<std::string>{"p00", "p01", "p02"});
    CHECK(combos[0].breakdown.redundancy == doctest::Approx(0.0));
    for (std::size_t i = 1; i < 4; ++i) {
        CHECK(combos[i].breakdown.redundancy == doctest::Approx(1.0));
        CHECK(combos[i].score == doctest::Approx(combos[i].provisional - 0.5));
    }
    // ties resolve by paper names
    CHECK(combos[1].paper_names < combos[2].paper_names);
    CHECK(combos[2].paper_names < combos[3].paper_names);
}

TEST_CASE("zero weights zero every total without disturbing the breakdown") {
    HubFixture fix(5);
    fix.g.freeze();
    FrozenGraphView view(fix.g);
    SelectionConfig cfg = config(3, 100);
    cfg.w_coverage = cfg.w_diversity = cfg.w_consistency = cfg.w_redundancy = 0.0;
    auto [combos, report] = select_from_aggregate(full_covisit(view), view, cfg, nullptr);
    REQUIRE(!combos.empty());
    for (const auto& c : combos) {
        CHECK(c.score == doctest::Approx(0.0));
        CHECK(c.breakdown.coverage > 0.0); // raw terms survive
    }
}

TEST_CASE("doubling the weights doubles the scores and keeps the order") {
    kgtest::SyntheticSpec spec;
    spec.articles = 40;
    spec.hubs = 4;
    spec.community = 50;
    spec.privates = 20;
    spec.hub_min_degree = 8;
    spec.hub_max_degree = 16;
    spec.seed = 2024;
    auto syn = kgtest::make_synthetic_graph(spec);
    ensure_high_frequency(syn.g, 0.9);
    syn.g.freeze();
    FrozenGraphView view(syn.g);
    PairAggregate agg = full_covisit(view);

    SelectionConfig base = config(3, 500);
    auto [c1, r1] = select_from_aggregate(agg, view, base, nullptr);
    SelectionConfig twice = base;
    twice.w_coverage *= 2;
    twice.w_diversity *= 2;
    twice.w_consistency *= 2;
    twice.w_redundancy *= 2;
    auto [c2, r2] = select_from_aggregate(agg, view, twice, nullptr);

    REQUIRE(!c1.empty());
    REQUIRE(c1.size() == c2.size());
    for (std::size_t i = 0; i < c1.size(); ++i) {
        CHECK(c2[i].paper_names == c1[i].paper_names);
        CHECK(c2[i].score == doctest::Approx(2.0 * c1[i].score));
    }
}

TEST_CASE("memory-capped enumeration evicts deterministically") {
    HubFixture fix(8); // 56 subsets of size 3
    fix.g.freeze();
    FrozenGraphView view(fix.g);
    SelectionConfig cfg = config(3, 1000);
    cfg.max_candidate_memory = 4096;

    auto a = enumerate_combinations(full_covisit(view), view, cfg);
    auto b = enumerate_combinations(full_covisit(view), view, cfg);
    CHECK(a.emitted == 56);
    CHECK(a.evicted > 0);
    CHECK(a.combos.size() == 56 - a.evicted);
    REQUIRE(a.combos.size() == b.combos.size());
    for (std::size_t i = 0; i < a.combos.size(); ++i)
        CHECK(a.combos[i].paper_names == b.combos[i].paper_names);
}

TEST_CASE("full pipeline produces a coherent report") {
    kgtest::SyntheticSpec spec;
    spec.articles = 30;
    spec.hubs = 3;
    spec.community = 40;
    spec.privates = 10;
    spec.hub_min_degree = 6;
    spec.hub_max_degree = 12;
    spec.seed = 5150;
    auto syn = kgtest::make_synthetic_graph(spec);
    ensure_high_frequency(syn.g, 0.9);
    syn.g.freeze();
    FrozenGraphView view(syn.g);

    WalkConfig wcfg;
    wcfg.walk_length = 20;
    wcfg.num_walks = 300;
    wcfg.seed = 9;
    auto [combos, report] = select_paper_sets(view, wcfg, config(3, 200));
    CHECK(report.unique_combinations == combos.size() + report.evicted_candidates);
    CHECK(std::is_sorted(combos.begin(), combos.end(),
                         [](const auto& x, const auto& y) { return x.score > y.score; }));
    double coverage_sum = 0.0;
    for (const auto& c : combos) coverage_sum += c.breakdown.coverage;
    CHECK(report.quality_score == doctest::Approx(coverage_sum));
    std::string text = report.to_text();
    CHECK(text.find("unique combinations") != std::string::npos);
    CHECK(text.find("enumeration capped") != std::string::npos);
}

TEST_CASE("combination files round-trip against their graph") {
    HubFixture fix(5);
    NodeId extra = fix.g.add_node(NodeKind::metrics, "metric", Modality::text, "p00");
    fix.g.add_edge(fix.titles[0], extra);
    fix.g.add_edge(fix.titles[1], extra);
    fix.g.freeze();
    FrozenGraphView view(fix.g);
    auto [combos, report] =
        select_from_aggregate(full_covisit(view), view, config(3, 100), nullptr);
    REQUIRE(!combos.empty());

    std::string text = combination_lines(combos, view);
    auto back = parse_combination_lines(text, fix.g);
    REQUIRE(back.size() == combos.size());
    for (std::size_t i = 0; i < combos.size(); ++i) {
        CHECK(back[i].paper_names == combos[i].paper_names);
        CHECK(back[i].papers == combos[i].papers);
        CHECK(back[i].shared_nodes == combos[i].shared_nodes);
        CHECK(back[i].score == doctest::Approx(combos[i].score));
        CHECK(back[i].breakdown.coverage == doctest::Approx(combos[i].breakdown.coverage));
        CHECK(back[i].breakdown.redundancy == doctest::Approx(combos[i].breakdown.redundancy));
    }

    SUBCASE("files referencing unknown papers are rejected") {
        std::string bad = R"({"papers":["nope","p00","p01"],"shared":[],"score":0,)"
                          R"("breakdown":{"coverage":0,"diversity":0,"consistency":0,"redundancy":0}})"
                          "\n";
        CHECK_THROWS_AS(parse_combination_lines(bad, fix.g), WalkError);
    }
    SUBCASE("kind mismatches are rejected") {
        std::string bad = R"({"papers":["p00","p01"],"shared":[{"node":)" +
                          std::to_string(fix.hub) +
                          R"(,"kind":"metrics"}],"score":0,)"
                          R"("breakdown":{"coverage":0,"diversity":0,"consistency":0,"redundancy":0}})"
                          "\n";
        CHECK_THROWS_AS(parse_combination_lines(bad, fix.g), WalkError);
    }
    SUBCASE("malformed lines are rejected with their line number") {
        try {
            parse_combination_lines("{oops\n", fix.g);
            FAIL("expected parse failure");
        } catch (const WalkError& e) {
            CHECK(std::string(e.what()).find("line 1") != std::string::npos);
        }
    }
}

TEST_CASE("select_from_aggregate forwards walk statistics when given") {
    HubFixture fix(4);
    fix.g.freeze();
    FrozenGraphView view(fix.g);
    WalkRunStats stats;
    stats.truncated_walks = 7;
    stats.wall_ms = 12.5;
    stats.warning = "synthetic warning";
    auto [combos, report] = select_from_aggregate(full_covisit(view), view, config(3, 10),
                                                  &stats);
    CHECK(report.truncated_walks == 7);
    CHECK(report.walk_ms == doctest::Approx(12.5));
    CHECK(report.warnings.find("synthetic warning") != std::string::npos);
}
