#include <doctest.h>

#include <random>
#include <thread>

#include "oracles.hpp"
#include "support.hpp"
#include "synergy/analysis.hpp"
#include "synergy/error.hpp"
#include "synergy/pagerank_store.hpp"
#include "synergy/pathrank.hpp"

using namespace synergy;

namespace {

CoauthorSubnetwork random_net(std::mt19937& rng, Variant variant) {
    CoauthorSubnetwork net;
    net.variant = variant;
    const std::uint32_t n = 1 + rng() % 10;
    std::vector<std::uint32_t> totals;
    for (std::uint32_t i = 0; i < n; ++i) {
        net.nodes.push_back(AuthorId(i * 3 + 1));
        totals.push_back(1 + rng() % 20);
    }
    const double density = (rng() % 100) / 100.0;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::uint32_t x = 0; x < n; ++x)
        for (std::uint32_t y = x + 1; y < n; ++y)
            if (u(rng) < density) {
                const std::uint32_t m = 1 + rng() % 5;
                const double w = variant == Variant::Normalized
                                     ? normalized_collaboration_weight(m, std::max(m, totals[x]), std::max(m, totals[y]))
                                     : m;
                net.edges.push_back({net.nodes[x], net.nodes[y], m, w});
            }
    return net;
}

/// Full pair enumeration without the per-molecule cutoff.
std::map<std::pair<AuthorId, AuthorId>, std::uint32_t> brute_pairs(const MultilayerGraph& g, MoleculeId m) {
    std::map<std::pair<AuthorId, AuthorId>, std::set<PublicationId>> pubs;
    const auto related = g.related_molecules(m);
    for (const auto& p : g.publications()) {
        bool hit = false;
        for (auto r : related)
            for (auto pm : g.molecules_of_publication(p.id)) hit |= (pm == r);
        if (!hit) continue;
        const auto authors = g.publication_authors(p.id);
        for (auto a : authors)
            for (auto b : authors)
                if (a < b) pubs[{a, b}].insert(p.id);
    }
    std::map<std::pair<AuthorId, AuthorId>, std::uint32_t> out;
    for (const auto& [k, v] : pubs) out[k] = static_cast<std::uint32_t>(v.size());
    return out;
}

}  // namespace

TEST_SUITE("pathrank") {

TEST_CASE("collaboration weight formula") {
    CHECK(normalized_collaboration_weight(1, 1, 1) == 1.0);
    CHECK(normalized_collaboration_weight(3, 9, 4) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normalized_collaboration_weight(2, 4, 1) == 1.0);
    CHECK_THROWS_AS(normalized_collaboration_weight(1, 0, 3), Error);
}

TEST_CASE("Fixture F1 subnetworks") {
    const auto g = testing::fixture_f1();
    const auto q = *g.find_molecule("Q");
    const auto nonnorm = build_subnetwork(g, q, Variant::NonNormalized);
    CHECK(nonnorm.nodes.size() == 2);
    REQUIRE(nonnorm.edges.size() == 1);
    CHECK(nonnorm.edges[0].m_xy == 1);
    CHECK(nonnorm.edges[0].weight == 1.0);
    CHECK(nonnorm.built_at_revision == g.revision());

    const auto norm = build_subnetwork(g, q, Variant::Normalized);
    REQUIRE(norm.edges.size() == 1);
    CHECK(norm.edges[0].weight == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
    CHECK(norm.edges[0].weight == doctest::Approx(0.40825).epsilon(1e-5));

    CHECK(build_subnetwork(g, *g.find_molecule("M3"), Variant::NonNormalized).nodes.empty());
}

TEST_CASE("Fixture F1 PageRank ties resolve by name") {
    const auto g = testing::fixture_f1();
    const auto q = *g.find_molecule("Q");
    for (auto v : kAllVariants) {
        const auto r = rank_pagerank(g, q, v);
        REQUIRE(r.entries.size() == 2);
        CHECK(g.author(r.entries[0].author).canonical_name == "A1");
        CHECK(r.entries[0].score == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(r.entries[1].score == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(r.entries[0].contribution.n_pc == 3);
    }
    CHECK(rank_pagerank(g, *g.find_molecule("M3"), Variant::Normalized).entries.empty());
}

TEST_CASE("subnetwork edges agree with full pair enumeration when nothing is cut") {
    const auto& g = *testing::bundled();
    for (const auto* name : {testing::kHub, "GYC5", "IMZ14"}) {
        const auto m = *g.find_molecule(name);
        PagerankConfig cfg;
        cfg.top_pairs_per_molecule = 1'000'000;
        const auto net = build_subnetwork(g, m, Variant::NonNormalized, cfg);
        const auto expected = brute_pairs(g, m);
        REQUIRE(net.edges.size() == expected.size());
        for (const auto& e : net.edges) {
            CHECK(e.x < e.y);
            CHECK(expected.at({e.x, e.y}) == e.m_xy);
            CHECK(e.weight == e.m_xy);
        }
        const auto contribs = contributions(g, m);
        CHECK(net.nodes.size() == contribs.size());
        const auto norm = build_subnetwork(g, m, Variant::Normalized, cfg);
        for (std::size_t i = 0; i < norm.edges.size(); ++i) {
            const auto& e = norm.edges[i];
            CHECK(e.weight <= e.m_xy);
            CHECK(e.weight == doctest::Approx(e.m_xy / std::sqrt(double(g.author(e.x).n_total) * g.author(e.y).n_total)));
        }
    }
}

TEST_CASE("per-molecule pair cutoff keeps ties at the boundary") {
    MultilayerGraph g;
    const auto q = g.upsert_molecule("Q");
    const auto r = g.upsert_molecule("R");
    g.add_interaction(q, r);
    auto pub = [&](const std::string& id, std::vector<std::string> authors) {
        std::vector<AuthorName> names;
        for (auto& a : authors) names.push_back({a, {}});
        const auto p = g.upsert_publication({{}, id, id, "", {}, std::nullopt}, names);
        g.add_mention(p, r);
    };
    pub("1", {"A", "B"});
    pub("2", {"A", "B"});
    pub("3", {"C", "D"});
    pub("4", {"E", "F"});
    PagerankConfig cfg;
    cfg.top_pairs_per_molecule = 1;
    CHECK(build_subnetwork(g, q, Variant::NonNormalized, cfg).edges.size() == 1);
    cfg.top_pairs_per_molecule = 2;
    // C-D and E-F tie for second place; both stay.
    CHECK(build_subnetwork(g, q, Variant::NonNormalized, cfg).edges.size() == 3);
    CHECK(build_subnetwork(g, q, Variant::NonNormalized, cfg).nodes.size() == 6);
}

TEST_CASE("PageRank closed forms") {
    auto net = [](std::size_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
        CoauthorSubnetwork s;
        for (std::uint32_t i = 0; i < n; ++i) s.nodes.push_back(AuthorId(i));
        for (auto [x, y] : edges) s.edges.push_back({AuthorId(x), AuthorId(y), 1, 1.0});
        return s;
    };
    const auto two = pagerank(net(2, {{0, 1}}));
    CHECK(two.scores[0].second == doctest::Approx(0.5).epsilon(1e-12));
    const auto tri = pagerank(net(3, {{0, 1}, {0, 2}, {1, 2}}));
    for (const auto& [a, s] : tri.scores) CHECK(s == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    const auto path = pagerank(net(3, {{0, 1}, {1, 2}}));
    CHECK(std::abs(path.scores[0].second - 0.256757) <= 1e-6);
    CHECK(std::abs(path.scores[1].second - 0.486486) <= 1e-6);
    CHECK(std::abs(path.scores[2].second - 0.256757) <= 1e-6);
    // Bipartite graphs oscillate at rate d, so the default cap stops just short of 1e-9.
    CHECK_FALSE(path.converged);
    CHECK(path.iterations == 100);
    PagerankConfig longer;
    longer.max_iterations = 1000;
    CHECK(pagerank(net(3, {{0, 1}, {1, 2}}), longer).converged);

    const auto lonely = pagerank(net(3, {}));
    for (const auto& [a, s] : lonely.scores) CHECK(s == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    CHECK_THROWS_AS(pagerank(CoauthorSubnetwork{}), Error);
    PagerankConfig bad;
    bad.damping = 1.0;
    CHECK_THROWS_AS(pagerank(net(2, {{0, 1}}), bad), Error);
}

TEST_CASE("PageRank matches a dense stationary solve on random small graphs") {
    std::mt19937 rng(2024);
    PagerankConfig cfg;
    cfg.max_iterations = 1000;
    double worst = 0.0, worst_sum = 0.0;
    for (int i = 0; i < 200; ++i) {
        for (auto v : kAllVariants) {
            const auto net = random_net(rng, v);
            const auto got = pagerank(net, cfg);
            CHECK(got.converged);
            const auto want = oracle::pagerank(net, 0.85);
            double sum = 0.0;
            for (std::size_t k = 0; k < want.size(); ++k) {
                worst = std::max(worst, std::abs(got.scores[k].second - want[k]));
                sum += got.scores[k].second;
            }
            worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        }
    }
    CHECK(worst <= 1e-8);
    CHECK(worst_sum <= 1e-10);
}

TEST_CASE("scaling all weights leaves scores unchanged") {
    std::mt19937 rng(8);
    for (int i = 0; i < 50; ++i) {
        auto net = random_net(rng, Variant::Normalized);
        auto scaled = net;
        for (auto& e : scaled.edges) e.weight *= 7.5;
        const auto a = pagerank(net), b = pagerank(scaled);
        for (std::size_t k = 0; k < a.scores.size(); ++k)
            CHECK(a.scores[k].second == doctest::Approx(b.scores[k].second).epsilon(1e-9));
    }
}

TEST_CASE("personalised teleport shifts mass toward the chosen nodes") {
    CoauthorSubnetwork s;
    for (std::uint32_t i = 0; i < 4; ++i) s.nodes.push_back(AuthorId(i));
    s.edges = {{AuthorId(0), AuthorId(1), 1, 1.0}, {AuthorId(1), AuthorId(2), 1, 1.0}, {AuthorId(2), AuthorId(3), 1, 1.0}};
    PagerankConfig cfg;
    const auto uniform = pagerank(s, cfg);
    cfg.personalization = {{AuthorId(0), 1.0}};
    const auto biased = pagerank(s, cfg);
    CHECK(biased.scores[0].second > uniform.scores[0].second);
    double sum = 0;
    for (const auto& [a, v] : biased.scores) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rank_pagerank is deterministic and sorted") {
    const auto& g = *testing::bundled();
    const auto hub = *g.find_molecule(testing::kHub);
    const auto a = rank_pagerank(g, hub, Variant::Normalized);
    const auto b = rank_pagerank(g, hub, Variant::Normalized);
    CHECK(a == b);
    for (std::size_t i = 1; i < a.entries.size(); ++i) CHECK(a.entries[i - 1].score >= a.entries[i].score);
    double sum = 0;
    for (const auto& e : a.entries) sum += e.score;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("normalised and non-normalised PageRank agree on membership, not order") {
    const auto& g = *testing::bundled();
    const auto hub = *g.find_molecule(testing::kHub);
    const auto nonnorm = rank_pagerank(g, hub, Variant::NonNormalized);
    const auto norm = rank_pagerank(g, hub, Variant::Normalized);
    const auto report = correlate(nonnorm, norm, 120);
    CHECK(report.jaccard >= 0.5);
    std::vector<AuthorId> top_a, top_b;
    for (std::size_t i = 0; i < 120; ++i) {
        top_a.push_back(nonnorm.entries[i].author);
        top_b.push_back(norm.entries[i].author);
    }
    CHECK(top_a != top_b);
}

TEST_CASE("precompute store: hits, idempotence, invalidation and persistence") {
    auto g = testing::fixture_f1();
    const auto q = *g.find_molecule("Q");
    const std::vector<MoleculeId> just_q{q};
    PagerankStore store;

    CHECK(store.precompute(g, {}, kAllVariants).stored == 0);
    const auto first = store.precompute(g, just_q, kAllVariants);
    CHECK(first.stored == 2);
    const auto second = store.precompute(g, just_q, kAllVariants);
    CHECK(second.stored == 0);
    CHECK(second.skipped == 2);

    for (auto v : kAllVariants) {
        REQUIRE(store.lookup(q, v, g.revision()));
        CHECK(rank_pagerank(g, q, v, {}, &store) == rank_pagerank(g, q, v));
    }

    const auto dir = testing::scratch("pathrank_store");
    store.save(dir / "pagerank.cache");
    const auto loaded = PagerankStore::load(dir / "pagerank.cache");
    CHECK(loaded.size() == 2);
    CHECK(*loaded.lookup(q, Variant::Normalized, g.revision()) == *store.lookup(q, Variant::Normalized, g.revision()));
    CHECK(PagerankStore::load(dir / "missing.cache").size() == 0);

    const auto old_rev = g.revision();
    g.upsert_molecule("M4");
    g.add_interaction(q, *g.find_molecule("M4"));
    CHECK(g.revision() != old_rev);
    CHECK_FALSE(store.lookup(q, Variant::Normalized, g.revision()));
    const auto all = std::vector<MoleculeId>{q, *g.find_molecule("M1"), *g.find_molecule("M2"),
                                              *g.find_molecule("M3"), *g.find_molecule("M4")};
    const auto redo = store.precompute(g, all, kAllVariants);
    CHECK(redo.stored == 8);
    CHECK(redo.empty == 1);
    CHECK(store.size() == 8);
    CHECK_FALSE(store.lookup(q, Variant::Normalized, old_rev));
}

TEST_CASE("persisted scores round-trip bit for bit on the bundled corpus") {
    const auto& g = *testing::bundled();
    std::vector<MoleculeId> all;
    for (const auto& m : g.molecules()) all.push_back(m.id);
    const auto path = testing::scratch("pathrank_persist") / "pagerank.cache";
    const auto stats = precompute(g, all, kAllVariants, {}, path);
    CHECK(stats.stored + 2 * stats.empty == 2 * all.size());
    const auto store = PagerankStore::load(path);
    for (auto m : all)
        for (auto v : kAllVariants)
            if (auto hit = store.lookup(m, v, g.revision())) CHECK(rank_pagerank(g, m, v, {}, &store) == rank_pagerank(g, m, v));
    CHECK(precompute(g, all, kAllVariants, {}, path).stored == 0);
}

TEST_CASE("store supports concurrent readers during precompute") {
    const auto& g = *testing::bundled();
    std::vector<MoleculeId> all;
    for (const auto& m : g.molecules()) all.push_back(m.id);
    PagerankStore store;
    std::atomic<bool> done{false};
    std::thread reader([&] {
        while (!done) {
            for (auto m : all) {
                if (auto hit = store.lookup(m, Variant::NonNormalized, g.revision())) CHECK(!hit->empty());
            }
        }
    });
    store.precompute(g, all, kAllVariants);
    done = true;
    reader.join();
    CHECK(store.size() > 0);
}

}
