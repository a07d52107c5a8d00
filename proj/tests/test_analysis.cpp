#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <map>
#include <random>
#include <set>

#include "oracles.hpp"
#include "support.hpp"
#include "synergy/analysis.hpp"
#include "synergy/error.hpp"
#include "synergy/graph.hpp"
#include "synergy/pagerank_store.hpp"

using namespace synergy;
using nlohmann::json;

namespace {

RankedList ranked(std::initializer_list<std::uint32_t> ids) {
    RankedList r;
    for (auto id : ids) {
        RankedEntry e;
        e.author = AuthorId(id);
        r.entries.push_back(e);
    }
    return r;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected synergy::Error");
    return ErrorCode::InvalidArgument;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Top interests recomputed from the raw authorship and mention layers.
std::vector<MoleculeId> interests_by_hand(const MultilayerGraph& g, AuthorId a, std::size_t top) {
    std::map<MoleculeId, int> counts;
    for (auto p : g.author_publications(a))
        for (auto m : g.molecules_of_publication(p)) ++counts[m];
    std::vector<std::pair<MoleculeId, int>> v(counts.begin(), counts.end());
    std::sort(v.begin(), v.end(), [&](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return g.molecule(x.first).canonical_name < g.molecule(y.first).canonical_name;
    });
    std::vector<MoleculeId> out;
    for (std::size_t i = 0; i < v.size() && i < top; ++i) out.push_back(v[i].first);
    return out;
}

std::vector<AuthorId> coauthors_by_hand(const MultilayerGraph& g, AuthorId a, std::size_t top) {
    std::map<AuthorId, int> counts;
    for (auto p : g.author_publications(a))
        for (auto b : g.publication_authors(p))
            if (b != a) ++counts[b];
    std::vector<std::pair<AuthorId, int>> v(counts.begin(), counts.end());
    std::sort(v.begin(), v.end(), [&](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return g.author(x.first).canonical_name < g.author(y.first).canonical_name;
    });
    std::vector<AuthorId> out;
    for (std::size_t i = 0; i < v.size() && i < top; ++i) out.push_back(v[i].first);
    return out;
}

/// Rebuilds the contingency table from the sampled molecules and authors.
ContingencyTable audit_table(const MultilayerGraph& g, const ValidationResult& r, const ValidationConfig& cfg) {
    std::set<std::pair<MoleculeId, MoleculeId>> edges;
    for (const auto& m : g.molecules())
        for (auto n : g.interaction_neighbors(m.id)) edges.insert({m.id, n});
    auto adjacent = [&](MoleculeId x, MoleculeId y) { return edges.count({x, y}) > 0; };

    ContingencyTable t;
    const auto& ms = r.sampled_molecules;
    for (std::size_t i = 0; i < ms.size(); ++i)
        for (std::size_t j = i + 1; j < ms.size(); ++j)
            (adjacent(ms[i], ms[j]) ? t.random_neighbor : t.random_nonneighbor)++;

    for (auto a : r.sampled_authors) {
        const auto mine = interests_by_hand(g, a, cfg.top_interests);
        const std::set<MoleculeId> mine_set(mine.begin(), mine.end());
        for (auto c : coauthors_by_hand(g, a, cfg.top_coauthors)) {
            const auto theirs = interests_by_hand(g, c, cfg.top_interests);
            const std::set<MoleculeId> theirs_set(theirs.begin(), theirs.end());
            for (auto x : mine_set) {
                if (theirs_set.count(x)) continue;
                for (auto y : theirs_set) {
                    if (mine_set.count(y)) continue;
                    (adjacent(x, y) ? t.coauthor_neighbor : t.coauthor_nonneighbor)++;
                }
            }
        }
    }
    return t;
}

double chi_square_by_hand(const ContingencyTable& t) {
    const double a = t.random_nonneighbor, b = t.coauthor_nonneighbor, c = t.random_neighbor,
                 d = t.coauthor_neighbor;
    const double n = a + b + c + d;
    const double x2 = n * (a * d - b * c) * (a * d - b * c) / ((a + b) * (c + d) * (a + c) * (b + d));
    return std::erfc(std::sqrt(x2 / 2.0));
}

}  // namespace

TEST_CASE("pearson matches known values and the textbook formula") {
    const std::vector<double> x{1, 2, 3, 4}, rev{4, 3, 2, 1};
    CHECK(pearson(x, x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pearson(x, rev) == doctest::Approx(-1.0).epsilon(1e-12));
    const std::vector<double> a{1, 2, 3}, b{1, 3, 2};
    CHECK(pearson(a, b) == doctest::Approx(0.5).epsilon(1e-12));

    std::mt19937_64 rng(3);
    std::normal_distribution<double> dist;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> u(20), v(20), w(20);
        for (int i = 0; i < 20; ++i) {
            u[i] = dist(rng);
            v[i] = dist(rng) + 0.3 * u[i];
            w[i] = 2.5 * u[i] + 7.0;
        }
        const double r = pearson(u, v);
        CHECK(std::abs(r - oracle::pearson(u, v)) <= 1e-12);
        CHECK(std::abs(r - pearson(v, u)) <= 1e-12);
        CHECK(std::abs(pearson(w, v) - r) <= 1e-12);
        CHECK(r >= -1.0);
        CHECK(r <= 1.0);
    }
}

TEST_CASE("pearson rejects degenerate input") {
    const std::vector<double> one{1}, two{1, 2}, three{1, 2, 3}, flat{5, 5, 5};
    CHECK(code_of([&] { pearson(one, one); }) == ErrorCode::DegenerateInput);
    CHECK(code_of([&] { pearson(two, three); }) == ErrorCode::DegenerateInput);
    CHECK(code_of([&] { pearson(flat, three); }) == ErrorCode::DegenerateInput);
}

TEST_CASE("cross_rank pairs ranks of shared authors") {
    const auto a = ranked({1, 2, 3}), b = ranked({2, 1, 3});
    const auto cr = cross_rank(a, b, 2);
    REQUIRE(cr.points.size() == 2);
    CHECK(cr.points[0] == std::pair<std::size_t, std::size_t>{1, 2});
    CHECK(cr.points[1] == std::pair<std::size_t, std::size_t>{2, 1});
    CHECK(cr.missing == 0);

    const auto same = cross_rank(a, a, 3);
    for (std::size_t i = 0; i < same.points.size(); ++i) CHECK(same.points[i].first == same.points[i].second);

    CHECK(cross_rank(a, b, 50).points.size() == 3);

    const auto partial = cross_rank(ranked({1, 2, 9}), b, 3);
    CHECK(partial.points.size() == 2);
    CHECK(partial.missing == 1);
}

TEST_CASE("correlate reports pearson and jaccard over the top-t") {
    const auto a = ranked({1, 2, 3, 4}), b = ranked({1, 2, 3, 4});
    const auto same = correlate(a, b, 4);
    CHECK(same.pearson_r == doctest::Approx(1.0));
    CHECK(same.jaccard == doctest::Approx(1.0));

    const auto half = correlate(ranked({1, 2}), ranked({2, 3}), 2);
    CHECK(half.jaccard == doctest::Approx(1.0 / 3.0));
    CHECK(std::isnan(half.pearson_r));
}

TEST_CASE("pubcount_curve on the small fixture") {
    CHECK(pubcount_curve(RankedList{}, 5).empty());
    const auto g = testing::fixture_f1();
    const auto list = rank_count(g, *g.find_molecule("Q"), false);
    const auto curve = pubcount_curve(list, 10);
    REQUIRE(curve.size() == 2);
    CHECK(curve[0] == std::pair<std::size_t, std::uint32_t>{1, 3});
    CHECK(curve[1] == std::pair<std::size_t, std::uint32_t>{2, 2});
}

TEST_CASE("author interests and coauthors on the small fixture") {
    const auto g = testing::fixture_f1();
    const auto a1 = *g.find_author("A1");
    const auto a2 = *g.find_author("A2");
    const std::vector<MoleculeId> expect{*g.find_molecule("M1"), *g.find_molecule("M2"), *g.find_molecule("M3")};
    CHECK(author_interests(g, a1, 5) == expect);
    CHECK(author_interests(g, a1, 1) == std::vector<MoleculeId>{expect[0]});
    CHECK(top_coauthors(g, a1, 5) == std::vector<AuthorId>{a2});
    CHECK(top_coauthors(g, a1, 0).empty());
}

TEST_CASE("interest and coauthor lists are prefix stable") {
    const auto g = testing::bundled();
    std::size_t checked = 0;
    for (const auto& a : g->authors()) {
        if (checked++ > 200) break;
        const auto full_i = author_interests(*g, a.id, 10);
        const auto full_c = top_coauthors(*g, a.id, 10);
        CHECK(full_i == interests_by_hand(*g, a.id, 10));
        CHECK(full_c == coauthors_by_hand(*g, a.id, 10));
        for (std::size_t m = 0; m <= 10; ++m) {
            const auto pi = author_interests(*g, a.id, m);
            CHECK(std::equal(pi.begin(), pi.end(), full_i.begin()));
            const auto pc = top_coauthors(*g, a.id, m);
            CHECK(std::equal(pc.begin(), pc.end(), full_c.begin()));
        }
    }
}

TEST_CASE("odds ratio known tables") {
    const ContingencyTable large{239670, 381, 10330, 287};
    const auto big = odds_ratio(large);
    CHECK(std::abs(big.value - 17.48) <= 0.01);
    CHECK_FALSE(big.haldane_corrected);
    CHECK(odds_ratio({1, 1, 1, 1}).value == doctest::Approx(1.0));
    CHECK(odds_ratio({10, 10, 10, 20}).value == doctest::Approx(2.0));

    const auto zero = odds_ratio({5, 0, 3, 4});
    CHECK(zero.haldane_corrected);
    CHECK(zero.value == doctest::Approx((4.5 / 0.5) / (3.5 / 5.5)));
}

TEST_CASE("odds ratio inverts when columns swap") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::uint64_t> cell(0, 500);
    for (int i = 0; i < 500; ++i) {
        const ContingencyTable t{cell(rng), cell(rng), cell(rng), cell(rng)};
        const double r = odds_ratio(t).value;
        const double s = odds_ratio(t.swap_columns()).value;
        CHECK(std::abs(r * s - 1.0) <= 1e-12);
    }
}

TEST_CASE("fisher exact known values") {
    CHECK(fisher_exact({1, 1, 1, 1}) == doctest::Approx(1.0));
    CHECK(fisher_exact({5, 0, 0, 5}) == doctest::Approx(2.0 / 252.0).epsilon(1e-12));
    const auto p = fisher_exact({239670, 381, 10330, 287});
    CHECK(p < 1e-15);
    CHECK(p >= 0.0);
    CHECK(code_of([] { fisher_exact({0, 0, 3, 4}); }) == ErrorCode::InvalidTable);
    CHECK(code_of([] { fisher_exact({0, 3, 0, 4}); }) == ErrorCode::InvalidTable);
}

TEST_CASE("fisher exact agrees with exact enumeration for every table up to 30") {
    std::size_t tables = 0;
    double worst = 0.0;
    for (unsigned n = 1; n <= 30; ++n)
        for (unsigned a = 0; a <= n; ++a)
            for (unsigned b = 0; a + b <= n; ++b)
                for (unsigned c = 0; a + b + c <= n; ++c) {
                    const unsigned d = n - a - b - c;
                    if (a + b == 0 || c + d == 0 || a + c == 0 || b + d == 0) continue;
                    const double got = fisher_exact({a, b, c, d});
                    const double want = oracle::fisher_exact(a, b, c, d);
                    worst = std::max(worst, std::abs(got - want));
                    ++tables;
                }
    CHECK(tables > 40000);
    CHECK(worst <= 1e-12);
}

TEST_CASE("significance falls back to chi-square for huge margins") {
    const ContingencyTable small{239670, 381, 10330, 287};
    CHECK_FALSE(significance(small).chi_square);

    const ContingencyTable huge{20'000'000, 4'000, 1'000'000, 600};
    const auto s = significance(huge);
    CHECK(s.chi_square);
    CHECK(s.p_value == doctest::Approx(chi_square_by_hand(huge)).epsilon(1e-9));
    CHECK(chi_square_p({30, 10, 10, 30}) == doctest::Approx(chi_square_by_hand({30, 10, 10, 30})).epsilon(1e-12));
}

TEST_CASE("validation is deterministic for a seed") {
    const auto g = testing::bundled();
    ValidationConfig cfg;
    const auto r1 = validation_experiment(*g, cfg);
    const auto r2 = validation_experiment(*g, cfg);
    CHECK(r1.table == r2.table);
    CHECK(r1.sampled_molecules == r2.sampled_molecules);
    CHECK(r1.sampled_authors == r2.sampled_authors);
    CHECK(validation_json(r1) == validation_json(r2));
    CHECK(r1.scaled_down);
    CHECK(r1.molecules_sampled == g->molecule_count());

    cfg.seed = 43;
    cfg.n_molecules = 40;
    const auto other = validation_experiment(*g, cfg);
    CHECK(other.molecules_sampled == 40);
}

TEST_CASE("validation matches the recorded seed-42 result") {
    const auto g = testing::bundled();
    const auto r = validation_experiment(*g, {});
    const auto golden = json::parse(read_file(testing::data_dir() / "golden" / "validation_seed42.json"));
    const auto got = json::parse(validation_json(r));
    CHECK(got["table"] == golden["table"]);
    CHECK(got["test"] == golden["test"]);
    CHECK(got["molecules_sampled"] == golden["molecules_sampled"]);
    CHECK(got["authors_sampled"] == golden["authors_sampled"]);
    CHECK(got["odds_ratio"].get<double>() == doctest::Approx(golden["odds_ratio"].get<double>()).epsilon(1e-12));
    CHECK(got["p_value"].get<double>() == doctest::Approx(golden["p_value"].get<double>()).epsilon(1e-9));
    CHECK(r.odds.value > 1.0);
    CHECK(r.significance.p_value < 0.05);
}

TEST_CASE("validation table survives an independent audit") {
    const auto g = testing::bundled();
    for (std::uint64_t seed : {42u, 7u, 99u}) {
        ValidationConfig cfg;
        cfg.seed = seed;
        cfg.n_molecules = 20;
        cfg.n_authors = 40;
        const auto r = validation_experiment(*g, cfg);
        CHECK(r.sampled_molecules.size() == 20);
        CHECK(std::set<MoleculeId>(r.sampled_molecules.begin(), r.sampled_molecules.end()).size() == 20);
        for (auto a : r.sampled_authors) CHECK(g->author(a).n_total >= cfg.min_pubs);
        CHECK(r.table.random_neighbor + r.table.random_nonneighbor == 190);
        CHECK(audit_table(*g, r, cfg) == r.table);
    }
    ValidationConfig full;
    const auto r = validation_experiment(*g, full);
    CHECK(audit_table(*g, r, full) == r.table);
}

TEST_CASE("validation without interactions has insufficient data") {
    MultilayerGraph g;
    const auto m1 = g.upsert_molecule("M1");
    const auto m2 = g.upsert_molecule("M2");
    PublicationNode p;
    p.pub_id = "1";
    const std::vector<AuthorName> authors{{"A", std::nullopt}, {"B", std::nullopt}};
    for (int i = 0; i < 6; ++i) {
        p.pub_id = std::to_string(i + 1);
        const auto id = g.upsert_publication(p, authors);
        g.add_mention(id, i % 2 ? m1 : m2);
    }
    ValidationConfig cfg;
    cfg.min_pubs = 1;
    CHECK(code_of([&] { validation_experiment(g, cfg); }) == ErrorCode::InsufficientData);

    cfg.min_pubs = 100;
    CHECK(code_of([&] { validation_experiment(g, cfg); }) == ErrorCode::InsufficientData);
}

TEST_CASE("timing harness orders the methods") {
    const auto g = testing::bundled();
    std::vector<MoleculeId> ms;
    for (const auto& m : g->molecules()) {
        if (ms.size() == 10) break;
        ms.push_back(m.id);
    }
    CHECK(timing_harness(*g, ms, std::vector<TimedMethod>{{Method::CountNonNorm, false}}, 0).empty());

    const std::vector<TimedMethod> methods{{Method::CountNonNorm, false},
                                           {Method::PagerankNonNorm, false},
                                           {Method::PagerankNonNorm, true}};
    const auto stats = timing_harness(*g, ms, methods, 5);
    REQUIRE(stats.size() == 3);
    CHECK(stats[0].label == "count_nonnorm");
    CHECK(stats[1].label == "pagerank_nonnorm_cold");
    CHECK(stats[2].label == "pagerank_nonnorm_cached");
    for (const auto& s : stats) {
        CHECK(s.samples == ms.size() * 5);
        CHECK(s.var_s >= 0.0);
    }
    CHECK(stats[0].mean_s < stats[1].mean_s);
    CHECK(stats[2].mean_s * 2.0 <= stats[1].mean_s);

    const auto dir = testing::scratch("timing");
    write_timing_csv(dir / "timing.csv", stats);
    const auto text = read_file(dir / "timing.csv");
    CHECK(text.find("pagerank_nonnorm_cached") != std::string::npos);
}

TEST_CASE("rank_compare writes scatter, curve and summary files") {
    const auto g = testing::bundled();
    const auto hub = *g->find_molecule(testing::kHub);
    const auto dir = testing::scratch("rank_compare");
    const auto out = rank_compare(*g, hub, 50, dir);
    CHECK(out.reports.size() == 3);
    CHECK(out.files.size() == 6);
    for (const auto& f : out.files) CHECK(std::filesystem::exists(f));
    CHECK(std::filesystem::exists(dir / "SYNQ1_count_nonnorm_vs_hypergeometric.csv"));
    CHECK(std::filesystem::exists(dir / "SYNQ1_correlations.json"));

    const auto summary = json::parse(read_file(dir / "SYNQ1_correlations.json"));
    CHECK(summary["correlations"].size() == 3);
    CHECK(summary["top_t"] == 50);
    for (const auto& rep : out.reports) {
        CHECK(rep.jaccard >= 0.0);
        CHECK(rep.jaccard <= 1.0);
        CHECK(rep.cross.points.size() + rep.cross.missing <= 50);
    }
    CHECK(code_of([&] { rank_compare(*g, hub, 0, dir); }) == ErrorCode::InvalidArgument);
}
