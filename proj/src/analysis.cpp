#include "synergy/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "synergy/error.hpp"
#include "synergy/hypergeometric.hpp"
#include "synergy/pagerank_store.hpp"
#include "synergy/random.hpp"

namespace synergy {

using nlohmann::json;

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw Error(ErrorCode::DegenerateInput, "series lengths differ");
    if (xs.size() < 2) throw Error(ErrorCode::DegenerateInput, "need at least two points");
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::DegenerateInput, "constant series");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CrossRank cross_rank(const RankedList& a, const RankedList& b, std::size_t top_t) {
    std::unordered_map<AuthorId, std::size_t> rank_b;
    for (std::size_t i = 0; i < b.entries.size(); ++i) rank_b.emplace(b.entries[i].author, i + 1);
    CrossRank out;
    const std::size_t t = std::min(top_t, a.entries.size());
    for (std::size_t i = 0; i < t; ++i) {
        auto it = rank_b.find(a.entries[i].author);
        if (it == rank_b.end())
            ++out.missing;
        else
            out.points.emplace_back(i + 1, it->second);
    }
    return out;
}

CorrelationReport correlate(const RankedList& a, const RankedList& b, std::size_t top_t) {
    CorrelationReport r;
    r.query = a.query;
    r.method_a = a.method;
    r.method_b = b.method;
    r.top_t = top_t;
    r.cross = cross_rank(a, b, top_t);

    std::vector<double> xs, ys;
    for (const auto& [ra, rb] : r.cross.points) {
        xs.push_back(static_cast<double>(ra));
        ys.push_back(static_cast<double>(rb));
    }
    try {
        r.pearson_r = pearson(xs, ys);
    } catch (const Error&) {
        r.pearson_r = std::numeric_limits<double>::quiet_NaN();
    }

    std::unordered_set<AuthorId> top_a, both;
    for (std::size_t i = 0; i < std::min(top_t, a.entries.size()); ++i) top_a.insert(a.entries[i].author);
    std::size_t union_size = top_a.size();
    for (std::size_t i = 0; i < std::min(top_t, b.entries.size()); ++i) {
        if (top_a.count(b.entries[i].author))
            both.insert(b.entries[i].author);
        else
            ++union_size;
    }
    r.jaccard = union_size ? static_cast<double>(both.size()) / static_cast<double>(union_size) : 0.0;
    return r;
}

std::vector<std::pair<std::size_t, std::uint32_t>> pubcount_curve(const RankedList& ranked, std::size_t top_t) {
    std::vector<std::pair<std::size_t, std::uint32_t>> out;
    for (std::size_t i = 0; i < std::min(top_t, ranked.entries.size()); ++i)
        out.emplace_back(i + 1, ranked.entries[i].contribution.n_pc);
    return out;
}

std::vector<MoleculeId> author_interests(const MultilayerGraph& graph, AuthorId a, std::size_t top_m) {
    std::map<MoleculeId, std::uint32_t> counts;
    for (auto p : graph.author_publications(a))
        for (auto m : graph.molecules_of_publication(p)) ++counts[m];
    std::vector<std::pair<MoleculeId, std::uint32_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [&](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        const auto& nx = graph.molecule(x.first).canonical_name;
        const auto& ny = graph.molecule(y.first).canonical_name;
        return nx != ny ? nx < ny : x.first < y.first;
    });
    std::vector<MoleculeId> out;
    for (std::size_t i = 0; i < std::min(top_m, ranked.size()); ++i) out.push_back(ranked[i].first);
    return out;
}

std::vector<AuthorId> top_coauthors(const MultilayerGraph& graph, AuthorId a, std::size_t top_c) {
    std::map<AuthorId, std::uint32_t> counts;
    for (auto p : graph.author_publications(a))
        for (auto other : graph.publication_authors(p))
            if (other != a) ++counts[other];
    std::vector<std::pair<AuthorId, std::uint32_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [&](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        const auto& nx = graph.author(x.first).canonical_name;
        const auto& ny = graph.author(y.first).canonical_name;
        return nx != ny ? nx < ny : x.first < y.first;
    });
    std::vector<AuthorId> out;
    for (std::size_t i = 0; i < std::min(top_c, ranked.size()); ++i) out.push_back(ranked[i].first);
    return out;
}

OddsRatio odds_ratio(const ContingencyTable& t) {
    double a = static_cast<double>(t.random_nonneighbor);
    double b = static_cast<double>(t.coauthor_nonneighbor);
    double c = static_cast<double>(t.random_neighbor);
    double d = static_cast<double>(t.coauthor_neighbor);
    OddsRatio r;
    if (a == 0 || b == 0 || c == 0 || d == 0) {
        a += 0.5;
        b += 0.5;
        c += 0.5;
        d += 0.5;
        r.haldane_corrected = true;
    }
    r.value = (d / b) / (c / a);
    return r;
}

double fisher_exact(const ContingencyTable& t) {
    const std::uint64_t row1 = t.random_nonneighbor + t.coauthor_nonneighbor;
    const std::uint64_t row2 = t.random_neighbor + t.coauthor_neighbor;
    const std::uint64_t col1 = t.random_nonneighbor + t.random_neighbor;
    const std::uint64_t col2 = t.coauthor_nonneighbor + t.coauthor_neighbor;
    if (row1 == 0 || row2 == 0 || col1 == 0 || col2 == 0)
        throw Error(ErrorCode::InvalidTable, "every margin must be positive");

    // Cell a given the margins is hypergeometric: population N, col1 successes, row1 draws.
    const HypergeomQuery q{row1 + row2, col1, row1, 0};
    LogFactorialTable lf(q.population);
    const std::uint64_t lo = row1 > col2 ? row1 - col2 : 0;
    const std::uint64_t hi = std::min(row1, col1);
    const double observed = hypergeom_log_pmf(q, t.random_nonneighbor, lf);
    // Same relative slack R uses so ties that differ only by rounding are included.
    const double cutoff = observed + 1e-7;

    std::vector<double> kept;
    double max_term = -std::numeric_limits<double>::infinity();
    for (std::uint64_t i = lo; i <= hi; ++i) {
        const double lp = hypergeom_log_pmf(q, i, lf);
        if (lp <= cutoff) {
            kept.push_back(lp);
            max_term = std::max(max_term, lp);
        }
    }
    double sum = 0.0;
    for (double lp : kept) sum += std::exp(lp - max_term);
    return std::clamp(std::exp(max_term + std::log(sum)), 0.0, 1.0);
}

double chi_square_p(const ContingencyTable& t) {
    const double a = static_cast<double>(t.random_nonneighbor), b = static_cast<double>(t.coauthor_nonneighbor);
    const double c = static_cast<double>(t.random_neighbor), d = static_cast<double>(t.coauthor_neighbor);
    const double n = a + b + c + d;
    const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
    if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0)
        throw Error(ErrorCode::InvalidTable, "every margin must be positive");
    const double diff = a * d - b * c;
    const double chi2 = n * (diff / r1) * (diff / r2) / c1 / c2;
    return std::erfc(std::sqrt(chi2 / 2.0));
}

SignificanceResult significance(const ContingencyTable& t) {
    const std::uint64_t margins[] = {t.random_nonneighbor + t.coauthor_nonneighbor,
                                     t.random_neighbor + t.coauthor_neighbor,
                                     t.random_nonneighbor + t.random_neighbor,
                                     t.coauthor_nonneighbor + t.coauthor_neighbor};
    if (std::any_of(std::begin(margins), std::end(margins),
                    [](std::uint64_t m) { return m > kChiSquareMarginThreshold; }))
        return {chi_square_p(t), true};
    return {fisher_exact(t), false};
}

ValidationResult validation_experiment(const MultilayerGraph& graph, const ValidationConfig& cfg) {
    ValidationResult result;
    Xoshiro256 rng(cfg.seed);

    std::vector<MoleculeId> all_molecules;
    for (const auto& m : graph.molecules()) all_molecules.push_back(m.id);
    result.sampled_molecules = sample_without_replacement(std::move(all_molecules), cfg.n_molecules, rng);
    result.molecules_sampled = result.sampled_molecules.size();
    if (result.molecules_sampled < 2) throw Error(ErrorCode::InsufficientData, "fewer than two molecules");

    const auto& ms = result.sampled_molecules;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        for (std::size_t j = i + 1; j < ms.size(); ++j) {
            if (graph.interacts(ms[i], ms[j]))
                ++result.table.random_neighbor;
            else
                ++result.table.random_nonneighbor;
        }
    }

    std::vector<AuthorId> qualifying;
    for (const auto& a : graph.authors())
        if (a.n_total >= cfg.min_pubs) qualifying.push_back(a.id);
    if (qualifying.empty())
        throw Error(ErrorCode::InsufficientData,
                    "no author with at least " + std::to_string(cfg.min_pubs) + " publications");
    result.sampled_authors = sample_without_replacement(std::move(qualifying), cfg.n_authors, rng);
    result.authors_sampled = result.sampled_authors.size();
    result.scaled_down = result.molecules_sampled < cfg.n_molecules || result.authors_sampled < cfg.n_authors;

    for (auto author : result.sampled_authors) {
        const auto mine = author_interests(graph, author, cfg.top_interests);
        for (auto coauthor : top_coauthors(graph, author, cfg.top_coauthors)) {
            const auto theirs = author_interests(graph, coauthor, cfg.top_interests);
            auto shared = [](const std::vector<MoleculeId>& v, MoleculeId m) {
                return std::find(v.begin(), v.end(), m) != v.end();
            };
            for (auto x : mine) {
                if (shared(theirs, x)) continue;
                for (auto y : theirs) {
                    if (shared(mine, y)) continue;
                    if (graph.interacts(x, y))
                        ++result.table.coauthor_neighbor;
                    else
                        ++result.table.coauthor_nonneighbor;
                }
            }
        }
    }

    const auto& t = result.table;
    if (t.random_neighbor + t.coauthor_neighbor == 0)
        throw Error(ErrorCode::InsufficientData, "no neighbouring molecule pairs; odds ratio undefined");
    if (t.coauthor_neighbor + t.coauthor_nonneighbor == 0)
        throw Error(ErrorCode::InsufficientData, "no coauthor-derived molecule pairs");
    result.odds = odds_ratio(t);
    result.significance = significance(t);
    return result;
}

std::string TimedMethod::label() const {
    std::string out(to_string(method));
    if (is_pagerank(method)) out += precomputed ? "_cached" : "_cold";
    return out;
}

std::vector<TimingStats> timing_harness(const MultilayerGraph& graph, std::span<const MoleculeId> molecules,
                                        std::span<const TimedMethod> methods, std::size_t repetitions,
                                        const PagerankConfig& cfg) {
    std::vector<TimingStats> out;
    if (repetitions == 0 || molecules.empty()) return out;

    PagerankStore store;
    const bool need_store = std::any_of(methods.begin(), methods.end(),
                                        [](const TimedMethod& t) { return t.precomputed && is_pagerank(t.method); });
    if (need_store) store.precompute(graph, molecules, kAllVariants, cfg);

    for (const auto& tm : methods) {
        const PagerankStore* source = tm.precomputed && is_pagerank(tm.method) ? &store : nullptr;
        std::vector<double> samples;
        for (std::size_t rep = 0; rep < repetitions; ++rep) {
            for (auto m : molecules) {
                const auto start = std::chrono::steady_clock::now();
                const auto list = rank_authors(graph, m, tm.method, cfg, source);
                const auto stop = std::chrono::steady_clock::now();
                samples.push_back(std::chrono::duration<double>(stop - start).count());
            }
        }
        TimingStats s{tm.label(), samples.size(), 0.0, 0.0};
        for (double v : samples) s.mean_s += v;
        s.mean_s /= static_cast<double>(samples.size());
        for (double v : samples) s.var_s += (v - s.mean_s) * (v - s.mean_s);
        s.var_s = samples.size() > 1 ? s.var_s / static_cast<double>(samples.size() - 1) : 0.0;
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    return out;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void write_cross_rank_csv(const std::filesystem::path& path, const CrossRank& cross) {
    auto out = open_output(path);
    out << "rank_a,rank_b\n";
    for (const auto& [a, b] : cross.points) out << a << ',' << b << '\n';
}

void write_curve_csv(const std::filesystem::path& path,
                     const std::vector<std::pair<std::size_t, std::uint32_t>>& curve) {
    auto out = open_output(path);
    out << "rank,n_pc\n";
    for (const auto& [rank, n] : curve) out << rank << ',' << n << '\n';
}

void write_timing_csv(const std::filesystem::path& path, const std::vector<TimingStats>& stats) {
    auto out = open_output(path);
    out << "method,mean_s,var_s\n";
    out.precision(9);
    for (const auto& s : stats) out << s.label << ',' << s.mean_s << ',' << s.var_s << '\n';
}

RankCompareOutput rank_compare(const MultilayerGraph& graph, MoleculeId m, std::size_t top_t,
                               const std::filesystem::path& out_dir, const PagerankConfig& cfg,
                               const PagerankStore* store) {
    if (top_t == 0) throw Error(ErrorCode::InvalidArgument, "top_t must be positive");
    std::filesystem::create_directories(out_dir);
    const std::string name = graph.molecule(m).canonical_name;

    const auto nonnorm = rank_authors(graph, m, Method::CountNonNorm, cfg, store);
    const auto hyper = rank_authors(graph, m, Method::Hypergeometric, cfg, store);
    const auto norm = rank_authors(graph, m, Method::CountNorm, cfg, store);
    const auto pr = rank_authors(graph, m, Method::PagerankNonNorm, cfg, store);
    const auto pr_norm = rank_authors(graph, m, Method::PagerankNorm, cfg, store);

    RankCompareOutput out;
    json correlations = json::array();
    for (const auto& [a, b] : {std::pair{&nonnorm, &hyper}, std::pair{&nonnorm, &norm}, std::pair{&pr, &pr_norm}}) {
        auto report = correlate(*a, *b, top_t);
        const auto path = out_dir / (name + "_" + std::string(to_string(a->method)) + "_vs_" +
                                     std::string(to_string(b->method)) + ".csv");
        write_cross_rank_csv(path, report.cross);
        out.files.push_back(path);
        correlations.push_back({{"method_a", to_string(report.method_a)},
                                {"method_b", to_string(report.method_b)},
                                {"top_t", top_t},
                                {"points", report.cross.points.size()},
                                {"missing", report.cross.missing},
                                {"pearson_r", number_or_null(report.pearson_r)},
                                {"jaccard", report.jaccard}});
        out.reports.push_back(std::move(report));
    }
    for (const auto* list : {&pr, &pr_norm}) {
        const auto path = out_dir / (name + "_" + std::string(to_string(list->method)) + "_curve.csv");
        write_curve_csv(path, pubcount_curve(*list, top_t));
        out.files.push_back(path);
    }

    const json summary = {{"molecule", name}, {"top_t", top_t}, {"correlations", correlations}};
    const auto summary_path = out_dir / (name + "_correlations.json");
    open_output(summary_path) << summary.dump(2) << '\n';
    out.files.push_back(summary_path);
    return out;
}

std::string validation_json(const ValidationResult& r) {
    const json obj = {
        {"table",
         {{"random_nonneighbor", r.table.random_nonneighbor},
          {"coauthor_nonneighbor", r.table.coauthor_nonneighbor},
          {"random_neighbor", r.table.random_neighbor},
          {"coauthor_neighbor", r.table.coauthor_neighbor}}},
        {"odds_ratio", number_or_null(r.odds.value)},
        {"haldane_corrected", r.odds.haldane_corrected},
        {"p_value", r.significance.p_value},
        {"test", r.significance.chi_square ? "chi_square" : "fisher_exact"},
        {"scaled_down", r.scaled_down},
        {"molecules_sampled", r.molecules_sampled},
        {"authors_sampled", r.authors_sampled}};
    return obj.dump(2);
}

}  // namespace synergy
