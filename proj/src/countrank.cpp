#include "synergy/countrank.hpp"

#include <algorithm>
#include <unordered_map>

#include "synergy/error.hpp"
#include "synergy/hypergeometric.hpp"

namespace synergy {

std::string_view to_string(Method method) {
    switch (method) {
        case Method::Hypergeometric: return "hypergeometric";
        case Method::CountNonNorm: return "count_nonnorm";
        case Method::CountNorm: return "count_norm";
        case Method::PagerankNonNorm: return "pagerank_nonnorm";
        case Method::PagerankNorm: return "pagerank_norm";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    for (auto m : kAllMethods)
        if (to_string(m) == name) return m;
    return std::nullopt;
}

Ratio r_pc(std::uint64_t n_pc, std::uint64_t n_total) {
    if (n_total == 0) throw Error(ErrorCode::ZeroTotal, "n_total is 0");
    return Ratio{n_pc, n_total};
}

std::vector<AuthorContribution> contributions(const MultilayerGraph& graph, MoleculeId m,
                                              bool include_self) {
    const auto related = graph.related_molecules(m, include_self);
    std::unordered_map<AuthorId, std::size_t> slot;
    std::vector<AuthorContribution> out;
    auto entry = [&](AuthorId a) -> AuthorContribution& {
        auto [it, fresh] = slot.emplace(a, out.size());
        if (fresh) {
            out.emplace_back();
            out.back().author = a;
            out.back().n_total = graph.author(a).n_total;
        }
        return out[it->second];
    };

    for (auto r : related) {
        for (auto p : graph.publications_of_molecule(r)) {
            for (auto a : graph.publication_authors(p)) {
                auto& c = entry(a);
                ++c.per_molecule[r];
                ++c.n_pc;
            }
        }
    }
    for (auto p : graph.publications_mentioning(related)) {
        for (auto a : graph.publication_authors(p)) ++entry(a).k_distinct;
    }
    std::sort(out.begin(), out.end(),
              [](const AuthorContribution& a, const AuthorContribution& b) { return a.author < b.author; });
    return out;
}

bool count_before(const AuthorContribution& a, std::string_view name_a, const AuthorContribution& b,
                  std::string_view name_b, bool normalized) {
    if (a.related_count() != b.related_count()) return a.related_count() > b.related_count();
    if (normalized) {
        const auto ord = a.normalized() <=> b.normalized();
        if (ord != 0) return ord > 0;
    } else if (a.n_pc != b.n_pc) {
        return a.n_pc > b.n_pc;
    }
    if (name_a != name_b) return name_a < name_b;
    return a.author < b.author;
}

RankedList rank_count(std::vector<AuthorContribution> contribs, bool normalized,
                      const AuthorNameLookup& names, MoleculeId query) {
    std::sort(contribs.begin(), contribs.end(), [&](const AuthorContribution& a, const AuthorContribution& b) {
        return count_before(a, names(a.author), b, names(b.author), normalized);
    });
    RankedList list{normalized ? Method::CountNorm : Method::CountNonNorm, query, {}};
    list.entries.reserve(contribs.size());
    for (auto& c : contribs) {
        const double score = normalized ? c.normalized().value() : static_cast<double>(c.n_pc);
        list.entries.push_back(RankedEntry{c.author, score, std::move(c)});
    }
    return list;
}

RankedList rank_count(const MultilayerGraph& graph, MoleculeId m, bool normalized, bool include_self) {
    return rank_count(contributions(graph, m, include_self), normalized,
                      [&](AuthorId a) -> std::string_view { return graph.author(a).canonical_name; }, m);
}

RankedList rank_hypergeometric(const MultilayerGraph& graph, MoleculeId m, bool include_self) {
    auto contribs = contributions(graph, m, include_self);
    const auto related = graph.related_molecules(m, include_self);
    HypergeomQuery q;
    q.population = graph.publication_count();
    q.successes = graph.publications_mentioning(related).size();
    LogFactorialTable lf(q.population);

    RankedList list{Method::Hypergeometric, m, {}};
    list.entries.reserve(contribs.size());
    for (auto& c : contribs) {
        q.sample = c.n_total;
        q.observed = c.k_distinct;
        const double p = hypergeom_sf(q, lf);
        list.entries.push_back(RankedEntry{c.author, p, std::move(c)});
    }
    std::sort(list.entries.begin(), list.entries.end(), [&](const RankedEntry& a, const RankedEntry& b) {
        if (a.score != b.score) return a.score < b.score;
        if (a.contribution.n_pc != b.contribution.n_pc) return a.contribution.n_pc > b.contribution.n_pc;
        const auto& na = graph.author(a.author).canonical_name;
        const auto& nb = graph.author(b.author).canonical_name;
        if (na != nb) return na < nb;
        return a.author < b.author;
    });
    return list;
}

}  // namespace synergy
