#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synergy/graph.hpp"

namespace synergy {

enum class Method { Hypergeometric, CountNonNorm, CountNorm, PagerankNonNorm, PagerankNorm };

inline constexpr Method kAllMethods[] = {Method::Hypergeometric, Method::CountNonNorm,
                                         Method::CountNorm, Method::PagerankNonNorm,
                                         Method::PagerankNorm};

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view name);
inline bool is_pagerank(Method m) { return m == Method::PagerankNonNorm || m == Method::PagerankNorm; }

/// Exact non-negative fraction; ordering compares by cross-multiplication.
struct Ratio {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
        return static_cast<unsigned __int128>(a.num) * b.den <=> static_cast<unsigned __int128>(b.num) * a.den;
    }
    friend bool operator==(const Ratio& a, const Ratio& b) { return (a <=> b) == 0; }
};

/// n_PC / n_TOTAL. Throws Error(ZeroTotal) when n_total is 0.
Ratio r_pc(std::uint64_t n_pc, std::uint64_t n_total);

/// One author's publications on the related molecules of a query.
struct AuthorContribution {
    AuthorId author;
    /// Publications per related molecule; a publication naming two related molecules counts for both.
    std::map<MoleculeId, std::uint32_t> per_molecule;
    /// Sum of per_molecule counts.
    std::uint32_t n_pc = 0;
    /// Distinct publications mentioning at least one related molecule.
    std::uint32_t k_distinct = 0;
    std::uint32_t n_total = 0;

    std::size_t related_count() const { return per_molecule.size(); }
    Ratio normalized() const { return r_pc(n_pc, n_total); }

    bool operator==(const AuthorContribution&) const = default;
};

struct RankedEntry {
    AuthorId author;
    /// n_PC, r_PC, p-value or PageRank score depending on the method.
    double score = 0.0;
    AuthorContribution contribution;

    bool operator==(const RankedEntry&) const = default;
};

struct RankedList {
    Method method = Method::CountNonNorm;
    MoleculeId query;
    std::vector<RankedEntry> entries;

    bool operator==(const RankedList&) const = default;
};

using AuthorNameLookup = std::function<std::string_view(AuthorId)>;

/// Merged per-author contributions over the related molecules of `m`, ascending by author id.
std::vector<AuthorContribution> contributions(const MultilayerGraph& graph, MoleculeId m,
                                              bool include_self = false);

/// Sorts by related-molecule count, then n_PC (or r_PC when `normalized`), then name, all
/// descending except the name. Author id settles identical names.
RankedList rank_count(std::vector<AuthorContribution> contribs, bool normalized,
                      const AuthorNameLookup& names, MoleculeId query = {});
RankedList rank_count(const MultilayerGraph& graph, MoleculeId m, bool normalized,
                      bool include_self = false);

/// Ascending p = P(X >= k_distinct) with N = all publications, K = distinct publications on the
/// related molecules, n = author's n_total. Ties by n_PC descending, then name.
RankedList rank_hypergeometric(const MultilayerGraph& graph, MoleculeId m, bool include_self = false);

/// Strict-weak-order predicate used by rank_count, exposed for property tests.
bool count_before(const AuthorContribution& a, std::string_view name_a, const AuthorContribution& b,
                  std::string_view name_b, bool normalized);

}  // namespace synergy
