#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "synergy/countrank.hpp"
#include "synergy/graph.hpp"
#include "synergy/pathrank.hpp"

namespace synergy {

class PagerankStore;

// --- rank comparison ---------------------------------------------------------------------------

/// Throws Error(DegenerateInput) for mismatched lengths, fewer than two points or a constant series.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct CrossRank {
    /// 1-based (rank in A, rank in B) for A's top-t authors found in B, in A's order.
    std::vector<std::pair<std::size_t, std::size_t>> points;
    /// A's top-t authors absent from B.
    std::size_t missing = 0;
};

CrossRank cross_rank(const RankedList& a, const RankedList& b, std::size_t top_t);

struct CorrelationReport {
    MoleculeId query;
    Method method_a = Method::CountNonNorm;
    Method method_b = Method::CountNorm;
    std::size_t top_t = 0;
    /// NaN when fewer than two points or a constant series.
    double pearson_r = 0.0;
    /// |top-t(A) ∩ top-t(B)| / |top-t(A) ∪ top-t(B)|.
    double jaccard = 0.0;
    CrossRank cross;
};

CorrelationReport correlate(const RankedList& a, const RankedList& b, std::size_t top_t);

/// First top-t (rank, n_PC) points of a ranking.
std::vector<std::pair<std::size_t, std::uint32_t>> pubcount_curve(const RankedList& ranked, std::size_t top_t);

// --- coauthor proximity validation -------------------------------------------------------------

/// Molecules ordered by how many of the author's publications mention them (desc), then name.
std::vector<MoleculeId> author_interests(const MultilayerGraph& graph, AuthorId a, std::size_t top_m = 5);

/// Coauthors ordered by shared publication count (desc), then name.
std::vector<AuthorId> top_coauthors(const MultilayerGraph& graph, AuthorId a, std::size_t top_c = 5);

/// 2x2 table: rows non-neighbour / neighbour, columns random / coauthor-derived molecule pairs.
struct ContingencyTable {
    std::uint64_t random_nonneighbor = 0;    // a
    std::uint64_t coauthor_nonneighbor = 0;  // b
    std::uint64_t random_neighbor = 0;       // c
    std::uint64_t coauthor_neighbor = 0;     // d

    std::uint64_t total() const {
        return random_nonneighbor + coauthor_nonneighbor + random_neighbor + coauthor_neighbor;
    }
    /// The same table with the random and coauthor columns exchanged.
    ContingencyTable swap_columns() const {
        return {coauthor_nonneighbor, random_nonneighbor, coauthor_neighbor, random_neighbor};
    }
    bool operator==(const ContingencyTable&) const = default;
};

struct OddsRatio {
    double value = 0.0;
    /// True when a zero cell forced the +0.5 (Haldane) correction.
    bool haldane_corrected = false;
};

/// (d / b) / (c / a).
OddsRatio odds_ratio(const ContingencyTable& t);

/// Margins above this switch significance() to the chi-square approximation.
inline constexpr std::uint64_t kChiSquareMarginThreshold = 10'000'000;

/// Two-sided Fisher exact test: total probability of same-margin tables no more likely than the
/// observed one. Throws Error(InvalidTable) when a margin is zero.
double fisher_exact(const ContingencyTable& t);

/// Pearson chi-square test (1 d.o.f., no continuity correction).
double chi_square_p(const ContingencyTable& t);

struct SignificanceResult {
    double p_value = 1.0;
    bool chi_square = false;
};

/// Fisher exact unless any margin exceeds kChiSquareMarginThreshold.
SignificanceResult significance(const ContingencyTable& t);

struct ValidationConfig {
    std::size_t n_molecules = 500;
    std::size_t n_authors = 250;
    std::uint32_t min_pubs = 5;
    std::size_t top_interests = 5;
    std::size_t top_coauthors = 5;
    std::uint64_t seed = 42;
};

struct ValidationResult {
    ContingencyTable table;
    OddsRatio odds;
    SignificanceResult significance;
    /// Set when the graph was smaller than the requested samples.
    bool scaled_down = false;
    std::size_t molecules_sampled = 0;
    std::size_t authors_sampled = 0;
    std::vector<MoleculeId> sampled_molecules;
    std::vector<AuthorId> sampled_authors;
};

/// Random molecule pairs versus molecule pairs drawn from the interests of frequent coauthors.
/// Throws Error(InsufficientData) when no qualifying author exists or no neighbour pair is seen.
ValidationResult validation_experiment(const MultilayerGraph& graph, const ValidationConfig& cfg = {});

// --- timing ------------------------------------------------------------------------------------

struct TimedMethod {
    Method method = Method::CountNonNorm;
    /// PageRank only: serve from a store filled before timing starts.
    bool precomputed = false;

    std::string label() const;
};

struct TimingStats {
    std::string label;
    std::size_t samples = 0;
    double mean_s = 0.0;
    double var_s = 0.0;
};

/// Wall-clock mean and variance of each method over `repetitions` passes of `molecules`.
/// Machine-dependent; callers assert orderings, not magnitudes.
std::vector<TimingStats> timing_harness(const MultilayerGraph& graph, std::span<const MoleculeId> molecules,
                                        std::span<const TimedMethod> methods, std::size_t repetitions,
                                        const PagerankConfig& cfg = {});

// --- report emission ---------------------------------------------------------------------------

void write_cross_rank_csv(const std::filesystem::path& path, const CrossRank& cross);
void write_curve_csv(const std::filesystem::path& path,
                     const std::vector<std::pair<std::size_t, std::uint32_t>>& curve);
void write_timing_csv(const std::filesystem::path& path, const std::vector<TimingStats>& stats);

struct RankCompareOutput {
    std::vector<CorrelationReport> reports;
    std::vector<std::filesystem::path> files;
};

/// Writes `{molecule}_{methodA}_vs_{methodB}.csv` scatter files for count_nonnorm vs
/// hypergeometric, count_nonnorm vs count_norm and pagerank_nonnorm vs pagerank_norm, the
/// PageRank publication-count curves, and `{molecule}_correlations.json`.
RankCompareOutput rank_compare(const MultilayerGraph& graph, MoleculeId m, std::size_t top_t,
                               const std::filesystem::path& out_dir, const PagerankConfig& cfg = {},
                               const PagerankStore* store = nullptr);

std::string validation_json(const ValidationResult& r);

}  // namespace synergy
