#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "synergy/countrank.hpp"
#include "synergy/graph.hpp"

namespace synergy {

class PagerankStore;

enum class Variant : std::uint8_t { NonNormalized = 0, Normalized = 1 };

inline constexpr Variant kAllVariants[] = {Variant::NonNormalized, Variant::Normalized};

std::string_view to_string(Variant v);
inline Method method_of(Variant v) {
    return v == Variant::Normalized ? Method::PagerankNorm : Method::PagerankNonNorm;
}
inline Variant variant_of(Method m) {
    return m == Method::PagerankNorm ? Variant::Normalized : Variant::NonNormalized;
}

struct PagerankConfig {
    double damping = 0.85;
    /// Stop once the L1 change between iterations falls below this.
    double tolerance = 1e-9;
    int max_iterations = 100;
    /// Co-author pairs kept per related molecule; pairs tied at the cutoff are all kept.
    std::size_t top_pairs_per_molecule = 500;
    bool include_self = false;
    /// Optional teleport weights; empty means uniform over the subnetwork nodes.
    /// Authors absent from the subnetwork are ignored.
    std::vector<std::pair<AuthorId, double>> personalization;
};

struct CoauthorEdge {
    AuthorId x;
    AuthorId y;
    /// Distinct co-authored publications mentioning at least one related molecule.
    std::uint32_t m_xy = 0;
    double weight = 0.0;

    bool operator==(const CoauthorEdge&) const = default;
};

struct CoauthorSubnetwork {
    MoleculeId query;
    Variant variant = Variant::NonNormalized;
    /// Ascending; includes authors without kept edges.
    std::vector<AuthorId> nodes;
    /// x < y, ascending by (x, y).
    std::vector<CoauthorEdge> edges;
    std::uint64_t built_at_revision = 0;
};

/// M_xy / sqrt(N_x * N_y). Throws Error(ZeroTotal) if either total is 0.
double normalized_collaboration_weight(std::uint64_t m_xy, std::uint64_t n_x, std::uint64_t n_y);

/// Per related molecule, keeps the strongest co-author pairs, unions them and weighs each pair by
/// its distinct co-authored publications across the whole neighbourhood.
CoauthorSubnetwork build_subnetwork(const MultilayerGraph& graph, MoleculeId m, Variant variant,
                                    const PagerankConfig& cfg = {});

struct PagerankResult {
    /// Ascending by author id; sums to 1.
    std::vector<std::pair<AuthorId, double>> scores;
    int iterations = 0;
    bool converged = false;
    double last_delta = 0.0;
};

/// Power iteration on the weighted undirected subnetwork. Isolated nodes spread their mass
/// uniformly. Throws Error(EmptyNetwork) when there are no nodes; non-convergence is reported
/// through `converged` with the last iterate returned.
PagerankResult pagerank(const CoauthorSubnetwork& net, const PagerankConfig& cfg = {});

/// Subnetwork + PageRank, sorted by score descending then name. Served from `store` when it holds
/// scores for this (molecule, variant, revision).
RankedList rank_pagerank(const MultilayerGraph& graph, MoleculeId m, Variant variant,
                         const PagerankConfig& cfg = {}, const PagerankStore* store = nullptr);

/// Dispatches to the count, hypergeometric or PageRank rankers.
RankedList rank_authors(const MultilayerGraph& graph, MoleculeId m, Method method,
                        const PagerankConfig& cfg = {}, const PagerankStore* store = nullptr);

}  // namespace synergy
