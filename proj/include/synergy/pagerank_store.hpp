#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "synergy/pathrank.hpp"

namespace synergy {

using ScoreTable = std::vector<std::pair<AuthorId, double>>;

struct PrecomputeStats {
    std::size_t stored = 0;
    /// Already present at the current revision.
    std::size_t skipped = 0;
    /// Molecules without interaction neighbours; nothing to rank.
    std::size_t empty = 0;
};

/// Persisted PageRank score tables keyed by (molecule, variant, graph revision).
///
/// Lookups at any other revision miss. Reads may run concurrently; writes are serialised.
class PagerankStore {
public:
    PagerankStore() = default;

    /// Loads `pagerank.cache`-style files written by save(). Missing file yields an empty store.
    static PagerankStore load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    std::shared_ptr<const ScoreTable> lookup(MoleculeId m, Variant v, std::uint64_t revision) const;
    void insert(MoleculeId m, Variant v, std::uint64_t revision, ScoreTable scores);
    /// Drops every entry whose revision differs from `revision`.
    std::size_t invalidate_except(std::uint64_t revision);
    std::size_t size() const;

    PrecomputeStats precompute(const MultilayerGraph& graph, std::span<const MoleculeId> molecules,
                               std::span<const Variant> variants, const PagerankConfig& cfg = {});

    PagerankStore(PagerankStore&& other) noexcept;
    PagerankStore& operator=(PagerankStore&& other) noexcept;

private:
    using Key = std::tuple<std::uint32_t, std::uint8_t, std::uint64_t>;

    mutable std::shared_mutex mutex_;
    std::map<Key, std::shared_ptr<const ScoreTable>> entries_;
};

/// Loads the store at `store_path` (if any), precomputes, and writes it back.
PrecomputeStats precompute(const MultilayerGraph& graph, std::span<const MoleculeId> molecules,
                           std::span<const Variant> variants, const PagerankConfig& cfg,
                           const std::filesystem::path& store_path);

}  // namespace synergy
