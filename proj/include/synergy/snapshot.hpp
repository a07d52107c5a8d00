#pragma once

#include <filesystem>

#include "synergy/graph.hpp"

namespace synergy {

/// Persists a graph as an `.mlg` snapshot (layout in docs/snapshot-format.md).
/// Ids, edge order and revision survive a round trip unchanged.
void save_snapshot(const MultilayerGraph& graph, const std::filesystem::path& path);

MultilayerGraph load_snapshot(const std::filesystem::path& path);

/// Reads a snapshot straight into an immutable shared view.
GraphSnapshot load_shared_snapshot(const std::filesystem::path& path);

}  // namespace synergy
