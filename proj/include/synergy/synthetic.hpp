#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "synergy/graph.hpp"
#include "synergy/ingest.hpp"

namespace synergy {

/// Knobs for the deterministic benchmark corpus. Defaults give ~100 molecules and ~2,000 records.
struct SyntheticOptions {
    std::uint64_t seed = 7;
    std::size_t molecules = 100;
    std::size_t communities = 8;
    std::size_t labs = 110;
    std::size_t publications = 2000;
    /// Name of the high-degree molecule the experiments query.
    std::string hub_name = "SYNQ1";
    std::size_t hub_degree = 16;
    double intra_community_edge_p = 0.30;
    double inter_community_edge_p = 0.01;
    double unmatched_publication_p = 0.15;
};

struct CatalogEntry {
    std::string name;
    std::set<std::string> aliases;
};

struct SyntheticCorpus {
    std::vector<CatalogEntry> catalog;
    std::vector<std::pair<std::string, std::string>> interactions;
    std::vector<PublicationRecord> records;
};

SyntheticCorpus generate_synthetic(const SyntheticOptions& options = {});

/// Writes molecules.tsv, interactions.tsv and corpus.jsonl into `dir`.
void write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& dir);

/// Catalog + interactions + corpus files loaded into a fresh graph.
struct LoadedDataset {
    MultilayerGraph graph;
    IngestReport report;
};

LoadedDataset load_dataset(const std::filesystem::path& catalog, const std::filesystem::path& interactions,
                           const std::filesystem::path& corpus, IngestOptions options = {});

}  // namespace synergy
