#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "synergy/graph.hpp"
#include "synergy/ingest.hpp"
#include "synergy/synthetic.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return SYNERGY_TEST_DATA; }
inline std::filesystem::path synthetic_dir() { return SYNERGY_SYNTHETIC_DATA; }
inline std::filesystem::path cli_path() { return SYNERGY_CLI; }

/// Fresh scratch directory under the build tree, emptied on creation.
inline std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::path(SYNERGY_SCRATCH) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Q, M1, M2, M3; Q-M1, Q-M2; P1{A1,A2: M1}, P2{A1: M1,M2}, P3{A2: M2}, P4{A1: M3}.
inline synergy::MultilayerGraph fixture_f1() {
    auto dir = data_dir() / "f1";
    return synergy::load_dataset(dir / "molecules.tsv", dir / "interactions.tsv", dir / "corpus.jsonl").graph;
}

/// The bundled synthetic corpus, loaded once per process.
inline std::shared_ptr<const synergy::MultilayerGraph> bundled() {
    static const auto graph = [] {
        auto dir = synthetic_dir();
        auto ds = synergy::load_dataset(dir / "molecules.tsv", dir / "interactions.tsv", dir / "corpus.jsonl");
        return std::make_shared<const synergy::MultilayerGraph>(std::move(ds.graph));
    }();
    return graph;
}

inline const char* kHub = "SYNQ1";

}  // namespace testing
