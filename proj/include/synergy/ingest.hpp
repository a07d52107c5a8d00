#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "synergy/graph.hpp"

namespace synergy {

/// One bibliographic record as it arrives from a corpus file or the remote API.
struct PublicationRecord {
    std::string pub_id;
    std::string title;
    std::string abstract;
    std::vector<std::string> keywords;
    std::optional<int> year;
    std::vector<AuthorName> authors;

    bool operator==(const PublicationRecord&) const = default;
};

/// Corpus line format: one JSON object per line.
PublicationRecord parse_record_json(std::string_view line);
std::string to_json_line(const PublicationRecord& rec);

struct IngestOptions {
    /// Scan titles as well as abstracts and keywords.
    bool match_titles = true;
};

struct IngestReport {
    std::size_t records_read = 0;
    std::size_t records_ingested = 0;
    std::size_t records_skipped = 0;
    std::size_t mentions_created = 0;
    /// Distinct molecules matched by at least one record in this pass.
    std::size_t molecules_matched = 0;
    std::size_t authors_created = 0;
    std::map<std::string, std::size_t> skip_reasons;

    bool operator==(const IngestReport&) const = default;
};

std::string to_json(const IngestReport& report);

struct InteractionReport {
    std::size_t created = 0;
    std::size_t duplicates = 0;
    std::size_t self_loops = 0;
    std::vector<std::size_t> self_loop_lines;
};

/// `canonical<TAB>alias,alias,...` per line; blank lines and `#` comments ignored.
/// Returns the number of distinct molecules named by the file.
std::size_t load_molecule_catalog(MultilayerGraph& graph, const std::filesystem::path& path);

/// `nameA<TAB>nameB` per line. Unknown names are fatal; self-loops are skipped and counted.
InteractionReport load_interactions(MultilayerGraph& graph, const std::filesystem::path& path);

/// Whole-token, case-insensitive matcher over every molecule name and alias.
///
/// Text is split on anything that is not a letter, digit or hyphen. A hyphenated token also
/// exposes each contiguous run of its hyphen-separated parts, so `Dap12-mediated` matches `DAP12`
/// and `TREM-2` matches the hyphenated alias as a whole. Multi-word names match contiguous tokens.
class MentionMatcher {
public:
    explicit MentionMatcher(const MultilayerGraph& graph, IngestOptions options = {});

    /// Sorted, duplicate-free.
    std::vector<MoleculeId> match(const PublicationRecord& rec) const;

private:
    void scan(std::string_view s, std::vector<MoleculeId>& out) const;

    IngestOptions options_;
    std::unordered_map<std::string, MoleculeId> names_;
    std::size_t max_words_ = 1;
};

std::vector<MoleculeId> match_mentions(const PublicationRecord& rec, const MultilayerGraph& graph,
                                       IngestOptions options = {});

/// Upserts records in order; bad records are skipped and counted, never fatal.
IngestReport ingest_records(const std::vector<PublicationRecord>& records, MultilayerGraph& graph,
                            IngestOptions options = {});

/// Streams a line-delimited JSON corpus. Unreadable files raise IoFailure.
IngestReport ingest_corpus(const std::filesystem::path& path, MultilayerGraph& graph,
                           IngestOptions options = {});

}  // namespace synergy
