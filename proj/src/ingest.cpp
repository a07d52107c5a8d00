#include "synergy/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "codec_util.hpp"
#include "synergy/error.hpp"
#include "synergy/text.hpp"

namespace synergy {

using nlohmann::json;

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    return in;
}

bool skippable(std::string_view line) {
    const auto first = line.find_first_not_of(" \t\r");
    return first == std::string_view::npos || line[first] == '#';
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

std::string optional_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

}  // namespace

PublicationRecord parse_record_json(std::string_view line) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
    if (!obj.is_object()) throw ParseError("record is not a JSON object");

    PublicationRecord rec;
    auto id = obj.find("pub_id");
    if (id == obj.end()) throw ParseError("missing pub_id");
    if (id->is_string()) {
        rec.pub_id = id->get<std::string>();
    } else if (id->is_number_unsigned() || id->is_number_integer()) {
        rec.pub_id = id->dump();
    } else {
        throw ParseError("pub_id must be a string or integer");
    }
    if (rec.pub_id.empty()) throw ParseError("empty pub_id");

    rec.title = optional_string(obj, "title");
    rec.abstract = optional_string(obj, "abstract");
    if (auto kw = obj.find("keywords"); kw != obj.end() && !kw->is_null()) {
        if (!kw->is_array()) throw ParseError("keywords must be an array");
        for (const auto& k : *kw) {
            if (!k.is_string()) throw ParseError("keyword must be a string");
            rec.keywords.push_back(k.get<std::string>());
        }
    }
    if (auto y = obj.find("year"); y != obj.end() && !y->is_null()) {
        if (!y->is_number_integer()) throw ParseError("year must be an integer");
        rec.year = y->get<int>();
    }
    if (auto au = obj.find("authors"); au != obj.end() && !au->is_null()) {
        if (!au->is_array()) throw ParseError("authors must be an array");
        for (const auto& a : *au) {
            AuthorName name;
            if (a.is_string()) {
                name.name = a.get<std::string>();
            } else if (a.is_object()) {
                name.name = optional_string(a, "name");
                std::string aff = optional_string(a, "affiliation");
                if (!aff.empty()) name.affiliation = std::move(aff);
            } else {
                throw ParseError("author must be an object or string");
            }
            rec.authors.push_back(std::move(name));
        }
    }
    return rec;
}

std::string to_json_line(const PublicationRecord& rec) {
    json authors = json::array();
    for (const auto& a : rec.authors) {
        json entry = {{"name", a.name}};
        entry["affiliation"] = a.affiliation ? json(*a.affiliation) : json(nullptr);
        authors.push_back(std::move(entry));
    }
    json obj = {{"pub_id", rec.pub_id},
                {"title", rec.title},
                {"abstract", rec.abstract},
                {"keywords", rec.keywords},
                {"year", rec.year ? json(*rec.year) : json(nullptr)},
                {"authors", std::move(authors)}};
    return obj.dump();
}

std::string to_json(const IngestReport& r) {
    json obj = {{"records_read", r.records_read},
                {"records_ingested", r.records_ingested},
                {"records_skipped", r.records_skipped},
                {"mentions_created", r.mentions_created},
                {"molecules_matched", r.molecules_matched},
                {"authors_created", r.authors_created},
                {"skip_reasons", r.skip_reasons}};
    return obj.dump();
}

std::size_t load_molecule_catalog(MultilayerGraph& graph, const std::filesystem::path& path) {
    auto in = open_input(path);
    std::set<MoleculeId> seen;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = strip_cr(raw);
        if (skippable(line)) continue;
        const auto fields = detail::split_tabs(line);
        if (fields.size() > 2) throw ParseError("expected name<TAB>aliases", line_no);
        const std::string name = text::normalize_whitespace(fields[0]);
        if (name.empty()) throw ParseError("empty molecule name", line_no);
        std::set<std::string> aliases;
        if (fields.size() == 2) {
            std::string_view rest = fields[1];
            while (!rest.empty()) {
                const auto comma = rest.find(',');
                auto alias = text::normalize_whitespace(rest.substr(0, comma));
                if (!alias.empty()) aliases.insert(std::move(alias));
                if (comma == std::string_view::npos) break;
                rest.remove_prefix(comma + 1);
            }
        }
        try {
            seen.insert(graph.upsert_molecule(name, aliases));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::AliasConflict) throw;
            throw Error(ErrorCode::AliasConflict,
                        path.string() + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return seen.size();
}

InteractionReport load_interactions(MultilayerGraph& graph, const std::filesystem::path& path) {
    auto in = open_input(path);
    InteractionReport report;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = strip_cr(raw);
        if (skippable(line)) continue;
        const auto fields = detail::split_tabs(line);
        if (fields.size() != 2) throw ParseError("expected nameA<TAB>nameB", line_no);
        MoleculeId ids[2];
        for (int i = 0; i < 2; ++i) {
            auto id = graph.find_molecule(fields[i]);
            if (!id) {
                throw Error(ErrorCode::UnknownMolecule, "'" + std::string(fields[i]) + "' at " +
                                                            path.string() + " line " +
                                                            std::to_string(line_no));
            }
            ids[i] = *id;
        }
        if (ids[0] == ids[1]) {
            ++report.self_loops;
            report.self_loop_lines.push_back(line_no);
            continue;
        }
        if (graph.add_interaction(ids[0], ids[1]))
            ++report.created;
        else
            ++report.duplicates;
    }
    return report;
}

namespace {

std::string join_words(const std::vector<std::string>& words, std::size_t from, std::size_t n) {
    std::string out = words[from];
    for (std::size_t i = 1; i < n; ++i) {
        out += ' ';
        out += words[from + i];
    }
    return out;
}

}  // namespace

MentionMatcher::MentionMatcher(const MultilayerGraph& graph, IngestOptions options)
    : options_(options) {
    auto add = [&](const std::string& name, MoleculeId id) {
        const auto words = text::tokenize(name);
        if (words.empty()) return;
        max_words_ = std::max(max_words_, words.size());
        names_.emplace(join_words(words, 0, words.size()), id);
    };
    for (const auto& m : graph.molecules()) {
        add(m.canonical_name, m.id);
        for (const auto& a : m.aliases) add(a, m.id);
    }
}

void MentionMatcher::scan(std::string_view s, std::vector<MoleculeId>& out) const {
    const auto words = text::tokenize(s);
    auto probe = [&](const std::string& key) {
        if (auto it = names_.find(key); it != names_.end()) out.push_back(it->second);
    };
    for (std::size_t i = 0; i < words.size(); ++i) {
        for (std::size_t n = 1; n <= max_words_ && i + n <= words.size(); ++n)
            probe(join_words(words, i, n));

        const std::string& w = words[i];
        if (w.find('-') == std::string::npos) continue;
        std::vector<std::string_view> parts;
        std::string_view rest = w;
        while (true) {
            const auto dash = rest.find('-');
            parts.push_back(rest.substr(0, dash));
            if (dash == std::string_view::npos) break;
            rest.remove_prefix(dash + 1);
        }
        for (std::size_t a = 0; a < parts.size(); ++a) {
            std::string run;
            for (std::size_t b = a; b < parts.size(); ++b) {
                if (parts[b].empty()) break;
                if (b > a) run += '-';
                run += parts[b];
                if (a == 0 && b + 1 == parts.size()) continue;  // whole token already probed
                probe(run);
            }
        }
    }
}

std::vector<MoleculeId> MentionMatcher::match(const PublicationRecord& rec) const {
    std::vector<MoleculeId> out;
    if (options_.match_titles) scan(rec.title, out);
    scan(rec.abstract, out);
    for (const auto& k : rec.keywords) scan(k, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<MoleculeId> match_mentions(const PublicationRecord& rec, const MultilayerGraph& graph,
                                       IngestOptions options) {
    return MentionMatcher(graph, options).match(rec);
}

namespace {

class RecordSink {
public:
    RecordSink(MultilayerGraph& graph, IngestOptions options)
        : graph_(graph), matcher_(graph, options) {}

    void skip(const std::string& reason) {
        ++report_.records_read;
        ++report_.records_skipped;
        ++report_.skip_reasons[reason];
    }

    void add(const PublicationRecord& rec) {
        const bool has_author = std::any_of(rec.authors.begin(), rec.authors.end(), [](const auto& a) {
            return !text::normalize_whitespace(a.name).empty();
        });
        if (!has_author) return skip("no_authors");
        if (rec.year && (*rec.year < 1800 || *rec.year > 2100)) return skip("invalid_year");

        PublicationNode node;
        node.pub_id = rec.pub_id;
        node.title = rec.title;
        node.abstract = rec.abstract;
        node.keywords = rec.keywords;
        node.year = rec.year;

        const std::size_t authors_before = graph_.author_count();
        PublicationId id;
        try {
            id = graph_.upsert_publication(node, rec.authors);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::DuplicateConflict) return skip("duplicate_conflict");
            if (e.code() == ErrorCode::InvalidArgument) return skip("invalid_record");
            throw;
        }
        ++report_.records_read;
        ++report_.records_ingested;
        report_.authors_created += graph_.author_count() - authors_before;
        for (auto m : matcher_.match(rec)) {
            matched_.insert(m);
            if (graph_.add_mention(id, m)) ++report_.mentions_created;
        }
    }

    IngestReport finish() {
        report_.molecules_matched = matched_.size();
        return report_;
    }

private:
    MultilayerGraph& graph_;
    MentionMatcher matcher_;
    IngestReport report_;
    std::set<MoleculeId> matched_;
};

}  // namespace

IngestReport ingest_records(const std::vector<PublicationRecord>& records, MultilayerGraph& graph,
                            IngestOptions options) {
    RecordSink sink(graph, options);
    for (const auto& rec : records) sink.add(rec);
    return sink.finish();
}

IngestReport ingest_corpus(const std::filesystem::path& path, MultilayerGraph& graph,
                           IngestOptions options) {
    auto in = open_input(path);
    RecordSink sink(graph, options);
    std::string raw;
    while (std::getline(in, raw)) {
        const std::string_view line = strip_cr(raw);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        PublicationRecord rec;
        try {
            rec = parse_record_json(line);
        } catch (const ParseError&) {
            sink.skip("parse_error");
            continue;
        }
        sink.add(rec);
    }
    if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed: " + path.string());
    return sink.finish();
}

}  // namespace synergy
