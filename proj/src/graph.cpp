#include "synergy/graph.hpp"

#include <algorithm>

#include "synergy/error.hpp"
#include "synergy/text.hpp"

namespace synergy {

namespace {

template <class T>
bool insert_sorted(std::vector<T>& v, T value) {
    auto it = std::lower_bound(v.begin(), v.end(), value);
    if (it != v.end() && *it == value) return false;
    v.insert(it, value);
    return true;
}

template <class T>
bool contains_sorted(const std::vector<T>& v, T value) {
    return std::binary_search(v.begin(), v.end(), value);
}

}  // namespace

std::string author_key(std::string_view name) { return text::name_key(name); }

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::AliasConflict: return "AliasConflict";
        case ErrorCode::SelfLoop: return "SelfLoop";
        case ErrorCode::UnknownNode: return "UnknownNode";
        case ErrorCode::UnknownMolecule: return "UnknownMolecule";
        case ErrorCode::DuplicateConflict: return "DuplicateConflict";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
        case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::HttpError: return "HttpError";
        case ErrorCode::RateLimited: return "RateLimited";
        case ErrorCode::NetworkTimeout: return "NetworkTimeout";
        case ErrorCode::ZeroTotal: return "ZeroTotal";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::EmptyNetwork: return "EmptyNetwork";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::InvalidTable: return "InvalidTable";
        case ErrorCode::InsufficientData: return "InsufficientData";
    }
    return "Unknown";
}

void MultilayerGraph::check(MoleculeId id) const {
    if (id.value >= molecules_.size())
        throw Error(ErrorCode::UnknownNode, "molecule #" + std::to_string(id.value));
}

void MultilayerGraph::check(PublicationId id) const {
    if (id.value >= publications_.size())
        throw Error(ErrorCode::UnknownNode, "publication #" + std::to_string(id.value));
}

void MultilayerGraph::check(AuthorId id) const {
    if (id.value >= authors_.size())
        throw Error(ErrorCode::UnknownNode, "author #" + std::to_string(id.value));
}

MoleculeId MultilayerGraph::upsert_molecule(std::string_view name,
                                            const std::set<std::string>& aliases) {
    const std::string canonical = text::normalize_whitespace(name);
    if (canonical.empty()) throw Error(ErrorCode::InvalidArgument, "empty molecule name");
    const std::string key = text::fold_case(canonical);

    std::optional<MoleculeId> existing;
    if (auto it = name_index_.find(key); it != name_index_.end()) {
        const auto& hit = molecules_[it->second.value];
        if (text::fold_case(hit.canonical_name) != key) {
            throw Error(ErrorCode::AliasConflict,
                        "'" + canonical + "' is an alias of '" + hit.canonical_name + "'");
        }
        existing = it->second;
    }

    // Validate every alias before touching the graph so a conflict leaves no partial state.
    std::vector<std::pair<std::string, std::string>> fresh;  // (key, display)
    for (const auto& raw : aliases) {
        std::string alias = text::normalize_whitespace(raw);
        if (alias.empty()) continue;
        std::string alias_key = text::fold_case(alias);
        if (alias_key == key) continue;
        if (auto it = name_index_.find(alias_key); it != name_index_.end()) {
            if (existing && it->second == *existing) continue;
            throw Error(ErrorCode::AliasConflict, "alias '" + alias + "' of '" + canonical +
                                                      "' already names '" +
                                                      molecules_[it->second.value].canonical_name +
                                                      "'");
        }
        if (std::any_of(fresh.begin(), fresh.end(),
                        [&](const auto& f) { return f.first == alias_key; }))
            continue;
        fresh.emplace_back(std::move(alias_key), std::move(alias));
    }

    MoleculeId id;
    if (existing) {
        id = *existing;
    } else {
        id = MoleculeId(static_cast<std::uint32_t>(molecules_.size()));
        molecules_.push_back(MoleculeNode{id, canonical, {}});
        interactions_.emplace_back();
        molecule_pubs_.emplace_back();
        name_index_.emplace(key, id);
    }
    for (auto& [alias_key, alias] : fresh) {
        molecules_[id.value].aliases.insert(std::move(alias));
        name_index_.emplace(std::move(alias_key), id);
    }
    if (!existing || !fresh.empty()) ++revision_;
    return id;
}

bool MultilayerGraph::add_interaction(MoleculeId a, MoleculeId b) {
    check(a);
    check(b);
    if (a == b)
        throw Error(ErrorCode::SelfLoop, "molecule '" + molecules_[a.value].canonical_name + "'");
    if (!insert_sorted(interactions_[a.value], b)) return false;
    insert_sorted(interactions_[b.value], a);
    ++interaction_edges_;
    ++revision_;
    return true;
}

AuthorId MultilayerGraph::resolve_author(const AuthorName& name, bool& changed) {
    const std::string display = text::normalize_whitespace(name.name);
    const std::string key = text::fold_case(display);
    if (auto it = author_index_.find(key); it != author_index_.end()) {
        auto& node = authors_[it->second.value];
        if (!node.affiliation && name.affiliation && !name.affiliation->empty()) {
            node.affiliation = text::normalize_whitespace(*name.affiliation);
            changed = true;
        }
        return it->second;
    }
    const AuthorId id(static_cast<std::uint32_t>(authors_.size()));
    std::optional<std::string> affiliation;
    if (name.affiliation && !name.affiliation->empty())
        affiliation = text::normalize_whitespace(*name.affiliation);
    authors_.push_back(AuthorNode{id, display, std::move(affiliation), 0});
    author_pubs_.emplace_back();
    author_index_.emplace(key, id);
    changed = true;
    return id;
}

PublicationId MultilayerGraph::upsert_publication(const PublicationNode& rec,
                                                  std::span<const AuthorName> authors) {
    const std::string pub_id = text::normalize_whitespace(rec.pub_id);
    if (pub_id.empty()) throw Error(ErrorCode::InvalidArgument, "empty pub_id");
    if (rec.year && (*rec.year < 1800 || *rec.year > 2100))
        throw Error(ErrorCode::InvalidArgument,
                    "publication " + pub_id + ": year " + std::to_string(*rec.year));

    if (auto it = pub_index_.find(pub_id); it != pub_index_.end()) {
        if (publications_[it->second.value].title != rec.title)
            throw Error(ErrorCode::DuplicateConflict,
                        "publication " + pub_id + " already stored with a different title");
        return it->second;
    }

    const bool has_author = std::any_of(authors.begin(), authors.end(), [](const AuthorName& a) {
        return !text::normalize_whitespace(a.name).empty();
    });
    if (!has_author) throw Error(ErrorCode::InvalidArgument, "publication " + pub_id + " has no authors");

    const PublicationId id(static_cast<std::uint32_t>(publications_.size()));
    PublicationNode node = rec;
    node.id = id;
    node.pub_id = pub_id;
    publications_.push_back(std::move(node));
    pub_molecules_.emplace_back();
    pub_authors_.emplace_back();
    pub_index_.emplace(pub_id, id);

    bool changed = false;
    for (const auto& name : authors) {
        if (text::normalize_whitespace(name.name).empty()) continue;
        const AuthorId a = resolve_author(name, changed);
        auto& listed = pub_authors_[id.value];
        if (std::find(listed.begin(), listed.end(), a) != listed.end()) continue;
        listed.push_back(a);
        insert_sorted(author_pubs_[a.value], id);
        authors_[a.value].n_total = static_cast<std::uint32_t>(author_pubs_[a.value].size());
        ++authored_edges_;
    }
    ++revision_;
    return id;
}

bool MultilayerGraph::add_mention(PublicationId p, MoleculeId m) {
    check(p);
    check(m);
    if (!insert_sorted(pub_molecules_[p.value], m)) return false;
    insert_sorted(molecule_pubs_[m.value], p);
    ++mention_edges_;
    ++revision_;
    return true;
}

std::size_t MultilayerGraph::edge_count(EdgeKind kind) const {
    switch (kind) {
        case EdgeKind::Interacts: return interaction_edges_;
        case EdgeKind::Mentions: return mention_edges_;
        case EdgeKind::Authored: return authored_edges_;
    }
    return 0;
}

GraphCounts MultilayerGraph::counts() const {
    return GraphCounts{molecules_.size(), publications_.size(), authors_.size(),
                       interaction_edges_,  mention_edges_,       authored_edges_};
}

const MoleculeNode& MultilayerGraph::molecule(MoleculeId id) const {
    check(id);
    return molecules_[id.value];
}

const PublicationNode& MultilayerGraph::publication(PublicationId id) const {
    check(id);
    return publications_[id.value];
}

const AuthorNode& MultilayerGraph::author(AuthorId id) const {
    check(id);
    return authors_[id.value];
}

std::optional<MoleculeId> MultilayerGraph::find_molecule(std::string_view name) const {
    if (auto it = name_index_.find(text::name_key(name)); it != name_index_.end()) return it->second;
    return std::nullopt;
}

std::optional<PublicationId> MultilayerGraph::find_publication(std::string_view pub_id) const {
    if (auto it = pub_index_.find(text::normalize_whitespace(pub_id)); it != pub_index_.end())
        return it->second;
    return std::nullopt;
}

std::optional<AuthorId> MultilayerGraph::find_author(std::string_view name) const {
    if (auto it = author_index_.find(author_key(name)); it != author_index_.end()) return it->second;
    return std::nullopt;
}

std::vector<MoleculeId> MultilayerGraph::related_molecules(MoleculeId m, bool include_self) const {
    check(m);
    std::vector<MoleculeId> out = interactions_[m.value];
    if (include_self) insert_sorted(out, m);
    return out;
}

std::span<const MoleculeId> MultilayerGraph::interaction_neighbors(MoleculeId m) const {
    check(m);
    return interactions_[m.value];
}

bool MultilayerGraph::interacts(MoleculeId a, MoleculeId b) const {
    check(a);
    check(b);
    return contains_sorted(interactions_[a.value], b);
}

std::vector<PublicationId> MultilayerGraph::publications_mentioning(
    std::span<const MoleculeId> ms) const {
    for (auto m : ms) check(m);
    std::vector<PublicationId> out;
    for (auto m : ms) {
        const auto& pubs = molecule_pubs_[m.value];
        out.insert(out.end(), pubs.begin(), pubs.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::span<const PublicationId> MultilayerGraph::publications_of_molecule(MoleculeId m) const {
    check(m);
    return molecule_pubs_[m.value];
}

std::span<const MoleculeId> MultilayerGraph::molecules_of_publication(PublicationId p) const {
    check(p);
    return pub_molecules_[p.value];
}

std::span<const PublicationId> MultilayerGraph::author_publications(AuthorId a) const {
    check(a);
    return author_pubs_[a.value];
}

std::span<const AuthorId> MultilayerGraph::publication_authors(PublicationId p) const {
    check(p);
    return pub_authors_[p.value];
}

}  // namespace synergy
