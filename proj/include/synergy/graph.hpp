#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace synergy {

/// Dense index into one node layer. Ids are assigned in insertion order and never reused.
template <class Tag>
struct NodeId {
    std::uint32_t value = 0;

    constexpr NodeId() = default;
    constexpr explicit NodeId(std::uint32_t v) : value(v) {}
    constexpr auto operator<=>(const NodeId&) const = default;
};

using MoleculeId = NodeId<struct MoleculeTag>;
using PublicationId = NodeId<struct PublicationTag>;
using AuthorId = NodeId<struct AuthorTag>;

/// Edge kinds are tagged so further layers can be added without touching the existing ones.
enum class EdgeKind : std::uint8_t { Interacts = 0, Mentions = 1, Authored = 2 };

struct MoleculeNode {
    MoleculeId id;
    std::string canonical_name;
    std::set<std::string> aliases;
};

struct PublicationNode {
    PublicationId id;
    std::string pub_id;
    std::string title;
    std::string abstract;
    std::vector<std::string> keywords;
    std::optional<int> year;
};

struct AuthorNode {
    AuthorId id;
    std::string canonical_name;
    std::optional<std::string> affiliation;
    /// Number of distinct publications linked by AUTHORED edges.
    std::uint32_t n_total = 0;
};

struct AuthorName {
    std::string name;
    std::optional<std::string> affiliation;

    bool operator==(const AuthorName&) const = default;
};

struct GraphCounts {
    std::size_t molecules = 0;
    std::size_t publications = 0;
    std::size_t authors = 0;
    std::size_t interactions = 0;
    std::size_t mentions = 0;
    std::size_t authored = 0;

    bool operator==(const GraphCounts&) const = default;
};

/// Three-layer property graph: molecules, publications and authors.
///
/// Single writer during ingestion; afterwards share it as `std::shared_ptr<const MultilayerGraph>`
/// and query from any number of threads. Every query is const and does not mutate caches.
/// `revision()` increases on every effective mutation and is used to key derived data.
class MultilayerGraph {
public:
    MultilayerGraph() = default;

    // --- mutation -------------------------------------------------------------------------

    MoleculeId upsert_molecule(std::string_view name, const std::set<std::string>& aliases = {});
    bool add_interaction(MoleculeId a, MoleculeId b);
    PublicationId upsert_publication(const PublicationNode& rec, std::span<const AuthorName> authors);
    bool add_mention(PublicationId p, MoleculeId m);

    // --- lookup ---------------------------------------------------------------------------

    std::size_t molecule_count() const { return molecules_.size(); }
    std::size_t publication_count() const { return publications_.size(); }
    std::size_t author_count() const { return authors_.size(); }
    std::size_t edge_count(EdgeKind kind) const;
    GraphCounts counts() const;
    std::uint64_t revision() const { return revision_; }

    const MoleculeNode& molecule(MoleculeId id) const;
    const PublicationNode& publication(PublicationId id) const;
    const AuthorNode& author(AuthorId id) const;

    std::span<const MoleculeNode> molecules() const { return molecules_; }
    std::span<const PublicationNode> publications() const { return publications_; }
    std::span<const AuthorNode> authors() const { return authors_; }

    /// Case-insensitive lookup over canonical names and aliases.
    std::optional<MoleculeId> find_molecule(std::string_view name) const;
    std::optional<PublicationId> find_publication(std::string_view pub_id) const;
    std::optional<AuthorId> find_author(std::string_view name) const;

    /// Full case-folded name index (canonical names and aliases).
    const std::map<std::string, MoleculeId>& name_index() const { return name_index_; }

    // --- traversal ------------------------------------------------------------------------

    /// One-hop interaction neighbours, ascending by id.
    std::vector<MoleculeId> related_molecules(MoleculeId m, bool include_self = false) const;
    std::span<const MoleculeId> interaction_neighbors(MoleculeId m) const;
    bool interacts(MoleculeId a, MoleculeId b) const;

    /// Union of publications mentioning any of `ms`, ascending, no duplicates.
    std::vector<PublicationId> publications_mentioning(std::span<const MoleculeId> ms) const;
    std::span<const PublicationId> publications_of_molecule(MoleculeId m) const;
    std::span<const MoleculeId> molecules_of_publication(PublicationId p) const;

    std::span<const PublicationId> author_publications(AuthorId a) const;
    /// Authors of a publication in source order.
    std::span<const AuthorId> publication_authors(PublicationId p) const;

private:
    friend class SnapshotCodec;

    void check(MoleculeId id) const;
    void check(PublicationId id) const;
    void check(AuthorId id) const;
    AuthorId resolve_author(const AuthorName& name, bool& changed);

    std::vector<MoleculeNode> molecules_;
    std::vector<PublicationNode> publications_;
    std::vector<AuthorNode> authors_;

    std::vector<std::vector<MoleculeId>> interactions_;      // sorted per molecule
    std::vector<std::vector<MoleculeId>> pub_molecules_;     // sorted per publication
    std::vector<std::vector<PublicationId>> molecule_pubs_;  // sorted per molecule
    std::vector<std::vector<AuthorId>> pub_authors_;         // source order per publication
    std::vector<std::vector<PublicationId>> author_pubs_;    // sorted per author

    std::map<std::string, MoleculeId> name_index_;
    std::unordered_map<std::string, PublicationId> pub_index_;
    std::unordered_map<std::string, AuthorId> author_index_;

    std::size_t interaction_edges_ = 0;
    std::size_t mention_edges_ = 0;
    std::size_t authored_edges_ = 0;
    std::uint64_t revision_ = 0;
};

using GraphSnapshot = std::shared_ptr<const MultilayerGraph>;

/// Normalised author key: whitespace-collapsed, case-folded full name.
std::string author_key(std::string_view name);

}  // namespace synergy

template <class Tag>
struct std::hash<synergy::NodeId<Tag>> {
    std::size_t operator()(const synergy::NodeId<Tag>& id) const noexcept {
        return std::hash<std::uint32_t>{}(id.value);
    }
};
