#include "synergy/snapshot.hpp"

#include <algorithm>
#include <charconv>
#include <string>

#include "codec_util.hpp"
#include "synergy/error.hpp"
#include "synergy/text.hpp"

namespace synergy {

namespace {

constexpr std::string_view kMagic = "MLG1";

void section(std::string& out, std::string_view name, std::size_t count) {
    out += name;
    out += ' ';
    out += std::to_string(count);
    out += '\n';
}

class LineReader {
public:
    explicit LineReader(const std::vector<std::string>& lines) : lines_(lines) {}

    std::string_view next() {
        if (pos_ >= lines_.size()) throw ParseError("unexpected end of snapshot");
        return lines_[pos_++];
    }

    std::size_t section(std::string_view name) {
        const std::string_view line = next();
        if (line.substr(0, name.size()) != name || line.size() <= name.size() ||
            line[name.size()] != ' ')
            throw ParseError("expected section " + std::string(name), pos_ + 1);
        return detail::parse_u64(line.substr(name.size() + 1), name);
    }

    bool done() const { return pos_ == lines_.size(); }

private:
    const std::vector<std::string>& lines_;
    std::size_t pos_ = 0;
};

}  // namespace

/// Private-state access for the snapshot reader and writer.
class SnapshotCodec {
public:
    static std::string encode(const MultilayerGraph& g) {
        using detail::escape_field;
        std::string out;
        out += kMagic;
        out += '\n';
        out += "REVISION " + std::to_string(g.revision_) + '\n';

        section(out, "MOLECULES", g.molecules_.size());
        for (const auto& m : g.molecules_) {
            out += escape_field(m.canonical_name);
            for (const auto& a : m.aliases) {
                out += '\t';
                out += escape_field(a);
            }
            out += '\n';
        }

        section(out, "INTERACTIONS", g.interaction_edges_);
        for (std::uint32_t a = 0; a < g.interactions_.size(); ++a) {
            for (auto b : g.interactions_[a]) {
                if (b.value > a) out += std::to_string(a) + '\t' + std::to_string(b.value) + '\n';
            }
        }

        section(out, "PUBLICATIONS", g.publications_.size());
        for (const auto& p : g.publications_) {
            out += escape_field(p.pub_id);
            out += '\t';
            out += p.year ? std::to_string(*p.year) : "-";
            out += '\t';
            out += escape_field(p.title);
            out += '\t';
            out += escape_field(p.abstract);
            out += '\t';
            out += std::to_string(p.keywords.size());
            for (const auto& k : p.keywords) {
                out += '\t';
                out += escape_field(k);
            }
            out += '\n';
        }

        section(out, "AUTHORS", g.authors_.size());
        for (const auto& a : g.authors_) {
            out += escape_field(a.canonical_name);
            out += '\t';
            out += a.affiliation ? "+" + escape_field(*a.affiliation) : "-";
            out += '\n';
        }

        section(out, "MENTIONS", g.mention_edges_);
        for (std::uint32_t p = 0; p < g.pub_molecules_.size(); ++p) {
            for (auto m : g.pub_molecules_[p])
                out += std::to_string(p) + '\t' + std::to_string(m.value) + '\n';
        }

        section(out, "AUTHORED", g.authored_edges_);
        for (std::uint32_t p = 0; p < g.pub_authors_.size(); ++p) {
            for (auto a : g.pub_authors_[p])
                out += std::to_string(a.value) + '\t' + std::to_string(p) + '\n';
        }
        return out;
    }

    static MultilayerGraph decode(const std::vector<std::string>& lines) {
        using detail::parse_u64;
        using detail::split_tabs;
        using detail::unescape_field;

        MultilayerGraph g;
        LineReader in(lines);
        {
            const std::string_view line = in.next();
            if (line.substr(0, 9) != "REVISION ") throw ParseError("expected REVISION", 2);
            g.revision_ = parse_u64(line.substr(9), "revision");
        }

        const std::size_t n_mol = in.section("MOLECULES");
        for (std::size_t i = 0; i < n_mol; ++i) {
            const auto fields = split_tabs(in.next());
            MoleculeNode node{MoleculeId(static_cast<std::uint32_t>(i)), unescape_field(fields[0]), {}};
            if (node.canonical_name.empty()) throw ParseError("empty molecule name");
            for (std::size_t f = 1; f < fields.size(); ++f) node.aliases.insert(unescape_field(fields[f]));
            auto claim = [&](const std::string& name) {
                if (!g.name_index_.emplace(text::fold_case(name), node.id).second)
                    throw ParseError("duplicate molecule name '" + name + "'");
            };
            claim(node.canonical_name);
            for (const auto& a : node.aliases) claim(a);
            g.molecules_.push_back(std::move(node));
        }
        g.interactions_.resize(n_mol);
        g.molecule_pubs_.resize(n_mol);

        auto molecule_ref = [&](std::string_view s) {
            const auto v = parse_u64(s, "molecule id");
            if (v >= g.molecules_.size()) throw ParseError("molecule id out of range");
            return MoleculeId(static_cast<std::uint32_t>(v));
        };

        const std::size_t n_int = in.section("INTERACTIONS");
        for (std::size_t i = 0; i < n_int; ++i) {
            const auto fields = split_tabs(in.next());
            if (fields.size() != 2) throw ParseError("bad interaction row");
            const auto a = molecule_ref(fields[0]);
            const auto b = molecule_ref(fields[1]);
            if (a == b) throw ParseError("self-loop in snapshot");
            g.interactions_[a.value].push_back(b);
            g.interactions_[b.value].push_back(a);
        }
        for (auto& adj : g.interactions_) {
            std::sort(adj.begin(), adj.end());
            if (std::adjacent_find(adj.begin(), adj.end()) != adj.end())
                throw ParseError("duplicate interaction in snapshot");
        }
        g.interaction_edges_ = n_int;

        const std::size_t n_pub = in.section("PUBLICATIONS");
        for (std::size_t i = 0; i < n_pub; ++i) {
            const auto fields = split_tabs(in.next());
            if (fields.size() < 5) throw ParseError("bad publication row");
            PublicationNode p;
            p.id = PublicationId(static_cast<std::uint32_t>(i));
            p.pub_id = unescape_field(fields[0]);
            if (fields[1] != "-") {
                int year = 0;
                const auto [ptr, ec] =
                    std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), year);
                if (ec != std::errc() || ptr != fields[1].data() + fields[1].size())
                    throw ParseError("bad year");
                p.year = year;
            }
            p.title = unescape_field(fields[2]);
            p.abstract = unescape_field(fields[3]);
            const auto n_kw = parse_u64(fields[4], "keyword count");
            if (fields.size() != 5 + n_kw) throw ParseError("keyword count mismatch");
            for (std::size_t k = 0; k < n_kw; ++k) p.keywords.push_back(unescape_field(fields[5 + k]));
            if (!g.pub_index_.emplace(p.pub_id, p.id).second)
                throw ParseError("duplicate pub_id " + p.pub_id);
            g.publications_.push_back(std::move(p));
        }
        g.pub_molecules_.resize(n_pub);
        g.pub_authors_.resize(n_pub);

        const std::size_t n_auth = in.section("AUTHORS");
        for (std::size_t i = 0; i < n_auth; ++i) {
            const auto fields = split_tabs(in.next());
            if (fields.size() != 2 || fields[1].empty()) throw ParseError("bad author row");
            AuthorNode a;
            a.id = AuthorId(static_cast<std::uint32_t>(i));
            a.canonical_name = unescape_field(fields[0]);
            if (fields[1][0] == '+') a.affiliation = unescape_field(fields[1].substr(1));
            if (!g.author_index_.emplace(author_key(a.canonical_name), a.id).second)
                throw ParseError("duplicate author " + a.canonical_name);
            g.authors_.push_back(std::move(a));
        }
        g.author_pubs_.resize(n_auth);

        auto pub_ref = [&](std::string_view s) {
            const auto v = parse_u64(s, "publication id");
            if (v >= g.publications_.size()) throw ParseError("publication id out of range");
            return PublicationId(static_cast<std::uint32_t>(v));
        };

        const std::size_t n_men = in.section("MENTIONS");
        for (std::size_t i = 0; i < n_men; ++i) {
            const auto fields = split_tabs(in.next());
            if (fields.size() != 2) throw ParseError("bad mention row");
            const auto p = pub_ref(fields[0]);
            const auto m = molecule_ref(fields[1]);
            g.pub_molecules_[p.value].push_back(m);
            g.molecule_pubs_[m.value].push_back(p);
        }
        for (auto& v : g.pub_molecules_) std::sort(v.begin(), v.end());
        for (auto& v : g.molecule_pubs_) std::sort(v.begin(), v.end());
        g.mention_edges_ = n_men;

        const std::size_t n_aut = in.section("AUTHORED");
        for (std::size_t i = 0; i < n_aut; ++i) {
            const auto fields = split_tabs(in.next());
            if (fields.size() != 2) throw ParseError("bad authored row");
            const auto a = parse_u64(fields[0], "author id");
            if (a >= g.authors_.size()) throw ParseError("author id out of range");
            const auto p = pub_ref(fields[1]);
            const AuthorId aid(static_cast<std::uint32_t>(a));
            g.pub_authors_[p.value].push_back(aid);
            g.author_pubs_[a].push_back(p);
        }
        for (std::size_t a = 0; a < n_auth; ++a) {
            auto& pubs = g.author_pubs_[a];
            std::sort(pubs.begin(), pubs.end());
            if (std::adjacent_find(pubs.begin(), pubs.end()) != pubs.end())
                throw ParseError("duplicate authored edge");
            g.authors_[a].n_total = static_cast<std::uint32_t>(pubs.size());
        }
        g.authored_edges_ = n_aut;

        if (!in.done()) throw ParseError("trailing data after AUTHORED section");
        return g;
    }
};

void save_snapshot(const MultilayerGraph& graph, const std::filesystem::path& path) {
    detail::write_checksummed(path, SnapshotCodec::encode(graph));
}

MultilayerGraph load_snapshot(const std::filesystem::path& path) {
    return SnapshotCodec::decode(detail::read_checksummed(path, kMagic));
}

GraphSnapshot load_shared_snapshot(const std::filesystem::path& path) {
    return std::make_shared<const MultilayerGraph>(load_snapshot(path));
}

}  // namespace synergy
