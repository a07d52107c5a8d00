#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "support.hpp"
#include "synergy/error.hpp"
#include "synergy/graph.hpp"
#include "synergy/snapshot.hpp"

using namespace synergy;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void spit(const std::filesystem::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f << s;
}

MoleculeId mol(const MultilayerGraph& g, std::string_view name) { return *g.find_molecule(name); }

std::vector<std::string> pub_ids(const MultilayerGraph& g, std::span<const PublicationId> ps) {
    std::vector<std::string> out;
    for (auto p : ps) out.push_back(g.publication(p).pub_id);
    return out;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::InvalidArgument;
}

/// Every traversal this module offers, flattened for equality checks.
std::vector<std::string> all_queries(const MultilayerGraph& g) {
    std::vector<std::string> out;
    std::ostringstream os;
    for (const auto& m : g.molecules()) {
        os << "M" << m.id.value << ' ' << m.canonical_name;
        for (const auto& a : m.aliases) os << ' ' << a;
        for (auto r : g.related_molecules(m.id)) os << " r" << r.value;
        for (auto p : g.publications_of_molecule(m.id)) os << " p" << p.value;
        out.push_back(os.str());
        os.str("");
    }
    for (const auto& p : g.publications()) {
        os << "P" << p.id.value << ' ' << p.pub_id << ' ' << p.title << ' ' << p.abstract << ' '
           << (p.year ? *p.year : -1);
        for (const auto& k : p.keywords) os << " k:" << k;
        for (auto m : g.molecules_of_publication(p.id)) os << " m" << m.value;
        for (auto a : g.publication_authors(p.id)) os << " a" << a.value;
        out.push_back(os.str());
        os.str("");
    }
    for (const auto& a : g.authors()) {
        os << "A" << a.id.value << ' ' << a.canonical_name << ' ' << a.affiliation.value_or("-") << ' ' << a.n_total;
        for (auto p : g.author_publications(a.id)) os << " p" << p.value;
        out.push_back(os.str());
        os.str("");
    }
    for (const auto& [k, v] : g.name_index()) out.push_back(k + "->" + std::to_string(v.value));
    out.push_back("rev " + std::to_string(g.revision()));
    return out;
}

}  // namespace

TEST_SUITE("graphstore") {

TEST_CASE("upsert_molecule creates, merges aliases and is idempotent") {
    MultilayerGraph g;
    const auto id = g.upsert_molecule("TREM2");
    CHECK(g.molecule_count() == 1);
    const auto a = g.upsert_molecule("TREM2", {"TREM-2"});
    const auto rev = g.revision();
    const auto b = g.upsert_molecule("TREM2", {"TREM-2"});
    CHECK(a == id);
    CHECK(b == id);
    CHECK(g.revision() == rev);
    CHECK(g.molecule(id).aliases == std::set<std::string>{"TREM-2"});
    CHECK(g.find_molecule("trem-2") == id);
}

TEST_CASE("case-insensitive names resolve to one molecule") {
    MultilayerGraph g;
    const auto a = g.upsert_molecule("tyrobp");
    const auto b = g.upsert_molecule("TYROBP", {"DAP12"});
    CHECK(a == b);
    CHECK(g.molecule_count() == 1);
    CHECK(g.molecule(a).aliases == std::set<std::string>{"DAP12"});
    CHECK(g.name_index().at("dap12") == a);
    CHECK(g.name_index().at("tyrobp") == a);
    CHECK(g.name_index().size() == 2);
}

TEST_CASE("alias collisions across molecules are rejected without side effects") {
    MultilayerGraph g;
    g.upsert_molecule("TYROBP", {"DAP12"});
    const auto rev = g.revision();
    CHECK(code_of([&] { g.upsert_molecule("TREM2", {"dap12"}); }) == ErrorCode::AliasConflict);
    CHECK(code_of([&] { g.upsert_molecule("Dap12"); }) == ErrorCode::AliasConflict);
    CHECK(g.molecule_count() == 1);
    CHECK(g.revision() == rev);
    CHECK(code_of([&] { g.upsert_molecule(""); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("interactions have set semantics and reject self loops") {
    MultilayerGraph g;
    const auto q = g.upsert_molecule("Q");
    const auto m1 = g.upsert_molecule("M1");
    const auto m2 = g.upsert_molecule("M2");
    CHECK(g.add_interaction(q, m1));
    const auto rev = g.revision();
    CHECK_FALSE(g.add_interaction(q, m1));
    CHECK_FALSE(g.add_interaction(m1, q));
    CHECK(g.revision() == rev);
    CHECK(code_of([&] { g.add_interaction(q, q); }) == ErrorCode::SelfLoop);
    CHECK(code_of([&] { g.add_interaction(q, MoleculeId(99)); }) == ErrorCode::UnknownNode);
    g.add_interaction(q, m2);
    CHECK(g.edge_count(EdgeKind::Interacts) == 2);
}

TEST_CASE("publications, authors and mentions") {
    MultilayerGraph g;
    const auto m1 = g.upsert_molecule("M1");
    std::vector<AuthorName> authors{{"A1", std::nullopt}, {"A2", std::string("Lab")}};
    const auto p1 = g.upsert_publication({{}, "P1", "Title", "", {}, 2001}, authors);
    CHECK(g.publication_count() == 1);
    CHECK(g.author_count() == 2);
    CHECK(g.edge_count(EdgeKind::Authored) == 2);

    const auto counts = g.counts();
    const auto rev = g.revision();
    CHECK(g.upsert_publication({{}, "P1", "Title", "", {}, 2001}, authors) == p1);
    CHECK(g.counts() == counts);
    CHECK(g.revision() == rev);

    CHECK(code_of([&] { g.upsert_publication({{}, "P1", "Other title", "", {}, 2001}, authors); }) ==
          ErrorCode::DuplicateConflict);
    CHECK(code_of([&] { g.upsert_publication({{}, "P2", "T", "", {}, 2001}, {}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { g.upsert_publication({{}, "P3", "T", "", {}, 1700}, authors); }) ==
          ErrorCode::InvalidArgument);

    CHECK(g.add_mention(p1, m1));
    CHECK_FALSE(g.add_mention(p1, m1));
    CHECK(code_of([&] { g.add_mention(PublicationId(7), m1); }) == ErrorCode::UnknownNode);
    CHECK(code_of([&] { g.author(AuthorId(9)); }) == ErrorCode::UnknownNode);
    CHECK(g.author(*g.find_author("a2")).affiliation == "Lab");
}

TEST_CASE("author names are matched on whitespace- and case-normalised keys") {
    MultilayerGraph g;
    g.upsert_publication({{}, "P1", "T1", "", {}, std::nullopt}, std::vector<AuthorName>{{"Wei  Zhang", {}}});
    g.upsert_publication({{}, "P2", "T2", "", {}, std::nullopt}, std::vector<AuthorName>{{"wei zhang", {}}});
    CHECK(g.author_count() == 1);
    CHECK(g.author(AuthorId(0)).n_total == 2);
}

TEST_CASE("Fixture F1 traversals") {
    const auto g = testing::fixture_f1();
    const auto q = mol(g, "Q"), m1 = mol(g, "M1"), m2 = mol(g, "M2"), m3 = mol(g, "M3");
    CHECK(g.related_molecules(q) == std::vector<MoleculeId>{m1, m2});
    CHECK(g.related_molecules(q, true) == std::vector<MoleculeId>{q, m1, m2});
    CHECK(g.related_molecules(m3).empty());

    const std::vector<MoleculeId> both{m1, m2};
    CHECK(pub_ids(g, g.publications_mentioning(both)) == std::vector<std::string>{"P1", "P2", "P3"});
    CHECK(g.publications_mentioning({}).empty());
    auto a = g.publications_mentioning(std::vector<MoleculeId>{m1});
    auto b = g.publications_mentioning(std::vector<MoleculeId>{m2});
    std::vector<PublicationId> u;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
    CHECK(u == g.publications_mentioning(both));

    const auto a1 = *g.find_author("A1"), a2 = *g.find_author("A2");
    CHECK(pub_ids(g, g.author_publications(a1)) == std::vector<std::string>{"P1", "P2", "P4"});
    CHECK(pub_ids(g, g.author_publications(a2)) == std::vector<std::string>{"P1", "P3"});
    CHECK(g.author(a1).n_total == 3);
    CHECK(g.author(a2).n_total == 2);

    const auto c = g.counts();
    CHECK(c == GraphCounts{4, 4, 2, 2, 5, 5});
}

TEST_CASE("structural invariants hold on the bundled corpus") {
    const auto& g = *testing::bundled();
    for (const auto& a : g.authors()) CHECK(a.n_total == g.author_publications(a.id).size());
    for (const auto& m : g.molecules()) {
        for (auto r : g.related_molecules(m.id)) {
            const auto back = g.related_molecules(r);
            CHECK(std::find(back.begin(), back.end(), m.id) != back.end());
            CHECK(r != m.id);
        }
    }
    for (const auto& [key, id] : g.name_index()) CHECK(g.find_molecule(key) == id);
}

TEST_CASE("snapshot round trip preserves ids, revision and every traversal") {
    const auto dir = testing::scratch("graphstore");
    for (const auto* which : {"empty", "f1", "bundled"}) {
        CAPTURE(which);
        MultilayerGraph g;
        if (std::string(which) == "f1") g = testing::fixture_f1();
        if (std::string(which) == "bundled") g = MultilayerGraph(*testing::bundled());
        const auto path = dir / (std::string(which) + ".mlg");
        save_snapshot(g, path);
        const auto back = load_snapshot(path);
        CHECK(all_queries(back) == all_queries(g));
        CHECK(back.counts() == g.counts());
        CHECK(back.revision() == g.revision());

        const auto again = dir / (std::string(which) + "2.mlg");
        save_snapshot(back, again);
        CHECK(slurp(again) == slurp(path));
    }
}

TEST_CASE("snapshot corruption is detected") {
    const auto dir = testing::scratch("graphstore_corrupt");
    const auto path = dir / "f1.mlg";
    save_snapshot(testing::fixture_f1(), path);
    const auto bytes = slurp(path);

    SUBCASE("truncated") {
        spit(path, bytes.substr(0, bytes.size() / 2));
        CHECK(code_of([&] { load_snapshot(path); }) == ErrorCode::ChecksumMismatch);
    }
    SUBCASE("flipped byte") {
        auto bad = bytes;
        bad[bad.size() / 2] = bad[bad.size() / 2] == 'x' ? 'y' : 'x';
        spit(path, bad);
        CHECK(code_of([&] { load_snapshot(path); }) == ErrorCode::ChecksumMismatch);
    }
    SUBCASE("other format version") {
        auto bad = bytes;
        bad.replace(0, 4, "MLG9");
        spit(path, bad);
        CHECK(code_of([&] { load_snapshot(path); }) == ErrorCode::FormatVersionMismatch);
    }
    SUBCASE("missing file") {
        CHECK(code_of([&] { load_snapshot(dir / "nope.mlg"); }) == ErrorCode::IoFailure);
    }
}

TEST_CASE("names with tabs and newlines survive the snapshot encoding") {
    MultilayerGraph g;
    const auto m = g.upsert_molecule("odd\tname", {"line\nbreak", "back\\slash"});
    g.upsert_publication({{}, "X1", "t\tt", "a\nb\r", {"k\\"}, 1999},
                         std::vector<AuthorName>{{"Ann\tLee", std::string("Dept\nX")}});
    g.add_mention(PublicationId(0), m);
    const auto path = testing::scratch("graphstore_escape") / "e.mlg";
    save_snapshot(g, path);
    CHECK(all_queries(load_snapshot(path)) == all_queries(g));
}

TEST_CASE("random graphs round-trip") {
    std::mt19937 rng(5);
    const auto dir = testing::scratch("graphstore_random");
    for (int round = 0; round < 20; ++round) {
        MultilayerGraph g;
        const int nm = 2 + static_cast<int>(rng() % 8);
        for (int i = 0; i < nm; ++i) g.upsert_molecule("m" + std::to_string(i));
        for (int i = 0; i < nm * 2; ++i) {
            const auto a = rng() % nm, b = rng() % nm;
            if (a != b) g.add_interaction(MoleculeId(a), MoleculeId(b));
        }
        for (int p = 0; p < 15; ++p) {
            std::vector<AuthorName> names;
            for (unsigned k = 0; k <= rng() % 3; ++k) names.push_back({"au" + std::to_string(rng() % 6), {}});
            const auto pid = g.upsert_publication({{}, std::to_string(p), "t", "", {}, std::nullopt}, names);
            g.add_mention(pid, MoleculeId(rng() % nm));
        }
        const auto path = dir / "r.mlg";
        save_snapshot(g, path);
        CHECK(all_queries(load_snapshot(path)) == all_queries(g));
    }
}

}
