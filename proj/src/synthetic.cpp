#include "synergy/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "synergy/error.hpp"
#include "synergy/random.hpp"
#include "synergy/text.hpp"

namespace synergy {

namespace {

constexpr const char* kFirstNames[] = {
    "Wei",    "Ying",   "Tao",     "Li",      "Jing",   "Maria",  "John",    "Anna",   "David",
    "Sarah",  "Marco",  "Elena",   "Hiroshi", "Yuki",   "Carlos", "Laura",   "Peter",  "Olga",
    "Ahmed",  "Fatima", "Lucas",   "Emma",    "Noah",   "Chen",   "Priya",   "Rahul",  "Ingrid",
    "Sven",   "Nadia",  "Tomasz",  "Aisha",   "Kenji",  "Julia",  "Pablo",   "Mei",    "Omar"};
constexpr const char* kLastNames[] = {
    "Zhang",   "Wang",   "Li",      "Liu",     "Chen",    "Smith",  "Garcia",  "Muller", "Rossi",
    "Tanaka",  "Sato",   "Kim",     "Park",    "Nguyen",  "Kowalski", "Novak", "Silva",  "Santos",
    "Ivanov",  "Petrov", "Johnson", "Brown",   "Davis",   "Martin", "Bernard", "Dubois", "Fischer",
    "Weber",   "Larsen", "Hansen",  "Cohen",   "Levi",    "Patel",  "Singh",   "Khan",   "Ali"};
constexpr const char* kFiller[] = {
    "signaling",  "expression", "microglia",  "neurons",   "pathway",    "regulation", "binding",
    "activation", "cells",      "mice",       "human",     "tissue",     "inflammation", "response",
    "receptor",   "protein",    "variants",   "cohort",    "phenotype",  "function",   "levels",
    "disease",    "model",      "analysis",   "synaptic",  "metabolism", "immune",     "stress"};
constexpr const char* kTopics[] = {"neurodegeneration", "inflammation", "development", "metabolism",
                                   "cancer",            "immunity",     "aging",       "plasticity"};
constexpr const char* kInstitutes[] = {"University of Lakeside", "Northfield Institute", "Riverbend Medical School",
                                       "Hillcrest University",   "Coastal Research Center", "Metro Health Institute"};
constexpr const char* kDepartments[] = {"Neurology", "Immunology", "Biochemistry", "Genetics", "Pathology",
                                        "Cell Biology"};

template <class T, std::size_t N>
const T& pick(const T (&arr)[N], Xoshiro256& rng) {
    return arr[rng.below(N)];
}

bool chance(Xoshiro256& rng, double p) { return rng.unit() < p; }

/// Weighted draw of one index.
std::size_t weighted(const std::vector<double>& w, Xoshiro256& rng) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    double r = rng.unit() * total;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (r < w[i]) return i;
        r -= w[i];
    }
    return w.size() - 1;
}

/// Weighted draw of `count` distinct indices.
std::vector<std::size_t> weighted_distinct(std::vector<double> w, std::size_t count, Xoshiro256& rng) {
    std::vector<std::size_t> out;
    count = std::min(count, static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [](double x) { return x > 0; })));
    while (out.size() < count) {
        const auto i = weighted(w, rng);
        out.push_back(i);
        w[i] = 0.0;
    }
    return out;
}

struct Member {
    std::size_t author;
    std::size_t focus;  // index into the lab's focus list
    double activity;
};

struct Lab {
    std::vector<std::size_t> focus;  // molecule indices
    std::vector<double> focus_weight;
    std::vector<Member> members;    // members[0] is the lead
    std::string affiliation;
};

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticOptions& opt) {
    if (opt.molecules < 3 || opt.communities == 0 || opt.labs == 0)
        throw Error(ErrorCode::InvalidArgument, "synthetic corpus too small");
    Xoshiro256 rng(opt.seed);
    SyntheticCorpus out;

    // Molecule layer: gene-like symbols, always containing a digit so prose never collides.
    std::unordered_set<std::string> taken{text::fold_case(opt.hub_name)};
    out.catalog.push_back({opt.hub_name, {}});
    while (out.catalog.size() < opt.molecules) {
        std::string letters;
        const auto len = 3 + rng.below(2);
        for (std::uint64_t i = 0; i < len; ++i) letters.push_back(static_cast<char>('A' + rng.below(26)));
        const std::string digits = std::to_string(1 + rng.below(19));
        std::string name = letters + digits;
        if (!taken.insert(text::fold_case(name)).second) continue;
        CatalogEntry entry{name, {}};
        if (chance(rng, 0.3)) {
            std::string alias = letters + "-" + digits;
            if (taken.insert(text::fold_case(alias)).second) entry.aliases.insert(alias);
        }
        if (chance(rng, 0.1)) {
            std::string alias = "p" + std::to_string(20 + rng.below(180));
            if (taken.insert(text::fold_case(alias)).second) entry.aliases.insert(alias);
        }
        out.catalog.push_back(std::move(entry));
    }

    const std::size_t n_mol = out.catalog.size();
    std::vector<std::size_t> community(n_mol, 0);
    std::vector<std::vector<std::size_t>> members_of(opt.communities);
    {
        std::vector<std::size_t> order(n_mol - 1);
        std::iota(order.begin(), order.end(), 1);
        order = sample_without_replacement(std::move(order), order.size(), rng);
        for (std::size_t i = 0; i < order.size(); ++i) {
            community[order[i]] = i % opt.communities;
            members_of[i % opt.communities].push_back(order[i]);
        }
    }

    for (std::size_t i = 1; i < n_mol; ++i) {
        for (std::size_t j = i + 1; j < n_mol; ++j) {
            const double p = community[i] == community[j] ? opt.intra_community_edge_p : opt.inter_community_edge_p;
            if (chance(rng, p)) out.interactions.emplace_back(out.catalog[i].name, out.catalog[j].name);
        }
    }
    {
        std::vector<std::size_t> hub_neighbors;
        for (std::size_t round = 0; hub_neighbors.size() < opt.hub_degree && round < n_mol; ++round) {
            auto& pool = members_of[round % opt.communities];
            if (round / opt.communities < pool.size()) hub_neighbors.push_back(pool[round / opt.communities]);
        }
        for (auto m : hub_neighbors) out.interactions.emplace_back(opt.hub_name, out.catalog[m].name);
    }

    // Author layer: labs anchored in one community, a lead, seniors and juniors.
    std::vector<std::string> author_names;
    std::unordered_set<std::string> author_keys;
    auto new_author = [&] {
        while (true) {
            std::string name = std::string(pick(kFirstNames, rng)) + " ";
            if (chance(rng, 0.35)) name += std::string(1, static_cast<char>('A' + rng.below(26))) + " ";
            name += pick(kLastNames, rng);
            if (author_keys.insert(text::fold_case(name)).second) {
                author_names.push_back(name);
                return author_names.size() - 1;
            }
        }
    };

    std::vector<Lab> labs(opt.labs);
    for (std::size_t l = 0; l < opt.labs; ++l) {
        Lab& lab = labs[l];
        const auto& home = members_of[l % opt.communities];
        lab.focus = sample_without_replacement(home, 3 + rng.below(3), rng);
        for (std::size_t i = 0; i < lab.focus.size(); ++i) lab.focus_weight.push_back(i == 0 ? 4.0 : 1.0);
        if (chance(rng, 0.5)) {
            const auto& other = members_of[(l + 1 + rng.below(opt.communities - 1 ? opt.communities - 1 : 1)) % opt.communities];
            const auto extra = other[rng.below(other.size())];
            if (std::find(lab.focus.begin(), lab.focus.end(), extra) == lab.focus.end()) {
                lab.focus.push_back(extra);
                lab.focus_weight.push_back(1.0);
            }
        }
        lab.affiliation = std::string("Department of ") + pick(kDepartments, rng) + ", " + pick(kInstitutes, rng);

        lab.members.push_back({new_author(), 0, 6.0});
        const auto seniors = 1 + rng.below(3);
        for (std::uint64_t i = 0; i < seniors; ++i)
            lab.members.push_back({new_author(), rng.below(lab.focus.size()), 3.0});
        const auto juniors = 3 + rng.below(6);
        for (std::uint64_t i = 0; i < juniors; ++i)
            lab.members.push_back({new_author(), rng.below(lab.focus.size()), 0.5 + rng.unit()});
    }
    // A few seniors also work in a second lab.
    for (std::size_t l = 0; l < opt.labs; ++l) {
        if (labs[l].members.size() < 2 || !chance(rng, 0.2)) continue;
        const auto target = rng.below(opt.labs);
        if (target == l) continue;
        Member guest = labs[l].members[1];
        guest.focus = rng.below(labs[target].focus.size());
        guest.activity = 1.5;
        labs[target].members.push_back(guest);
    }

    std::vector<double> lab_weight;
    for (const auto& lab : labs) lab_weight.push_back(static_cast<double>(lab.members.size()));
    std::vector<std::string> author_affiliation(author_names.size());
    for (const auto& lab : labs)
        for (const auto& m : lab.members)
            if (author_affiliation[m.author].empty()) author_affiliation[m.author] = lab.affiliation;

    // Publication layer.
    for (std::size_t i = 0; i < opt.publications; ++i) {
        const Lab& lab = labs[weighted(lab_weight, rng)];
        std::vector<std::size_t> mentioned;
        if (!chance(rng, opt.unmatched_publication_p)) {
            const double r = rng.unit();
            const std::size_t k = r < 0.65 ? 1 : r < 0.9 ? 2 : 3;
            for (auto idx : weighted_distinct(lab.focus_weight, k, rng)) mentioned.push_back(idx);
        }

        std::vector<std::size_t> authors;
        std::vector<double> w;
        for (std::size_t m = 0; m < lab.members.size(); ++m) {
            const auto& mem = lab.members[m];
            const bool on_topic = std::find(mentioned.begin(), mentioned.end(), mem.focus) != mentioned.end();
            w.push_back(m == 0 ? 0.0 : mem.activity * (on_topic ? 4.0 : 1.0));
        }
        if (chance(rng, 0.75)) authors.push_back(lab.members[0].author);
        for (auto m : weighted_distinct(w, 1 + rng.below(4), rng)) authors.push_back(lab.members[m].author);
        if (chance(rng, 0.08)) {
            const Lab& other = labs[rng.below(labs.size())];
            const auto guest = other.members[rng.below(other.members.size())].author;
            if (std::find(authors.begin(), authors.end(), guest) == authors.end()) authors.push_back(guest);
        }

        std::vector<std::string> names;
        for (auto idx : mentioned) names.push_back(out.catalog[lab.focus[idx]].name);
        if (chance(rng, 0.03)) names.push_back(opt.hub_name);

        PublicationRecord rec;
        rec.pub_id = std::to_string(31000000 + i * 3 + rng.below(3));
        const std::string topic = pick(kTopics, rng);
        rec.title = names.empty() ? "Mechanisms of " + topic + " in model systems"
                                  : "Role of " + names.front() + " in " + topic;
        for (std::size_t s = 0; s < 2 + rng.below(3); ++s) {
            if (!rec.abstract.empty()) rec.abstract += ' ';
            std::string sentence = "We studied";
            for (std::size_t f = 0; f < 4 + rng.below(6); ++f) sentence += std::string(" ") + pick(kFiller, rng);
            rec.abstract += sentence + ".";
        }
        for (const auto& name : names) {
            // Mostly in the abstract, sometimes only as a keyword; the alias form shows up too.
            const auto* entry = &out.catalog.front();
            for (const auto& c : out.catalog)
                if (c.name == name) entry = &c;
            std::string form = name;
            if (!entry->aliases.empty() && chance(rng, 0.25)) form = *entry->aliases.begin();
            if (chance(rng, 0.15)) {
                rec.keywords.push_back(form);
            } else {
                rec.abstract += " Loss of " + form + " altered " + pick(kFiller, rng) + " " + pick(kFiller, rng) + ".";
            }
        }
        rec.keywords.push_back(topic);
        rec.year = 1995 + static_cast<int>(rng.below(25));
        for (auto a : authors) {
            AuthorName an{author_names[a], std::nullopt};
            if (!author_affiliation[a].empty() && chance(rng, 0.8)) an.affiliation = author_affiliation[a];
            rec.authors.push_back(std::move(an));
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

void write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::trunc | std::ios::binary);
        if (!f) throw Error(ErrorCode::IoFailure, "cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("molecules.tsv");
        for (const auto& c : corpus.catalog) {
            f << c.name;
            if (!c.aliases.empty()) {
                f << '\t';
                bool first = true;
                for (const auto& a : c.aliases) {
                    f << (first ? "" : ",") << a;
                    first = false;
                }
            }
            f << '\n';
        }
    }
    {
        auto f = open("interactions.tsv");
        for (const auto& [a, b] : corpus.interactions) f << a << '\t' << b << '\n';
    }
    {
        auto f = open("corpus.jsonl");
        for (const auto& r : corpus.records) f << to_json_line(r) << '\n';
    }
}

LoadedDataset load_dataset(const std::filesystem::path& catalog, const std::filesystem::path& interactions,
                           const std::filesystem::path& corpus, IngestOptions options) {
    LoadedDataset ds;
    load_molecule_catalog(ds.graph, catalog);
    load_interactions(ds.graph, interactions);
    ds.report = ingest_corpus(corpus, ds.graph, options);
    return ds;
}

}  // namespace synergy
