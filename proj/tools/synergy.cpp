// Command-line entry point: ingest, query, precompute, serve, experiments and remote fetch.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "synergy/analysis.hpp"
#include "synergy/error.hpp"
#include "synergy/eutils.hpp"
#include "synergy/http_server.hpp"
#include "synergy/ingest.hpp"
#include "synergy/pagerank_store.hpp"
#include "synergy/service.hpp"
#include "synergy/snapshot.hpp"
#include "synergy/synthetic.hpp"

namespace {

using namespace synergy;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNotFound = 3;
constexpr int kExitRemote = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw UsageError(std::string("missing ") + what);
    if (!std::filesystem::is_regular_file(path)) throw UsageError(std::string(what) + " not found: " + path);
}

GraphSnapshot open_snapshot(std::string path) {
    if (path.empty()) path = env_or("SYNERGY_SNAPSHOT", "");
    if (path.empty()) throw UsageError("--snapshot is required (or set SYNERGY_SNAPSHOT)");
    require_file(path, "snapshot");
    return load_shared_snapshot(path);
}

MoleculeId resolve(const MultilayerGraph& g, const std::string& name) {
    const auto m = g.find_molecule(name);
    if (!m) throw NotFound("unknown molecule: " + name);
    return *m;
}

std::string format_score(Method method, double score) {
    char buf[32];
    std::snprintf(buf, sizeof buf, method == Method::CountNonNorm ? "%.0f" : "%.6g", score);
    return buf;
}

std::vector<Variant> parse_variants(const std::vector<std::string>& names) {
    std::vector<Variant> out;
    for (const auto& n : names) {
        if (n == "nonnorm") {
            out.push_back(Variant::NonNormalized);
        } else if (n == "norm") {
            out.push_back(Variant::Normalized);
        } else {
            throw UsageError("unknown variant '" + n + "' (expected nonnorm or norm)");
        }
    }
    if (out.empty()) out.assign(std::begin(kAllVariants), std::end(kAllVariants));
    return out;
}

std::string stats_json(const PrecomputeStats& s) {
    std::ostringstream os;
    os << "{\"stored\":" << s.stored << ",\"skipped\":" << s.skipped << ",\"empty\":" << s.empty << "}";
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collaborator search over a molecule / publication / author graph"};
    app.require_subcommand(1);
    std::function<void()> action;

    // --- ingest ---
    std::string catalog, interactions, corpus, out_path;
    bool no_titles = false;
    auto* ingest = app.add_subcommand("ingest", "Build a snapshot from catalog, interaction and corpus files");
    ingest->add_option("--catalog", catalog, "Molecule catalog TSV")->required();
    ingest->add_option("--interactions", interactions, "Interaction pairs TSV")->required();
    ingest->add_option("--corpus", corpus, "Line-delimited JSON publications")->required();
    ingest->add_option("--out", out_path, "Snapshot to write")->required();
    ingest->add_flag("--no-titles", no_titles, "Do not scan titles for mentions");
    ingest->callback([&] {
        action = [&] {
            require_file(catalog, "catalog");
            require_file(interactions, "interactions file");
            require_file(corpus, "corpus");
            IngestOptions opts;
            opts.match_titles = !no_titles;
            auto ds = load_dataset(catalog, interactions, corpus, opts);
            save_snapshot(ds.graph, out_path);
            std::cout << to_json(ds.report) << '\n';
        };
    });

    // --- query ---
    std::string snapshot_path, molecule, method_name = "count_nonnorm", cache_path;
    std::size_t top = 0;
    bool pretty = false;
    auto* query = app.add_subcommand("query", "Rank collaborators for one molecule (TSV on stdout)");
    query->add_option("--snapshot", snapshot_path, "Snapshot file (default $SYNERGY_SNAPSHOT)");
    query->add_option("--molecule", molecule, "Molecule name or alias")->required();
    query->add_option("--method", method_name,
                      "hypergeometric | count_nonnorm | count_norm | pagerank_nonnorm | pagerank_norm");
    query->add_option("--top", top, "Only the first N rows");
    query->add_option("--cache", cache_path, "Precompute store to read PageRank scores from");
    query->add_flag("--pretty", pretty, "Aligned columns for reading");
    query->callback([&] {
        action = [&] {
            const auto method = parse_method(method_name);
            if (!method) throw UsageError("unknown method '" + method_name + "'");
            const auto graph = open_snapshot(snapshot_path);
            const auto m = resolve(*graph, molecule);
            std::optional<PagerankStore> store;
            if (!cache_path.empty()) store = PagerankStore::load(cache_path);
            const auto ranked = rank_authors(*graph, m, *method, {}, store ? &*store : nullptr);

            std::vector<std::vector<std::string>> rows;
            rows.push_back({"rank", "author", "score", "related_molecules"});
            const std::size_t n = top ? std::min(top, ranked.entries.size()) : ranked.entries.size();
            for (std::size_t i = 0; i < n; ++i) {
                const auto& e = ranked.entries[i];
                std::string related;
                for (const auto& [mol, count] : e.contribution.per_molecule) {
                    if (!related.empty()) related += ',';
                    related += graph->molecule(mol).canonical_name + ":" + std::to_string(count);
                }
                rows.push_back({std::to_string(i + 1), graph->author(e.author).canonical_name,
                                format_score(*method, e.score), related});
            }
            if (pretty) {
                std::vector<std::size_t> width(4, 0);
                for (const auto& r : rows)
                    for (std::size_t c = 0; c < 4; ++c) width[c] = std::max(width[c], r[c].size());
                for (const auto& r : rows) {
                    for (std::size_t c = 0; c < 4; ++c)
                        std::cout << std::left << std::setw(static_cast<int>(c + 1 < 4 ? width[c] + 2 : 0)) << r[c];
                    std::cout << '\n';
                }
            } else {
                for (const auto& r : rows) std::cout << r[0] << '\t' << r[1] << '\t' << r[2] << '\t' << r[3] << '\n';
            }
        };
    });

    // --- precompute ---
    std::vector<std::string> molecules, variant_names;
    auto* pre = app.add_subcommand("precompute", "Store PageRank scores for later queries");
    pre->add_option("--snapshot", snapshot_path, "Snapshot file (default $SYNERGY_SNAPSHOT)");
    pre->add_option("--cache", cache_path, "Precompute store file")->required();
    pre->add_option("--molecules", molecules, "Molecules to precompute (default all)");
    pre->add_option("--variants", variant_names, "nonnorm and/or norm (default both)");
    pre->callback([&] {
        action = [&] {
            const auto variants = parse_variants(variant_names);
            const auto graph = open_snapshot(snapshot_path);
            std::vector<MoleculeId> ids;
            if (molecules.empty()) {
                for (const auto& m : graph->molecules()) ids.push_back(m.id);
            } else {
                for (const auto& name : molecules) ids.push_back(resolve(*graph, name));
            }
            std::cout << stats_json(precompute(*graph, ids, variants, {}, cache_path)) << '\n';
        };
    });

    // --- serve ---
    std::string listen = "127.0.0.1:8080";
    long ttl = 3600;
    std::size_t cache_size = 10'000;
    bool precompute_on_start = false;
    std::vector<std::string> cors;
    auto* serve = app.add_subcommand("serve", "Run the HTTP search API");
    serve->add_option("--snapshot", snapshot_path, "Snapshot file (default $SYNERGY_SNAPSHOT)");
    serve->add_option("--cache", cache_path, "Precompute store file");
    serve->add_option("--listen", listen, "host:port")->capture_default_str();
    serve->add_option("--cache-ttl", ttl, "Page cache TTL in seconds")->capture_default_str();
    serve->add_option("--cache-size", cache_size, "Page cache capacity")->capture_default_str();
    serve->add_flag("--precompute", precompute_on_start, "Precompute all PageRank tables at startup");
    serve->add_option("--cors-origin", cors, "Allowed CORS origin (repeatable, * for any)");
    serve->callback([&] {
        action = [&] {
            const auto addr = parse_listen_address(listen);
            if (!addr) throw UsageError("bad listen address: " + listen);
            if (ttl < 0) throw UsageError("--cache-ttl must be non-negative");
            ServiceConfig cfg;
            cfg.cache_ttl = std::chrono::seconds(ttl);
            cfg.cache_capacity = cache_size;
            cfg.cors_origins = cors;
            cfg.precompute_on_start = precompute_on_start;
            if (!cache_path.empty()) cfg.store_path = cache_path;
            SearchService service(cfg);
            service.load(open_snapshot(snapshot_path));
            HttpServer server(service);
            const int port = server.bind(addr->first, addr->second);
            if (port < 0) throw UsageError("cannot listen on " + listen);
            std::cerr << "listening on " << addr->first << ':' << port << '\n';
            if (!server.listen()) throw std::runtime_error("listener failed");
        };
    });

    // --- experiment ---
    auto* exp = app.add_subcommand("experiment", "Ranking comparison and validation experiments");
    exp->require_subcommand(1);
    std::size_t top_t = 120;
    std::string out_dir;
    auto* rc = exp->add_subcommand("rank-compare", "Cross-rank scatter CSVs and correlation summary");
    rc->add_option("--snapshot", snapshot_path, "Snapshot file (default $SYNERGY_SNAPSHOT)");
    rc->add_option("--molecule", molecule, "Query molecule")->required();
    rc->add_option("--top-t", top_t, "Authors taken from the first ranking")->capture_default_str();
    rc->add_option("--out", out_dir, "Output directory")->required();
    rc->add_option("--cache", cache_path, "Precompute store file");
    rc->callback([&] {
        action = [&] {
            if (top_t == 0) throw UsageError("--top-t must be positive");
            const auto graph = open_snapshot(snapshot_path);
            const auto m = resolve(*graph, molecule);
            std::optional<PagerankStore> store;
            if (!cache_path.empty()) store = PagerankStore::load(cache_path);
            const auto res = rank_compare(*graph, m, top_t, out_dir, {}, store ? &*store : nullptr);
            std::ifstream summary(res.files.back());
            std::cout << summary.rdbuf();
        };
    });

    ValidationConfig vcfg;
    auto* val = exp->add_subcommand("validate", "Coauthor proximity contingency table and odds ratio");
    val->add_option("--snapshot", snapshot_path, "Snapshot file (default $SYNERGY_SNAPSHOT)");
    val->add_option("--seed", vcfg.seed, "Sampling seed")->capture_default_str();
    val->add_option("--out", out_dir, "Output directory")->required();
    val->add_option("--molecules", vcfg.n_molecules, "Random molecules sampled")->capture_default_str();
    val->add_option("--authors", vcfg.n_authors, "Authors sampled")->capture_default_str();
    val->add_option("--min-pubs", vcfg.min_pubs, "Minimum publications per sampled author")->capture_default_str();
    val->callback([&] {
        action = [&] {
            const auto graph = open_snapshot(snapshot_path);
            const auto res = validation_experiment(*graph, vcfg);
            const auto body = validation_json(res);
            std::filesystem::create_directories(out_dir);
            std::ofstream(std::filesystem::path(out_dir) / "validation.json") << body << '\n';
            std::cout << body << '\n';
        };
    });

    std::size_t reps = 5;
    auto* tim = exp->add_subcommand("timing", "Mean and variance of ranking latency per method");
    tim->add_option("--snapshot", snapshot_path, "Snapshot file (default $SYNERGY_SNAPSHOT)");
    tim->add_option("--molecules", molecules, "Query molecules")->required();
    tim->add_option("--repetitions", reps, "Passes over the molecules")->capture_default_str();
    tim->add_option("--out", out_dir, "Output directory")->required();
    tim->callback([&] {
        action = [&] {
            const auto graph = open_snapshot(snapshot_path);
            std::vector<MoleculeId> ids;
            for (const auto& name : molecules) ids.push_back(resolve(*graph, name));
            std::vector<TimedMethod> methods;
            for (auto m : kAllMethods) {
                methods.push_back({m, false});
                if (is_pagerank(m)) methods.push_back({m, true});
            }
            const auto stats = timing_harness(*graph, ids, methods, reps);
            std::filesystem::create_directories(out_dir);
            write_timing_csv(std::filesystem::path(out_dir) / "timing.csv", stats);
            std::cout << "method\tmean_s\tvar_s\n";
            for (const auto& s : stats) std::cout << s.label << '\t' << s.mean_s << '\t' << s.var_s << '\n';
        };
    });

    // --- fetch ---
    std::string term, base_url = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils", api_key;
    std::size_t max_records = 100, batch = 200;
    auto* fetch = app.add_subcommand("fetch", "Download publication records from an E-utilities endpoint");
    fetch->add_option("--query", term, "Search term")->required();
    fetch->add_option("--max", max_records, "Maximum records")->capture_default_str();
    fetch->add_option("--base-url", base_url, "E-utilities root URL")->capture_default_str();
    fetch->add_option("--out", out_path, "Corpus file to write")->required();
    fetch->add_option("--api-key", api_key, "API key (default $SYNERGY_API_KEY)");
    fetch->add_option("--batch-size", batch, "Records per efetch call")->capture_default_str();
    fetch->callback([&] {
        action = [&] {
            RemoteConfig cfg;
            cfg.base_url = base_url;
            cfg.batch_size = batch;
            const auto key = api_key.empty() ? env_or("SYNERGY_API_KEY", "") : api_key;
            if (!key.empty()) cfg.api_key = key;
            if (!key.empty()) cfg.requests_per_second = 10;
            const auto res = fetch_remote(term, max_records, cfg);
            std::ofstream out(out_path, std::ios::trunc);
            if (!out) throw UsageError("cannot write " + out_path);
            for (const auto& r : res.records) out << to_json_line(r) << '\n';
            std::cerr << "fetched " << res.records.size() << " records in " << res.requests << " requests ("
                      << res.retries << " retries, " << res.parse_failures << " unparsable)\n";
        };
    });

    // --- generate-synthetic ---
    SyntheticOptions syn;
    auto* gen = app.add_subcommand("generate-synthetic", "Write the deterministic benchmark corpus");
    gen->add_option("--out", out_dir, "Output directory")->required();
    gen->add_option("--seed", syn.seed, "Generator seed")->capture_default_str();
    gen->add_option("--publications", syn.publications, "Number of records")->capture_default_str();
    gen->callback([&] {
        action = [&] {
            write_synthetic(generate_synthetic(syn), out_dir);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (action) action();
        return kExitOk;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NotFound& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNotFound;
    } catch (const HttpError& e) {
        std::cerr << "remote error: " << e.what() << '\n';
        return kExitRemote;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.code()) {
            case ErrorCode::RateLimited:
            case ErrorCode::NetworkTimeout:
            case ErrorCode::HttpError: return kExitRemote;
            default: return kExitUsage;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
