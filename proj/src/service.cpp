#include "synergy/service.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>

#include <json.hpp>

#include "synergy/error.hpp"

namespace synergy {

using nlohmann::json;

namespace {

std::chrono::steady_clock::time_point system_now() { return std::chrono::steady_clock::now(); }

/// Rounds to six significant digits so the serialised score is short and stable.
double six_digits(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return std::strtod(buf, nullptr);
}

std::string error_body(const std::string& code, const std::string& message) {
    return json{{"error", {{"code", code}, {"message", message}}}}.dump();
}

HttpResponse error_response(const ServiceError& e) { return {e.status(), error_body(e.code(), e.what()), "application/json", {}}; }

std::optional<std::size_t> parse_size(std::string_view s) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

const std::string* param(const std::multimap<std::string, std::string>& params, const std::string& key) {
    const auto it = params.find(key);
    return it == params.end() ? nullptr : &it->second;
}

json entry_json(const SearchEntry& e) {
    json related = json::array();
    for (const auto& r : e.related_molecules) related.push_back({{"name", r.name}, {"pub_count", r.pub_count}});
    json out{{"rank", e.rank}, {"author", e.author}};
    out["affiliation"] = e.affiliation ? json(*e.affiliation) : json(nullptr);
    out["score"] = e.score;
    out["n_pc"] = e.n_pc;
    out["n_total"] = e.n_total;
    out["related_molecule_count"] = e.related_molecules.size();
    out["related_molecules"] = std::move(related);
    return out;
}

std::string serialize(const SearchResponse& r) {
    json entries = json::array();
    for (const auto& e : r.entries) entries.push_back(entry_json(e));
    json body{{"query",
               {{"molecule", r.molecule},
                {"method", std::string(to_string(r.method))},
                {"page", r.page},
                {"page_size", r.page_size}}},
              {"revision", r.revision},
              {"total_results", r.total_results},
              {"total_pages", r.total_pages},
              {"entries", std::move(entries)}};
    return body.dump();
}

}  // namespace

SearchRequest parse_search_request(const std::multimap<std::string, std::string>& params) {
    SearchRequest req;
    const auto* molecule = param(params, "molecule");
    if (!molecule || molecule->empty()) throw ServiceError(400, "missing_molecule", "molecule parameter is required");
    req.molecule = *molecule;
    if (const auto* m = param(params, "method")) {
        const auto parsed = parse_method(*m);
        if (!parsed) throw ServiceError(400, "bad_method", "unknown method '" + *m + "'");
        req.method = *parsed;
    }
    if (const auto* p = param(params, "page")) {
        const auto v = parse_size(*p);
        if (!v || *v < 1) throw ServiceError(400, "bad_page", "page must be an integer >= 1");
        req.page = *v;
    }
    if (const auto* p = param(params, "page_size")) {
        const auto v = parse_size(*p);
        if (!v || *v < 1 || *v > kMaxPageSize)
            throw ServiceError(400, "bad_page", "page_size must be an integer in [1, 100]");
        req.page_size = *v;
    }
    return req;
}

// --- PageCache ----------------------------------------------------------------------------------

PageCache::PageCache(std::size_t capacity, std::chrono::seconds ttl, ServiceClock clock)
    : capacity_(capacity), ttl_(ttl), clock_(clock ? std::move(clock) : ServiceClock(system_now)) {}

PageCache::Value PageCache::get(const Key& key) {
    std::lock_guard lock(mutex_);
    const auto it = slots_.find(key);
    if (it == slots_.end()) return nullptr;
    if (clock_() >= it->second.expires_at) {
        lru_.erase(it->second.lru);
        slots_.erase(it);
        return nullptr;
    }
    lru_.splice(lru_.begin(), lru_, it->second.lru);
    return it->second.value;
}

void PageCache::put(const Key& key, Value value) {
    if (capacity_ == 0) return;
    std::lock_guard lock(mutex_);
    const auto expires = clock_() + ttl_;
    if (auto it = slots_.find(key); it != slots_.end()) {
        it->second.value = std::move(value);
        it->second.expires_at = expires;
        lru_.splice(lru_.begin(), lru_, it->second.lru);
        return;
    }
    while (slots_.size() >= capacity_) {
        slots_.erase(lru_.back());
        lru_.pop_back();
    }
    lru_.push_front(key);
    slots_.emplace(key, Slot{std::move(value), expires, lru_.begin()});
}

void PageCache::clear() {
    std::lock_guard lock(mutex_);
    slots_.clear();
    lru_.clear();
}

std::size_t PageCache::size() const {
    std::lock_guard lock(mutex_);
    return slots_.size();
}

// --- SearchService ------------------------------------------------------------------------------

SearchService::SearchService(ServiceConfig config)
    : config_(std::move(config)), cache_(config_.cache_capacity, config_.cache_ttl, config_.clock) {
    if (config_.store_path) store_ = PagerankStore::load(*config_.store_path);
}

void SearchService::load(GraphSnapshot snapshot) {
    if (!snapshot) throw Error(ErrorCode::InvalidArgument, "null snapshot");
    const auto revision = snapshot->revision();
    {
        std::lock_guard lock(snapshot_mutex_);
        snapshot_ = std::move(snapshot);
    }
    store_.invalidate_except(revision);
    // Keys carry the revision, so stale pages could never be served; this just frees them.
    cache_.clear();
    if (config_.precompute_on_start) precompute({}, {});
}

GraphSnapshot SearchService::snapshot() const {
    std::lock_guard lock(snapshot_mutex_);
    return snapshot_;
}

GraphSnapshot SearchService::require_snapshot() const {
    auto snap = snapshot();
    if (!snap) throw ServiceError(503, "not_loaded", "no snapshot loaded");
    return snap;
}

SearchResponse SearchService::search(const SearchRequest& request) {
    const auto start = std::chrono::steady_clock::now();
    const auto graph = require_snapshot();
    if (request.page < 1) throw ServiceError(400, "bad_page", "page must be >= 1");
    if (request.page_size < 1 || request.page_size > kMaxPageSize)
        throw ServiceError(400, "bad_page", "page_size must be in [1, 100]");
    const auto m = graph->find_molecule(request.molecule);
    if (!m) throw ServiceError(404, "unknown_molecule", "unknown molecule '" + request.molecule + "'");

    const PageCache::Key key{m->value, static_cast<int>(request.method), request.page, request.page_size,
                             graph->revision()};
    auto elapsed_ms = [&] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
            .count();
    };
    if (auto hit = cache_.get(key)) {
        SearchResponse out = *hit;
        out.served_from_cache = true;
        out.compute_ms = elapsed_ms();
        return out;
    }

    const auto ranked = rank_authors(*graph, *m, request.method, config_.pagerank, &store_);
    SearchResponse out;
    out.molecule = graph->molecule(*m).canonical_name;
    out.method = request.method;
    out.page = request.page;
    out.page_size = request.page_size;
    out.revision = graph->revision();
    out.total_results = ranked.entries.size();
    out.total_pages = (out.total_results + request.page_size - 1) / request.page_size;

    const std::size_t first = std::min(out.total_results, (request.page - 1) * request.page_size);
    const std::size_t last = std::min(out.total_results, first + request.page_size);
    for (std::size_t i = first; i < last; ++i) {
        const auto& r = ranked.entries[i];
        const auto& author = graph->author(r.author);
        SearchEntry e;
        e.rank = i + 1;
        e.author = author.canonical_name;
        e.affiliation = author.affiliation;
        e.score = six_digits(r.score);
        e.n_pc = r.contribution.n_pc;
        e.n_total = author.n_total;
        for (const auto& [mol, count] : r.contribution.per_molecule)
            e.related_molecules.push_back({graph->molecule(mol).canonical_name, count});
        std::sort(e.related_molecules.begin(), e.related_molecules.end(), [](const auto& a, const auto& b) {
            return a.pub_count != b.pub_count ? a.pub_count > b.pub_count : a.name < b.name;
        });
        out.entries.push_back(std::move(e));
    }
    out.body = serialize(out);
    cache_.put(key, std::make_shared<const SearchResponse>(out));
    out.compute_ms = elapsed_ms();
    return out;
}

PrecomputeStats SearchService::precompute(const std::vector<std::string>& molecules,
                                          const std::vector<Variant>& variants) {
    const auto graph = require_snapshot();
    std::vector<MoleculeId> ids;
    if (molecules.empty()) {
        for (const auto& m : graph->molecules()) ids.push_back(m.id);
    } else {
        for (const auto& name : molecules) {
            const auto m = graph->find_molecule(name);
            if (!m) throw ServiceError(400, "unknown_molecule", "unknown molecule '" + name + "'");
            ids.push_back(*m);
        }
    }
    std::vector<Variant> vs = variants;
    if (vs.empty()) vs.assign(std::begin(kAllVariants), std::end(kAllVariants));

    std::lock_guard lock(precompute_mutex_);
    const auto stats = store_.precompute(*graph, ids, vs, config_.pagerank);
    if (config_.store_path && stats.stored > 0) store_.save(*config_.store_path);
    return stats;
}

HttpResponse SearchService::handle_search(const std::multimap<std::string, std::string>& params) {
    try {
        const auto r = search(parse_search_request(params));
        HttpResponse resp{200, r.body, "application/json", {}};
        resp.headers["X-Cache"] = r.served_from_cache ? "HIT" : "MISS";
        resp.headers["X-Compute-Ms"] = std::to_string(r.compute_ms);
        return resp;
    } catch (const ServiceError& e) {
        return error_response(e);
    }
}

HttpResponse SearchService::handle_molecule(std::string_view name) const {
    try {
        const auto graph = require_snapshot();
        const auto m = graph->find_molecule(name);
        if (!m) throw ServiceError(404, "unknown_molecule", "unknown molecule '" + std::string(name) + "'");
        const auto& node = graph->molecule(*m);
        std::vector<std::string> related;
        for (auto n : graph->interaction_neighbors(*m)) related.push_back(graph->molecule(n).canonical_name);
        std::sort(related.begin(), related.end());
        json body{{"name", node.canonical_name},
                  {"aliases", node.aliases},
                  {"degree", related.size()},
                  {"publication_count", graph->publications_of_molecule(*m).size()},
                  {"related", related}};
        return {200, body.dump(), "application/json", {}};
    } catch (const ServiceError& e) {
        return error_response(e);
    }
}

HttpResponse SearchService::handle_precompute(std::string_view body) {
    try {
        std::vector<std::string> molecules;
        std::vector<Variant> variants;
        if (body.find_first_not_of(" \t\r\n") != std::string_view::npos) {
            const auto doc = json::parse(body, nullptr, false);
            if (doc.is_discarded() || !doc.is_object())
                throw ServiceError(400, "bad_request", "body must be a JSON object");
            if (doc.contains("molecules")) {
                const auto& ms = doc["molecules"];
                if (!ms.is_array()) throw ServiceError(400, "bad_request", "molecules must be an array");
                for (const auto& m : ms) {
                    if (!m.is_string()) throw ServiceError(400, "bad_request", "molecule names must be strings");
                    molecules.push_back(m.get<std::string>());
                }
            }
            if (doc.contains("variants")) {
                const auto& vs = doc["variants"];
                if (!vs.is_array()) throw ServiceError(400, "bad_request", "variants must be an array");
                for (const auto& v : vs) {
                    const auto s = v.is_string() ? v.get<std::string>() : std::string();
                    if (s == "nonnorm") {
                        variants.push_back(Variant::NonNormalized);
                    } else if (s == "norm") {
                        variants.push_back(Variant::Normalized);
                    } else {
                        throw ServiceError(400, "bad_request", "variants must be \"nonnorm\" or \"norm\"");
                    }
                }
            }
        }
        const auto stats = precompute(molecules, variants);
        json out{{"stored", stats.stored}, {"skipped", stats.skipped}, {"empty", stats.empty}};
        return {200, out.dump(), "application/json", {}};
    } catch (const ServiceError& e) {
        return error_response(e);
    }
}

HttpResponse SearchService::handle_health() const {
    const auto graph = snapshot();
    if (!graph) return {503, json{{"status", "not_loaded"}}.dump(), "application/json", {}};
    const auto c = graph->counts();
    json body{{"status", "ok"},
              {"revision", graph->revision()},
              {"counts",
               {{"molecules", c.molecules},
                {"publications", c.publications},
                {"authors", c.authors},
                {"interactions", c.interactions},
                {"mentions", c.mentions},
                {"authored", c.authored}}}};
    return {200, body.dump(), "application/json", {}};
}

std::optional<std::string> SearchService::cors_origin(std::string_view origin) const {
    for (const auto& allowed : config_.cors_origins) {
        if (allowed == "*") return std::string("*");
        if (!origin.empty() && allowed == origin) return std::string(origin);
    }
    return std::nullopt;
}

std::optional<std::pair<std::string, int>> parse_listen_address(std::string_view addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string_view::npos) return std::nullopt;
    std::string host(addr.substr(0, colon));
    const auto port_str = addr.substr(colon + 1);
    const auto port = parse_size(port_str);
    if (!port || *port > 65535) return std::nullopt;
    if (host.size() >= 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
    if (host.empty()) host = "0.0.0.0";
    if (host.find_first_of(" /\t") != std::string::npos) return std::nullopt;
    return std::pair{host, static_cast<int>(*port)};
}

}  // namespace synergy
