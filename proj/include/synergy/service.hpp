#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "synergy/countrank.hpp"
#include "synergy/graph.hpp"
#include "synergy/pagerank_store.hpp"
#include "synergy/pathrank.hpp"

namespace synergy {

using ServiceClock = std::function<std::chrono::steady_clock::time_point()>;

struct ServiceConfig {
    std::chrono::seconds cache_ttl{3600};
    std::size_t cache_capacity = 10'000;
    /// Origins allowed by CORS; "*" allows any.
    std::vector<std::string> cors_origins;
    PagerankConfig pagerank;
    /// Precompute every molecule, both variants, whenever a snapshot is loaded.
    bool precompute_on_start = false;
    /// Persist the precompute store here after each precompute run.
    std::optional<std::filesystem::path> store_path;
    /// Defaults to steady_clock::now.
    ServiceClock clock;
};

struct SearchRequest {
    std::string molecule;
    Method method = Method::CountNonNorm;
    std::size_t page = 1;
    std::size_t page_size = 20;
};

inline constexpr std::size_t kMaxPageSize = 100;

/// Validates raw query parameters. Throws ServiceError(400) on a missing molecule, unknown method or
/// out-of-range page / page_size.
SearchRequest parse_search_request(const std::multimap<std::string, std::string>& params);

struct RelatedCount {
    std::string name;
    std::uint32_t pub_count = 0;
};

struct SearchEntry {
    std::size_t rank = 0;
    std::string author;
    std::optional<std::string> affiliation;
    double score = 0.0;
    std::uint32_t n_pc = 0;
    std::uint32_t n_total = 0;
    std::vector<RelatedCount> related_molecules;
};

struct SearchResponse {
    std::string molecule;
    Method method = Method::CountNonNorm;
    std::size_t page = 1;
    std::size_t page_size = 20;
    std::uint64_t revision = 0;
    std::size_t total_results = 0;
    std::size_t total_pages = 0;
    std::vector<SearchEntry> entries;
    /// Serialised JSON body. Byte-stable for a given snapshot and request.
    std::string body;

    // Per-call metadata, reported in response headers rather than the body.
    bool served_from_cache = false;
    std::int64_t compute_ms = 0;
};

/// Service-level failure mapped to an HTTP status.
class ServiceError : public std::runtime_error {
public:
    ServiceError(int status, std::string code, const std::string& message)
        : std::runtime_error(message), status_(status), code_(std::move(code)) {}
    int status() const { return status_; }
    const std::string& code() const { return code_; }

private:
    int status_;
    std::string code_;
};

/// TTL + LRU cache of serialised search pages, keyed by (molecule, method, page, page_size, revision).
class PageCache {
public:
    using Key = std::tuple<std::uint32_t, int, std::size_t, std::size_t, std::uint64_t>;
    using Value = std::shared_ptr<const SearchResponse>;

    PageCache(std::size_t capacity, std::chrono::seconds ttl, ServiceClock clock);

    Value get(const Key& key);
    void put(const Key& key, Value value);
    void clear();
    std::size_t size() const;

private:
    struct Slot {
        Value value;
        std::chrono::steady_clock::time_point expires_at;
        std::list<Key>::iterator lru;
    };

    std::size_t capacity_;
    std::chrono::seconds ttl_;
    ServiceClock clock_;
    mutable std::mutex mutex_;
    std::list<Key> lru_;  // most recent first
    std::map<Key, Slot> slots_;
};

struct HttpResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
    std::map<std::string, std::string> headers;
};

/// Search API over one graph snapshot. All members are safe to call concurrently; load() swaps the
/// snapshot atomically and in-flight requests finish on the snapshot they started with.
class SearchService {
public:
    explicit SearchService(ServiceConfig config = {});

    void load(GraphSnapshot snapshot);
    GraphSnapshot snapshot() const;

    SearchResponse search(const SearchRequest& request);
    PrecomputeStats precompute(const std::vector<std::string>& molecules, const std::vector<Variant>& variants);

    HttpResponse handle_search(const std::multimap<std::string, std::string>& params);
    HttpResponse handle_molecule(std::string_view name) const;
    /// Body: optional JSON object {"molecules": [...], "variants": ["nonnorm", "norm"]}.
    HttpResponse handle_precompute(std::string_view body);
    HttpResponse handle_health() const;

    /// Value for Access-Control-Allow-Origin, if `origin` is allowed.
    std::optional<std::string> cors_origin(std::string_view origin) const;

    const ServiceConfig& config() const { return config_; }
    PageCache& cache() { return cache_; }
    const PagerankStore& store() const { return store_; }

private:
    GraphSnapshot require_snapshot() const;

    ServiceConfig config_;
    mutable std::mutex snapshot_mutex_;
    GraphSnapshot snapshot_;
    std::mutex precompute_mutex_;
    PagerankStore store_;
    PageCache cache_;
};

/// Parses "host:port". Port 0 asks the OS for a free port; an empty host binds all interfaces.
std::optional<std::pair<std::string, int>> parse_listen_address(std::string_view addr);

}  // namespace synergy
