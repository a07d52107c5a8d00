#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synergy/ingest.hpp"

namespace synergy {

/// Time source for the remote client; tests substitute a simulated clock.
struct ClientClock {
    using time_point = std::chrono::steady_clock::time_point;
    using duration = std::chrono::steady_clock::duration;

    std::function<time_point()> now;
    std::function<void(duration)> sleep;

    static ClientClock system();
};

/// Sliding-window limiter: at most `max_requests` acquisitions in any window of `window` length.
class RateLimiter {
public:
    RateLimiter(std::size_t max_requests, ClientClock::duration window, ClientClock clock);

    /// Blocks (through the clock) until a request may leave, then records it.
    void acquire();

private:
    std::size_t max_requests_;
    ClientClock::duration window_;
    ClientClock clock_;
    std::deque<ClientClock::time_point> sent_;
    std::mutex mutex_;
};

struct RemoteConfig {
    /// E-utilities root, e.g. `https://eutils.ncbi.nlm.nih.gov/entrez/eutils`.
    std::string base_url;
    std::optional<std::string> api_key;
    std::string database = "pubmed";
    std::size_t requests_per_second = 3;
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    std::size_t batch_size = 200;
    std::chrono::seconds timeout{30};
    /// Defaults to the system clock when unset.
    std::optional<ClientClock> clock;
};

struct FetchResult {
    std::vector<PublicationRecord> records;
    /// Articles dropped because the XML lacked required fields.
    std::size_t parse_failures = 0;
    std::size_t requests = 0;
    std::size_t retries = 0;
};

struct ParsedArticles {
    std::vector<PublicationRecord> records;
    std::size_t failures = 0;
};

/// Extracts the `<IdList><Id>` values of an esearch response.
std::vector<std::string> parse_esearch_ids(std::string_view xml);

/// Parses the PubmedArticle subset we use: PMID, ArticleTitle, AbstractText, KeywordList,
/// AuthorList (with AffiliationInfo) and PubDate/Year.
ParsedArticles parse_pubmed_xml(std::string_view xml);

/// Search followed by batched fetches against an E-utilities-compatible endpoint.
/// Throws HttpError, Error(RateLimited) or Error(NetworkTimeout) once retries are exhausted.
FetchResult fetch_remote(const std::string& query, std::size_t max_records, const RemoteConfig& config);

}  // namespace synergy
