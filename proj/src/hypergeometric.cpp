#include "synergy/hypergeometric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "synergy/error.hpp"

namespace synergy {

LogFactorialTable::LogFactorialTable(std::uint64_t max_n) : table_{0.0} { reserve(max_n); }

void LogFactorialTable::reserve(std::uint64_t max_n) {
    if (table_.size() > max_n) return;
    table_.reserve(max_n + 1);
    for (std::uint64_t i = table_.size(); i <= max_n; ++i)
        table_.push_back(table_.back() + std::log(static_cast<double>(i)));
}

double LogFactorialTable::operator()(std::uint64_t n) {
    reserve(n);
    return table_[n];
}

double LogFactorialTable::log_choose(std::uint64_t n, std::uint64_t k) {
    if (k > n) return -std::numeric_limits<double>::infinity();
    reserve(n);
    return table_[n] - table_[k] - table_[n - k];
}

double hypergeom_log_pmf(const HypergeomQuery& q, std::uint64_t i, LogFactorialTable& lf) {
    const auto N = q.population, K = q.successes, n = q.sample;
    if (i > K || i > n || n - i > N - K) return -std::numeric_limits<double>::infinity();
    return lf.log_choose(K, i) + lf.log_choose(N - K, n - i) - lf.log_choose(N, n);
}

double hypergeom_sf(const HypergeomQuery& q, LogFactorialTable& lf) {
    const auto N = q.population, K = q.successes, n = q.sample, k = q.observed;
    if (K > N || n > N || k > n || k > K) {
        throw Error(ErrorCode::InvalidParams,
                    "N=" + std::to_string(N) + " K=" + std::to_string(K) + " n=" +
                        std::to_string(n) + " k=" + std::to_string(k));
    }
    const std::uint64_t lo = n + K > N ? n + K - N : 0;
    const std::uint64_t hi = std::min(n, K);
    if (k <= lo) return 1.0;

    lf.reserve(N);
    std::vector<double> terms;
    terms.reserve(hi - k + 1);
    double max_term = -std::numeric_limits<double>::infinity();
    for (std::uint64_t i = k; i <= hi; ++i) {
        terms.push_back(hypergeom_log_pmf(q, i, lf));
        max_term = std::max(max_term, terms.back());
    }
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - max_term);
    const double p = std::exp(max_term + std::log(sum));
    return std::clamp(p, 0.0, 1.0);
}

double hypergeom_sf(const HypergeomQuery& q) {
    thread_local LogFactorialTable table;
    return hypergeom_sf(q, table);
}

}  // namespace synergy
