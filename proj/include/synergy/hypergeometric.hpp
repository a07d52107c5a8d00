#pragma once

#include <cstdint>
#include <vector>

namespace synergy {

/// Table of ln(i!) for i in [0, size). Grows on demand; not thread-safe while growing,
/// so give each thread (or each query) its own instance.
class LogFactorialTable {
public:
    explicit LogFactorialTable(std::uint64_t max_n = 0);

    void reserve(std::uint64_t max_n);
    double operator()(std::uint64_t n);
    double log_choose(std::uint64_t n, std::uint64_t k);

private:
    std::vector<double> table_;
};

/// Parameters of an upper-tail hypergeometric test:
/// population N, successes K in the population, sample size n, observed successes k.
struct HypergeomQuery {
    std::uint64_t population = 0;
    std::uint64_t successes = 0;
    std::uint64_t sample = 0;
    std::uint64_t observed = 0;
};

/// ln P(X = i) for X ~ Hypergeometric(N, K, n).
double hypergeom_log_pmf(const HypergeomQuery& q, std::uint64_t i, LogFactorialTable& lf);

/// P(X >= k), summed in log space with the largest term factored out. Result clamped to [0, 1].
/// Throws Error(InvalidParams) unless K <= N, k <= n <= N and k <= K.
double hypergeom_sf(const HypergeomQuery& q, LogFactorialTable& lf);
double hypergeom_sf(const HypergeomQuery& q);

}  // namespace synergy
