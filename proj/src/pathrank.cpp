#include "synergy/pathrank.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "synergy/error.hpp"
#include "synergy/pagerank_store.hpp"

namespace synergy {

namespace {

using PairKey = std::uint64_t;

PairKey pair_key(AuthorId a, AuthorId b) {
    if (b < a) std::swap(a, b);
    return (static_cast<std::uint64_t>(a.value) << 32) | b.value;
}

AuthorId first_of(PairKey k) { return AuthorId(static_cast<std::uint32_t>(k >> 32)); }
AuthorId second_of(PairKey k) { return AuthorId(static_cast<std::uint32_t>(k & 0xffffffffu)); }

template <class Fn>
void for_each_pair(const MultilayerGraph& graph, PublicationId p, std::vector<AuthorId>& scratch, Fn&& fn) {
    const auto authors = graph.publication_authors(p);
    scratch.assign(authors.begin(), authors.end());
    std::sort(scratch.begin(), scratch.end());
    for (std::size_t i = 0; i < scratch.size(); ++i)
        for (std::size_t j = i + 1; j < scratch.size(); ++j) fn(pair_key(scratch[i], scratch[j]));
}

}  // namespace

std::string_view to_string(Variant v) { return v == Variant::Normalized ? "norm" : "nonnorm"; }

double normalized_collaboration_weight(std::uint64_t m_xy, std::uint64_t n_x, std::uint64_t n_y) {
    if (n_x == 0 || n_y == 0) throw Error(ErrorCode::ZeroTotal, "author with no publications");
    return static_cast<double>(m_xy) /
           std::sqrt(static_cast<double>(n_x) * static_cast<double>(n_y));
}

CoauthorSubnetwork build_subnetwork(const MultilayerGraph& graph, MoleculeId m, Variant variant,
                                    const PagerankConfig& cfg) {
    CoauthorSubnetwork net;
    net.query = m;
    net.variant = variant;
    net.built_at_revision = graph.revision();
    const auto related = graph.related_molecules(m, cfg.include_self);
    if (related.empty()) return net;

    std::vector<AuthorId> scratch;
    std::unordered_set<PairKey> kept;
    for (auto r : related) {
        std::unordered_map<PairKey, std::uint32_t> counts;
        for (auto p : graph.publications_of_molecule(r))
            for_each_pair(graph, p, scratch, [&](PairKey k) { ++counts[k]; });
        std::vector<std::pair<PairKey, std::uint32_t>> ranked(counts.begin(), counts.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        std::size_t keep = std::min(ranked.size(), cfg.top_pairs_per_molecule);
        if (keep > 0) {
            const auto cutoff = ranked[keep - 1].second;
            while (keep < ranked.size() && ranked[keep].second == cutoff) ++keep;
        }
        for (std::size_t i = 0; i < keep; ++i) kept.insert(ranked[i].first);
    }

    const auto pubs = graph.publications_mentioning(related);
    std::unordered_map<PairKey, std::uint32_t> m_xy;
    for (auto p : pubs) {
        for (auto a : graph.publication_authors(p)) net.nodes.push_back(a);
        for_each_pair(graph, p, scratch, [&](PairKey k) {
            if (kept.count(k)) ++m_xy[k];
        });
    }
    std::sort(net.nodes.begin(), net.nodes.end());
    net.nodes.erase(std::unique(net.nodes.begin(), net.nodes.end()), net.nodes.end());

    std::vector<PairKey> keys(kept.begin(), kept.end());
    std::sort(keys.begin(), keys.end());
    net.edges.reserve(keys.size());
    for (auto k : keys) {
        CoauthorEdge e{first_of(k), second_of(k), m_xy.at(k), 0.0};
        e.weight = variant == Variant::Normalized
                       ? normalized_collaboration_weight(e.m_xy, graph.author(e.x).n_total,
                                                         graph.author(e.y).n_total)
                       : static_cast<double>(e.m_xy);
        net.edges.push_back(e);
    }
    return net;
}

PagerankResult pagerank(const CoauthorSubnetwork& net, const PagerankConfig& cfg) {
    const std::size_t n = net.nodes.size();
    if (n == 0) throw Error(ErrorCode::EmptyNetwork, "subnetwork has no nodes");
    if (!(cfg.damping > 0.0 && cfg.damping < 1.0))
        throw Error(ErrorCode::InvalidArgument, "damping must lie in (0, 1)");

    auto index_of = [&](AuthorId a) {
        const auto it = std::lower_bound(net.nodes.begin(), net.nodes.end(), a);
        if (it == net.nodes.end() || *it != a)
            throw Error(ErrorCode::UnknownNode, "edge endpoint outside subnetwork");
        return static_cast<std::size_t>(it - net.nodes.begin());
    };

    // Compressed adjacency, neighbours in edge order so summation order is fixed.
    std::vector<std::size_t> degree(n, 0);
    std::vector<std::pair<std::size_t, std::size_t>> ends;
    ends.reserve(net.edges.size());
    for (const auto& e : net.edges) {
        ends.emplace_back(index_of(e.x), index_of(e.y));
        ++degree[ends.back().first];
        ++degree[ends.back().second];
    }
    std::vector<std::size_t> offset(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) offset[i + 1] = offset[i] + degree[i];
    std::vector<std::size_t> target(offset[n]);
    std::vector<double> weight(offset[n]);
    std::vector<double> strength(n, 0.0);
    {
        std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
        for (std::size_t i = 0; i < ends.size(); ++i) {
            const auto [u, v] = ends[i];
            const double w = net.edges[i].weight;
            target[fill[u]] = v;
            weight[fill[u]++] = w;
            target[fill[v]] = u;
            weight[fill[v]++] = w;
            strength[u] += w;
            strength[v] += w;
        }
    }

    std::vector<double> teleport(n, 1.0 / static_cast<double>(n));
    if (!cfg.personalization.empty()) {
        std::vector<double> t(n, 0.0);
        double total = 0.0;
        for (const auto& [a, w] : cfg.personalization) {
            const auto it = std::lower_bound(net.nodes.begin(), net.nodes.end(), a);
            if (it == net.nodes.end() || *it != a || !(w > 0.0)) continue;
            t[static_cast<std::size_t>(it - net.nodes.begin())] += w;
            total += w;
        }
        if (total > 0.0) {
            for (auto& v : t) v /= total;
            teleport = std::move(t);
        }
    }

    const double d = cfg.damping;
    const double uniform = 1.0 / static_cast<double>(n);
    std::vector<double> x(n, uniform), next(n);
    PagerankResult result;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        double dangling = 0.0;
        for (std::size_t u = 0; u < n; ++u)
            if (!(strength[u] > 0.0)) dangling += x[u];
        for (std::size_t v = 0; v < n; ++v) next[v] = (1.0 - d) * teleport[v] + d * dangling * uniform;
        for (std::size_t u = 0; u < n; ++u) {
            if (!(strength[u] > 0.0)) continue;
            const double share = d * x[u] / strength[u];
            for (std::size_t k = offset[u]; k < offset[u + 1]; ++k) next[target[k]] += share * weight[k];
        }
        double delta = 0.0;
        for (std::size_t v = 0; v < n; ++v) delta += std::abs(next[v] - x[v]);
        x.swap(next);
        result.iterations = it + 1;
        result.last_delta = delta;
        if (delta < cfg.tolerance) {
            result.converged = true;
            break;
        }
    }

    double sum = 0.0;
    for (double v : x) sum += v;
    result.scores.reserve(n);
    for (std::size_t i = 0; i < n; ++i) result.scores.emplace_back(net.nodes[i], x[i] / sum);
    return result;
}

RankedList rank_pagerank(const MultilayerGraph& graph, MoleculeId m, Variant variant,
                         const PagerankConfig& cfg, const PagerankStore* store) {
    RankedList list{method_of(variant), m, {}};

    std::shared_ptr<const ScoreTable> scores;
    if (store) scores = store->lookup(m, variant, graph.revision());
    if (!scores) {
        const auto net = build_subnetwork(graph, m, variant, cfg);
        if (net.nodes.empty()) return list;
        scores = std::make_shared<const ScoreTable>(pagerank(net, cfg).scores);
    }

    auto contribs = contributions(graph, m, cfg.include_self);
    list.entries.reserve(scores->size());
    auto c = contribs.begin();
    for (const auto& [author, score] : *scores) {
        // Both sequences are ascending by author id.
        while (c != contribs.end() && c->author < author) ++c;
        RankedEntry entry{author, score, {}};
        if (c != contribs.end() && c->author == author) {
            entry.contribution = std::move(*c);
        } else {
            entry.contribution.author = author;
            entry.contribution.n_total = graph.author(author).n_total;
        }
        list.entries.push_back(std::move(entry));
    }
    std::sort(list.entries.begin(), list.entries.end(), [&](const RankedEntry& a, const RankedEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        const auto& na = graph.author(a.author).canonical_name;
        const auto& nb = graph.author(b.author).canonical_name;
        if (na != nb) return na < nb;
        return a.author < b.author;
    });
    return list;
}

RankedList rank_authors(const MultilayerGraph& graph, MoleculeId m, Method method,
                        const PagerankConfig& cfg, const PagerankStore* store) {
    switch (method) {
        case Method::Hypergeometric: return rank_hypergeometric(graph, m, cfg.include_self);
        case Method::CountNonNorm: return rank_count(graph, m, false, cfg.include_self);
        case Method::CountNorm: return rank_count(graph, m, true, cfg.include_self);
        case Method::PagerankNonNorm:
        case Method::PagerankNorm: return rank_pagerank(graph, m, variant_of(method), cfg, store);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown method");
}

}  // namespace synergy
