#include "synergy/pagerank_store.hpp"

#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <string>

#include "codec_util.hpp"
#include "synergy/error.hpp"

namespace synergy {

namespace {
constexpr std::string_view kMagic = "PRC1";
}

PagerankStore::PagerankStore(PagerankStore&& other) noexcept {
    std::unique_lock lock(other.mutex_);
    entries_ = std::move(other.entries_);
}

PagerankStore& PagerankStore::operator=(PagerankStore&& other) noexcept {
    if (this != &other) {
        std::scoped_lock lock(mutex_, other.mutex_);
        entries_ = std::move(other.entries_);
    }
    return *this;
}

std::shared_ptr<const ScoreTable> PagerankStore::lookup(MoleculeId m, Variant v, std::uint64_t revision) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(Key{m.value, static_cast<std::uint8_t>(v), revision});
    return it == entries_.end() ? nullptr : it->second;
}

void PagerankStore::insert(MoleculeId m, Variant v, std::uint64_t revision, ScoreTable scores) {
    auto table = std::make_shared<const ScoreTable>(std::move(scores));
    std::unique_lock lock(mutex_);
    entries_[Key{m.value, static_cast<std::uint8_t>(v), revision}] = std::move(table);
}

std::size_t PagerankStore::invalidate_except(std::uint64_t revision) {
    std::unique_lock lock(mutex_);
    return std::erase_if(entries_, [&](const auto& kv) { return std::get<2>(kv.first) != revision; });
}

std::size_t PagerankStore::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

PrecomputeStats PagerankStore::precompute(const MultilayerGraph& graph, std::span<const MoleculeId> molecules,
                                          std::span<const Variant> variants, const PagerankConfig& cfg) {
    PrecomputeStats stats;
    invalidate_except(graph.revision());
    for (auto m : molecules) {
        if (graph.related_molecules(m, cfg.include_self).empty()) {
            ++stats.empty;
            continue;
        }
        for (auto v : variants) {
            if (lookup(m, v, graph.revision())) {
                ++stats.skipped;
                continue;
            }
            const auto net = build_subnetwork(graph, m, v, cfg);
            if (net.nodes.empty()) {
                insert(m, v, graph.revision(), {});
            } else {
                insert(m, v, graph.revision(), pagerank(net, cfg).scores);
            }
            ++stats.stored;
        }
    }
    return stats;
}

void PagerankStore::save(const std::filesystem::path& path) const {
    std::string out;
    out += kMagic;
    out += '\n';
    std::shared_lock lock(mutex_);
    for (const auto& [key, table] : entries_) {
        const auto& [m, v, rev] = key;
        out += "ENTRY " + std::to_string(m) + ' ' + std::to_string(v) + ' ' + std::to_string(rev) + ' ' +
               std::to_string(table->size()) + '\n';
        char buf[64];
        for (const auto& [author, score] : *table) {
            std::snprintf(buf, sizeof buf, "%u\t%a\n", author.value, score);
            out += buf;
        }
    }
    lock.unlock();
    detail::write_checksummed(path, out);
}

PagerankStore PagerankStore::load(const std::filesystem::path& path) {
    PagerankStore store;
    if (!std::filesystem::exists(path)) return store;
    const auto lines = detail::read_checksummed(path, kMagic);
    std::size_t i = 0;
    while (i < lines.size()) {
        std::string_view head = lines[i++];
        if (head.substr(0, 6) != "ENTRY ") throw ParseError("expected ENTRY", i + 1);
        head.remove_prefix(6);
        std::uint64_t fields[4];
        for (int f = 0; f < 4; ++f) {
            const auto sp = head.find(' ');
            fields[f] = detail::parse_u64(head.substr(0, sp), "entry field");
            head = sp == std::string_view::npos ? std::string_view{} : head.substr(sp + 1);
        }
        if (fields[1] > 1) throw ParseError("bad variant", i);
        ScoreTable table;
        table.reserve(fields[3]);
        for (std::uint64_t k = 0; k < fields[3]; ++k) {
            if (i >= lines.size()) throw ParseError("truncated score table");
            const auto cols = detail::split_tabs(lines[i++]);
            if (cols.size() != 2) throw ParseError("bad score row", i);
            const auto author = detail::parse_u64(cols[0], "author id");
            const std::string num(cols[1]);
            char* end = nullptr;
            const double score = std::strtod(num.c_str(), &end);
            if (end != num.c_str() + num.size()) throw ParseError("bad score", i);
            table.emplace_back(AuthorId(static_cast<std::uint32_t>(author)), score);
        }
        store.entries_[Key{static_cast<std::uint32_t>(fields[0]), static_cast<std::uint8_t>(fields[1]), fields[2]}] =
            std::make_shared<const ScoreTable>(std::move(table));
    }
    return store;
}

PrecomputeStats precompute(const MultilayerGraph& graph, std::span<const MoleculeId> molecules,
                           std::span<const Variant> variants, const PagerankConfig& cfg,
                           const std::filesystem::path& store_path) {
    auto store = PagerankStore::load(store_path);
    const auto stats = store.precompute(graph, molecules, variants, cfg);
    store.save(store_path);
    return stats;
}

}  // namespace synergy
