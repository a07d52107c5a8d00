#include "synergy/eutils.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <thread>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <httplib.h>

#include "synergy/error.hpp"
#include "synergy/text.hpp"

namespace synergy {

namespace pt = boost::property_tree;

ClientClock ClientClock::system() {
    return ClientClock{[] { return std::chrono::steady_clock::now(); },
                       [](duration d) { std::this_thread::sleep_for(d); }};
}

RateLimiter::RateLimiter(std::size_t max_requests, ClientClock::duration window, ClientClock clock)
    : max_requests_(std::max<std::size_t>(1, max_requests)), window_(window), clock_(std::move(clock)) {}

void RateLimiter::acquire() {
    std::lock_guard lock(mutex_);
    auto now = clock_.now();
    while (!sent_.empty() && now - sent_.front() >= window_) sent_.pop_front();
    if (sent_.size() >= max_requests_) {
        clock_.sleep(sent_.front() + window_ - now);
        now = clock_.now();
        while (!sent_.empty() && now - sent_.front() >= window_) sent_.pop_front();
    }
    sent_.push_back(now);
}

namespace {

pt::ptree parse_xml(std::string_view xml) {
    std::istringstream in{std::string(xml)};
    pt::ptree tree;
    try {
        pt::read_xml(in, tree, pt::xml_parser::no_concat_text);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError(std::string("XML: ") + e.what());
    }
    return tree;
}

/// Concatenated character data of a node and all descendants, in document order.
void collect_text(const pt::ptree& node, std::string& out) {
    out += node.data();
    for (const auto& [key, child] : node) {
        if (key == "<xmlattr>" || key == "<xmlcomment>") continue;
        collect_text(child, out);
    }
}

std::string inner_text(const pt::ptree& node) {
    std::string out;
    collect_text(node, out);
    return text::normalize_whitespace(out);
}

const pt::ptree* child(const pt::ptree& node, const char* key) {
    auto it = node.find(key);
    return it == node.not_found() ? nullptr : &it->second;
}

std::optional<int> leading_year(const std::string& s) {
    if (s.size() < 4 || !std::all_of(s.begin(), s.begin() + 4, [](unsigned char c) { return std::isdigit(c); }))
        return std::nullopt;
    return std::stoi(s.substr(0, 4));
}

PublicationRecord parse_article(const pt::ptree& article_node) {
    const pt::ptree* citation = child(article_node, "MedlineCitation");
    if (!citation) throw ParseError("missing MedlineCitation");
    const pt::ptree* pmid = child(*citation, "PMID");
    if (!pmid) throw ParseError("missing PMID");

    PublicationRecord rec;
    rec.pub_id = inner_text(*pmid);
    if (rec.pub_id.empty()) throw ParseError("empty PMID");

    const pt::ptree* article = child(*citation, "Article");
    if (!article) throw ParseError("missing Article for PMID " + rec.pub_id);
    if (auto* title = child(*article, "ArticleTitle")) rec.title = inner_text(*title);

    if (auto* abstract = child(*article, "Abstract")) {
        for (const auto& [key, part] : *abstract) {
            if (key != "AbstractText") continue;
            std::string piece = inner_text(part);
            if (piece.empty()) continue;
            if (!rec.abstract.empty()) rec.abstract += ' ';
            rec.abstract += piece;
        }
    }

    for (const auto& [key, list] : *citation) {
        if (key != "KeywordList") continue;
        for (const auto& [kkey, kw] : list) {
            if (kkey != "Keyword") continue;
            std::string k = inner_text(kw);
            if (!k.empty()) rec.keywords.push_back(std::move(k));
        }
    }

    if (auto* journal = child(*article, "Journal")) {
        if (auto* issue = child(*journal, "JournalIssue")) {
            if (auto* date = child(*issue, "PubDate")) {
                if (auto* year = child(*date, "Year"))
                    rec.year = leading_year(inner_text(*year));
                else if (auto* medline = child(*date, "MedlineDate"))
                    rec.year = leading_year(inner_text(*medline));
            }
        }
    }

    if (auto* authors = child(*article, "AuthorList")) {
        for (const auto& [key, author] : *authors) {
            if (key != "Author") continue;
            std::string name;
            const auto* last = child(author, "LastName");
            const auto* fore = child(author, "ForeName");
            const auto* initials = child(author, "Initials");
            if (last) {
                if (fore)
                    name = inner_text(*fore) + " " + inner_text(*last);
                else if (initials)
                    name = inner_text(*initials) + " " + inner_text(*last);
                else
                    name = inner_text(*last);
            } else if (const auto* collective = child(author, "CollectiveName")) {
                name = inner_text(*collective);
            }
            name = text::normalize_whitespace(name);
            if (name.empty()) continue;
            AuthorName entry{name, std::nullopt};
            for (const auto& [akey, info] : author) {
                if (akey != "AffiliationInfo") continue;
                if (auto* aff = child(info, "Affiliation")) {
                    std::string value = inner_text(*aff);
                    if (!value.empty()) {
                        entry.affiliation = std::move(value);
                        break;
                    }
                }
            }
            rec.authors.push_back(std::move(entry));
        }
    }
    return rec;
}

std::string percent_encode(std::string_view s) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 15]);
        }
    }
    return out;
}

class EutilsClient {
public:
    explicit EutilsClient(const RemoteConfig& config)
        : config_(config),
          clock_(config.clock ? *config.clock : ClientClock::system()),
          limiter_(config.requests_per_second, std::chrono::seconds(1), clock_) {
        if (config.base_url.empty()) throw Error(ErrorCode::InvalidArgument, "empty base URL");
        const auto scheme_end = config.base_url.find("://");
        const auto path_start =
            config.base_url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
        origin_ = config.base_url.substr(0, path_start);
        if (path_start != std::string::npos) prefix_ = config.base_url.substr(path_start);
        while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
        client_ = std::make_unique<httplib::Client>(origin_);
        if (!client_->is_valid()) throw Error(ErrorCode::InvalidArgument, "bad base URL " + config.base_url);
        const auto secs = static_cast<time_t>(config.timeout.count());
        client_->set_connection_timeout(secs, 0);
        client_->set_read_timeout(secs, 0);
        client_->set_follow_location(true);
    }

    std::string get(const std::string& endpoint, std::string query) {
        if (config_.api_key && !config_.api_key->empty()) query += "&api_key=" + percent_encode(*config_.api_key);
        const std::string path = prefix_ + "/" + endpoint + "?" + query;
        const int attempts = std::max(1, config_.max_attempts);
        for (int attempt = 1;; ++attempt) {
            limiter_.acquire();
            ++requests_;
            auto res = client_->Get(path);
            int status = 0;
            if (res) {
                status = res->status;
                if (status >= 200 && status < 300) return res->body;
                if (status != 429 && status < 500) throw HttpError(status, path);
            }
            if (attempt >= attempts) {
                if (!res)
                    throw Error(ErrorCode::NetworkTimeout,
                                origin_ + ": " + httplib::to_string(res.error()));
                if (status == 429) throw Error(ErrorCode::RateLimited, origin_ + path);
                throw HttpError(status, path);
            }
            ++retries_;
            clock_.sleep(config_.initial_backoff * (1 << (attempt - 1)));
        }
    }

    std::size_t requests() const { return requests_; }
    std::size_t retries() const { return retries_; }

private:
    const RemoteConfig& config_;
    ClientClock clock_;
    RateLimiter limiter_;
    std::string origin_;
    std::string prefix_;
    std::unique_ptr<httplib::Client> client_;
    std::size_t requests_ = 0;
    std::size_t retries_ = 0;
};

}  // namespace

std::vector<std::string> parse_esearch_ids(std::string_view xml) {
    const auto tree = parse_xml(xml);
    const pt::ptree* result = child(tree, "eSearchResult");
    if (!result) throw ParseError("missing eSearchResult");
    std::vector<std::string> ids;
    if (const pt::ptree* list = child(*result, "IdList")) {
        for (const auto& [key, id] : *list) {
            if (key != "Id") continue;
            std::string value = inner_text(id);
            if (!value.empty()) ids.push_back(std::move(value));
        }
    }
    return ids;
}

ParsedArticles parse_pubmed_xml(std::string_view xml) {
    const auto tree = parse_xml(xml);
    const pt::ptree* set = child(tree, "PubmedArticleSet");
    if (!set) throw ParseError("missing PubmedArticleSet");
    ParsedArticles out;
    for (const auto& [key, node] : *set) {
        if (key != "PubmedArticle") continue;
        try {
            out.records.push_back(parse_article(node));
        } catch (const ParseError&) {
            ++out.failures;
        }
    }
    return out;
}

FetchResult fetch_remote(const std::string& query, std::size_t max_records, const RemoteConfig& config) {
    FetchResult result;
    if (max_records == 0) return result;

    EutilsClient client(config);
    const std::string db = percent_encode(config.database);
    const auto ids = parse_esearch_ids(client.get(
        "esearch.fcgi", "db=" + db + "&term=" + percent_encode(query) + "&retmax=" + std::to_string(max_records)));

    const std::size_t wanted = std::min(ids.size(), max_records);
    const std::size_t batch = std::max<std::size_t>(1, config.batch_size);
    for (std::size_t start = 0; start < wanted; start += batch) {
        std::string joined;
        for (std::size_t i = start; i < std::min(wanted, start + batch); ++i) {
            if (!joined.empty()) joined += ',';
            joined += percent_encode(ids[i]);
        }
        ParsedArticles parsed;
        try {
            parsed = parse_pubmed_xml(client.get("efetch.fcgi", "db=" + db + "&id=" + joined + "&retmode=xml"));
        } catch (const ParseError&) {
            result.parse_failures += std::min(wanted, start + batch) - start;
            continue;
        }
        result.parse_failures += parsed.failures;
        for (auto& rec : parsed.records) result.records.push_back(std::move(rec));
    }
    result.requests = client.requests();
    result.retries = client.retries();
    return result;
}

}  // namespace synergy
