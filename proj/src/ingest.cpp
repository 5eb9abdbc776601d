#include "revkit/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "httplib.h"
#include "json.hpp"

namespace revkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- rate limiting (token bucket per endpoint) ----

class RateLimiter {
public:
    void acquire(const std::string& endpoint, double per_second) {
        if (per_second <= 0) return;
        std::unique_lock lock(mutex_);
        auto& last = last_request_[endpoint];
        const auto now = std::chrono::steady_clock::now();
        const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(1.0 / per_second));
        const auto earliest = last + interval;
        if (now < earliest) {
            lock.unlock();
            std::this_thread::sleep_for(earliest - now);
            lock.lock();
        }
        last_request_[endpoint] = std::chrono::steady_clock::now();
    }

private:
    std::mutex mutex_;
    std::map<std::string, std::chrono::steady_clock::time_point> last_request_;
};

RateLimiter& rate_limiter() {
    static RateLimiter limiter;
    return limiter;
}

// ---- cache (content-addressed by request URL) ----

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::optional<std::string> cache_lookup(const std::string& key) {
    const char* dir = std::getenv("REVKIT_CACHE_DIR");
    if (!dir || !*dir) return std::nullopt;
    const fs::path path = fs::path(dir) / (fnv1a_hex(key) + ".body");
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void cache_store(const std::string& key, const std::string& body) {
    const char* dir = std::getenv("REVKIT_CACHE_DIR");
    if (!dir || !*dir) return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) return;
    const fs::path path = fs::path(dir) / (fnv1a_hex(key) + ".body");
    const fs::path tmp = path.string() + ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary);
        out << body;
    }
    fs::rename(tmp, path, ec);  // atomic on POSIX
}

struct UrlParts {
    std::string scheme_host;  // e.g. http://host:port
    std::string path;
};

UrlParts split_url(const std::string& url) {
    const std::size_t scheme = url.find("://");
    if (scheme == std::string::npos) throw NetworkError("bad url: " + url);
    const std::size_t slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

// GET with retries, backoff, rate limiting, and caching. http_status is set
// for non-retryable 4xx responses instead of throwing.
std::string http_get(const std::string& endpoint, const std::string& path_and_query,
                     const FetchPolicy& policy, int* http_status = nullptr) {
    const UrlParts parts = split_url(endpoint);
    const std::string full_path = parts.path == "/" && path_and_query[0] == '/'
                                      ? path_and_query
                                      : parts.path + path_and_query;
    const std::string key = parts.scheme_host + full_path;
    if (auto cached = cache_lookup(key)) {
        if (http_status) *http_status = 200;
        return *cached;
    }

    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(
                std::chrono::milliseconds(policy.backoff_base_ms * (1 << (attempt - 1))));
        rate_limiter().acquire(parts.scheme_host, policy.rate_limit);
        httplib::Client client(parts.scheme_host);
        client.set_connection_timeout(10);
        client.set_read_timeout(30);
        auto res = client.Get(full_path);
        if (!res) {
            last_error = "connection failed to " + parts.scheme_host;
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "status " + std::to_string(res->status);
            continue;
        }
        if (res->status >= 400) {
            if (http_status) {
                *http_status = res->status;
                return res->body;
            }
            throw NetworkError("status " + std::to_string(res->status) + " for " + full_path);
        }
        cache_store(key, res->body);
        if (http_status) *http_status = 200;
        return res->body;
    }
    throw NetworkError(last_error + " (retries exhausted)");
}

std::string url_encode(const std::string& s) {
    std::ostringstream out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~')
            out << c;
        else if (c == ' ')
            out << "%20";
        else
            out << '%' << std::uppercase << std::hex << static_cast<int>(c) << std::nouppercase
                << std::dec;
    }
    return out.str();
}

}  // namespace

std::int64_t parse_iso8601(const std::string& s) {
    std::tm tm{};
    if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%d", &tm.tm_year, &tm.tm_mon, &tm.tm_mday,
                    &tm.tm_hour, &tm.tm_min, &tm.tm_sec) != 6)
        return 0;
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    return static_cast<std::int64_t>(timegm(&tm));
}

std::vector<RawVersion> fetch_wiki_history(const std::string& endpoint, const std::string& title,
                                           const FetchPolicy& policy, SourceKind source) {
    if (title.empty()) throw std::invalid_argument("empty page title");
    const std::string query =
        "?action=query&prop=revisions&rvprop=timestamp%7Cids%7Ccontent&rvslots=main&rvlimit=" +
        std::to_string(policy.max_versions_per_doc) + "&format=json&titles=" + url_encode(title);
    const std::string body = http_get(endpoint, query, policy);

    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& e) {
        throw NetworkError(std::string("bad API response: ") + e.what());
    }
    if (!doc.contains("query") || !doc["query"].contains("pages")) throw PageNotFound(title);

    std::vector<RawVersion> versions;
    for (const auto& [page_id, page] : doc["query"]["pages"].items()) {
        if (page.contains("missing") || page_id == "-1") throw PageNotFound(title);
        for (const json& rev : page.value("revisions", json::array())) {
            RawVersion v;
            v.source = source;
            v.identifier = title;
            v.revision_id = std::to_string(rev.value("revid", 0));
            v.timestamp = parse_iso8601(rev.value("timestamp", ""));
            if (rev.contains("slots") && rev["slots"].contains("main")) {
                const json& main = rev["slots"]["main"];
                v.payload = main.value("*", main.value("content", ""));
            } else {
                v.payload = rev.value("*", "");
            }
            versions.push_back(std::move(v));
        }
    }
    if (versions.empty()) throw PageNotFound(title);
    std::sort(versions.begin(), versions.end(), [](const RawVersion& a, const RawVersion& b) {
        return std::tie(a.timestamp, a.revision_id) < std::tie(b.timestamp, b.revision_id);
    });
    if (static_cast<int>(versions.size()) > policy.max_versions_per_doc)
        versions.erase(versions.begin(),
                       versions.end() - policy.max_versions_per_doc);
    return versions;
}

namespace {

std::string extract_tag(const std::string& xml, const std::string& tag, std::size_t from = 0) {
    const std::string open = "<" + tag;
    const std::string close = "</" + tag + ">";
    const std::size_t start = xml.find(open, from);
    if (start == std::string::npos) return "";
    const std::size_t body_start = xml.find('>', start);
    const std::size_t end = xml.find(close, body_start);
    if (body_start == std::string::npos || end == std::string::npos) return "";
    return xml.substr(body_start + 1, end - body_start - 1);
}

std::string trim_ws(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

std::vector<RawVersion> fetch_arxiv_versions(const std::string& api, const std::string& paper_id,
                                             const FetchPolicy& policy) {
    static const std::regex id_grammar(R"(^(\d{4}\.\d{4,5}|[a-z-]+(\.[A-Z]{2})?/\d{7})$)");
    if (!std::regex_match(paper_id, id_grammar)) throw MalformedId(paper_id);

    std::vector<RawVersion> versions;
    constexpr int kVersionProbeCap = 50;
    for (int v = 1; v <= kVersionProbeCap; ++v) {
        const std::string versioned = paper_id + "v" + std::to_string(v);
        int status = 0;
        const std::string body =
            http_get(api, "?id_list=" + url_encode(versioned), policy, &status);
        if (status >= 400) break;
        const std::string entry = extract_tag(body, "entry");
        const std::string summary = trim_ws(extract_tag(entry, "summary"));
        if (summary.empty()) break;  // past the last submitted version
        RawVersion raw;
        raw.source = SourceKind::ArXiv;
        raw.identifier = paper_id;
        raw.revision_id = "v" + std::to_string(v);
        const std::string published = extract_tag(entry, "published");
        const std::string updated = extract_tag(entry, "updated");
        raw.timestamp = parse_iso8601(updated.empty() ? published : updated);
        if (raw.timestamp == 0) raw.timestamp = v;  // version order as fallback
        raw.payload = summary;
        versions.push_back(std::move(raw));
    }
    if (versions.empty()) throw PaperNotFound(paper_id);
    return versions;
}

std::vector<RawVersion> load_local_versions(const std::string& directory,
                                            const std::string& doc_id) {
    std::vector<std::pair<int, fs::path>> files;
    const std::string prefix = doc_id + ".v";
    for (const auto& entry : fs::directory_iterator(directory)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind(prefix, 0) != 0 || entry.path().extension() != ".txt") continue;
        const std::string num = name.substr(prefix.size(), name.size() - prefix.size() - 4);
        try {
            files.emplace_back(std::stoi(num), entry.path());
        } catch (const std::exception&) {
            continue;
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<RawVersion> versions;
    for (const auto& [n, path] : files) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        RawVersion v;
        v.source = SourceKind::LocalFile;
        v.identifier = doc_id;
        v.revision_id = "v" + std::to_string(n);
        v.timestamp = n;
        v.payload = ss.str();
        versions.push_back(std::move(v));
    }
    return versions;
}

std::vector<std::string> list_local_doc_ids(const std::string& directory) {
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(directory)) {
        const std::string name = entry.path().filename().string();
        if (entry.path().extension() != ".txt") continue;
        const std::size_t marker = name.rfind(".v");
        if (marker == std::string::npos) continue;
        const std::string id = name.substr(0, marker);
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::string parse_wikitext(const std::string& raw_payload) {
    std::string text = raw_payload;

    auto erase_between = [&](const std::string& open, const std::string& close, bool nested) {
        std::string out;
        std::size_t pos = 0;
        while (pos < text.size()) {
            const std::size_t start = text.find(open, pos);
            if (start == std::string::npos) {
                out += text.substr(pos);
                break;
            }
            out += text.substr(pos, start - pos);
            std::size_t cursor = start + open.size();
            int depth = 1;
            while (cursor < text.size() && depth > 0) {
                if (nested && text.compare(cursor, open.size(), open) == 0) {
                    ++depth;
                    cursor += open.size();
                } else if (text.compare(cursor, close.size(), close) == 0) {
                    --depth;
                    cursor += close.size();
                } else {
                    ++cursor;
                }
            }
            pos = cursor;  // unterminated fragments are dropped to end of text
        }
        text = std::move(out);
    };

    erase_between("<!--", "-->", false);
    // <ref>...</ref> including attributed forms, plus self-closing <ref ... />
    text = std::regex_replace(text, std::regex(R"(<ref[^>/]*/\s*>)"), "");
    text = std::regex_replace(text, std::regex(R"(<ref[^>]*>[\s\S]*?</ref>)"), "");
    erase_between("{{", "}}", true);
    erase_between("{|", "|}", false);  // tables

    // category/file links vanish entirely
    text = std::regex_replace(
        text, std::regex(R"(\[\[(?:Category|File|Image)[^\]]*\]\])", std::regex::icase), "");
    // [[target|label]] -> label, [[target]] -> target
    text = std::regex_replace(text, std::regex(R"(\[\[[^\]|]*\|([^\]]*)\]\])"), "$1");
    text = std::regex_replace(text, std::regex(R"(\[\[([^\]]*)\]\])"), "$1");
    // [http://url label] -> label, bare [http://url] -> removed
    text = std::regex_replace(text, std::regex(R"(\[\s*https?://\S*\s+([^\]]*)\])"), "$1");
    text = std::regex_replace(text, std::regex(R"(\[\s*https?://[^\]]*\])"), "");
    // emphasis quotes and headings
    text = std::regex_replace(text, std::regex(R"('{2,})"), "");
    text = std::regex_replace(text, std::regex(R"(^=+\s*(.*?)\s*=+\s*$)", std::regex::multiline),
                              "$1");
    // leftover html tags
    text = std::regex_replace(text, std::regex(R"(<[^>\n]+>)"), "");

    // normalize horizontal whitespace per line, keep blank lines as paragraph
    // boundaries, collapse blank-line runs
    std::istringstream lines(text);
    std::string line;
    std::vector<std::string> kept;
    bool last_blank = true;
    while (std::getline(lines, line)) {
        std::string cleaned;
        for (char c : line) {
            if (c == '\t') c = ' ';
            if (c == ' ' && !cleaned.empty() && cleaned.back() == ' ') continue;
            cleaned += c;
        }
        cleaned = trim_ws(cleaned);
        if (cleaned.empty()) {
            if (!last_blank) kept.push_back("");
            last_blank = true;
        } else {
            kept.push_back(cleaned);
            last_blank = false;
        }
    }
    while (!kept.empty() && kept.back().empty()) kept.pop_back();
    std::string out;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        if (i > 0) out += '\n';
        out += kept[i];
    }
    return out;
}

RevisionChain build_chain(std::vector<RawVersion> versions) {
    if (versions.empty()) throw EmptyHistory();
    std::sort(versions.begin(), versions.end(), [](const RawVersion& a, const RawVersion& b) {
        return std::tie(a.timestamp, a.revision_id) < std::tie(b.timestamp, b.revision_id);
    });

    RevisionChain chain;
    chain.doc_id = versions.front().identifier;
    for (const RawVersion& v : versions) {
        if (!chain.versions.empty() && chain.versions.back().second == v.payload)
            continue;  // consecutive identical texts collapse to one version
        chain.versions.emplace_back(v.timestamp, v.payload);
    }
    Domain domain = Domain::Other;
    switch (versions.front().source) {
        case SourceKind::Wikipedia: domain = Domain::Wikipedia; break;
        case SourceKind::Wikinews: domain = Domain::Wikinews; break;
        case SourceKind::ArXiv: domain = Domain::ArXiv; break;
        case SourceKind::LocalFile: domain = Domain::Other; break;
    }
    for (std::size_t i = 1; i < chain.versions.size(); ++i) {
        Revision rev;
        rev.doc_id = chain.doc_id;
        rev.depth = static_cast<int>(i);
        rev.source_text = chain.versions[i - 1].second;
        rev.target_text = chain.versions[i].second;
        rev.domain = domain;
        chain.revisions.push_back(std::move(rev));
    }
    return chain;
}

}  // namespace revkit
