#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "revkit/corpus.hpp"

namespace revkit {

struct NetworkError : std::runtime_error {
    explicit NetworkError(const std::string& what) : std::runtime_error(what) {}
};
struct PageNotFound : std::runtime_error {
    explicit PageNotFound(const std::string& title)
        : std::runtime_error("page not found: " + title) {}
};
struct PaperNotFound : std::runtime_error {
    explicit PaperNotFound(const std::string& id)
        : std::runtime_error("paper not found: " + id) {}
};
struct MalformedId : std::runtime_error {
    explicit MalformedId(const std::string& id)
        : std::runtime_error("malformed paper id: " + id) {}
};
struct EmptyHistory : std::runtime_error {
    EmptyHistory() : std::runtime_error("no versions to build a chain from") {}
};

enum class SourceKind { Wikipedia, Wikinews, ArXiv, LocalFile };

struct RawVersion {
    SourceKind source = SourceKind::LocalFile;
    std::string identifier;   // page title, paper id, or doc id
    std::string revision_id;  // API revision id or version label; tie-breaker
    std::int64_t timestamp = 0;
    std::string payload;  // wiki markup, abstract text, or file contents
};

struct FetchPolicy {
    int max_versions_per_doc = 5;  // >= 2 for a usable chain, >= 1 accepted here
    double rate_limit = 2.0;       // requests per second per endpoint
    int max_retries = 3;
    int backoff_base_ms = 250;
};

// Newest revisions from the MediaWiki Action API, returned ascending by
// (timestamp, revision id). endpoint example: http://host[:port]/w/api.php
std::vector<RawVersion> fetch_wiki_history(const std::string& endpoint, const std::string& title,
                                           const FetchPolicy& policy = {},
                                           SourceKind source = SourceKind::Wikipedia);

// One RawVersion per submitted abstract version (vN id suffix), ascending.
std::vector<RawVersion> fetch_arxiv_versions(const std::string& api, const std::string& paper_id,
                                             const FetchPolicy& policy = {});

// Directory of <doc_id>.v<N>.txt files for one document.
std::vector<RawVersion> load_local_versions(const std::string& directory,
                                            const std::string& doc_id);
std::vector<std::string> list_local_doc_ids(const std::string& directory);

// Wiki markup -> plain prose. References, templates, external links, and
// category links are removed; internal links unwrap to their text; paragraph
// boundaries stay as blank lines. Idempotent.
std::string parse_wikitext(const std::string& raw_payload);

// Sorts ascending, collapses consecutive byte-identical texts, and stages one
// (empty-action) revision per consecutive pair.
RevisionChain build_chain(std::vector<RawVersion> versions);

// ISO-8601 UTC ("2021-03-27T10:00:00Z") -> unix seconds; returns 0 on parse
// failure.
std::int64_t parse_iso8601(const std::string& s);

}  // namespace revkit
