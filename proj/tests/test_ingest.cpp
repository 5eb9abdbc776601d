#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "httplib.h"
#include "revkit/ingest.hpp"

using namespace revkit;
namespace fs = std::filesystem;

namespace {

FetchPolicy fast_policy() {
    FetchPolicy policy;
    policy.rate_limit = 10000.0;  // keep unit tests quick
    policy.max_retries = 0;
    policy.backoff_base_ms = 1;
    return policy;
}

struct MockServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    explicit MockServer() = default;

    void start() {
        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~MockServer() {
        server.stop();
        if (thread.joinable()) thread.join();
    }

    std::string base() const { return "http://127.0.0.1:" + std::to_string(port); }
};

std::string wiki_body(const std::vector<std::tuple<int, std::string, std::string>>& revs) {
    std::string revisions;
    for (const auto& [revid, ts, content] : revs) {
        if (!revisions.empty()) revisions += ",";
        revisions += R"({"revid":)" + std::to_string(revid) + R"(,"timestamp":")" + ts +
                     R"(","slots":{"main":{"*":")" + content + R"("}}})";
    }
    return R"({"query":{"pages":{"123":{"pageid":123,"title":"T","revisions":[)" + revisions +
           "]}}}}";
}

std::string arxiv_entry(const std::string& summary, const std::string& updated) {
    return "<feed><entry><updated>" + updated + "</updated><summary>" + summary +
           "</summary></entry></feed>";
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("revkit-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    void write(const std::string& name, const std::string& content) const {
        std::ofstream out(path / name, std::ios::binary);
        out << content;
    }
};

}  // namespace

TEST_CASE("timestamps parse from ISO-8601 UTC") {
    CHECK(parse_iso8601("2000-01-01T00:00:00Z") == 946684800);
    CHECK(parse_iso8601("2000-01-01T00:01:40Z") == 946684900);
    CHECK(parse_iso8601("not a date") == 0);
}

TEST_CASE("wiki history fetch parses, sorts and truncates revisions") {
    MockServer mock;
    std::atomic<int> hits{0};
    mock.server.Get("/w/api.php", [&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        const std::string title = req.get_param_value("titles");
        if (title == "Missing Page") {
            res.set_content(R"({"query":{"pages":{"-1":{"missing":""}}}})", "application/json");
            return;
        }
        // deliberately out of order; more revisions than the policy allows
        res.set_content(wiki_body({{30, "2021-01-03T00:00:00Z", "version three"},
                                   {10, "2021-01-01T00:00:00Z", "version one"},
                                   {20, "2021-01-02T00:00:00Z", "version two"},
                                   {40, "2021-01-04T00:00:00Z", "version four"}}),
                        "application/json");
    });
    mock.start();

    FetchPolicy policy = fast_policy();
    policy.max_versions_per_doc = 3;
    const auto versions = fetch_wiki_history(mock.base() + "/w/api.php", "Some Page", policy);
    REQUIRE(versions.size() == 3);  // oldest of four dropped
    CHECK(versions[0].payload == "version two");
    CHECK(versions[1].payload == "version three");
    CHECK(versions[2].payload == "version four");
    CHECK(versions[0].timestamp < versions[1].timestamp);
    CHECK(versions[0].source == SourceKind::Wikipedia);
    CHECK(versions[0].identifier == "Some Page");

    CHECK_THROWS_AS(fetch_wiki_history(mock.base() + "/w/api.php", "Missing Page", policy),
                    PageNotFound);
    CHECK(hits >= 2);
}

TEST_CASE("responses are served from the cache once stored") {
    MockServer mock;
    std::atomic<int> hits{0};
    mock.server.Get("/w/api.php", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.set_content(wiki_body({{1, "2021-01-01T00:00:00Z", "cached text"}}),
                        "application/json");
    });
    mock.start();

    const TempDir cache;
    ::setenv("REVKIT_CACHE_DIR", cache.path.c_str(), 1);
    const auto first = fetch_wiki_history(mock.base() + "/w/api.php", "Cache Page", fast_policy());
    const auto second = fetch_wiki_history(mock.base() + "/w/api.php", "Cache Page", fast_policy());
    ::unsetenv("REVKIT_CACHE_DIR");

    CHECK(hits == 1);  // second fetch never reached the server
    REQUIRE(first.size() == 1);
    REQUIRE(second.size() == 1);
    CHECK(first[0].payload == second[0].payload);
}

TEST_CASE("unreachable endpoints raise a network error") {
    CHECK_THROWS_AS(fetch_wiki_history("http://127.0.0.1:1/w/api.php", "Any", fast_policy()),
                    NetworkError);
}

TEST_CASE("paper abstract fetch probes versions until the first gap") {
    MockServer mock;
    mock.server.Get("/api/query", [&](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.get_param_value("id_list");
        if (id == "2101.01234v1")
            res.set_content(arxiv_entry("first abstract", "2021-01-05T00:00:00Z"),
                            "application/xml");
        else if (id == "2101.01234v2")
            res.set_content(arxiv_entry("second abstract", "2021-02-05T00:00:00Z"),
                            "application/xml");
        else
            res.set_content("<feed><entry><summary>  </summary></entry></feed>",
                            "application/xml");
    });
    mock.start();

    const auto versions =
        fetch_arxiv_versions(mock.base() + "/api/query", "2101.01234", fast_policy());
    REQUIRE(versions.size() == 2);
    CHECK(versions[0].revision_id == "v1");
    CHECK(versions[0].payload == "first abstract");
    CHECK(versions[1].revision_id == "v2");
    CHECK(versions[0].timestamp < versions[1].timestamp);
    CHECK(versions[0].source == SourceKind::ArXiv);

    CHECK_THROWS_AS(fetch_arxiv_versions(mock.base() + "/api/query", "2101.99999", fast_policy()),
                    PaperNotFound);
}

TEST_CASE("paper identifiers are validated before any request") {
    const std::vector<std::string> bad_ids = {"",         "abc",      "21.01234",
                                              "2101.123", "math/123", "2101.01234v1"};
    for (const std::string& bad : bad_ids)
        CHECK_THROWS_AS(fetch_arxiv_versions("http://unused", bad, fast_policy()), MalformedId);
    // well-formed old-style ids pass the grammar (still need a server to resolve)
    CHECK_THROWS_AS(fetch_arxiv_versions("http://127.0.0.1:1/q", "math.GT/0309136", fast_policy()),
                    NetworkError);
}

TEST_CASE("local version files load in numeric order") {
    const TempDir dir;
    dir.write("doc-a.v2.txt", "second");
    dir.write("doc-a.v1.txt", "first");
    dir.write("doc-a.v10.txt", "tenth");
    dir.write("doc-b.v1.txt", "other doc");
    dir.write("README.md", "ignored");

    const auto versions = load_local_versions(dir.path.string(), "doc-a");
    REQUIRE(versions.size() == 3);
    CHECK(versions[0].payload == "first");
    CHECK(versions[1].payload == "second");
    CHECK(versions[2].payload == "tenth");  // v10 sorts after v2 numerically
    CHECK(versions[0].source == SourceKind::LocalFile);

    const auto ids = list_local_doc_ids(dir.path.string());
    CHECK(ids == std::vector<std::string>{"doc-a", "doc-b"});
}

TEST_CASE("wiki markup reduces to plain prose") {
    CHECK(parse_wikitext("A [[simple]] link and a [[target|labelled]] one.") ==
          "A simple link and a labelled one.");
    CHECK(parse_wikitext("Keep prose.<ref name=\"x\">cite</ref> More<ref/> text.") ==
          "Keep prose. More text.");
    CHECK(parse_wikitext("Before {{infobox|a={{nested}}|b=2}} after.") == "Before after.");
    CHECK(parse_wikitext("Start {| class=\"wikitable\" |- | cell |} end.") == "Start end.");
    CHECK(parse_wikitext("Text [[Category:Things]] stays.") == "Text stays.");
    CHECK(parse_wikitext("''italic'' and '''bold''' words") == "italic and bold words");
    CHECK(parse_wikitext("== Heading ==\nBody line.") == "Heading\nBody line.");
    CHECK(parse_wikitext("See [http://example.com the site] now.") == "See the site now.");
    CHECK(parse_wikitext("Bare [http://example.com] link gone.") == "Bare link gone.");
    CHECK(parse_wikitext("Hidden <!-- comment --> text.") == "Hidden text.");
    CHECK(parse_wikitext("Para one.\n\n\n\nPara two.") == "Para one.\n\nPara two.");
}

TEST_CASE("wiki markup cleaning is idempotent") {
    const std::vector<std::string> samples = {
        "A [[simple]] link.<ref>x</ref> {{tmpl}} ''em''.",
        "== H ==\nBody with [[a|b]] and [http://x.y z].\n\nNext para.",
        "Plain text already.",
        "Nested {{a {{b}} c}} template and {| table |} leftovers.",
    };
    for (const std::string& s : samples) {
        const std::string once = parse_wikitext(s);
        CHECK(parse_wikitext(once) == once);
    }
}

TEST_CASE("chains collapse identical consecutive versions") {
    std::vector<RawVersion> versions;
    const std::vector<std::pair<int, std::string>> raw = {
        {1, "alpha"}, {2, "alpha"}, {3, "beta"}, {4, "beta"}, {5, "gamma"}};
    for (const auto& [ts, text] : raw) {
        RawVersion v;
        v.source = SourceKind::Wikinews;
        v.identifier = "doc-1";
        v.revision_id = "r" + std::to_string(ts);
        v.timestamp = ts;
        v.payload = text;
        versions.push_back(std::move(v));
    }
    std::swap(versions[0], versions[4]);  // build_chain must sort first

    const RevisionChain chain = build_chain(versions);
    CHECK(chain.doc_id == "doc-1");
    REQUIRE(chain.versions.size() == 3);
    CHECK(chain.versions[0].second == "alpha");
    CHECK(chain.versions[1].second == "beta");
    CHECK(chain.versions[2].second == "gamma");
    REQUIRE(chain.revisions.size() == 2);
    CHECK(chain.revisions[0].depth == 1);
    CHECK(chain.revisions[0].source_text == "alpha");
    CHECK(chain.revisions[0].target_text == "beta");
    CHECK(chain.revisions[1].depth == 2);
    CHECK(chain.revisions[0].domain == Domain::Wikinews);

    CHECK_THROWS_AS(build_chain({}), EmptyHistory);
}
