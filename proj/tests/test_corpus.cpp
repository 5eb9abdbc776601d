#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "revkit/corpus.hpp"
#include "revkit/jsonl.hpp"

using namespace revkit;

namespace {

Revision simple_revision(const std::string& doc_id, int depth, Domain domain,
                         int action_count = 1) {
    Revision rev;
    rev.doc_id = doc_id;
    rev.depth = depth;
    rev.source_text = "the old text .";
    rev.target_text = "the new text .";
    for (int i = 0; i < action_count; ++i) {
        EditAction a;
        a.op = EditOp::Modify;
        a.original_span = "old";
        a.revised_span = "new";
        a.src_range = {4, 7};
        a.tgt_range = {4, 7};
        rev.actions.push_back(a);
    }
    rev.domain = domain;
    return rev;
}

}  // namespace

TEST_CASE("enum string round trips") {
    for (EditIntention i : all_intentions()) CHECK(intention_from_string(to_string(i)) == i);
    for (Domain d : {Domain::ArXiv, Domain::Wikipedia, Domain::Wikinews, Domain::Other})
        CHECK(domain_from_string(to_string(d)) == d);
    for (EditOp o : {EditOp::Insert, EditOp::Delete, EditOp::Modify})
        CHECK(edit_op_from_string(to_string(o)) == o);
    for (Granularity g :
         {Granularity::SentenceLevel, Granularity::ParagraphLevel, Granularity::DocumentLevel})
        CHECK(granularity_from_string(to_string(g)) == g);
    CHECK_THROWS(intention_from_string("nonsense"));
}

TEST_CASE("well-formed chain validates cleanly") {
    RevisionChain chain;
    chain.doc_id = "d";
    chain.versions = {{1, "a x ."}, {2, "b x ."}, {3, "c x ."}};
    Revision r1 = simple_revision("d", 1, Domain::Other);
    r1.source_text = "a x .";
    r1.target_text = "b x .";
    Revision r2 = simple_revision("d", 2, Domain::Other);
    r2.source_text = "b x .";
    r2.target_text = "c x .";
    chain.revisions = {r1, r2};
    CHECK(validate_chain(chain).empty());

    SUBCASE("missing revision is reported") {
        chain.revisions.pop_back();
        const auto violations = validate_chain(chain);
        REQUIRE_FALSE(violations.empty());
        bool found = false;
        for (const auto& v : violations)
            if (v.invariant == "MissingRevision") found = true;
        CHECK(found);
    }
    SUBCASE("wrong doc id is reported") {
        chain.revisions[0].doc_id = "other";
        bool found = false;
        for (const auto& v : validate_chain(chain))
            if (v.invariant == "DocIdMismatch") found = true;
        CHECK(found);
    }
    SUBCASE("text mismatch is reported") {
        chain.revisions[0].target_text = "tampered";
        bool found = false;
        for (const auto& v : validate_chain(chain))
            if (v.invariant == "TextMismatch") found = true;
        CHECK(found);
    }
    SUBCASE("non-ascending timestamps are reported") {
        chain.versions[1].first = 9;
        bool found = false;
        for (const auto& v : validate_chain(chain))
            if (v.invariant == "OrderingViolation") found = true;
        CHECK(found);
    }
}

TEST_CASE("chain depth arithmetic") {
    // for n versions: depths sum to n(n-1)/2 and the max depth is n-1
    for (int n = 2; n <= 6; ++n) {
        RevisionChain chain;
        chain.doc_id = "d";
        std::int64_t depth_sum = 0;
        int max_depth = 0;
        for (int i = 0; i < n; ++i) chain.versions.emplace_back(i, "v" + std::to_string(i));
        for (int t = 1; t < n; ++t) {
            Revision r = simple_revision("d", t, Domain::Other);
            r.source_text = "v" + std::to_string(t - 1);
            r.target_text = "v" + std::to_string(t);
            chain.revisions.push_back(r);
            depth_sum += t;
            max_depth = t;
        }
        CHECK(validate_chain(chain).empty());
        CHECK(depth_sum == static_cast<std::int64_t>(n) * (n - 1) / 2);
        CHECK(max_depth == n - 1);
    }
}

TEST_CASE("stats are permutation invariant and merge is commutative") {
    std::mt19937 gen(7);
    std::vector<Revision> corpus;
    const Domain domains[] = {Domain::ArXiv, Domain::Wikipedia, Domain::Wikinews};
    for (int i = 0; i < 60; ++i) {
        Revision r = simple_revision("doc" + std::to_string(i), 1 + (i % 4), domains[i % 3],
                                     1 + (i % 5));
        for (std::size_t k = 0; k < r.actions.size(); ++k)
            if ((i + static_cast<int>(k)) % 2 == 0)
                r.actions[k].intention = all_intentions()[(i + k) % 6];
        corpus.push_back(std::move(r));
    }
    const CorpusStats base = compute_stats(corpus);

    std::vector<Revision> shuffled = corpus;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    const CorpusStats permuted = compute_stats(shuffled);
    CHECK(permuted.total_actions == base.total_actions);
    CHECK(permuted.total_revisions == base.total_revisions);
    CHECK(permuted.by_domain_depth == base.by_domain_depth);
    CHECK(permuted.intention_counts == base.intention_counts);

    // split-and-merge in either order equals the single pass
    CorpusStats a, b;
    for (std::size_t i = 0; i < corpus.size(); ++i)
        (i % 2 ? a : b).add(corpus[i]);
    CorpusStats ab = a, ba = b;
    ab.merge(b);
    ba.merge(a);
    CHECK(ab.total_actions == base.total_actions);
    CHECK(ab.by_domain_depth == base.by_domain_depth);
    CHECK(ba.intention_counts == base.intention_counts);
    CHECK(ba.labeled_actions == base.labeled_actions);
}

TEST_CASE("intention ratios are over labeled actions") {
    Revision r = simple_revision("d", 1, Domain::Other, 4);
    r.actions[0].intention = EditIntention::Clarity;
    r.actions[1].intention = EditIntention::Clarity;
    r.actions[2].intention = EditIntention::Fluency;
    const CorpusStats stats = compute_stats(std::vector<Revision>{r});
    CHECK(stats.labeled_actions == 3);
    CHECK(stats.unlabeled_actions == 1);
    CHECK(stats.intention_ratio(EditIntention::Clarity) == doctest::Approx(2.0 / 3.0));
    CHECK(stats.intention_ratio(EditIntention::Style) == doctest::Approx(0.0));
}

TEST_CASE("jsonl round trip preserves every field") {
    Revision r = simple_revision("doc-9", 3, Domain::Wikinews, 2);
    r.actions[0].intention = EditIntention::Style;
    r.actions[0].intention_confidence = 0.75;
    r.actions[0].raw_labels = {EditIntention::Style, EditIntention::Clarity, EditIntention::Style};
    r.actions[1].op = EditOp::Insert;
    r.actions[1].original_span.clear();
    r.actions[1].src_range = {2, 2};

    const Revision back = revision_from_json(revision_to_json(r));
    CHECK(back.doc_id == r.doc_id);
    CHECK(back.depth == r.depth);
    CHECK(back.domain == r.domain);
    CHECK(back.source_text == r.source_text);
    CHECK(back.target_text == r.target_text);
    REQUIRE(back.actions.size() == r.actions.size());
    CHECK(back.actions[0].intention == EditIntention::Style);
    CHECK(back.actions[0].raw_labels == r.actions[0].raw_labels);
    CHECK(back.actions[1].op == EditOp::Insert);
    CHECK(back.actions[1].src_range == r.actions[1].src_range);

    std::stringstream buffer;
    write_jsonl(buffer, {r, r});
    const auto parsed = read_jsonl(buffer);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[1].actions.size() == 2);
}

TEST_CASE("streaming reader visits every record") {
    std::stringstream buffer;
    std::vector<Revision> recs;
    for (int i = 0; i < 5; ++i) recs.push_back(simple_revision("d" + std::to_string(i), 1,
                                                               Domain::ArXiv));
    write_jsonl(buffer, recs);
    int seen = 0;
    for_each_revision(buffer, [&](Revision&& r) {
        CHECK(r.doc_id == "d" + std::to_string(seen));
        ++seen;
    });
    CHECK(seen == 5);
}

TEST_CASE("revisions group into chains by doc id and depth") {
    std::vector<Revision> recs;
    for (int t = 1; t <= 3; ++t) {
        Revision r = simple_revision("doc", t, Domain::ArXiv);
        r.source_text = "v" + std::to_string(t - 1);
        r.target_text = "v" + std::to_string(t);
        recs.push_back(r);
    }
    recs.push_back(simple_revision("solo", 1, Domain::Other));
    std::shuffle(recs.begin(), recs.end(), std::mt19937(3));

    const auto chains = chains_from_revisions(recs);
    REQUIRE(chains.size() == 2);
    const auto& multi = chains[0].doc_id == "doc" ? chains[0] : chains[1];
    CHECK(multi.versions.size() == 4);
    CHECK(multi.revisions.size() == 3);
    CHECK(multi.revisions[0].depth == 1);
    CHECK(multi.versions[0].second == "v0");
    CHECK(multi.versions[3].second == "v3");
}
