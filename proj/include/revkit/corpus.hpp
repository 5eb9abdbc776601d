#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace revkit {

// Size class of the object an edit touches: token/phrase edits are
// sentence-level, whole-sentence edits are paragraph-level, whole-paragraph
// edits are document-level.
enum class Granularity { SentenceLevel, ParagraphLevel, DocumentLevel };

enum class EditOp { Insert, Delete, Modify };

enum class EditIntention { Fluency, Coherence, Clarity, Style, MeaningChanged, Other };

enum class Domain { ArXiv, Wikipedia, Wikinews, Other };

// Half-open [begin, end) character interval.
struct CharRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool empty() const { return begin == end; }
    friend bool operator==(const CharRange&, const CharRange&) = default;
};

struct EditAction {
    EditOp op = EditOp::Modify;
    Granularity granularity = Granularity::SentenceLevel;
    std::string original_span;  // empty iff op == Insert
    std::string revised_span;   // empty iff op == Delete
    CharRange src_range;        // interval in the source version
    CharRange tgt_range;        // interval in the target version
    std::optional<int> sentence_index;
    std::optional<int> paragraph_index;
    std::optional<EditIntention> intention;
    std::optional<double> intention_confidence;
    std::vector<EditIntention> raw_labels;  // per-annotator labels, 3 when present
};

struct Revision {
    std::string doc_id;
    int depth = 1;  // >= 1; pairs versions depth-1 and depth
    std::string source_text;
    std::string target_text;
    std::vector<EditAction> actions;
    Domain domain = Domain::Other;
};

struct RevisionChain {
    std::string doc_id;
    // (timestamp, text), ascending by timestamp
    std::vector<std::pair<std::int64_t, std::string>> versions;
    std::vector<Revision> revisions;  // depths 1..versions.size()-1
};

struct ChainViolation {
    std::string invariant;
    std::string location;
};

std::vector<ChainViolation> validate_chain(const RevisionChain& chain);

struct CorpusStats {
    struct Cell {
        std::int64_t revisions = 0;
        std::int64_t actions = 0;
        friend bool operator==(const Cell&, const Cell&) = default;
    };
    std::map<std::pair<Domain, int>, Cell> by_domain_depth;
    std::map<EditIntention, std::int64_t> intention_counts;
    std::int64_t labeled_actions = 0;
    std::int64_t unlabeled_actions = 0;
    std::int64_t total_revisions = 0;
    std::int64_t total_actions = 0;

    // ratio over labeled actions; 0 when nothing is labeled
    double intention_ratio(EditIntention i) const;
    Cell domain_total(Domain d) const;

    void add(const Revision& rev);
    void merge(const CorpusStats& other);  // associative + commutative
};

template <typename Iterable>
CorpusStats compute_stats(const Iterable& corpus) {
    CorpusStats s;
    for (const auto& rev : corpus) s.add(rev);
    return s;
}

const char* to_string(Granularity g);
const char* to_string(EditOp o);
const char* to_string(EditIntention i);
const char* to_string(Domain d);

Granularity granularity_from_string(const std::string& s);
EditOp edit_op_from_string(const std::string& s);
EditIntention intention_from_string(const std::string& s);
Domain domain_from_string(const std::string& s);

// All six intentions, in taxonomy order.
const std::vector<EditIntention>& all_intentions();
bool meaning_preserving(EditIntention i);

}  // namespace revkit
