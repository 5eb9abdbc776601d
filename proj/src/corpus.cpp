#include "revkit/corpus.hpp"

#include <algorithm>

namespace revkit {

const char* to_string(Granularity g) {
    switch (g) {
        case Granularity::SentenceLevel: return "sentence";
        case Granularity::ParagraphLevel: return "paragraph";
        case Granularity::DocumentLevel: return "document";
    }
    return "?";
}

const char* to_string(EditOp o) {
    switch (o) {
        case EditOp::Insert: return "insert";
        case EditOp::Delete: return "delete";
        case EditOp::Modify: return "modify";
    }
    return "?";
}

const char* to_string(EditIntention i) {
    switch (i) {
        case EditIntention::Fluency: return "fluency";
        case EditIntention::Coherence: return "coherence";
        case EditIntention::Clarity: return "clarity";
        case EditIntention::Style: return "style";
        case EditIntention::MeaningChanged: return "meaning-changed";
        case EditIntention::Other: return "other";
    }
    return "?";
}

const char* to_string(Domain d) {
    switch (d) {
        case Domain::ArXiv: return "arxiv";
        case Domain::Wikipedia: return "wikipedia";
        case Domain::Wikinews: return "wikinews";
        case Domain::Other: return "other";
    }
    return "?";
}

Granularity granularity_from_string(const std::string& s) {
    if (s == "sentence" || s == "sentence-level") return Granularity::SentenceLevel;
    if (s == "paragraph" || s == "paragraph-level") return Granularity::ParagraphLevel;
    if (s == "document" || s == "document-level") return Granularity::DocumentLevel;
    throw std::invalid_argument("unknown granularity: " + s);
}

EditOp edit_op_from_string(const std::string& s) {
    if (s == "insert") return EditOp::Insert;
    if (s == "delete") return EditOp::Delete;
    if (s == "modify") return EditOp::Modify;
    throw std::invalid_argument("unknown edit op: " + s);
}

EditIntention intention_from_string(const std::string& s) {
    if (s == "fluency") return EditIntention::Fluency;
    if (s == "coherence") return EditIntention::Coherence;
    if (s == "clarity") return EditIntention::Clarity;
    if (s == "style") return EditIntention::Style;
    if (s == "meaning-changed" || s == "meaning_changed") return EditIntention::MeaningChanged;
    if (s == "other") return EditIntention::Other;
    throw std::invalid_argument("unknown intention: " + s);
}

Domain domain_from_string(const std::string& s) {
    if (s == "arxiv") return Domain::ArXiv;
    if (s == "wikipedia") return Domain::Wikipedia;
    if (s == "wikinews") return Domain::Wikinews;
    if (s == "other") return Domain::Other;
    throw std::invalid_argument("unknown domain: " + s);
}

const std::vector<EditIntention>& all_intentions() {
    static const std::vector<EditIntention> v = {
        EditIntention::Fluency,   EditIntention::Coherence, EditIntention::Clarity,
        EditIntention::Style,     EditIntention::MeaningChanged, EditIntention::Other};
    return v;
}

bool meaning_preserving(EditIntention i) {
    switch (i) {
        case EditIntention::Fluency:
        case EditIntention::Coherence:
        case EditIntention::Clarity:
        case EditIntention::Style:
            return true;
        default:
            return false;
    }
}

std::vector<ChainViolation> validate_chain(const RevisionChain& chain) {
    std::vector<ChainViolation> out;
    for (std::size_t i = 1; i < chain.versions.size(); ++i) {
        if (chain.versions[i].first < chain.versions[i - 1].first)
            out.push_back({"OrderingViolation",
                           "versions " + std::to_string(i - 1) + "," + std::to_string(i)});
    }
    const std::size_t n = chain.versions.size();
    const std::size_t expected = n > 0 ? n - 1 : 0;
    // revisions must be exactly depths 1..n-1 in order
    for (std::size_t i = 0; i < chain.revisions.size(); ++i) {
        const Revision& r = chain.revisions[i];
        if (r.depth != static_cast<int>(i) + 1)
            out.push_back({"DepthMismatch", "revision index " + std::to_string(i)});
        if (r.doc_id != chain.doc_id)
            out.push_back({"DocIdMismatch", "revision index " + std::to_string(i)});
        if (i + 1 < n) {
            if (r.source_text != chain.versions[i].second ||
                r.target_text != chain.versions[i + 1].second)
                out.push_back({"TextMismatch", "revision depth " + std::to_string(r.depth)});
        }
        if (r.actions.empty() && r.source_text != r.target_text)
            out.push_back({"EmptyActions", "revision depth " + std::to_string(r.depth)});
    }
    for (std::size_t d = chain.revisions.size(); d < expected; ++d)
        out.push_back({"MissingRevision", "depth " + std::to_string(d + 1)});
    for (std::size_t i = expected; i < chain.revisions.size(); ++i)
        out.push_back({"ExtraRevision", "depth " + std::to_string(chain.revisions[i].depth)});
    return out;
}

double CorpusStats::intention_ratio(EditIntention i) const {
    if (labeled_actions == 0) return 0.0;
    auto it = intention_counts.find(i);
    if (it == intention_counts.end()) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(labeled_actions);
}

CorpusStats::Cell CorpusStats::domain_total(Domain d) const {
    Cell total;
    for (const auto& [key, cell] : by_domain_depth) {
        if (key.first != d) continue;
        total.revisions += cell.revisions;
        total.actions += cell.actions;
    }
    return total;
}

void CorpusStats::add(const Revision& rev) {
    Cell& cell = by_domain_depth[{rev.domain, rev.depth}];
    cell.revisions += 1;
    cell.actions += static_cast<std::int64_t>(rev.actions.size());
    total_revisions += 1;
    total_actions += static_cast<std::int64_t>(rev.actions.size());
    for (const EditAction& a : rev.actions) {
        if (a.intention) {
            ++intention_counts[*a.intention];
            ++labeled_actions;
        } else {
            ++unlabeled_actions;
        }
    }
}

void CorpusStats::merge(const CorpusStats& other) {
    for (const auto& [key, cell] : other.by_domain_depth) {
        Cell& mine = by_domain_depth[key];
        mine.revisions += cell.revisions;
        mine.actions += cell.actions;
    }
    for (const auto& [intent, count] : other.intention_counts) intention_counts[intent] += count;
    labeled_actions += other.labeled_actions;
    unlabeled_actions += other.unlabeled_actions;
    total_revisions += other.total_revisions;
    total_actions += other.total_actions;
}

}  // namespace revkit
