#include "revkit/jsonl.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace revkit {

using nlohmann::json;

json revision_to_json(const Revision& rev) {
    json actions = json::array();
    for (const EditAction& a : rev.actions) {
        json ja = {
            {"op", to_string(a.op)},
            {"granularity", to_string(a.granularity)},
            {"original", a.original_span},
            {"revised", a.revised_span},
            {"src_start", a.src_range.begin},
            {"src_end", a.src_range.end},
            {"tgt_start", a.tgt_range.begin},
            {"tgt_end", a.tgt_range.end},
        };
        if (a.sentence_index) ja["sentence_index"] = *a.sentence_index;
        if (a.paragraph_index) ja["paragraph_index"] = *a.paragraph_index;
        if (a.intention) ja["intention"] = to_string(*a.intention);
        if (a.intention_confidence) ja["confidence"] = *a.intention_confidence;
        if (!a.raw_labels.empty()) {
            json raw = json::array();
            for (EditIntention l : a.raw_labels) raw.push_back(to_string(l));
            ja["raw_labels"] = raw;
        }
        actions.push_back(std::move(ja));
    }
    return json{{"doc_id", rev.doc_id},
                {"depth", rev.depth},
                {"before_revision", rev.source_text},
                {"after_revision", rev.target_text},
                {"domain", to_string(rev.domain)},
                {"edit_actions", std::move(actions)}};
}

Revision revision_from_json(const json& j) {
    Revision rev;
    rev.doc_id = j.at("doc_id").get<std::string>();
    rev.depth = j.at("depth").get<int>();
    rev.source_text = j.at("before_revision").get<std::string>();
    rev.target_text = j.at("after_revision").get<std::string>();
    rev.domain = domain_from_string(j.value("domain", "other"));
    if (j.contains("edit_actions")) {
        for (const json& ja : j.at("edit_actions")) {
            EditAction a;
            a.op = edit_op_from_string(ja.at("op").get<std::string>());
            a.granularity = granularity_from_string(ja.at("granularity").get<std::string>());
            a.original_span = ja.value("original", std::string());
            a.revised_span = ja.value("revised", std::string());
            a.src_range = {ja.value("src_start", std::size_t{0}), ja.value("src_end", std::size_t{0})};
            a.tgt_range = {ja.value("tgt_start", std::size_t{0}), ja.value("tgt_end", std::size_t{0})};
            if (ja.contains("sentence_index")) a.sentence_index = ja.at("sentence_index").get<int>();
            if (ja.contains("paragraph_index")) a.paragraph_index = ja.at("paragraph_index").get<int>();
            if (ja.contains("intention"))
                a.intention = intention_from_string(ja.at("intention").get<std::string>());
            if (ja.contains("confidence")) a.intention_confidence = ja.at("confidence").get<double>();
            if (ja.contains("raw_labels"))
                for (const json& l : ja.at("raw_labels"))
                    a.raw_labels.push_back(intention_from_string(l.get<std::string>()));
            rev.actions.push_back(std::move(a));
        }
    }
    return rev;
}

void write_jsonl(std::ostream& out, const std::vector<Revision>& revisions) {
    for (const Revision& rev : revisions) out << revision_to_json(rev).dump() << '\n';
}

void write_jsonl_file(const std::string& path, const std::vector<Revision>& revisions) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_jsonl(out, revisions);
}

void for_each_revision(std::istream& in, const std::function<void(Revision&&)>& fn) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            fn(revision_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
}

std::vector<Revision> read_jsonl(std::istream& in) {
    std::vector<Revision> out;
    for_each_revision(in, [&](Revision&& r) { out.push_back(std::move(r)); });
    return out;
}

std::vector<Revision> read_jsonl_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return read_jsonl(in);
}

std::vector<RevisionChain> chains_from_revisions(const std::vector<Revision>& revisions) {
    std::map<std::string, std::vector<const Revision*>> by_doc;
    for (const Revision& r : revisions) by_doc[r.doc_id].push_back(&r);
    std::vector<RevisionChain> chains;
    for (auto& [doc_id, revs] : by_doc) {
        std::sort(revs.begin(), revs.end(),
                  [](const Revision* a, const Revision* b) { return a->depth < b->depth; });
        RevisionChain chain;
        chain.doc_id = doc_id;
        std::int64_t ts = 0;
        chain.versions.emplace_back(ts++, revs.front()->source_text);
        for (const Revision* r : revs) {
            chain.versions.emplace_back(ts++, r->target_text);
            chain.revisions.push_back(*r);
        }
        chains.push_back(std::move(chain));
    }
    return chains;
}

}  // namespace revkit
