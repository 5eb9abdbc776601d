#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "revkit/corpus.hpp"

namespace revkit {

// One revision pair per line. Fixed field names:
//   doc_id, depth, before_revision, after_revision, domain,
//   edit_actions: [{op, granularity, original, revised,
//                   src_start, src_end, tgt_start, tgt_end,
//                   intention?, raw_labels?}]
nlohmann::json revision_to_json(const Revision& rev);
Revision revision_from_json(const nlohmann::json& j);

void write_jsonl(std::ostream& out, const std::vector<Revision>& revisions);
void write_jsonl_file(const std::string& path, const std::vector<Revision>& revisions);

std::vector<Revision> read_jsonl(std::istream& in);
std::vector<Revision> read_jsonl_file(const std::string& path);

// Streaming variant; calls fn per record (constant memory in corpus size).
void for_each_revision(std::istream& in, const std::function<void(Revision&&)>& fn);

// Groups revisions by doc_id into chains, synthesizing version texts from
// the before/after pairs ordered by depth.
std::vector<RevisionChain> chains_from_revisions(const std::vector<Revision>& revisions);

}  // namespace revkit
