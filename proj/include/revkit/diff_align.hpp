#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "revkit/corpus.hpp"

namespace revkit {

struct IdenticalTextsError : std::runtime_error {
    IdenticalTextsError() : std::runtime_error("source and target texts are identical") {}
};

struct InconsistentOffsetsError : std::runtime_error {
    explicit InconsistentOffsetsError(const std::string& what) : std::runtime_error(what) {}
};

// Word tokens (runs of alphanumeric / non-ASCII bytes) and single punctuation
// characters; whitespace separates but is never a token.
struct Token {
    std::size_t begin = 0;
    std::size_t end = 0;
};

std::vector<Token> tokenize(std::string_view text);
std::vector<std::string> token_strings(std::string_view text);

struct SentenceSpan {
    std::string text;
    CharRange range;  // in the parent document
    int paragraph_index = 0;
};

// Blank-line separated paragraph ranges (trimmed of surrounding whitespace).
std::vector<CharRange> segment_paragraphs(const std::string& document);

// Rule-based splitter: terminal punctuation with an abbreviation guard list.
std::vector<SentenceSpan> segment_sentences(const std::string& document);

enum class AlignKind { Matched, Inserted, Deleted, Modified };

struct AlignmentPair {
    std::optional<int> src_index;
    std::optional<int> tgt_index;
    AlignKind kind = AlignKind::Matched;
};

// Normalized token-LCS ratio: 2*LCS / (|a|+|b|), in [0,1].
double sentence_similarity(std::string_view a, std::string_view b);

// Monotone alignment maximizing summed similarity. Pairs with similarity
// below `threshold` decay into Deleted+Inserted; identical pairs are Matched.
std::vector<AlignmentPair> align_sentences(const std::vector<SentenceSpan>& src,
                                           const std::vector<SentenceSpan>& tgt,
                                           double threshold = 0.5);

struct TokenEdit {
    EditOp op = EditOp::Modify;
    CharRange src;  // deleted/modified tokens in src (empty for Insert, anchored)
    CharRange tgt;  // inserted/replacement tokens in tgt (empty for Delete)
};

// Minimal token edit script under LCS alignment; maximal adjacent runs of
// deletions and insertions at one position are fused into a single Modify.
std::vector<TokenEdit> diff_tokens(std::string_view src, std::string_view tgt);

// Longest common subsequence pairs (i, j) of two id sequences (Myers).
std::vector<std::pair<int, int>> lcs_match_pairs(const std::vector<int>& a,
                                                 const std::vector<int>& b);

// Full edit-action extraction with exact round-trip offsets and granularity
// assignment by object size.
Revision extract_revision(const std::string& doc_id, int depth, const std::string& src,
                          const std::string& tgt, Domain domain = Domain::Other);

// Round-trip application; throws InconsistentOffsetsError when an action's
// range does not match the source content.
std::string apply_edits(const std::string& src, const std::vector<EditAction>& actions);

}  // namespace revkit
