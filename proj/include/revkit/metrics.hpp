#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "revkit/lm.hpp"

namespace revkit {

struct EmptyDocumentError : std::runtime_error {
    EmptyDocumentError() : std::runtime_error("document has no sentences or words") {}
};
struct EmptySentenceError : std::runtime_error {
    EmptySentenceError() : std::runtime_error("sentence has no tokens") {}
};
struct EmptyReferencesError : std::runtime_error {
    EmptyReferencesError() : std::runtime_error("reference list is empty") {}
};

// Metric tokenization: lowercased, punctuation split off as separate tokens.
// Corpus-level scores are tokenization-sensitive; this is the recorded scheme.
std::vector<std::string> metric_tokens(const std::string& text);

// Deterministic vowel-group syllable counter with silent-e and common-suffix
// rules; >= 1 for any word with letters.
int count_syllables(const std::string& word);

// 0.39*(words/sentences) + 11.8*(syllables/words) - 15.59
double fkgl(const std::string& document);

// (log P_lm(S) - sum_t log P_unigram(t)) / |S|
double slor(const std::string& sentence, const LanguageModel& lm);

// Local-coherence proxy: present/absent entity transitions between adjacent
// sentences, scored by exp(mean log transition probability), in [0, 1].
// Documents with < 2 sentences score the neutral 0.5.
double entity_grid_score(const std::string& document);

struct SariScore {
    double sari = 0.0;
    double add = 0.0;
    double del = 0.0;
    double keep = 0.0;
};

// N-gram SARI (n = 1..4), components scaled to [0, 100]: ADD and KEEP are
// F1 scores, DEL is precision; sari = (add + del + keep) / 3.
SariScore sari(const std::string& source, const std::string& prediction,
               const std::vector<std::string>& references);

// BLEU-4 with brevity penalty; sentence level uses +1 smoothing.
double sentence_bleu(const std::string& prediction, const std::vector<std::string>& references);

struct BleuAccumulator {
    void add(const std::string& prediction, const std::vector<std::string>& references);
    double score() const;  // corpus-level BLEU-4 in [0, 100]

    std::vector<double> matched = std::vector<double>(4, 0.0);
    std::vector<double> total = std::vector<double>(4, 0.0);
    double pred_len = 0.0;
    double ref_len = 0.0;
};

struct RougeScore {
    double r1 = 0.0;
    double r2 = 0.0;
    double rL = 0.0;
};

// F1 of unigram overlap, bigram overlap and LCS, each in [0, 100].
RougeScore rouge(const std::string& prediction, const std::string& reference);

enum class DistanceUnit { Token, Character };

// Unit-cost Levenshtein distance.
std::int64_t edit_distance(const std::string& a, const std::string& b,
                           DistanceUnit unit = DistanceUnit::Token);

// Character-n-gram F-score (n = 1..6) content-preservation proxy in [0, 1];
// pluggable so a learned scorer can replace it.
using ContentSimilarity = std::function<double(const std::string&, const std::string&)>;
double char_ngram_similarity(const std::string& a, const std::string& b);

struct MetricReport {
    double sari = 0.0, sari_add = 0.0, sari_del = 0.0, sari_keep = 0.0;
    double bleu = 0.0;
    double rouge1 = 0.0, rouge2 = 0.0, rougeL = 0.0;
    double fkgl = 0.0;
    double slor = 0.0;
    double entity_grid = 0.0;
    std::int64_t edit_distance = 0;
    double content_preservation = 0.0;
};

struct DeltaReport {
    double delta_slor = 0.0;
    double delta_entity_grid = 0.0;
    double delta_fkgl = 0.0;
    double content_preservation = 0.0;
};

// Mean sentence SLOR over the document's sentences.
double document_slor(const std::string& document, const LanguageModel& lm);

DeltaReport delta_report(const std::string& original, const std::string& revised,
                         const LanguageModel& lm,
                         const ContentSimilarity& similarity = char_ngram_similarity);

}  // namespace revkit
