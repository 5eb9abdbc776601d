#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "revkit/corpus.hpp"

namespace revkit {

enum class AnnotationRound { Crowd = 1, Expert = 2 };

struct AnnotationSet {
    std::string action_ref;
    std::vector<std::pair<EditIntention, AnnotationRound>> raw_labels;  // >= 3
    std::optional<EditIntention> resolved;  // present iff strict majority
};

// Label with count > |labels|/2, else nullopt (flagged for re-annotation).
std::optional<EditIntention> majority_vote(const std::vector<EditIntention>& labels);

AnnotationSet make_annotation_set(std::string action_ref,
                                  std::vector<std::pair<EditIntention, AnnotationRound>> labels);

// Fleiss' kappa over an items x categories count matrix; every row must sum
// to `raters_per_item` (>= 2). Perfect agreement with all mass in one
// category is chance-degenerate; returns 1.0 by convention.
double fleiss_kappa(const std::vector<std::vector<int>>& matrix, int raters_per_item);

struct DisagreementProfile {
    // per resolved label: sets with at least one dissenter / total sets
    struct Entry {
        std::int64_t total = 0;
        std::int64_t with_dissent = 0;
        std::map<EditIntention, double> dissent_distribution;  // normalized
    };
    std::map<EditIntention, Entry> by_label;
};

DisagreementProfile disagreement_profile(const std::vector<AnnotationSet>& sets);

enum class QualityVote { OriginalBetter, RevisedBetter, Neither };

struct QualityJudgment {
    std::string item_ref;
    std::vector<QualityVote> votes;  // exactly 3
    int score = 0;                   // in {-1, 0, 1}, derived from votes
};

// -1 on OriginalBetter majority, +1 on RevisedBetter majority, 0 otherwise
// (ties and no-majority included).
int quality_score(const std::vector<QualityVote>& votes);

QualityJudgment make_quality_judgment(std::string item_ref, std::vector<QualityVote> votes);

// Arithmetic mean of scores per group key.
std::map<std::string, double> aggregate_quality(
    const std::vector<std::pair<std::string, QualityJudgment>>& grouped);

double mean_quality(const std::vector<QualityJudgment>& judgments);

// Items x categories count matrix from per-action raw labels (n labels each).
std::vector<std::vector<int>> label_matrix(const std::vector<std::vector<EditIntention>>& items);

}  // namespace revkit
