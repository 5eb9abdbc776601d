#include "revkit/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace revkit {

std::optional<EditIntention> majority_vote(const std::vector<EditIntention>& labels) {
    if (labels.size() < 3) throw std::invalid_argument("majority_vote needs >= 3 labels");
    std::map<EditIntention, std::size_t> counts;
    for (EditIntention l : labels) ++counts[l];
    for (const auto& [label, count] : counts)
        if (2 * count > labels.size()) return label;
    return std::nullopt;
}

AnnotationSet make_annotation_set(std::string action_ref,
                                  std::vector<std::pair<EditIntention, AnnotationRound>> labels) {
    AnnotationSet s;
    s.action_ref = std::move(action_ref);
    s.raw_labels = std::move(labels);
    std::vector<EditIntention> plain;
    plain.reserve(s.raw_labels.size());
    for (const auto& [l, r] : s.raw_labels) plain.push_back(l);
    s.resolved = majority_vote(plain);
    return s;
}

double fleiss_kappa(const std::vector<std::vector<int>>& matrix, int raters_per_item) {
    if (raters_per_item < 2) throw std::invalid_argument("need at least 2 raters per item");
    if (matrix.empty()) throw std::invalid_argument("empty matrix");
    const std::size_t categories = matrix.front().size();
    const double n = raters_per_item;
    const double N = static_cast<double>(matrix.size());

    std::vector<double> category_mass(categories, 0.0);
    double p_bar = 0.0;
    for (const auto& row : matrix) {
        if (row.size() != categories) throw std::invalid_argument("ragged matrix");
        int row_sum = 0;
        double agree = 0.0;
        for (std::size_t j = 0; j < categories; ++j) {
            row_sum += row[j];
            agree += static_cast<double>(row[j]) * (row[j] - 1);
            category_mass[j] += row[j];
        }
        if (row_sum != raters_per_item)
            throw std::invalid_argument("row sum != raters_per_item");
        p_bar += agree / (n * (n - 1.0));
    }
    p_bar /= N;

    double pe = 0.0;
    for (double mass : category_mass) {
        double pj = mass / (N * n);
        pe += pj * pj;
    }
    if (pe >= 1.0 - 1e-15)
        return 1.0;  // all mass in one category: chance-degenerate, perfect by convention
    return (p_bar - pe) / (1.0 - pe);
}

DisagreementProfile disagreement_profile(const std::vector<AnnotationSet>& sets) {
    DisagreementProfile profile;
    std::map<EditIntention, std::map<EditIntention, std::int64_t>> dissent_counts;
    for (const AnnotationSet& s : sets) {
        if (!s.resolved) continue;
        auto& entry = profile.by_label[*s.resolved];
        ++entry.total;
        bool any_dissent = false;
        for (const auto& [label, round] : s.raw_labels) {
            if (label != *s.resolved) {
                any_dissent = true;
                ++dissent_counts[*s.resolved][label];
            }
        }
        if (any_dissent) ++entry.with_dissent;
    }
    for (auto& [gold, entry] : profile.by_label) {
        std::int64_t total_dissents = 0;
        for (const auto& [l, c] : dissent_counts[gold]) total_dissents += c;
        if (total_dissents == 0) continue;
        for (const auto& [l, c] : dissent_counts[gold])
            entry.dissent_distribution[l] =
                static_cast<double>(c) / static_cast<double>(total_dissents);
    }
    return profile;
}

int quality_score(const std::vector<QualityVote>& votes) {
    if (votes.size() != 3) throw std::invalid_argument("quality judgment needs exactly 3 votes");
    int original = 0, revised = 0;
    for (QualityVote v : votes) {
        if (v == QualityVote::OriginalBetter) ++original;
        if (v == QualityVote::RevisedBetter) ++revised;
    }
    if (revised >= 2) return 1;
    if (original >= 2) return -1;
    return 0;  // Neither-majority or no agreement
}

QualityJudgment make_quality_judgment(std::string item_ref, std::vector<QualityVote> votes) {
    QualityJudgment j;
    j.item_ref = std::move(item_ref);
    j.score = quality_score(votes);
    j.votes = std::move(votes);
    return j;
}

std::map<std::string, double> aggregate_quality(
    const std::vector<std::pair<std::string, QualityJudgment>>& grouped) {
    std::map<std::string, std::pair<double, std::int64_t>> sums;
    for (const auto& [group, judgment] : grouped) {
        sums[group].first += judgment.score;
        sums[group].second += 1;
    }
    std::map<std::string, double> out;
    for (const auto& [group, sum] : sums)
        out[group] = sum.first / static_cast<double>(sum.second);
    return out;
}

double mean_quality(const std::vector<QualityJudgment>& judgments) {
    if (judgments.empty()) throw std::invalid_argument("no judgments");
    double sum = 0.0;
    for (const QualityJudgment& j : judgments) sum += j.score;
    return sum / static_cast<double>(judgments.size());
}

std::vector<std::vector<int>> label_matrix(const std::vector<std::vector<EditIntention>>& items) {
    const std::size_t categories = all_intentions().size();
    std::vector<std::vector<int>> matrix;
    matrix.reserve(items.size());
    for (const auto& labels : items) {
        std::vector<int> row(categories, 0);
        for (EditIntention l : labels) ++row[static_cast<std::size_t>(l)];
        matrix.push_back(std::move(row));
    }
    return matrix;
}

}  // namespace revkit
