#pragma once

#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "revkit/corpus.hpp"

namespace revkit {

struct TooFewExamplesError : std::runtime_error {
    explicit TooFewExamplesError(const std::string& what) : std::runtime_error(what) {}
};
struct DegenerateDataError : std::runtime_error {
    DegenerateDataError() : std::runtime_error("training data covers a single label") {}
};
struct SchemaMismatchError : std::runtime_error {
    explicit SchemaMismatchError(const std::string& what) : std::runtime_error(what) {}
};

// Hand-engineered edit features standing in for a neural encoder; the
// surrounding harness (splits, training, evaluation) is encoder-agnostic.
inline constexpr int kFeatureSchemaVersion = 1;

const std::vector<std::string>& feature_names();
std::vector<double> extract_features(const EditAction& action, const Revision& context);

struct LabeledExample {
    std::vector<double> features;
    EditIntention label = EditIntention::Other;
};

struct ClassifierModel {
    int schema_version = kFeatureSchemaVersion;
    std::vector<EditIntention> labels;         // trainable label set (5 classes)
    std::vector<double> feature_means;
    std::vector<double> feature_scales;
    std::vector<std::vector<double>> weights;  // labels x (features + 1), bias last
    double other_floor = 0.2;  // below this confidence the prediction decays to Other
};

nlohmann::json model_to_json(const ClassifierModel& model);
ClassifierModel model_from_json(const nlohmann::json& j);

struct TrainConfig {
    std::uint64_t seed = 0;
    int max_epochs = 600;
    double learning_rate = 0.5;
    double l2 = 1e-4;
    int patience = 40;  // early-stop window on validation macro-F1
    double other_floor = 0.2;
};

struct SplitResult {
    std::vector<LabeledExample> train;
    std::vector<LabeledExample> validation;
    std::vector<LabeledExample> test;
};

// Deterministic stratified split with 3254:400:364 proportions scaled to the
// dataset size (largest-remainder rounding).
SplitResult split_dataset(const std::vector<LabeledExample>& labeled, std::uint64_t seed);

ClassifierModel train(const std::vector<LabeledExample>& train_set,
                      const std::vector<LabeledExample>& validation_set,
                      const TrainConfig& config = {});

// Probability over model.labels; sums to 1.
std::vector<double> predict_proba(const ClassifierModel& model, const std::vector<double>& features);

std::pair<EditIntention, double> predict(const ClassifierModel& model, const EditAction& action,
                                         const Revision& context);

struct EvalReport {
    std::vector<EditIntention> labels;
    std::vector<std::vector<std::int64_t>> confusion;  // gold x predicted
    std::vector<double> precision, recall, f1;
    std::vector<std::int64_t> support;
    double macro_f1 = 0.0;
    double accuracy = 0.0;
};

EvalReport evaluate(const ClassifierModel& model, const std::vector<LabeledExample>& test_set);

// Report from explicit gold/predicted label vectors (shared with tests).
EvalReport evaluate_labels(const std::vector<EditIntention>& gold,
                           const std::vector<EditIntention>& predicted);

// Fills unlabeled actions with predicted intentions; human labels are never
// overwritten.
void auto_annotate(const ClassifierModel& model, std::vector<Revision>& corpus);

// Weighted softmax cross-entropy with L2; flattened weights, bias last per
// class. Exposed for the finite-difference gradient check.
double logistic_loss(const std::vector<double>& flat_weights,
                     const std::vector<LabeledExample>& examples,
                     const std::vector<double>& example_weights, std::size_t num_labels,
                     double l2);
std::vector<double> logistic_gradient(const std::vector<double>& flat_weights,
                                      const std::vector<LabeledExample>& examples,
                                      const std::vector<double>& example_weights,
                                      std::size_t num_labels, double l2);

}  // namespace revkit
