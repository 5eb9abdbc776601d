#include "revkit/intent.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "revkit/diff_align.hpp"
#include "revkit/metrics.hpp"

namespace revkit {

namespace {

const std::set<std::string>& function_words() {
    static const std::set<std::string> words = {
        "a",    "an",   "the",  "and",  "or",    "but",   "nor",     "so",    "yet",
        "for",  "of",   "in",   "on",   "at",    "by",    "to",      "from",  "with",
        "as",   "is",   "am",   "are",  "was",   "were",  "be",      "been",  "being",
        "it",   "its",  "this", "that", "these", "those", "he",      "she",   "they",
        "we",   "you",  "i",    "his",  "her",   "their", "our",     "which", "who",
        "what", "when", "where","while","because","therefore","however", "thus",
        "hence", "moreover", "furthermore", "although", "though", "if", "then",
        "than", "also", "not",  "no",   "do",    "does",  "did",     "can",   "could",
        "will", "would","shall","should","may",  "might", "must",    "have",  "has",
        "had"};
    return words;
}

std::string lower(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_punct_token(const std::string& t) {
    return !t.empty() && !std::isalnum(static_cast<unsigned char>(t[0])) &&
           static_cast<unsigned char>(t[0]) < 0x80;
}

bool is_numeric_token(const std::string& t) {
    return !t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char c) {
        return std::isdigit(c) || c == '.' || c == ',';
    }) && std::isdigit(static_cast<unsigned char>(t[0]));
}

bool is_capitalized(const std::string& t) {
    return !t.empty() && std::isupper(static_cast<unsigned char>(t[0]));
}

// multiset symmetric difference of lowercased tokens
std::vector<std::string> changed_tokens(const std::vector<std::string>& a,
                                        const std::vector<std::string>& b) {
    std::map<std::string, int> counts;
    for (const auto& t : a) ++counts[lower(t)];
    for (const auto& t : b) --counts[lower(t)];
    std::vector<std::string> out;
    for (const auto& [tok, c] : counts)
        for (int i = 0; i < std::abs(c); ++i) out.push_back(tok);
    return out;
}

}  // namespace

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = {
        "token_length_delta",   "char_edit_distance_ratio", "case_change_flag",
        "punctuation_only_flag","op_insert",                "op_delete",
        "op_modify",            "token_overlap_ratio",      "function_word_change_ratio",
        "sentence_position",    "gran_sentence",            "gran_paragraph",
        "gran_document",        "named_token_change_flag",  "revised_token_count"};
    return names;
}

std::vector<double> extract_features(const EditAction& action, const Revision& context) {
    const std::vector<std::string> orig = token_strings(action.original_span);
    const std::vector<std::string> rev = token_strings(action.revised_span);

    const double len_delta =
        static_cast<double>(rev.size()) - static_cast<double>(orig.size());

    const std::int64_t char_dist =
        edit_distance(action.original_span, action.revised_span, DistanceUnit::Character);
    const std::size_t max_len = std::max<std::size_t>(
        1, std::max(action.original_span.size(), action.revised_span.size()));
    const double char_ratio =
        std::min(1.0, static_cast<double>(char_dist) / static_cast<double>(max_len));

    const bool case_change = !action.original_span.empty() && !action.revised_span.empty() &&
                             action.original_span != action.revised_span &&
                             lower(action.original_span) == lower(action.revised_span);

    const auto diff = changed_tokens(orig, rev);
    const bool punct_only =
        !diff.empty() && std::all_of(diff.begin(), diff.end(), is_punct_token);

    double overlap = 0.0;
    if (!orig.empty() && !rev.empty()) {
        std::map<std::string, int> counts;
        for (const auto& t : orig) ++counts[lower(t)];
        std::int64_t common = 0;
        for (const auto& t : rev) {
            auto it = counts.find(lower(t));
            if (it != counts.end() && it->second > 0) {
                --it->second;
                ++common;
            }
        }
        overlap = 2.0 * static_cast<double>(common) /
                  static_cast<double>(orig.size() + rev.size());
    }

    double fn_change = 0.0;
    if (!diff.empty()) {
        std::int64_t fn = 0;
        for (const auto& t : diff)
            if (function_words().count(t)) ++fn;
        fn_change = static_cast<double>(fn) / static_cast<double>(diff.size());
    }

    double position = 0.5;
    if (action.sentence_index) {
        const std::size_t n = segment_sentences(context.source_text).size();
        if (n > 1)
            position = static_cast<double>(*action.sentence_index) / static_cast<double>(n - 1);
        // bucket to {0, 0.5, 1}
        position = position < 1.0 / 3.0 ? 0.0 : (position < 2.0 / 3.0 ? 0.5 : 1.0);
    }

    bool named_change = false;
    {
        std::set<std::string> orig_set, rev_set;
        for (const auto& t : orig) orig_set.insert(t);
        for (const auto& t : rev) rev_set.insert(t);
        auto check = [&](const std::vector<std::string>& side, const std::set<std::string>& other) {
            for (const auto& t : side)
                if ((is_capitalized(t) || is_numeric_token(t)) && !other.count(t)) return true;
            return false;
        };
        named_change = check(orig, rev_set) || check(rev, orig_set);
    }

    return {len_delta,
            char_ratio,
            case_change ? 1.0 : 0.0,
            punct_only ? 1.0 : 0.0,
            action.op == EditOp::Insert ? 1.0 : 0.0,
            action.op == EditOp::Delete ? 1.0 : 0.0,
            action.op == EditOp::Modify ? 1.0 : 0.0,
            overlap,
            fn_change,
            position,
            action.granularity == Granularity::SentenceLevel ? 1.0 : 0.0,
            action.granularity == Granularity::ParagraphLevel ? 1.0 : 0.0,
            action.granularity == Granularity::DocumentLevel ? 1.0 : 0.0,
            named_change ? 1.0 : 0.0,
            static_cast<double>(rev.size())};
}

SplitResult split_dataset(const std::vector<LabeledExample>& labeled, std::uint64_t seed) {
    if (labeled.empty()) throw TooFewExamplesError("empty dataset");
    std::map<EditIntention, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labeled.size(); ++i) by_class[labeled[i].label].push_back(i);
    for (const auto& [label, idx] : by_class)
        if (idx.size() < 3)
            throw TooFewExamplesError(std::string("class ") + to_string(label) + " has " +
                                      std::to_string(idx.size()) + " items (< 3)");

    const double ratios[3] = {3254.0 / 4018.0, 400.0 / 4018.0, 364.0 / 4018.0};
    const std::size_t N = labeled.size();

    auto largest_remainder = [&](double total, const double* props, std::size_t k,
                                 std::vector<std::int64_t>& out) {
        std::vector<double> ideal(k);
        std::int64_t assigned = 0;
        out.assign(k, 0);
        for (std::size_t i = 0; i < k; ++i) {
            ideal[i] = total * props[i];
            out[i] = static_cast<std::int64_t>(std::floor(ideal[i]));
            assigned += out[i];
        }
        std::vector<std::size_t> order(k);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return ideal[a] - std::floor(ideal[a]) > ideal[b] - std::floor(ideal[b]);
        });
        std::int64_t leftover = static_cast<std::int64_t>(std::llround(total)) - assigned;
        for (std::int64_t i = 0; i < leftover; ++i) ++out[order[static_cast<std::size_t>(i) % k]];
    };

    std::vector<std::int64_t> targets;
    largest_remainder(static_cast<double>(N), ratios, 3, targets);

    // per-class quotas via largest remainder, then reconcile to global targets
    std::map<EditIntention, std::vector<std::int64_t>> quotas;
    std::vector<std::int64_t> sums(3, 0);
    for (const auto& [label, idx] : by_class) {
        std::vector<std::int64_t> q;
        largest_remainder(static_cast<double>(idx.size()), ratios, 3, q);
        sums[0] += q[0];
        sums[1] += q[1];
        sums[2] += q[2];
        quotas[label] = q;
    }
    // deterministic reconciliation: move one item at a time from a surplus
    // split to a deficit split within the largest class that can give
    for (int guard = 0; guard < 1000; ++guard) {
        int surplus = -1, deficit = -1;
        for (int s = 0; s < 3; ++s) {
            if (sums[s] > targets[s]) surplus = s;
            if (sums[s] < targets[s]) deficit = s;
        }
        if (surplus < 0 || deficit < 0) break;
        EditIntention best{};
        std::int64_t best_count = -1;
        for (const auto& [label, q] : quotas)
            if (q[surplus] > best_count && q[surplus] > 0) {
                best_count = q[surplus];
                best = label;
            }
        --quotas[best][surplus];
        ++quotas[best][deficit];
        --sums[surplus];
        ++sums[deficit];
    }

    std::mt19937_64 rng(seed);
    SplitResult result;
    for (auto& [label, idx] : by_class) {
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto& q = quotas[label];
        std::size_t pos = 0;
        for (std::int64_t i = 0; i < q[0]; ++i) result.train.push_back(labeled[idx[pos++]]);
        for (std::int64_t i = 0; i < q[1]; ++i) result.validation.push_back(labeled[idx[pos++]]);
        for (std::int64_t i = 0; i < q[2]; ++i) result.test.push_back(labeled[idx[pos++]]);
    }
    return result;
}

namespace {

std::vector<double> softmax(const std::vector<double>& logits) {
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

std::vector<double> class_logits(const std::vector<double>& flat, std::size_t num_labels,
                                 const std::vector<double>& x) {
    const std::size_t stride = x.size() + 1;
    std::vector<double> logits(num_labels, 0.0);
    for (std::size_t k = 0; k < num_labels; ++k) {
        double z = flat[k * stride + x.size()];  // bias
        for (std::size_t f = 0; f < x.size(); ++f) z += flat[k * stride + f] * x[f];
        logits[k] = z;
    }
    return logits;
}

std::size_t label_index(const std::vector<EditIntention>& labels, EditIntention l) {
    auto it = std::find(labels.begin(), labels.end(), l);
    return static_cast<std::size_t>(it - labels.begin());
}

}  // namespace

double logistic_loss(const std::vector<double>& flat_weights,
                     const std::vector<LabeledExample>& examples,
                     const std::vector<double>& example_weights, std::size_t num_labels,
                     double l2) {
    double loss = 0.0;
    double wsum = 0.0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto p = softmax(class_logits(flat_weights, num_labels, examples[i].features));
        const std::size_t y = static_cast<std::size_t>(examples[i].label);
        loss -= example_weights[i] * std::log(std::max(p[y], 1e-300));
        wsum += example_weights[i];
    }
    loss /= wsum;
    for (double w : flat_weights) loss += 0.5 * l2 * w * w;
    return loss;
}

std::vector<double> logistic_gradient(const std::vector<double>& flat_weights,
                                      const std::vector<LabeledExample>& examples,
                                      const std::vector<double>& example_weights,
                                      std::size_t num_labels, double l2) {
    const std::size_t nf = examples.front().features.size();
    const std::size_t stride = nf + 1;
    std::vector<double> grad(flat_weights.size(), 0.0);
    double wsum = 0.0;
    for (const double w : example_weights) wsum += w;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto& x = examples[i].features;
        const auto p = softmax(class_logits(flat_weights, num_labels, x));
        const std::size_t y = static_cast<std::size_t>(examples[i].label);
        for (std::size_t k = 0; k < num_labels; ++k) {
            const double err = (p[k] - (k == y ? 1.0 : 0.0)) * example_weights[i] / wsum;
            for (std::size_t f = 0; f < nf; ++f) grad[k * stride + f] += err * x[f];
            grad[k * stride + nf] += err;
        }
    }
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += l2 * flat_weights[i];
    return grad;
}

ClassifierModel train(const std::vector<LabeledExample>& train_set,
                      const std::vector<LabeledExample>& validation_set,
                      const TrainConfig& config) {
    // Other is under-defined and excluded from the trainable label set
    std::vector<LabeledExample> train_ex, val_ex;
    for (const auto& e : train_set)
        if (e.label != EditIntention::Other) train_ex.push_back(e);
    for (const auto& e : validation_set)
        if (e.label != EditIntention::Other) val_ex.push_back(e);

    std::set<EditIntention> seen;
    for (const auto& e : train_ex) seen.insert(e.label);
    if (seen.size() < 2) throw DegenerateDataError();

    ClassifierModel model;
    for (EditIntention l : all_intentions())
        if (l != EditIntention::Other) model.labels.push_back(l);
    model.other_floor = config.other_floor;

    const std::size_t nf = train_ex.front().features.size();
    model.feature_means.assign(nf, 0.0);
    model.feature_scales.assign(nf, 1.0);
    for (const auto& e : train_ex)
        for (std::size_t f = 0; f < nf; ++f) model.feature_means[f] += e.features[f];
    for (double& m : model.feature_means) m /= static_cast<double>(train_ex.size());
    std::vector<double> var(nf, 0.0);
    for (const auto& e : train_ex)
        for (std::size_t f = 0; f < nf; ++f) {
            const double d = e.features[f] - model.feature_means[f];
            var[f] += d * d;
        }
    for (std::size_t f = 0; f < nf; ++f) {
        const double sd = std::sqrt(var[f] / static_cast<double>(train_ex.size()));
        model.feature_scales[f] = sd > 1e-12 ? sd : 1.0;
    }

    auto standardize = [&](std::vector<LabeledExample>& exs) {
        for (auto& e : exs) {
            std::vector<double> z(nf);
            for (std::size_t f = 0; f < nf; ++f)
                z[f] = (e.features[f] - model.feature_means[f]) / model.feature_scales[f];
            // re-index label into model.labels space
            e.features = std::move(z);
            e.label = static_cast<EditIntention>(label_index(model.labels, e.label));
        }
    };
    standardize(train_ex);
    standardize(val_ex);

    // inverse-frequency example weights against class imbalance
    const std::size_t num_labels = model.labels.size();
    std::vector<double> class_counts(num_labels, 0.0);
    for (const auto& e : train_ex) class_counts[static_cast<std::size_t>(e.label)] += 1.0;
    std::vector<double> example_weights(train_ex.size(), 1.0);
    for (std::size_t i = 0; i < train_ex.size(); ++i) {
        const double c = class_counts[static_cast<std::size_t>(train_ex[i].label)];
        example_weights[i] = c > 0 ? static_cast<double>(train_ex.size()) /
                                         (static_cast<double>(num_labels) * c)
                                   : 1.0;
    }

    const std::size_t stride = nf + 1;
    std::vector<double> flat(num_labels * stride, 0.0);
    std::vector<double> best = flat;
    double best_f1 = -1.0;
    int since_best = 0;

    auto val_macro_f1 = [&]() {
        if (val_ex.empty()) return 0.0;
        std::vector<EditIntention> gold, pred;
        for (const auto& e : val_ex) {
            const auto p = softmax(class_logits(flat, num_labels, e.features));
            const std::size_t arg =
                static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
            gold.push_back(e.label);
            pred.push_back(static_cast<EditIntention>(arg));
        }
        return evaluate_labels(gold, pred).macro_f1;
    };

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        const auto grad = logistic_gradient(flat, train_ex, example_weights, num_labels, config.l2);
        for (std::size_t i = 0; i < flat.size(); ++i) flat[i] -= config.learning_rate * grad[i];
        const double f1 = val_macro_f1();
        if (f1 > best_f1 + 1e-12) {
            best_f1 = f1;
            best = flat;
            since_best = 0;
        } else if (++since_best >= config.patience && !val_ex.empty()) {
            break;
        }
    }
    if (val_ex.empty()) best = flat;

    model.weights.assign(num_labels, std::vector<double>(stride, 0.0));
    for (std::size_t k = 0; k < num_labels; ++k)
        for (std::size_t i = 0; i < stride; ++i) model.weights[k][i] = best[k * stride + i];
    return model;
}

std::vector<double> predict_proba(const ClassifierModel& model,
                                  const std::vector<double>& features) {
    if (model.schema_version != kFeatureSchemaVersion ||
        features.size() != model.feature_means.size())
        throw SchemaMismatchError("feature schema does not match model");
    std::vector<double> z(features.size());
    for (std::size_t f = 0; f < features.size(); ++f)
        z[f] = (features[f] - model.feature_means[f]) / model.feature_scales[f];
    std::vector<double> logits(model.labels.size(), 0.0);
    for (std::size_t k = 0; k < model.labels.size(); ++k) {
        double v = model.weights[k].back();
        for (std::size_t f = 0; f < z.size(); ++f) v += model.weights[k][f] * z[f];
        logits[k] = v;
    }
    return softmax(logits);
}

std::pair<EditIntention, double> predict(const ClassifierModel& model, const EditAction& action,
                                         const Revision& context) {
    const auto p = predict_proba(model, extract_features(action, context));
    const std::size_t arg =
        static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    if (p[arg] < model.other_floor) return {EditIntention::Other, p[arg]};
    return {model.labels[arg], p[arg]};
}

EvalReport evaluate_labels(const std::vector<EditIntention>& gold,
                           const std::vector<EditIntention>& predicted) {
    EvalReport report;
    std::set<EditIntention> present(gold.begin(), gold.end());
    present.insert(predicted.begin(), predicted.end());
    report.labels.assign(present.begin(), present.end());
    const std::size_t k = report.labels.size();
    report.confusion.assign(k, std::vector<std::int64_t>(k, 0));
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const std::size_t g = label_index(report.labels, gold[i]);
        const std::size_t p = label_index(report.labels, predicted[i]);
        ++report.confusion[g][p];
    }
    report.precision.assign(k, 0.0);
    report.recall.assign(k, 0.0);
    report.f1.assign(k, 0.0);
    report.support.assign(k, 0);
    std::int64_t correct = 0;
    for (std::size_t c = 0; c < k; ++c) {
        std::int64_t tp = report.confusion[c][c];
        std::int64_t gold_total = 0, pred_total = 0;
        for (std::size_t j = 0; j < k; ++j) {
            gold_total += report.confusion[c][j];
            pred_total += report.confusion[j][c];
        }
        report.support[c] = gold_total;
        correct += tp;
        report.precision[c] = pred_total > 0 ? static_cast<double>(tp) / pred_total : 0.0;
        report.recall[c] = gold_total > 0 ? static_cast<double>(tp) / gold_total : 0.0;
        const double pr = report.precision[c] + report.recall[c];
        report.f1[c] = pr > 0 ? 2.0 * report.precision[c] * report.recall[c] / pr : 0.0;
        report.macro_f1 += report.f1[c];
    }
    report.macro_f1 /= static_cast<double>(k);
    report.accuracy = gold.empty() ? 0.0 : static_cast<double>(correct) / gold.size();
    return report;
}

EvalReport evaluate(const ClassifierModel& model, const std::vector<LabeledExample>& test_set) {
    std::vector<EditIntention> gold, pred;
    for (const auto& e : test_set) {
        gold.push_back(e.label);
        const auto p = predict_proba(model, e.features);
        const std::size_t arg =
            static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
        pred.push_back(p[arg] < model.other_floor ? EditIntention::Other : model.labels[arg]);
    }
    return evaluate_labels(gold, pred);
}

void auto_annotate(const ClassifierModel& model, std::vector<Revision>& corpus) {
    for (Revision& rev : corpus) {
        for (EditAction& action : rev.actions) {
            if (action.intention) continue;  // human labels win
            auto [label, confidence] = predict(model, action, rev);
            action.intention = label;
            action.intention_confidence = confidence;
        }
    }
}

using nlohmann::json;

json model_to_json(const ClassifierModel& model) {
    json labels = json::array();
    for (EditIntention l : model.labels) labels.push_back(to_string(l));
    return json{{"schema_version", model.schema_version},
                {"labels", labels},
                {"feature_names", feature_names()},
                {"feature_means", model.feature_means},
                {"feature_scales", model.feature_scales},
                {"weights", model.weights},
                {"other_floor", model.other_floor}};
}

ClassifierModel model_from_json(const json& j) {
    ClassifierModel model;
    model.schema_version = j.at("schema_version").get<int>();
    if (model.schema_version != kFeatureSchemaVersion)
        throw SchemaMismatchError("unsupported model schema version " +
                                  std::to_string(model.schema_version));
    for (const json& l : j.at("labels"))
        model.labels.push_back(intention_from_string(l.get<std::string>()));
    model.feature_means = j.at("feature_means").get<std::vector<double>>();
    model.feature_scales = j.at("feature_scales").get<std::vector<double>>();
    model.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    model.other_floor = j.value("other_floor", 0.2);
    return model;
}

}  // namespace revkit
