#include <cmath>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "revkit/diff_align.hpp"
#include "revkit/intent.hpp"

using namespace revkit;

namespace {

// linearly separable synthetic set over the five trainable intentions
std::vector<LabeledExample> separable_examples(std::mt19937& gen, int per_class) {
    const std::vector<EditIntention> classes = {
        EditIntention::Clarity, EditIntention::Fluency, EditIntention::Coherence,
        EditIntention::Style, EditIntention::MeaningChanged};
    const std::size_t nf = feature_names().size();
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<LabeledExample> out;
    for (std::size_t c = 0; c < classes.size(); ++c)
        for (int i = 0; i < per_class; ++i) {
            LabeledExample e;
            e.label = classes[c];
            e.features.assign(nf, 0.0);
            for (std::size_t f = 0; f < nf; ++f) e.features[f] = noise(gen);
            e.features[c % nf] += 3.0;  // one dominant coordinate per class
            e.features[(c + 5) % nf] -= 2.0;
            out.push_back(std::move(e));
        }
    std::shuffle(out.begin(), out.end(), gen);
    return out;
}

EditAction sample_action(const std::string& src, const std::string& tgt, Revision& context) {
    context = extract_revision("d", 1, src, tgt);
    REQUIRE(context.actions.size() == 1);
    return context.actions[0];
}

}  // namespace

TEST_CASE("feature vectors match the declared schema") {
    Revision rev;
    const EditAction a =
        sample_action("The cat sat on the mat.", "The cat slept on the mat.", rev);
    const auto features = extract_features(a, rev);
    CHECK(features.size() == feature_names().size());
    for (double f : features) CHECK(std::isfinite(f));
}

TEST_CASE("dataset splits are deterministic, exact and stratified") {
    std::mt19937 gen(3);
    const auto labeled = separable_examples(gen, 200);  // 1000 examples
    const SplitResult a = split_dataset(labeled, 17);
    const SplitResult b = split_dataset(labeled, 17);

    // 3254:400:364 scaled to 1000 is 810:99:91 (largest remainder)
    CHECK(a.train.size() == 810);
    CHECK(a.validation.size() == 99);
    CHECK(a.test.size() == 91);
    CHECK(a.train.size() + a.validation.size() + a.test.size() == labeled.size());

    REQUIRE(a.train.size() == b.train.size());
    for (std::size_t i = 0; i < a.train.size(); ++i) {
        CHECK(a.train[i].label == b.train[i].label);
        CHECK(a.train[i].features == b.train[i].features);
    }

    // stratification: every class is represented in every part
    for (const auto* part : {&a.train, &a.validation, &a.test}) {
        std::set<EditIntention> seen;
        for (const auto& e : *part) seen.insert(e.label);
        CHECK(seen.size() == 5);
    }

    // a different seed shuffles differently but keeps the same sizes
    const SplitResult c = split_dataset(labeled, 99);
    CHECK(c.train.size() == a.train.size());
    bool any_diff = false;
    for (std::size_t i = 0; i < a.train.size() && !any_diff; ++i)
        any_diff = a.train[i].features != c.train[i].features;
    CHECK(any_diff);

    CHECK_THROWS_AS(split_dataset({}, 0), TooFewExamplesError);
    std::vector<LabeledExample> tiny(2);
    tiny[0].label = tiny[1].label = EditIntention::Fluency;
    tiny[0].features = tiny[1].features = {1.0};
    CHECK_THROWS_AS(split_dataset(tiny, 0), TooFewExamplesError);
}

TEST_CASE("analytic gradient matches finite differences") {
    std::mt19937 gen(5);
    const std::size_t nf = 4, num_labels = 3, stride = nf + 1;
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<LabeledExample> examples;
    std::vector<double> example_weights;
    std::uniform_int_distribution<int> label_pick(0, static_cast<int>(num_labels) - 1);
    for (int i = 0; i < 25; ++i) {
        LabeledExample e;
        e.features.resize(nf);
        for (double& f : e.features) f = dist(gen);
        e.label = static_cast<EditIntention>(label_pick(gen));
        examples.push_back(std::move(e));
        example_weights.push_back(0.5 + std::abs(dist(gen)));
    }
    std::vector<double> w(num_labels * stride);
    for (double& v : w) v = 0.3 * dist(gen);

    const double l2 = 1e-3;
    const auto grad = logistic_gradient(w, examples, example_weights, num_labels, l2);
    REQUIRE(grad.size() == w.size());
    const double h = 1e-5;
    for (std::size_t i = 0; i < w.size(); ++i) {
        auto wp = w, wm = w;
        wp[i] += h;
        wm[i] -= h;
        const double numeric = (logistic_loss(wp, examples, example_weights, num_labels, l2) -
                                logistic_loss(wm, examples, example_weights, num_labels, l2)) /
                               (2 * h);
        const double denom = std::max({std::abs(numeric), std::abs(grad[i]), 1e-8});
        CHECK(std::abs(grad[i] - numeric) / denom < 1e-5);
    }
}

TEST_CASE("training fits separable data well above chance") {
    std::mt19937 gen(11);
    const auto labeled = separable_examples(gen, 120);
    const SplitResult split = split_dataset(labeled, 7);
    const ClassifierModel model = train(split.train, split.validation);
    const EvalReport report = evaluate(model, split.test);
    CHECK(report.accuracy > 0.9);
    CHECK(report.macro_f1 > 0.9);

    // probabilities are a proper distribution
    for (const auto& e : split.test) {
        const auto proba = predict_proba(model, e.features);
        REQUIRE(proba.size() == model.labels.size());
        double sum = 0.0;
        for (double p : proba) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("training rejects single-label data") {
    std::mt19937 gen(13);
    std::vector<LabeledExample> mono;
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        LabeledExample e;
        e.label = EditIntention::Fluency;
        e.features = {dist(gen), dist(gen)};
        mono.push_back(std::move(e));
    }
    CHECK_THROWS_AS(train(mono, mono), DegenerateDataError);
}

TEST_CASE("evaluation report matches a brute-force confusion oracle") {
    std::mt19937 gen(17);
    const std::vector<EditIntention> pool = {
        EditIntention::Clarity, EditIntention::Fluency, EditIntention::Coherence,
        EditIntention::Style, EditIntention::MeaningChanged, EditIntention::Other};
    std::uniform_int_distribution<int> pick(0, static_cast<int>(pool.size()) - 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<EditIntention> gold, pred;
        std::uniform_int_distribution<int> len(1, 60);
        const int n = len(gen);
        for (int i = 0; i < n; ++i) {
            gold.push_back(pool[static_cast<std::size_t>(pick(gen))]);
            pred.push_back(pool[static_cast<std::size_t>(pick(gen))]);
        }
        const EvalReport r = evaluate_labels(gold, pred);

        std::map<EditIntention, std::size_t> index;
        for (std::size_t i = 0; i < r.labels.size(); ++i) index[r.labels[i]] = i;
        // every observed label appears in the report exactly once
        for (EditIntention g : gold) CHECK(index.count(g) == 1);
        for (EditIntention p : pred) CHECK(index.count(p) == 1);

        std::int64_t correct = 0;
        double macro = 0.0;
        for (std::size_t c = 0; c < r.labels.size(); ++c) {
            std::int64_t tp = 0, fp = 0, fn = 0, support = 0;
            for (int i = 0; i < n; ++i) {
                const bool g = index.at(gold[static_cast<std::size_t>(i)]) == c;
                const bool p = index.at(pred[static_cast<std::size_t>(i)]) == c;
                if (g) ++support;
                if (g && p) ++tp;
                if (!g && p) ++fp;
                if (g && !p) ++fn;
            }
            correct += tp;
            CHECK(r.support[c] == support);
            const double prec = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
            const double rec = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
            const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
            CHECK(r.precision[c] == doctest::Approx(prec));
            CHECK(r.recall[c] == doctest::Approx(rec));
            CHECK(r.f1[c] == doctest::Approx(f1));
            macro += f1;
            for (std::size_t c2 = 0; c2 < r.labels.size(); ++c2) {
                std::int64_t cell = 0;
                for (int i = 0; i < n; ++i)
                    if (index.at(gold[static_cast<std::size_t>(i)]) == c &&
                        index.at(pred[static_cast<std::size_t>(i)]) == c2)
                        ++cell;
                CHECK(r.confusion[c][c2] == cell);
            }
        }
        CHECK(r.accuracy == doctest::Approx(static_cast<double>(correct) / n));
        CHECK(r.macro_f1 == doctest::Approx(macro / r.labels.size()));
    }
}

TEST_CASE("models survive a JSON round trip") {
    std::mt19937 gen(19);
    const auto labeled = separable_examples(gen, 60);
    const SplitResult split = split_dataset(labeled, 3);
    const ClassifierModel model = train(split.train, split.validation);
    const ClassifierModel back = model_from_json(model_to_json(model));
    CHECK(back.labels == model.labels);
    CHECK(back.other_floor == model.other_floor);
    for (const auto& e : split.test) {
        const auto pa = predict_proba(model, e.features);
        const auto pb = predict_proba(back, e.features);
        REQUIRE(pa.size() == pb.size());
        for (std::size_t i = 0; i < pa.size(); ++i)
            CHECK(pa[i] == doctest::Approx(pb[i]).epsilon(1e-12));
    }

    nlohmann::json j = model_to_json(model);
    j["schema_version"] = 999;
    CHECK_THROWS_AS(model_from_json(j), SchemaMismatchError);
}

TEST_CASE("auto-annotation fills gaps and preserves human labels") {
    std::mt19937 gen(23);
    const auto labeled = separable_examples(gen, 60);
    const SplitResult split = split_dataset(labeled, 3);
    const ClassifierModel model = train(split.train, split.validation);

    std::vector<Revision> corpus;
    corpus.push_back(extract_revision("d1", 1, "The cat sat on the mat.",
                                      "The cat slept on the mat."));
    corpus.push_back(extract_revision("d2", 1, "The dog ran away fast.",
                                      "The dog sprinted away fast."));
    corpus[0].actions[0].intention = EditIntention::Style;  // human label, must survive
    auto_annotate(model, corpus);
    CHECK(corpus[0].actions[0].intention == EditIntention::Style);
    REQUIRE(corpus[1].actions[0].intention.has_value());
    CHECK(corpus[1].actions[0].intention_confidence.has_value());
}
