#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "revkit/lm.hpp"
#include "revkit/metrics.hpp"

using namespace revkit;

namespace {

using Gram = std::vector<std::string>;
using Counts = std::map<Gram, double>;

Counts gram_counts(const std::vector<std::string>& toks, std::size_t n) {
    Counts out;
    for (std::size_t i = 0; i + n <= toks.size(); ++i)
        out[Gram(toks.begin() + i, toks.begin() + i + n)] += 1.0;
    return out;
}

double f1_oracle(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

// independent re-derivation of the n-gram SARI components: counts replicated
// by the number of references, KEEP/ADD as F1, DEL as precision
SariScore sari_oracle(const std::string& source, const std::string& prediction,
                      const std::vector<std::string>& references) {
    const auto s_toks = metric_tokens(source);
    const auto c_toks = metric_tokens(prediction);
    SariScore out;
    for (std::size_t n = 1; n <= 4; ++n) {
        Counts s = gram_counts(s_toks, n), c = gram_counts(c_toks, n), r;
        for (const auto& ref : references)
            for (const auto& [g, v] : gram_counts(metric_tokens(ref), n)) r[g] += v;
        const double numref = static_cast<double>(references.size());
        for (auto& [g, v] : s) v *= numref;
        for (auto& [g, v] : c) v *= numref;

        std::set<Gram> keys;
        for (const auto& [g, v] : s) keys.insert(g);
        for (const auto& [g, v] : c) keys.insert(g);
        for (const auto& [g, v] : r) keys.insert(g);

        double keep_p = 0, keep_r = 0, del_p = 0;
        int keep_p_n = 0, keep_r_n = 0, del_n = 0;
        double add_hit = 0, add_pred = 0, add_ref = 0;
        for (const Gram& g : keys) {
            const double sv = s.count(g) ? s.at(g) : 0;
            const double cv = c.count(g) ? c.at(g) : 0;
            const double rv = r.count(g) ? r.at(g) : 0;
            const double kept = std::min(sv, cv);
            if (kept > 0) {
                keep_p += std::min(kept, rv) / kept;
                ++keep_p_n;
            }
            const double keepable = std::min(sv, rv);
            if (keepable > 0) {
                keep_r += std::min(kept, keepable) / keepable;
                ++keep_r_n;
            }
            const double deleted = std::max(sv - cv, 0.0);
            if (deleted > 0) {
                del_p += std::max(deleted - rv, 0.0) / deleted;
                ++del_n;
            }
            if (sv == 0) {  // n-gram absent from the source
                if (cv > 0) {
                    add_pred += 1;
                    if (rv > 0) add_hit += 1;
                }
                if (rv > 0) add_ref += 1;
            }
        }
        out.keep += f1_oracle(keep_p_n ? keep_p / keep_p_n : 0, keep_r_n ? keep_r / keep_r_n : 0);
        out.del += del_n ? del_p / del_n : 0;
        out.add += f1_oracle(add_pred > 0 ? add_hit / add_pred : 0,
                             add_ref > 0 ? add_hit / add_ref : 0);
    }
    out.keep *= 25.0;
    out.del *= 25.0;
    out.add *= 25.0;
    out.sari = (out.keep + out.del + out.add) / 3.0;
    return out;
}

double bleu_oracle(const std::string& prediction, const std::vector<std::string>& references,
                   bool smooth) {
    const auto pred = metric_tokens(prediction);
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        const Counts p = gram_counts(pred, n);
        Counts clip;
        for (const auto& ref : references)
            for (const auto& [g, v] : gram_counts(metric_tokens(ref), n))
                clip[g] = std::max(clip[g], v);
        double m = 0, t = 0;
        for (const auto& [g, v] : p) {
            m += std::min(v, clip.count(g) ? clip.at(g) : 0.0);
            t += v;
        }
        if (smooth && n > 1) {
            m += 1;
            t += 1;
        }
        if (m <= 0 || t <= 0) return 0.0;
        log_sum += std::log(m / t);
    }
    std::size_t best = metric_tokens(references.front()).size();
    auto gap = [&](std::size_t len) {
        return len > pred.size() ? len - pred.size() : pred.size() - len;
    };
    for (const auto& ref : references) {
        const std::size_t len = metric_tokens(ref).size();
        if (gap(len) < gap(best) || (gap(len) == gap(best) && len < best)) best = len;
    }
    const double bp = pred.size() < best && !pred.empty()
                          ? std::exp(1.0 - static_cast<double>(best) / pred.size())
                          : 1.0;
    return 100.0 * bp * std::exp(log_sum / 4.0);
}

std::int64_t levenshtein_recursive(const std::vector<std::string>& a,
                                   const std::vector<std::string>& b, std::size_t i,
                                   std::size_t j) {
    if (i == a.size()) return static_cast<std::int64_t>(b.size() - j);
    if (j == b.size()) return static_cast<std::int64_t>(a.size() - i);
    const std::int64_t sub =
        levenshtein_recursive(a, b, i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    const std::int64_t del = levenshtein_recursive(a, b, i + 1, j) + 1;
    const std::int64_t ins = levenshtein_recursive(a, b, i, j + 1) + 1;
    return std::min({sub, del, ins});
}

const std::vector<std::string> kVocab = {"the", "cat", "sat",  "on",   "a",   "mat",
                                         "dog", "ran", "fast", "then", "slow"};

std::string random_sentence(std::mt19937& gen, int min_len, int max_len) {
    std::uniform_int_distribution<int> len(min_len, max_len),
        pick(0, static_cast<int>(kVocab.size()) - 1);
    std::string out;
    const int n = len(gen);
    for (int i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += kVocab[static_cast<std::size_t>(pick(gen))];
    }
    return out;
}

}  // namespace

TEST_CASE("syllable counts match a reference table at 95 percent or better") {
    const std::vector<std::pair<std::string, int>> table = {
        {"cat", 1},      {"dog", 1},       {"run", 1},        {"make", 1},
        {"stone", 1},    {"walked", 1},    {"makes", 1},      {"through", 1},
        {"strength", 1}, {"fly", 1},       {"table", 2},      {"apple", 2},
        {"wanted", 2},   {"boxes", 2},     {"mountain", 2},   {"paper", 2},
        {"window", 2},   {"doctor", 2},    {"happy", 2},      {"orange", 2},
        {"music", 2},    {"water", 2},     {"building", 2},   {"system", 2},
        {"banana", 3},   {"computer", 3},  {"beautiful", 3},  {"syllable", 3},
        {"important", 3},{"animal", 3},    {"family", 3},     {"article", 3},
        {"holiday", 3},  {"tomato", 3},    {"education", 4},  {"information", 4},
        {"america", 4},  {"calculator", 4},{"university", 5}, {"organization", 5},
        {"poem", 2},     {"rhythm", 2},
    };
    int correct = 0;
    for (const auto& [word, truth] : table)
        if (count_syllables(word) == truth) ++correct;
    CHECK(static_cast<double>(correct) / table.size() >= 0.95);
    CHECK(count_syllables("") == 1);
    CHECK(count_syllables("x7") == 1);
}

TEST_CASE("readability grade matches the hand-computed formula") {
    // 2 sentences, 10 alphanumeric words, 11 syllables (only "away" has two)
    const std::string doc = "The cat sat on the mat. The dog ran away.";
    CHECK(fkgl(doc) == doctest::Approx(0.39 * 5.0 + 11.8 * 1.1 - 15.59));
    CHECK_THROWS_AS(fkgl(""), EmptyDocumentError);
    CHECK_THROWS_AS(fkgl("..."), EmptyDocumentError);
}

TEST_CASE("fluency score is identically zero under a unigram model") {
    std::vector<std::string> corpus;
    std::mt19937 gen(5);
    for (int i = 0; i < 30; ++i) corpus.push_back(random_sentence(gen, 3, 9));
    auto lm = train_ngram_lm(corpus, 1);
    for (int trial = 0; trial < 300; ++trial)
        CHECK(std::abs(slor(random_sentence(gen, 1, 12), *lm)) < 1e-12);
}

TEST_CASE("fluency score matches its definition under higher-order models") {
    std::vector<std::string> corpus;
    std::mt19937 gen(6);
    for (int i = 0; i < 30; ++i) corpus.push_back(random_sentence(gen, 3, 9));
    auto lm = train_ngram_lm(corpus, 3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::string s = random_sentence(gen, 1, 10);
        const auto toks = metric_tokens(s);
        double unigram_sum = 0.0;
        for (const auto& t : toks) unigram_sum += lm->unigram_log_prob(t);
        const double expected = (lm->log_prob(toks) - unigram_sum) / toks.size();
        CHECK(slor(s, *lm) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK_THROWS_AS(slor("", *lm), EmptySentenceError);
}

TEST_CASE("coherence score hand fixtures") {
    // fewer than two sentences: neutral by convention
    CHECK(entity_grid_score("A single sentence here.") == doctest::Approx(0.5));
    CHECK(entity_grid_score("") == doctest::Approx(0.5));
    // no trackable mention: neutral
    CHECK(entity_grid_score("It is so. He was not.") == doctest::Approx(0.5));
    // one entity present in both sentences: the only transition has probability 1
    CHECK(entity_grid_score("Napoleon won. Napoleon lost.") == doctest::Approx(1.0));
    // an unbroken entity chain beats the same entity with a gap in the middle
    const std::string unbroken = "Paris grew. Paris expanded. Paris thrived.";
    const std::string gapped = "Paris grew. Nothing else happened. Paris expanded.";
    CHECK(entity_grid_score(unbroken) == doctest::Approx(1.0));
    CHECK(entity_grid_score(gapped) == doctest::Approx(0.5));
    CHECK(entity_grid_score(unbroken) > entity_grid_score(gapped));
}

TEST_CASE("edit-quality score matches the brute-force oracle on random triples") {
    std::mt19937 gen(31);
    std::uniform_int_distribution<int> ref_count(1, 3);
    for (int trial = 0; trial < 300; ++trial) {
        const std::string src = random_sentence(gen, 2, 9);
        const std::string pred = random_sentence(gen, 2, 9);
        std::vector<std::string> refs;
        const int n = ref_count(gen);
        for (int i = 0; i < n; ++i) refs.push_back(random_sentence(gen, 2, 9));
        const SariScore got = sari(src, pred, refs);
        const SariScore want = sari_oracle(src, pred, refs);
        CHECK(got.sari == doctest::Approx(want.sari).epsilon(1e-9));
        CHECK(got.add == doctest::Approx(want.add).epsilon(1e-9));
        CHECK(got.del == doctest::Approx(want.del).epsilon(1e-9));
        CHECK(got.keep == doctest::Approx(want.keep).epsilon(1e-9));
    }
    CHECK_THROWS_AS(sari("a b", "a b", {}), EmptyReferencesError);
}

TEST_CASE("copying the source scores zero on addition and deletion") {
    const std::string src = "the cat sat on the mat and slept";
    const std::vector<std::string> refs = {"the cat slept on the mat",
                                           "a cat was sleeping on the mat"};
    const SariScore s = sari(src, src, refs);
    CHECK(s.add == doctest::Approx(0.0));
    CHECK(s.del == doctest::Approx(0.0));
    CHECK(s.keep > 0.0);
    CHECK(s.keep < 100.0);
    CHECK(s.sari == doctest::Approx(s.keep / 3.0));
}

TEST_CASE("sentence BLEU matches the brute-force oracle") {
    std::mt19937 gen(41);
    std::uniform_int_distribution<int> ref_count(1, 3);
    for (int trial = 0; trial < 300; ++trial) {
        const std::string pred = random_sentence(gen, 1, 8);
        std::vector<std::string> refs;
        const int n = ref_count(gen);
        for (int i = 0; i < n; ++i) refs.push_back(random_sentence(gen, 1, 8));
        CHECK(sentence_bleu(pred, refs) ==
              doctest::Approx(bleu_oracle(pred, refs, true)).epsilon(1e-9));
    }
    CHECK(sentence_bleu("the cat sat on a mat", {"the cat sat on a mat"}) ==
          doctest::Approx(100.0));
}

TEST_CASE("corpus BLEU pools counts rather than averaging sentence scores") {
    std::mt19937 gen(43);
    BleuAccumulator acc;
    std::vector<double> matched(4, 0.0), total(4, 0.0);
    double pred_len = 0, ref_len = 0;
    for (int i = 0; i < 40; ++i) {
        const std::string pred = random_sentence(gen, 4, 9);
        const std::vector<std::string> refs = {random_sentence(gen, 4, 9),
                                               random_sentence(gen, 4, 9)};
        acc.add(pred, refs);
        const auto ptoks = metric_tokens(pred);
        pred_len += static_cast<double>(ptoks.size());
        std::size_t best = metric_tokens(refs[0]).size();
        auto gap = [&](std::size_t len) {
            return len > ptoks.size() ? len - ptoks.size() : ptoks.size() - len;
        };
        for (const auto& r : refs) {
            const std::size_t len = metric_tokens(r).size();
            if (gap(len) < gap(best) || (gap(len) == gap(best) && len < best)) best = len;
        }
        ref_len += static_cast<double>(best);
        for (std::size_t n = 1; n <= 4; ++n) {
            Counts clip;
            for (const auto& r : refs)
                for (const auto& [g, v] : gram_counts(metric_tokens(r), n))
                    clip[g] = std::max(clip[g], v);
            for (const auto& [g, v] : gram_counts(ptoks, n)) {
                matched[n - 1] += std::min(v, clip.count(g) ? clip.at(g) : 0.0);
                total[n - 1] += v;
            }
        }
    }
    double log_sum = 0.0;
    bool zero = false;
    for (std::size_t n = 0; n < 4; ++n) {
        if (matched[n] <= 0 || total[n] <= 0) zero = true;
        else log_sum += std::log(matched[n] / total[n]);
    }
    const double bp = pred_len < ref_len ? std::exp(1.0 - ref_len / pred_len) : 1.0;
    const double expected = zero ? 0.0 : 100.0 * bp * std::exp(log_sum / 4.0);
    CHECK(acc.score() == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("overlap recall scores match brute-force oracles") {
    std::mt19937 gen(53);
    for (int trial = 0; trial < 300; ++trial) {
        const std::string pred = random_sentence(gen, 1, 8);
        const std::string ref = random_sentence(gen, 1, 8);
        const auto p = metric_tokens(pred);
        const auto r = metric_tokens(ref);
        const RougeScore got = rouge(pred, ref);

        for (std::size_t n = 1; n <= 2; ++n) {
            const Counts pg = gram_counts(p, n), rg = gram_counts(r, n);
            double match = 0, ptotal = 0, rtotal = 0;
            for (const auto& [g, v] : pg) {
                ptotal += v;
                match += std::min(v, rg.count(g) ? rg.at(g) : 0.0);
            }
            for (const auto& [g, v] : rg) rtotal += v;
            const double expected =
                ptotal > 0 && rtotal > 0
                    ? 100.0 * f1_oracle(match / ptotal, match / rtotal)
                    : 0.0;
            CHECK((n == 1 ? got.r1 : got.r2) == doctest::Approx(expected).epsilon(1e-9));
        }

        // LCS length by exhaustive subsequence search over the shorter side
        const auto& shorter = p.size() <= r.size() ? p : r;
        const auto& longer = p.size() <= r.size() ? r : p;
        std::size_t lcs = 0;
        for (std::size_t mask = 0; mask < (std::size_t{1} << shorter.size()); ++mask) {
            std::vector<std::string> sub;
            for (std::size_t i = 0; i < shorter.size(); ++i)
                if (mask & (std::size_t{1} << i)) sub.push_back(shorter[i]);
            std::size_t j = 0;
            for (std::size_t i = 0; i < longer.size() && j < sub.size(); ++i)
                if (longer[i] == sub[j]) ++j;
            if (j == sub.size()) lcs = std::max(lcs, sub.size());
        }
        const double expected_l =
            100.0 * f1_oracle(static_cast<double>(lcs) / p.size(),
                              static_cast<double>(lcs) / r.size());
        CHECK(got.rL == doctest::Approx(expected_l).epsilon(1e-9));
    }
}

TEST_CASE("edit distance matches the recursive oracle") {
    std::mt19937 gen(61);
    for (int trial = 0; trial < 200; ++trial) {
        const std::string a = random_sentence(gen, 0, 6);
        const std::string b = random_sentence(gen, 0, 6);
        CHECK(edit_distance(a, b, DistanceUnit::Token) ==
              levenshtein_recursive(metric_tokens(a), metric_tokens(b), 0, 0));
        const std::string ca = a.substr(0, std::min<std::size_t>(a.size(), 7));
        const std::string cb = b.substr(0, std::min<std::size_t>(b.size(), 7));
        std::vector<std::string> cav, cbv;
        for (char c : ca) cav.push_back(std::string(1, c));
        for (char c : cb) cbv.push_back(std::string(1, c));
        CHECK(edit_distance(ca, cb, DistanceUnit::Character) ==
              levenshtein_recursive(cav, cbv, 0, 0));
    }
    CHECK(edit_distance("a b c", "a b c") == 0);
    CHECK(edit_distance("", "a b") == 2);
}

TEST_CASE("character n-gram similarity edge cases") {
    CHECK(char_ngram_similarity("same text", "same text") == doctest::Approx(1.0));
    CHECK(char_ngram_similarity("", "") == doctest::Approx(1.0));
    CHECK(char_ngram_similarity("abc", "xyz") == doctest::Approx(0.0));
    // whitespace is ignored
    CHECK(char_ngram_similarity("ab cd", "a b c d") == doctest::Approx(1.0));
    const double near = char_ngram_similarity("the cat sat on the mat",
                                              "the cat sat on the rug");
    const double far = char_ngram_similarity("the cat sat on the mat",
                                              "entirely unrelated words go here");
    CHECK(near > far);
    CHECK(near < 1.0);
    CHECK(far > 0.0);
}

TEST_CASE("delta report is zero for an unchanged document") {
    std::vector<std::string> corpus = {"the cat sat on the mat", "the dog ran away fast"};
    auto lm = train_ngram_lm(corpus, 2);
    const std::string doc = "The cat sat on the mat. The dog ran away.";
    const DeltaReport d = delta_report(doc, doc, *lm);
    CHECK(d.delta_slor == doctest::Approx(0.0));
    CHECK(d.delta_entity_grid == doctest::Approx(0.0));
    CHECK(d.delta_fkgl == doctest::Approx(0.0));
    CHECK(d.content_preservation == doctest::Approx(1.0));
    CHECK_THROWS_AS(delta_report("", doc, *lm), EmptyDocumentError);
}
