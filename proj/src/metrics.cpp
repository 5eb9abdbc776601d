#include "revkit/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "revkit/diff_align.hpp"

namespace revkit {

std::vector<std::string> metric_tokens(const std::string& text) {
    std::string lowered = text;
    for (char& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return token_strings(lowered);
}

namespace {

bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

bool has_alnum(const std::string& s) {
    return std::any_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isalnum(c) != 0; });
}

}  // namespace

int count_syllables(const std::string& word) {
    std::string w;
    for (char c : word)
        if (std::isalpha(static_cast<unsigned char>(c)))
            w += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (w.empty()) return 1;

    int groups = 0;
    bool in_group = false;
    for (char c : w) {
        if (is_vowel(c)) {
            if (!in_group) ++groups;
            in_group = true;
        } else {
            in_group = false;
        }
    }
    const std::size_t n = w.size();
    // silent final e ("make"), but keep consonant+le ("table")
    if (n >= 3 && w[n - 1] == 'e' && !is_vowel(w[n - 2]) && groups > 1) {
        bool cons_le = w[n - 2] == 'l' && !is_vowel(w[n - 3]);
        if (!cons_le) --groups;
    }
    // silent -ed ("walked"), unless stem ends in t/d ("wanted")
    if (n >= 3 && w[n - 2] == 'e' && w[n - 1] == 'd' && !is_vowel(w[n - 3]) &&
        w[n - 3] != 't' && w[n - 3] != 'd' && groups > 1)
        --groups;
    // silent -es ("makes"), unless stem needs the extra syllable ("boxes")
    if (n >= 3 && w[n - 2] == 'e' && w[n - 1] == 's' && !is_vowel(w[n - 3]) &&
        w[n - 3] != 's' && w[n - 3] != 'x' && w[n - 3] != 'z' && w[n - 3] != 'c' &&
        w[n - 3] != 'g' && w[n - 3] != 'h' && groups > 1)
        --groups;
    return std::max(groups, 1);
}

double fkgl(const std::string& document) {
    const auto sentences = segment_sentences(document);
    std::int64_t words = 0;
    std::int64_t syllables = 0;
    for (const std::string& tok : token_strings(document)) {
        if (!has_alnum(tok)) continue;
        ++words;
        syllables += count_syllables(tok);
    }
    if (sentences.empty() || words == 0) throw EmptyDocumentError();
    const double w = static_cast<double>(words);
    const double s = static_cast<double>(sentences.size());
    const double sy = static_cast<double>(syllables);
    return 0.39 * (w / s) + 11.8 * (sy / w) - 15.59;
}

double slor(const std::string& sentence, const LanguageModel& lm) {
    const std::vector<std::string> tokens = metric_tokens(sentence);
    if (tokens.empty()) throw EmptySentenceError();
    double unigram_sum = 0.0;
    for (const std::string& t : tokens) unigram_sum += lm.unigram_log_prob(t);
    return (lm.log_prob(tokens) - unigram_sum) / static_cast<double>(tokens.size());
}

double document_slor(const std::string& document, const LanguageModel& lm) {
    const auto sentences = segment_sentences(document);
    if (sentences.empty()) throw EmptyDocumentError();
    double sum = 0.0;
    int counted = 0;
    for (const SentenceSpan& s : sentences) {
        if (metric_tokens(s.text).empty()) continue;
        sum += slor(s.text, lm);
        ++counted;
    }
    if (counted == 0) throw EmptyDocumentError();
    return sum / counted;
}

namespace {

const std::set<std::string>& entity_stopwords() {
    static const std::set<std::string> stop = {
        "the", "and", "but", "for", "nor", "not", "with", "from", "that", "this",
        "these", "those", "they", "them", "their", "there", "then", "than", "when",
        "where", "which", "while", "was", "were", "are", "has", "have", "had",
        "been", "being", "will", "would", "could", "should", "can", "may", "might",
        "also", "into", "onto", "over", "under", "about", "after", "before", "such",
        "some", "any", "all", "each", "very", "more", "most", "its", "his", "her",
        "our", "your", "who", "whom", "whose", "what", "how", "why", "because",
        "between", "during", "through", "against", "upon", "does", "did", "doing"};
    return stop;
}

}  // namespace

double entity_grid_score(const std::string& document) {
    const auto sentences = segment_sentences(document);
    if (sentences.size() < 2) return 0.5;  // neutral by convention

    // mention detection: capitalized non-initial tokens + recurring
    // stoplist-filtered lowercase nouns
    std::vector<std::vector<std::string>> sent_tokens;
    std::map<std::string, std::set<std::size_t>> occurrences;  // key -> sentence set
    std::set<std::string> capitalized;
    for (std::size_t s = 0; s < sentences.size(); ++s) {
        const std::string& text = sentences[s].text;
        const auto toks = tokenize(text);
        for (std::size_t i = 0; i < toks.size(); ++i) {
            std::string raw = text.substr(toks[i].begin, toks[i].end - toks[i].begin);
            if (raw.empty() || !std::isalpha(static_cast<unsigned char>(raw[0]))) continue;
            std::string key = raw;
            for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (key.size() < 3 || entity_stopwords().count(key)) continue;
            bool is_cap = std::isupper(static_cast<unsigned char>(raw[0])) != 0;
            if (is_cap && i > 0) capitalized.insert(key);
            occurrences[key].insert(s);
        }
    }
    std::vector<const std::set<std::size_t>*> entities;
    for (const auto& [key, sents] : occurrences) {
        if (capitalized.count(key) || sents.size() >= 2) entities.push_back(&sents);
    }
    if (entities.empty()) return 0.5;

    // transition bigrams over present/absent states, estimated in-document
    std::map<std::pair<bool, bool>, std::int64_t> counts;
    std::int64_t total = 0;
    for (const auto* sents : entities) {
        for (std::size_t s = 0; s + 1 < sentences.size(); ++s) {
            ++counts[{sents->count(s) > 0, sents->count(s + 1) > 0}];
            ++total;
        }
    }
    double mean_log = 0.0;
    for (const auto& [trans, c] : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        mean_log += static_cast<double>(c) * std::log(p);
    }
    mean_log /= static_cast<double>(total);
    return std::exp(mean_log);
}

namespace {

using NgramCounter = std::map<std::string, std::int64_t>;

std::string join(const std::vector<std::string>& toks, std::size_t begin, std::size_t n) {
    std::string key;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) key += '\x1f';
        key += toks[begin + i];
    }
    return key;
}

NgramCounter ngrams(const std::vector<std::string>& toks, std::size_t n) {
    NgramCounter out;
    if (toks.size() >= n && n > 0)
        for (std::size_t i = 0; i + n <= toks.size(); ++i) ++out[join(toks, i, n)];
    return out;
}

NgramCounter scale(const NgramCounter& c, std::int64_t factor) {
    NgramCounter out = c;
    for (auto& [k, v] : out) v *= factor;
    return out;
}

NgramCounter intersect(const NgramCounter& a, const NgramCounter& b) {
    NgramCounter out;
    for (const auto& [k, v] : a) {
        auto it = b.find(k);
        if (it != b.end()) out[k] = std::min(v, it->second);
    }
    return out;
}

NgramCounter subtract(const NgramCounter& a, const NgramCounter& b) {
    NgramCounter out;
    for (const auto& [k, v] : a) {
        auto it = b.find(k);
        std::int64_t r = v - (it == b.end() ? 0 : it->second);
        if (r > 0) out[k] = r;
    }
    return out;
}

double f1(double p, double r) { return p + r > 0 ? 2.0 * p * r / (p + r) : 0.0; }

struct SariParts {
    double keep = 0.0, del = 0.0, add = 0.0;
};

SariParts sari_ngram(const NgramCounter& sgrams, const NgramCounter& cgrams,
                     const std::vector<NgramCounter>& rgramlist) {
    NgramCounter rgrams;
    for (const NgramCounter& r : rgramlist)
        for (const auto& [k, v] : r) rgrams[k] += v;
    const std::int64_t numref = static_cast<std::int64_t>(rgramlist.size());
    const NgramCounter s_rep = scale(sgrams, numref);
    const NgramCounter c_rep = scale(cgrams, numref);

    SariParts parts;

    // KEEP
    const NgramCounter keep_rep = intersect(s_rep, c_rep);
    const NgramCounter keep_good = intersect(keep_rep, rgrams);
    const NgramCounter keep_all = intersect(s_rep, rgrams);
    double p1 = 0.0, r1 = 0.0;
    for (const auto& [k, v] : keep_good) {
        p1 += static_cast<double>(v) / static_cast<double>(keep_rep.at(k));
        r1 += static_cast<double>(v) / static_cast<double>(keep_all.at(k));
    }
    const double keep_p = keep_rep.empty() ? 0.0 : p1 / static_cast<double>(keep_rep.size());
    const double keep_r = keep_all.empty() ? 0.0 : r1 / static_cast<double>(keep_all.size());
    parts.keep = f1(keep_p, keep_r);

    // DELETE (precision only)
    const NgramCounter del_rep = subtract(s_rep, c_rep);
    const NgramCounter del_good = subtract(del_rep, rgrams);
    double pd = 0.0;
    for (const auto& [k, v] : del_good)
        pd += static_cast<double>(v) / static_cast<double>(del_rep.at(k));
    parts.del = del_rep.empty() ? 0.0 : pd / static_cast<double>(del_rep.size());

    // ADD (set based)
    std::set<std::string> add_set, add_good, add_all;
    for (const auto& [k, v] : cgrams)
        if (!sgrams.count(k)) add_set.insert(k);
    for (const std::string& k : add_set)
        if (rgrams.count(k)) add_good.insert(k);
    for (const auto& [k, v] : rgrams)
        if (!sgrams.count(k)) add_all.insert(k);
    const double add_p =
        add_set.empty() ? 0.0 : static_cast<double>(add_good.size()) / add_set.size();
    const double add_r =
        add_all.empty() ? 0.0 : static_cast<double>(add_good.size()) / add_all.size();
    parts.add = f1(add_p, add_r);

    return parts;
}

}  // namespace

SariScore sari(const std::string& source, const std::string& prediction,
               const std::vector<std::string>& references) {
    if (references.empty()) throw EmptyReferencesError();
    const auto s = metric_tokens(source);
    const auto c = metric_tokens(prediction);
    std::vector<std::vector<std::string>> refs;
    for (const std::string& r : references) refs.push_back(metric_tokens(r));

    SariScore score;
    for (std::size_t n = 1; n <= 4; ++n) {
        std::vector<NgramCounter> rgramlist;
        for (const auto& r : refs) rgramlist.push_back(ngrams(r, n));
        const SariParts parts = sari_ngram(ngrams(s, n), ngrams(c, n), rgramlist);
        score.add += parts.add;
        score.del += parts.del;
        score.keep += parts.keep;
    }
    score.add *= 25.0;  // mean over 4 orders, scaled to [0, 100]
    score.del *= 25.0;
    score.keep *= 25.0;
    score.sari = (score.add + score.del + score.keep) / 3.0;
    return score;
}

void BleuAccumulator::add(const std::string& prediction,
                          const std::vector<std::string>& references) {
    if (references.empty()) throw EmptyReferencesError();
    const auto pred = metric_tokens(prediction);
    std::vector<std::vector<std::string>> refs;
    for (const std::string& r : references) refs.push_back(metric_tokens(r));

    pred_len += static_cast<double>(pred.size());
    // closest reference length (ties toward the shorter)
    std::size_t best = refs.front().size();
    for (const auto& r : refs) {
        auto d = [&](std::size_t len) {
            return len > pred.size() ? len - pred.size() : pred.size() - len;
        };
        if (d(r.size()) < d(best) || (d(r.size()) == d(best) && r.size() < best))
            best = r.size();
    }
    ref_len += static_cast<double>(best);

    for (std::size_t n = 1; n <= 4; ++n) {
        const NgramCounter pgrams = ngrams(pred, n);
        NgramCounter max_ref;
        for (const auto& r : refs)
            for (const auto& [k, v] : ngrams(r, n)) max_ref[k] = std::max(max_ref[k], v);
        double m = 0.0, t = 0.0;
        for (const auto& [k, v] : pgrams) {
            auto it = max_ref.find(k);
            m += static_cast<double>(std::min(v, it == max_ref.end() ? 0 : it->second));
            t += static_cast<double>(v);
        }
        matched[n - 1] += m;
        total[n - 1] += t;
    }
}

double BleuAccumulator::score() const {
    double log_sum = 0.0;
    for (std::size_t n = 0; n < 4; ++n) {
        if (total[n] <= 0.0 || matched[n] <= 0.0) return 0.0;
        log_sum += std::log(matched[n] / total[n]);
    }
    double bp = pred_len < ref_len && pred_len > 0.0 ? std::exp(1.0 - ref_len / pred_len) : 1.0;
    return 100.0 * bp * std::exp(log_sum / 4.0);
}

double sentence_bleu(const std::string& prediction, const std::vector<std::string>& references) {
    BleuAccumulator acc;
    acc.add(prediction, references);
    double log_sum = 0.0;
    for (std::size_t n = 0; n < 4; ++n) {
        double m = acc.matched[n];
        double t = acc.total[n];
        if (n > 0) {  // +1 smoothing for higher orders
            m += 1.0;
            t += 1.0;
        }
        if (t <= 0.0 || m <= 0.0) return 0.0;
        log_sum += std::log(m / t);
    }
    double bp = acc.pred_len < acc.ref_len && acc.pred_len > 0.0
                    ? std::exp(1.0 - acc.ref_len / acc.pred_len)
                    : 1.0;
    return 100.0 * bp * std::exp(log_sum / 4.0);
}

namespace {

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double overlap_f1(const NgramCounter& p, const NgramCounter& r) {
    std::int64_t match = 0, ptotal = 0, rtotal = 0;
    for (const auto& [k, v] : p) {
        ptotal += v;
        auto it = r.find(k);
        if (it != r.end()) match += std::min(v, it->second);
    }
    for (const auto& [k, v] : r) rtotal += v;
    if (ptotal == 0 || rtotal == 0) return 0.0;
    const double prec = static_cast<double>(match) / ptotal;
    const double rec = static_cast<double>(match) / rtotal;
    return f1(prec, rec);
}

}  // namespace

RougeScore rouge(const std::string& prediction, const std::string& reference) {
    const auto p = metric_tokens(prediction);
    const auto r = metric_tokens(reference);
    RougeScore score;
    score.r1 = 100.0 * overlap_f1(ngrams(p, 1), ngrams(r, 1));
    score.r2 = 100.0 * overlap_f1(ngrams(p, 2), ngrams(r, 2));
    if (!p.empty() && !r.empty()) {
        const double lcs = static_cast<double>(lcs_length(p, r));
        const double prec = lcs / static_cast<double>(p.size());
        const double rec = lcs / static_cast<double>(r.size());
        score.rL = 100.0 * f1(prec, rec);
    }
    return score;
}

namespace {

template <typename Seq>
std::int64_t levenshtein(const Seq& a, const Seq& b) {
    std::vector<std::int64_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<std::int64_t>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<std::int64_t>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::int64_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

}  // namespace

std::int64_t edit_distance(const std::string& a, const std::string& b, DistanceUnit unit) {
    if (unit == DistanceUnit::Character) return levenshtein(a, b);
    return levenshtein(token_strings(a), token_strings(b));
}

double char_ngram_similarity(const std::string& a, const std::string& b) {
    auto strip = [](const std::string& s) {
        std::string out;
        for (char c : s)
            if (!std::isspace(static_cast<unsigned char>(c))) out += c;
        return out;
    };
    const std::string sa = strip(a);
    const std::string sb = strip(b);
    double sum = 0.0;
    int orders = 0;
    for (std::size_t n = 1; n <= 6; ++n) {
        if (sa.size() < n && sb.size() < n) break;
        NgramCounter ga, gb;
        for (std::size_t i = 0; i + n <= sa.size(); ++i) ++ga[sa.substr(i, n)];
        for (std::size_t i = 0; i + n <= sb.size(); ++i) ++gb[sb.substr(i, n)];
        sum += overlap_f1(ga, gb);
        ++orders;
    }
    return orders == 0 ? 1.0 : sum / orders;
}

DeltaReport delta_report(const std::string& original, const std::string& revised,
                         const LanguageModel& lm, const ContentSimilarity& similarity) {
    if (original.empty() || revised.empty()) throw EmptyDocumentError();
    DeltaReport d;
    d.delta_slor = document_slor(revised, lm) - document_slor(original, lm);
    d.delta_entity_grid = entity_grid_score(revised) - entity_grid_score(original);
    d.delta_fkgl = fkgl(revised) - fkgl(original);
    d.content_preservation = similarity(original, revised);
    return d;
}

}  // namespace revkit
