#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace revkit {

// Pluggable sentence-probability back end for fluency scoring.
class LanguageModel {
public:
    virtual ~LanguageModel() = default;
    // sum over tokens of log P(token | context), natural log, <= 0
    virtual double log_prob(const std::vector<std::string>& tokens) const = 0;
    // smoothed unigram log probability; finite for unseen tokens
    virtual double unigram_log_prob(const std::string& token) const = 0;
    virtual std::size_t vocabulary_size() const = 0;
};

// Backoff n-gram model with absolute discounting. Conditional distributions
// are proper over the closed vocabulary (seen types + one unseen slot).
class NgramLanguageModel : public LanguageModel {
public:
    NgramLanguageModel(int order, double discount = 0.75);

    void add_sentence(const std::vector<std::string>& tokens);
    void finalize();

    double log_prob(const std::vector<std::string>& tokens) const override;
    double unigram_log_prob(const std::string& token) const override;
    std::size_t vocabulary_size() const override;

    int order() const { return order_; }
    // P(token | context), context = up to order-1 preceding tokens
    double cond_prob(const std::vector<std::string>& context, const std::string& token) const;

private:
    double cond_prob_ids(const std::vector<int>& context, int token) const;
    int id_of(const std::string& token) const;  // -1 = unseen

    int order_;
    double discount_;
    std::map<std::string, int> vocab_;
    // counts per n-gram order: key = id sequence
    std::vector<std::map<std::vector<int>, std::int64_t>> counts_;   // [len-1] -> count
    std::vector<std::map<std::vector<int>, std::int64_t>> distinct_; // continuations per context
    std::int64_t total_tokens_ = 0;
    bool finalized_ = false;
};

struct EmptyCorpusError : std::runtime_error {
    EmptyCorpusError() : std::runtime_error("language model corpus is empty") {}
};

// Trains an order-n model (1 <= n <= 5) over the corpus lines; deterministic
// given corpus order.
std::unique_ptr<NgramLanguageModel> train_ngram_lm(const std::vector<std::string>& corpus, int n);

}  // namespace revkit
