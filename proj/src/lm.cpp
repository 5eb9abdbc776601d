#include "revkit/lm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "revkit/metrics.hpp"

namespace revkit {

namespace {
constexpr int kSentenceStartId = -2;
constexpr int kUnseenId = -1;
}  // namespace

NgramLanguageModel::NgramLanguageModel(int order, double discount)
    : order_(order), discount_(discount) {
    if (order < 1 || order > 5) throw std::invalid_argument("order must be in [1, 5]");
    if (discount <= 0.0 || discount >= 1.0) throw std::invalid_argument("discount must be in (0,1)");
    counts_.resize(static_cast<std::size_t>(order));
    distinct_.resize(static_cast<std::size_t>(order));
}

void NgramLanguageModel::add_sentence(const std::vector<std::string>& tokens) {
    if (finalized_) throw std::logic_error("model already finalized");
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (const std::string& t : tokens) {
        auto [it, inserted] = vocab_.emplace(t, static_cast<int>(vocab_.size()));
        ids.push_back(it->second);
    }
    total_tokens_ += static_cast<std::int64_t>(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (int len = 1; len <= order_; ++len) {
            std::vector<int> gram;
            gram.reserve(static_cast<std::size_t>(len));
            for (int k = len - 1; k >= 1; --k) {
                std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(i) - k;
                gram.push_back(idx >= 0 ? ids[static_cast<std::size_t>(idx)] : kSentenceStartId);
            }
            gram.push_back(ids[i]);
            ++counts_[static_cast<std::size_t>(len - 1)][gram];
        }
    }
}

void NgramLanguageModel::finalize() {
    if (finalized_) return;
    // distinct continuation counts per context (N1+)
    for (int len = 2; len <= order_; ++len) {
        for (const auto& [gram, count] : counts_[static_cast<std::size_t>(len - 1)]) {
            std::vector<int> context(gram.begin(), gram.end() - 1);
            ++distinct_[static_cast<std::size_t>(len - 1)][context];
        }
    }
    finalized_ = true;
}

int NgramLanguageModel::id_of(const std::string& token) const {
    auto it = vocab_.find(token);
    return it == vocab_.end() ? kUnseenId : it->second;
}

std::size_t NgramLanguageModel::vocabulary_size() const { return vocab_.size(); }

double NgramLanguageModel::cond_prob_ids(const std::vector<int>& context, int token) const {
    if (context.empty()) {
        // absolute-discounted unigram over seen types + one unseen slot
        const auto& unigrams = counts_[0];
        const double types = static_cast<double>(unigrams.size());
        const double n = static_cast<double>(total_tokens_);
        double seen_count = 0.0;
        if (token != kUnseenId) {
            auto it = unigrams.find({token});
            if (it != unigrams.end()) seen_count = static_cast<double>(it->second);
        }
        const double reserved = discount_ * types / n;
        return std::max(seen_count - discount_, 0.0) / n + reserved / (types + 1.0);
    }
    const std::size_t len = context.size() + 1;
    std::vector<int> shorter(context.begin() + 1, context.end());
    const auto& grams = counts_[len - 1];
    const auto& dis = distinct_[len - 1];
    auto dit = dis.find(context);
    if (dit == dis.end()) return cond_prob_ids(shorter, token);  // unseen context
    // total continuations of this context
    double total = 0.0;
    {
        std::vector<int> lo = context;
        lo.push_back(std::numeric_limits<int>::min());
        for (auto it = grams.lower_bound(lo);
             it != grams.end() && std::equal(context.begin(), context.end(), it->first.begin());
             ++it)
            total += static_cast<double>(it->second);
    }
    double count = 0.0;
    {
        std::vector<int> gram = context;
        gram.push_back(token);
        auto it = grams.find(gram);
        if (it != grams.end()) count = static_cast<double>(it->second);
    }
    const double lambda = discount_ * static_cast<double>(dit->second) / total;
    return std::max(count - discount_, 0.0) / total + lambda * cond_prob_ids(shorter, token);
}

double NgramLanguageModel::cond_prob(const std::vector<std::string>& context,
                                     const std::string& token) const {
    std::vector<int> ctx;
    const std::size_t keep = std::min(context.size(), static_cast<std::size_t>(order_ - 1));
    for (std::size_t i = static_cast<std::size_t>(order_ - 1); i > keep; --i)
        ctx.push_back(kSentenceStartId);
    for (std::size_t i = context.size() - keep; i < context.size(); ++i)
        ctx.push_back(id_of(context[i]));
    return cond_prob_ids(ctx, id_of(token));
}

double NgramLanguageModel::log_prob(const std::vector<std::string>& tokens) const {
    double sum = 0.0;
    std::vector<std::string> context;
    for (const std::string& t : tokens) {
        sum += std::log(cond_prob(context, t));
        context.push_back(t);
    }
    return sum;
}

double NgramLanguageModel::unigram_log_prob(const std::string& token) const {
    return std::log(cond_prob_ids({}, id_of(token)));
}

std::unique_ptr<NgramLanguageModel> train_ngram_lm(const std::vector<std::string>& corpus, int n) {
    if (corpus.empty()) throw EmptyCorpusError();
    auto lm = std::make_unique<NgramLanguageModel>(n);
    bool any = false;
    for (const std::string& line : corpus) {
        std::vector<std::string> toks = metric_tokens(line);
        if (toks.empty()) continue;
        lm->add_sentence(toks);
        any = true;
    }
    if (!any) throw EmptyCorpusError();
    lm->finalize();
    return lm;
}

}  // namespace revkit
