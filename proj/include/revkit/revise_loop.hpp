#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "revkit/corpus.hpp"
#include "revkit/lm.hpp"
#include "revkit/metrics.hpp"

namespace revkit {

struct ReviserFailure : std::runtime_error {
    ReviserFailure(const std::string& what, int depth)
        : std::runtime_error(what + " (depth " + std::to_string(depth) + ")"), depth(depth) {}
    int depth;
};
struct InvalidRuleConfig : std::runtime_error {
    explicit InvalidRuleConfig(const std::string& what) : std::runtime_error(what) {}
};
struct BadTemplate : std::runtime_error {
    explicit BadTemplate(const std::string& what) : std::runtime_error(what) {}
};

class Reviser {
public:
    virtual ~Reviser() = default;
    // Must be deterministic in (document, conditioning, depth).
    virtual std::string revise(const std::string& document,
                               const std::vector<EditIntention>& conditioning, int depth) = 0;
    virtual std::string name() const = 0;
    // Rule-based revisers report what they changed; others may return empty.
    virtual std::vector<EditAction> last_actions() const { return {}; }
};

// predicate(previous text, revised text, metrics or nullptr) -> fire?
using StopPredicate =
    std::function<bool(const std::string&, const std::string&, const MetricReport*)>;

struct StoppingCriteria {
    int max_depth = 10;
    std::int64_t min_edit_distance = 0;
    std::vector<std::pair<std::string, StopPredicate>> predicates;
};

enum class StopReason { DepthCutoff, Converged, CustomPredicate };

struct LoopIteration {
    int depth = 0;
    std::string text;
    std::int64_t edit_distance_to_previous = 0;
    std::optional<MetricReport> metrics;
};

struct LoopTrace {
    std::string doc_id;
    std::vector<LoopIteration> iterations;
    StopReason stop_reason = StopReason::Converged;
    std::string fired_predicate;  // set when stop_reason == CustomPredicate
};

struct LoopOptions {
    std::vector<EditIntention> conditioning;
    bool per_depth_metrics = false;           // metric evaluation can be expensive
    const LanguageModel* metric_lm = nullptr;  // required when per_depth_metrics
};

LoopTrace run_iterative(Reviser& reviser, const std::string& document,
                        const StoppingCriteria& criteria, const LoopOptions& options = {},
                        const std::string& doc_id = "");

struct RuleConfig {
    bool collapse_double_spaces = true;
    bool normalize_quotes = true;
    bool remove_duplicated_words = true;
    bool capitalize_sentence_starts = true;
    // literal (pattern, replacement) substitutions, applied to fixpoint
    std::vector<std::pair<std::string, std::string>> substitutions;
};

std::unique_ptr<Reviser> make_rule_based_reviser(const RuleConfig& config = {});

// Child process reads the document on stdin and writes the revision on stdout.
std::unique_ptr<Reviser> make_exec_reviser(const std::string& command);

class IdentityReviser : public Reviser {
public:
    std::string revise(const std::string& document, const std::vector<EditIntention>&,
                       int) override {
        return document;
    }
    std::string name() const override { return "identity"; }
};

struct IterativenessReport {
    struct PerReviser {
        std::string name;
        double mean_iterations = 0.0;
        std::vector<std::int64_t> histogram;  // index = iteration count, [0] unused
    };
    std::vector<PerReviser> revisers;
    std::string render_table() const;
    std::string render_svg() const;
};

IterativenessReport iterativeness_report(
    const std::vector<std::pair<std::string, LoopTrace>>& traces);

// Mean chain length in revisions (= iterations per document).
double mean_iterations(const std::vector<RevisionChain>& chains);

std::string condition_input(const std::string& document,
                            const std::vector<EditIntention>& intentions,
                            const std::string& template_str = "<{intent}> {text}");

nlohmann::json trace_to_json(const LoopTrace& trace);

}  // namespace revkit
