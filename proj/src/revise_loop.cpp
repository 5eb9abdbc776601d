#include "revkit/revise_loop.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "revkit/diff_align.hpp"

namespace revkit {

LoopTrace run_iterative(Reviser& reviser, const std::string& document,
                        const StoppingCriteria& criteria, const LoopOptions& options,
                        const std::string& doc_id) {
    if (criteria.max_depth < 1) throw InvalidRuleConfig("max_depth must be >= 1");
    if (document.empty()) throw std::invalid_argument("document must be non-empty");

    LoopTrace trace;
    trace.doc_id = doc_id;
    std::string current = document;
    for (int depth = 1; depth <= criteria.max_depth; ++depth) {
        std::string next;
        try {
            next = reviser.revise(current, options.conditioning, depth);
        } catch (const std::exception& e) {
            throw ReviserFailure(e.what(), depth);
        }
        LoopIteration it;
        it.depth = depth;
        it.text = next;
        it.edit_distance_to_previous = edit_distance(current, next, DistanceUnit::Token);
        if (options.per_depth_metrics && options.metric_lm) {
            MetricReport report;
            report.fkgl = fkgl(next);
            report.slor = document_slor(next, *options.metric_lm);
            report.entity_grid = entity_grid_score(next);
            report.edit_distance = it.edit_distance_to_previous;
            report.content_preservation = char_ngram_similarity(current, next);
            it.metrics = report;
        }
        trace.iterations.push_back(std::move(it));
        const LoopIteration& recorded = trace.iterations.back();

        for (const auto& [name, pred] : criteria.predicates) {
            const MetricReport* m = recorded.metrics ? &*recorded.metrics : nullptr;
            if (pred(current, recorded.text, m)) {
                trace.stop_reason = StopReason::CustomPredicate;
                trace.fired_predicate = name;
                return trace;
            }
        }
        if (recorded.edit_distance_to_previous <= criteria.min_edit_distance) {
            trace.stop_reason = StopReason::Converged;
            return trace;
        }
        current = recorded.text;
    }
    trace.stop_reason = StopReason::DepthCutoff;
    return trace;
}

namespace {

std::string run_to_fixpoint(std::string text, const std::function<std::string(std::string)>& step,
                            const char* rule_name) {
    for (int i = 0; i < 64; ++i) {
        std::string next = step(text);
        if (next == text) return text;
        text = std::move(next);
    }
    throw InvalidRuleConfig(std::string("rule '") + rule_name + "' does not reach a fixpoint");
}

class RuleBasedReviser : public Reviser {
public:
    explicit RuleBasedReviser(RuleConfig config) : config_(std::move(config)) {
        for (const auto& [pattern, replacement] : config_.substitutions) {
            if (pattern.empty()) throw InvalidRuleConfig("empty substitution pattern");
            if (replacement.find(pattern) != std::string::npos)
                throw InvalidRuleConfig("substitution '" + pattern +
                                        "' reintroduces its own pattern");
        }
    }

    std::string revise(const std::string& document, const std::vector<EditIntention>&,
                       int) override {
        std::string text = document;
        if (config_.normalize_quotes) text = normalize_quotes(text);
        if (config_.remove_duplicated_words)
            text = run_to_fixpoint(text, remove_duplicated_words, "duplicated-word removal");
        if (config_.collapse_double_spaces) text = collapse_spaces(text);
        if (config_.capitalize_sentence_starts) text = capitalize_sentences(text);
        for (const auto& [pattern, replacement] : config_.substitutions) {
            text = run_to_fixpoint(
                text,
                [&](std::string t) {
                    std::string out;
                    std::size_t pos = 0;
                    while (true) {
                        const std::size_t hit = t.find(pattern, pos);
                        if (hit == std::string::npos) {
                            out += t.substr(pos);
                            break;
                        }
                        out += t.substr(pos, hit - pos);
                        out += replacement;
                        pos = hit + pattern.size();
                    }
                    return out;
                },
                "substitution");
        }
        record_actions(document, text);
        return text;
    }

    std::string name() const override { return "rules"; }
    std::vector<EditAction> last_actions() const override { return last_actions_; }

private:
    static std::string normalize_quotes(const std::string& text) {
        std::string out = text;
        auto replace_all = [&](const char* from, const char* to) {
            std::size_t pos = 0;
            const std::string f = from;
            while ((pos = out.find(f, pos)) != std::string::npos) {
                out.replace(pos, f.size(), to);
                pos += std::strlen(to);
            }
        };
        replace_all("\xE2\x80\x9C", "\"");  // left double quote
        replace_all("\xE2\x80\x9D", "\"");  // right double quote
        replace_all("\xE2\x80\x98", "'");   // left single quote
        replace_all("\xE2\x80\x99", "'");   // right single quote
        return out;
    }

    static std::string collapse_spaces(const std::string& text) {
        std::string out;
        out.reserve(text.size());
        for (char c : text) {
            if (c == ' ' && !out.empty() && out.back() == ' ') continue;
            out += c;
        }
        return out;
    }

    static std::string remove_duplicated_words(std::string text) {
        static const std::regex dup(R"(\b([A-Za-z]+)( +)\1\b)");
        return std::regex_replace(text, dup, "$1");
    }

    static std::string capitalize_sentences(const std::string& text) {
        std::string out = text;
        for (const SentenceSpan& s : segment_sentences(out)) {
            for (std::size_t i = s.range.begin; i < s.range.end; ++i) {
                const unsigned char c = static_cast<unsigned char>(out[i]);
                if (std::isalpha(c)) {
                    out[i] = static_cast<char>(std::toupper(c));
                    break;
                }
                if (!std::isspace(c) && c != '"' && c != '\'' && c != '(') break;
            }
        }
        return out;
    }

    void record_actions(const std::string& before, const std::string& after) {
        last_actions_.clear();
        if (before == after) return;
        Revision rev = extract_revision("", 0, before, after);
        for (EditAction& a : rev.actions) {
            a.intention = EditIntention::Fluency;  // all rule families fix surface errors
            a.intention_confidence = 1.0;
        }
        last_actions_ = std::move(rev.actions);
    }

    RuleConfig config_;
    std::vector<EditAction> last_actions_;
};

class ExecReviser : public Reviser {
public:
    explicit ExecReviser(std::string command) : command_(std::move(command)) {
        if (command_.empty()) throw InvalidRuleConfig("empty reviser command");
    }

    std::string revise(const std::string& document, const std::vector<EditIntention>&,
                       int) override {
        const std::string in_path = temp_path("in");
        const std::string out_path = temp_path("out");
        {
            std::ofstream in(in_path, std::ios::binary);
            in << document;
        }
        const std::string shell = command_ + " < " + in_path + " > " + out_path;
        const int rc = std::system(shell.c_str());
        std::string result;
        {
            std::ifstream out(out_path, std::ios::binary);
            std::ostringstream ss;
            ss << out.rdbuf();
            result = ss.str();
        }
        std::remove(in_path.c_str());
        std::remove(out_path.c_str());
        if (rc != 0) throw std::runtime_error("reviser command failed: " + command_);
        return result;
    }

    std::string name() const override { return "exec:" + command_; }

private:
    std::string temp_path(const char* tag) {
        return "/tmp/revkit-exec-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "-" +
               tag + "-" + std::to_string(counter_++) + ".txt";
    }

    std::string command_;
    std::uint64_t counter_ = 0;
};

}  // namespace

std::unique_ptr<Reviser> make_rule_based_reviser(const RuleConfig& config) {
    return std::make_unique<RuleBasedReviser>(config);
}

std::unique_ptr<Reviser> make_exec_reviser(const std::string& command) {
    return std::make_unique<ExecReviser>(command);
}

IterativenessReport iterativeness_report(
    const std::vector<std::pair<std::string, LoopTrace>>& traces) {
    if (traces.empty()) throw std::invalid_argument("no traces");
    std::map<std::string, std::vector<std::size_t>> counts;
    for (const auto& [name, trace] : traces) counts[name].push_back(trace.iterations.size());

    IterativenessReport report;
    for (const auto& [name, lengths] : counts) {
        IterativenessReport::PerReviser row;
        row.name = name;
        const std::size_t max_len = *std::max_element(lengths.begin(), lengths.end());
        row.histogram.assign(max_len + 1, 0);
        double sum = 0.0;
        for (std::size_t n : lengths) {
            ++row.histogram[n];
            sum += static_cast<double>(n);
        }
        row.mean_iterations = sum / static_cast<double>(lengths.size());
        report.revisers.push_back(std::move(row));
    }
    return report;
}

std::string IterativenessReport::render_table() const {
    std::ostringstream out;
    out << "reviser              mean  distribution (iterations: count)\n";
    for (const auto& row : revisers) {
        out << row.name;
        for (std::size_t i = row.name.size(); i < 20; ++i) out << ' ';
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%5.2f", row.mean_iterations);
        out << buf << "  ";
        bool first = true;
        for (std::size_t n = 1; n < row.histogram.size(); ++n) {
            if (row.histogram[n] == 0) continue;
            if (!first) out << ", ";
            out << n << ": " << row.histogram[n];
            first = false;
        }
        out << '\n';
    }
    return out.str();
}

std::string IterativenessReport::render_svg() const {
    std::int64_t max_count = 1;
    std::size_t max_iter = 1;
    for (const auto& row : revisers) {
        max_iter = std::max(max_iter, row.histogram.size() - 1);
        for (std::int64_t c : row.histogram) max_count = std::max(max_count, c);
    }
    const int bar_w = 18;
    const int group_gap = 8;
    const int chart_h = 160;
    const int width =
        40 + static_cast<int>(max_iter) * (static_cast<int>(revisers.size()) * bar_w + group_gap);
    const int height = chart_h + 60;
    static const char* palette[] = {"#4878a8", "#e08030", "#50a050", "#b05050"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    svg << "<line x1=\"30\" y1=\"" << chart_h + 10 << "\" x2=\"" << width - 5 << "\" y2=\""
        << chart_h + 10 << "\" stroke=\"#444\"/>\n";
    for (std::size_t n = 1; n <= max_iter; ++n) {
        const int gx = 40 + static_cast<int>(n - 1) *
                                (static_cast<int>(revisers.size()) * bar_w + group_gap);
        for (std::size_t r = 0; r < revisers.size(); ++r) {
            const auto& hist = revisers[r].histogram;
            const std::int64_t c = n < hist.size() ? hist[n] : 0;
            const int h = static_cast<int>(static_cast<double>(c) / static_cast<double>(max_count) *
                                           chart_h);
            svg << "<rect x=\"" << gx + static_cast<int>(r) * bar_w << "\" y=\""
                << chart_h + 10 - h << "\" width=\"" << bar_w - 2 << "\" height=\"" << h
                << "\" fill=\"" << palette[r % 4] << "\"/>\n";
        }
        svg << "<text x=\"" << gx + static_cast<int>(revisers.size()) * bar_w / 2 << "\" y=\""
            << chart_h + 26 << "\" font-size=\"11\" text-anchor=\"middle\">" << n << "</text>\n";
    }
    int ly = chart_h + 44;
    int lx = 40;
    for (std::size_t r = 0; r < revisers.size(); ++r) {
        svg << "<rect x=\"" << lx << "\" y=\"" << ly - 10 << "\" width=\"10\" height=\"10\" fill=\""
            << palette[r % 4] << "\"/>\n";
        svg << "<text x=\"" << lx + 14 << "\" y=\"" << ly << "\" font-size=\"11\">"
            << revisers[r].name << "</text>\n";
        lx += 14 + static_cast<int>(revisers[r].name.size()) * 7 + 16;
    }
    svg << "</svg>\n";
    return svg.str();
}

double mean_iterations(const std::vector<RevisionChain>& chains) {
    if (chains.empty()) throw std::invalid_argument("no chains");
    double sum = 0.0;
    for (const RevisionChain& c : chains) sum += static_cast<double>(c.revisions.size());
    return sum / static_cast<double>(chains.size());
}

std::string condition_input(const std::string& document,
                            const std::vector<EditIntention>& intentions,
                            const std::string& template_str) {
    if (template_str.find("{text}") == std::string::npos)
        throw BadTemplate("template lacks {text} placeholder");
    if (template_str.find("{intent}") == std::string::npos)
        throw BadTemplate("template lacks {intent} placeholder");
    if (intentions.empty()) return document;

    std::string intents;
    for (std::size_t i = 0; i < intentions.size(); ++i) {
        if (i > 0) intents += ' ';
        std::string label = to_string(intentions[i]);
        for (char& c : label) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        intents += label;
    }
    std::string out = template_str;
    auto replace_one = [&](const std::string& what, const std::string& with) {
        std::size_t pos;
        while ((pos = out.find(what)) != std::string::npos) out.replace(pos, what.size(), with);
    };
    replace_one("{intent}", intents);
    replace_one("{text}", document);
    return out;
}

nlohmann::json trace_to_json(const LoopTrace& trace) {
    nlohmann::json iterations = nlohmann::json::array();
    for (const LoopIteration& it : trace.iterations) {
        nlohmann::json j{{"depth", it.depth},
                         {"text", it.text},
                         {"edit_distance", it.edit_distance_to_previous}};
        if (it.metrics) {
            j["metrics"] = {{"fkgl", it.metrics->fkgl},
                            {"slor", it.metrics->slor},
                            {"entity_grid", it.metrics->entity_grid},
                            {"content_preservation", it.metrics->content_preservation}};
        }
        iterations.push_back(std::move(j));
    }
    std::string reason = trace.stop_reason == StopReason::DepthCutoff ? "depth_cutoff"
                         : trace.stop_reason == StopReason::Converged ? "converged"
                                                                      : "predicate";
    nlohmann::json out{
        {"doc_id", trace.doc_id}, {"iterations", iterations}, {"stop_reason", reason}};
    if (!trace.fired_predicate.empty()) out["predicate"] = trace.fired_predicate;
    return out;
}

}  // namespace revkit
