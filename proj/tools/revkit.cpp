#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "revkit/annotation.hpp"
#include "revkit/diff_align.hpp"
#include "revkit/ingest.hpp"
#include "revkit/intent.hpp"
#include "revkit/jsonl.hpp"
#include "revkit/lm.hpp"
#include "revkit/metrics.hpp"
#include "revkit/revise_loop.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace revkit;

namespace {

constexpr const char* kVersion = "0.1.0";

struct GlobalOptions {
    bool json_errors = false;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    std::uint64_t seed = 0;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// temp + rename so readers never observe a partial file
void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
    }
    fs::rename(tmp, path);
}

void write_manifest(const std::string& out_path, const GlobalOptions& global,
                    const std::vector<std::string>& inputs, const json& config) {
    json digests = json::object();
    for (const std::string& in : inputs) {
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(fnv1a(read_file(in))));
        digests[in] = buf;
    }
    char cfg[17];
    std::snprintf(cfg, sizeof(cfg), "%016llx",
                  static_cast<unsigned long long>(fnv1a(config.dump())));
    json manifest{{"tool", "revkit"},
                  {"version", kVersion},
                  {"seed", global.seed},
                  {"config_hash", cfg},
                  {"input_digests", digests}};
    atomic_write(out_path + ".manifest.json", manifest.dump(2) + "\n");
}

void require_file(const std::string& path) {
    if (!fs::exists(path)) throw std::runtime_error("input file does not exist: " + path);
}

// ---- stats ----

int cmd_stats(const std::string& in, const std::string& format) {
    require_file(in);
    std::ifstream f(in, std::ios::binary);
    CorpusStats stats;
    for_each_revision(f, [&](Revision&& rev) { stats.add(rev); });

    const Domain domains[] = {Domain::ArXiv, Domain::Wikipedia, Domain::Wikinews, Domain::Other};
    if (format == "json") {
        json by_domain = json::object();
        for (Domain d : domains) {
            const auto cell = stats.domain_total(d);
            if (cell.revisions == 0) continue;
            json depths = json::object();
            for (const auto& [key, c] : stats.by_domain_depth)
                if (key.first == d)
                    depths[std::to_string(key.second)] = {{"revisions", c.revisions},
                                                          {"actions", c.actions}};
            by_domain[to_string(d)] = {
                {"revisions", cell.revisions}, {"actions", cell.actions}, {"by_depth", depths}};
        }
        json intents = json::object();
        for (EditIntention i : all_intentions())
            if (stats.intention_counts.count(i))
                intents[to_string(i)] = {{"count", stats.intention_counts.at(i)},
                                         {"ratio", stats.intention_ratio(i)}};
        json out{{"domains", by_domain},
                 {"intentions", intents},
                 {"total_revisions", stats.total_revisions},
                 {"total_actions", stats.total_actions}};
        std::cout << out.dump(2) << "\n";
        return 0;
    }

    const char sep = format == "tsv" ? '\t' : ' ';
    std::cout << "domain" << sep << "depth" << sep << "revisions" << sep << "actions\n";
    for (Domain d : domains) {
        for (const auto& [key, cell] : stats.by_domain_depth) {
            if (key.first != d) continue;
            std::cout << to_string(d) << sep << key.second << sep << cell.revisions << sep
                      << cell.actions << "\n";
        }
        const auto total = stats.domain_total(d);
        if (total.revisions > 0)
            std::cout << to_string(d) << sep << "all" << sep << total.revisions << sep
                      << total.actions << "\n";
    }
    std::cout << "\nintention" << sep << "count" << sep << "ratio\n";
    for (EditIntention i : all_intentions()) {
        if (!stats.intention_counts.count(i)) continue;
        char ratio[16];
        std::snprintf(ratio, sizeof(ratio), "%.2f%%", 100.0 * stats.intention_ratio(i));
        std::cout << to_string(i) << sep << stats.intention_counts.at(i) << sep << ratio << "\n";
    }
    return 0;
}

// ---- ingest ----

int cmd_ingest(const GlobalOptions& global, const std::string& source,
               const std::string& seed_list, const std::string& endpoint,
               const std::string& local_dir, int max_versions, double rate_limit,
               const std::string& out) {
    FetchPolicy policy;
    policy.max_versions_per_doc = max_versions;
    policy.rate_limit = rate_limit;

    std::vector<std::string> ids;
    std::vector<std::string> inputs;
    if (!seed_list.empty()) {
        require_file(seed_list);
        inputs.push_back(seed_list);
        std::ifstream f(seed_list);
        std::string line;
        while (std::getline(f, line))
            if (!line.empty() && line[0] != '#') ids.push_back(line);
    } else if (source == "local" && !local_dir.empty()) {
        ids = list_local_doc_ids(local_dir);
    }
    if (ids.empty()) throw std::runtime_error("no documents to ingest (empty seed list)");

    std::vector<Revision> pairs;
    for (const std::string& id : ids) {
        std::vector<RawVersion> versions;
        if (source == "local") {
            versions = load_local_versions(local_dir, id);
        } else if (source == "arxiv") {
            versions = fetch_arxiv_versions(endpoint, id, policy);
        } else {
            const SourceKind kind =
                source == "wikinews" ? SourceKind::Wikinews : SourceKind::Wikipedia;
            versions = fetch_wiki_history(endpoint, id, policy, kind);
            for (RawVersion& v : versions) v.payload = parse_wikitext(v.payload);
        }
        RevisionChain chain = build_chain(std::move(versions));
        for (Revision& rev : chain.revisions) pairs.push_back(std::move(rev));
    }

    std::ostringstream body;
    write_jsonl(body, pairs);
    atomic_write(out, body.str());
    write_manifest(out, global, inputs,
                   json{{"cmd", "ingest"}, {"source", source}, {"max_versions", max_versions}});
    std::cerr << "wrote " << pairs.size() << " revision pairs to " << out << "\n";
    return 0;
}

// ---- extract ----

int cmd_extract(const GlobalOptions& global, const std::string& in, const std::string& out,
                const std::string& granularity) {
    require_file(in);
    std::vector<Revision> records;
    {
        std::ifstream f(in, std::ios::binary);
        for_each_revision(f, [&](Revision&& rev) { records.push_back(std::move(rev)); });
    }

    const int threads = std::max(1, global.threads);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= records.size()) return;
            Revision& rec = records[i];
            if (rec.source_text == rec.target_text) {
                rec.actions.clear();
                continue;
            }
            Revision extracted =
                extract_revision(rec.doc_id, rec.depth, rec.source_text, rec.target_text);
            rec.actions = std::move(extracted.actions);
            if (granularity == "sentence") {
                std::erase_if(rec.actions, [](const EditAction& a) {
                    return a.granularity != Granularity::SentenceLevel;
                });
            } else if (granularity == "paragraph") {
                std::erase_if(rec.actions, [](const EditAction& a) {
                    return a.granularity == Granularity::SentenceLevel;
                });
            }
        }
    };
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::ostringstream body;
    write_jsonl(body, records);
    atomic_write(out, body.str());
    write_manifest(out, global, {in}, json{{"cmd", "extract"}, {"granularity", granularity}});
    std::cerr << "extracted actions for " << records.size() << " pairs\n";
    return 0;
}

// ---- classify / train-intent ----

int cmd_classify(const GlobalOptions& global, const std::string& model_path,
                 const std::string& in, const std::string& out) {
    require_file(model_path);
    require_file(in);
    const ClassifierModel model = model_from_json(json::parse(read_file(model_path)));
    std::vector<Revision> records;
    {
        std::ifstream f(in, std::ios::binary);
        for_each_revision(f, [&](Revision&& rev) { records.push_back(std::move(rev)); });
    }
    auto_annotate(model, records);
    std::ostringstream body;
    write_jsonl(body, records);
    atomic_write(out, body.str());
    write_manifest(out, global, {model_path, in}, json{{"cmd", "classify"}});
    return 0;
}

std::vector<LabeledExample> corpus_examples(const std::vector<Revision>& records) {
    std::vector<LabeledExample> examples;
    for (const Revision& rev : records)
        for (const EditAction& action : rev.actions)
            if (action.intention)
                examples.push_back({extract_features(action, rev), *action.intention});
    return examples;
}

int cmd_train_intent(const GlobalOptions& global, const std::string& in, const std::string& out) {
    require_file(in);
    std::vector<Revision> records;
    {
        std::ifstream f(in, std::ios::binary);
        for_each_revision(f, [&](Revision&& rev) { records.push_back(std::move(rev)); });
    }
    const std::vector<LabeledExample> examples = corpus_examples(records);
    const SplitResult split = split_dataset(examples, global.seed);
    std::cerr << "split: " << split.train.size() << " train / " << split.validation.size()
              << " validation / " << split.test.size() << " test\n";

    TrainConfig config;
    config.seed = global.seed;
    const ClassifierModel model = train(split.train, split.validation, config);
    const EvalReport report = evaluate(model, split.test);

    std::cerr << "test macro-F1 " << report.macro_f1 << ", accuracy " << report.accuracy << "\n";
    for (std::size_t i = 0; i < report.labels.size(); ++i)
        std::cerr << "  " << to_string(report.labels[i]) << ": P " << report.precision[i] << " R "
                  << report.recall[i] << " F1 " << report.f1[i] << " (n=" << report.support[i]
                  << ")\n";

    atomic_write(out, model_to_json(model).dump(2) + "\n");
    write_manifest(out, global, {in}, json{{"cmd", "train-intent"}, {"seed", global.seed}});
    return 0;
}

// ---- agreement ----

int cmd_agreement(const std::string& in, bool by_domain) {
    require_file(in);
    std::map<Domain, std::vector<std::vector<EditIntention>>> labels_by_domain;
    std::vector<std::vector<EditIntention>> all_labels;
    {
        std::ifstream f(in, std::ios::binary);
        for_each_revision(f, [&](Revision&& rev) {
            for (const EditAction& a : rev.actions) {
                if (a.raw_labels.size() < 3) continue;
                labels_by_domain[rev.domain].push_back(a.raw_labels);
                all_labels.push_back(a.raw_labels);
            }
        });
    }
    if (all_labels.empty()) throw std::runtime_error("no raw_labels found in " + in);

    auto kappa_of = [](const std::vector<std::vector<EditIntention>>& items) {
        return fleiss_kappa(label_matrix(items), static_cast<int>(items.front().size()));
    };
    std::cout << "domain      items   kappa\n";
    if (by_domain) {
        for (const auto& [domain, items] : labels_by_domain) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%-10s %6zu  %.4f\n", to_string(domain), items.size(),
                          kappa_of(items));
            std::cout << buf;
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-10s %6zu  %.4f\n", "All", all_labels.size(),
                  kappa_of(all_labels));
    std::cout << buf;
    return 0;
}

// ---- evaluate ----

int cmd_evaluate(const GlobalOptions& global, const std::string& in, const std::string& ref,
                 const std::string& lm_train, const std::string& out) {
    require_file(in);
    require_file(ref);
    std::vector<Revision> preds = read_jsonl_file(in);
    std::vector<Revision> refs_records = read_jsonl_file(ref);

    std::map<std::pair<std::string, int>, std::vector<std::string>> refs;
    for (const Revision& r : refs_records) refs[{r.doc_id, r.depth}].push_back(r.target_text);

    double sari_sum = 0, add_sum = 0, del_sum = 0, keep_sum = 0;
    double r1_sum = 0, r2_sum = 0, rl_sum = 0;
    BleuAccumulator bleu_acc;
    std::int64_t n = 0;
    for (const Revision& p : preds) {
        auto it = refs.find({p.doc_id, p.depth});
        if (it == refs.end()) continue;
        const SariScore s = sari(p.source_text, p.target_text, it->second);
        sari_sum += s.sari;
        add_sum += s.add;
        del_sum += s.del;
        keep_sum += s.keep;
        bleu_acc.add(p.target_text, it->second);
        const RougeScore rs = rouge(p.target_text, it->second.front());
        r1_sum += rs.r1;
        r2_sum += rs.r2;
        rl_sum += rs.rL;
        ++n;
    }
    if (n == 0) throw std::runtime_error("no prediction/reference pairs matched by (doc_id, depth)");

    const double bleu_score = bleu_acc.score();
    json report{{"SARI", sari_sum / n}, {"ADD", add_sum / n},  {"DEL", del_sum / n},
                {"KEEP", keep_sum / n}, {"BLEU", bleu_score},  {"R-1", r1_sum / n},
                {"R-2", r2_sum / n},    {"R-L", rl_sum / n}};
    report["Avg"] = (report["SARI"].get<double>() + bleu_score + report["R-L"].get<double>()) / 3.0;

    if (!lm_train.empty()) {
        require_file(lm_train);
        std::vector<std::string> corpus;
        std::ifstream f(lm_train);
        std::string line;
        while (std::getline(f, line))
            if (!line.empty()) corpus.push_back(line);
        const auto lm = train_ngram_lm(corpus, 3);
        double slor_sum = 0;
        for (const Revision& p : preds) slor_sum += document_slor(p.target_text, *lm);
        report["SLOR"] = slor_sum / static_cast<double>(preds.size());
    }

    const std::string body = report.dump(2) + "\n";
    if (out.empty()) {
        std::cout << body;
    } else {
        atomic_write(out, body);
        write_manifest(out, global, {in, ref}, json{{"cmd", "evaluate"}});
    }
    return 0;
}

// ---- revise ----

int cmd_revise(const GlobalOptions& global, const std::string& reviser_spec, const std::string& in,
               int max_depth, std::int64_t min_distance, const std::string& intent_template,
               const std::string& trace_out) {
    require_file(in);
    std::unique_ptr<Reviser> reviser;
    if (reviser_spec == "rules") {
        reviser = make_rule_based_reviser();
    } else if (reviser_spec.rfind("exec:", 0) == 0) {
        reviser = make_exec_reviser(reviser_spec.substr(5));
    } else {
        throw CLI::ValidationError("--reviser must be 'rules' or 'exec:CMD'");
    }

    StoppingCriteria criteria;
    criteria.max_depth = max_depth;
    criteria.min_edit_distance = min_distance;

    std::ostringstream traces;
    std::ifstream f(in, std::ios::binary);
    std::string line;
    std::int64_t count = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const json doc = json::parse(line);
        const std::string text =
            doc.contains("text") ? doc.at("text").get<std::string>()
                                 : doc.at("before_revision").get<std::string>();
        const std::string doc_id = doc.value("doc_id", std::to_string(count));
        const LoopTrace trace = run_iterative(*reviser, text, criteria, {}, doc_id);
        traces << trace_to_json(trace).dump() << "\n";
        ++count;
    }
    (void)intent_template;  // validated below so bad templates fail fast
    condition_input("x", {}, intent_template);

    atomic_write(trace_out, traces.str());
    write_manifest(trace_out, global, {in},
                   json{{"cmd", "revise"}, {"reviser", reviser_spec}, {"max_depth", max_depth}});
    std::cerr << "traced " << count << " documents\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"revkit: iterative text-revision toolkit"};
    app.set_config("--config");
    GlobalOptions global;
    app.add_flag("--json-errors", global.json_errors, "machine-readable errors on stderr");
    app.add_option("--threads", global.threads, "worker thread ceiling");
    app.add_option("--seed", global.seed, "global random seed");
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(0, 1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "fetch revision histories into pair JSONL");
    std::string ingest_source = "local", seed_list, endpoint, local_dir, ingest_out;
    int max_versions = 5;
    double rate_limit = 2.0;
    ingest->add_option("--source", ingest_source, "wikipedia|wikinews|arxiv|local")
        ->check(CLI::IsMember({"wikipedia", "wikinews", "arxiv", "local"}));
    ingest->add_option("--seed-list", seed_list, "file of page titles / paper ids / doc ids");
    ingest->add_option("--endpoint", endpoint, "API endpoint URL");
    ingest->add_option("--local-dir", local_dir, "directory of <doc_id>.v<N>.txt files");
    ingest->add_option("--max-versions", max_versions)->check(CLI::Range(2, 1000));
    ingest->add_option("--rate-limit", rate_limit, "requests/second");
    ingest->add_option("--out", ingest_out)->required();

    // extract
    auto* extract = app.add_subcommand("extract", "extract edit actions from version pairs");
    std::string extract_in, extract_out, extract_gran = "both";
    extract->add_option("--in", extract_in)->required();
    extract->add_option("--out", extract_out)->required();
    extract->add_option("--granularity", extract_gran)
        ->check(CLI::IsMember({"sentence", "paragraph", "both"}));

    // classify
    auto* classify = app.add_subcommand("classify", "fill in intentions with a trained model");
    std::string model_path, classify_in, classify_out;
    classify->add_option("--model", model_path)->required();
    classify->add_option("--in", classify_in)->required();
    classify->add_option("--out", classify_out)->required();

    // train-intent
    auto* train_cmd = app.add_subcommand("train-intent", "train the intention classifier");
    std::string train_in, train_out;
    train_cmd->add_option("--in", train_in)->required();
    train_cmd->add_option("--out", train_out)->required();

    // agreement
    auto* agreement = app.add_subcommand("agreement", "inter-annotator agreement (Fleiss kappa)");
    std::string agreement_in;
    bool by_domain = false;
    agreement->add_option("--in", agreement_in)->required();
    agreement->add_flag("--by-domain,--by", by_domain, "also report per-domain kappa");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "score predictions against references");
    std::string eval_in, eval_ref, eval_lm, eval_out;
    evaluate->add_option("--in", eval_in)->required();
    evaluate->add_option("--ref", eval_ref)->required();
    evaluate->add_option("--lm-train", eval_lm, "text corpus to train the fluency LM");
    evaluate->add_option("--out", eval_out, "report path (stdout when omitted)");

    // revise
    auto* revise = app.add_subcommand("revise", "run the iterative revision loop");
    std::string reviser_spec = "rules", revise_in, intent_template = "<{intent}> {text}",
                trace_out;
    int max_depth = 10;
    std::int64_t min_distance = 0;
    revise->add_option("--reviser", reviser_spec, "rules | exec:CMD");
    revise->add_option("--in", revise_in)->required();
    revise->add_option("--max-depth", max_depth)->check(CLI::Range(1, 1000));
    revise->add_option("--min-distance", min_distance);
    revise->add_option("--intent-template", intent_template);
    revise->add_option("--trace-out", trace_out)->required();

    // stats
    auto* stats = app.add_subcommand("stats", "corpus statistics tables");
    std::string stats_in, stats_format = "table";
    stats->add_option("--in", stats_in)->required();
    stats->add_option("--format", stats_format)
        ->check(CLI::IsMember({"table", "json", "tsv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // usage errors
    }

    try {
        if (*ingest)
            return cmd_ingest(global, ingest_source, seed_list, endpoint, local_dir, max_versions,
                              rate_limit, ingest_out);
        if (*extract) return cmd_extract(global, extract_in, extract_out, extract_gran);
        if (*classify) return cmd_classify(global, model_path, classify_in, classify_out);
        if (*train_cmd) return cmd_train_intent(global, train_in, train_out);
        if (*agreement) return cmd_agreement(agreement_in, by_domain);
        if (*evaluate) return cmd_evaluate(global, eval_in, eval_ref, eval_lm, eval_out);
        if (*revise)
            return cmd_revise(global, reviser_spec, revise_in, max_depth, min_distance,
                              intent_template, trace_out);
        if (*stats) return cmd_stats(stats_in, stats_format);
        std::cerr << app.help();
        return 2;
    } catch (const std::exception& e) {
        if (global.json_errors)
            std::cerr << json{{"error", e.what()}}.dump() << "\n";
        else
            std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
