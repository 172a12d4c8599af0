#include "nlcorpus/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlcorpus/corpus.hpp"
#include "nlcorpus/docharvest.hpp"
#include "nlcorpus/errors.hpp"
#include "nlcorpus/evalmetrics.hpp"
#include "nlcorpus/resample.hpp"
#include "nlcorpus/retrieval.hpp"
#include "nlcorpus/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace nlcorpus::cli {

namespace {

struct PipelineConfig {
    // inputs
    std::string doc_dump, ann_train, ann_dev, ann_test, mined, api_pairs;
    std::string pairs, hyp, refs, freq_stats;
    std::string out_dir = "out";
    resample::ResamplePlan plan;
    corpus::DataStrategy strategy;
    std::size_t split_n = 200;
};

void parse_tau(const std::string& text, resample::ResamplePlan& plan) {
    if (text == "inf" || text == "uniform") {
        plan.tau_uniform = true;
        return;
    }
    try {
        std::size_t pos = 0;
        plan.tau = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
        throw ConfigError("--tau expects a number >= 1 or \"inf\": " + text);
    }
    plan.tau_uniform = false;
}

void load_config_file(const fs::path& path, PipelineConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("cannot parse config file " + path.string() + ": " + e.what());
    }

    auto get_str = [](const json& obj, const char* key, std::string& out) {
        if (obj.contains(key)) out = obj.at(key).get<std::string>();
    };
    if (j.contains("paths")) {
        const json& p = j["paths"];
        get_str(p, "doc_dump", cfg.doc_dump);
        get_str(p, "ann_train", cfg.ann_train);
        get_str(p, "ann_dev", cfg.ann_dev);
        get_str(p, "ann_test", cfg.ann_test);
        get_str(p, "mined", cfg.mined);
        get_str(p, "api_pairs", cfg.api_pairs);
        get_str(p, "pairs", cfg.pairs);
        get_str(p, "hyp", cfg.hyp);
        get_str(p, "refs", cfg.refs);
        get_str(p, "freq_stats", cfg.freq_stats);
        get_str(p, "out_dir", cfg.out_dir);
    }
    if (j.contains("plan")) {
        const json& p = j["plan"];
        if (p.contains("k")) cfg.plan.k = p["k"].get<int>();
        if (p.contains("tau")) {
            if (p["tau"].is_string())
                parse_tau(p["tau"].get<std::string>(), cfg.plan);
            else
                cfg.plan.tau = p["tau"].get<double>();
        }
        if (p.contains("target"))
            cfg.plan.target = retrieval::target_from_string(p["target"].get<std::string>());
        if (p.contains("strategy"))
            cfg.plan.strategy = resample::strategy_from_string(p["strategy"].get<std::string>());
        if (p.contains("sample_size")) cfg.plan.sample_size = p["sample_size"].get<std::size_t>();
        if (p.contains("seed")) cfg.plan.seed = p["seed"].get<std::uint64_t>();
    }
    if (j.contains("strategy")) {
        const json& s = j["strategy"];
        if (s.contains("label")) cfg.strategy.label = corpus::label_from_string(s["label"].get<std::string>());
        if (s.contains("mined_top_k")) cfg.strategy.mined_top_k = s["mined_top_k"].get<std::size_t>();
        if (s.contains("api_source"))
            cfg.strategy.api_source = corpus::api_source_from_string(s["api_source"].get<std::string>());
    }
    if (j.contains("split_n")) cfg.split_n = j["split_n"].get<std::size_t>();
}

fs::path require_input(const std::string& value, const char* what) {
    if (value.empty()) throw ConfigError(std::string("missing required path for ") + what);
    fs::path p(value);
    if (!fs::exists(p)) throw ConfigError(std::string(what) + " file does not exist: " + value);
    return p;
}

// Writes go to *.tmp files and move into place only on commit, so a failed
// command leaves no partial outputs behind.
class OutputStager {
public:
    explicit OutputStager(fs::path out_dir) : out_dir_(std::move(out_dir)) {
        fs::create_directories(out_dir_);
    }
    OutputStager(const OutputStager&) = delete;
    OutputStager& operator=(const OutputStager&) = delete;

    fs::path stage(const std::string& name) {
        fs::path tmp = out_dir_ / (name + ".tmp");
        staged_.emplace_back(tmp, out_dir_ / name);
        return tmp;
    }

    void commit() {
        for (const auto& [tmp, final_path] : staged_) fs::rename(tmp, final_path);
        staged_.clear();
    }

    ~OutputStager() {
        std::error_code ec;
        for (const auto& [tmp, final_path] : staged_) {
            (void)final_path;
            fs::remove(tmp, ec);
        }
    }

private:
    fs::path out_dir_;
    std::vector<std::pair<fs::path, fs::path>> staged_;
};

std::uint64_t hash_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot hash " + path.string());
    std::uint64_t h = 14695981039346656037ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
    return h;
}

// Manifests record basenames only, so identical runs in different
// directories stay byte-identical.
class Manifest {
public:
    explicit Manifest(std::string command) { j_["command"] = std::move(command); }

    void set(const std::string& key, ordered_json value) { j_[key] = std::move(value); }

    void add_output(const std::string& name, const fs::path& tmp_path, std::size_t records) {
        ordered_json entry;
        entry["file"] = name;
        entry["bytes"] = fs::file_size(tmp_path);
        entry["fnv64"] = to_hex(hash_file(tmp_path));
        entry["records"] = records;
        outputs_.push_back(std::move(entry));
    }

    void write(OutputStager& stager, const std::string& name) {
        j_["outputs"] = outputs_;
        fs::path tmp = stager.stage(name);
        std::ofstream out(tmp);
        if (!out) throw IoFailure("cannot write manifest " + tmp.string());
        out << j_.dump(2) << "\n";
    }

private:
    ordered_json j_;
    ordered_json outputs_ = ordered_json::array();
};

ordered_json plan_json(const resample::ResamplePlan& plan) {
    ordered_json p;
    p["k"] = plan.k;
    if (plan.tau_uniform)
        p["tau"] = "inf";
    else
        p["tau"] = plan.tau;
    p["target"] = std::string(retrieval::to_string(plan.target));
    p["strategy"] = std::string(resample::to_string(plan.strategy));
    p["sample_size"] = plan.sample_size;
    p["seed"] = plan.seed;
    return p;
}

ordered_json strategy_json(const corpus::DataStrategy& s) {
    ordered_json out;
    out["label"] = std::string(corpus::to_string(s.label));
    out["mined_top_k"] = s.mined_top_k;
    out["api_source"] = std::string(corpus::to_string(s.api_source));
    return out;
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::size_t save_pairs_staged(const std::vector<NLCodePair>& pairs, OutputStager& stager,
                              Manifest& manifest, const std::string& name) {
    fs::path tmp = stager.stage(name);
    corpus::save_pairs(pairs, tmp);
    manifest.add_output(name, tmp, pairs.size());
    return pairs.size();
}

int cmd_harvest(const PipelineConfig& cfg) {
    fs::path dump_path = require_input(cfg.doc_dump, "doc dump");
    docharvest::DocDump dump = docharvest::read_doc_dump(dump_path);
    if (dump.entries.empty() && dump.malformed_lines.empty())
        throw EmptyCollection("doc dump " + dump_path.string() + " has no entries");

    docharvest::HarvestResult result = docharvest::harvest(dump.entries);
    if (result.pairs.empty())
        throw EmptyCollection("no pairs harvested from " + dump_path.string());

    OutputStager stager(cfg.out_dir);
    Manifest manifest("harvest");
    save_pairs_staged(result.pairs, stager, manifest, "api_pairs.jsonl");

    ordered_json stats;
    stats["entries_read"] = result.stats.entries_read;
    stats["entries_skipped"] = result.stats.entries_skipped;
    stats["malformed_lines"] = dump.malformed_lines.size();
    stats["pairs_emitted"] = result.stats.pairs_emitted;
    stats["pairs_skipped"] = result.stats.pairs_skipped;
    stats["distinct"] = result.stats.distinct_pairs;
    manifest.set("stats", stats);
    manifest.write(stager, "harvest_manifest.json");
    stager.commit();

    std::cout << "harvest: entries=" << result.stats.entries_read
              << " skipped=" << result.stats.entries_skipped
              << " malformed_lines=" << dump.malformed_lines.size()
              << " pairs=" << result.stats.pairs_emitted
              << " distinct=" << result.stats.distinct_pairs << " -> " << cfg.out_dir
              << "/api_pairs.jsonl\n";
    return 0;
}

int cmd_index(const PipelineConfig& cfg) {
    fs::path pairs_path = require_input(cfg.pairs.empty() ? cfg.api_pairs : cfg.pairs, "pairs");
    std::vector<NLCodePair> pairs = corpus::load_pairs(pairs_path, Source::api).pairs;
    retrieval::Bm25Index index = retrieval::Bm25Index::build(pairs, cfg.plan.target);

    OutputStager stager(cfg.out_dir);
    Manifest manifest("index");
    fs::path tmp = stager.stage("bm25_index.json");
    index.save(tmp);
    manifest.add_output("bm25_index.json", tmp, index.doc_count());

    ordered_json stats;
    stats["target"] = std::string(retrieval::to_string(index.target()));
    stats["docs"] = index.doc_count();
    stats["terms"] = index.term_count();
    stats["avg_doc_length"] = index.avg_doc_length();
    manifest.set("stats", stats);
    manifest.write(stager, "index_manifest.json");
    stager.commit();

    std::cout << "index: docs=" << index.doc_count() << " terms=" << index.term_count()
              << " target=" << retrieval::to_string(index.target()) << " -> " << cfg.out_dir
              << "/bm25_index.json\n";
    return 0;
}

// Query pool for re-sampling: annotated train pairs plus the selected
// top-k mined pairs, plain concatenation.
std::vector<NLCodePair> load_query_pool(const PipelineConfig& cfg) {
    std::vector<NLCodePair> queries =
        corpus::load_pairs(require_input(cfg.ann_train, "annotated train"), Source::annotated).pairs;
    std::vector<NLCodePair> mined =
        corpus::load_pairs(require_input(cfg.mined, "mined pairs"), Source::mined).pairs;
    mined = corpus::select_top_mined(std::move(mined), cfg.strategy.mined_top_k);
    queries.insert(queries.end(), std::make_move_iterator(mined.begin()),
                   std::make_move_iterator(mined.end()));
    return queries;
}

int cmd_resample(const PipelineConfig& cfg) {
    std::vector<NLCodePair> api_pairs =
        corpus::load_pairs(require_input(cfg.api_pairs, "api pairs"), Source::api).pairs;
    if (api_pairs.empty()) throw EmptyCollection("api pair file is empty");
    std::vector<NLCodePair> queries = load_query_pool(cfg);
    if (queries.empty()) throw EmptyCollection("query pool is empty");

    retrieval::Bm25Index index = retrieval::Bm25Index::build(api_pairs, cfg.plan.target);

    resample::ResamplePlan plan = cfg.plan;
    if (plan.sample_size == 0) plan.sample_size = api_pairs.size();

    OutputStager stager(cfg.out_dir);
    Manifest manifest("resample");

    std::vector<NLCodePair> sampled;
    if (plan.strategy == resample::Strategy::dist) {
        resample::FreqTable freq = resample::aggregate_freq(queries, index, plan.k);
        plan.probabilities = resample::smooth(freq, plan.tau, plan.tau_uniform);
        sampled = resample::sample_dist(plan, api_pairs);

        fs::path tsv = stager.stage("api_freq.tsv");
        resample::write_freq_tsv(freq, tsv);
        manifest.add_output("api_freq.tsv", tsv, freq.counts.size());
    } else {
        sampled = resample::sample_direct(queries, index, api_pairs, plan.k);
    }

    save_pairs_staged(sampled, stager, manifest, "sampled_api_pairs.jsonl");
    manifest.set("plan", plan_json(plan));
    ordered_json stats;
    stats["queries"] = queries.size();
    stats["api_pairs"] = api_pairs.size();
    stats["sampled"] = sampled.size();
    manifest.set("stats", stats);
    manifest.write(stager, "resample_manifest.json");
    stager.commit();

    std::cout << "resample: strategy=" << resample::to_string(plan.strategy)
              << " target=" << retrieval::to_string(plan.target) << " queries=" << queries.size()
              << " sampled=" << sampled.size() << " -> " << cfg.out_dir
              << "/sampled_api_pairs.jsonl\n";
    return 0;
}

int cmd_assemble(const PipelineConfig& cfg) {
    std::vector<NLCodePair> ann_train =
        corpus::load_pairs(require_input(cfg.ann_train, "annotated train"), Source::annotated).pairs;
    corpus::CorpusSplit dev{corpus::SplitName::dev,
                            corpus::load_pairs(require_input(cfg.ann_dev, "annotated dev"),
                                               Source::annotated)
                                .pairs};
    corpus::CorpusSplit test{corpus::SplitName::test,
                             corpus::load_pairs(require_input(cfg.ann_test, "annotated test"),
                                                Source::annotated)
                                 .pairs};

    std::vector<NLCodePair> mined;
    if (cfg.strategy.label != corpus::StrategyLabel::man)
        mined = corpus::load_pairs(require_input(cfg.mined, "mined pairs"), Source::mined).pairs;

    std::vector<NLCodePair> api_pairs;
    if (cfg.strategy.label == corpus::StrategyLabel::man_mine_api)
        api_pairs = corpus::load_pairs(require_input(cfg.api_pairs, "api pairs"), Source::api).pairs;

    corpus::AssembledCorpus assembled =
        corpus::assemble(cfg.strategy, ann_train, mined, api_pairs);

    std::vector<std::string> leaked = corpus::find_leakage(assembled.pretrain, dev.pairs, test.pairs);
    if (!leaked.empty()) {
        std::string ids;
        for (const auto& id : leaked) ids += (ids.empty() ? "" : ", ") + id;
        throw Error("leakage: dev/test pairs found in pretrain corpus: " + ids);
    }

    OutputStager stager(cfg.out_dir);
    Manifest manifest("assemble");
    std::size_t pretrain_count =
        save_pairs_staged(assembled.pretrain, stager, manifest, "pretrain.jsonl");
    std::size_t finetune_count =
        save_pairs_staged(assembled.finetune, stager, manifest, "finetune.jsonl");

    manifest.set("strategy", strategy_json(cfg.strategy));
    ordered_json stats;
    stats["pretrain_count"] = pretrain_count;
    stats["finetune_count"] = finetune_count;
    stats["mined_selected"] = std::min(mined.size(), cfg.strategy.mined_top_k);
    stats["api_count"] = api_pairs.size();
    manifest.set("stats", stats);
    manifest.write(stager, "assemble_manifest.json");
    stager.commit();

    std::cout << "assemble: strategy=" << corpus::to_string(cfg.strategy.label)
              << " pretrain=" << pretrain_count << " finetune=" << finetune_count << " -> "
              << cfg.out_dir << "/pretrain.jsonl\n";
    return 0;
}

int cmd_eval(const PipelineConfig& cfg) {
    std::vector<NLCodePair> refs =
        corpus::load_pairs(require_input(cfg.refs, "references"), Source::annotated).pairs;
    std::vector<std::string> hyps = read_lines(require_input(cfg.hyp, "hypotheses"));
    if (hyps.size() != refs.size())
        throw LengthMismatch("hypothesis count " + std::to_string(hyps.size()) +
                             " does not match reference count " + std::to_string(refs.size()));

    std::vector<std::string> ref_snippets;
    ref_snippets.reserve(refs.size());
    for (const auto& p : refs) ref_snippets.push_back(p.snippet);

    evalmetrics::EvalReport report;
    report.corpus_bleu = evalmetrics::corpus_bleu(hyps, ref_snippets);
    report.api_token_accuracy =
        evalmetrics::token_accuracy(hyps, ref_snippets, evalmetrics::TokenKind::api_call);
    report.var_token_accuracy =
        evalmetrics::token_accuracy(hyps, ref_snippets, evalmetrics::TokenKind::variable);

    if (!cfg.freq_stats.empty()) {
        std::vector<NLCodePair> stats_pairs =
            corpus::load_pairs(require_input(cfg.freq_stats, "frequency stats corpus"), Source::api)
                .pairs;
        report.split_bleu = evalmetrics::frequency_split(
            refs, {{"hyp", hyps}}, stats_pairs, cfg.split_n, cfg.split_n);
    }

    OutputStager stager(cfg.out_dir);
    Manifest manifest("eval");

    ordered_json rj;
    rj["corpus_bleu"] = report.corpus_bleu;
    rj["api_token_accuracy"] = report.api_token_accuracy;
    rj["var_token_accuracy"] = report.var_token_accuracy;
    if (report.split_bleu) {
        ordered_json splits;
        for (const auto& [name, sb] : *report.split_bleu) {
            splits[name]["high_freq"] = sb.high_freq;
            splits[name]["low_freq"] = sb.low_freq;
        }
        rj["split_bleu"] = splits;
        rj["split_n"] = cfg.split_n;
    }
    fs::path report_tmp = stager.stage("eval_report.json");
    {
        std::ofstream out(report_tmp);
        if (!out) throw IoFailure("cannot write eval report");
        out << rj.dump(2) << "\n";
    }
    manifest.add_output("eval_report.json", report_tmp, 1);

    // per-instance diagnostics
    fs::path tsv_tmp = stager.stage("eval_instances.tsv");
    {
        std::ofstream out(tsv_tmp);
        if (!out) throw IoFailure("cannot write instance scores");
        out << "index\tsentence_bleu\tapi_accuracy\tvar_accuracy\n";
        for (std::size_t i = 0; i < hyps.size(); ++i) {
            double sbleu = evalmetrics::corpus_bleu({hyps[i]}, {ref_snippets[i]});
            double api = evalmetrics::token_accuracy({hyps[i]}, {ref_snippets[i]},
                                                     evalmetrics::TokenKind::api_call);
            double var = evalmetrics::token_accuracy({hyps[i]}, {ref_snippets[i]},
                                                     evalmetrics::TokenKind::variable);
            out << i << "\t" << sbleu << "\t" << api << "\t" << var << "\n";
        }
    }
    manifest.add_output("eval_instances.tsv", tsv_tmp, hyps.size());
    manifest.write(stager, "eval_manifest.json");
    stager.commit();

    std::cout << "eval: corpus_bleu=" << report.corpus_bleu
              << " api_acc=" << report.api_token_accuracy
              << " var_acc=" << report.var_token_accuracy << " -> " << cfg.out_dir
              << "/eval_report.json\n";
    return 0;
}

int cmd_stats(const PipelineConfig& cfg) {
    fs::path path = require_input(cfg.pairs, "pairs");
    corpus::LoadResult loaded = corpus::load_pairs_untagged(path);

    std::size_t with_confidence = 0;
    std::size_t intent_tokens = 0, snippet_tokens = 0;
    std::set<std::string> distinct;
    std::map<std::string, std::size_t> by_source;
    for (const auto& p : loaded.pairs) {
        if (p.confidence) ++with_confidence;
        distinct.insert(p.pair_id);
        ++by_source[std::string(to_string(p.source))];
        intent_tokens += retrieval::tokenize(p.intent, retrieval::Target::intent).size();
        snippet_tokens += retrieval::tokenize(p.snippet, retrieval::Target::code).size();
    }

    ordered_json j;
    j["file"] = path.filename().string();
    j["records"] = loaded.pairs.size();
    j["distinct_ids"] = distinct.size();
    j["malformed_lines"] = loaded.malformed_lines.size();
    j["with_confidence"] = with_confidence;
    j["sources"] = by_source;
    if (!loaded.pairs.empty()) {
        j["mean_intent_tokens"] =
            static_cast<double>(intent_tokens) / static_cast<double>(loaded.pairs.size());
        j["mean_snippet_tokens"] =
            static_cast<double>(snippet_tokens) / static_cast<double>(loaded.pairs.size());
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"NL-code corpus toolkit: harvest API docs, re-sample, assemble, evaluate"};
    app.require_subcommand(1);
    app.fallthrough();

    // Flags land here first; after parsing, config-file values are applied
    // and then every flag the user actually passed wins over the file.
    struct FlagValues {
        std::string config, plan, out_dir, target, strategy, label, tau;
        std::uint64_t seed = 0;
        int k = 1;
        std::size_t sample_size = 0, mined_top_k = 0, split_n = 0;
        std::string doc_dump, ann_train, ann_dev, ann_test, mined, api_pairs;
        std::string pairs, hyp, refs, freq_stats;
    } flags;

    auto* opt_config = app.add_option("--config", flags.config, "JSON config file");
    auto* opt_plan = app.add_option("--plan", flags.plan, "standalone resample plan JSON");
    auto* opt_out = app.add_option("--out-dir", flags.out_dir, "output directory");
    auto* opt_seed = app.add_option("--seed", flags.seed, "RNG seed (all randomness)");
    auto* opt_target = app.add_option("--target", flags.target, "retrieval target: intent|code")
                           ->check(CLI::IsMember({"intent", "code"}));
    auto* opt_strategy = app.add_option("--strategy", flags.strategy, "api strategy: dist|direct|raw")
                             ->check(CLI::IsMember({"dist", "direct", "raw"}));
    auto* opt_k = app.add_option("--k", flags.k, "retrieval depth k");
    auto* opt_tau = app.add_option("--tau", flags.tau, "smoothing temperature (>=1 or inf)");
    auto* opt_sample = app.add_option("--sample-size", flags.sample_size,
                                      "dist sample size (0 = number of api pairs)");
    auto* opt_topk = app.add_option("--mined-top-k", flags.mined_top_k,
                                    "mined pairs kept after confidence sort");
    auto* opt_label =
        app.add_option("--label", flags.label, "data strategy: man|man_mine|man_mine_api")
            ->check(CLI::IsMember({"man", "man_mine", "man_mine_api"}));
    auto* opt_doc = app.add_option("--doc-dump", flags.doc_dump, "doc dump JSONL");
    auto* opt_train = app.add_option("--ann-train", flags.ann_train, "annotated train JSONL");
    auto* opt_dev = app.add_option("--ann-dev", flags.ann_dev, "annotated dev JSONL");
    auto* opt_test = app.add_option("--ann-test", flags.ann_test, "annotated test JSONL");
    auto* opt_mined = app.add_option("--mined", flags.mined, "mined pairs JSONL");
    auto* opt_api = app.add_option("--api-pairs", flags.api_pairs, "api pairs JSONL");
    auto* opt_pairs = app.add_option("--pairs", flags.pairs, "pair file (index/stats)");
    auto* opt_hyp = app.add_option("--hyp", flags.hyp, "hypothesis file, one snippet per line");
    auto* opt_refs = app.add_option("--refs", flags.refs, "reference pairs JSONL");
    auto* opt_freq = app.add_option("--freq-stats", flags.freq_stats,
                                    "pair corpus for API usage frequencies (enables split BLEU)");
    auto* opt_split = app.add_option("--split-n", flags.split_n, "instances per frequency split side");

    auto* sub_harvest = app.add_subcommand("harvest", "doc dump -> api pairs");
    auto* sub_index = app.add_subcommand("index", "pairs -> BM25 index file");
    auto* sub_resample = app.add_subcommand("resample", "re-sample api pairs toward real usage");
    auto* sub_assemble = app.add_subcommand("assemble", "build pretrain/finetune corpora");
    auto* sub_eval = app.add_subcommand("eval", "score hypotheses against references");
    auto* sub_stats = app.add_subcommand("stats", "summarize a pair file");

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        PipelineConfig cfg;
        if (opt_config->count()) load_config_file(flags.config, cfg);
        if (opt_plan->count()) {
            fs::path p = require_input(flags.plan, "plan");
            cfg.plan = resample::load_plan(p);
        }

        if (opt_out->count()) cfg.out_dir = flags.out_dir;
        if (opt_seed->count()) cfg.plan.seed = flags.seed;
        if (opt_target->count()) cfg.plan.target = retrieval::target_from_string(flags.target);
        if (opt_k->count()) cfg.plan.k = flags.k;
        if (opt_tau->count()) parse_tau(flags.tau, cfg.plan);
        if (opt_sample->count()) cfg.plan.sample_size = flags.sample_size;
        if (opt_topk->count()) cfg.strategy.mined_top_k = flags.mined_top_k;
        if (opt_label->count()) cfg.strategy.label = corpus::label_from_string(flags.label);
        if (opt_strategy->count()) {
            if (flags.strategy == "raw") {
                if (!sub_assemble->parsed())
                    throw ConfigError("--strategy raw only applies to the assemble command");
                cfg.strategy.api_source = corpus::ApiSource::raw;
            } else {
                cfg.plan.strategy = resample::strategy_from_string(flags.strategy);
                if (sub_assemble->parsed())
                    cfg.strategy.api_source = corpus::api_source_from_string(flags.strategy);
            }
        }
        if (opt_doc->count()) cfg.doc_dump = flags.doc_dump;
        if (opt_train->count()) cfg.ann_train = flags.ann_train;
        if (opt_dev->count()) cfg.ann_dev = flags.ann_dev;
        if (opt_test->count()) cfg.ann_test = flags.ann_test;
        if (opt_mined->count()) cfg.mined = flags.mined;
        if (opt_api->count()) cfg.api_pairs = flags.api_pairs;
        if (opt_pairs->count()) cfg.pairs = flags.pairs;
        if (opt_hyp->count()) cfg.hyp = flags.hyp;
        if (opt_refs->count()) cfg.refs = flags.refs;
        if (opt_freq->count()) cfg.freq_stats = flags.freq_stats;
        if (opt_split->count()) cfg.split_n = flags.split_n;

        if (cfg.plan.k < 1) throw ConfigError("--k must be >= 1");
        if (!cfg.plan.tau_uniform && cfg.plan.tau < 1.0) throw ConfigError("--tau must be >= 1");

        if (sub_harvest->parsed()) return cmd_harvest(cfg);
        if (sub_index->parsed()) return cmd_index(cfg);
        if (sub_resample->parsed()) return cmd_resample(cfg);
        if (sub_assemble->parsed()) return cmd_assemble(cfg);
        if (sub_eval->parsed()) return cmd_eval(cfg);
        if (sub_stats->parsed()) return cmd_stats(cfg);
        throw ConfigError("no command given");
    } catch (const ConfigError& e) {
        log_error(e.what());
        return 1;
    } catch (const Error& e) {
        log_error(e.what());
        return 2;
    } catch (const std::exception& e) {
        log_error(e.what());
        return 2;
    }
}

} // namespace nlcorpus::cli
