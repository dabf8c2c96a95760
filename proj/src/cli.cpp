#include "gsdmm/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <unordered_map>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "gsdmm/corpus.hpp"
#include "gsdmm/error.hpp"
#include "gsdmm/eval.hpp"
#include "gsdmm/io.hpp"
#include "gsdmm/model.hpp"
#include "gsdmm/sampler.hpp"
#include "gsdmm/synth.hpp"

namespace gsdmm::cli {

namespace fs = std::filesystem;

namespace {

// Raised inside a command to leave with a specific exit code.
struct Exit {
    int code;
    std::string message;
};

struct TokenOptions {
    std::optional<std::string> stopwords;
    bool stem = false;
    std::size_t min_df = 2;
    std::size_t min_len = 2;
    std::size_t max_len = 15;
    bool keep_case = false;
    bool keep_non_latin = false;

    void add_to(CLI::App& app) {
        app.add_option("--stopwords", stopwords, "Stopword file (one word per line); defaults to the bundled list");
        app.add_flag("--stem", stem, "Fold plural suffixes");
        app.add_option("--min-df", min_df, "Drop words found in fewer documents")->capture_default_str();
        app.add_option("--min-len", min_len, "Minimum word length")->capture_default_str();
        app.add_option("--max-len", max_len, "Maximum word length")->capture_default_str();
        app.add_flag("--keep-case", keep_case, "Do not lowercase");
        app.add_flag("--keep-non-latin", keep_non_latin, "Keep non-ASCII letters inside tokens");
    }

    TokenRules rules() const {
        TokenRules r;
        r.lowercase = !keep_case;
        r.strip_non_latin = !keep_non_latin;
        r.stopwords = stopwords ? load_stopwords(*stopwords) : default_stopwords();
        r.stemming = stem;
        r.min_df = min_df;
        r.min_word_len = min_len;
        r.max_word_len = max_len;
        return r;
    }
};

DatasetFormat parse_format(const std::string& name) { return name == "tsv" ? DatasetFormat::Tsv : DatasetFormat::Jsonl; }

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
    return out;
}

int cmd_preprocess(const std::string& input, const std::string& format, const TokenOptions& tok,
                   const std::string& output, std::ostream& out) {
    const auto raw = read_dataset(input, parse_format(format));
    auto built = build_corpus(raw, tok.rules());
    write_archive(output, built.corpus, built.dropped_doc_ids);

    const auto& s = built.corpus.stats();
    out << "D\t" << s.num_docs << "\nV\t" << s.vocab_size << "\nmean_len\t" << s.mean_len << "\nmax_len\t"
        << s.max_len << "\ndropped\t" << built.dropped_doc_ids.size() << '\n';
    return kOk;
}

struct ClusterOptions {
    std::string corpus;
    std::string output;
    std::string algorithm = "gsdmm";
    std::optional<double> alpha;
    std::optional<double> beta;
    std::size_t k_max = 500;
    std::optional<std::size_t> k_real;
    std::size_t iterations = 20;
    std::uint64_t seed = 0;
    std::size_t entropy_refreshes = 15;
    double entropy_eps = 1e-9;
    bool no_entropy_norm = false;
    bool trace = false;
    bool shuffle = false;

    RunConfig config() const {
        const auto algo = algorithm == "gsdmm+" ? Algorithm::GsdmmPlus : Algorithm::Gsdmm;
        auto cfg = RunConfig::defaults(algo);
        if (alpha) cfg.alpha = *alpha;
        if (beta) cfg.beta = *beta;
        cfg.k_max = k_max;
        cfg.k_real = k_real;
        cfg.iterations = iterations;
        cfg.seed = seed;
        cfg.entropy_refreshes_per_sweep = entropy_refreshes;
        cfg.entropy_epsilon = entropy_eps;
        cfg.entropy_normalized = !no_entropy_norm;
        cfg.shuffle = shuffle;
        return cfg;
    }
};

int cmd_cluster(const ClusterOptions& opt, std::ostream& out) {
    const auto cfg = opt.config();
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw Exit{kBadConfig, e.what()};
    }

    CorpusArchive archive;
    try {
        archive = read_archive(opt.corpus);
    } catch (const Error& e) {
        throw Exit{kBadInput, e.what()};
    }
    const auto& corpus = archive.corpus;
    if (corpus.size() == 0) throw Exit{kBadInput, "corpus archive holds no documents"};
    if (cfg.algorithm == Algorithm::GsdmmPlus && cfg.k_max > corpus.size())
        throw Exit{kBadConfig, std::string(to_string(Errc::KMaxExceedsCorpus)) + ": k_max = " +
                                   std::to_string(cfg.k_max) + " exceeds D = " + std::to_string(corpus.size())};

    const auto start = std::chrono::steady_clock::now();
    const auto result = run(corpus, cfg);
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();

    const fs::path dir(opt.output);
    fs::create_directories(dir);
    {
        auto f = open_out(dir / "assignments.csv");
        write_assignments_csv(f, corpus, result.assignments);
    }
    if (opt.trace) {
        auto f = open_out(dir / "trace.csv");
        write_trace_csv(f, result.trace);
        if (cfg.algorithm == Algorithm::GsdmmPlus) {
            auto m = open_out(dir / "merges.csv");
            write_merge_log_csv(m, result.merges);
        }
    }

    nlohmann::ordered_json summary;
    summary["algorithm"] = opt.algorithm;
    summary["k_final"] = result.state.active_clusters();
    summary["iterations"] = cfg.iterations;
    summary["seed"] = cfg.seed;
    summary["wall_time_ms"] = elapsed;
    summary["alpha"] = cfg.alpha;
    summary["beta"] = cfg.beta;
    summary["k_max"] = cfg.k_max;
    summary["k_real"] = cfg.k_real ? nlohmann::ordered_json(*cfg.k_real) : nlohmann::ordered_json(nullptr);
    summary["merge_skipped"] = result.merge_skipped;
    {
        auto f = open_out(dir / "summary.json");
        f << summary.dump(2) << '\n';
    }
    out << summary.dump() << '\n';
    return kOk;
}

std::unordered_map<std::string, std::optional<std::string>> load_labels(const std::string& source,
                                                                        const std::string& format) {
    std::unordered_map<std::string, std::optional<std::string>> labels;
    if (fs::is_directory(source)) {
        const auto archive = read_archive(source);
        for (const auto& d : archive.corpus.documents()) labels.emplace(d.doc_id, d.gold_label);
    } else {
        for (auto& r : read_dataset(source, parse_format(format))) labels.emplace(r.doc_id, r.label);
    }
    return labels;
}

int cmd_eval(const std::string& assignments_path, const std::string& label_source, const std::string& format,
             const std::optional<std::string>& report_path, std::ostream& out) {
    std::vector<std::pair<std::string, ClusterId>> rows;
    std::unordered_map<std::string, std::optional<std::string>> labels;
    try {
        rows = read_assignments_csv(assignments_path);
        labels = load_labels(label_source, format);
    } catch (const Error& e) {
        throw Exit{kBadInput, e.what()};
    }
    if (rows.empty()) throw Exit{kBadInput, "no assignments in " + assignments_path};

    std::vector<std::uint32_t> pred;
    std::vector<std::string> gold;
    for (const auto& [id, cluster] : rows) {
        auto it = labels.find(id);
        if (it == labels.end() || !it->second) throw Exit{kUnmatchedIds, "unmatched doc_id: " + id};
        pred.push_back(cluster);
        gold.push_back(*it->second);
    }
    const auto report = evaluate(densify(std::span<const std::uint32_t>(pred)), densify(std::span<const std::string>(gold)));
    const auto json = eval_report_json(report);
    out << json << '\n';
    if (report_path) {
        auto f = open_out(*report_path);
        f << json << '\n';
    }
    return kOk;
}

int cmd_topwords(const std::string& corpus_dir, const std::string& model_dir, std::size_t n,
                 const std::optional<std::string>& output, std::ostream& out) {
    const fs::path model(model_dir);
    const auto assignments_path = model / "assignments.csv";
    const auto summary_path = model / "summary.json";
    if (!fs::exists(assignments_path) || !fs::exists(summary_path))
        throw Exit{kMissingModel, "model artifacts missing in " + model_dir};

    CorpusArchive archive;
    try {
        archive = read_archive(corpus_dir);
    } catch (const Error& e) {
        throw Exit{kBadInput, e.what()};
    }
    double beta = 0.1;
    try {
        std::ifstream in(summary_path);
        beta = nlohmann::json::parse(in).at("beta").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw Exit{kMissingModel, std::string("unreadable summary.json: ") + e.what()};
    }

    const auto& corpus = archive.corpus;
    std::unordered_map<std::string, ClusterId> by_id;
    for (const auto& [id, c] : read_assignments_csv(assignments_path)) by_id.emplace(id, c);
    std::vector<ClusterId> z(corpus.size());
    ClusterId k = 0;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        auto it = by_id.find(corpus[d].doc_id);
        if (it == by_id.end()) throw Exit{kMissingModel, "no assignment for document " + corpus[d].doc_id};
        z[d] = it->second;
        k = std::max(k, z[d] + 1);
    }
    const auto state = ModelState::from_assignments(corpus, z, k, 0.1);

    std::ofstream file;
    if (output) file = open_out(*output);
    std::ostream& dst = output ? static_cast<std::ostream&>(file) : out;
    dst << "cluster\trank\tword\tphi\n";
    for (ClusterId c = 0; c < k; ++c) {
        if (state.cluster(c).m == 0) continue;
        const auto words = top_words(state, c, n, beta, corpus.vocabulary());
        for (std::size_t r = 0; r < words.size(); ++r) dst << c << '\t' << r + 1 << '\t' << words[r].first << '\t' << words[r].second << '\n';
    }
    return kOk;
}

int cmd_synth(const GenSpec& spec, const std::optional<double>& mean_len, const std::string& output, std::ostream& out) {
    auto s = spec;
    s.mean_len = mean_len;
    try {
        s.validate();
    } catch (const Error& e) {
        throw Exit{kBadInput, e.what()};
    }
    const auto gen = generate_corpus(s);
    {
        auto f = open_out(output);
        write_jsonl(f, gen.raw);
    }
    nlohmann::ordered_json j;
    j["documents"] = s.d;
    j["theta"] = gen.theta;
    out << j.dump() << '\n';
    return kOk;
}

// Splices the entries of a subcommand's --config file into argv right after
// the subcommand name, so that flags given on the command line win.
void expand_config(CLI::App& app, std::vector<std::string>& argv) {
    if (argv.size() < 2) return;
    CLI::App* sub = app.get_subcommand_no_throw(argv[1]);
    if (!sub) return;

    std::optional<std::string> path;
    for (std::size_t i = 2; i < argv.size(); ++i) {
        if (argv[i] == "--config" && i + 1 < argv.size()) path = argv[i + 1];
        else if (argv[i].rfind("--config=", 0) == 0) path = argv[i].substr(9);
    }
    if (!path) return;

    std::vector<std::string> extra;
    for (const auto& item : CLI::ConfigTOML().from_file(*path)) {
        if (!item.parents.empty()) throw Exit{kBadConfig, "config sections are not supported: " + item.fullname()};
        const std::string flag = (item.name.size() == 1 ? "-" : "--") + item.name;
        if (!sub->get_option_no_throw(flag) || flag == "--config")
            throw Exit{kBadConfig, "unknown config key '" + item.name + "' for " + sub->get_name()};
        std::string value;
        for (const auto& v : item.inputs) value += (value.empty() ? "" : " ") + v;
        if (item.name.size() == 1) {
            extra.push_back(flag);
            extra.push_back(value);
        } else {
            extra.push_back(flag + "=" + value);
        }
    }
    argv.insert(argv.begin() + 2, extra.begin(), extra.end());
}

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::IoError:
        case Errc::MalformedRecord:
        case Errc::DuplicateDocId:
        case Errc::AllDocumentsEmpty:
            return kBadInput;
        case Errc::InvalidConfig:
        case Errc::KMaxExceedsCorpus:
        case Errc::KRealOutOfRange:
        case Errc::KRealExceedsActive:
            return kBadConfig;
        default:
            return kUsage;
    }
}

}  // namespace

void configure_logging_from_env() {
    const char* env = std::getenv("DMM_LOG");
    spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Short-text clustering with collapsed Gibbs sampling for the Dirichlet multinomial mixture"};
    app.name(args.empty() ? "gsdmm" : fs::path(args[0]).filename().string());
    app.require_subcommand(1);

    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string config_path;
    auto configurable = [&config_path](CLI::App* sub) {
        sub->add_option("--config", config_path, "Flat key = value configuration file; flags override it");
    };

    // preprocess
    std::string pre_input, pre_format = "jsonl", pre_output;
    TokenOptions tok;
    auto* pre = app.add_subcommand("preprocess", "Tokenize a dataset into a corpus archive");
    pre->add_option("--input", pre_input, "Dataset file")->required();
    pre->add_option("--format", pre_format, "Input format")->check(CLI::IsMember({"jsonl", "tsv"}))->capture_default_str();
    pre->add_option("--out", pre_output, "Archive directory")->required();
    tok.add_to(*pre);
    configurable(pre);

    // cluster
    ClusterOptions cl;
    auto* clu = app.add_subcommand("cluster", "Cluster a corpus archive");
    clu->add_option("--corpus", cl.corpus, "Corpus archive directory")->required();
    clu->add_option("--out", cl.output, "Output directory")->required();
    clu->add_option("--algorithm", cl.algorithm)->check(CLI::IsMember({"gsdmm", "gsdmm+"}))->capture_default_str();
    clu->add_option("--alpha", cl.alpha, "Pseudo document count per cluster (default 0.1)");
    clu->add_option("--beta", cl.beta, "Pseudo word count (default 0.1 for gsdmm, 0.01 for gsdmm+)");
    clu->add_option("--kmax", cl.k_max, "Upper bound on clusters")->capture_default_str();
    clu->add_option("--kreal", cl.k_real, "Target cluster count for merging (gsdmm+)");
    clu->add_option("--iters", cl.iterations, "Gibbs sweeps")->capture_default_str();
    clu->add_option("--seed", cl.seed)->capture_default_str();
    clu->add_option("--entropy-refreshes", cl.entropy_refreshes, "Entropy updates per sweep")->capture_default_str();
    clu->add_option("--entropy-eps", cl.entropy_eps, "Smoothing in word entropy")->capture_default_str();
    clu->add_flag("--no-entropy-norm", cl.no_entropy_norm, "Use raw (unnormalized) word entropy");
    clu->add_flag("--trace", cl.trace, "Write trace.csv and merges.csv");
    clu->add_flag("--shuffle", cl.shuffle, "Visit documents in a random order each sweep");
    configurable(clu);

    // eval
    std::string ev_assign, ev_labels, ev_format = "jsonl";
    std::optional<std::string> ev_out;
    auto* ev = app.add_subcommand("eval", "Score assignments against gold labels");
    ev->add_option("--assignments", ev_assign, "assignments.csv")->required();
    ev->add_option("--labels", ev_labels, "Corpus archive directory or labeled dataset file")->required();
    ev->add_option("--format", ev_format, "Format when --labels is a dataset file")
        ->check(CLI::IsMember({"jsonl", "tsv"}))
        ->capture_default_str();
    ev->add_option("--out", ev_out, "Write the JSON report here as well");
    configurable(ev);

    // topwords
    std::string tw_corpus, tw_model;
    std::size_t tw_n = 10;
    std::optional<std::string> tw_out;
    auto* tw = app.add_subcommand("topwords", "Most probable words per cluster");
    tw->add_option("--corpus", tw_corpus, "Corpus archive directory")->required();
    tw->add_option("--model", tw_model, "Directory written by `cluster`")->required();
    tw->add_option("-n", tw_n, "Words per cluster")->capture_default_str();
    tw->add_option("--out", tw_out, "TSV output file (stdout when omitted)");
    configurable(tw);

    // synth
    GenSpec spec;
    std::optional<double> sy_mean;
    std::string sy_out;
    auto* sy = app.add_subcommand("synth", "Sample a labeled corpus from the mixture model");
    sy->add_option("--k", spec.k, "Components")->capture_default_str();
    sy->add_option("--v", spec.v, "Vocabulary size")->capture_default_str();
    sy->add_option("--d", spec.d, "Documents")->capture_default_str();
    sy->add_option("--doc-len", spec.doc_len, "Fixed document length")->capture_default_str();
    sy->add_option("--mean-len", sy_mean, "Mean length for variable-length documents");
    sy->add_option("--alpha-gen", spec.alpha_gen, "Dirichlet concentration of mixture weights")->capture_default_str();
    sy->add_option("--beta-gen", spec.beta_gen, "Dirichlet concentration of word distributions")->capture_default_str();
    sy->add_option("--seed", spec.seed)->capture_default_str();
    sy->add_option("--out", sy_out, "Output JSONL file")->required();
    configurable(sy);

    std::vector<std::string> argv(args.begin(), args.end());
    try {
        expand_config(app, argv);
    } catch (const Exit& e) {
        err << "error: " << e.message << '\n';
        return e.code;
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << '\n';
        return kBadConfig;
    }

    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ConfigError& e) {
        err << e.what() << '\n';
        return kBadConfig;
    } catch (const CLI::FileError& e) {
        err << e.what() << '\n';
        return kBadConfig;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        if (pre->parsed()) return cmd_preprocess(pre_input, pre_format, tok, pre_output, out);
        if (clu->parsed()) return cmd_cluster(cl, out);
        if (ev->parsed()) return cmd_eval(ev_assign, ev_labels, ev_format, ev_out, out);
        if (tw->parsed()) return cmd_topwords(tw_corpus, tw_model, tw_n, tw_out, out);
        if (sy->parsed()) return cmd_synth(spec, sy_mean, sy_out, out);
    } catch (const Exit& e) {
        err << "error: " << e.message << '\n';
        return e.code;
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace gsdmm::cli
