// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
//
// colordesc: train, evaluate, compare and probe color description models.
//
// Exit codes: 0 success, 2 usage/config/IO error, 3 numeric/runtime error.
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "colordesc/corpus.hpp"
#include "colordesc/denotation.hpp"
#include "colordesc/errors.hpp"
#include "colordesc/evaluation.hpp"
#include "colordesc/kernel/rng.hpp"
#include "colordesc/models/checkpoint.hpp"
#include "colordesc/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace colordesc;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

/// Fills options not given on the command line from a key=value file.
void apply_config_file(CLI::App& cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("invalid config 'config': cannot open " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "config") throw UsageError(path + ": 'config' cannot be nested");
        CLI::Option* opt = cmd.get_option_no_throw("--" + key);
        if (opt == nullptr) {
            throw UsageError("invalid config '" + key + "': unknown key for '" + cmd.get_name() + "'");
        }
        if (opt->count() > 0) continue;  // flags override the file
        try {
            opt->add_result(value);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw UsageError("invalid config '" + key + "': " + e.what());
        }
    }
}

/// Every long option of the command with its effective value.
json resolved_options(const CLI::App& cmd) {
    json out = json::object();
    for (const CLI::Option* opt : cmd.get_options()) {
        const auto& names = opt->get_lnames();
        if (names.empty() || names.front() == "help") continue;
        const std::string& name = names.front();
        if (opt->get_expected_max() == 0) {
            out[name] = opt->count() > 0 && opt->as<bool>();
        } else if (opt->count() > 0) {
            const auto& r = opt->results();
            out[name] = r.size() == 1 ? json(r.front()) : json(r);
        } else {
            out[name] = opt->get_default_str();
        }
    }
    return out;
}

struct RunMeta {
    json record;

    RunMeta(const CLI::App& cmd, int argc, char** argv, std::uint64_t seed, bool deterministic) {
        std::vector<std::string> args(argv, argv + argc);
        record = {
            {"command", cmd.get_name()},
            {"argv", args},
            {"config", resolved_options(cmd)},
            {"seed", seed},
            {"deterministic", deterministic},
            {"code_version", COLORDESC_VERSION},
            {"prng", std::string(kPrngId)},
            {"started", utc_now()},
        };
    }

    void write(const fs::path& path) {
        record["finished"] = utc_now();
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw UsageError("cannot write run metadata: " + path.string());
        out << record.dump(2) << '\n';
    }
};

ColorHSV parse_color(const std::string& hsv, const std::string& hsl) {
    const bool use_hsl = !hsl.empty();
    const std::string& text = use_hsl ? hsl : hsv;
    std::vector<double> v;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(trim(part), &used));
            if (used != trim(part).size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw UsageError("invalid color '" + text + "': expected three comma-separated numbers");
        }
    }
    if (v.size() != 3) throw UsageError("invalid color '" + text + "': expected h,s,v or h,s,l");
    return use_hsl ? hsl_to_hsv(canonicalize(ColorHSL{v[0], v[1], v[2]}))
                   : canonicalize(ColorHSV{v[0], v[1], v[2]});
}

Dataset load_split(const SplitManifest& m, const std::string& split) {
    auto report = load_corpus(m.path_for(split), m.color_space, split);
    if (report.skipped > 0) {
        std::cerr << "colordesc: " << split << ": skipped " << report.skipped << " malformed record(s)\n";
    }
    return std::move(report.dataset);
}

SplitManifest read_manifest(const std::string& path) {
    if (path.empty()) throw UsageError("invalid config 'data': a split manifest is required");
    if (!fs::exists(path)) throw UsageError("invalid config 'data': no such file " + path);
    return SplitManifest::read(path);
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
    std::string family{"rnn"};
    std::string features;  // empty: the family default
    std::string conditioning{"every-step"};
    std::string data;
    std::string out;
    std::string config;
    std::size_t train_limit{0};
    std::size_t dev_limit{0};
    bool deterministic{false};
    TrainingConfig tc;
};

void add_train(CLI::App& app, TrainArgs& a) {
    auto* c = app.add_subcommand("train", "Train a model and write <out>/model.ckpt");
    c->add_option("--config", a.config, "key=value file; command-line flags take precedence");
    c->add_option("--family", a.family, "rnn | atomic | hm")->check(CLI::IsMember({"rnn", "atomic", "hm", "histogram"}));
    c->add_option("--features", a.features, "fourier | raw | buckets (default: buckets for hm, else fourier)")
        ->check(CLI::IsMember({"fourier", "raw", "buckets"}));
    c->add_option("--conditioning", a.conditioning, "every-step | init-state")->check(CLI::IsMember({"every-step", "init-state"}));
    c->add_option("--data", a.data, "split manifest (train=, dev=, test=, color_space=)");
    c->add_option("--out", a.out, "output directory");
    c->add_option("--seed", a.tc.seed, "random seed");
    c->add_flag("--deterministic", a.deterministic, "fixed-order reductions (always on in this build)");
    c->add_option("--lr", a.tc.learning_rate, "Adagrad learning rate");
    c->add_option("--dropout", a.tc.dropout, "dropout rate");
    c->add_option("--hidden", a.tc.hidden, "LSTM / dense hidden size");
    c->add_option("--embedding-dim", a.tc.embedding_dim, "token embedding size");
    c->add_option("--bucket-embedding-dim", a.tc.bucket_embedding_dim, "per-resolution bucket embedding size");
    c->add_option("--embedding-sigma", a.tc.embedding_sigma, "embedding init stddev");
    c->add_option("--lstm-sigma", a.tc.lstm_sigma, "LSTM weight init stddev");
    c->add_option("--forget-bias", a.tc.forget_bias, "initial forget-gate bias");
    c->add_option("--batch-size", a.tc.batch_size, "minibatch size");
    c->add_option("--epochs", a.tc.max_epochs, "maximum epochs");
    c->add_option("--patience", a.tc.patience, "dev evaluations without improvement before stopping");
    c->add_option("--evals-per-epoch", a.tc.evals_per_epoch, "dev evaluations per epoch");
    c->add_option("--hm-smoothing", a.tc.histogram_smoothing, "histogram add-k smoothing");
    c->add_option("--train-limit", a.train_limit, "train on a seeded subsample of this many pairs (0 = all)");
    c->add_option("--dev-limit", a.dev_limit, "evaluate dev on a seeded subsample (0 = all)");
}

int run_train(CLI::App& cmd, TrainArgs& a, int argc, char** argv) {
    if (a.out.empty()) throw UsageError("invalid config 'out': an output directory is required");
    a.tc.conditioning = parse_conditioning(a.conditioning);
    a.tc.validate();
    const auto family = parse_model_family(a.family);
    if (a.features.empty()) a.features = family == ModelFamily::histogram ? "buckets" : "fourier";
    const auto features = parse_feature_scheme(a.features);
    const auto manifest = read_manifest(a.data);
    RunMeta meta(cmd, argc, argv, a.tc.seed, a.deterministic);
    meta.record["config"]["features"] = a.features;

    Dataset train = load_split(manifest, "train");
    if (a.train_limit > 0) train = subsample(train, a.train_limit, a.tc.seed);
    Dataset dev;
    const bool has_dev = !manifest.dev.empty();
    if (has_dev) {
        dev = load_split(manifest, "dev");
        if (a.dev_limit > 0) dev = subsample(dev, a.dev_limit, a.tc.seed + 1);
    }

    std::error_code ec;
    fs::create_directories(a.out, ec);
    if (ec) throw UsageError("invalid config 'out': " + ec.message());
    const fs::path out(a.out);
    std::ofstream log(out / "train-log.jsonl", std::ios::trunc);
    if (!log) throw UsageError("cannot write " + (out / "train-log.jsonl").string());

    auto sink = [&](const TrainingRecord& r) {
        log << to_json(r).dump() << '\n';
        log.flush();
        std::cerr << "epoch " << r.epoch << " " << r.split << " perplexity " << r.perplexity << '\n';
    };
    auto trained = train_model(family, features, train, has_dev ? &dev : nullptr, a.tc, sink);

    json run = {
        {"seed", a.tc.seed},
        {"prng", std::string(kPrngId)},
        {"epochs_trained", trained.outcome.epochs_trained},
        {"training", a.tc.to_json()},
        {"train_items", train.size()},
    };
    save_checkpoint(*trained.model, out / "model.ckpt", run);

    meta.record["outputs"] = {{"checkpoint", (out / "model.ckpt").string()},
                              {"log", (out / "train-log.jsonl").string()}};
    meta.record["train_items"] = train.size();
    meta.record["dev_items"] = dev.size();
    meta.record["epochs_trained"] = trained.outcome.epochs_trained;
    meta.record["parameter_count"] = trained.model->parameter_count();
    if (has_dev && trained.outcome.best_dev_perplexity > 0.0) meta.record["best_dev_perplexity"] = trained.outcome.best_dev_perplexity;
    meta.write(out / "run-meta.json");
    std::cout << "wrote " << (out / "model.ckpt").string() << " (k=" << trained.model->parameter_count()
              << ")\n";
    return 0;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
    std::string checkpoint;
    std::string data;
    std::string split{"dev"};
    std::string out;
    std::string config;
    int beam_width{kDefaultBeamWidth};
    std::size_t limit{0};
    std::uint64_t seed{0};
    bool exclude_zero{false};
    bool no_accuracy{false};
    bool deterministic{false};
};

void add_eval(CLI::App& app, EvalArgs& a) {
    auto* c = app.add_subcommand("eval", "Score a split and write an EvalReport");
    c->add_option("--config", a.config, "key=value file; command-line flags take precedence");
    c->add_option("--checkpoint", a.checkpoint, "model checkpoint");
    c->add_option("--data", a.data, "split manifest");
    c->add_option("--split", a.split, "train | dev | test")->check(CLI::IsMember({"train", "dev", "test"}));
    c->add_option("--beam-width", a.beam_width, "beam width for top-1 accuracy")->check(CLI::PositiveNumber);
    c->add_option("--out", a.out, "report path (default: eval-<split>.json next to the checkpoint)");
    c->add_option("--limit", a.limit, "evaluate a seeded subsample of this many items (0 = all)");
    c->add_option("--seed", a.seed, "seed for --limit");
    c->add_flag("--exclude-zero", a.exclude_zero, "drop zero-probability items instead of failing");
    c->add_flag("--no-accuracy", a.no_accuracy, "skip top-1 decoding");
    c->add_flag("--deterministic", a.deterministic, "fixed-order reductions (always on in this build)");
}

int run_eval(CLI::App& cmd, EvalArgs& a, int argc, char** argv) {
    if (a.checkpoint.empty()) throw UsageError("invalid config 'checkpoint': a checkpoint is required");
    const auto manifest = read_manifest(a.data);
    RunMeta meta(cmd, argc, argv, a.seed, a.deterministic);
    const auto ck = load_checkpoint(a.checkpoint);
    Dataset data = load_split(manifest, a.split);
    if (a.limit > 0) data = subsample(data, a.limit, a.seed);

    EvalOptions opt;
    opt.beam_width = a.beam_width;
    opt.exclude_zero = a.exclude_zero;
    opt.compute_accuracy = !a.no_accuracy;
    const auto report = evaluate(*ck.model, data, opt);

    const fs::path out = a.out.empty() ? fs::path(a.checkpoint).parent_path() / ("eval-" + a.split + ".json")
                                       : fs::path(a.out);
    write_eval_report(report, out);
    fs::path meta_path = out;
    meta_path.replace_extension(".run-meta.json");
    meta.record["outputs"] = {{"report", out.string()}};
    meta.write(meta_path);
    std::cout << a.split << ": N=" << report.n << " perplexity=" << report.perplexity
              << " AIC=" << report.aic << " k=" << report.k << " ell_bits=" << report.ell_bits;
    if (opt.compute_accuracy) std::cout << " accuracy=" << report.accuracy << "% (beam " << a.beam_width << ")";
    if (report.zero_probability_items > 0) std::cout << " excluded_zero=" << report.zero_probability_items;
    std::cout << '\n';
    return 0;
}

// ---- compare ---------------------------------------------------------------

struct CompareArgs {
    std::string report_a;
    std::string report_b;
    std::string metric{"logprob"};
    std::string out;
    std::string config;
    std::string run_meta;
    int rounds{kDefaultPermutationRounds};
    std::uint64_t seed{0};
    bool exclude_zero{false};
};

void add_compare(CLI::App& app, CompareArgs& a) {
    auto* c = app.add_subcommand("compare", "Paired permutation test between two EvalReports");
    c->add_option("--config", a.config, "key=value file; command-line flags take precedence");
    c->add_option("report-a", a.report_a, "first report")->required();
    c->add_option("report-b", a.report_b, "second report")->required();
    c->add_option("--metric", a.metric, "logprob | accuracy")->check(CLI::IsMember({"logprob", "accuracy"}));
    c->add_option("--rounds", a.rounds, "permutation rounds R")->check(CLI::PositiveNumber);
    c->add_option("--seed", a.seed, "permutation seed");
    c->add_option("--out", a.out, "write the p-value record here as well as to stdout");
    c->add_option("--run-meta", a.run_meta, "run metadata path (default: <out>.run-meta.json, else stderr)");
    c->add_flag("--exclude-zero", a.exclude_zero, "drop pairs where either report has probability 0");
}

int run_compare(CLI::App& cmd, CompareArgs& a, int argc, char** argv) {
    RunMeta meta(cmd, argc, argv, a.seed, true);
    const auto ra = read_eval_report(a.report_a);
    const auto rb = read_eval_report(a.report_b);
    if (ra.n != rb.n) {
        throw UsageError("reports differ in size (" + std::to_string(ra.n) + " vs " + std::to_string(rb.n) +
                         "); paired comparison needs the same items");
    }
    if (ra.split != rb.split) {
        throw UsageError("reports cover different splits ('" + ra.split + "' vs '" + rb.split + "')");
    }
    std::vector<double> xa, xb;
    std::size_t dropped = 0;
    if (a.metric == "accuracy") {
        if (ra.hits.size() != ra.n || rb.hits.size() != rb.n) {
            throw UsageError("accuracy comparison needs reports produced with accuracy enabled");
        }
        xa.assign(ra.hits.begin(), ra.hits.end());
        xb.assign(rb.hits.begin(), rb.hits.end());
    } else {
        for (std::size_t i = 0; i < ra.n; ++i) {
            if (!std::isfinite(ra.log2_probs[i]) || !std::isfinite(rb.log2_probs[i])) {
                if (!a.exclude_zero) {
                    throw NumericError("item " + std::to_string(i) +
                                       " has probability 0 in one report; rerun with --exclude-zero");
                }
                ++dropped;
                continue;
            }
            xa.push_back(ra.log2_probs[i]);
            xb.push_back(rb.log2_probs[i]);
        }
    }
    const double p = permutation_test(xa, xb, a.rounds, a.seed);
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < xa.size(); ++i) {
        ma += xa[i];
        mb += xb[i];
    }
    const double n = xa.empty() ? 1.0 : static_cast<double>(xa.size());
    const json record = {
        {"metric", a.metric},
        {"split", ra.split},
        {"n", xa.size()},
        {"excluded", dropped},
        {"mean_a", ma / n},
        {"mean_b", mb / n},
        {"rounds", a.rounds},
        {"seed", a.seed},
        {"p_value", p},
        {"report_a", a.report_a},
        {"report_b", a.report_b},
    };
    std::cout << record.dump(2) << '\n';
    if (!a.out.empty()) {
        std::ofstream out(a.out, std::ios::trunc);
        if (!out) throw UsageError("cannot write " + a.out);
        out << record.dump(2) << '\n';
    }
    meta.record["result"] = record;
    if (!a.run_meta.empty()) {
        meta.write(a.run_meta);
    } else if (!a.out.empty()) {
        fs::path mp(a.out);
        mp.replace_extension(".run-meta.json");
        meta.write(mp);
    } else {
        meta.record["finished"] = utc_now();
        std::cerr << "run-meta: " << meta.record.dump() << '\n';
    }
    return 0;
}

// ---- sample / top1 ---------------------------------------------------------

struct ProbeArgs {
    std::string checkpoint;
    std::string hsv;
    std::string hsl;
    std::string config;
    std::string run_meta;
    int n{5};
    int max_len{kDefaultMaxLength};
    int beam_width{kDefaultBeamWidth};
    std::uint64_t seed{0};
};

CLI::App* add_probe_common(CLI::App& app, const std::string& name, const std::string& help, ProbeArgs& a) {
    auto* c = app.add_subcommand(name, help);
    c->add_option("--config", a.config, "key=value file; command-line flags take precedence");
    c->add_option("--checkpoint", a.checkpoint, "model checkpoint");
    auto* hsv = c->add_option("--hsv", a.hsv, "color as h,s,v (degrees, percent, percent)");
    auto* hsl = c->add_option("--hsl", a.hsl, "color as h,s,l; converted to HSV before scoring");
    hsv->excludes(hsl);
    c->add_option("--run-meta", a.run_meta, "write run metadata here (default: stderr)");
    return c;
}

void finish_probe_meta(RunMeta& meta, const ProbeArgs& a) {
    if (!a.run_meta.empty()) {
        meta.write(a.run_meta);
    } else {
        meta.record["finished"] = utc_now();
        std::cerr << "run-meta: " << meta.record.dump() << '\n';
    }
}

void require_probe_inputs(const ProbeArgs& a) {
    if (a.checkpoint.empty()) throw UsageError("invalid config 'checkpoint': a checkpoint is required");
    if (a.hsv.empty() && a.hsl.empty()) throw UsageError("invalid config 'hsv': give --hsv or --hsl");
}

int run_sample(CLI::App& cmd, ProbeArgs& a, int argc, char** argv) {
    require_probe_inputs(a);
    if (a.n < 0) throw UsageError("invalid config 'n': must be >= 0");
    if (a.max_len < 1) throw UsageError("invalid config 'max-len': must be >= 1");
    RunMeta meta(cmd, argc, argv, a.seed, true);
    const auto c = parse_color(a.hsv, a.hsl);
    const auto ck = load_checkpoint(a.checkpoint);
    Rng rng(a.seed);
    for (int i = 0; i < a.n; ++i) std::cout << join_tokens(ck.model->sample(c, rng, a.max_len)) << '\n';
    finish_probe_meta(meta, a);
    return 0;
}

int run_top1(CLI::App& cmd, ProbeArgs& a, int argc, char** argv) {
    require_probe_inputs(a);
    if (a.beam_width < 1) throw UsageError("invalid config 'beam-width': must be >= 1");
    RunMeta meta(cmd, argc, argv, 0, true);
    const auto c = parse_color(a.hsv, a.hsl);
    const auto ck = load_checkpoint(a.checkpoint);
    const auto best = ck.model->top1(c, a.beam_width);
    std::cout << join_tokens(best) << '\n';
    finish_probe_meta(meta, a);
    return 0;
}

// ---- denotation ------------------------------------------------------------

struct DenotationArgs {
    std::string checkpoint;
    std::string description;
    std::string grid{"120x50x50"};
    std::string out{"."};
    std::string config;
};

void add_denotation(CLI::App& app, DenotationArgs& a) {
    auto* c = app.add_subcommand("denotation", "Render L (s x l) and R (h x l) cross sections as PGM");
    c->add_option("--config", a.config, "key=value file; command-line flags take precedence");
    c->add_option("--checkpoint", a.checkpoint, "model checkpoint");
    c->add_option("--desc", a.description, "description to visualize");
    c->add_option("--grid", a.grid, "HSL grid as HxSxL");
    c->add_option("--out", a.out, "output directory");
}

int run_denotation(CLI::App& cmd, DenotationArgs& a, int argc, char** argv) {
    if (a.checkpoint.empty()) throw UsageError("invalid config 'checkpoint': a checkpoint is required");
    if (a.description.empty()) throw UsageError("invalid config 'desc': a description is required");
    const auto grid = parse_grid_spec(a.grid);
    RunMeta meta(cmd, argc, argv, 0, true);
    const auto ck = load_checkpoint(a.checkpoint);
    const json extra = {{"checkpoint", a.checkpoint}, {"family", to_string(ck.model->family())},
                        {"code_version", COLORDESC_VERSION}};
    const auto out = write_denotation(*ck.model, a.description, grid, a.out, extra);
    fs::path mp = fs::path(a.out) / (slug(a.description) + "-run-meta.json");
    meta.record["outputs"] = {{"left", out.left.string()}, {"right", out.right.string()},
                              {"meta", out.meta.string()}};
    meta.write(mp);
    std::cout << out.left.string() << '\n' << out.right.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"colordesc: conditional color-description models"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.set_version_flag("--version", COLORDESC_VERSION);

    TrainArgs train_args;
    EvalArgs eval_args;
    CompareArgs compare_args;
    ProbeArgs sample_args;
    ProbeArgs top1_args;
    DenotationArgs denot_args;
    add_train(app, train_args);
    add_eval(app, eval_args);
    add_compare(app, compare_args);
    auto* sample = add_probe_common(app, "sample", "Draw descriptions for a color", sample_args);
    sample->add_option("--n", sample_args.n, "number of samples");
    sample->add_option("--seed", sample_args.seed, "sampling seed");
    sample->add_option("--max-len", sample_args.max_len, "maximum tokens per description");
    auto* top1 = add_probe_common(app, "top1", "Most likely description for a color", top1_args);
    top1->add_option("--beam-width", top1_args.beam_width, "beam width (1 = greedy)");
    add_denotation(app, denot_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        auto with_config = [&](const std::string& path) {
            if (!path.empty()) apply_config_file(*cmd, path);
        };
        const std::string name = cmd->get_name();
        if (name == "train") {
            with_config(train_args.config);
            return run_train(*cmd, train_args, argc, argv);
        }
        if (name == "eval") {
            with_config(eval_args.config);
            return run_eval(*cmd, eval_args, argc, argv);
        }
        if (name == "compare") {
            with_config(compare_args.config);
            return run_compare(*cmd, compare_args, argc, argv);
        }
        if (name == "sample") {
            with_config(sample_args.config);
            return run_sample(*cmd, sample_args, argc, argv);
        }
        if (name == "top1") {
            with_config(top1_args.config);
            return run_top1(*cmd, top1_args, argc, argv);
        }
        if (name == "denotation") {
            with_config(denot_args.config);
            return run_denotation(*cmd, denot_args, argc, argv);
        }
        throw UsageError("unknown command " + name);
    } catch (const NumericError& e) {
        std::cerr << "colordesc: numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const UsageError& e) {
        std::cerr << "colordesc: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::bad_alloc&) {
        std::cerr << "colordesc: out of memory\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "colordesc: error: " << e.what() << '\n';
        return kExitNumeric;
    }
}
