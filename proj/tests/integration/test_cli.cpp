// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the colordesc executable: exit codes, config handling,
// reproducibility and the files each command writes.
#include <sys/wait.h>

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "colordesc/models/checkpoint.hpp"
#include "colordesc/models/histogram.hpp"
#include "test_support.hpp"

using namespace colordesc;
using namespace colordesc::testing;
using nlohmann::json;
using Catch::Approx;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

Run run_cli(const TempDir& dir, const std::vector<std::string>& args) {
    std::string cmd = quote(COLORDESC_CLI);
    for (const auto& a : args) cmd += " " + quote(a);
    const auto out = dir / "stdout.txt";
    const auto err = dir / "stderr.txt";
    cmd = "cd " + quote(dir.path().string()) + " && " + cmd + " >" + quote(out.string()) + " 2>" +
          quote(err.string());
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, read_bytes(out), read_bytes(err)};
}

/// Small separable corpus: five hue families with light/dark modifiers.
void write_corpus(const TempDir& dir) {
    const std::vector<std::pair<double, std::string>> names{
        {0, "red"}, {120, "green"}, {240, "blue"}, {60, "yellow"}, {300, "purple"}};
    Rng rng(17);
    for (const auto& [split, n] : std::vector<std::pair<std::string, int>>{{"train", 120}, {"dev", 30}, {"test", 30}}) {
        std::ostringstream os;
        for (int i = 0; i < n; ++i) {
            const auto& [h, name] = names[rng.below(names.size())];
            const double v = rng.uniform(50.0, 100.0);
            const std::string desc = rng.uniform(0.0, 1.0) < 0.6 ? name : (v > 75 ? "light " : "dark ") + name;
            os << std::fmod(h + rng.uniform(-10.0, 10.0) + 360.0, 360.0) << '\t' << rng.uniform(60.0, 100.0)
               << '\t' << v << '\t' << desc << '\n';
        }
        write_text(dir / (split + ".tsv"), os.str());
    }
    write_text(dir / "manifest.txt", "train=train.tsv\ndev=dev.tsv\ntest=test.tsv\ncolor_space=hsv\n");
}

const std::vector<std::string> kSmallRnn{"train", "--family", "rnn", "--hidden", "6", "--embedding-dim",
                                         "4", "--epochs", "2", "--data", "manifest.txt"};

std::vector<std::string> with(std::vector<std::string> base, const std::vector<std::string>& more) {
    base.insert(base.end(), more.begin(), more.end());
    return base;
}

json read_json(const std::filesystem::path& p) { return json::parse(read_bytes(p)); }

}  // namespace

TEST_CASE("exit codes for help and usage errors") {
    TempDir dir;
    CHECK(run_cli(dir, {"--help"}).code == 0);
    CHECK(run_cli(dir, {"--version"}).code == 0);
    CHECK(run_cli(dir, {}).code == 2);
    CHECK(run_cli(dir, {"frobnicate"}).code == 2);
    CHECK(run_cli(dir, {"train", "--family", "gru"}).code == 2);
    CHECK(run_cli(dir, {"eval", "--beam-width", "0"}).code == 2);
}

TEST_CASE("missing required inputs name the offending key") {
    TempDir dir;
    const auto r = run_cli(dir, {"train", "--out", "run"});
    CHECK(r.code == 2);
    CHECK(r.err.find("'data'") != std::string::npos);
    const auto r2 = run_cli(dir, {"train", "--data", "manifest.txt"});
    CHECK(r2.code == 2);
    CHECK(r2.err.find("'out'") != std::string::npos);
    const auto r3 = run_cli(dir, {"train", "--data", "nope.txt", "--out", "run"});
    CHECK(r3.code == 2);
    CHECK(r3.err.find("'data'") != std::string::npos);
}

TEST_CASE("config files merge under command-line flags") {
    TempDir dir;
    write_corpus(dir);
    write_text(dir / "good.cfg", "# comment\ndropout = 0.5\nepochs=1\nhidden=5\nembedding-dim=3\ndeterministic=true\n");
    REQUIRE(run_cli(dir, {"train", "--config", "good.cfg", "--hidden", "4", "--data", "manifest.txt", "--out", "run"})
                .code == 0);
    const auto meta = read_json(dir / "run" / "run-meta.json");
    CHECK(meta["config"]["dropout"] == "0.5");
    CHECK(meta["config"]["hidden"] == "4");
    CHECK(meta["config"]["epochs"] == "1");
    CHECK(meta["config"]["deterministic"] == true);

    write_text(dir / "unknown.cfg", "learning_rate=0.1\n");
    const auto r = run_cli(dir, {"train", "--config", "unknown.cfg", "--data", "manifest.txt", "--out", "x"});
    CHECK(r.code == 2);
    CHECK(r.err.find("'learning_rate'") != std::string::npos);

    write_text(dir / "badvalue.cfg", "family=gru\n");
    const auto r2 = run_cli(dir, {"train", "--config", "badvalue.cfg", "--data", "manifest.txt", "--out", "x"});
    CHECK(r2.code == 2);
    CHECK(r2.err.find("'family'") != std::string::npos);

    write_text(dir / "negative.cfg", "dropout=1.5\n");
    const auto r3 = run_cli(dir, {"train", "--config", "negative.cfg", "--data", "manifest.txt", "--out", "x"});
    CHECK(r3.code == 2);
    CHECK(r3.err.find("dropout") != std::string::npos);
}

TEST_CASE("train writes checkpoint, log and run metadata reproducibly") {
    TempDir dir;
    write_corpus(dir);
    REQUIRE(run_cli(dir, with(kSmallRnn, {"--seed", "5", "--out", "a"})).code == 0);
    REQUIRE(run_cli(dir, with(kSmallRnn, {"--seed", "5", "--out", "b", "--deterministic"})).code == 0);
    REQUIRE(run_cli(dir, with(kSmallRnn, {"--seed", "6", "--out", "c"})).code == 0);
    const auto a = read_bytes(dir / "a" / "model.ckpt");
    CHECK(!a.empty());
    CHECK(a == read_bytes(dir / "b" / "model.ckpt"));
    CHECK(a != read_bytes(dir / "c" / "model.ckpt"));

    std::istringstream log(read_bytes(dir / "a" / "train-log.jsonl"));
    std::string line;
    int records = 0;
    while (std::getline(log, line)) {
        const auto rec = json::parse(line);
        CHECK(rec.contains("epoch"));
        CHECK(rec.contains("perplexity"));
        ++records;
    }
    CHECK(records > 0);

    const auto meta = read_json(dir / "a" / "run-meta.json");
    CHECK(meta["seed"] == 5);
    CHECK(meta["code_version"] == COLORDESC_VERSION);
    CHECK(meta.contains("prng"));
    CHECK(meta["parameter_count"].get<std::size_t>() > 0);
}

TEST_CASE("hm and atomic families train from the command line") {
    TempDir dir;
    write_corpus(dir);
    CHECK(run_cli(dir, {"train", "--family", "hm", "--data", "manifest.txt", "--out", "hm"}).code == 0);
    CHECK(run_cli(dir, {"train", "--family", "hm", "--features", "fourier", "--data", "manifest.txt", "--out", "x"})
              .code == 2);
    CHECK(run_cli(dir, {"train", "--family", "atomic", "--epochs", "1", "--hidden", "5", "--data", "manifest.txt",
                        "--out", "at"})
              .code == 0);
    const auto ck = load_checkpoint(dir / "at" / "model.ckpt");
    CHECK(ck.model->family() == ModelFamily::atomic);
}

TEST_CASE("eval of a uniform checkpoint reports perplexity two") {
    TempDir dir;
    save_checkpoint(HistogramModel(DescriptionInventory::from_list({"red", "blue"})), dir / "uniform.ckpt");
    write_text(dir / "test.tsv", "10\t10\t10\tred\n200\t50\t50\tblue\n");
    write_text(dir / "manifest.txt", "test=test.tsv\n");
    const auto r = run_cli(dir, {"eval", "--checkpoint", "uniform.ckpt", "--data", "manifest.txt", "--split", "test",
                                 "--out", "report.json"});
    REQUIRE(r.code == 0);
    const auto rep = read_json(dir / "report.json");
    CHECK(rep["perplexity"].get<double>() == Approx(2.0).epsilon(1e-12));
    CHECK(rep["n"] == 2);
    CHECK(rep["split"] == "test");
    CHECK(rep["model"]["family"] == "hm");
    CHECK(std::filesystem::exists(dir / "report.run-meta.json"));
}

TEST_CASE("eval is reproducible and compare of a report with itself gives p = 1") {
    TempDir dir;
    write_corpus(dir);
    REQUIRE(run_cli(dir, with(kSmallRnn, {"--out", "m"})).code == 0);
    REQUIRE(run_cli(dir, {"train", "--family", "hm", "--data", "manifest.txt", "--out", "hm"}).code == 0);
    const std::vector<std::string> ev{"eval", "--checkpoint", "m/model.ckpt", "--data", "manifest.txt", "--split", "test"};
    REQUIRE(run_cli(dir, with(ev, {"--out", "r1.json"})).code == 0);
    REQUIRE(run_cli(dir, with(ev, {"--out", "r2.json"})).code == 0);
    auto r1 = read_json(dir / "r1.json");
    auto r2 = read_json(dir / "r2.json");
    r1.erase("created");
    r2.erase("created");
    CHECK(r1 == r2);

    const auto same = run_cli(dir, {"compare", "r1.json", "r2.json", "--rounds", "500"});
    REQUIRE(same.code == 0);
    CHECK(json::parse(same.out)["p_value"].get<double>() == 1.0);

    REQUIRE(run_cli(dir, {"eval", "--checkpoint", "hm/model.ckpt", "--data", "manifest.txt", "--split", "test",
                          "--out", "h.json"})
                .code == 0);
    const auto diff = run_cli(dir, {"compare", "r1.json", "h.json", "--rounds", "500", "--seed", "3", "--out", "c.json"});
    REQUIRE(diff.code == 0);
    const double p = read_json(dir / "c.json")["p_value"].get<double>();
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
    CHECK(run_cli(dir, {"compare", "r1.json", "h.json", "--metric", "accuracy", "--rounds", "200"}).code == 0);

    REQUIRE(run_cli(dir, {"eval", "--checkpoint", "hm/model.ckpt", "--data", "manifest.txt", "--split", "dev",
                          "--out", "d.json"})
                .code == 0);
    CHECK(run_cli(dir, {"compare", "r1.json", "d.json"}).code == 2);
    CHECK(run_cli(dir, {"compare", "r1.json", "missing.json"}).code == 2);
}

TEST_CASE("sample is reproducible for a fixed seed and top1 is stable") {
    TempDir dir;
    write_corpus(dir);
    REQUIRE(run_cli(dir, with(kSmallRnn, {"--out", "m"})).code == 0);
    const std::vector<std::string> s{"sample", "--checkpoint", "m/model.ckpt", "--hsv", "120,80,80", "--n", "8"};
    const auto a = run_cli(dir, with(s, {"--seed", "9"}));
    const auto b = run_cli(dir, with(s, {"--seed", "9"}));
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 8);

    const auto t1 = run_cli(dir, {"top1", "--checkpoint", "m/model.ckpt", "--hsl", "240,100,50"});
    const auto t2 = run_cli(dir, {"top1", "--checkpoint", "m/model.ckpt", "--hsl", "240,100,50"});
    REQUIRE(t1.code == 0);
    CHECK(t1.out == t2.out);
    CHECK(!t1.out.empty());

    CHECK(run_cli(dir, {"top1", "--checkpoint", "m/model.ckpt", "--hsv", "1,2,3", "--hsl", "1,2,3"}).code == 2);
    CHECK(run_cli(dir, {"top1", "--checkpoint", "m/model.ckpt", "--hsv", "1,2"}).code == 2);
    CHECK(run_cli(dir, {"top1", "--checkpoint", "m/model.ckpt"}).code == 2);
}

TEST_CASE("denotation writes slugged PGMs and a sidecar with the grid") {
    TempDir dir;
    write_corpus(dir);
    REQUIRE(run_cli(dir, with(kSmallRnn, {"--out", "m"})).code == 0);
    const auto r = run_cli(dir, {"denotation", "--checkpoint", "m/model.ckpt", "--desc", "Light Green", "--grid",
                                 "12x5x4", "--out", "den"});
    REQUIRE(r.code == 0);
    CHECK(read_bytes(dir / "den" / "light-green-L.pgm").rfind("P5\n5 4\n255\n", 0) == 0);
    CHECK(read_bytes(dir / "den" / "light-green-R.pgm").rfind("P5\n12 4\n255\n", 0) == 0);
    const auto meta = read_json(dir / "den" / "light-green-meta.json");
    CHECK(meta["grid"]["n_h"] == 12);
    CHECK(meta["grid"]["n_s"] == 5);
    CHECK(meta["grid"]["n_l"] == 4);

    const auto bad = run_cli(dir, {"denotation", "--checkpoint", "m/model.ckpt", "--desc", "zzz", "--grid", "4x4x4"});
    CHECK(bad.code == 2);
    CHECK(run_cli(dir, {"denotation", "--checkpoint", "m/model.ckpt", "--desc", "green", "--grid", "4x4"}).code == 2);
}

TEST_CASE("divergent training exits with the numeric error code") {
    TempDir dir;
    write_corpus(dir);
    const auto r = run_cli(dir, with(kSmallRnn, {"--lr", "1e300", "--out", "nan"}));
    CHECK(r.code == 3);
    CHECK(r.err.find("numeric") != std::string::npos);
}

TEST_CASE("corrupt checkpoints are rejected as format errors") {
    TempDir dir;
    write_text(dir / "junk.ckpt", "not a checkpoint");
    CHECK(run_cli(dir, {"top1", "--checkpoint", "junk.ckpt", "--hsv", "0,50,50"}).code == 2);
}
