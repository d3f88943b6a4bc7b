#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mvb/cli.h"
#include "mvb/dataset.h"

using namespace mvb;
namespace fs = std::filesystem;

namespace {

// capture both streams so test output stays readable
struct Capture {
    std::ostringstream out, err;
    std::streambuf* saved_out;
    std::streambuf* saved_err;
    Capture()
        : saved_out(std::cout.rdbuf(out.rdbuf())), saved_err(std::cerr.rdbuf(err.rdbuf())) {}
    ~Capture() {
        std::cout.rdbuf(saved_out);
        std::cerr.rdbuf(saved_err);
    }
};

int run(const std::vector<std::string>& args, std::string* stdout_text = nullptr,
        std::string* stderr_text = nullptr) {
    Capture cap;
    int code = run_cli(args);
    if (stdout_text) *stdout_text = cap.out.str();
    if (stderr_text) *stderr_text = cap.err.str();
    return code;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

size_t line_count(const std::string& text) {
    size_t n = 0;
    for (char c : text) n += c == '\n' ? 1 : 0;
    return n;
}

struct TempDir {
    fs::path dir;
    explicit TempDir(const std::string& name) : dir(name) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string operator/(const std::string& leaf) const { return (dir / leaf).string(); }
};

}  // namespace

TEST_CASE("generate writes a loadable dataset and reports its shape") {
    TempDir tmp("cli_gen");
    std::string path = tmp / "data.jsonl";
    std::string text;
    int code = run({"generate", "--per-class", "30", "--test-per-class", "10",
                    "--disagreement", "0.3", "--seed", "9", "-o", path},
                   &text);
    REQUIRE(code == 0);
    CHECK(text.find("wrote " + path) == 0);
    CHECK(text.find("pool=90") != std::string::npos);
    CHECK(text.find("corrupted 18") != std::string::npos);  // round(0.3 * 60)

    MultiViewDataset ds = load_dataset(path);
    CHECK(ds.V == 2);
    CHECK(ds.pool_size() == 90);
    CHECK(ds.test.size() == 20);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run({"generate"}) == 2);                                // missing -o
    CHECK(run({"generate", "-o", "x.jsonl", "--bogus"}) == 2);    // unknown flag
    CHECK(run({"frobnicate"}) == 2);                              // unknown subcommand
    CHECK(run({}) == 2);                                          // no subcommand
    CHECK(run({"detect", "-o", "v.csv"}) == 2);                   // missing -i
    CHECK(run({"bootstrap", "-i", "x", "-o", "y", "--method", "nonsense"}) == 2);
    CHECK(run({"generate", "-o", "x.jsonl", "--disagreement", "1.5"}) == 2);
    CHECK(run({"--help"}) == 0);
    CHECK(fs::exists("x.jsonl") == false);
}

TEST_CASE("runtime failures exit with code 1") {
    std::string err;
    CHECK(run({"detect", "-i", "cli_missing.jsonl", "-o", "v.csv"}, nullptr, &err) == 1);
    CHECK(err.find("cli_missing.jsonl") != std::string::npos);
}

TEST_CASE("detect writes verdicts, roc csv, and an optional svg") {
    TempDir tmp("cli_detect");
    std::string data = tmp / "data.jsonl";
    REQUIRE(run({"generate", "--per-class", "30", "--test-per-class", "0", "--disagreement",
                 "0.3", "--seed", "4", "-o", data}) == 0);

    std::string verdicts = tmp / "verdicts.csv";
    std::string text;
    REQUIRE(run({"detect", "-i", data, "-o", verdicts}, &text) == 0);
    std::string csv = slurp(verdicts);
    CHECK(first_line(csv) == "sample_index,verdict,bit_1_2,bit_2_1,h_1_2,h_2_1");
    CHECK(line_count(csv) == 91);  // header + one row per pool sample
    CHECK(fs::exists(tmp / "verdicts_roc.csv"));
    CHECK(fs::exists(tmp / "verdicts_roc.svg"));
    CHECK(text.find("verdicts: redundant_foreground") != std::string::npos);
    CHECK(text.find("foreground auc: ") != std::string::npos);

    std::string v2 = tmp / "v2.csv";
    REQUIRE(run({"detect", "-i", data, "-o", v2, "--no-svg"}) == 0);
    CHECK(fs::exists(tmp / "v2_roc.csv"));
    CHECK_FALSE(fs::exists(tmp / "v2_roc.svg"));
    // byte-identical re-analysis of the same dataset
    CHECK(slurp(verdicts) == slurp(v2));
}

TEST_CASE("bootstrap runs every method end to end") {
    TempDir tmp("cli_boot");
    std::string data = tmp / "data.jsonl";
    REQUIRE(run({"generate", "--per-class", "30", "--test-per-class", "10", "--disagreement",
                 "0.3", "--seed", "4", "-o", data}) == 0);

    std::string trace = tmp / "trace.csv";
    std::string text;
    REQUIRE(run({"bootstrap", "-i", data, "-o", trace, "--method", "filtered", "--seed", "4"},
                &text) == 0);
    CHECK(first_line(slurp(trace)) ==
          "iteration,view,labeled_size,unlabeled_size,test_ccr,pairs_filtered");
    CHECK(text.find("iterations") != std::string::npos);
    CHECK(text.find("test ccr view 1: ") != std::string::npos);
    CHECK(text.find("test ccr view 2: ") != std::string::npos);

    std::string base = tmp / "base.csv";
    REQUIRE(run({"bootstrap", "-i", data, "-o", base, "--method", "baseline", "--seed", "4"}) ==
            0);
    CHECK(first_line(slurp(base)) ==
          "iteration,view,labeled_size,unlabeled_size,test_ccr,pairs_filtered");

    std::string cm = tmp / "cm.csv";
    REQUIRE(run({"bootstrap", "-i", data, "-o", cm, "--method", "crossmodal", "--seed", "4"},
                &text) == 0);
    CHECK(first_line(slurp(cm)) ==
          "sample_index,label,feature_bit,label_bit,kept,h_label_given_feature");
    CHECK(text.find("kept") != std::string::npos);
    CHECK(text.find("test ccr view 2: ") != std::string::npos);

    // a dataset without seed rows needs a positive per-class split count
    CHECK(run({"bootstrap", "-i", data, "-o", tmp / "t.csv", "--seeds-per-class", "0"}) == 2);
}

TEST_CASE("sweep writes cell, trial, and plot files and repeats byte-identically") {
    TempDir tmp("cli_sweep");
    std::vector<std::string> common = {
        "sweep",           "--methods", "baseline,filtered", "--rates",   "0,0.3",
        "--trials",        "2",         "--seed",            "11",        "--per-class",
        "30",              "--test-per-class", "10",         "--dims",    "2"};

    std::vector<std::string> a = common;
    a.insert(a.end(), {"-o", tmp / "sweep_a.csv", "--jobs", "1"});
    std::string text;
    REQUIRE(run(a, &text) == 0);
    CHECK(text.find("0 failed") != std::string::npos);

    std::vector<std::string> b = common;
    b.insert(b.end(), {"-o", tmp / "sweep_b.csv", "--jobs", "3"});
    REQUIRE(run(b) == 0);

    std::string cells = slurp(tmp / "sweep_a.csv");
    CHECK(first_line(cells) == "method,rate,view,mean_ccr,std_ccr,trials");
    CHECK(line_count(cells) == 9);  // 2 methods x 2 rates x 2 views + header
    CHECK(cells == slurp(tmp / "sweep_b.csv"));
    CHECK(slurp(tmp / "sweep_a_trials.csv") == slurp(tmp / "sweep_b_trials.csv"));
    CHECK(slurp(tmp / "sweep_a.svg") == slurp(tmp / "sweep_b.svg"));
}

TEST_CASE("sweep argument validation exits with code 2") {
    TempDir tmp("cli_sweep_bad");
    std::string out = tmp / "s.csv";
    CHECK(run({"sweep", "-o", out, "--trials", "0"}) == 2);
    CHECK(run({"sweep", "-o", out, "--rates", "abc"}) == 2);
    CHECK(run({"sweep", "-o", out, "--rates", "0.5:0.2:0.1"}) == 2);
    CHECK(run({"sweep", "-o", out, "--rates", "0:0.5:0"}) == 2);
    CHECK(run({"sweep", "-o", out, "--rates", "0,,0.3"}) == 2);
    CHECK(run({"sweep", "-o", out, "--methods", "baseline,wat"}) == 2);
}

TEST_CASE("sweep reports failing trials through the exit code") {
    TempDir tmp("cli_sweep_fail");
    std::string out = tmp / "s.csv";
    std::string err;
    // 20 per class cannot spare 5 clean seeds per class at 90% disagreement
    CHECK(run({"sweep", "-o", out, "--methods", "filtered", "--rates", "0.9", "--trials", "1",
               "--per-class", "20", "--test-per-class", "5"},
              nullptr, &err) == 1);
    CHECK(err.find("failed") != std::string::npos);
    CHECK(fs::exists(out));  // results are still written for inspection
    std::string trials = slurp(tmp / "s_trials.csv");
    CHECK(trials.find(",1,") != std::string::npos);  // failed flag column
}

TEST_CASE("a config file supplies defaults for subcommand options") {
    TempDir tmp("cli_config");
    std::string cfg = tmp / "run.ini";
    {
        std::ofstream out(cfg);
        out << "[generate]\n";
        out << "per-class=25\n";
        out << "test-per-class=0\n";
        out << "seed=6\n";
    }
    std::string data = tmp / "data.jsonl";
    std::string text;
    REQUIRE(run({"--config", cfg, "generate", "-o", data}, &text) == 0);
    CHECK(text.find("pool=75") != std::string::npos);
    MultiViewDataset ds = load_dataset(data);
    CHECK(ds.pool_size() == 75);
    CHECK(ds.test.empty());
}

TEST_CASE("colon ranges expand inclusively") {
    TempDir tmp("cli_range");
    std::string out = tmp / "s.csv";
    REQUIRE(run({"sweep", "-o", out, "--methods", "baseline", "--rates", "0:0.4:0.2",
                 "--trials", "1", "--per-class", "25", "--test-per-class", "5", "--no-svg"}) ==
            0);
    std::string cells = slurp(out);
    CHECK(line_count(cells) == 7);  // header + 3 rates x 2 views
    CHECK(cells.find("baseline,0.4,") != std::string::npos);
    CHECK_FALSE(fs::exists(tmp / "s.svg"));
}
