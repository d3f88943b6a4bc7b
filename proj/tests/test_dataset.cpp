#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "mvb/dataset.h"

using namespace mvb;

namespace {

size_t corrupted_count(const MultiViewDataset& ds) {
    size_t n = 0;
    for (const auto& s : ds.unlabeled) {
        for (int v = 0; v < ds.V; v++)
            if (s.true_view_labels[v] != s.nominal_label) {
                n++;
                break;
            }
    }
    return n;
}

}  // namespace

TEST_CASE("config validation names the offending field") {
    SyntheticConfig cfg;
    cfg.disagreement_rate = 1.5;
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("disagreement_rate"),
                         std::invalid_argument);
    cfg = SyntheticConfig{};
    cfg.per_class_count = 0;
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("per_class_count"),
                         std::invalid_argument);
    cfg = SyntheticConfig{};
    cfg.n_foreground_classes = 0;
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("n_foreground_classes"),
                         std::invalid_argument);
    cfg = SyntheticConfig{};
    cfg.dims = {2};  // wrong length for V=2
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    CHECK_NOTHROW(validate(SyntheticConfig{}));
}

TEST_CASE("default generation layout") {
    SyntheticConfig cfg;
    MultiViewDataset ds = generate_synthetic(cfg);
    CHECK(ds.V == 2);
    CHECK(ds.n_classes == 2);
    CHECK(ds.pool_size() == 300);  // 100 per foreground class + 100 background
    CHECK(ds.test.size() == 100);  // 50 per foreground class
    REQUIRE(ds.unlabeled_mask.size() == 2);
    for (const auto& m : ds.unlabeled_mask) {
        REQUIRE(m.size() == 300);
        for (uint8_t b : m) CHECK(b == 1);
    }
    for (const auto& s : ds.seed_sets) CHECK(s.empty());

    int counts[3] = {0, 0, 0};
    for (const auto& s : ds.unlabeled) {
        REQUIRE(s.views.size() == 2);
        REQUIRE(s.views[0].size() == 2);
        counts[s.nominal_label]++;
        for (int v = 0; v < 2; v++) CHECK(s.true_view_labels[v] == s.nominal_label);
    }
    CHECK(counts[0] == 100);
    CHECK(counts[1] == 100);
    CHECK(counts[2] == 100);

    int tcounts[3] = {0, 0, 0};
    for (const auto& s : ds.test) {
        tcounts[s.nominal_label]++;
        for (int v = 0; v < 2; v++) CHECK(s.true_view_labels[v] == s.nominal_label);
    }
    CHECK(tcounts[0] == 0);
    CHECK(tcounts[1] == 50);
    CHECK(tcounts[2] == 50);
}

TEST_CASE("class geometry puts clouds where configured") {
    SyntheticConfig cfg;
    cfg.rng_seed = 21;
    MultiViewDataset ds = generate_synthetic(cfg);
    double sum[3] = {0, 0, 0};
    int n[3] = {0, 0, 0};
    for (const auto& s : ds.unlabeled) {
        sum[s.nominal_label] += s.views[0][0];
        n[s.nominal_label]++;
    }
    CHECK(std::fabs(sum[0] / n[0] - 0.0) < 0.5);
    CHECK(std::fabs(sum[1] / n[1] - 4.0) < 0.5);
    CHECK(std::fabs(sum[2] / n[2] - 8.0) < 0.5);
}

TEST_CASE("generation is deterministic in the seed") {
    SyntheticConfig cfg;
    cfg.disagreement_rate = 0.3;
    MultiViewDataset a = generate_synthetic(cfg);
    MultiViewDataset b = generate_synthetic(cfg);
    CHECK(datasets_equal(a, b));
    cfg.rng_seed = 2;
    MultiViewDataset c = generate_synthetic(cfg);
    CHECK_FALSE(datasets_equal(a, c));
}

TEST_CASE("disagreement injection corrupts exactly one view each") {
    SyntheticConfig cfg;
    cfg.disagreement_rate = 0.4;
    MultiViewDataset ds = generate_synthetic(cfg);
    CHECK(corrupted_count(ds) == 80);  // round(0.4 * 200) foreground samples
    for (const auto& s : ds.unlabeled) {
        int bad = 0;
        for (int v = 0; v < ds.V; v++)
            if (s.true_view_labels[v] != s.nominal_label) {
                bad++;
                CHECK(s.true_view_labels[v] == kBackground);
            }
        CHECK(bad <= 1);
        if (bad > 0) CHECK(s.nominal_label != kBackground);
    }
    SyntheticConfig clean;
    CHECK(corrupted_count(generate_synthetic(clean)) == 0);
}

TEST_CASE("standalone injection draws candidates from uncorrupted foreground") {
    SyntheticConfig cfg;
    MultiViewDataset ds = generate_synthetic(cfg);
    inject_view_disagreement(ds, 0.5, 99);
    CHECK(corrupted_count(ds) == 100);
    // a second pass can only use the remaining 100 clean foreground samples
    inject_view_disagreement(ds, 0.5, 100);
    CHECK(corrupted_count(ds) == 200);
    // the pool has no clean foreground left
    CHECK_THROWS_WITH_AS(inject_view_disagreement(ds, 0.5, 101),
                         doctest::Contains("uncorrupted"), std::runtime_error);
    CHECK_THROWS_AS(inject_view_disagreement(ds, -0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(inject_view_disagreement(ds, 1.1, 1), std::invalid_argument);
}

TEST_CASE("split moves clean seeds out of the pool") {
    SyntheticConfig cfg;
    cfg.disagreement_rate = 0.3;
    MultiViewDataset ds = generate_synthetic(cfg);
    split_labeled_unlabeled(ds, 5, 77);
    REQUIRE(ds.seed_sets.size() == 2);
    for (int v = 0; v < 2; v++) {
        CHECK(ds.seed_sets[v].size() == 15);  // 5 per class incl. background
        int per_class[3] = {0, 0, 0};
        for (const auto& sp : ds.seed_sets[v]) per_class[sp.label]++;
        CHECK(per_class[0] == 5);
        CHECK(per_class[1] == 5);
        CHECK(per_class[2] == 5);
    }
    CHECK(ds.pool_size() == 285);
    for (const auto& m : ds.unlabeled_mask) {
        REQUIRE(m.size() == 285);
        for (uint8_t b : m) CHECK(b == 1);
    }

    MultiViewDataset no_bg = generate_synthetic(cfg);
    split_labeled_unlabeled(no_bg, 5, 77, false);
    CHECK(no_bg.seed_sets[0].size() == 10);
    CHECK(no_bg.pool_size() == 290);
}

TEST_CASE("split fails loudly when a class lacks clean samples") {
    SyntheticConfig cfg;
    cfg.per_class_count = 20;
    cfg.disagreement_rate = 0.9;  // 36 of 40 foreground corrupted
    MultiViewDataset ds = generate_synthetic(cfg);
    CHECK_THROWS_WITH_AS(split_labeled_unlabeled(ds, 5, 1), doctest::Contains("uncorrupted"),
                         std::runtime_error);
}

TEST_CASE("jsonl round trip is exact") {
    SyntheticConfig cfg;
    cfg.disagreement_rate = 0.3;
    cfg.per_class_count = 30;
    cfg.test_per_class = 10;
    MultiViewDataset ds = generate_synthetic(cfg);
    split_labeled_unlabeled(ds, 4, 5);
    const char* path = "test_roundtrip.jsonl";
    save_dataset(ds, path);
    MultiViewDataset back = load_dataset(path);
    CHECK(datasets_equal(ds, back));

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "{\"V\":2,\"dims\":[2,2],\"n_classes\":2}");
    std::remove(path);
}

TEST_CASE("load reports path and line on malformed input") {
    CHECK_THROWS_WITH_AS(load_dataset("no_such_file.jsonl"), doctest::Contains("no_such_file"),
                         std::runtime_error);

    const char* path = "test_malformed.jsonl";
    {
        std::ofstream out(path);
        out << "{\"V\":2,\"dims\":[2,2],\"n_classes\":2}\n";
        out << "{this is not json}\n";
    }
    CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains(":2:"), std::runtime_error);
    {
        std::ofstream out(path);
        out << "{\"V\":2,\"dims\":[2,2],\"n_classes\":2}\n";
        out << "{\"views\":[[0,0],[0,0]],\"true_view_labels\":[0,0],\"nominal_label\":0,"
               "\"role\":\"mystery\"}\n";
    }
    CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains("role"), std::runtime_error);
    {
        std::ofstream out(path);
        out << "{\"V\":2,\"dims\":[2,2],\"n_classes\":2}\n";
        out << "{\"views\":[[0,0]],\"true_view_labels\":[0],\"nominal_label\":0,"
               "\"role\":\"unlabeled\"}\n";
    }
    CHECK_THROWS_AS(load_dataset(path), std::runtime_error);
    std::remove(path);
}
