#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "doctest.h"
#include "mvb/dataset.h"
#include "mvb/disagreement.h"

using namespace mvb;

namespace {

MultiViewDataset small_pool(double rate, uint64_t seed) {
    SyntheticConfig cfg;
    cfg.per_class_count = 40;
    cfg.test_per_class = 0;
    cfg.disagreement_rate = rate;
    cfg.rng_seed = seed;
    return generate_synthetic(cfg);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// hand-set two-view table whose pair means are both 0.5
EntropyTable toy_table() {
    EntropyTable t;
    t.V = 2;
    t.M = 4;
    t.H.assign(4, {});
    t.mean.assign(4, 0.0);
    t.H[t.pair_index(0, 1)] = {0.1, 0.1, 0.9, 0.9};
    t.H[t.pair_index(1, 0)] = {0.1, 0.9, 0.1, 0.9};
    t.mean[t.pair_index(0, 1)] = 0.5;
    t.mean[t.pair_index(1, 0)] = 0.5;
    return t;
}

}  // namespace

TEST_CASE("entropy_from_weights matches hand-computed values") {
    CHECK(entropy_from_weights({0.5, 0.25, 0.25}) ==
          doctest::Approx(1.0397207708399179).epsilon(1e-14));
    CHECK(entropy_from_weights({2.0, 1.0}) ==
          doctest::Approx(0.6365141682948128).epsilon(1e-14));
    // scale invariance
    CHECK(entropy_from_weights({2.0, 1.0, 1.0}) ==
          doctest::Approx(entropy_from_weights({2e-12, 1e-12, 1e-12})).epsilon(1e-12));
    // one-hot is zero exactly, all-zero is treated as uniform
    CHECK(entropy_from_weights({0.0, 0.0, 7.0, 0.0}) == 0.0);
    CHECK(entropy_from_weights({0.0, 0.0, 0.0, 0.0, 0.0}) ==
          doctest::Approx(1.6094379124341003).epsilon(1e-14));
    CHECK(entropy_from_weights(std::vector<double>(300, 1.0)) ==
          doctest::Approx(std::log(300.0)).epsilon(1e-12));
    CHECK_THROWS_AS(entropy_from_weights({1.0, -0.5}), std::invalid_argument);
    CHECK_THROWS_AS(entropy_from_weights({}), std::invalid_argument);
}

TEST_CASE("indicator uses a strict below-mean comparison") {
    EntropyTable t;
    t.V = 2;
    t.M = 3;
    t.H.assign(4, {});
    t.mean.assign(4, 0.0);
    t.H[t.pair_index(0, 1)] = {1.0, 2.0, 3.0};
    t.H[t.pair_index(1, 0)] = {2.0, 2.0, 2.0};
    t.mean[t.pair_index(0, 1)] = 2.0;
    t.mean[t.pair_index(1, 0)] = 2.0;
    CHECK(indicator_m(t, 0, 1, 0));
    CHECK_FALSE(indicator_m(t, 0, 1, 1));  // exactly at the mean does not fire
    CHECK_FALSE(indicator_m(t, 0, 1, 2));
    CHECK_FALSE(indicator_m(t, 1, 0, 0));

    CHECK_THROWS_AS(indicator_m(t, 0, 0, 0), std::out_of_range);
    CHECK_THROWS_AS(indicator_m(t, 0, 2, 0), std::out_of_range);
    CHECK_THROWS_AS(indicator_m(t, 0, 1, 3), std::out_of_range);
}

TEST_CASE("pair and sample verdicts follow the bit pattern") {
    EntropyTable t = toy_table();
    // sample 0: both bits 1; 1 and 2: bits disagree; 3: both bits 0
    CHECK(classify_pair(t, 0, 1, 0).verdict == Verdict::RedundantForeground);
    CHECK(classify_pair(t, 0, 1, 1).verdict == Verdict::ViewDisagreement);
    CHECK(classify_pair(t, 0, 1, 2).verdict == Verdict::ViewDisagreement);
    CHECK(classify_pair(t, 0, 1, 3).verdict == Verdict::RedundantBackground);
    PairVerdict pv = classify_pair(t, 0, 1, 1);
    CHECK(pv.bit_ij);
    CHECK_FALSE(pv.bit_ji);
    for (size_t k = 0; k < 4; k++)
        CHECK(classify_sample(t, k) == classify_pair(t, 0, 1, k).verdict);
    CHECK(std::string(to_string(Verdict::ViewDisagreement)) == "view_disagreement");
    CHECK(std::string(to_string(Verdict::RedundantForeground)) == "redundant_foreground");
    CHECK(std::string(to_string(Verdict::RedundantBackground)) == "redundant_background");
}

TEST_CASE("entropy table invariants hold on a generated pool") {
    MultiViewDataset ds = small_pool(0.3, 21);
    EntropyTable t = build_entropy_table(ds);
    REQUIRE(t.V == 2);
    REQUIRE(t.M == ds.pool_size());
    double lnM = std::log(static_cast<double>(t.M));
    for (int i = 0; i < t.V; i++) {
        for (int j = 0; j < t.V; j++) {
            const auto& H = t.H[t.pair_index(i, j)];
            if (i == j) {
                CHECK(H.empty());
                continue;
            }
            REQUIRE(H.size() == t.M);
            double sum = 0.0;
            for (double h : H) {
                CHECK(h >= 0.0);
                CHECK(h <= lnM + 1e-9);
                sum += h;
            }
            CHECK(t.mean[t.pair_index(i, j)] ==
                  doctest::Approx(sum / static_cast<double>(t.M)).epsilon(1e-12));
        }
    }
}

TEST_CASE("parallel table agrees with the serial reference") {
    MultiViewDataset ds = small_pool(0.3, 22);
    EntropyTable fast = build_entropy_table(ds);
    EntropyTable ref = build_entropy_table_reference(ds);
    REQUIRE(fast.V == ref.V);
    REQUIRE(fast.M == ref.M);
    double worst = 0.0;
    for (size_t p = 0; p < fast.H.size(); p++) {
        REQUIRE(fast.H[p].size() == ref.H[p].size());
        for (size_t k = 0; k < fast.H[p].size(); k++) {
            double d = std::fabs(fast.H[p][k] - ref.H[p][k]) /
                       std::max(1.0, std::fabs(ref.H[p][k]));
            worst = std::max(worst, d);
        }
    }
    CHECK(worst < 1e-9);
}

#ifdef _OPENMP
TEST_CASE("table construction is bit-identical across thread counts") {
    MultiViewDataset ds = small_pool(0.5, 23);
    int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    EntropyTable one = build_entropy_table(ds);
    omp_set_num_threads(4);
    EntropyTable four = build_entropy_table(ds);
    omp_set_num_threads(saved);
    CHECK(one.H == four.H);
    CHECK(one.mean == four.mean);
}
#endif

TEST_CASE("subset tables cover exactly the requested rows") {
    MultiViewDataset ds = small_pool(0.3, 24);
    std::vector<size_t> idx;
    for (size_t k = 0; k < 60; k++) idx.push_back(k);
    EntropyTable sub = build_entropy_table_subset(ds, idx);
    CHECK(sub.M == 60);
    EntropyTable again = build_entropy_table_subset(ds, idx);
    CHECK(sub.H == again.H);
    CHECK_THROWS_AS(build_entropy_table_subset(ds, {0}), std::runtime_error);
    MultiViewDataset empty;
    empty.V = 2;
    CHECK_THROWS_AS(build_entropy_table(empty), std::runtime_error);
}

TEST_CASE("roc curves are monotone along the quantile grid with pinned endpoints") {
    MultiViewDataset ds = small_pool(0.3, 25);
    EntropyTable t = build_entropy_table(ds);
    DetectionRoc roc = detection_roc(ds, t, 21);
    REQUIRE(roc.foreground.defined);
    REQUIRE(roc.background.defined);
    REQUIRE(roc.foreground.points.size() == 21);
    REQUIRE(roc.background.points.size() == 21);

    // quantile 0: nothing lies strictly below the minimum, so no foreground
    // verdicts fire and every sample is called background
    CHECK(roc.foreground.points.front().fpr == 0.0);
    CHECK(roc.foreground.points.front().tpr == 0.0);
    CHECK(roc.background.points.front().fpr == 1.0);
    CHECK(roc.background.points.front().tpr == 1.0);
    // quantile 1: every bit fires
    CHECK(roc.foreground.points.back().fpr == 1.0);
    CHECK(roc.foreground.points.back().tpr == 1.0);
    CHECK(roc.background.points.back().fpr == 0.0);
    CHECK(roc.background.points.back().tpr == 0.0);

    for (size_t g = 1; g < 21; g++) {
        CHECK(roc.foreground.points[g].fpr >= roc.foreground.points[g - 1].fpr);
        CHECK(roc.foreground.points[g].tpr >= roc.foreground.points[g - 1].tpr);
        CHECK(roc.background.points[g].fpr <= roc.background.points[g - 1].fpr);
        CHECK(roc.background.points[g].tpr <= roc.background.points[g - 1].tpr);
    }
    CHECK(roc.foreground.auc >= 0.0);
    CHECK(roc.foreground.auc <= 1.0);
    CHECK(roc.background.auc >= 0.0);
    CHECK(roc.background.auc <= 1.0);
    CHECK(std::isnan(roc.foreground.mean_marker.quantile));
    CHECK(roc.foreground.mean_marker.fpr >= 0.0);
    CHECK(roc.foreground.mean_marker.tpr <= 1.0);

    CHECK_THROWS_AS(detection_roc(ds, t, 1), std::invalid_argument);
    MultiViewDataset other = small_pool(0.3, 26);
    other.unlabeled.pop_back();
    CHECK_THROWS_AS(detection_roc(other, t), std::invalid_argument);
}

TEST_CASE("roc outputs handle a pool with no background samples") {
    SyntheticConfig cfg;
    cfg.per_class_count = 40;
    cfg.test_per_class = 0;
    cfg.disagreement_rate = 0.3;
    cfg.redundant_background = false;
    cfg.rng_seed = 27;
    MultiViewDataset ds = generate_synthetic(cfg);
    EntropyTable t = build_entropy_table(ds);
    DetectionRoc roc = detection_roc(ds, t, 11);
    CHECK(roc.foreground.defined);
    CHECK_FALSE(roc.background.defined);
    CHECK(roc.background.auc == 0.0);

    const char* csv = "test_roc_nobg.csv";
    write_roc_csv(roc, csv);
    std::string text = slurp(csv);
    CHECK(text.find("curve_name,threshold_quantile,fpr,tpr\n") == 0);
    CHECK(text.find("background,undefined,,\n") != std::string::npos);
    CHECK(text.find("foreground,auc,,") != std::string::npos);
    std::remove(csv);
}

TEST_CASE("roc csv and svg writers are deterministic") {
    MultiViewDataset ds = small_pool(0.5, 28);
    EntropyTable t = build_entropy_table(ds);
    DetectionRoc roc = detection_roc(ds, t, 11);

    write_roc_csv(roc, "test_roc_a.csv");
    write_roc_csv(roc, "test_roc_b.csv");
    CHECK(slurp("test_roc_a.csv") == slurp("test_roc_b.csv"));
    std::string csv = slurp("test_roc_a.csv");
    // grid rows plus one mean row and one auc row per curve
    size_t fg_rows = 0;
    for (size_t pos = csv.find("foreground,"); pos != std::string::npos;
         pos = csv.find("foreground,", pos + 1))
        fg_rows++;
    CHECK(fg_rows == 13);
    CHECK(csv.find("foreground,mean,") != std::string::npos);

    write_roc_svg(roc, "test_roc_a.svg");
    write_roc_svg(roc, "test_roc_b.svg");
    std::string svg = slurp("test_roc_a.svg");
    CHECK(svg == slurp("test_roc_b.svg"));
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("foreground (auc ") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    std::remove("test_roc_a.csv");
    std::remove("test_roc_b.csv");
    std::remove("test_roc_a.svg");
    std::remove("test_roc_b.svg");
}
