#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "mvb/bootstrap.h"
#include "mvb/dataset.h"

namespace mvb {

// Fraction of positions where predictions[i] == truths[i].
double ccr(const std::vector<int>& predictions, const std::vector<int>& truths);

struct TrialOptions {
    SyntheticConfig data;  // geometry; disagreement_rate and rng_seed are set per trial
    BootstrapConfig boot;
    int seeds_per_class = 5;
    bool include_background_seeds = true;
    double label_noise = 0.1;  // strong-view label noise for the cross-modality methods
};

struct TrialResult {
    std::string method;
    double disagreement_rate = 0.0;
    uint64_t rng_seed = 0;
    std::vector<double> view_ccr;  // per view; NaN where the method trains no classifier
    double foreground_auc = 0.0;   // NaN when detection does not apply
    double background_auc = 0.0;
    double wall_seconds = 0.0;  // never serialized: timing would break byte-identical reruns
    bool failed = false;
    std::string failure_reason;
};

// Strong-view oracle labels for the cross-modality methods: each pool entry's
// view-1 true class, with probability `noise` replaced by a uniformly chosen
// other class. Confidence is 1 for every pair.
std::vector<std::pair<int, double>> noisy_strong_labels(const MultiViewDataset& ds, double noise,
                                                        uint64_t seed);

// Methods: "baseline" (plain co-training), "filtered" (disagreement-filtered
// bootstrapping), "crossmodal" (strong-view labels train the weak view through
// the pairwise filter), "crossmodal_unfiltered" (same with the filter off).
// One trial: generate with the given rate and seed, split (split seed derived
// from the trial seed), build the entropy table, run the learner, score CCR on
// the clean test set per view plus the detection AUCs.
TrialResult run_trial(const std::string& method, const TrialOptions& opt,
                      double disagreement_rate, uint64_t seed);

struct SweepCell {
    std::string method;
    double rate;
    int view;  // 0-based internally; printed 1-based
    double mean_ccr;
    double std_ccr;
    size_t trials;  // requested minus failures
};

struct SweepResult {
    std::vector<std::string> methods;
    std::vector<double> rates;
    int trials_requested = 0;
    std::vector<TrialResult> trials;  // ordered by (method, rate, trial index)
    std::vector<SweepCell> cells;
};

// Trials are seeded base_seed + trial index (the same seeds across cells, so
// methods are compared on identical datasets) and run in parallel; jobs <= 0
// means use all cores. Failed trials are recorded, not dropped.
SweepResult run_sweep(const std::vector<std::string>& methods, const std::vector<double>& rates,
                      int trials_per_point, uint64_t base_seed, const TrialOptions& opt,
                      int jobs = 0);

void write_sweep_csv(const SweepResult& sweep, const std::string& path);
void write_trials_csv(const SweepResult& sweep, const std::string& path);
void write_sweep_svg(const SweepResult& sweep, const std::string& path);

}  // namespace mvb
