#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mvb/classifier.h"
#include "mvb/dataset.h"
#include "mvb/disagreement.h"

namespace mvb {

struct BootstrapConfig {
    int N = 6;                      // samples labeled per classifier per iteration
    int T = 100;                    // max iterations
    bool balance_classes = true;    // quota floor(N / #classes) per predicted class
    bool recompute_entropy = false; // re-estimate thresholds over the shrinking pool
    bool uniform_priors = false;
    // Diagnostic knob: treat every view pair as agreeing (all indicator bits
    // 1), which turns the filtered loop into plain co-training.
    bool force_agree = false;
};

struct TraceRow {
    int iteration;          // 1-based
    int view;               // 0-based internally; printed 1-based
    size_t labeled_size;    // |S_view| after this view's pass
    size_t unlabeled_size;  // remaining pool entries in this view
    double test_ccr;        // of the classifier trained at the pass start
    size_t pairs_filtered;  // cross-label additions blocked during the pass
};

struct BootstrapTrace {
    std::vector<TraceRow> rows;
};

struct BootstrapResult {
    std::vector<GaussianBayes> classifiers;  // refit on the final labeled sets
    BootstrapTrace trace;
    int iterations = 0;  // full iterations executed
    std::vector<std::vector<SeedPair>> final_seed_sets;
    std::vector<std::vector<uint8_t>> final_masks;
};

// Conventional co-training: every confident prediction labels the other views
// unconditionally. Identical engine to multiview_bootstrap with the
// disagreement filter disabled.
BootstrapResult cotrain_baseline(const MultiViewDataset& ds, const BootstrapConfig& cfg);

// Filtered multi-view bootstrapping: per iteration and view, train on the
// labeled set, take the top-N confident pool samples (optionally class
// balanced, ties broken by pool index), self-train on them, and label them
// into the other views only when the pairwise disagreement test passes.
BootstrapResult multiview_bootstrap(const MultiViewDataset& ds, const EntropyTable& table,
                                    const BootstrapConfig& cfg);

struct CrossModalRow {
    size_t index;       // position in the unlabeled pool
    int label;          // strong-view label for this pair
    bool feature_bit;   // weak-view features look foreground (MAP class != background)
    bool label_bit;     // label is a foreground class
    bool kept;          // survived the xor agreement test
    double h_label_given_feature;  // entropy of the label posterior, nats
};

struct CrossModalReport {
    std::vector<CrossModalRow> rows;  // in confidence order (the order L was taken)
    size_t kept_count = 0;
    size_t filtered_count = 0;
};

struct CrossModalResult {
    GaussianBayes classifier;
    CrossModalReport report;
};

// Cross-modality bootstrapping: labels from a strong view (with confidences)
// train a weak-view classifier. The top-N confident pairs form L; a pair is
// kept when its two foreground indicators agree: the label posterior
// p(y | x) under count-weighted per-class Gaussian kernels (one shared
// per-dimension bandwidth over all weak features of L) MAPs to a foreground
// class iff the label itself is foreground. Throws when every label is
// background or when a class present in L loses all its pairs to the filter.
CrossModalResult cross_modality_bootstrap(
    const std::vector<std::pair<int, double>>& strong_labels,
    const std::vector<std::vector<double>>& weak_view_samples, size_t N,
    bool use_filter = true, bool uniform_priors = false);

void write_trace_csv(const BootstrapTrace& trace, const std::string& path);
void write_crossmodal_csv(const CrossModalReport& report, const std::string& path);

}  // namespace mvb
