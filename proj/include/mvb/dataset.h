#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace mvb {

// Class labels are small ints: 0 is the background class, 1..n are the
// foreground classes.
constexpr int kBackground = 0;

struct MultiViewSample {
    std::vector<std::vector<double>> views;  // V feature vectors
    std::vector<int> true_view_labels;       // what each view actually depicts
    int nominal_label = kBackground;         // intended class before corruption
};

struct SeedPair {
    std::vector<double> x;
    int label;
    bool operator==(const SeedPair&) const = default;
};

struct MultiViewDataset {
    int V = 0;
    std::vector<int> dims;      // per-view dimensionality
    int n_classes = 0;          // foreground classes; background is extra
    std::vector<std::vector<SeedPair>> seed_sets;    // per view
    std::vector<MultiViewSample> unlabeled;          // the pool U
    std::vector<std::vector<uint8_t>> unlabeled_mask;  // [view][sample], 1 = still in U^view
    std::vector<MultiViewSample> test;

    size_t pool_size() const { return unlabeled.size(); }
};

struct SyntheticConfig {
    int n_foreground_classes = 2;
    int per_class_count = 100;
    int test_per_class = 50;
    int V = 2;
    std::vector<int> dims = {2, 2};
    // class c (1-based) has mean class_sep*c in every dimension of every view
    double class_sep = 4.0;
    double class_std = 1.0;
    double background_mean = 0.0;  // every dim of every view
    double background_std = 1.0;
    double disagreement_rate = 0.0;
    bool redundant_background = true;
    uint64_t rng_seed = 1;
};

// Throws std::invalid_argument naming the offending field if the config is
// inconsistent.
void validate(const SyntheticConfig& cfg);

// Draws foreground clouds (every view from the nominal class Gaussian), an
// equal count of redundant background samples when configured, applies the
// disagreement rate, draws the disagreement-free foreground test set, and
// shuffles the pool order. Deterministic in cfg.rng_seed.
MultiViewDataset generate_synthetic(const SyntheticConfig& cfg);

// Replaces one uniformly chosen view of round(rate * m) not-yet-corrupted
// foreground pool samples (m = foreground pool count) with a fresh background
// draw, setting that view's true label to background.
void inject_view_disagreement(MultiViewDataset& ds, double rate, uint64_t rng_seed,
                              double background_std = 1.0);

// Moves per_class_seed_count uncorrupted samples per class (foreground classes
// and, when include_background_seeds, the background class) out of the pool
// into every view's seed set, labeled with their true class.
void split_labeled_unlabeled(MultiViewDataset& ds, int per_class_seed_count,
                             uint64_t rng_seed, bool include_background_seeds = true);

// JSON Lines round trip: header {"V","dims","n_classes"}, then one object per
// sample with role "seed" | "unlabeled" | "test".
void save_dataset(const MultiViewDataset& ds, const std::string& path);
MultiViewDataset load_dataset(const std::string& path);

bool datasets_equal(const MultiViewDataset& a, const MultiViewDataset& b);

}  // namespace mvb
