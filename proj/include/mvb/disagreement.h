#pragma once
#include <string>
#include <vector>

#include "mvb/dataset.h"

namespace mvb {

// Conditional view entropies H(x^i | x_k^j) in nats for every ordered view
// pair over a fixed pool, plus the per-pair mean used as detection threshold.
struct EntropyTable {
    int V = 0;
    size_t M = 0;                        // pool entries per pair
    std::vector<std::vector<double>> H;  // indexed [i * V + j][k], empty for i == j
    std::vector<double> mean;            // indexed [i * V + j]

    size_t pair_index(int i, int j) const { return static_cast<size_t>(i) * V + j; }
};

enum class Verdict { RedundantForeground, RedundantBackground, ViewDisagreement };
const char* to_string(Verdict v);

struct PairVerdict {
    Verdict verdict;
    bool bit_ij;  // conditioning view j looks foreground
    bool bit_ji;  // conditioning view i looks foreground
};

// Entropy of the distribution obtained by normalizing non-negative weights,
// with 0*ln 0 = 0; an all-zero weight vector is treated as uniform (ln n).
double entropy_from_weights(const std::vector<double>& weights);

// Parallel table construction over the unlabeled pool: per-view Gaussian
// kernel matrices are precomputed once, then each conditioning sample's
// column is reduced independently. Bit-identical across thread counts.
EntropyTable build_entropy_table(const MultiViewDataset& ds);

// Same table restricted to a subset of pool indices (used when re-estimating
// thresholds mid-run).
EntropyTable build_entropy_table_subset(const MultiViewDataset& ds,
                                        const std::vector<size_t>& indices);

// Serial reference: a direct transliteration of the conditional-entropy
// definition (joint kernel sum per candidate, normalize, -sum p ln p), kept
// as an independent check of the parallel kernel.
EntropyTable build_entropy_table_reference(const MultiViewDataset& ds);

// 1 iff H[(i,j),k] lies strictly below the pair mean: the conditioning view
// x_k^j looks like foreground.
bool indicator_m(const EntropyTable& t, int i, int j, size_t k);

PairVerdict classify_pair(const EntropyTable& t, int i, int j, size_t k);

// All ordered pairs of views: redundant foreground iff every bit is 1,
// redundant background iff every bit is 0, view disagreement otherwise.
Verdict classify_sample(const EntropyTable& t, size_t k);

struct RocPoint {
    double quantile;
    double fpr;
    double tpr;
};

struct RocCurve {
    std::string name;
    bool defined = true;  // false when positives or negatives are absent
    std::vector<RocPoint> points;
    double auc = 0.0;
    RocPoint mean_marker{0.0, 0.0, 0.0};  // operating point at the mean threshold
};

struct DetectionRoc {
    RocCurve foreground;
    RocCurve background;
};

// Sweeps one quantile threshold (applied per pair to its own entropy
// distribution) across grid_points values in [0, 1]; quantile 1 maps above
// the max so every bit fires. Foreground positives: samples whose views all
// depict the same foreground class; background positives: all-background
// samples. AUC by trapezoid over the (fpr, tpr) points padded to (0,0)/(1,1).
DetectionRoc detection_roc(const MultiViewDataset& ds, const EntropyTable& t,
                           int grid_points = 101);

void write_roc_csv(const DetectionRoc& roc, const std::string& path);

// Self-contained SVG plot of both curves with the mean-threshold operating
// points marked; undefined curves are noted in the legend and not drawn.
void write_roc_svg(const DetectionRoc& roc, const std::string& path);

}  // namespace mvb
