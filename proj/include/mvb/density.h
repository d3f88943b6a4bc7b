#pragma once
#include <vector>

namespace mvb {

// Gaussian-product KDE over a fixed set of reference points with one
// bandwidth per dimension. Immutable after construction; evaluation is
// read-only and thread-safe.
struct KdeModel {
    std::vector<std::vector<double>> points;  // M reference vectors
    std::vector<double> bandwidths;           // h_d > 0 per dimension
};

// Per-dimension univariate Silverman rule: h_d = sigma_d * (4/(3M))^(1/5)
// with sample (ddof 1) standard deviation; degenerate sigma_d = 0 floors to
// 1e-3 * (1 + |mean_d|). Requires at least 2 points.
std::vector<double> silverman_bandwidth(const std::vector<std::vector<double>>& points);

KdeModel make_kde(std::vector<std::vector<double>> points);

// Mean of product-Gaussian kernels centered at the reference points;
// strictly positive intent, but may underflow to 0 far from all points.
double kde_eval(const KdeModel& model, const std::vector<double>& x);

// Conditional probability of candidate x_i among candidates U_i given x_j,
// under the joint KDE built over concatenated (view-i, view-j) vectors:
// f([x_i; x_j]) normalized over all candidates. A fully underflowed
// normalizer falls back to the uniform 1/|U_i|.
double conditional_prob(const KdeModel& joint, const std::vector<std::vector<double>>& U_i,
                        const std::vector<double>& x_i, const std::vector<double>& x_j);

// The full conditional distribution over U_i given x_j (same fallback).
std::vector<double> conditional_distribution(const KdeModel& joint,
                                             const std::vector<std::vector<double>>& U_i,
                                             const std::vector<double>& x_j);

}  // namespace mvb
