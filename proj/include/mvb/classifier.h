#pragma once
#include <vector>

namespace mvb {

// Diagonal-covariance Gaussian Bayes classifier. Background (label 0) is an
// ordinary class; the class list is kept sorted ascending so tie-breaking by
// lowest label is deterministic.
struct GaussianBayes {
    std::vector<int> classes;                 // sorted ascending
    std::vector<std::vector<double>> means;   // per class
    std::vector<std::vector<double>> vars;    // per class, floored
    std::vector<double> priors;               // sum to 1
    int dim = 0;
};

struct Prediction {
    int label;
    double confidence;  // posterior of the argmax class, in (0, 1]
};

// Per-class sample mean and variance (floored at var_floor per dimension);
// priors proportional to class counts, or uniform when uniform_priors is set.
// Throws naming the class when some requested class has no samples.
GaussianBayes fit_gaussian_bayes(const std::vector<std::vector<double>>& samples,
                                 const std::vector<int>& labels,
                                 const std::vector<int>& classes,
                                 bool uniform_priors = false, double var_floor = 1e-4);

// Posterior over classes (same order as model.classes), computed in log space.
std::vector<double> predict_proba(const GaussianBayes& model, const std::vector<double>& x);

// Argmax class with its posterior; exact ties go to the lowest class label.
Prediction predict(const GaussianBayes& model, const std::vector<double>& x);

bool classifiers_equal(const GaussianBayes& a, const GaussianBayes& b);

}  // namespace mvb
