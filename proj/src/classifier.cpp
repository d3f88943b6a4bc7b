#include "mvb/classifier.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mvb {

GaussianBayes fit_gaussian_bayes(const std::vector<std::vector<double>>& samples,
                                 const std::vector<int>& labels,
                                 const std::vector<int>& classes, bool uniform_priors,
                                 double var_floor) {
    if (samples.size() != labels.size() || samples.empty())
        throw std::invalid_argument("fit: samples and labels must be non-empty and aligned");
    if (classes.size() < 2) throw std::invalid_argument("fit: need at least 2 classes");
    GaussianBayes model;
    model.classes = classes;
    std::sort(model.classes.begin(), model.classes.end());
    model.dim = static_cast<int>(samples[0].size());
    size_t total = samples.size();
    for (int c : model.classes) {
        std::vector<double> mean(model.dim, 0.0), var(model.dim, 0.0);
        size_t n = 0;
        for (size_t s = 0; s < samples.size(); ++s) {
            if (labels[s] != c) continue;
            if (static_cast<int>(samples[s].size()) != model.dim)
                throw std::invalid_argument("fit: sample dimension mismatch");
            ++n;
            for (int d = 0; d < model.dim; ++d) mean[d] += samples[s][d];
        }
        if (n == 0)
            throw std::runtime_error("fit: class " + std::to_string(c) + " has no samples");
        for (int d = 0; d < model.dim; ++d) mean[d] /= static_cast<double>(n);
        for (size_t s = 0; s < samples.size(); ++s) {
            if (labels[s] != c) continue;
            for (int d = 0; d < model.dim; ++d) {
                double z = samples[s][d] - mean[d];
                var[d] += z * z;
            }
        }
        for (int d = 0; d < model.dim; ++d)
            var[d] = std::max(var[d] / static_cast<double>(n), var_floor);
        model.means.push_back(std::move(mean));
        model.vars.push_back(std::move(var));
        model.priors.push_back(uniform_priors
                                   ? 1.0 / static_cast<double>(model.classes.size())
                                   : static_cast<double>(n) / static_cast<double>(total));
    }
    return model;
}

std::vector<double> predict_proba(const GaussianBayes& model, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != model.dim)
        throw std::invalid_argument("predict: dimension mismatch");
    size_t C = model.classes.size();
    std::vector<double> logp(C);
    for (size_t c = 0; c < C; ++c) {
        double s = std::log(model.priors[c]);
        for (int d = 0; d < model.dim; ++d) {
            double v = model.vars[c][d];
            double z = x[d] - model.means[c][d];
            s += -0.5 * std::log(2.0 * std::numbers::pi * v) - z * z / (2.0 * v);
        }
        logp[c] = s;
    }
    double mx = *std::max_element(logp.begin(), logp.end());
    double Z = 0.0;
    for (double s : logp) Z += std::exp(s - mx);
    std::vector<double> post(C);
    for (size_t c = 0; c < C; ++c) post[c] = std::exp(logp[c] - mx) / Z;
    return post;
}

Prediction predict(const GaussianBayes& model, const std::vector<double>& x) {
    std::vector<double> post = predict_proba(model, x);
    size_t best = 0;
    for (size_t c = 1; c < post.size(); ++c)
        if (post[c] > post[best]) best = c;  // ties keep the lower class label
    return {model.classes[best], post[best]};
}

bool classifiers_equal(const GaussianBayes& a, const GaussianBayes& b) {
    return a.classes == b.classes && a.means == b.means && a.vars == b.vars &&
           a.priors == b.priors && a.dim == b.dim;
}

}  // namespace mvb
