#include "mvb/density.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mvb {

std::vector<double> silverman_bandwidth(const std::vector<std::vector<double>>& points) {
    size_t M = points.size();
    if (M < 2) throw std::invalid_argument("silverman_bandwidth: need at least 2 points");
    size_t D = points[0].size();
    std::vector<double> h(D);
    double factor = std::pow(4.0 / (3.0 * static_cast<double>(M)), 0.2);
    for (size_t d = 0; d < D; ++d) {
        double mean = 0.0;
        for (const auto& p : points) mean += p[d];
        mean /= static_cast<double>(M);
        double ss = 0.0;
        for (const auto& p : points) ss += (p[d] - mean) * (p[d] - mean);
        double sd = std::sqrt(ss / static_cast<double>(M - 1));
        h[d] = sd == 0.0 ? 1e-3 * (1.0 + std::fabs(mean)) : sd * factor;
    }
    return h;
}

KdeModel make_kde(std::vector<std::vector<double>> points) {
    KdeModel m;
    m.bandwidths = silverman_bandwidth(points);
    m.points = std::move(points);
    return m;
}

double kde_eval(const KdeModel& model, const std::vector<double>& x) {
    if (model.points.empty()) throw std::invalid_argument("kde_eval: empty model");
    size_t D = model.bandwidths.size();
    if (x.size() != D) throw std::invalid_argument("kde_eval: dimension mismatch");
    double norm = 1.0;
    for (double h : model.bandwidths) norm /= h * std::sqrt(2.0 * std::numbers::pi);
    double sum = 0.0;
    for (const auto& p : model.points) {
        double e = 0.0;
        for (size_t d = 0; d < D; ++d) {
            double z = (x[d] - p[d]) / model.bandwidths[d];
            e += z * z;
        }
        sum += std::exp(-0.5 * e);
    }
    return norm * sum / static_cast<double>(model.points.size());
}

std::vector<double> conditional_distribution(const KdeModel& joint,
                                             const std::vector<std::vector<double>>& U_i,
                                             const std::vector<double>& x_j) {
    if (U_i.empty())
        throw std::invalid_argument("conditional_distribution: empty candidate set");
    size_t di = U_i[0].size();
    size_t dj = x_j.size();
    if (joint.bandwidths.size() != di + dj)
        throw std::invalid_argument("conditional_distribution: dimension mismatch");
    std::vector<double> w(U_i.size());
    std::vector<double> q(di + dj);
    for (size_t d = 0; d < dj; ++d) q[di + d] = x_j[d];
    for (size_t a = 0; a < U_i.size(); ++a) {
        if (U_i[a].size() != di)
            throw std::invalid_argument("conditional_distribution: candidate dimension mismatch");
        for (size_t d = 0; d < di; ++d) q[d] = U_i[a][d];
        w[a] = kde_eval(joint, q);
    }
    double total = 0.0;
    for (double v : w) total += v;
    if (total <= 0.0) {
        // fully underflowed: an uninformative (uniform) conditional
        double u = 1.0 / static_cast<double>(w.size());
        for (double& v : w) v = u;
        return w;
    }
    for (double& v : w) v /= total;
    return w;
}

double conditional_prob(const KdeModel& joint, const std::vector<std::vector<double>>& U_i,
                        const std::vector<double>& x_i, const std::vector<double>& x_j) {
    std::vector<double> p = conditional_distribution(joint, U_i, x_j);
    // x_i must be one of the candidates; find its (first) position
    for (size_t a = 0; a < U_i.size(); ++a)
        if (U_i[a] == x_i) return p[a];
    throw std::invalid_argument("conditional_prob: x_i is not in the candidate set");
}

}  // namespace mvb
