#include <cmath>
#include <stdexcept>
#include <vector>

#include "mvb/density.h"
#include "mvb/disagreement.h"

namespace mvb {

// Serial reference table: evaluates the joint kernel sum directly for every
// (candidate, conditioning sample) entry without any precomputed matrices.
// Kept deliberately naive as an independent cross-check of the fast kernel.
EntropyTable build_entropy_table_reference(const MultiViewDataset& ds) {
    size_t M = ds.unlabeled.size();
    if (M < 2) throw std::runtime_error("entropy table: pool has fewer than 2 samples");
    std::vector<std::vector<std::vector<double>>> X(ds.V);
    for (int v = 0; v < ds.V; ++v) {
        X[v].reserve(M);
        for (const auto& s : ds.unlabeled) X[v].push_back(s.views[v]);
    }
    EntropyTable t;
    t.V = ds.V;
    t.M = M;
    t.H.assign(static_cast<size_t>(ds.V) * ds.V, {});
    t.mean.assign(static_cast<size_t>(ds.V) * ds.V, 0.0);
    for (int i = 0; i < ds.V; ++i) {
        for (int j = 0; j < ds.V; ++j) {
            if (i == j) continue;
            std::vector<double> hi = silverman_bandwidth(X[i]);
            std::vector<double> hj = silverman_bandwidth(X[j]);
            std::vector<double>& H = t.H[t.pair_index(i, j)];
            H.assign(M, 0.0);
            std::vector<double> w(M);
            for (size_t k = 0; k < M; ++k) {
                for (size_t a = 0; a < M; ++a) {
                    double s = 0.0;
                    for (size_t m = 0; m < M; ++m) {
                        double e = 0.0;
                        for (size_t d = 0; d < hi.size(); ++d) {
                            double z = X[i][a][d] - X[i][m][d];
                            e += z * z / (2.0 * hi[d] * hi[d]);
                        }
                        for (size_t d = 0; d < hj.size(); ++d) {
                            double z = X[j][k][d] - X[j][m][d];
                            e += z * z / (2.0 * hj[d] * hj[d]);
                        }
                        s += std::exp(-e);
                    }
                    w[a] = s;
                }
                H[k] = entropy_from_weights(w);
            }
            double sum = 0.0;
            for (double h : H) sum += h;
            t.mean[t.pair_index(i, j)] = sum / static_cast<double>(M);
        }
    }
    return t;
}

}  // namespace mvb
