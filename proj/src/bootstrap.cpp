#include "mvb/bootstrap.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mvb/density.h"
#include "mvb/rng.h"

namespace mvb {

namespace {

double test_ccr_of(const GaussianBayes& model, const MultiViewDataset& ds, int view) {
    if (ds.test.empty()) return std::numeric_limits<double>::quiet_NaN();
    size_t correct = 0;
    for (const auto& s : ds.test) {
        if (predict(model, s.views[view]).label == s.nominal_label) correct++;
    }
    return static_cast<double>(correct) / static_cast<double>(ds.test.size());
}

// Shared engine for the baseline and the filtered variant. `table == nullptr`
// (or cfg.force_agree) disables the pairwise agreement test, which reduces the
// loop to plain co-training.
BootstrapResult run_engine(const MultiViewDataset& ds, const EntropyTable* table,
                           const BootstrapConfig& cfg) {
    if (cfg.N < 1) throw std::invalid_argument("bootstrap: N must be positive");
    if (cfg.T < 1) throw std::invalid_argument("bootstrap: T must be positive");
    if (table != nullptr) {
        if (table->V != ds.V || table->M != ds.pool_size())
            throw std::invalid_argument("bootstrap: entropy table does not match the pool");
    }
    for (int v = 0; v < ds.V; v++) {
        if (ds.seed_sets[v].empty())
            throw std::invalid_argument("bootstrap: view " + std::to_string(v + 1) +
                                        " has no seed samples");
    }

    const size_t M = ds.pool_size();
    std::vector<int> classes(static_cast<size_t>(ds.n_classes) + 1);
    std::iota(classes.begin(), classes.end(), 0);

    BootstrapResult res;
    res.final_seed_sets = ds.seed_sets;
    res.final_masks = ds.unlabeled_mask;
    auto& S = res.final_seed_sets;
    auto& mask = res.final_masks;

    const bool filtering = (table != nullptr) && !cfg.force_agree;

    // Optional per-iteration threshold refresh over the samples still pooled
    // in at least one view. Iteration 1 would reproduce the input table, so
    // rebuilds start at iteration 2.
    EntropyTable sub;
    std::vector<long long> pos;
    bool have_sub = false;
    auto bit = [&](int i, int j, size_t k) {
        if (have_sub && pos[k] >= 0) {
            size_t p = sub.pair_index(i, j);
            return sub.H[p][static_cast<size_t>(pos[k])] < sub.mean[p];
        }
        size_t p = table->pair_index(i, j);
        return table->H[p][k] < table->mean[p];
    };

    std::vector<std::vector<double>> fit_x;
    std::vector<int> fit_y;

    int t = 1;
    for (; t <= cfg.T; t++) {
        if (filtering && cfg.recompute_entropy && t > 1) {
            std::vector<size_t> alive;
            for (size_t k = 0; k < M; k++) {
                for (int v = 0; v < ds.V; v++) {
                    if (mask[v][k]) {
                        alive.push_back(k);
                        break;
                    }
                }
            }
            if (alive.size() >= 2) {
                sub = build_entropy_table_subset(ds, alive);
                pos.assign(M, -1);
                for (size_t p = 0; p < alive.size(); p++)
                    pos[alive[p]] = static_cast<long long>(p);
                have_sub = true;
            }
        }

        for (int i = 0; i < ds.V; i++) {
            fit_x.clear();
            fit_y.clear();
            for (const auto& sp : S[i]) {
                fit_x.push_back(sp.x);
                fit_y.push_back(sp.label);
            }
            GaussianBayes model = fit_gaussian_bayes(fit_x, fit_y, classes, cfg.uniform_priors);

            std::vector<size_t> cand;
            for (size_t k = 0; k < M; k++)
                if (mask[i][k]) cand.push_back(k);

            size_t filtered = 0;
            if (!cand.empty()) {
                std::vector<Prediction> preds(cand.size());
                for (size_t a = 0; a < cand.size(); a++)
                    preds[a] = predict(model, ds.unlabeled[cand[a]].views[i]);

                std::vector<size_t> order(cand.size());
                std::iota(order.begin(), order.end(), 0);
                std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
                    if (preds[a].confidence != preds[b].confidence)
                        return preds[a].confidence > preds[b].confidence;
                    return cand[a] < cand[b];
                });

                std::vector<size_t> sel;
                if (cfg.balance_classes) {
                    size_t quota = static_cast<size_t>(cfg.N) / classes.size();
                    std::vector<size_t> taken(classes.size(), 0);
                    for (size_t a : order) {
                        size_t lab = static_cast<size_t>(preds[a].label);
                        if (taken[lab] < quota) {
                            sel.push_back(a);
                            taken[lab]++;
                        }
                    }
                } else {
                    size_t n = std::min(static_cast<size_t>(cfg.N), order.size());
                    sel.assign(order.begin(), order.begin() + static_cast<long>(n));
                }

                for (size_t a : sel) {
                    size_t k = cand[a];
                    int ylab = preds[a].label;
                    for (int j = 0; j < ds.V; j++) {
                        if (j == i) continue;
                        bool agree = !filtering || (bit(i, j, k) == bit(j, i, k));
                        if (agree) {
                            if (mask[j][k]) {
                                mask[j][k] = 0;
                                S[j].push_back({ds.unlabeled[k].views[j], ylab});
                            }
                        } else {
                            filtered++;
                        }
                    }
                    mask[i][k] = 0;
                }
                for (size_t a : sel)
                    S[i].push_back({ds.unlabeled[cand[a]].views[i], preds[a].label});
            }

            size_t remaining = 0;
            for (size_t k = 0; k < M; k++) remaining += mask[i][k] ? 1 : 0;
            res.trace.rows.push_back({t, i, S[i].size(), remaining,
                                      test_ccr_of(model, ds, i), filtered});
        }

        bool any_left = false;
        for (int v = 0; v < ds.V && !any_left; v++)
            for (size_t k = 0; k < M; k++)
                if (mask[v][k]) {
                    any_left = true;
                    break;
                }
        if (!any_left) break;
    }
    res.iterations = std::min(t, cfg.T);

    for (int v = 0; v < ds.V; v++) {
        fit_x.clear();
        fit_y.clear();
        for (const auto& sp : S[v]) {
            fit_x.push_back(sp.x);
            fit_y.push_back(sp.label);
        }
        res.classifiers.push_back(fit_gaussian_bayes(fit_x, fit_y, classes, cfg.uniform_priors));
    }
    return res;
}

}  // namespace

BootstrapResult cotrain_baseline(const MultiViewDataset& ds, const BootstrapConfig& cfg) {
    return run_engine(ds, nullptr, cfg);
}

BootstrapResult multiview_bootstrap(const MultiViewDataset& ds, const EntropyTable& table,
                                    const BootstrapConfig& cfg) {
    return run_engine(ds, &table, cfg);
}

CrossModalResult cross_modality_bootstrap(const std::vector<std::pair<int, double>>& strong_labels,
                                          const std::vector<std::vector<double>>& weak_view_samples,
                                          size_t N, bool use_filter, bool uniform_priors) {
    const size_t U = strong_labels.size();
    if (weak_view_samples.size() != U)
        throw std::invalid_argument("cross-modality: label list and sample list differ in length");
    if (N < 2 || N > U)
        throw std::invalid_argument("cross-modality: N must be between 2 and the pool size");

    std::vector<size_t> order(U);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (strong_labels[a].second != strong_labels[b].second)
            return strong_labels[a].second > strong_labels[b].second;
        return a < b;
    });
    order.resize(N);

    std::vector<std::vector<double>> X;
    std::vector<int> y;
    for (size_t k : order) {
        X.push_back(weak_view_samples[k]);
        y.push_back(strong_labels[k].first);
    }

    std::vector<int> classes_in;
    for (int lab : y)
        if (std::find(classes_in.begin(), classes_in.end(), lab) == classes_in.end())
            classes_in.push_back(lab);
    std::sort(classes_in.begin(), classes_in.end());

    // One shared per-dimension bandwidth over all weak-view features of L;
    // per-class scores are count-weighted kernel sums, so the posterior folds
    // class frequency in without an explicit prior term.
    std::vector<double> h = silverman_bandwidth(X);
    const size_t D = h.size();

    std::vector<std::vector<size_t>> groups(classes_in.size());
    for (size_t a = 0; a < y.size(); a++) {
        size_t c = static_cast<size_t>(
            std::find(classes_in.begin(), classes_in.end(), y[a]) - classes_in.begin());
        groups[c].push_back(a);
    }

    CrossModalResult res;
    std::vector<double> logf(classes_in.size());
    std::vector<double> w(classes_in.size());
    for (size_t a = 0; a < order.size(); a++) {
        const auto& x = X[a];
        if (x.size() != D)
            throw std::invalid_argument("cross-modality: inconsistent sample dimension");
        for (size_t c = 0; c < classes_in.size(); c++) {
            double mx = -std::numeric_limits<double>::infinity();
            std::vector<double> es;
            es.reserve(groups[c].size());
            for (size_t b : groups[c]) {
                double e = 0.0;
                for (size_t d = 0; d < D; d++) {
                    double diff = x[d] - X[b][d];
                    e -= diff * diff / (2.0 * h[d] * h[d]);
                }
                es.push_back(e);
                mx = std::max(mx, e);
            }
            double s = 0.0;
            for (double e : es) s += std::exp(e - mx);
            logf[c] = mx + std::log(s);
        }
        size_t best = 0;
        for (size_t c = 1; c < classes_in.size(); c++)
            if (logf[c] > logf[best]) best = c;

        double mx = *std::max_element(logf.begin(), logf.end());
        for (size_t c = 0; c < logf.size(); c++) w[c] = std::exp(logf[c] - mx);
        double h1 = entropy_from_weights(w);

        bool b1 = classes_in[best] != kBackground;
        bool b2 = y[a] != kBackground;
        bool kept = !use_filter || (b1 == b2);
        res.report.rows.push_back({order[a], y[a], b1, b2, kept, h1});
        if (kept)
            res.report.kept_count++;
        else
            res.report.filtered_count++;
    }

    std::vector<std::vector<double>> Sx;
    std::vector<int> Sy;
    for (size_t a = 0; a < order.size(); a++) {
        if (res.report.rows[a].kept) {
            Sx.push_back(X[a]);
            Sy.push_back(y[a]);
        }
    }

    for (int lab : classes_in) {
        if (std::find(Sy.begin(), Sy.end(), lab) == Sy.end())
            throw std::runtime_error("cross-modality: class " + std::to_string(lab) +
                                     " lost every pair to the filter");
    }
    bool any_fg = false;
    for (int lab : Sy)
        if (lab != kBackground) any_fg = true;
    if (!any_fg)
        throw std::runtime_error(
            "cross-modality: no foreground pairs survive; cannot train a classifier");

    std::vector<int> fit_classes;
    for (int lab : Sy)
        if (std::find(fit_classes.begin(), fit_classes.end(), lab) == fit_classes.end())
            fit_classes.push_back(lab);
    std::sort(fit_classes.begin(), fit_classes.end());
    res.classifier = fit_gaussian_bayes(Sx, Sy, fit_classes, uniform_priors);
    return res;
}

void write_trace_csv(const BootstrapTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "iteration,view,labeled_size,unlabeled_size,test_ccr,pairs_filtered\n";
    for (const auto& r : trace.rows) {
        out << r.iteration << ',' << (r.view + 1) << ',' << r.labeled_size << ','
            << r.unlabeled_size << ',' << fmt_double(r.test_ccr) << ',' << r.pairs_filtered
            << '\n';
    }
}

void write_crossmodal_csv(const CrossModalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "sample_index,label,feature_bit,label_bit,kept,h_label_given_feature\n";
    for (const auto& r : report.rows) {
        out << r.index << ',' << r.label << ',' << (r.feature_bit ? 1 : 0) << ','
            << (r.label_bit ? 1 : 0) << ',' << (r.kept ? 1 : 0) << ','
            << fmt_double(r.h_label_given_feature) << '\n';
    }
}

}  // namespace mvb
