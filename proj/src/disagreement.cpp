#include "mvb/disagreement.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "mvb/density.h"
#include "mvb/rng.h"

namespace mvb {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::RedundantForeground: return "redundant_foreground";
        case Verdict::RedundantBackground: return "redundant_background";
        default: return "view_disagreement";
    }
}

double entropy_from_weights(const std::vector<double>& weights) {
    if (weights.empty()) throw std::invalid_argument("entropy_from_weights: empty");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("entropy_from_weights: negative weight");
        total += w;
    }
    if (total <= 0.0)  // uninformative conditional: maximal entropy
        return std::log(static_cast<double>(weights.size()));
    double h = 0.0;
    for (double w : weights) {
        if (w == 0.0) continue;
        double p = w / total;
        h -= p * std::log(p);
    }
    return h;
}

namespace {

void check_pair(const EntropyTable& t, int i, int j, size_t k) {
    if (i < 0 || j < 0 || i >= t.V || j >= t.V || i == j)
        throw std::out_of_range("entropy table: no such view pair");
    if (k >= t.M) throw std::out_of_range("entropy table: sample index out of range");
}

// Gaussian kernel matrix for one view over the given pool rows:
// W[a][m] = exp(-sum_d (x_a_d - x_m_d)^2 / (2 h_d^2)).
std::vector<std::vector<double>> kernel_matrix(const std::vector<std::vector<double>>& X,
                                               const std::vector<double>& h) {
    size_t M = X.size();
    size_t D = h.size();
    std::vector<std::vector<double>> W(M, std::vector<double>(M));
#pragma omp parallel for schedule(static)
    for (long long a = 0; a < static_cast<long long>(M); ++a) {
        for (size_t m = 0; m < M; ++m) {
            double e = 0.0;
            for (size_t d = 0; d < D; ++d) {
                double z = X[a][d] - X[m][d];
                e += z * z / (2.0 * h[d] * h[d]);
            }
            W[a][m] = std::exp(-e);
        }
    }
    return W;
}

std::vector<std::vector<std::vector<double>>> pool_views(const MultiViewDataset& ds,
                                                         const std::vector<size_t>& idx) {
    std::vector<std::vector<std::vector<double>>> X(ds.V);
    for (int v = 0; v < ds.V; ++v) {
        X[v].reserve(idx.size());
        for (size_t k : idx) X[v].push_back(ds.unlabeled[k].views[v]);
    }
    return X;
}

EntropyTable build_impl(const MultiViewDataset& ds, const std::vector<size_t>& idx) {
    size_t M = idx.size();
    if (M < 2) throw std::runtime_error("entropy table: pool has fewer than 2 samples");
    auto X = pool_views(ds, idx);
    EntropyTable t;
    t.V = ds.V;
    t.M = M;
    t.H.assign(static_cast<size_t>(ds.V) * ds.V, {});
    t.mean.assign(static_cast<size_t>(ds.V) * ds.V, 0.0);

    std::vector<std::vector<std::vector<double>>> W(ds.V);
    for (int v = 0; v < ds.V; ++v) W[v] = kernel_matrix(X[v], silverman_bandwidth(X[v]));

    for (int i = 0; i < ds.V; ++i) {
        for (int j = 0; j < ds.V; ++j) {
            if (i == j) continue;
            std::vector<double>& H = t.H[t.pair_index(i, j)];
            H.assign(M, 0.0);
#pragma omp parallel for schedule(static)
            for (long long k = 0; k < static_cast<long long>(M); ++k) {
                std::vector<double> w(M);
                for (size_t a = 0; a < M; ++a) {
                    double s = 0.0;
                    const std::vector<double>& wi = W[i][a];
                    const std::vector<double>& wj = W[j][k];
                    for (size_t m = 0; m < M; ++m) s += wi[m] * wj[m];
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

}  // namespace

EntropyTable build_entropy_table(const MultiViewDataset& ds) {
    if (ds.unlabeled.empty()) throw std::runtime_error("entropy table: empty unlabeled pool");
    std::vector<size_t> idx(ds.unlabeled.size());
    for (size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    return build_impl(ds, idx);
}

EntropyTable build_entropy_table_subset(const MultiViewDataset& ds,
                                        const std::vector<size_t>& indices) {
    return build_impl(ds, indices);
}

bool indicator_m(const EntropyTable& t, int i, int j, size_t k) {
    check_pair(t, i, j, k);
    return t.H[t.pair_index(i, j)][k] < t.mean[t.pair_index(i, j)];
}

PairVerdict classify_pair(const EntropyTable& t, int i, int j, size_t k) {
    PairVerdict pv{};
    pv.bit_ij = indicator_m(t, i, j, k);
    pv.bit_ji = indicator_m(t, j, i, k);
    if (pv.bit_ij && pv.bit_ji)
        pv.verdict = Verdict::RedundantForeground;
    else if (!pv.bit_ij && !pv.bit_ji)
        pv.verdict = Verdict::RedundantBackground;
    else
        pv.verdict = Verdict::ViewDisagreement;
    return pv;
}

Verdict classify_sample(const EntropyTable& t, size_t k) {
    bool all = true, none = true;
    for (int i = 0; i < t.V; ++i) {
        for (int j = 0; j < t.V; ++j) {
            if (i == j) continue;
            bool b = indicator_m(t, i, j, k);
            all = all && b;
            none = none && !b;
        }
    }
    if (all) return Verdict::RedundantForeground;
    if (none) return Verdict::RedundantBackground;
    return Verdict::ViewDisagreement;
}

namespace {

// linear-interpolation quantile over a copy of the values
double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    if (v.size() == 1) return v[0];
    double pos = q * static_cast<double>(v.size() - 1);
    size_t lo = static_cast<size_t>(pos);
    if (lo + 1 >= v.size()) return v.back();
    double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

double trapezoid_auc(std::vector<RocPoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const RocPoint& a, const RocPoint& b) {
        return a.fpr != b.fpr ? a.fpr < b.fpr : a.tpr < b.tpr;
    });
    std::vector<double> x, y;
    if (pts.empty() || pts.front().fpr > 0.0) {
        x.push_back(0.0);
        y.push_back(0.0);
    }
    for (const auto& p : pts) {
        x.push_back(p.fpr);
        y.push_back(p.tpr);
    }
    if (x.back() < 1.0) {
        x.push_back(1.0);
        y.push_back(1.0);
    }
    double auc = 0.0;
    for (size_t a = 1; a < x.size(); ++a)
        auc += (x[a] - x[a - 1]) * (y[a] + y[a - 1]) * 0.5;
    return auc;
}

}  // namespace

DetectionRoc detection_roc(const MultiViewDataset& ds, const EntropyTable& t,
                           int grid_points) {
    if (grid_points < 2) throw std::invalid_argument("detection_roc: need >= 2 grid points");
    size_t M = t.M;
    if (ds.unlabeled.size() != M)
        throw std::invalid_argument("detection_roc: table does not match dataset pool");
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < t.V; ++i)
        for (int j = 0; j < t.V; ++j)
            if (i != j) pairs.emplace_back(i, j);

    std::vector<uint8_t> truth_fg(M), truth_bg(M);
    for (size_t k = 0; k < M; ++k) {
        const auto& tl = ds.unlabeled[k].true_view_labels;
        bool same = true;
        for (int v = 1; v < ds.V; ++v)
            if (tl[v] != tl[0]) same = false;
        truth_fg[k] = same && tl[0] != kBackground;
        truth_bg[k] = same && tl[0] == kBackground;
    }

    DetectionRoc roc;
    roc.foreground.name = "foreground";
    roc.background.name = "background";
    size_t Pf = 0, Pb = 0;
    for (size_t k = 0; k < M; ++k) {
        Pf += truth_fg[k];
        Pb += truth_bg[k];
    }
    roc.foreground.defined = Pf > 0 && Pf < M;
    roc.background.defined = Pb > 0 && Pb < M;

    auto rates = [&](const std::vector<uint8_t>& pred, const std::vector<uint8_t>& truth,
                     size_t P) -> std::pair<double, double> {
        size_t tp = 0, fp = 0;
        for (size_t k = 0; k < M; ++k) {
            if (pred[k] && truth[k]) ++tp;
            if (pred[k] && !truth[k]) ++fp;
        }
        size_t N = M - P;
        return {N ? static_cast<double>(fp) / N : 0.0, P ? static_cast<double>(tp) / P : 0.0};
    };

    auto verdicts_at = [&](const std::vector<std::vector<uint8_t>>& bits)
        -> std::pair<std::vector<uint8_t>, std::vector<uint8_t>> {
        std::vector<uint8_t> rf(M, 1), rb(M, 1);
        for (size_t p = 0; p < pairs.size(); ++p)
            for (size_t k = 0; k < M; ++k) {
                rf[k] = rf[k] && bits[p][k];
                rb[k] = rb[k] && !bits[p][k];
            }
        return {rf, rb};
    };

    for (int g = 0; g < grid_points; ++g) {
        double q = static_cast<double>(g) / (grid_points - 1);
        std::vector<std::vector<uint8_t>> bits(pairs.size(), std::vector<uint8_t>(M));
        for (size_t p = 0; p < pairs.size(); ++p) {
            const auto& H = t.H[t.pair_index(pairs[p].first, pairs[p].second)];
            double thr = q >= 1.0 ? std::numeric_limits<double>::infinity() : quantile(H, q);
            for (size_t k = 0; k < M; ++k) bits[p][k] = H[k] < thr;
        }
        auto [rf, rb] = verdicts_at(bits);
        auto [ffpr, ftpr] = rates(rf, truth_fg, Pf);
        auto [bfpr, btpr] = rates(rb, truth_bg, Pb);
        roc.foreground.points.push_back({q, ffpr, ftpr});
        roc.background.points.push_back({q, bfpr, btpr});
    }

    // operating point at the actual mean thresholds
    {
        std::vector<std::vector<uint8_t>> bits(pairs.size(), std::vector<uint8_t>(M));
        for (size_t p = 0; p < pairs.size(); ++p)
            for (size_t k = 0; k < M; ++k)
                bits[p][k] = indicator_m(t, pairs[p].first, pairs[p].second, k);
        auto [rf, rb] = verdicts_at(bits);
        auto [ffpr, ftpr] = rates(rf, truth_fg, Pf);
        auto [bfpr, btpr] = rates(rb, truth_bg, Pb);
        roc.foreground.mean_marker = {std::numeric_limits<double>::quiet_NaN(), ffpr, ftpr};
        roc.background.mean_marker = {std::numeric_limits<double>::quiet_NaN(), bfpr, btpr};
    }

    if (roc.foreground.defined) roc.foreground.auc = trapezoid_auc(roc.foreground.points);
    if (roc.background.defined) roc.background.auc = trapezoid_auc(roc.background.points);
    return roc;
}

void write_roc_csv(const DetectionRoc& roc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("roc csv: cannot open " + path);
    out << "curve_name,threshold_quantile,fpr,tpr\n";
    for (const RocCurve* c : {&roc.foreground, &roc.background}) {
        if (!c->defined) {
            out << c->name << ",undefined,,\n";
            continue;
        }
        for (const auto& p : c->points)
            out << c->name << "," << fmt_double(p.quantile) << "," << fmt_double(p.fpr)
                << "," << fmt_double(p.tpr) << "\n";
        out << c->name << ",mean," << fmt_double(c->mean_marker.fpr) << ","
            << fmt_double(c->mean_marker.tpr) << "\n";
        out << c->name << ",auc,," << fmt_double(c->auc) << "\n";
    }
    if (!out) throw std::runtime_error("roc csv: write failed for " + path);
}

void write_roc_svg(const DetectionRoc& roc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("roc svg: cannot open " + path);

    const double W = 520, H = 520;
    const double L = 60, R = W - 24, T = 40, B = H - 56;
    auto r2 = [](double v) { return std::round(v * 100.0) / 100.0; };
    auto xpos = [&](double fpr) { return r2(L + fpr * (R - L)); };
    auto ypos = [&](double tpr) { return r2(T + (1.0 - tpr) * (B - T)); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << fmt_double(r2((L + R) / 2)) << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">disagreement detection ROC</text>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << B << "\" x2=\"" << R << "\" y2=\"" << B
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << B
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; i++) {
        double v = i * 0.25;
        out << "<text x=\"" << L - 8 << "\" y=\"" << fmt_double(r2(ypos(v) + 4))
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt_double(v) << "</text>\n";
        out << "<text x=\"" << fmt_double(xpos(v)) << "\" y=\"" << B + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt_double(v) << "</text>\n";
    }
    out << "<text x=\"" << fmt_double(r2((L + R) / 2)) << "\" y=\"" << H - 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
           "false positive rate</text>\n";
    out << "<line x1=\"" << fmt_double(xpos(0)) << "\" y1=\"" << fmt_double(ypos(0)) << "\" x2=\""
        << fmt_double(xpos(1)) << "\" y2=\"" << fmt_double(ypos(1))
        << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4,4\"/>\n";

    const char* colors[2] = {"#1b6ca8", "#c0392b"};
    const RocCurve* curves[2] = {&roc.foreground, &roc.background};
    for (int ci = 0; ci < 2; ci++) {
        const RocCurve* c = curves[ci];
        double ly = T + 10 + 18.0 * ci;
        out << "<line x1=\"" << L + 12 << "\" y1=\"" << fmt_double(r2(ly)) << "\" x2=\"" << L + 34
            << "\" y2=\"" << fmt_double(r2(ly)) << "\" stroke=\"" << colors[ci]
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << L + 40 << "\" y=\"" << fmt_double(r2(ly + 4))
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << c->name;
        if (c->defined)
            out << " (auc " << fmt_double(r2(c->auc)) << ")";
        else
            out << " (undefined)";
        out << "</text>\n";
        if (!c->defined) continue;

        std::vector<RocPoint> pts = c->points;
        std::sort(pts.begin(), pts.end(), [](const RocPoint& a, const RocPoint& b) {
            if (a.fpr != b.fpr) return a.fpr < b.fpr;
            return a.tpr < b.tpr;
        });
        out << "<polyline fill=\"none\" stroke=\"" << colors[ci] << "\" stroke-width=\"1.5\" points=\"";
        for (size_t p = 0; p < pts.size(); p++) {
            if (p) out << ' ';
            out << fmt_double(xpos(pts[p].fpr)) << ',' << fmt_double(ypos(pts[p].tpr));
        }
        out << "\"/>\n";
        out << "<circle cx=\"" << fmt_double(xpos(c->mean_marker.fpr)) << "\" cy=\""
            << fmt_double(ypos(c->mean_marker.tpr)) << "\" r=\"4\" fill=\"none\" stroke=\""
            << colors[ci] << "\" stroke-width=\"2\"/>\n";
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("roc svg: write failed for " + path);
}

}  // namespace mvb
