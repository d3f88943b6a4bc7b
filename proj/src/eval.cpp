#include "mvb/eval.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mvb/rng.h"

namespace mvb {

namespace {

const double kNan = std::numeric_limits<double>::quiet_NaN();

bool is_crossmodal(const std::string& method) {
    return method == "crossmodal" || method == "crossmodal_unfiltered";
}

void check_method(const std::string& method) {
    if (method != "baseline" && method != "filtered" && !is_crossmodal(method))
        throw std::invalid_argument("unknown method '" + method + "'");
}

double test_view_ccr(const GaussianBayes& model, const MultiViewDataset& ds, int view) {
    std::vector<int> preds, truths;
    for (const auto& s : ds.test) {
        preds.push_back(predict(model, s.views[view]).label);
        truths.push_back(s.nominal_label);
    }
    return ccr(preds, truths);
}

TrialResult run_trial_body(const std::string& method, const TrialOptions& opt,
                           double disagreement_rate, uint64_t seed) {
    TrialResult res;
    res.method = method;
    res.disagreement_rate = disagreement_rate;
    res.rng_seed = seed;
    res.foreground_auc = kNan;
    res.background_auc = kNan;

    SyntheticConfig cfg = opt.data;
    cfg.disagreement_rate = disagreement_rate;
    cfg.rng_seed = seed;

    if (is_crossmodal(method)) {
        if (cfg.V < 2)
            throw std::invalid_argument("cross-modality methods need at least two views");
        MultiViewDataset ds = generate_synthetic(cfg);
        split_labeled_unlabeled(ds, 0, seed + 1, opt.include_background_seeds);

        std::vector<std::pair<int, double>> strong =
            noisy_strong_labels(ds, opt.label_noise, seed * 31 + 7);
        std::vector<std::vector<double>> weak;
        for (const auto& s : ds.unlabeled) weak.push_back(s.views[1]);

        CrossModalResult cm = cross_modality_bootstrap(strong, weak, weak.size(),
                                                       method == "crossmodal",
                                                       opt.boot.uniform_priors);
        res.view_ccr.assign(static_cast<size_t>(ds.V), kNan);
        res.view_ccr[1] = test_view_ccr(cm.classifier, ds, 1);
        return res;
    }

    MultiViewDataset ds = generate_synthetic(cfg);
    split_labeled_unlabeled(ds, opt.seeds_per_class, seed * 977 + 13,
                            opt.include_background_seeds);
    EntropyTable table = build_entropy_table(ds);

    DetectionRoc roc = detection_roc(ds, table);
    if (roc.foreground.defined) res.foreground_auc = roc.foreground.auc;
    if (roc.background.defined) res.background_auc = roc.background.auc;

    BootstrapResult br = (method == "baseline") ? cotrain_baseline(ds, opt.boot)
                                                : multiview_bootstrap(ds, table, opt.boot);
    for (int v = 0; v < ds.V; v++)
        res.view_ccr.push_back(test_view_ccr(br.classifiers[v], ds, v));
    return res;
}

void csv_field(std::ofstream& out, const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        out << s;
        return;
    }
    out << '"';
    for (char c : s) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

std::vector<std::pair<int, double>> noisy_strong_labels(const MultiViewDataset& ds, double noise,
                                                        uint64_t seed) {
    if (!(noise >= 0.0 && noise <= 1.0))
        throw std::invalid_argument("label_noise must be in [0, 1]");
    std::vector<std::pair<int, double>> strong;
    Rng rng(seed);
    int n_all = ds.n_classes + 1;
    for (const auto& s : ds.unlabeled) {
        int lab = s.true_view_labels[0];
        if (rng.uniform() < noise) {
            uint64_t pick = rng.below(static_cast<uint64_t>(n_all - 1));
            int alt = 0, seen = 0;
            for (int c = 0; c < n_all; c++) {
                if (c == lab) continue;
                if (static_cast<uint64_t>(seen) == pick) {
                    alt = c;
                    break;
                }
                seen++;
            }
            lab = alt;
        }
        strong.push_back({lab, 1.0});
    }
    return strong;
}

double ccr(const std::vector<int>& predictions, const std::vector<int>& truths) {
    if (predictions.empty()) throw std::invalid_argument("ccr: empty prediction list");
    if (predictions.size() != truths.size())
        throw std::invalid_argument("ccr: prediction and truth lengths differ");
    size_t correct = 0;
    for (size_t i = 0; i < predictions.size(); i++)
        if (predictions[i] == truths[i]) correct++;
    return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

TrialResult run_trial(const std::string& method, const TrialOptions& opt,
                      double disagreement_rate, uint64_t seed) {
    check_method(method);
    auto t0 = std::chrono::steady_clock::now();
    TrialResult res;
    try {
        res = run_trial_body(method, opt, disagreement_rate, seed);
    } catch (const std::exception& e) {
        res.method = method;
        res.disagreement_rate = disagreement_rate;
        res.rng_seed = seed;
        res.foreground_auc = kNan;
        res.background_auc = kNan;
        res.view_ccr.clear();
        res.failed = true;
        res.failure_reason = e.what();
    }
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

SweepResult run_sweep(const std::vector<std::string>& methods, const std::vector<double>& rates,
                      int trials_per_point, uint64_t base_seed, const TrialOptions& opt,
                      int jobs) {
    if (methods.empty()) throw std::invalid_argument("sweep: no methods given");
    if (rates.empty()) throw std::invalid_argument("sweep: no disagreement rates given");
    if (trials_per_point < 1) throw std::invalid_argument("sweep: trials must be positive");
    for (const auto& m : methods) check_method(m);
    for (double r : rates)
        if (!(r >= 0.0 && r < 1.0))
            throw std::invalid_argument("sweep: disagreement rate must be in [0, 1)");

    SweepResult sw;
    sw.methods = methods;
    sw.rates = rates;
    sw.trials_requested = trials_per_point;

    struct Job {
        size_t method;
        size_t rate;
        int trial;
    };
    std::vector<Job> jobs_list;
    for (size_t m = 0; m < methods.size(); m++)
        for (size_t r = 0; r < rates.size(); r++)
            for (int t = 0; t < trials_per_point; t++) jobs_list.push_back({m, r, t});

    sw.trials.resize(jobs_list.size());
#ifdef _OPENMP
    int nthreads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
#else
    (void)jobs;
#endif
    for (long long idx = 0; idx < static_cast<long long>(jobs_list.size()); idx++) {
        const Job& jb = jobs_list[static_cast<size_t>(idx)];
        sw.trials[static_cast<size_t>(idx)] =
            run_trial(methods[jb.method], opt, rates[jb.rate],
                      base_seed + static_cast<uint64_t>(jb.trial));
    }

    // Deterministic aggregation in (method, rate, view) order. Cross-modality
    // methods train only the weak view, so only that view gets a cell.
    for (size_t m = 0; m < methods.size(); m++) {
        std::vector<int> views;
        if (is_crossmodal(methods[m]))
            views.push_back(1);
        else
            for (int v = 0; v < opt.data.V; v++) views.push_back(v);
        for (size_t r = 0; r < rates.size(); r++) {
            size_t off = (m * rates.size() + r) * static_cast<size_t>(trials_per_point);
            for (int v : views) {
                std::vector<double> vals;
                for (int t = 0; t < trials_per_point; t++) {
                    const TrialResult& tr = sw.trials[off + static_cast<size_t>(t)];
                    if (!tr.failed) vals.push_back(tr.view_ccr[static_cast<size_t>(v)]);
                }
                SweepCell cell{methods[m], rates[r], v, kNan, kNan, vals.size()};
                if (!vals.empty()) {
                    double mean = 0.0;
                    for (double x : vals) mean += x;
                    mean /= static_cast<double>(vals.size());
                    double var = 0.0;
                    for (double x : vals) var += (x - mean) * (x - mean);
                    var /= static_cast<double>(vals.size());
                    cell.mean_ccr = mean;
                    cell.std_ccr = std::sqrt(var);
                }
                sw.cells.push_back(cell);
            }
        }
    }
    return sw;
}

void write_sweep_csv(const SweepResult& sweep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "method,rate,view,mean_ccr,std_ccr,trials\n";
    for (const auto& c : sweep.cells) {
        out << c.method << ',' << fmt_double(c.rate) << ',' << (c.view + 1) << ','
            << fmt_double(c.mean_ccr) << ',' << fmt_double(c.std_ccr) << ',' << c.trials << '\n';
    }
}

void write_trials_csv(const SweepResult& sweep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "method,rate,trial,seed,view,ccr,foreground_auc,background_auc,failed,failure_reason\n";
    size_t per_cell = static_cast<size_t>(sweep.trials_requested);
    for (size_t i = 0; i < sweep.trials.size(); i++) {
        const TrialResult& tr = sweep.trials[i];
        int trial_idx = static_cast<int>(i % per_cell);
        if (tr.failed) {
            out << tr.method << ',' << fmt_double(tr.disagreement_rate) << ',' << trial_idx << ','
                << tr.rng_seed << ",,,,,1,";
            csv_field(out, tr.failure_reason);
            out << '\n';
            continue;
        }
        for (size_t v = 0; v < tr.view_ccr.size(); v++) {
            if (std::isnan(tr.view_ccr[v])) continue;
            out << tr.method << ',' << fmt_double(tr.disagreement_rate) << ',' << trial_idx << ','
                << tr.rng_seed << ',' << (v + 1) << ',' << fmt_double(tr.view_ccr[v]) << ','
                << fmt_double(tr.foreground_auc) << ',' << fmt_double(tr.background_auc)
                << ",0,\n";
        }
    }
}

void write_sweep_svg(const SweepResult& sweep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);

    const double W = 760, H = 460;
    const double L = 64, R = W - 200, T = 40, B = H - 56;
    double r0 = sweep.rates.front(), r1 = sweep.rates.front();
    for (double r : sweep.rates) {
        r0 = std::min(r0, r);
        r1 = std::max(r1, r);
    }
    auto xpos = [&](double rate) {
        if (r1 == r0) return (L + R) / 2.0;
        return L + (rate - r0) / (r1 - r0) * (R - L);
    };
    auto ypos = [&](double v) {
        double c = std::min(1.0, std::max(0.0, v));
        return T + (1.0 - c) * (B - T);
    };
    static const char* palette[] = {"#1b6ca8", "#c0392b", "#27ae60", "#8e44ad",
                                    "#e67e22", "#16a085", "#7f8c8d", "#2c3e50"};
    const size_t npal = sizeof(palette) / sizeof(palette[0]);

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << fmt_double(round2((L + R) / 2)) << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">mean test CCR vs disagreement rate</text>\n";

    // axes
    out << "<line x1=\"" << L << "\" y1=\"" << B << "\" x2=\"" << R << "\" y2=\"" << B
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << B
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; i++) {
        double v = i * 0.25;
        double y = round2(ypos(v));
        out << "<line x1=\"" << L - 4 << "\" y1=\"" << fmt_double(y) << "\" x2=\"" << L
            << "\" y2=\"" << fmt_double(y) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << L - 8 << "\" y=\"" << fmt_double(round2(y + 4))
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt_double(v) << "</text>\n";
    }
    for (double r : sweep.rates) {
        double x = round2(xpos(r));
        out << "<line x1=\"" << fmt_double(x) << "\" y1=\"" << B << "\" x2=\"" << fmt_double(x)
            << "\" y2=\"" << B + 4 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt_double(x) << "\" y=\"" << B + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt_double(r) << "</text>\n";
    }
    out << "<text x=\"" << fmt_double(round2((L + R) / 2)) << "\" y=\"" << H - 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
           "disagreement rate</text>\n";

    // one series per (method, view) cell group
    struct SeriesKey {
        std::string method;
        int view;
    };
    std::vector<SeriesKey> series;
    for (const auto& c : sweep.cells) {
        bool found = false;
        for (const auto& s : series)
            if (s.method == c.method && s.view == c.view) found = true;
        if (!found) series.push_back({c.method, c.view});
    }

    for (size_t si = 0; si < series.size(); si++) {
        const char* color = palette[si % npal];
        std::vector<const SweepCell*> pts;
        for (const auto& c : sweep.cells)
            if (c.method == series[si].method && c.view == series[si].view &&
                !std::isnan(c.mean_ccr))
                pts.push_back(&c);
        std::sort(pts.begin(), pts.end(),
                  [](const SweepCell* a, const SweepCell* b) { return a->rate < b->rate; });

        for (const SweepCell* c : pts) {
            double x = round2(xpos(c->rate));
            double ylo = round2(ypos(c->mean_ccr - c->std_ccr));
            double yhi = round2(ypos(c->mean_ccr + c->std_ccr));
            out << "<line x1=\"" << fmt_double(x) << "\" y1=\"" << fmt_double(ylo) << "\" x2=\""
                << fmt_double(x) << "\" y2=\"" << fmt_double(yhi) << "\" stroke=\"" << color
                << "\"/>\n";
            out << "<line x1=\"" << fmt_double(round2(x - 3)) << "\" y1=\"" << fmt_double(ylo)
                << "\" x2=\"" << fmt_double(round2(x + 3)) << "\" y2=\"" << fmt_double(ylo)
                << "\" stroke=\"" << color << "\"/>\n";
            out << "<line x1=\"" << fmt_double(round2(x - 3)) << "\" y1=\"" << fmt_double(yhi)
                << "\" x2=\"" << fmt_double(round2(x + 3)) << "\" y2=\"" << fmt_double(yhi)
                << "\" stroke=\"" << color << "\"/>\n";
        }
        if (pts.size() > 1) {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (size_t p = 0; p < pts.size(); p++) {
                if (p) out << ' ';
                out << fmt_double(round2(xpos(pts[p]->rate))) << ','
                    << fmt_double(round2(ypos(pts[p]->mean_ccr)));
            }
            out << "\"/>\n";
        }
        for (const SweepCell* c : pts) {
            out << "<circle cx=\"" << fmt_double(round2(xpos(c->rate))) << "\" cy=\""
                << fmt_double(round2(ypos(c->mean_ccr))) << "\" r=\"3\" fill=\"" << color
                << "\"/>\n";
        }
        double ly = T + 8 + 18.0 * static_cast<double>(si);
        out << "<line x1=\"" << R + 12 << "\" y1=\"" << fmt_double(round2(ly)) << "\" x2=\""
            << R + 34 << "\" y2=\"" << fmt_double(round2(ly)) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << R + 40 << "\" y=\"" << fmt_double(round2(ly + 4))
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << series[si].method << " view "
            << (series[si].view + 1) << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace mvb
