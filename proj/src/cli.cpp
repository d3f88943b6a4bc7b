#include "mvb/cli.h"

#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mvb/bootstrap.h"
#include "mvb/dataset.h"
#include "mvb/disagreement.h"
#include "mvb/eval.h"
#include "mvb/rng.h"

namespace mvb {

namespace {

double snap_rate(double r) { return std::round(r * 1e9) / 1e9; }

// Either a comma list ("0,0.3,0.5") or an inclusive range "start:stop:step".
std::vector<double> parse_rates(const std::string& s) {
    std::vector<double> rates;
    auto to_double = [&](const std::string& tok) {
        size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("rates: bad number '" + tok + "'");
        return v;
    };
    if (s.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        size_t start = 0;
        while (true) {
            size_t c = s.find(':', start);
            parts.push_back(s.substr(start, c - start));
            if (c == std::string::npos) break;
            start = c + 1;
        }
        if (parts.size() != 3)
            throw std::invalid_argument("rates: range form is start:stop:step");
        double lo = to_double(parts[0]), hi = to_double(parts[1]), step = to_double(parts[2]);
        if (step <= 0) throw std::invalid_argument("rates: step must be positive");
        if (hi < lo) throw std::invalid_argument("rates: stop must be >= start");
        for (int i = 0;; i++) {
            double r = lo + step * i;
            if (r > hi + 1e-9) break;
            rates.push_back(snap_rate(r));
        }
    } else {
        size_t start = 0;
        while (start <= s.size()) {
            size_t c = s.find(',', start);
            std::string tok = s.substr(start, c - start);
            if (tok.empty()) throw std::invalid_argument("rates: empty entry in list");
            rates.push_back(snap_rate(to_double(tok)));
            if (c == std::string::npos) break;
            start = c + 1;
        }
    }
    return rates;
}

std::string path_stem(const std::string& path) {
    size_t slash = path.find_last_of('/');
    size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
    return path.substr(0, dot);
}

void ensure_seeds(MultiViewDataset& ds, int seeds_per_class, bool include_background,
                  uint64_t seed) {
    bool has_seeds = false;
    for (const auto& s : ds.seed_sets)
        if (!s.empty()) has_seeds = true;
    if (has_seeds) return;
    if (seeds_per_class < 1)
        throw std::invalid_argument(
            "dataset has no seed rows; pass --seeds-per-class to split one off");
    split_labeled_unlabeled(ds, seeds_per_class, seed * 977 + 13, include_background);
}

struct GenerateArgs {
    SyntheticConfig cfg;
    int dims = 2;
    std::string out;
};

void cmd_generate(const GenerateArgs& a) {
    SyntheticConfig cfg = a.cfg;
    cfg.dims.assign(static_cast<size_t>(cfg.V), a.dims);
    MultiViewDataset ds = generate_synthetic(cfg);
    save_dataset(ds, a.out);

    size_t fg = 0, bg = 0, corrupted = 0;
    for (const auto& s : ds.unlabeled) {
        if (s.nominal_label == kBackground)
            bg++;
        else
            fg++;
        for (int v = 0; v < ds.V; v++)
            if (s.true_view_labels[v] != s.nominal_label) {
                corrupted++;
                break;
            }
    }
    std::cout << "wrote " << a.out << ": V=" << ds.V << " classes=" << ds.n_classes
              << "(+background) pool=" << ds.pool_size() << " (foreground " << fg
              << ", background " << bg << ", corrupted " << corrupted << ") test="
              << ds.test.size() << "\n";
}

struct DetectArgs {
    std::string input;
    std::string out;
    std::string roc_csv;  // empty -> derived from out
    std::string roc_svg;  // empty -> derived from out
    bool no_svg = false;
};

void cmd_detect(const DetectArgs& a) {
    MultiViewDataset ds = load_dataset(a.input);
    if (ds.pool_size() < 2) throw std::invalid_argument("detect: pool has fewer than 2 samples");
    EntropyTable table = build_entropy_table(ds);

    std::ofstream out(a.out);
    if (!out) throw std::runtime_error("cannot write " + a.out);
    out << "sample_index,verdict";
    for (int i = 0; i < ds.V; i++)
        for (int j = 0; j < ds.V; j++)
            if (i != j) out << ",bit_" << (i + 1) << "_" << (j + 1);
    for (int i = 0; i < ds.V; i++)
        for (int j = 0; j < ds.V; j++)
            if (i != j) out << ",h_" << (i + 1) << "_" << (j + 1);
    out << "\n";
    size_t counts[3] = {0, 0, 0};
    for (size_t k = 0; k < table.M; k++) {
        Verdict v = classify_sample(table, k);
        counts[static_cast<int>(v)]++;
        out << k << ',' << to_string(v);
        for (int i = 0; i < ds.V; i++)
            for (int j = 0; j < ds.V; j++)
                if (i != j) out << ',' << (indicator_m(table, i, j, k) ? 1 : 0);
        for (int i = 0; i < ds.V; i++)
            for (int j = 0; j < ds.V; j++)
                if (i != j) out << ',' << fmt_double(table.H[table.pair_index(i, j)][k]);
        out << "\n";
    }
    out.close();

    DetectionRoc roc = detection_roc(ds, table);
    std::string roc_csv = a.roc_csv.empty() ? path_stem(a.out) + "_roc.csv" : a.roc_csv;
    write_roc_csv(roc, roc_csv);
    std::string svg_note;
    if (!a.no_svg) {
        std::string roc_svg = a.roc_svg.empty() ? path_stem(a.out) + "_roc.svg" : a.roc_svg;
        write_roc_svg(roc, roc_svg);
        svg_note = ", " + roc_svg;
    }
    std::cout << "wrote " << a.out << ", " << roc_csv << svg_note << "\n";
    std::cout << "verdicts: redundant_foreground " << counts[0] << ", redundant_background "
              << counts[1] << ", view_disagreement " << counts[2] << "\n";
    auto report_curve = [](const RocCurve& c) {
        std::cout << c.name << " auc: ";
        if (c.defined)
            std::cout << fmt_double(c.auc) << "\n";
        else
            std::cout << "undefined\n";
    };
    report_curve(roc.foreground);
    report_curve(roc.background);
}

struct BootstrapArgs {
    std::string input;
    std::string method = "filtered";
    std::string out;
    uint64_t seed = 1;
    int seeds_per_class = 5;
    bool no_background_seeds = false;
    double label_noise = 0.1;
    BootstrapConfig boot;
};

void cmd_bootstrap(const BootstrapArgs& a) {
    MultiViewDataset ds = load_dataset(a.input);

    if (a.method == "crossmodal" || a.method == "crossmodal_unfiltered") {
        if (ds.V < 2)
            throw std::invalid_argument("cross-modality methods need at least two views");
        auto strong = noisy_strong_labels(ds, a.label_noise, a.seed * 31 + 7);
        std::vector<std::vector<double>> weak;
        for (const auto& s : ds.unlabeled) weak.push_back(s.views[1]);
        CrossModalResult cm = cross_modality_bootstrap(strong, weak, weak.size(),
                                                       a.method == "crossmodal",
                                                       a.boot.uniform_priors);
        write_crossmodal_csv(cm.report, a.out);
        std::cout << "wrote " << a.out << ": kept " << cm.report.kept_count << ", filtered "
                  << cm.report.filtered_count << " of " << ds.pool_size() << " pairs\n";
        if (!ds.test.empty()) {
            std::vector<int> preds, truths;
            for (const auto& s : ds.test) {
                preds.push_back(predict(cm.classifier, s.views[1]).label);
                truths.push_back(s.nominal_label);
            }
            std::cout << "test ccr view 2: " << fmt_double(ccr(preds, truths)) << "\n";
        }
        return;
    }

    ensure_seeds(ds, a.seeds_per_class, !a.no_background_seeds, a.seed);
    BootstrapResult br;
    if (a.method == "baseline") {
        br = cotrain_baseline(ds, a.boot);
    } else {
        EntropyTable table = build_entropy_table(ds);
        br = multiview_bootstrap(ds, table, a.boot);
    }
    write_trace_csv(br.trace, a.out);
    std::cout << "wrote " << a.out << ": " << br.iterations << " iterations\n";
    if (!ds.test.empty()) {
        for (int v = 0; v < ds.V; v++) {
            std::vector<int> preds, truths;
            for (const auto& s : ds.test) {
                preds.push_back(predict(br.classifiers[v], s.views[v]).label);
                truths.push_back(s.nominal_label);
            }
            std::cout << "test ccr view " << (v + 1) << ": " << fmt_double(ccr(preds, truths))
                      << "\n";
        }
    }
}

struct SweepArgs {
    std::vector<std::string> methods{"baseline", "filtered"};
    std::string rates = "0:0.9:0.1";
    int trials = 10;
    uint64_t seed = 1;
    int jobs = 0;
    std::string out;
    std::string trials_out;  // empty -> derived
    std::string svg;         // empty -> derived
    bool no_svg = false;
    TrialOptions opt;
    int dims = 2;
};

void cmd_sweep(const SweepArgs& a) {
    TrialOptions opt = a.opt;
    opt.data.dims.assign(static_cast<size_t>(opt.data.V), a.dims);
    std::vector<double> rates = parse_rates(a.rates);
    SweepResult sw = run_sweep(a.methods, rates, a.trials, a.seed, opt, a.jobs);

    write_sweep_csv(sw, a.out);
    std::string trials_out = a.trials_out.empty() ? path_stem(a.out) + "_trials.csv" : a.trials_out;
    write_trials_csv(sw, trials_out);
    std::string svg_note;
    if (!a.no_svg) {
        std::string svg = a.svg.empty() ? path_stem(a.out) + ".svg" : a.svg;
        write_sweep_svg(sw, svg);
        svg_note = ", " + svg;
    }

    size_t failures = 0;
    for (const auto& t : sw.trials)
        if (t.failed) failures++;
    std::cout << "wrote " << a.out << ", " << trials_out << svg_note << ": " << sw.cells.size()
              << " cells, " << sw.trials.size() << " trials, " << failures << " failed\n";
    if (failures > 0) throw std::runtime_error(std::to_string(failures) + " trial(s) failed");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"multi-view disagreement detection and filtered bootstrapping"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI/TOML file");

    GenerateArgs gen;
    CLI::App* g = app.add_subcommand("generate", "generate a synthetic multi-view dataset");
    g->add_option("--classes", gen.cfg.n_foreground_classes, "foreground classes")
        ->capture_default_str();
    g->add_option("--per-class", gen.cfg.per_class_count,
                  "pool samples per class (foreground classes and background)")
        ->capture_default_str();
    g->add_option("--test-per-class", gen.cfg.test_per_class, "clean test samples per class")
        ->capture_default_str();
    g->add_option("--views", gen.cfg.V, "number of views")->capture_default_str();
    g->add_option("--dims", gen.dims, "feature dimensions per view")->capture_default_str();
    g->add_option("--sep", gen.cfg.class_sep, "class mean separation")->capture_default_str();
    g->add_option("--std", gen.cfg.class_std, "class standard deviation")->capture_default_str();
    g->add_option("--background-std", gen.cfg.background_std, "background standard deviation")
        ->capture_default_str();
    g->add_option("--disagreement", gen.cfg.disagreement_rate,
                  "fraction of foreground samples with one view corrupted")
        ->capture_default_str();
    g->add_option("--seed", gen.cfg.rng_seed, "rng seed")->capture_default_str();
    g->add_option("-o,--output", gen.out, "output dataset path (jsonl)")->required();
    g->callback([&]() { cmd_generate(gen); });

    DetectArgs det;
    CLI::App* d = app.add_subcommand("detect", "per-sample disagreement verdicts and ROC");
    d->add_option("-i,--input", det.input, "dataset path (jsonl)")->required();
    d->add_option("-o,--output", det.out, "verdict csv path")->required();
    d->add_option("--roc", det.roc_csv, "roc csv path (default: <output>_roc.csv)");
    d->add_option("--roc-svg", det.roc_svg, "roc svg path (default: <output>_roc.svg)");
    d->add_flag("--no-svg", det.no_svg, "skip the svg plot");
    d->callback([&]() { cmd_detect(det); });

    BootstrapArgs bs;
    CLI::App* b = app.add_subcommand("bootstrap", "run one bootstrapping method on a dataset");
    b->add_option("-i,--input", bs.input, "dataset path (jsonl)")->required();
    b->add_option("--method", bs.method, "baseline|filtered|crossmodal|crossmodal_unfiltered")
        ->check(CLI::IsMember({"baseline", "filtered", "crossmodal", "crossmodal_unfiltered"}))
        ->capture_default_str();
    b->add_option("-o,--output", bs.out, "trace/report csv path")->required();
    b->add_option("--seed", bs.seed, "rng seed (split and label noise sub-seeds derive from it)")
        ->capture_default_str();
    b->add_option("--seeds-per-class", bs.seeds_per_class,
                  "labeled seeds per class when the dataset has none")
        ->capture_default_str();
    b->add_flag("--no-background-seeds", bs.no_background_seeds,
                "exclude the background class from the labeled split");
    b->add_option("--label-noise", bs.label_noise, "strong-view label noise (crossmodal)")
        ->capture_default_str();
    b->add_option("-N,--per-iter", bs.boot.N, "samples labeled per classifier per iteration")
        ->capture_default_str();
    b->add_option("-T,--iters", bs.boot.T, "max iterations")->capture_default_str();
    bool no_balance_b = false;
    b->add_flag("--no-balance", no_balance_b, "rank purely by confidence, no class quota");
    b->add_flag("--uniform-priors", bs.boot.uniform_priors, "uniform class priors");
    b->add_flag("--recompute-entropy", bs.boot.recompute_entropy,
                "re-estimate entropy thresholds each iteration");
    b->callback([&]() {
        bs.boot.balance_classes = !no_balance_b;
        cmd_bootstrap(bs);
    });

    SweepArgs sa;
    CLI::App* s = app.add_subcommand("sweep", "disagreement-rate sweep over methods");
    s->add_option("--methods", sa.methods,
                  "comma list of baseline|filtered|crossmodal|crossmodal_unfiltered")
        ->delimiter(',')
        ->check(CLI::IsMember({"baseline", "filtered", "crossmodal", "crossmodal_unfiltered"}))
        ->capture_default_str();
    s->add_option("--rates", sa.rates, "start:stop:step range or comma list")
        ->capture_default_str();
    s->add_option("--trials", sa.trials, "trials per (method, rate) cell")->capture_default_str();
    s->add_option("--seed", sa.seed, "base seed; trial i uses seed+i")->capture_default_str();
    s->add_option("--jobs", sa.jobs, "parallel trial workers (0 = all cores)")
        ->capture_default_str();
    s->add_option("-o,--output", sa.out, "sweep csv path")->required();
    s->add_option("--trials-out", sa.trials_out, "per-trial csv path (default: <output>_trials.csv)");
    s->add_option("--svg", sa.svg, "svg plot path (default: <output>.svg)");
    s->add_flag("--no-svg", sa.no_svg, "skip the svg plot");
    s->add_option("--classes", sa.opt.data.n_foreground_classes, "foreground classes")
        ->capture_default_str();
    s->add_option("--per-class", sa.opt.data.per_class_count, "pool samples per class")
        ->capture_default_str();
    s->add_option("--test-per-class", sa.opt.data.test_per_class, "clean test samples per class")
        ->capture_default_str();
    s->add_option("--views", sa.opt.data.V, "number of views")->capture_default_str();
    s->add_option("--dims", sa.dims, "feature dimensions per view")->capture_default_str();
    s->add_option("--sep", sa.opt.data.class_sep, "class mean separation")->capture_default_str();
    s->add_option("--std", sa.opt.data.class_std, "class standard deviation")
        ->capture_default_str();
    s->add_option("--seeds-per-class", sa.opt.seeds_per_class, "labeled seeds per class")
        ->capture_default_str();
    bool no_bg_seeds = false;
    s->add_flag("--no-background-seeds", no_bg_seeds,
                "exclude the background class from the labeled split");
    s->add_option("--label-noise", sa.opt.label_noise, "strong-view label noise (crossmodal)")
        ->capture_default_str();
    s->add_option("-N,--per-iter", sa.opt.boot.N, "samples labeled per classifier per iteration")
        ->capture_default_str();
    s->add_option("-T,--iters", sa.opt.boot.T, "max iterations")->capture_default_str();
    bool no_balance_s = false;
    s->add_flag("--no-balance", no_balance_s, "rank purely by confidence, no class quota");
    s->add_flag("--uniform-priors", sa.opt.boot.uniform_priors, "uniform class priors");
    s->add_flag("--recompute-entropy", sa.opt.boot.recompute_entropy,
                "re-estimate entropy thresholds each iteration");
    s->callback([&]() {
        sa.opt.boot.balance_classes = !no_balance_s;
        sa.opt.include_background_seeds = !no_bg_seeds;
        cmd_sweep(sa);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\nrun with --help for usage\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> full;
    full.push_back("mvb");
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : full) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace mvb
