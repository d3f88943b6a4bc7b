#include "mvb/dataset.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "mvb/rng.h"

namespace mvb {

void validate(const SyntheticConfig& cfg) {
    if (cfg.n_foreground_classes < 2)
        throw std::invalid_argument("n_foreground_classes: must be >= 2");
    if (cfg.per_class_count < 1)
        throw std::invalid_argument("per_class_count: must be >= 1");
    if (cfg.test_per_class < 0)
        throw std::invalid_argument("test_per_class: must be >= 0");
    if (cfg.V < 2)
        throw std::invalid_argument("V: must be >= 2");
    if (static_cast<int>(cfg.dims.size()) != cfg.V)
        throw std::invalid_argument("dims: size must equal V");
    for (int d : cfg.dims)
        if (d < 1) throw std::invalid_argument("dims: each view dimensionality must be >= 1");
    if (cfg.class_std <= 0.0)
        throw std::invalid_argument("class_std: must be > 0");
    if (cfg.background_std <= 0.0)
        throw std::invalid_argument("background_std: must be > 0");
    if (!(cfg.disagreement_rate >= 0.0 && cfg.disagreement_rate <= 1.0))
        throw std::invalid_argument("disagreement_rate: must be in [0, 1]");
}

namespace {

std::vector<double> draw_vec(Rng& rng, int dim, double mean, double std) {
    std::vector<double> x(dim);
    for (int d = 0; d < dim; ++d) x[d] = rng.normal(mean, std);
    return x;
}

// Corrupt round(rate * foreground-count) uncorrupted foreground pool samples,
// one uniformly chosen view each, drawing replacements from rng's stream.
void inject_impl(MultiViewDataset& ds, double rate, Rng& rng, double bg_mean,
                 double bg_std) {
    if (!(rate >= 0.0 && rate <= 1.0))
        throw std::invalid_argument("rate: must be in [0, 1]");
    size_t m = 0;
    std::vector<size_t> clean_fg;
    for (size_t k = 0; k < ds.unlabeled.size(); ++k) {
        const auto& s = ds.unlabeled[k];
        if (s.nominal_label == kBackground) continue;
        ++m;
        bool uncorrupted = true;
        for (int v = 0; v < ds.V; ++v)
            if (s.true_view_labels[v] != s.nominal_label) uncorrupted = false;
        if (uncorrupted) clean_fg.push_back(k);
    }
    if (rate == 0.0) return;
    if (m == 0) throw std::runtime_error("inject: no foreground samples in pool");
    size_t want = static_cast<size_t>(std::llround(rate * static_cast<double>(m)));
    if (want > clean_fg.size())
        throw std::runtime_error("inject: not enough uncorrupted foreground samples");
    std::vector<size_t> pick = rng.choose(clean_fg.size(), want);
    for (size_t p : pick) {
        size_t k = clean_fg[p];
        int v = static_cast<int>(rng.below(static_cast<uint64_t>(ds.V)));
        ds.unlabeled[k].views[v] = draw_vec(rng, ds.dims[v], bg_mean, bg_std);
        ds.unlabeled[k].true_view_labels[v] = kBackground;
    }
}

}  // namespace

MultiViewDataset generate_synthetic(const SyntheticConfig& cfg) {
    validate(cfg);
    Rng rng(cfg.rng_seed);
    MultiViewDataset ds;
    ds.V = cfg.V;
    ds.dims = cfg.dims;
    ds.n_classes = cfg.n_foreground_classes;

    auto make_sample = [&](double mean, int label) {
        MultiViewSample s;
        s.nominal_label = label;
        for (int v = 0; v < cfg.V; ++v) {
            s.views.push_back(draw_vec(rng, cfg.dims[v], mean, label == kBackground
                                                                   ? cfg.background_std
                                                                   : cfg.class_std));
            s.true_view_labels.push_back(label);
        }
        return s;
    };

    for (int c = 1; c <= cfg.n_foreground_classes; ++c)
        for (int i = 0; i < cfg.per_class_count; ++i)
            ds.unlabeled.push_back(make_sample(cfg.class_sep * c, c));
    if (cfg.redundant_background)
        for (int i = 0; i < cfg.per_class_count; ++i)
            ds.unlabeled.push_back(make_sample(cfg.background_mean, kBackground));

    inject_impl(ds, cfg.disagreement_rate, rng, cfg.background_mean, cfg.background_std);

    for (int c = 1; c <= cfg.n_foreground_classes; ++c)
        for (int i = 0; i < cfg.test_per_class; ++i)
            ds.test.push_back(make_sample(cfg.class_sep * c, c));

    // Pool order is shuffled so downstream index-based tie-breaking never sees
    // the class-blocked generation order.
    Rng shuffle_rng(cfg.rng_seed ^ 0xD1CEULL);
    std::vector<size_t> perm = shuffle_rng.permutation(ds.unlabeled.size());
    std::vector<MultiViewSample> pool(ds.unlabeled.size());
    for (size_t k = 0; k < perm.size(); ++k) pool[k] = std::move(ds.unlabeled[perm[k]]);
    ds.unlabeled = std::move(pool);

    ds.unlabeled_mask.assign(cfg.V, std::vector<uint8_t>(ds.unlabeled.size(), 1));
    ds.seed_sets.assign(cfg.V, {});
    return ds;
}

void inject_view_disagreement(MultiViewDataset& ds, double rate, uint64_t rng_seed,
                              double background_std) {
    Rng rng(rng_seed);
    inject_impl(ds, rate, rng, 0.0, background_std);
}

void split_labeled_unlabeled(MultiViewDataset& ds, int per_class_seed_count,
                             uint64_t rng_seed, bool include_background_seeds) {
    if (per_class_seed_count < 0)
        throw std::invalid_argument("per_class_seed_count: must be >= 0");
    if (ds.seed_sets.empty()) ds.seed_sets.assign(ds.V, {});
    Rng rng(rng_seed);
    std::vector<int> classes;
    for (int c = 1; c <= ds.n_classes; ++c) classes.push_back(c);
    if (include_background_seeds) classes.push_back(kBackground);

    std::vector<size_t> seed_idx;
    for (int c : classes) {
        std::vector<size_t> clean;
        for (size_t k = 0; k < ds.unlabeled.size(); ++k) {
            const auto& s = ds.unlabeled[k];
            if (s.nominal_label != c) continue;
            bool ok = true;
            for (int t : s.true_view_labels)
                if (t != c) ok = false;
            if (ok) clean.push_back(k);
        }
        if (clean.size() < static_cast<size_t>(per_class_seed_count)) {
            std::ostringstream msg;
            msg << "split: class " << c << " needs " << per_class_seed_count
                << " uncorrupted samples, found " << clean.size();
            throw std::runtime_error(msg.str());
        }
        for (size_t p : rng.choose(clean.size(), per_class_seed_count))
            seed_idx.push_back(clean[p]);
    }

    std::vector<uint8_t> is_seed(ds.unlabeled.size(), 0);
    for (size_t k : seed_idx) is_seed[k] = 1;
    for (int v = 0; v < ds.V; ++v)
        for (size_t k : seed_idx)
            ds.seed_sets[v].push_back({ds.unlabeled[k].views[v], ds.unlabeled[k].nominal_label});

    std::vector<MultiViewSample> rest;
    rest.reserve(ds.unlabeled.size() - seed_idx.size());
    for (size_t k = 0; k < ds.unlabeled.size(); ++k)
        if (!is_seed[k]) rest.push_back(std::move(ds.unlabeled[k]));
    ds.unlabeled = std::move(rest);
    ds.unlabeled_mask.assign(ds.V, std::vector<uint8_t>(ds.unlabeled.size(), 1));
}

namespace {

nlohmann::json sample_json(const MultiViewSample& s, const char* role) {
    nlohmann::json j;
    j["views"] = s.views;
    j["true_view_labels"] = s.true_view_labels;
    j["nominal_label"] = s.nominal_label;
    j["role"] = role;
    return j;
}

MultiViewSample sample_from_json(const nlohmann::json& j, const MultiViewDataset& ds,
                                 size_t line_no, const std::string& path) {
    MultiViewSample s;
    s.views = j.at("views").get<std::vector<std::vector<double>>>();
    s.true_view_labels = j.at("true_view_labels").get<std::vector<int>>();
    s.nominal_label = j.at("nominal_label").get<int>();
    if (static_cast<int>(s.views.size()) != ds.V ||
        static_cast<int>(s.true_view_labels.size()) != ds.V)
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": view count does not match header V");
    for (int v = 0; v < ds.V; ++v)
        if (static_cast<int>(s.views[v].size()) != ds.dims[v])
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": view dimensionality does not match header dims");
    return s;
}

}  // namespace

void save_dataset(const MultiViewDataset& ds, const std::string& path) {
    // Seed sets are stored as whole samples, which requires every view to hold
    // the same seed samples in the same order (true for fresh splits).
    size_t n_seeds = ds.seed_sets.empty() ? 0 : ds.seed_sets[0].size();
    for (const auto& sv : ds.seed_sets) {
        if (sv.size() != n_seeds)
            throw std::runtime_error("save: per-view seed sets diverged, cannot serialize");
        for (size_t i = 0; i < n_seeds; ++i)
            if (sv[i].label != ds.seed_sets[0][i].label)
                throw std::runtime_error("save: per-view seed sets diverged, cannot serialize");
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save: cannot open " + path);
    nlohmann::json header;
    header["V"] = ds.V;
    header["dims"] = ds.dims;
    header["n_classes"] = ds.n_classes;
    out << header.dump() << "\n";
    for (size_t i = 0; i < n_seeds; ++i) {
        MultiViewSample s;
        s.nominal_label = ds.seed_sets[0][i].label;
        for (int v = 0; v < ds.V; ++v) {
            s.views.push_back(ds.seed_sets[v][i].x);
            s.true_view_labels.push_back(s.nominal_label);
        }
        out << sample_json(s, "seed").dump() << "\n";
    }
    for (const auto& s : ds.unlabeled) out << sample_json(s, "unlabeled").dump() << "\n";
    for (const auto& s : ds.test) out << sample_json(s, "test").dump() << "\n";
    if (!out) throw std::runtime_error("save: write failed for " + path);
}

MultiViewDataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load: cannot open " + path);
    std::string line;
    size_t line_no = 0;
    MultiViewDataset ds;
    auto parse_line = [&](const std::string& text) {
        try {
            return nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    };
    if (!std::getline(in, line))
        throw std::runtime_error(path + ":1: missing header line");
    line_no = 1;
    nlohmann::json header = parse_line(line);
    try {
        ds.V = header.at("V").get<int>();
        ds.dims = header.at("dims").get<std::vector<int>>();
        ds.n_classes = header.at("n_classes").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ":1: bad header: " + e.what());
    }
    if (ds.V < 1 || static_cast<int>(ds.dims.size()) != ds.V || ds.n_classes < 1)
        throw std::runtime_error(path + ":1: bad header values");
    ds.seed_sets.assign(ds.V, {});
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = parse_line(line);
        std::string role;
        try {
            role = j.at("role").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        MultiViewSample s;
        try {
            s = sample_from_json(j, ds, line_no, path);
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (role == "seed") {
            for (int v = 0; v < ds.V; ++v)
                ds.seed_sets[v].push_back({s.views[v], s.nominal_label});
        } else if (role == "unlabeled") {
            ds.unlabeled.push_back(std::move(s));
        } else if (role == "test") {
            ds.test.push_back(std::move(s));
        } else {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": unknown role \"" + role + "\"");
        }
    }
    ds.unlabeled_mask.assign(ds.V, std::vector<uint8_t>(ds.unlabeled.size(), 1));
    return ds;
}

bool datasets_equal(const MultiViewDataset& a, const MultiViewDataset& b) {
    auto sample_eq = [](const MultiViewSample& x, const MultiViewSample& y) {
        return x.views == y.views && x.true_view_labels == y.true_view_labels &&
               x.nominal_label == y.nominal_label;
    };
    if (a.V != b.V || a.dims != b.dims || a.n_classes != b.n_classes) return false;
    if (a.seed_sets.size() != b.seed_sets.size()) return false;
    for (size_t v = 0; v < a.seed_sets.size(); ++v) {
        if (a.seed_sets[v].size() != b.seed_sets[v].size()) return false;
        for (size_t i = 0; i < a.seed_sets[v].size(); ++i)
            if (a.seed_sets[v][i].x != b.seed_sets[v][i].x ||
                a.seed_sets[v][i].label != b.seed_sets[v][i].label)
                return false;
    }
    if (a.unlabeled.size() != b.unlabeled.size() || a.test.size() != b.test.size())
        return false;
    for (size_t k = 0; k < a.unlabeled.size(); ++k)
        if (!sample_eq(a.unlabeled[k], b.unlabeled[k])) return false;
    for (size_t k = 0; k < a.test.size(); ++k)
        if (!sample_eq(a.test[k], b.test[k])) return false;
    return a.unlabeled_mask == b.unlabeled_mask;
}

}  // namespace mvb
